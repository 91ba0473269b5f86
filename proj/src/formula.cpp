#include "spanwalk/formula.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "spanwalk/gate_catalog.hpp"

namespace spanwalk {

namespace {

class Parser {
public:
    Parser(const std::string& s, const FormulaOptions& opt) : s_(s), opt_(opt) {}

    Formula run() {
        Formula f;
        f.root = node();
        skip();
        if (p_ != s_.size()) throw FormulaError("unexpected trailing input", p_);
        int maxVar = 0;
        for (int v : seen_) maxVar = std::max(maxVar, v + 1);
        if (int(seen_.size()) != maxVar)
            throw FormulaError("variables must be exactly x1..x" + std::to_string(maxVar), 0);
        f.numInputs = maxVar;
        return f;
    }

private:
    void skip() {
        while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
    }

    std::string word() {
        std::size_t b = p_;
        while (p_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[p_]))) ++p_;
        return s_.substr(b, p_ - b);
    }

    long number() {
        skip();
        std::size_t b = p_;
        while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) ++p_;
        if (b == p_) throw FormulaError("expected a number", b);
        if (p_ - b > 9) throw FormulaError("number too large", b);
        return std::stol(s_.substr(b, p_ - b));
    }

    void expect(char c) {
        skip();
        if (p_ >= s_.size() || s_[p_] != c)
            throw FormulaError(std::string("expected '") + c + "'", p_);
        ++p_;
    }

    GateNode node() {
        skip();
        const std::size_t start = p_;
        std::string w = word();
        if (w.empty()) throw FormulaError("expected a gate or variable", start);
        std::string up = w;
        for (auto& c : up) c = char(std::toupper(static_cast<unsigned char>(c)));

        if (up[0] == 'X' && up.size() > 1 &&
            std::all_of(up.begin() + 1, up.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            if (up.size() > 8) throw FormulaError("variable index too large", start);
            int v = std::stoi(up.substr(1));
            if (v < 1) throw FormulaError("variables are numbered from x1", start);
            if (!seen_.insert(v - 1).second)
                throw FormulaError("variable x" + std::to_string(v) + " repeated (formula must be read-once)", start);
            GateNode g;
            g.kind = GateKind::Leaf;
            g.var = v - 1;
            return g;
        }

        GateNode g;
        if (up == "NOT") g.kind = GateKind::Not;
        else if (up == "AND") g.kind = GateKind::And;
        else if (up == "OR") g.kind = GateKind::Or;
        else if (up == "PARITY" || up == "XOR") g.kind = GateKind::Parity;
        else if (up == "MAJ") g.kind = GateKind::Maj3;
        else if (up == "EQUAL") g.kind = GateKind::EqualK;
        else if (up == "TT3" || up == "TT4") {
            g.kind = up == "TT3" ? GateKind::TruthTable3 : GateKind::TruthTable4;
            expect(':');
            const std::size_t np = p_;
            long t = number();
            long limit = up == "TT3" ? 255 : 65535;
            if (t > limit) throw FormulaError(up + " table out of range", np);
            if (t == 0 || t == limit) throw FormulaError("constant gates are not allowed", np);
            g.table = std::uint32_t(t);
        } else {
            throw FormulaError("unknown gate '" + w + "'", start);
        }

        expect('(');
        g.children.push_back(node());
        skip();
        while (p_ < s_.size() && s_[p_] == ',') {
            ++p_;
            g.children.push_back(node());
            skip();
        }
        expect(')');

        const int k = g.arity();
        auto bad = [&](const std::string& want) {
            throw FormulaError(up + " expects " + want + " arguments, got " + std::to_string(k), start);
        };
        switch (g.kind) {
            case GateKind::Not: if (k != 1) bad("1"); break;
            case GateKind::And:
            case GateKind::Or:
            case GateKind::Parity: if (k < 2) bad("at least 2"); break;
            case GateKind::Maj3: if (k != 3) bad("3"); break;
            case GateKind::EqualK:
                if (k < 2 || k > opt_.maxEqualArity) bad("2.." + std::to_string(opt_.maxEqualArity));
                break;
            case GateKind::TruthTable3: if (k != 3) bad("3"); break;
            case GateKind::TruthTable4: if (k != 4) bad("4"); break;
            default: break;
        }
        return g;
    }

    const std::string& s_;
    FormulaOptions opt_;
    std::size_t p_ = 0;
    std::set<int> seen_;
};

}  // namespace

Formula parseFormula(const std::string& text, const FormulaOptions& opt) {
    return Parser(text, opt).run();
}

std::string printNode(const GateNode& g) {
    std::string name;
    switch (g.kind) {
        case GateKind::Leaf: return "x" + std::to_string(g.var + 1);
        case GateKind::Not: name = "NOT"; break;
        case GateKind::And: name = "AND"; break;
        case GateKind::Or: name = "OR"; break;
        case GateKind::Parity: name = "PARITY"; break;
        case GateKind::Maj3: name = "MAJ"; break;
        case GateKind::EqualK: name = "EQUAL"; break;
        case GateKind::TruthTable3: name = "TT3:" + std::to_string(g.table); break;
        case GateKind::TruthTable4: name = "TT4:" + std::to_string(g.table); break;
    }
    std::string out = name + "(";
    for (int k = 0; k < g.arity(); ++k) {
        if (k) out += ",";
        out += printNode(g.children[k]);
    }
    return out + ")";
}

std::string printFormula(const Formula& f) { return printNode(f.root); }

bool gateFunction(const GateNode& g, const std::vector<int>& c) {
    int ones = 0;
    for (int b : c) ones += b ? 1 : 0;
    const int k = int(c.size());
    switch (g.kind) {
        case GateKind::Leaf: throw std::logic_error("leaf has no gate function");
        case GateKind::Not: return !c[0];
        case GateKind::And: return ones == k;
        case GateKind::Or: return ones > 0;
        case GateKind::Parity: return ones % 2 == 1;
        case GateKind::Maj3: return ones >= 2;
        case GateKind::EqualK: return ones == 0 || ones == k;
        case GateKind::TruthTable3:
        case GateKind::TruthTable4: {
            std::uint64_t v = 0;
            for (int b : c) v = (v << 1) | std::uint64_t(b ? 1 : 0);
            return (g.table >> ((1u << k) - 1 - v)) & 1u;
        }
    }
    return false;
}

bool evaluateNode(const GateNode& g, const Bits& x) {
    if (g.kind == GateKind::Leaf) return x.at(g.var) != 0;
    std::vector<int> c;
    c.reserve(g.children.size());
    for (const auto& ch : g.children) c.push_back(evaluateNode(ch, x) ? 1 : 0);
    return gateFunction(g, c);
}

bool evaluateClassically(const Formula& f, const Bits& x) {
    if (int(x.size()) != f.numInputs)
        throw std::invalid_argument("input has " + std::to_string(x.size()) + " bits, formula needs " +
                                    std::to_string(f.numInputs));
    return evaluateNode(f.root, x);
}

std::uint32_t gateTruthTable(const GateNode& g) {
    if (g.kind == GateKind::TruthTable3 || g.kind == GateKind::TruthTable4) return g.table;
    const int k = g.arity();
    if (k > 5) throw std::invalid_argument("truth table limited to 5 inputs");
    std::uint32_t t = 0;
    const std::uint32_t N = 1u << k;
    for (std::uint32_t v = 0; v < N; ++v) {
        Bits b = bitsFromIndex(v, k);
        if (gateFunction(g, b)) t |= 1u << (N - 1 - v);
    }
    return t;
}

double gateAdv(const GateNode& g) {
    const int k = g.arity();
    switch (g.kind) {
        case GateKind::Leaf:
        case GateKind::Not: return 1.0;
        case GateKind::And:
        case GateKind::Or: return std::sqrt(double(k));
        case GateKind::Parity: return double(k);
        case GateKind::Maj3: return 2.0;
        case GateKind::EqualK: return k / std::sqrt(double(k - 1));
        case GateKind::TruthTable3:
        case GateKind::TruthTable4: {
            const int n = g.kind == GateKind::TruthTable3 ? 3 : 4;
            auto id = canonicalFunctionId(g.table, n);
            if (id == 0) throw std::invalid_argument("constant gate has zero adversary bound");
            auto v = certifiedAdv(id);
            if (!v) throw std::invalid_argument("no certified value for function #" + std::to_string(id));
            return *v;
        }
    }
    return 0.0;
}

namespace {

bool close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

void balanceWalk(const GateNode& g, double tol, BalanceReport& rep, std::vector<double>& out) {
    if (g.kind == GateKind::Leaf) { out.push_back(1.0); return; }
    std::vector<double> child;
    for (const auto& c : g.children) balanceWalk(c, tol, rep, child);
    bool ok = true;
    for (double v : child) ok = ok && close(v, child[0], tol);
    if (!ok) {
        rep.balanced = false;
        rep.violations.push_back({printNode(g), child});
    }
    out.push_back(gateAdv(g) * *std::max_element(child.begin(), child.end()));
}

}  // namespace

BalanceReport checkAdversaryBalanced(const Formula& f, double tol) {
    BalanceReport rep;
    std::vector<double> top;
    balanceWalk(f.root, tol, rep, top);
    return rep;
}

double nodeAdv(const GateNode& g, double tol) {
    if (g.kind == GateKind::Leaf) return 1.0;
    std::vector<double> c;
    for (const auto& ch : g.children) c.push_back(nodeAdv(ch, tol));
    bool equal = true;
    for (double v : c) equal = equal && close(v, c[0], tol);
    switch (g.kind) {
        case GateKind::Not: return c[0];
        case GateKind::And:
        case GateKind::Or: {
            double s = 0;
            for (double v : c) s += v * v;
            return std::sqrt(s);
        }
        case GateKind::Parity: {
            double s = 0;
            for (double v : c) s += v;
            return s;
        }
        case GateKind::Maj3:
            if (!equal) {
                // Two equal costs B and a third cost beta*B.
                for (int odd = 0; odd < 3; ++odd) {
                    int a = (odd + 1) % 3, b = (odd + 2) % 3;
                    if (close(c[a], c[b], tol)) {
                        double beta = c[odd] / c[a];
                        return c[a] * 0.5 * (std::sqrt(8 + beta * beta) + beta);
                    }
                }
            }
            break;
        default: break;
    }
    if (!equal) throw std::invalid_argument("formula is not adversary-balanced at " + printNode(g));
    return gateAdv(g) * c[0];
}

double formulaAdv(const Formula& f, double tol) {
    const BalanceReport rep = checkAdversaryBalanced(f, tol);
    if (!rep.balanced)
        throw std::invalid_argument("formula is not adversary-balanced at " + rep.violations.front().gate);
    return nodeAdv(f.root, tol);
}

std::vector<int> leafVariables(const GateNode& g) {
    if (g.kind == GateKind::Leaf) return {g.var};
    std::vector<int> out;
    for (const auto& c : g.children) {
        auto v = leafVariables(c);
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

}  // namespace spanwalk
