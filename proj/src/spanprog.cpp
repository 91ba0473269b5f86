#include "spanwalk/spanprog.hpp"

#include "json.hpp"
#include <sstream>
#include <stdexcept>

#include "spanwalk/linalg.hpp"

namespace spanwalk {

int SpanProgram::numLeaves() const {
    int n = 0;
    for (const auto& s : X) n += int(s.size());
    return n;
}

bool SpanProgram::isNormalized(double tol) const {
    if (target.size() != A.rows() || target.size() == 0) return false;
    if (std::abs(target(0) - cd(1.0)) > tol) return false;
    for (Eigen::Index r = 1; r < target.size(); ++r)
        if (std::abs(target(r)) > tol) return false;
    return true;
}

SpanProgram makeProgram(const MatrixXcd& A, std::vector<LiteralSet> X, int numInputs) {
    if (Eigen::Index(X.size()) != A.cols())
        throw std::invalid_argument("literal sets must match the number of columns");
    SpanProgram p;
    p.A = A;
    p.X = std::move(X);
    p.numInputs = numInputs;
    p.target = VectorXcd::Zero(A.rows());
    p.target(0) = 1.0;
    for (const auto& s : p.X)
        for (const auto& l : s)
            if (l.var < 0 || l.var >= numInputs)
                throw std::invalid_argument("literal variable out of range");
    return p;
}

Literal parseLiteral(const std::string& s) {
    std::size_t k = 0;
    bool neg = false;
    if (k < s.size() && (s[k] == '~' || s[k] == '!')) { neg = true; ++k; }
    if (k >= s.size() || (s[k] != 'x' && s[k] != 'X'))
        throw std::invalid_argument("bad literal: " + s);
    int v = std::stoi(s.substr(k + 1));
    if (v < 1) throw std::invalid_argument("variables are numbered from 1: " + s);
    return Literal{v - 1, neg};
}

LiteralSet literals(std::initializer_list<const char*> names) {
    LiteralSet out;
    for (const char* n : names) out.push_back(parseLiteral(n));
    return out;
}

SpanProgram normalizeTarget(const SpanProgram& p) {
    const double nt = p.target.norm();
    if (nt == 0.0) throw std::invalid_argument("zero target vector");
    const Eigen::Index m = p.target.size();
    SpanProgram q = p;

    // Pure coordinate targets only need a row swap.
    Eigen::Index nz = -1, count = 0;
    for (Eigen::Index r = 0; r < m; ++r)
        if (p.target(r) != cd(0.0)) { nz = r; ++count; }
    if (count == 1) {
        q.A.row(0).swap(q.A.row(nz));
        q.A.row(0) /= p.target(nz);
    } else {
        VectorXcd u = p.target / nt;
        cd phase = std::abs(u(0)) > 0 ? u(0) / std::abs(u(0)) : cd(1.0);
        VectorXcd v = u;
        v(0) -= phase;
        double vv = v.squaredNorm();
        MatrixXcd H = MatrixXcd::Identity(m, m);
        if (vv > 0) H -= (2.0 / vv) * v * v.adjoint();
        q.A = H * p.A;
        q.A.row(0) *= std::conj(phase) / nt;
    }
    q.target = VectorXcd::Zero(m);
    q.target(0) = 1.0;
    return q;
}

std::vector<int> trueColumns(const SpanProgram& p, const Bits& x) {
    std::vector<int> cols;
    for (int j = 0; j < int(p.X.size()); ++j) {
        bool ok = true;
        for (const auto& l : p.X[j]) ok = ok && literalValue(l, x);
        if (ok) cols.push_back(j);
    }
    return cols;
}

bool evaluateSpanProgram(const SpanProgram& p, const Bits& x, double rankTol) {
    auto cols = trueColumns(p, x);
    if (cols.empty()) return false;
    MatrixXcd M(p.rows(), Eigen::Index(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) M.col(k) = p.A.col(cols[k]);
    MatrixXcd Mt(p.rows(), M.cols() + 1);
    Mt << M, p.target;
    // Use one absolute cutoff for both ranks so the comparison is consistent.
    const double scale = std::max(linalg::spectralNorm(Mt), 1.0);
    auto r = [&](const MatrixXcd& a) { return linalg::rank(a / scale, rankTol); };
    return r(M) == r(Mt);
}

std::uint64_t truthTable(const SpanProgram& p, int n) {
    if (n < 0) n = p.numInputs;
    if (n < p.numInputs) throw std::invalid_argument("table width below program arity");
    if (n > 6) throw std::invalid_argument("truth tables limited to 6 variables");
    const std::uint64_t N = std::uint64_t(1) << n;
    std::uint64_t tt = 0;
    for (std::uint64_t v = 0; v < N; ++v) {
        Bits x = bitsFromIndex(v, n);
        if (evaluateSpanProgram(p, x)) tt |= std::uint64_t(1) << (N - 1 - v);
    }
    return tt;
}

SpanProgram dualSpanProgram(const SpanProgram& p) {
    if (!p.isNormalized(1e-12)) throw std::invalid_argument("dual requires a normalized target");
    const Eigen::Index R = p.rows(), J = p.cols();
    const int L = p.numLeaves();
    MatrixXcd B = MatrixXcd::Zero(1 + J, R + L);
    B(0, 0) = 1.0;
    B.block(1, 0, J, R) = p.A.adjoint();
    std::vector<LiteralSet> X(R);
    int k = 0;
    for (Eigen::Index j = 0; j < J; ++j)
        for (const auto& l : p.X[j]) {
            B(1 + j, R + k) = 1.0;
            X.push_back({Literal{l.var, !l.neg}});
            ++k;
        }
    return makeProgram(B, std::move(X), p.numInputs);
}

SpanProgram composeSpanPrograms(const SpanProgram& outer, const std::vector<Inner>& inners,
                                int numInputs) {
    if (!outer.isNormalized(1e-12)) throw std::invalid_argument("outer program must be normalized");
    if (int(inners.size()) < outer.numInputs)
        throw std::invalid_argument("one inner is required per outer input");
    const Eigen::Index R = outer.rows(), J = outer.cols();

    struct Block { Eigen::Index col; SpanProgram prog; Eigen::Index colOffset; };
    std::vector<Block> blocks;
    std::vector<LiteralSet> keptX(J);
    Eigen::Index extraCols = 0, extraRows = 0;
    for (Eigen::Index j = 0; j < J; ++j) {
        for (const auto& l : outer.X[j]) {
            const Inner& in = inners.at(l.var);
            if (!in.program) {
                if (in.leafVar < 0 || in.leafVar >= numInputs)
                    throw std::invalid_argument("leaf variable out of range");
                keptX[j].push_back(Literal{in.leafVar, l.neg});
                continue;
            }
            SpanProgram q = l.neg ? dualSpanProgram(*in.program) : *in.program;
            if (!q.isNormalized(1e-12)) q = normalizeTarget(q);
            blocks.push_back({j, q, extraCols});
            extraCols += q.cols();
            extraRows += q.rows();
        }
    }

    MatrixXcd M = MatrixXcd::Zero(R + extraRows, J + extraCols);
    M.topLeftCorner(R, J) = outer.A;
    std::vector<LiteralSet> X = keptX;
    Eigen::Index r = R;
    for (const auto& b : blocks) {
        M(r, b.col) = 1.0;
        M.block(r, J + b.colOffset, b.prog.rows(), b.prog.cols()) = b.prog.A;
        r += b.prog.rows();
        for (const auto& s : b.prog.X) X.push_back(s);
    }
    return makeProgram(M, std::move(X), numInputs);
}

SpanProgram relabel(const SpanProgram& p, const std::vector<int>& perm,
                    const std::vector<bool>& flip, int numInputs) {
    SpanProgram q = p;
    q.numInputs = numInputs;
    for (auto& s : q.X)
        for (auto& l : s) {
            bool f = l.var < int(flip.size()) ? flip[l.var] : false;
            l = Literal{perm.at(l.var), l.neg != f};
        }
    return q;
}

SpanProgram expandGroupedInputs(const SpanProgram& p) {
    const Eigen::Index R = p.rows(), J = p.cols();
    Eigen::Index extraRows = 0, cols = 0;
    for (const auto& s : p.X) {
        cols += std::max<Eigen::Index>(1, Eigen::Index(s.size()));
        if (s.size() > 1) extraRows += Eigen::Index(s.size()) - 1;
    }
    MatrixXcd M = MatrixXcd::Zero(R + extraRows, cols);
    std::vector<LiteralSet> X;
    Eigen::Index c = 0, r = R;
    for (Eigen::Index j = 0; j < J; ++j) {
        const auto& s = p.X[j];
        M.block(0, c, R, 1) = p.A.col(j);
        X.push_back(s.empty() ? LiteralSet{} : LiteralSet{s[0]});
        const Eigen::Index first = c++;
        // Equality rows force every singleton coefficient to match the first.
        for (std::size_t k = 1; k < s.size(); ++k) {
            M(r, first) = 1.0;
            M(r, c) = -1.0;
            X.push_back(LiteralSet{s[k]});
            ++c;
            ++r;
        }
    }
    return makeProgram(M, std::move(X), p.numInputs);
}

namespace {
nlohmann::json cplx(cd z) { return nlohmann::json::array({z.real(), z.imag()}); }
cd cplxFrom(const nlohmann::json& j) {
    if (j.is_number()) return cd(j.get<double>(), 0.0);
    return cd(j.at(0).get<double>(), j.at(1).get<double>());
}
}  // namespace

nlohmann::json toJson(const SpanProgram& p) {
    nlohmann::json j;
    j["numInputs"] = p.numInputs;
    j["target"] = nlohmann::json::array();
    for (Eigen::Index r = 0; r < p.target.size(); ++r) j["target"].push_back(cplx(p.target(r)));
    j["columns"] = nlohmann::json::array();
    for (Eigen::Index c = 0; c < p.cols(); ++c) {
        nlohmann::json col;
        col["vector"] = nlohmann::json::array();
        for (Eigen::Index r = 0; r < p.rows(); ++r) col["vector"].push_back(cplx(p.A(r, c)));
        col["literals"] = nlohmann::json::array();
        for (const auto& l : p.X[c]) col["literals"].push_back({{"var", l.var + 1}, {"neg", l.neg}});
        j["columns"].push_back(col);
    }
    return j;
}

SpanProgram spanProgramFromJson(const nlohmann::json& j) {
    const auto& t = j.at("target");
    const auto& cols = j.at("columns");
    const Eigen::Index R = Eigen::Index(t.size()), J = Eigen::Index(cols.size());
    SpanProgram p;
    p.target = VectorXcd(R);
    for (Eigen::Index r = 0; r < R; ++r) p.target(r) = cplxFrom(t[r]);
    p.A = MatrixXcd::Zero(R, J);
    int maxVar = 0;
    for (Eigen::Index c = 0; c < J; ++c) {
        const auto& v = cols[c].at("vector");
        if (Eigen::Index(v.size()) != R) throw std::invalid_argument("column length mismatch");
        for (Eigen::Index r = 0; r < R; ++r) p.A(r, c) = cplxFrom(v[r]);
        LiteralSet s;
        for (const auto& l : cols[c].at("literals")) {
            int var = l.at("var").get<int>();
            if (var < 1) throw std::invalid_argument("variables are numbered from 1");
            s.push_back(Literal{var - 1, l.value("neg", false)});
            maxVar = std::max(maxVar, var);
        }
        p.X.push_back(s);
    }
    p.numInputs = j.value("numInputs", maxVar);
    return p;
}

std::string describe(const SpanProgram& p) {
    std::ostringstream os;
    os << "X_J = (";
    for (std::size_t j = 0; j < p.X.size(); ++j) {
        os << (j ? " {" : "{");
        for (std::size_t k = 0; k < p.X[j].size(); ++k)
            os << (k ? "," : "") << (p.X[j][k].neg ? "~" : "") << "x" << p.X[j][k].var + 1;
        os << "}";
    }
    os << ")\n";
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
        os << "  " << p.target(r).real() << " |";
        for (Eigen::Index c = 0; c < p.cols(); ++c) {
            cd z = p.A(r, c);
            os << " " << z.real();
            if (z.imag() != 0) os << (z.imag() > 0 ? "+" : "") << z.imag() << "i";
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace spanwalk
