#include "spanwalk/gate_catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "spanwalk/linalg.hpp"

namespace spanwalk {

namespace {
const double kSqrt2 = std::sqrt(2.0);
const double kSqrt3 = std::sqrt(3.0);
const cd kI(0.0, 1.0);
}  // namespace

// ---- truth tables ----------------------------------------------------------

std::uint32_t embedThreeBit(std::uint32_t t8) {
    std::uint32_t m = 0;
    for (int v = 0; v < 8; ++v)
        if ((t8 >> (7 - v)) & 1u) m |= (1u << (15 - 2 * v)) | (1u << (14 - 2 * v));
    return m;
}

std::uint32_t applyTransform(std::uint32_t table, int n, const FunctionTransform& t) {
    const std::uint32_t N = 1u << n;
    std::uint32_t out = 0;
    for (std::uint32_t v = 0; v < N; ++v) {
        std::uint32_t z = 0;
        for (int k = 0; k < n; ++k) {
            int xb = (v >> (n - 1 - t.perm[k])) & 1;
            int b = xb ^ (t.flip[k] ? 1 : 0);
            z |= std::uint32_t(b) << (n - 1 - k);
        }
        bool bit = tableBit(table, n, z) != t.negateOutput;
        if (bit) out |= 1u << (N - 1 - v);
    }
    return out;
}

std::vector<FunctionTransform> allTransforms(int n) {
    std::vector<FunctionTransform> out;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        for (std::uint32_t y = 0; y < (1u << n); ++y)
            for (int c = 0; c < 2; ++c) {
                FunctionTransform t;
                t.perm = perm;
                t.flip.resize(n);
                for (int k = 0; k < n; ++k) t.flip[k] = (y >> k) & 1u;
                t.negateOutput = c == 1;
                out.push_back(t);
            }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

std::uint32_t canonicalFunctionId(std::uint32_t table, int arity) {
    static const std::vector<FunctionTransform> all4 = allTransforms(4);
    std::uint32_t t16;
    bool fixLast = false;
    if (arity == 3) {
        if (table > 0xFFu) throw std::invalid_argument("3-bit table out of range");
        t16 = embedThreeBit(table);
        fixLast = true;
    } else if (arity == 4) {
        if (table > 0xFFFFu) throw std::invalid_argument("4-bit table out of range");
        t16 = table;
    } else {
        throw std::invalid_argument("canonical numbering is defined for 3 and 4 bits");
    }
    std::uint32_t best = 0xFFFFFFFFu;
    for (const auto& t : all4) {
        if (fixLast && (t.perm[3] != 3 || t.flip[3])) continue;
        best = std::min(best, applyTransform(t16, 4, t));
    }
    return best;
}

std::optional<FunctionTransform> findTransform(std::uint32_t from, std::uint32_t to, int n) {
    for (const auto& t : allTransforms(n))
        if (applyTransform(from, n, t) == to) return t;
    return std::nullopt;
}

// ---- certificates ----------------------------------------------------------

AdversaryCertificate makeCertificate(int n, const std::vector<std::string>& rows,
                                     const std::vector<std::string>& cols,
                                     const std::vector<std::vector<double>>& block) {
    const int N = 1 << n;
    AdversaryCertificate c{n, MatrixXd::Zero(N, N)};
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b) {
            auto x = indexFromBits(bitsFromString(rows[a]));
            auto y = indexFromBits(bitsFromString(cols[b]));
            c.gamma(x, y) = block.at(a).at(b);
            c.gamma(y, x) = block.at(a).at(b);
        }
    return c;
}

AdversaryCertificate sensitivityCertificate(std::uint32_t table, int n) {
    const int N = 1 << n;
    AdversaryCertificate c{n, MatrixXd::Zero(N, N)};
    for (int x = 0; x < N; ++x)
        for (int k = 0; k < n; ++k) {
            int y = x ^ (1 << k);
            if (tableBit(table, n, x) != tableBit(table, n, y)) c.gamma(x, y) = 1.0;
        }
    return c;
}

AdversaryCertificate transformCertificate(const AdversaryCertificate& c, const FunctionTransform& t) {
    const int n = c.n, N = 1 << n;
    auto mapIndex = [&](int v) {
        int z = 0;
        for (int k = 0; k < n; ++k) {
            int b = ((v >> (n - 1 - t.perm[k])) & 1) ^ (t.flip[k] ? 1 : 0);
            z |= b << (n - 1 - k);
        }
        return z;
    };
    AdversaryCertificate out{n, MatrixXd::Zero(N, N)};
    for (int x = 0; x < N; ++x)
        for (int y = 0; y < N; ++y) out.gamma(x, y) = c.gamma(mapIndex(x), mapIndex(y));
    return out;
}

double certificateRatio(const AdversaryCertificate& c, std::uint32_t table, const std::vector<double>& costs) {
    const int n = c.n, N = 1 << n;
    if (c.gamma.rows() != N || c.gamma.cols() != N) throw std::invalid_argument("certificate has the wrong size");
    if ((c.gamma - c.gamma.transpose()).cwiseAbs().maxCoeff() > 0)
        throw std::invalid_argument("certificate is not symmetric");
    if (c.gamma.cwiseAbs().maxCoeff() == 0) throw std::invalid_argument("certificate is zero");
    for (int x = 0; x < N; ++x)
        for (int y = 0; y < N; ++y) {
            if (c.gamma(x, y) < 0) throw std::invalid_argument("certificate has a negative entry");
            if (c.gamma(x, y) != 0 && tableBit(table, n, x) == tableBit(table, n, y))
                throw std::invalid_argument("certificate pairs inputs with equal function values");
        }
    std::vector<double> a = costs.empty() ? std::vector<double>(n, 1.0) : costs;
    const double num = linalg::spectralNorm(c.gamma.cast<cd>());
    double den = 0.0;
    for (int i = 0; i < n; ++i) {
        MatrixXd g = c.gamma;
        for (int x = 0; x < N; ++x)
            for (int y = 0; y < N; ++y)
                if ((((x ^ y) >> (n - 1 - i)) & 1) == 0) g(x, y) = 0.0;
        den = std::max(den, linalg::spectralNorm(g.cast<cd>()) / a.at(i));
    }
    return num / den;
}

// ---- program trees ---------------------------------------------------------

ProgramTree directTree(SpanProgram p) {
    ProgramTree t;
    t.slots.resize(p.numInputs);
    for (int k = 0; k < p.numInputs; ++k) t.slots[k].leafVar = k;
    t.outer = std::move(p);
    return t;
}

SpanProgram flatten(const ProgramTree& t, int numInputs) {
    const int k = int(t.slots.size());
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<bool> flip(k);
    for (int s = 0; s < k; ++s) flip[s] = t.slots[s].negated;
    SpanProgram outer = relabel(t.outer, perm, flip, k);
    std::vector<Inner> inners;
    for (const auto& s : t.slots) {
        if (s.sub) inners.push_back(Inner::of(flatten(*s.sub, numInputs)));
        else inners.push_back(Inner::leaf(s.leafVar));
    }
    SpanProgram p = composeSpanPrograms(outer, inners, numInputs);
    return t.negateOutput ? dualSpanProgram(p) : p;
}

double treeWitnessSize(const ProgramTree& t, const std::vector<double>& leafCosts) {
    std::vector<double> c;
    for (const auto& s : t.slots) {
        if (s.sub) c.push_back(treeWitnessSize(*s.sub, leafCosts));
        else c.push_back(leafCosts.empty() ? 1.0 : leafCosts.at(s.leafVar));
    }
    return costWeightedWitnessSize(t.outer, c);
}

namespace {

ProgramTree mapLeaves(const ProgramTree& t, const std::function<Slot(const Slot&)>& f) {
    ProgramTree out = t;
    for (auto& s : out.slots) {
        if (s.sub) s.sub = std::make_shared<const ProgramTree>(mapLeaves(*s.sub, f));
        else s = f(s);
    }
    return out;
}

std::shared_ptr<const ProgramTree> share(ProgramTree t) {
    return std::make_shared<const ProgramTree>(std::move(t));
}

Slot leafSlot(int v, bool neg = false) { return Slot{v, neg, nullptr}; }
Slot subSlot(ProgramTree t, bool neg = false) { return Slot{-1, neg, share(std::move(t))}; }

// Build a program from rows and literal-set names.
SpanProgram prog(const std::vector<std::vector<cd>>& rows, const std::vector<LiteralSet>& X, int n) {
    const Eigen::Index R = Eigen::Index(rows.size()), J = Eigen::Index(X.size());
    MatrixXcd A(R, J);
    for (Eigen::Index r = 0; r < R; ++r) {
        if (Eigen::Index(rows[r].size()) != J) throw std::logic_error("ragged program rows");
        for (Eigen::Index c = 0; c < J; ++c) A(r, c) = rows[r][c];
    }
    return makeProgram(A, X, n);
}

using L = std::initializer_list<const char*>;
LiteralSet ls(L names) { return literals(names); }

std::uint32_t tableOf(int n, const std::function<bool(const Bits&)>& f) {
    std::uint32_t t = 0, N = 1u << n;
    for (std::uint32_t v = 0; v < N; ++v)
        if (f(bitsFromIndex(v, n))) t |= 1u << (N - 1 - v);
    return t;
}

// ---- parameterized three-bit programs (cost beta on x3) ----

SpanProgram iteProgram() {
    return prog({{0, 1, 1, 0}, {1, 1, 0, 0}, {0, 0, 1, 1}},
                {ls({"x1"}), ls({"x3"}), ls({"~x3"}), ls({"x2"})}, 3);
}

double equalWeight(double b) {
    if (b <= std::sqrt(0.4)) return std::sqrt((b + std::sqrt(2 - b * b)) / (2 * (1 - b * b)));
    if (b <= 2) return 1 / std::sqrt(b);
    return 1 / kSqrt2;
}

SpanProgram equal3Program(double b) {
    const double w = equalWeight(b);
    return prog({{0, 1, 1, 0}, {w, 1, 0, 0}, {0, 0, 1, w}},
                {ls({"x3"}), ls({"x1", "x2"}), ls({"~x1", "~x2"}), ls({"~x3"})}, 3);
}

SpanProgram g963Program(double b) {
    const double s = std::sqrt(9 + 2 * b * b + b * b * b * b);
    const double w1 = 0.5 * std::sqrt(1 + b * b + s);
    const double w2 = std::sqrt(-3 + b * b + s) / (std::sqrt(2 * b));
    return prog({{0, w1, 1}, {1, w2, 0}}, {ls({"x3"}), ls({"x1", "x2"}), ls({"~x1", "~x2"})}, 3);
}

SpanProgram exact2Program(double b) {
    const double r = std::sqrt(8 * b * b + 1);
    const double w1 = std::sqrt((r - 1) / (2 * b));
    const double w2 = std::sqrt(1 / (r + 3));
    return prog({{1, 0, w2, w2, w1 / kSqrt2}, {0, 0, kI, -kI, w1}, {w1, 1, 0, 0, 0}},
                {ls({"~x1", "~x2"}), ls({"~x3"}), ls({"x1"}), ls({"x2"}), ls({"x3"})}, 3);
}

double advEqual3(double b) {
    if (b <= std::sqrt(0.4)) return b + std::sqrt(2 - b * b);
    if (b <= 2) return std::sqrt(1.5 * (2 + b * b));
    return b + 1;
}

AdversaryCertificate certEqual3(double b) {
    if (b >= 2) return makeCertificate(3, {"001", "110"}, {"000", "111"}, {{b, 1}, {1, b}});
    if (b <= std::sqrt(0.4)) {
        const double s = std::sqrt(2 - b * b);
        return makeCertificate(3, {"100", "010", "011", "101"}, {"000", "111"},
                               {{s, b}, {s, b}, {b, s}, {b, s}});
    }
    const double a = std::sqrt((4 - b * b) / (5 * b * b - 2));
    return makeCertificate(3, {"100", "010", "001", "011", "101", "110"}, {"000", "111"},
                           {{2 * a, a}, {2 * a, a}, {2, 1}, {a, 2 * a}, {a, 2 * a}, {1, 2}});
}

// ---- four-bit printed programs ----

SpanProgram p393() {
    const double r = std::sqrt(1.5);
    return prog({{1, 0, 1, 0}, {1, r, 0, 0}, {0, 0, 1, r}},
                {ls({"x1", "x2"}), ls({"x3"}), ls({"~x1", "~x2"}), ls({"x4"})}, 4);
}

SpanProgram p989() {
    const double q = std::pow(2.0, 0.25);
    return prog({{0, 1, 1, 1, q, 1}, {0, 1, 1 / q, 1 / q, 1, 1}, {q, 1, 0, 0, 0, 0}},
                {ls({"~x1", "x2"}), ls({}), ls({"~x2"}), ls({"~x3"}), ls({"x4"}), ls({"~x4"})}, 4);
}

SpanProgram p1968() {
    const double h = kSqrt3 / 2;
    return prog({{1, 0, 0, 1, 0, 0}, {1, h, h, 0, 0, 0}, {0, 0, 0, 1, h, h}},
                {ls({"x1", "x2"}), ls({"x3"}), ls({"x4"}), ls({"~x1", "~x2"}), ls({"~x3"}), ls({"x4"})}, 4);
}

SpanProgram p1910() {
    return prog({{kSqrt2, 1, 1}}, {ls({"x1", "x2", "x3", "x4"}), ls({"~x1", "~x2"}), ls({"~x3", "~x4"})}, 4);
}

SpanProgram p5790() {
    return prog({{1, 0, 0, 1, 0, 0}, {1, 1, 1, 0, 0, 0}, {0, 0, 0, 1, 1, 1}},
                {ls({"x1"}), ls({"x2", "~x3"}), ls({"~x2", "x3"}), ls({"~x1"}), ls({"x2", "x4"}),
                 ls({"~x2", "~x3"})},
                4);
}

SpanProgram p385() {
    const double s73 = std::sqrt(73.0);
    const double d = std::pow(2.0, 0.75) * kSqrt3;
    const double c1 = std::pow(61 + 7 * s73, 0.25) / d;
    const double c2 = std::pow(49 + 5 * s73, 0.25) / d;
    return prog({{1, 0, c1}, {0, c2, 1}}, {ls({"x2", "x3", "x4"}), ls({"x1"}), ls({"~x2", "~x3", "~x4"})}, 4);
}

SpanProgram pThreshold(bool negated) {
    std::vector<LiteralSet> X;
    for (int v = 0; v < 4; ++v)
        for (int r = 0; r < 2; ++r) X.push_back({Literal{v, negated}});
    return prog({{1, 1, 1, 1, 1, 1, 1, 1},
                 {1, 1, 1, -1, kI, -kI, kI, kI},
                 {kI, -kI, kI, kI, 1, 1, 1, -1}},
                X, 4);
}

SpanProgram p1639() {
    return prog({{1, std::sqrt(5.0) / 2, 0.5, 0.5}, {0, 1, kI, -kI}},
                {ls({"x1", "x2"}), ls({"~x1", "~x2"}), ls({"x3"}), ls({"x4"})}, 4);
}

SpanProgram p6014() {
    const double e = std::pow(2.0, -0.25);
    std::vector<LiteralSet> X;
    for (int v = 0; v < 4; ++v)
        for (int r = 0; r < 2; ++r) X.push_back({Literal{v, false}});
    for (int v = 0; v < 4; ++v) X.push_back({Literal{v, true}});
    const double s = kSqrt3;
    return prog({{0, 0, 0, 0, 0, 0, 0, 0, e, e, e, e},
                 {1, 1, 1, 1, 1, 1, 1, 1, s, s, s, s},
                 {1, 1, 1, -1, kI, -kI, kI, kI, 0, 0, 0, 0},
                 {kI, -kI, kI, kI, 1, 1, 1, -1, 0, 0, 0, 0}},
                X, 4);
}

// A sub-program over leaf variables: slots are the given literals.
ProgramTree overLeaves(SpanProgram p, std::vector<Slot> leaves) {
    ProgramTree t;
    t.outer = std::move(p);
    t.slots = std::move(leaves);
    return t;
}

ProgramTree tree317() {
    ProgramTree and3 = overLeaves(andProgram(3), {leafSlot(0), leafSlot(1), leafSlot(2)});
    ProgramTree maj = overLeaves(majProgram(), {leafSlot(1, true), leafSlot(2, true), leafSlot(3)});
    return overLeaves(orProgram({kSqrt3, 2.0}), {subSlot(and3), subSlot(maj)});
}

ProgramTree tree278() {
    ProgramTree th = directTree(thresholdTwoOfFourProgram());
    ProgramTree or4 = directTree(orProgram({1, 1, 1, 1}));
    return overLeaves(andPairProgram(std::sqrt(6.0), 2.0), {subSlot(th, true), subSlot(or4)});
}

ProgramTree tree5736() {
    ProgramTree th = directTree(thresholdTwoOfFourProgram());
    ProgramTree thn = directTree(thresholdTwoOfFourProgram(true));
    return overLeaves(andPairProgram(std::sqrt(6.0), std::sqrt(6.0)), {subSlot(th), subSlot(thn)});
}

ProgramTree tree989() {
    ProgramTree a = overLeaves(andProgram(2), {leafSlot(1), leafSlot(2)});
    ProgramTree b = overLeaves(andProgram(2), {leafSlot(0, true), leafSlot(1)});
    SpanProgram top = balanceProgram(iteProgram(), {kSqrt2, kSqrt2, 1.0});
    // Slot order of the if-then-else program: x1 (else), x2 (then), x3 (condition).
    return overLeaves(top, {subSlot(a, true), subSlot(b), leafSlot(3)});
}

ProgramTree tree1020() {
    ProgramTree a = overLeaves(andProgram(2), {leafSlot(1), leafSlot(2)});
    return overLeaves(parityProgram(), {leafSlot(0), subSlot(a)});
}

ProgramTree tree15555() {
    ProgramTree p = overLeaves(parityProgram(), {leafSlot(1), leafSlot(2)});
    return overLeaves(parityProgram(), {leafSlot(0), subSlot(p)});
}

std::function<ProgramTree(double)> fixedTree(std::function<ProgramTree()> f) {
    return [f](double) { return f(); };
}

std::function<ProgramTree(double)> balancedDirect(std::function<SpanProgram()> f, int n) {
    return [f, n](double) {
        return directTree(balanceProgram(f(), std::vector<double>(n, 1.0)));
    };
}

std::function<std::optional<SpanProgram>(double)> noPrinted() {
    return [](double) { return std::optional<SpanProgram>(); };
}

std::function<std::optional<AdversaryCertificate>(double)> fixedCert(AdversaryCertificate c) {
    return [c](double) { return std::optional<AdversaryCertificate>(c); };
}

std::vector<CatalogEntry> buildThreeBit() {
    std::vector<CatalogEntry> v;
    auto add = [&](std::uint32_t id, std::string name, double adv, std::function<ProgramTree(double)> prog,
                   std::function<bool(const Bits&)> f, std::string src,
                   std::optional<AdversaryCertificate> cert = std::nullopt, std::string certSrc = "") {
        CatalogEntry e;
        e.id = id;
        e.name = std::move(name);
        e.arity = 3;
        e.adv = [adv](double) { return adv; };
        e.program = std::move(prog);
        e.printed = noPrinted();
        e.certificateTable = tableOf(3, f);
        if (!cert && id != 0) {
            cert = sensitivityCertificate(e.certificateTable, 3);
            certSrc = "sensitivity pairs, unit weights";
        }
        e.certificate = [cert](double) { return cert; };
        e.programSource = std::move(src);
        e.certificateSource = std::move(certSrc);
        v.push_back(std::move(e));
    };
    auto b = [](const Bits& x, int k) { return x[k] != 0; };

    CatalogEntry zero;
    zero.id = 0;
    zero.name = "0";
    zero.arity = 3;
    zero.adv = [](double) { return 0.0; };
    zero.printed = noPrinted();
    zero.certificate = [](double) { return std::optional<AdversaryCertificate>(); };
    zero.certificateTable = 0;
    zero.programSource = "constant";
    v.push_back(zero);

    add(255, "x1", 1.0, fixedTree([] { return directTree(prog({{1}}, {ls({"x1"})}, 1)); }),
        [b](const Bits& x) { return b(x, 0); }, "single literal");
    add(15, "x1 & x2", kSqrt2, fixedTree([] { return directTree(andProgram(2)); }),
        [b](const Bits& x) { return b(x, 0) && b(x, 1); }, "AND, one grouped column");
    add(4080, "x1 ^ x2", 2.0, fixedTree([] { return directTree(parityProgram()); }),
        [b](const Bits& x) { return b(x, 0) != b(x, 1); }, "PARITY, two grouped columns");
    add(3, "x1 & x2 & x3", kSqrt3, fixedTree([] { return directTree(andProgram(3)); }),
        [b](const Bits& x) { return b(x, 0) && b(x, 1) && b(x, 2); }, "AND, one grouped column");
    add(63, "x1 | (x2 & x3)", kSqrt3, fixedTree([] {
            const double c = std::pow(3.0, -0.25);
            return directTree(prog({{c, kSqrt2 * c}}, {ls({"x1"}), ls({"x2", "x3"})}, 3));
        }),
        [b](const Bits& x) { return b(x, 0) || (b(x, 1) && b(x, 2)); }, "OR of a literal and a grouped AND");
    add(975, "(x3 & x2) | (~x3 & x1)", 2.0, balancedDirect(iteProgram, 3),
        [b](const Bits& x) { return b(x, 2) ? b(x, 1) : b(x, 0); }, "if-then-else program",
        makeCertificate(3, {"100", "011"}, {"010", "101"}, {{1, 1}, {1, 1}}), "listed, beta = 1");
    add(831, "MAJ(x1,x2,x3)", 2.0, fixedTree([] { return directTree(majProgram()); }),
        [b](const Bits& x) { return int(b(x, 0)) + int(b(x, 1)) + int(b(x, 2)) >= 2; }, "MAJ program",
        makeCertificate(3, {"100", "010", "001"}, {"011", "101", "110"}, {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}),
        "listed, beta = 1");
    add(960, "EQUAL3(x1,x2,x3)", 3 / kSqrt2, fixedTree([] { return directTree(equalProgram(3)); }),
        [b](const Bits& x) { return b(x, 0) == b(x, 1) && b(x, 1) == b(x, 2); }, "EQUAL_k program, k = 3",
        certEqual3(1.0), "listed, beta = 1");
    add(963, "(x1 & x2 & x3) | (~x1 & ~x2)", std::sqrt(3 + kSqrt3),
        fixedTree([] { return directTree(gProgram()); }),
        [b](const Bits& x) { return (b(x, 0) && b(x, 1) && b(x, 2)) || (!b(x, 0) && !b(x, 1)); },
        "g program",
        makeCertificate(3, {"011", "101", "110"}, {"000", "001", "111"}, {{0, 1, 1}, {0, 1, 1}, {1, 0, 1}}),
        "listed, beta = 1");
    add(60, "x1 | (x2 ^ x3)", std::sqrt(5.0), fixedTree([] {
            const double c = std::pow(5.0, -0.25);
            return directTree(prog({{c, kSqrt2 * c, kSqrt2 * c}},
                                   {ls({"x1"}), ls({"x2", "~x3"}), ls({"~x2", "x3"})}, 3));
        }),
        [b](const Bits& x) { return b(x, 0) || (b(x, 1) != b(x, 2)); }, "OR of a literal and a grouped PARITY");
    add(1020, "x1 ^ (x2 & x3)", 1 + kSqrt2, fixedTree(tree1020),
        [b](const Bits& x) { return b(x, 0) != (b(x, 1) && b(x, 2)); }, "PARITY over x1 and AND(x2,x3)");
    add(828, "EXACT2of3(x1,x2,x3)", std::sqrt(7.0), balancedDirect([] { return exact2Program(1.0); }, 3),
        [b](const Bits& x) { return int(b(x, 0)) + int(b(x, 1)) + int(b(x, 2)) == 2; },
        "EXACT 2 of 3 program, beta = 1",
        makeCertificate(3, {"001", "010", "100", "111"}, {"110", "101", "011"},
                        {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}, {1, 1, 1}}),
        "listed, beta = 1");
    add(15555, "x1 ^ x2 ^ x3", 3.0, fixedTree(tree15555),
        [b](const Bits& x) { return (int(b(x, 0)) + int(b(x, 1)) + int(b(x, 2))) % 2 == 1; },
        "PARITY over x1 and PARITY(x2,x3)");
    return v;
}

std::vector<CatalogEntry> buildFourBit() {
    std::vector<CatalogEntry> v;
    auto b = [](const Bits& x, int k) { return x[k] != 0; };

    // Parameterized three-bit entries, cost beta on x3.
    auto param = [&](std::uint32_t id, std::string name, std::function<double(double)> adv,
                     std::function<SpanProgram(double)> printed, std::function<bool(const Bits&)> f,
                     std::function<AdversaryCertificate(double)> cert) {
        CatalogEntry e;
        e.id = id;
        e.name = std::move(name);
        e.arity = 3;
        e.parameterized = true;
        e.adv = std::move(adv);
        e.printed = [printed](double beta) { return std::optional<SpanProgram>(printed(beta)); };
        e.program = [printed](double beta) {
            return directTree(balanceProgram(printed(beta), {1.0, 1.0, beta}));
        };
        e.certificate = [cert](double beta) { return std::optional<AdversaryCertificate>(cert(beta)); };
        e.certificateTable = tableOf(3, f);
        e.programSource = "listed, output row rescaled to balance";
        e.certificateSource = "listed";
        v.push_back(std::move(e));
    };

    param(831, "MAJ, costs (1,1,beta)",
          [](double be) { return 0.5 * (std::sqrt(8 + be * be) + be); }, majUnbalancedProgram,
          [b](const Bits& x) { return int(b(x, 0)) + int(b(x, 1)) + int(b(x, 2)) >= 2; },
          [](double be) {
              return makeCertificate(3, {"100", "010", "001"}, {"011", "101", "110"},
                                     {{0, be, 1}, {be, 0, 1}, {1, 1, 0}});
          });
    param(975, "(x3 & x2) | (~x3 & x1), costs (1,1,beta)", [](double be) { return be + 1; },
          [](double) { return iteProgram(); }, [b](const Bits& x) { return b(x, 2) ? b(x, 1) : b(x, 0); },
          [](double be) { return makeCertificate(3, {"100", "011"}, {"010", "101"}, {{1, be}, {be, 1}}); });
    param(960, "EQUAL3, costs (1,1,beta)", advEqual3, equal3Program,
          [b](const Bits& x) { return b(x, 0) == b(x, 1) && b(x, 1) == b(x, 2); }, certEqual3);
    param(963, "(x1 & x2 & x3) | (~x1 & ~x2), costs (1,1,beta)",
          [](double be) {
              return std::sqrt(5 + be * be + std::sqrt(9 + 2 * be * be + be * be * be * be)) / kSqrt2;
          },
          g963Program,
          [b](const Bits& x) { return (b(x, 0) && b(x, 1) && b(x, 2)) || (!b(x, 0) && !b(x, 1)); },
          [](double be) {
              return makeCertificate(3, {"011", "101", "110"}, {"000", "001", "111"},
                                     {{0, 1, 1}, {0, 1, 1}, {1, 0, be}});
          });
    param(828, "EXACT2of3, costs (1,1,beta)",
          [](double be) { return std::sqrt(3 + be * be + std::sqrt(1 + 8 * be * be)); }, exact2Program,
          [b](const Bits& x) { return int(b(x, 0)) + int(b(x, 1)) + int(b(x, 2)) == 2; },
          [](double be) {
              return makeCertificate(3, {"001", "010", "100", "111"}, {"110", "101", "011"},
                                     {{0, 1, 1}, {1, 0, be}, {1, be, 0}, {be, 1, 1}});
          });

    auto listed = [&](std::uint32_t id, std::string name, double adv, std::function<SpanProgram()> printed,
                      std::uint32_t certTable, AdversaryCertificate cert) {
        CatalogEntry e;
        e.id = id;
        e.name = std::move(name);
        e.arity = 4;
        e.adv = [adv](double) { return adv; };
        e.printed = [printed](double) { return std::optional<SpanProgram>(printed()); };
        e.program = balancedDirect(printed, 4);
        e.certificate = fixedCert(cert);
        e.certificateTable = certTable;
        e.programSource = "listed, output row rescaled to balance";
        e.certificateSource = "listed";
        v.push_back(std::move(e));
    };
    auto composed = [&](std::uint32_t id, std::string name, double adv, std::function<ProgramTree()> tree,
                        std::string src, AdversaryCertificate cert, std::function<SpanProgram()> printed = {}) {
        CatalogEntry e;
        e.id = id;
        e.name = std::move(name);
        e.arity = 4;
        e.adv = [adv](double) { return adv; };
        if (printed) e.printed = [printed](double) { return std::optional<SpanProgram>(printed()); };
        else e.printed = noPrinted();
        e.program = fixedTree(std::move(tree));
        e.certificate = fixedCert(cert);
        e.certificateTable = id;
        e.programSource = std::move(src);
        e.certificateSource = "listed";
        v.push_back(std::move(e));
    };

    const double s7 = std::sqrt(7.0);
    listed(393, "#393", 4 / kSqrt3, p393, 20483,
           makeCertificate(4, {"0001", "1110", "0011", "1111"}, {"0010", "1101", "0111", "1011"},
                           {{1, 3, 0, 0}, {3, 1, 0, 0}, {2 * kSqrt2, 0, 3, 3}, {0, 2 * kSqrt2, 3, 3}}));
    {
        composed(989, "#989", 1 + kSqrt2, tree989,
                 "if-then-else over NOT AND(x2,x3), AND(~x1,x2), x4",
                 makeCertificate(4, {"0011", "0110", "1101"}, {"0010", "0111", "1100"},
                                 {{1, 1, 0}, {1, 1, 1}, {0, 1, 1}}),
                 p989);
        v.back().certificateTable = 44456;
    }
    listed(1968, "#1968", std::sqrt(20.0 / 3.0), p1968, 53255,
           makeCertificate(4, {"0010", "1100", "1001", "0101", "0111", "1011"}, {"0000", "1110", "0011", "1101"},
                           {{3 * s7, 2 * s7, 3 * s7, 0},
                            {2 * s7, 3 * s7, 0, 3 * s7},
                            {5, 0, 2, 7},
                            {5, 0, 2, 7},
                            {0, 5, 7, 2},
                            {0, 5, 7, 2}}));
    listed(1910, "#1910", s7, p1910, 63625,
           makeCertificate(4, {"0111", "1011", "1101", "1110"},
                           {"0001", "0010", "0100", "1000", "0011", "1100", "1111"},
                           {{0, 0, 1, 0, 1, 0, 1}, {0, 0, 0, 1, 1, 0, 1}, {1, 0, 0, 0, 0, 1, 1}, {0, 1, 0, 0, 0, 1, 1}}));
    composed(317, "#317", s7, tree317, "OR over AND(x1,x2,x3) and MAJ(~x2,~x3,x4)",
             makeCertificate(4, {"1000", "0011", "0101", "1110"}, {"0111", "1010", "1100"},
                             {{0, 1, 1}, {1, 1, 0}, {1, 0, 1}, {1, 1, 1}}));
    listed(5790, "#5790", 3.0, p5790, 50492,
           makeCertificate(4, {"0000", "0111", "1011", "1100"}, {"0011", "0100", "1000", "1111"},
                           {{1, 1, 1, 0}, {1, 1, 0, 1}, {1, 0, 1, 1}, {0, 1, 1, 1}}));
    listed(385, "#385", 0.5 * std::sqrt(13 + std::sqrt(73.0)), p385, 385,
           makeCertificate(4, {"0000", "1001", "1010", "1100"}, {"0111", "1000", "1111"},
                           {{kSqrt2, kSqrt2, 0}, {0, kSqrt2, 1}, {0, kSqrt2, 1}, {0, kSqrt2, 1}}));
    listed(279, "#279", std::sqrt(6.0), [] { return pThreshold(false); }, 279,
           makeCertificate(4, {"0011", "0101", "0110", "1100", "1010", "1001"}, {"0111", "1011", "1101", "1110"},
                           {{1, 1, 0, 0}, {1, 0, 1, 0}, {1, 0, 0, 1}, {0, 0, 1, 1}, {0, 1, 0, 1}, {0, 1, 1, 0}}));
    listed(1639, "#1639", s7, p1639, 28959,
           makeCertificate(4, {"0001", "0010", "0111", "1011", "1100", "1101", "1110"},
                           {"0000", "0101", "1001", "0110", "1010"},
                           {{1, 1, 1, 0, 0},
                            {1, 0, 0, 1, 1},
                            {0, 1, 0, 1, 0},
                            {0, 0, 1, 0, 1},
                            {1, 0, 0, 0, 0},
                            {0, 1, 1, 0, 0},
                            {0, 0, 0, 1, 1}}));
    {
        const double r3 = 1 / kSqrt3;
        listed(6014, "#6014", 2 * kSqrt2, p6014, 6014,
               makeCertificate(4, {"0011", "0101", "0110", "1100", "1010", "1001"},
                               {"1000", "0100", "0010", "0001", "1111"},
                               {{0, 0, 1, 1, r3},
                                {0, 1, 0, 1, r3},
                                {0, 1, 1, 0, r3},
                                {1, 1, 0, 0, r3},
                                {1, 0, 1, 0, r3},
                                {1, 0, 0, 1, r3}}));
    }
    composed(278, "#278", std::sqrt(10.0), tree278, "AND over NOT threshold-2-of-4 and OR(x1..x4)",
             makeCertificate(4, {"0011", "0101", "0110", "1100", "1010", "1001", "1111"},
                             {"0111", "1011", "1101", "1110"},
                             {{1, 1, 0, 0}, {1, 0, 1, 0}, {1, 0, 0, 1}, {0, 0, 1, 1}, {0, 1, 0, 1}, {0, 1, 1, 0}, {1, 1, 1, 1}}));
    composed(5736, "#5736", std::sqrt(12.0), tree5736,
             "AND over threshold-2-of-4 and threshold-2-of-4 on negated inputs",
             makeCertificate(4, {"0011", "0101", "0110", "1100", "1010", "1001"},
                             {"1000", "0100", "0010", "0001", "0111", "1011", "1101", "1110"},
                             {{0, 0, 1, 1, 1, 1, 0, 0},
                              {0, 1, 0, 1, 1, 0, 1, 0},
                              {0, 1, 1, 0, 1, 0, 0, 1},
                              {1, 1, 0, 0, 0, 0, 1, 1},
                              {1, 0, 1, 0, 0, 1, 0, 1},
                              {1, 0, 0, 1, 0, 1, 1, 0}}));
    return v;
}

}  // namespace

// ---- gate programs ---------------------------------------------------------

SpanProgram majProgram() {
    const cd w = std::polar(1.0, 2 * M_PI / 3);
    const double c = 1 / kSqrt3;
    return prog({{c, c, c}, {1, w, std::conj(w)}}, {ls({"x1"}), ls({"x2"}), ls({"x3"})}, 3);
}

SpanProgram majUnbalancedProgram(double beta) {
    const double a = std::sqrt(std::sqrt(8 + beta * beta) - beta) / (2 * kSqrt2);
    return prog({{a, a, std::sqrt(0.5 + beta * a * a)}, {kI, -kI, 2 * a}}, {ls({"x1"}), ls({"x2"}), ls({"x3"})}, 3);
}

SpanProgram equalProgram(int k) {
    if (k < 2) throw std::invalid_argument("EQUAL needs at least two inputs");
    const double a = std::pow(double(k - 1), 0.25);
    LiteralSet pos, neg;
    for (int v = 0; v < k; ++v) {
        pos.push_back({v, false});
        neg.push_back({v, true});
    }
    return prog({{a, a}}, {pos, neg}, k);
}

SpanProgram andProgram(int k) {
    LiteralSet all;
    for (int v = 0; v < k; ++v) all.push_back({v, false});
    return prog({{std::pow(double(k), 0.25)}}, {all}, k);
}

SpanProgram andPairProgram(double B, double Bp) {
    const double a = std::pow(B * B + Bp * Bp, 0.25) / (std::sqrt(B) + std::sqrt(Bp));
    return prog({{a, a}, {std::sqrt(Bp), -std::sqrt(B)}}, {ls({"x1"}), ls({"x2"})}, 2);
}

SpanProgram orProgram(const std::vector<double>& costs) {
    double s = 0;
    for (double c : costs) s += c * c;
    const double norm = std::pow(s, 0.25);
    std::vector<cd> row;
    std::vector<LiteralSet> X;
    for (std::size_t j = 0; j < costs.size(); ++j) {
        row.push_back(std::sqrt(costs[j]) / norm);
        X.push_back({Literal{int(j), false}});
    }
    return prog({row}, X, int(costs.size()));
}

SpanProgram parityProgram() {
    return prog({{1, 1}}, {ls({"x1", "~x2"}), ls({"~x1", "x2"})}, 2);
}

SpanProgram gProgram() {
    const double a1 = std::pow(1 + 1 / kSqrt3, 0.25);
    const double a2 = std::sqrt(kSqrt3 - 1);
    return prog({{a1, a1 * a2, 0}, {a2, 0, 1}}, {ls({"x1", "x2"}), ls({"~x1", "~x2"}), ls({"x3"})}, 3);
}

SpanProgram thresholdTwoOfFourProgram(bool negated) {
    return balanceProgram(pThreshold(negated), {1, 1, 1, 1});
}

// ---- gate trees ------------------------------------------------------------

namespace {

bool allEqual(const std::vector<double>& c, double tol = 1e-9) {
    for (double v : c)
        if (std::abs(v - c[0]) > tol * std::max(1.0, std::abs(c[0]))) return false;
    return true;
}

ProgramTree leafTree(SpanProgram p) { return directTree(std::move(p)); }

const CatalogEntry* entryForId(std::uint32_t id) {
    for (const auto& e : threeBitGates())
        if (e.id == id && e.program) return &e;
    for (const auto& e : fourBitEntries())
        if (e.id == id && !e.parameterized) return &e;
    return nullptr;
}

}  // namespace

ProgramTree gateTree(const GateNode& g, const std::vector<double>& c) {
    const int k = g.arity();
    if (int(c.size()) != k) throw std::invalid_argument("one cost per gate input is required");
    switch (g.kind) {
        case GateKind::Leaf:
        case GateKind::Not:
            throw std::invalid_argument("NOT is realized as a graph gadget, not a catalog program");
        case GateKind::And: {
            if (allEqual(c)) return leafTree(andProgram(k));
            if (k == 2) return leafTree(andPairProgram(c[0], c[1]));
            GateNode head = g;
            head.children.pop_back();
            std::vector<double> hc(c.begin(), c.end() - 1);
            double B = 0;
            for (double v : hc) B += v * v;
            return overLeaves(andPairProgram(std::sqrt(B), c.back()), {subSlot(gateTree(head, hc)), leafSlot(k - 1)});
        }
        case GateKind::Or: return leafTree(orProgram(c));
        case GateKind::Parity: {
            if (k == 2) return leafTree(parityProgram());
            GateNode head = g;
            head.children.pop_back();
            std::vector<double> hc(c.begin(), c.end() - 1);
            return overLeaves(parityProgram(), {subSlot(gateTree(head, hc)), leafSlot(k - 1)});
        }
        case GateKind::Maj3: {
            if (allEqual(c)) return leafTree(majProgram());
            for (int odd = 0; odd < 3; ++odd) {
                int a = (odd + 1) % 3, b = (odd + 2) % 3;
                if (std::abs(c[a] - c[b]) <= 1e-9 * std::max(1.0, c[a])) {
                    SpanProgram p = majUnbalancedProgram(c[odd] / c[a]);
                    p = relabel(p, {a, b, odd}, {false, false, false}, 3);
                    return leafTree(balanceProgram(p, c));
                }
            }
            throw std::invalid_argument("no span program for MAJ with three distinct input costs");
        }
        case GateKind::EqualK:
            if (!allEqual(c)) throw std::invalid_argument("EQUAL is catalogued for equal input costs only");
            return leafTree(equalProgram(k));
        case GateKind::TruthTable3:
        case GateKind::TruthTable4: {
            if (!allEqual(c)) throw std::invalid_argument("truth-table gates are catalogued for equal input costs only");
            const int n = g.kind == GateKind::TruthTable3 ? 3 : 4;
            const std::uint32_t id = canonicalFunctionId(g.table, n);
            const CatalogEntry* e = entryForId(id);
            if (!e) throw std::invalid_argument("no catalogued program for function #" + std::to_string(id));
            if (e->arity > n) throw std::invalid_argument("function #" + std::to_string(id) + " needs 4 inputs");
            ProgramTree t = e->program(1.0);
            std::uint32_t from = truthTable(flatten(t, e->arity), e->arity);
            if (e->arity == 3 && n == 4) from = embedThreeBit(from);
            auto tr = findTransform(from, g.table, n);
            if (!tr) throw std::logic_error("catalog program is not equivalent to the gate");
            ProgramTree out = mapLeaves(t, [&](const Slot& s) {
                return leafSlot(tr->perm[s.leafVar], s.negated != tr->flip[s.leafVar]);
            });
            out.negateOutput = out.negateOutput != tr->negateOutput;
            return out;
        }
    }
    throw std::logic_error("unhandled gate kind");
}

SpanProgram catalogProgramFor(const GateNode& g, const std::vector<double>& childCosts) {
    return flatten(gateTree(g, childCosts), g.arity());
}

namespace {

Slot buildSlot(const GateNode& g, bool neg) {
    if (g.kind == GateKind::Leaf) return leafSlot(g.var, neg);
    if (g.kind == GateKind::Not) return buildSlot(g.children[0], !neg);
    std::vector<double> costs;
    std::vector<Slot> kids;
    for (const auto& ch : g.children) {
        costs.push_back(nodeAdv(ch));
        kids.push_back(buildSlot(ch, false));
    }
    ProgramTree t = mapLeaves(gateTree(g, costs), [&](const Slot& s) {
        Slot r = kids.at(s.leafVar);
        r.negated = r.negated != s.negated;
        return r;
    });
    return subSlot(std::move(t), neg);
}

}  // namespace

ProgramTree formulaTree(const Formula& f) {
    Slot s = buildSlot(f.root, false);
    if (!s.sub) {
        ProgramTree t = directTree(prog({{1}}, {ls({"x1"})}, 1));
        t.slots[0] = leafSlot(s.leafVar, s.negated);
        return t;
    }
    ProgramTree t = *s.sub;
    t.negateOutput = t.negateOutput != s.negated;
    return t;
}

SpanProgram formulaProgram(const Formula& f) { return flatten(formulaTree(f), f.numInputs); }

// ---- catalog ---------------------------------------------------------------

const std::vector<CatalogEntry>& threeBitGates() {
    static const std::vector<CatalogEntry> v = buildThreeBit();
    return v;
}

const std::vector<CatalogEntry>& fourBitEntries() {
    static const std::vector<CatalogEntry> v = buildFourBit();
    return v;
}

std::vector<double> entryCosts(const CatalogEntry& e, double beta) {
    std::vector<double> c(std::size_t(e.arity), 1.0);
    if (e.parameterized) c[2] = beta;
    return c;
}

std::optional<double> certifiedAdv(std::uint32_t id) {
    for (const auto& e : threeBitGates())
        if (e.id == id) return e.adv(1.0);
    for (const auto& e : fourBitEntries())
        if (e.id == id) return e.adv(1.0);
    return std::nullopt;
}

CatalogRow verifyEntry(const CatalogEntry& e, double beta, double wsizeTol, double certTol) {
    CatalogRow r;
    r.id = e.id;
    r.name = e.name;
    r.beta = beta;
    r.adv = e.adv(beta);
    const auto costs = entryCosts(e, beta);
    auto near = [](double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); };

    if (!e.program) {
        // Constant function: no columns, no certificate, bound zero.
        r.programTable = 0;
        r.canonicalId = 0;
        r.tableOk = e.id == 0;
        r.wsize = r.flatWsize = 0.0;
        r.wsizeOk = r.certOk = true;
        r.note = "constant";
        return r;
    }

    const ProgramTree t = e.program(beta);
    const SpanProgram flat = flatten(t, e.arity);
    r.programTable = std::uint32_t(truthTable(flat, e.arity));
    r.canonicalId = canonicalFunctionId(r.programTable, e.arity);
    r.tableOk = r.canonicalId == e.id;
    r.wsize = treeWitnessSize(t, costs);
    r.flatWsize = costWeightedWitnessSize(flat, costs);
    r.wsizeOk = near(r.wsize, r.adv, wsizeTol);

    if (auto c = e.certificate(beta)) {
        AdversaryCertificate cc = *c;
        bool mapped = true;
        if (e.certificateTable != r.programTable) {
            auto tr = findTransform(e.certificateTable, r.programTable, e.arity);
            if (tr) cc = transformCertificate(cc, *tr);
            else mapped = false;
        }
        if (mapped) {
            try {
                r.certRatio = certificateRatio(cc, r.programTable, costs);
                r.certOk = near(*r.certRatio, r.adv, certTol);
            } catch (const std::exception& ex) {
                r.note += std::string("certificate rejected: ") + ex.what() + "; ";
            }
        } else {
            r.note += "certificate written for an inequivalent function; ";
        }
    } else {
        r.note += "no certificate; ";
    }

    if (auto p = e.printed(beta)) {
        auto ext = costWeightedExtremes(*p, costs);
        r.printedWsize = ext.max();
        r.printedBalancedWsize = std::sqrt(ext.maxTrue * ext.maxFalse);
        r.printedOk = near(*r.printedBalancedWsize, r.adv, certTol) &&
                      canonicalFunctionId(std::uint32_t(truthTable(*p, e.arity)), e.arity) == e.id;
        if (!r.printedOk) r.note += "listed program does not reach the bound; ";
    }
    if (!r.note.empty()) r.note.resize(r.note.size() - 2);
    return r;
}

std::vector<CatalogRow> verifyCatalog() {
    std::vector<CatalogRow> rows;
    for (const auto& e : threeBitGates()) rows.push_back(verifyEntry(e, 1.0));
    for (const auto& e : fourBitEntries()) {
        if (e.parameterized)
            for (double b : {0.5, 1.0, 2.0}) rows.push_back(verifyEntry(e, b, 1e-6));
        else
            rows.push_back(verifyEntry(e, 1.0, 1e-6));
    }
    return rows;
}

nlohmann::json catalogJson() {
    nlohmann::json out = nlohmann::json::array();
    auto dump = [&](const CatalogEntry& e, const char* group) {
        nlohmann::json j;
        j["group"] = group;
        j["id"] = e.id;
        j["name"] = e.name;
        j["arity"] = e.arity;
        j["parameterized"] = e.parameterized;
        j["adv"] = e.adv(1.0);
        j["programSource"] = e.programSource;
        j["certificateSource"] = e.certificateSource;
        j["certificateTable"] = e.certificateTable;
        if (e.program) j["program"] = toJson(flatten(e.program(1.0), e.arity));
        if (auto c = e.certificate(1.0)) {
            nlohmann::json g = nlohmann::json::array();
            const int N = 1 << c->n;
            for (int x = 0; x < N; ++x)
                for (int y = x + 1; y < N; ++y)
                    if (c->gamma(x, y) != 0)
                        g.push_back({bitsToString(bitsFromIndex(x, c->n)), bitsToString(bitsFromIndex(y, c->n)),
                                     c->gamma(x, y)});
            j["certificate"] = g;
        }
        out.push_back(j);
    };
    for (const auto& e : threeBitGates()) dump(e, "three-bit");
    for (const auto& e : fourBitEntries()) dump(e, "four-bit");
    return out;
}

}  // namespace spanwalk
