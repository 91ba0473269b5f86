#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "spanwalk/gate_catalog.hpp"
#include "spanwalk/verify.hpp"
#include "spanwalk/witness.hpp"

using namespace spanwalk;

namespace {

// Orthonormal basis of ker(M) from a full SVD.
MatrixXcd kernelBasis(const MatrixXcd& M) {
    const Eigen::Index n = M.cols();
    if (M.rows() == 0) return MatrixXcd::Identity(n, n);
    Eigen::JacobiSVD<MatrixXcd> svd(M, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double cut = 1e-10 * std::max(1.0, s.size() ? s(0) : 0.0);
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > cut) ++r;
    return svd.matrixV().rightCols(n - r);
}

// min w^* Q w subject to C w = e, by a particular solution plus a kernel search.
double constrainedMin(const MatrixXcd& Q, const MatrixXcd& C, const VectorXcd& e) {
    Eigen::CompleteOrthogonalDecomposition<MatrixXcd> cod(C);
    VectorXcd w0 = cod.solve(e);
    REQUIRE((C * w0 - e).norm() < 1e-8);
    MatrixXcd N = kernelBasis(C);
    VectorXcd w = w0;
    if (N.cols() > 0) {
        MatrixXcd H = N.adjoint() * Q * N;
        Eigen::CompleteOrthogonalDecomposition<MatrixXcd> h(H);
        w -= N * h.solve(N.adjoint() * Q * w0);
    }
    return (w.adjoint() * Q * w)(0, 0).real();
}

// Per-column cost from the definition: sum of costs when every literal holds,
// otherwise the harmonic combination of the failing ones.
double columnCost(const LiteralSet& X, const Bits& x, const std::vector<double>& u) {
    double sum = 0, inv = 0;
    bool all = true;
    for (const auto& l : X) {
        sum += u[l.var];
        if (bool(x[l.var]) == l.neg) {
            all = false;
            inv += 1.0 / u[l.var];
        }
    }
    return all ? std::max(sum, 1.0) : 1.0 / inv;
}

double oracleWitness(const SpanProgram& p, const Bits& x, const std::vector<double>& u, bool& isTrue) {
    const Eigen::Index J = p.cols();
    std::vector<double> g(J);
    std::vector<int> on;
    for (Eigen::Index j = 0; j < J; ++j) {
        g[j] = columnCost(p.X[j], x, u);
        bool all = true;
        for (const auto& l : p.X[j]) all = all && (bool(x[l.var]) != l.neg);
        if (all) on.push_back(int(j));
    }
    isTrue = testutil::spanOracle(p, x);
    if (isTrue) {
        // min sum_{j on} g_j |w_j|^2 with A_on w = t
        MatrixXcd Aon(p.rows(), Eigen::Index(on.size()));
        MatrixXcd Q = MatrixXcd::Zero(Eigen::Index(on.size()), Eigen::Index(on.size()));
        for (std::size_t k = 0; k < on.size(); ++k) {
            Aon.col(Eigen::Index(k)) = p.A.col(on[k]);
            Q(Eigen::Index(k), Eigen::Index(k)) = g[on[k]];
        }
        return constrainedMin(Q, Aon, p.target);
    }
    // min sum_j g_j |<A_j, w>|^2 with <t, w> = 1 and <A_j, w> = 0 for j on
    MatrixXcd C(1 + Eigen::Index(on.size()), p.rows());
    C.row(0) = p.target.adjoint();
    for (std::size_t k = 0; k < on.size(); ++k) C.row(1 + Eigen::Index(k)) = p.A.col(on[k]).adjoint();
    VectorXcd e = VectorXcd::Zero(C.rows());
    e(0) = 1.0;
    MatrixXcd Q = MatrixXcd::Zero(p.rows(), p.rows());
    for (Eigen::Index j = 0; j < J; ++j) Q += g[j] * p.A.col(j) * p.A.col(j).adjoint();
    return constrainedMin(Q, C, e);
}

}  // namespace

TEST_CASE("witness size agrees with a direct constrained minimization") {
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        SpanProgram p = randomSpanProgram(seed);
        std::vector<double> u(p.numInputs, 1.0);
        if (seed % 3 == 0)
            for (int k = 0; k < p.numInputs; ++k) u[k] = 1.0 + 0.5 * k;
        for (const auto& x : testutil::allInputs(p.numInputs)) {
            bool isTrue = false;
            double want = oracleWitness(p, x, u, isTrue);
            WitnessReport r = witnessSize(p, x, u);
            CHECK(r.trueCase == isTrue);
            CHECK(r.value == doctest::Approx(want).epsilon(1e-7));
            CHECK(r.altValue == doctest::Approx(r.value).epsilon(1e-9));
            ++checked;
        }
    }
    CHECK(checked > 500);
}

TEST_CASE("true witness satisfies its constraint") {
    SpanProgram p = majProgram();
    const Bits x{1, 1, 0};
    WitnessReport r = witnessSize(p, x);
    REQUIRE(r.trueCase);
    REQUIRE(r.witness.size() == p.cols());
    CHECK((p.A * r.witness - p.target).norm() < 1e-10);
    auto on = trueColumns(p, x);
    for (int j = 0; j < int(p.cols()); ++j)
        if (std::find(on.begin(), on.end(), j) == on.end()) CHECK(std::abs(r.witness(j)) < 1e-14);
}

TEST_CASE("false witness is normalized and orthogonal to true columns") {
    SpanProgram p = majProgram();
    const Bits x{1, 0, 0};
    WitnessReport r = witnessSize(p, x);
    REQUIRE_FALSE(r.trueCase);
    REQUIRE(r.witness.size() == p.rows());
    CHECK(std::abs(p.target.dot(r.witness) - cd(1.0)) < 1e-10);
    for (int j : trueColumns(p, x)) CHECK(std::abs(p.A.col(j).dot(r.witness)) < 1e-10);
}

TEST_CASE("target outside the span is rejected") {
    MatrixXcd A(2, 1);
    A << 0.0, 1.0;
    SpanProgram p = makeProgram(A, {literals({"x1"})}, 1);
    CHECK_THROWS_AS(witnessSize(p, {1}), std::invalid_argument);
}

TEST_CASE("balancing equalizes the two extremes") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        SpanProgram p = randomSpanProgram(seed);
        WitnessExtremes e = witnessExtremes(p);
        if (e.maxTrue == 0 || e.maxFalse == 0) continue;
        WitnessExtremes b = witnessExtremes(balanceProgram(p));
        const double geo = std::sqrt(e.maxTrue * e.maxFalse);
        CHECK(b.maxTrue == doctest::Approx(geo).epsilon(1e-8));
        CHECK(b.maxFalse == doctest::Approx(geo).epsilon(1e-8));
    }
}

TEST_CASE("parallel and serial sweeps agree") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        SpanProgram p = randomSpanProgram(seed);
        WitnessExtremes a = witnessExtremes(p), b = witnessExtremesSerial(p);
        CHECK(a.maxTrue == b.maxTrue);
        CHECK(a.maxFalse == b.maxFalse);
    }
    CHECK(maxWitnessSize(majProgram()) == maxWitnessSizeSerial(majProgram()));
}

TEST_CASE("cost-weighted size is homogeneous in the costs") {
    SpanProgram p = majUnbalancedProgram(2.0);
    const std::vector<double> c{1.0, 1.0, 2.0};
    const double base = costWeightedWitnessSize(p, c);
    CHECK(costWeightedWitnessSize(p, {3.0, 3.0, 6.0}) == doctest::Approx(3.0 * base));
}

TEST_CASE("grouped complexity of a two-literal column") {
    MatrixXcd A(1, 1);
    A << 1.0;
    SpanProgram p = makeProgram(A, {literals({"x1", "x2"})}, 2);
    const std::vector<double> u{2.0, 3.0};
    CHECK(groupedComplexity(p, {1, 1}, u)(0) == doctest::Approx(5.0));
    CHECK(groupedComplexity(p, {0, 0}, u)(0) == doctest::Approx(1.2));
    CHECK(groupedComplexity(p, {1, 0}, u)(0) == doctest::Approx(3.0));
}

TEST_CASE("gate programs reach the adversary bound") {
    CHECK(maxWitnessSize(majProgram()) == doctest::Approx(2.0));
    CHECK(maxWitnessSize(parityProgram()) == doctest::Approx(2.0));
    CHECK(costWeightedWitnessSize(andPairProgram(1, 1), {1, 1}) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("witness size is monotone in each input complexity") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        SpanProgram p = randomSpanProgram(seed);
        std::vector<double> u(p.numInputs, 1.0);
        for (int k = 0; k < p.numInputs; ++k) u[k] = 1.0 + 0.25 * double((seed + k) % 4);
        for (const auto& x : testutil::allInputs(p.numInputs)) {
            const double base = witnessSize(p, x, u).value;
            for (int i = 0; i < p.numInputs; ++i) {
                auto v = u;
                v[i] *= 2;
                CHECK(witnessSize(p, x, v).value >= base * (1 - 1e-9));
            }
        }
    }
}

TEST_CASE("complexities scaled by sqrt(1 + T) stay under the (1 + |T|) bound") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(0.0, 2.0);
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        SpanProgram p = randomSpanProgram(seed);
        std::vector<double> u(p.numInputs, 1.0), a(p.numInputs), b(p.numInputs);
        double tmax = 0;
        std::vector<double> T(p.numInputs);
        for (auto& t : T) tmax = std::max(tmax, t = U(rng));
        for (int i = 0; i < p.numInputs; ++i) {
            a[i] = u[i] * std::sqrt(1 + T[i]);
            b[i] = u[i] * (1 + tmax);
        }
        for (const auto& x : testutil::allInputs(p.numInputs))
            CHECK(witnessSize(p, x, a).value <= witnessSize(p, x, b).value * (1 + 1e-9));
    }
}

TEST_CASE("catalog programs: dual negates, residuals are small") {
    for (const auto& c : catalogPrograms({0.5, 1.0, 2.0})) {
        const SpanProgram& p = c.program;
        SpanProgram d = dualSpanProgram(p);
        for (const auto& x : testutil::allInputs(p.numInputs)) {
            CHECK(testutil::spanOracle(d, x) == !testutil::spanOracle(p, x));
            WitnessReport r = witnessSize(p, x, c.costs);
            CHECK(r.residual < 1e-8);
            CHECK(r.altValue == doctest::Approx(r.value).epsilon(1e-9));
        }
    }
}

TEST_CASE("predicted subformula complexity") {
    auto one = composedComplexityBound(parseFormula("MAJ(x1,x2,x3)"));
    REQUIRE(one.size() == 1);
    CHECK(one[0].predicted == doctest::Approx(2.0));
    auto two = composedComplexityBound(parseFormula("MAJ(MAJ(x1,x2,x3),MAJ(x4,x5,x6),MAJ(x7,x8,x9))"));
    CHECK(two.back().predicted == doctest::Approx(4.0));
    CHECK(two.back().adv == doctest::Approx(4.0));
}
