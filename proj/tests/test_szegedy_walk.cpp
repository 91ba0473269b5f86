#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "spanwalk/estimator.hpp"
#include "spanwalk/szegedy_walk.hpp"
#include "spanwalk/verify.hpp"

using namespace spanwalk;

namespace {

GadgetGraph majGraph() { return reweightOutput(buildGadgetGraph(majProgram()), 2.0, 0.2); }

// Perron pair of a nonnegative symmetric matrix by power iteration on |A| + I.
std::pair<double, Eigen::VectorXd> perron(const Eigen::MatrixXd& A) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(A.rows());
    Eigen::MatrixXd B = A + Eigen::MatrixXd::Identity(A.rows(), A.cols());
    for (int k = 0; k < 20000; ++k) {
        v = B * v;
        v.normalize();
    }
    return {v.dot(A * v), v};
}

std::vector<cd> toVec(const VectorXcd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_CASE("real nonnegative weights give the square-root decomposition") {
    GadgetGraph g = reweightOutput(buildGadgetGraph(formulaProgram(parseFormula("AND(OR(x1,x2),OR(x3,x4))"))),
                                   2.0, 0.2);
    REQUIRE(g.adjacency.imag().cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(g.adjacency.real().minCoeff() >= 0.0);
    Eigen::MatrixXd A = g.adjacency.real();
    auto [nrm, p] = perron(A);
    DeltaDecomposition d = deltaDecompose(g);
    CHECK(d.normAPrime == doctest::Approx(nrm).epsilon(1e-10));
    for (int v = 0; v < g.size(); ++v)
        for (int u = 0; u < g.size(); ++u) {
            const double want = std::sqrt(A(v, u) * p(u) / (nrm * p(v)));
            CHECK(std::abs(d.delta(v, u) - cd(want)) < 1e-9);
        }
    CHECK(deltaRowNormError(d) < 1e-13);
    CHECK(deltaReconstructionError(d, g.adjacency) < 1e-13);
}

TEST_CASE("four-vertex path") {
    const double w = 0.7;
    GadgetGraph g = buildGadgetGraph(makeProgram(MatrixXcd::Ones(1, 1), {literals({"x1"})}, 1));
    g = withOutputWeight(g, w);
    DeltaDecomposition d = deltaDecompose(g);
    // Path w, 1, 1: the largest eigenvalue solves lambda^2 = (2 + w^2 + sqrt(4 + w^4)) / 2.
    CHECK(d.normAPrime == doctest::Approx(std::sqrt((2 + w * w + std::sqrt(4 + std::pow(w, 4))) / 2)));
    for (int v = 0; v < g.size(); ++v) CHECK(d.delta.row(v).norm() == doctest::Approx(1.0));
}

TEST_CASE("complex weights decompose under both phase splits") {
    for (std::uint64_t seed : {3ull, 8ull, 21ull}) {
        GadgetGraph g = buildGadgetGraph(randomSpanProgram(seed));
        if (!isConnected(g)) continue;
        for (auto split : {PhaseSplit::Principal, PhaseSplit::BlackRows}) {
            DeltaDecomposition d = deltaDecompose(g, split);
            CHECK(deltaRowNormError(d) < 1e-12);
            CHECK(deltaReconstructionError(d, g.adjacency) < 1e-12);
        }
    }
}

TEST_CASE("phase split does not change the spectrum") {
    for (std::uint64_t seed : {3ull, 8ull}) {
        GadgetGraph g = buildGadgetGraph(randomSpanProgram(seed));
        if (!isConnected(g)) continue;
        WalkOperator a = buildWalk(g, deltaDecompose(g, PhaseSplit::Principal));
        WalkOperator b = buildWalk(g, deltaDecompose(g, PhaseSplit::BlackRows));
        for (const auto& x : testutil::allInputs(g.numInputs)) {
            auto ea = toVec(eigenvaluesOf(applyOracle(a, x).Ux));
            auto eb = toVec(eigenvaluesOf(applyOracle(b, x).Ux));
            CHECK(eigenvalueMultisetDistance(ea, eb) < 1e-9);
        }
    }
}

TEST_CASE("no true literal leaves the walk unchanged") {
    GadgetGraph g = majGraph();
    WalkOperator w = buildWalk(g, deltaDecompose(g));
    WalkOperator w0 = applyOracle(w, {0, 0, 0});
    CHECK((w0.Ux - w.U0).norm() == 0.0);
    WalkOperator w1 = applyOracle(w, {1, 0, 0});
    CHECK((w1.Ux - w.U0).norm() > 0.1);
}

TEST_CASE("walk operators are unitary and match the graph") {
    GadgetGraph g = majGraph();
    WalkOperator w = buildWalk(g, deltaDecompose(g));
    const Eigen::Index n = w.U0.rows();
    CHECK((w.U0.adjoint() * w.U0 - MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((w.S * w.S - MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((w.T.adjoint() * w.T - MatrixXcd::Identity(g.size(), g.size())).cwiseAbs().maxCoeff() < 1e-12);
    for (const auto& x : testutil::allInputs(3)) {
        CorrespondenceReport r = checkCorrespondence(g, applyOracle(w, x), x);
        CHECK(r.unitarity < 1e-12);
        CHECK(r.projection < 1e-12);
        CHECK(r.liftResidual < 1e-12);
        CHECK(r.invariance < 1e-10);
        CHECK(r.spectrumMismatch < 1e-9);
        CHECK(r.complementResidual < 1e-10);
    }
}

TEST_CASE("discriminant of the lift is the sink adjacency") {
    GadgetGraph g = majGraph();
    DeltaDecomposition d = deltaDecompose(g);
    WalkOperator w = buildWalk(g, d);
    const Bits x{0, 1, 1};
    MatrixXcd Tx = inputLift(w, x);
    MatrixXcd M = sinkAdjacency(g, x, d.normAPrime);
    CHECK((Tx.adjoint() * w.S * Tx - M).cwiseAbs().maxCoeff() < 1e-12);
    // Hand check: the sink diagonal sits on the two true leaves only.
    int diag = 0;
    for (int v = 0; v < g.size(); ++v)
        if (std::abs(M(v, v)) > 0.5) ++diag;
    CHECK(diag == 2);
}

TEST_CASE("full edge space agrees with the reduced space") {
    GadgetGraph g = majGraph();
    DeltaDecomposition d = deltaDecompose(g);
    WalkOperator small = buildWalk(g, d, false);
    WalkOperator full = buildWalk(g, d, true);
    CHECK(int(full.basis.size()) == g.size() * g.size());
    CHECK(small.basis.size() < full.basis.size());
    PhaseEstimationConfig pe;
    pe.deltaP = 0.05;
    for (const auto& x : testutil::allInputs(3)) {
        double a = acceptanceProbability(applyOracle(small, x), pe);
        double b = acceptanceProbability(applyOracle(full, x), pe);
        CHECK(a == doctest::Approx(b).epsilon(1e-9));
        CorrespondenceReport r = checkCorrespondence(g, applyOracle(full, x), x);
        CHECK(r.complementResidual < 1e-10);
        CHECK(r.spectrumMismatch < 1e-9);
    }
}

TEST_CASE("basis lookup") {
    GadgetGraph g = majGraph();
    WalkOperator w = buildWalk(g, deltaDecompose(g));
    for (std::size_t k = 0; k < w.basis.size(); ++k)
        CHECK(w.index(w.basis[k].first, w.basis[k].second) == int(k));
    CHECK(w.startIndex() >= 0);
    CHECK(w.index(GadgetGraph::aO, GadgetGraph::aO) == -1);
}

TEST_CASE("disconnected graphs are rejected") {
    GadgetGraph g = buildGadgetGraph(majProgram());
    const int leaf = g.firstLeaf();
    g.adjacency.row(leaf).setZero();
    g.adjacency.col(leaf).setZero();
    CHECK_FALSE(isConnected(g));
    CHECK_THROWS_AS(deltaDecompose(g), std::invalid_argument);
}
