#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "spanwalk/gadget_graph.hpp"
#include "spanwalk/verify.hpp"

using namespace spanwalk;

namespace {

SpanProgram identityProgram() {
    MatrixXcd A(1, 1);
    A << 1.0;
    return makeProgram(A, {literals({"x1"})}, 1);
}

std::vector<double> sortedEigs(const MatrixXcd& H) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H);
    std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return v;
}

double eigDistance(std::vector<double> a, std::vector<double> b) {
    if (a.size() != b.size()) return 1e9;
    double d = 0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

}  // namespace

TEST_CASE("single-column graph layout") {
    GadgetGraph g = buildGadgetGraph(identityProgram());
    REQUIRE(g.size() == 4);
    CHECK(g.vertices[0].kind == VertexKind::OutputA);
    CHECK(g.vertices[1].kind == VertexKind::OutputB);
    CHECK(g.vertices[2].kind == VertexKind::Column);
    CHECK(g.vertices[3].kind == VertexKind::Leaf);
    CHECK(isBipartite(g));
    CHECK(isConnected(g));
    CHECK((g.adjacency - g.adjacency.adjoint()).norm() == 0.0);
    CHECK(std::abs(g.adjacency(0, 1)) == doctest::Approx(1.0));
    CHECK(std::abs(g.adjacency(1, 2)) == doctest::Approx(1.0));
    CHECK(std::abs(g.adjacency(2, 3)) == doctest::Approx(1.0));
}

TEST_CASE("kernel support on the single-column graph") {
    GadgetGraph g = buildGadgetGraph(identityProgram());
    // x1 true: the leaf edge is gone and the kernel is (1, 0, -1) on aO, bO, a1.
    ZeroSupport t = zeroEigenvectorSupport(g, {1});
    CHECK(t.sideA);
    CHECK(t.abO == doctest::Approx(0.5));
    // x1 false: the path bO, a1, b1 forces aO = 0 and leaves (bO, b1) = (1, -1).
    ZeroSupport f = zeroEigenvectorSupport(g, {0});
    CHECK_FALSE(f.sideA);
    CHECK(f.abO == doctest::Approx(0.5));
}

TEST_CASE("path spectrum with a weighted output edge") {
    const double w = 0.3;
    GadgetGraph g = withOutputWeight(buildGadgetGraph(identityProgram()), w);
    SpectrumReport r = spectrumReport(applyInput(g, {1}));
    std::vector<double> want{-std::sqrt(1 + w * w), 0.0, 0.0, std::sqrt(1 + w * w)};
    std::vector<double> got(r.eigenvalues.data(), r.eigenvalues.data() + r.eigenvalues.size());
    CHECK(eigDistance(got, want) < 1e-12);
    CHECK(r.pairingError < 1e-12);
    // A four-vertex path w, 1, 1: lambda^2 = (2 + w^2 +- sqrt(4 + w^4)) / 2.
    SpectrumReport full = spectrumReport(applyInput(g, {0}));
    const double s = std::sqrt(4 + w * w * w * w);
    const double l1 = std::sqrt((2 + w * w - s) / 2), l2 = std::sqrt((2 + w * w + s) / 2);
    std::vector<double> got2(full.eigenvalues.data(), full.eigenvalues.data() + full.eigenvalues.size());
    CHECK(eigDistance(got2, {-l2, -l1, l1, l2}) < 1e-12);
    CHECK(full.kernelDimension == 0);
}

TEST_CASE("MAJ output row") {
    GadgetGraph g = buildGadgetGraph(majProgram());
    MatrixXcd B = upperRightBlock(g);
    REQUIRE(B.cols() >= 4);
    CHECK(std::abs(B(0, 0) - cd(1.0)) < 1e-12);
    for (int j = 1; j <= 3; ++j) CHECK(std::abs(B(0, j)) == doctest::Approx(1.0 / std::sqrt(3.0)));
}

TEST_CASE("dual-rail support tracks the function") {
    for (auto prog : {majProgram(), parityProgram(), equalProgram(3), randomSpanProgram(9)}) {
        GadgetGraph g = buildGadgetGraph(prog);
        for (const auto& x : testutil::allInputs(prog.numInputs)) {
            ZeroSupport z = zeroEigenvectorSupport(g, x);
            CHECK(z.sideA == testutil::spanOracle(prog, x));
            CHECK(z.abO > 1e-6);
            CHECK(z.otherSide < 1e-12);
        }
    }
}

TEST_CASE("graph dual matches the dual program") {
    for (auto prog : {majProgram(), parityProgram()}) {
        GadgetGraph a = graphDual(buildGadgetGraph(prog));
        GadgetGraph b = buildGadgetGraph(dualSpanProgram(prog));
        for (const auto& x : testutil::allInputs(prog.numInputs)) {
            CHECK(eigDistance(sortedEigs(applyInput(a, x).adjacency), sortedEigs(applyInput(b, x).adjacency)) <
                  1e-10);
            CHECK(zeroEigenvectorSupport(a, x).sideA == !testutil::spanOracle(prog, x));
        }
    }
}

TEST_CASE("graph surgery equals the flattened program") {
    const char* texts[] = {"MAJ(AND(x1,x2),x3,OR(x4,x5))", "NOT(MAJ(x1,NOT(x2),x3))", "TT3:30(x1,x2,x3)"};
    for (const char* s : texts) {
        Formula f = parseFormula(s);
        ProgramTree t = formulaTree(f);
        GadgetGraph surgery = treeGraph(t, f.numInputs);
        GadgetGraph flat = buildGadgetGraph(flatten(t, f.numInputs));
        REQUIRE(surgery.size() == flat.size());
        for (const auto& x : testutil::allInputs(f.numInputs)) {
            CHECK(eigDistance(sortedEigs(applyInput(surgery, x).adjacency),
                              sortedEigs(applyInput(flat, x).adjacency)) < 1e-10);
            CHECK(zeroEigenvectorSupport(surgery, x).sideA == evaluateClassically(f, x));
        }
    }
}

TEST_CASE("output ratio closed form matches the direct solve") {
    SpanProgram p = majProgram();
    for (double lambda : {1e-2, 1e-3, 1e-4}) {
        for (const auto& x : testutil::allInputs(3)) {
            bool t = testutil::spanOracle(p, x);
            RatioReport r = outputRatio(p, leafRatios(p, x, lambda), lambda, t);
            CHECK(r.trueCase == t);
            CHECK(r.closedForm == doctest::Approx(r.direct).epsilon(1e-7));
            if (t) CHECK(r.closedForm < 0);
            else CHECK(r.closedForm > 0);
        }
    }
    CHECK_THROWS_AS(outputRatio(p, leafRatios(p, {1, 1, 0}, 1e-3), 0.0, true), std::domain_error);
}

TEST_CASE("leaf ratios") {
    SpanProgram p = identityProgram();
    auto r1 = leafRatios(p, {1}, 0.1);
    auto r0 = leafRatios(p, {0}, 0.1);
    REQUIRE(r1.size() == 1);
    CHECK(r1[0] == doctest::Approx(-10.0));
    CHECK(r0[0] == doctest::Approx(0.1));
}

TEST_CASE("NOT gadget ratio") {
    for (double lambda : {0.1, 0.01})
        for (double r : {-5.0, -0.3, 0.2, 4.0})
            CHECK(notGateRatio(r, lambda) == doctest::Approx(notGateRatioDirect(r, lambda)).epsilon(1e-10));
}

TEST_CASE("export formats") {
    GadgetGraph g = buildGadgetGraph(majProgram());
    auto j = toJson(g);
    CHECK(j.contains("vertices"));
    std::string dot = toDot(g);
    CHECK(dot.find("graph") != std::string::npos);
}
