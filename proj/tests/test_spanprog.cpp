#include "doctest.h"
#include "helpers.hpp"
#include "spanwalk/gate_catalog.hpp"
#include "spanwalk/spanprog.hpp"
#include "spanwalk/verify.hpp"

using namespace spanwalk;

namespace {

std::uint64_t oracleTable(const SpanProgram& p, int n) {
    std::uint64_t t = 0;
    for (std::uint64_t v = 0; v < (1ull << n); ++v)
        if (testutil::spanOracle(p, bitsFromIndex(v, n))) t |= 1ull << ((1ull << n) - 1 - v);
    return t;
}

}  // namespace

TEST_CASE("evaluation agrees with the span definition on random programs") {
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        SpanProgram p = randomSpanProgram(seed);
        REQUIRE(p.isNormalized(1e-12));
        for (const auto& x : testutil::allInputs(p.numInputs))
            CHECK(evaluateSpanProgram(p, x) == testutil::spanOracle(p, x));
    }
}

TEST_CASE("single-column programs") {
    MatrixXcd A(1, 1);
    A << 1.0;
    SpanProgram p = makeProgram(A, {literals({"x1"})}, 1);
    CHECK(truthTable(p) == 0b01u);
    SpanProgram q = makeProgram(A, {literals({"~x1"})}, 1);
    CHECK(truthTable(q) == 0b10u);
    SpanProgram a = makeProgram(A, {literals({"x1", "x2"})}, 2);
    CHECK(truthTable(a) == 0b0001u);
}

TEST_CASE("gate programs compute their gates") {
    CHECK(truthTable(majProgram()) == 0b00010111u);
    CHECK(truthTable(parityProgram()) == 0b0110u);
    CHECK(truthTable(andProgram(3)) == 0b00000001u);
    CHECK(truthTable(orProgram({1, 1, 1})) == 0b01111111u);
    CHECK(truthTable(equalProgram(3)) == 0b10000001u);
    CHECK(truthTable(majProgram()) == oracleTable(majProgram(), 3));
}

TEST_CASE("dual program computes the negation") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        SpanProgram p = randomSpanProgram(seed);
        SpanProgram d = dualSpanProgram(p);
        const int n = p.numInputs;
        const std::uint64_t mask = (1ull << (1ull << n)) - 1;
        CHECK(oracleTable(d, n) == (~oracleTable(p, n) & mask));
    }
    SpanProgram m = majProgram();
    CHECK(truthTable(dualSpanProgram(m)) == (~truthTable(m) & 0xFFu));
}

TEST_CASE("composition matches the composed function") {
    // MAJ(AND(x1,x2), x3, PARITY(x4,x5))
    SpanProgram outer = majProgram();
    std::vector<Inner> inners{Inner::of(relabel(andProgram(2), {0, 1}, {false, false}, 5)),
                              Inner::leaf(2),
                              Inner::of(relabel(parityProgram(), {3, 4}, {false, false}, 5))};
    SpanProgram c = composeSpanPrograms(outer, inners, 5);
    for (const auto& x : testutil::allInputs(5)) {
        int ones = int(x[0] && x[1]) + x[2] + int(x[3] != x[4]);
        CHECK(testutil::spanOracle(c, x) == (ones >= 2));
        CHECK(evaluateSpanProgram(c, x) == (ones >= 2));
    }
}

TEST_CASE("composition through negated literals uses the dual") {
    // OR(~y1, y2) with y1 = AND(x1,x2), y2 = x3.
    MatrixXcd A(1, 2);
    A << 1.0, 1.0;
    SpanProgram orNeg = makeProgram(A, {literals({"~x1"}), literals({"x2"})}, 2);
    SpanProgram c = composeSpanPrograms(orNeg, {Inner::of(andProgram(2)), Inner::leaf(2)}, 3);
    for (const auto& x : testutil::allInputs(3))
        CHECK(testutil::spanOracle(c, x) == (!(x[0] && x[1]) || x[2]));
}

TEST_CASE("random compositions") {
    int composed = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SpanProgram outer = randomSpanProgram(seed);
        const int k = outer.numInputs;
        std::vector<Inner> inners;
        std::vector<SpanProgram> progs;
        int n = 0;
        std::vector<int> offset;
        for (int i = 0; i < k; ++i) {
            SpanProgram in = randomSpanProgram(1000 + seed * 10 + std::uint64_t(i));
            if (in.numInputs > 2) in = majProgram();
            offset.push_back(n);
            n += in.numInputs;
            progs.push_back(in);
            inners.push_back(Inner{});
        }
        for (int i = 0; i < k; ++i) {
            std::vector<int> perm(progs[i].numInputs);
            for (int v = 0; v < progs[i].numInputs; ++v) perm[v] = offset[i] + v;
            inners[i] = Inner::of(relabel(progs[i], perm, std::vector<bool>(perm.size(), false), n));
        }
        if (n > 10) continue;
        SpanProgram c = composeSpanPrograms(outer, inners, n);
        ++composed;
        for (const auto& x : testutil::allInputs(n)) {
            Bits y(k);
            for (int i = 0; i < k; ++i) {
                Bits xi(x.begin() + offset[i], x.begin() + offset[i] + progs[i].numInputs);
                y[i] = testutil::spanOracle(progs[i], xi);
            }
            CHECK(testutil::spanOracle(c, x) == testutil::spanOracle(outer, y));
        }
    }
    CHECK(composed >= 5);
}

TEST_CASE("relabel with flips") {
    SpanProgram p = relabel(andProgram(2), {1, 0}, {true, false}, 2);
    for (const auto& x : testutil::allInputs(2)) CHECK(evaluateSpanProgram(p, x) == (!x[1] && x[0]));
}

TEST_CASE("grouped inputs expand to singletons") {
    SpanProgram p = andProgram(3);
    SpanProgram e = expandGroupedInputs(p);
    for (int j = 0; j < int(e.cols()); ++j) CHECK(e.X[j].size() <= 1);
    CHECK(truthTable(e) == truthTable(p));
}

TEST_CASE("json round trip") {
    SpanProgram p = randomSpanProgram(5);
    SpanProgram q = spanProgramFromJson(toJson(p));
    CHECK((q.A - p.A).norm() < 1e-15);
    CHECK((q.target - p.target).norm() < 1e-15);
    CHECK(q.numInputs == p.numInputs);
    CHECK(q.X.size() == p.X.size());
    for (std::size_t j = 0; j < p.X.size(); ++j) CHECK(q.X[j] == p.X[j]);
}
