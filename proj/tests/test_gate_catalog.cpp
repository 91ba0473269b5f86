#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "spanwalk/gate_catalog.hpp"

using namespace spanwalk;

namespace {

int bitOf(std::uint32_t table, int n, unsigned v) { return int((table >> ((1u << n) - 1 - v)) & 1u); }

// Smallest 16-bit table among all variable permutations, input flips and
// output negations; three-bit functions are padded with an ignored x4.
std::uint32_t bruteCanonical(std::uint32_t table, int n) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::uint32_t best = 0xFFFFFFFFu;
    do {
        for (unsigned flip = 0; flip < (1u << n); ++flip)
            for (int neg = 0; neg < 2; ++neg) {
                std::uint32_t g = 0;
                for (unsigned v = 0; v < (1u << n); ++v) {
                    unsigned y = 0;
                    for (int k = 0; k < n; ++k) {
                        int bit = int((v >> (n - 1 - perm[k])) & 1u) ^ int((flip >> k) & 1u);
                        y |= unsigned(bit) << (n - 1 - k);
                    }
                    if (bitOf(table, n, y) ^ neg) g |= 1u << ((1u << n) - 1 - v);
                }
                std::uint32_t g16 = g;
                if (n == 3) {
                    g16 = 0;
                    for (unsigned v = 0; v < 16; ++v)
                        if (bitOf(g, 3, v >> 1)) g16 |= 1u << (15 - v);
                }
                best = std::min(best, g16);
            }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace

TEST_CASE("canonical ids match an exhaustive search") {
    std::mt19937 rng(3);
    for (std::uint32_t t = 1; t < 255; ++t) CHECK(canonicalFunctionId(t, 3) == bruteCanonical(t, 3));
    for (int k = 0; k < 60; ++k) {
        std::uint32_t t = rng() & 0xFFFFu;
        CHECK(canonicalFunctionId(t, 4) == bruteCanonical(t, 4));
    }
}

TEST_CASE("three-bit catalog ids and bounds") {
    const std::map<std::uint32_t, double> adv{
        {255, 1.0}, {15, std::sqrt(2.0)}, {4080, 2.0}, {3, std::sqrt(3.0)}, {63, std::sqrt(3.0)},
        {975, 2.0}, {831, 2.0}, {960, 3.0 / std::sqrt(2.0)}, {963, 2.175328}, {60, std::sqrt(5.0)},
        {1020, 1.0 + std::sqrt(2.0)}, {828, std::sqrt(7.0)}, {15555, 3.0}};
    int seen = 0;
    for (const auto& e : threeBitGates()) {
        if (e.id == 0) continue;
        CatalogRow r = verifyEntry(e, 1.0);
        CHECK(bruteCanonical(r.programTable, e.arity) == e.id);
        REQUIRE(adv.count(e.id));
        CHECK(r.adv == doctest::Approx(adv.at(e.id)).epsilon(1e-6));
        CHECK(r.wsize == doctest::Approx(r.adv).epsilon(1e-9));
        CHECK(r.pass());
        ++seen;
    }
    CHECK(seen == int(adv.size()));
}

TEST_CASE("four-bit catalog ids and bounds") {
    const std::map<std::uint32_t, double> adv{
        {393, 4.0 / std::sqrt(3.0)}, {989, 1.0 + std::sqrt(2.0)}, {1968, std::sqrt(20.0 / 3.0)},
        {1910, std::sqrt(7.0)}, {317, std::sqrt(7.0)}, {5790, 3.0}, {385, 2.320776},
        {279, std::sqrt(6.0)}, {1639, std::sqrt(7.0)}, {6014, 2.0 * std::sqrt(2.0)},
        {278, std::sqrt(10.0)}, {5736, 2.0 * std::sqrt(3.0)}};
    for (const auto& e : fourBitEntries()) {
        if (e.parameterized) continue;
        CatalogRow r = verifyEntry(e, 1.0);
        CHECK(bruteCanonical(r.programTable, e.arity) == e.id);
        REQUIRE(adv.count(e.id));
        CHECK(r.adv == doctest::Approx(adv.at(e.id)).epsilon(1e-6));
        CHECK(r.pass());
    }
}

TEST_CASE("parameterized entries follow their cost curves") {
    auto find = [](std::uint32_t id) {
        for (const auto& e : fourBitEntries())
            if (e.parameterized && e.id == id) return e;
        FAIL("missing entry");
        return fourBitEntries().front();
    };
    for (double b : {0.5, 1.0, 2.0}) {
        CHECK(verifyEntry(find(831), b).wsize == doctest::Approx((b + std::sqrt(b * b + 8)) / 2));
        CHECK(verifyEntry(find(975), b).wsize == doctest::Approx(1 + b));
        double eq = b <= std::sqrt(0.4) ? b + std::sqrt(2 - b * b)
                    : b <= 2         ? std::sqrt(1.5 * (2 + b * b))
                                     : b + 1;
        CHECK(verifyEntry(find(960), b).wsize == doctest::Approx(eq));
        for (std::uint32_t id : {831u, 975u, 960u, 963u, 828u}) CHECK(verifyEntry(find(id), b).pass());
    }
}

TEST_CASE("transforms are found and reproduce the target") {
    std::mt19937 rng(5);
    auto ts = allTransforms(4);
    CHECK(ts.size() == 24u * 16u * 2u);
    for (int k = 0; k < 40; ++k) {
        std::uint32_t from = rng() & 0xFFFFu;
        const auto& t = ts[rng() % ts.size()];
        std::uint32_t to = applyTransform(from, 4, t);
        auto found = findTransform(from, to, 4);
        REQUIRE(found.has_value());
        CHECK(applyTransform(from, 4, *found) == to);
    }
    CHECK_FALSE(findTransform(23, 1, 3).has_value());
}

TEST_CASE("sensitivity certificates") {
    CHECK(certificateRatio(sensitivityCertificate(0b0001, 2), 0b0001) == doctest::Approx(std::sqrt(2.0)));
    CHECK(certificateRatio(sensitivityCertificate(105, 3), 105) == doctest::Approx(3.0));
    CHECK(certificateRatio(sensitivityCertificate(0b01, 1), 0b01) == doctest::Approx(1.0));
}

TEST_CASE("certificates pairing equal values are rejected") {
    auto c = makeCertificate(2, {"00"}, {"01"}, {{1.0}});
    CHECK_THROWS(certificateRatio(c, 0b0001));
}

TEST_CASE("transformed certificates keep their ratio") {
    auto c = sensitivityCertificate(23, 3);
    const double base = certificateRatio(c, 23);
    for (const auto& t : allTransforms(3)) {
        std::uint32_t to = applyTransform(23, 3, t);
        CHECK(certificateRatio(transformCertificate(c, t), to) == doctest::Approx(base));
    }
}

TEST_CASE("formula programs compute the formula") {
    const char* texts[] = {"TT3:31(x1,x2,x3)", "TT3:193(x1,x2,x3)", "TT3:30(x1,x2,x3)",
                           "NOT(MAJ(x1,x2,x3))", "MAJ(x1,NOT(x2),x3)", "TT4:20483(x1,x2,x3,x4)",
                           "AND(OR(x1,x2),OR(x3,x4))", "EQUAL(x1,x2,x3)"};
    for (const char* s : texts) {
        Formula f = parseFormula(s);
        SpanProgram p = formulaProgram(f);
        for (const auto& x : testutil::allInputs(f.numInputs))
            CHECK(testutil::spanOracle(p, x) == evaluateClassically(f, x));
    }
}

TEST_CASE("tree witness size of a direct tree") {
    CHECK(treeWitnessSize(directTree(majProgram()), {1, 1, 1}) == doctest::Approx(2.0));
    Formula f = parseFormula("MAJ(MAJ(x1,x2,x3),MAJ(x4,x5,x6),MAJ(x7,x8,x9))");
    CHECK(treeWitnessSize(formulaTree(f), std::vector<double>(9, 1.0)) == doctest::Approx(4.0));
}
