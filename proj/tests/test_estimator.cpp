#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "helpers.hpp"
#include "spanwalk/estimator.hpp"

using namespace spanwalk;

namespace {

double binomialAbove(double p, double thr, int n) {
    double s = 0;
    for (int k = 0; k <= n; ++k) {
        if (!(double(k) / n > thr)) continue;
        double c = 1;
        for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
        s += c * std::pow(p, k) * std::pow(1 - p, n - k);
    }
    return s;
}

PhaseSpectrum pointSpectrum(double theta) {
    PhaseSpectrum s;
    s.theta = VectorXd::Constant(1, theta);
    s.weight = VectorXd::Ones(1);
    return s;
}

}  // namespace

TEST_CASE("query schedule") {
    PhaseEstimationConfig pe;
    pe.deltaP = 2 * M_PI / 8;  // ceil(log2(8)) = 3
    pe.padding = 0;
    CHECK(pe.ancillaBits() == 3);
    CHECK(querySchedule(pe) == 7);
    pe.repetitions = 5;
    CHECK(querySchedule(pe) == 35);
    pe.padding = 2;
    pe.repetitions = 1;
    CHECK(querySchedule(pe) == 31);
}

TEST_CASE("phase kernel") {
    CHECK(phaseKernel(0.0, 16) == doctest::Approx(1.0));
    CHECK(phaseKernel(2 * M_PI / 16, 16) == doctest::Approx(0.0).epsilon(1e-12));
    for (double theta : {0.0, 0.1, 1.3, -2.9}) {
        const std::int64_t M = 32;
        double sum = 0;
        for (std::int64_t m = 0; m < M; ++m) sum += phaseKernel(theta - 2 * M_PI * double(m) / double(M), M);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        // Direct sum of the geometric series.
        cd z = 0;
        for (std::int64_t k = 0; k < M; ++k) z += std::exp(cd(0, double(k) * theta));
        CHECK(phaseKernel(theta, M) == doctest::Approx(std::norm(z / double(M))).epsilon(1e-10));
    }
}

TEST_CASE("acceptance window") {
    PhaseEstimationConfig pe;
    pe.deltaP = 0.2;
    pe.padding = 1;
    const std::int64_t M = std::int64_t(1) << pe.ancillaBits();
    auto win = acceptanceWindow(pe);
    for (std::int64_t m = 0; m < M; ++m) {
        const double phi = 2 * M_PI * double(m) / double(M);
        const double d = std::min({phi, std::abs(phi - M_PI), 2 * M_PI - phi});
        const bool in = std::find(win.begin(), win.end(), m) != win.end();
        CHECK(in == (d <= pe.deltaP));
    }
}

TEST_CASE("eigenphase zero is always accepted") {
    PhaseEstimationConfig pe;
    pe.deltaP = 0.3;
    CHECK(acceptanceProbability(pointSpectrum(0.0), pe) == doctest::Approx(1.0));
    CHECK(acceptanceProbability(pointSpectrum(M_PI), pe) == doctest::Approx(1.0));
    CHECK(acceptanceProbability(pointSpectrum(M_PI / 2), pe) < 0.05);
}

TEST_CASE("parallel and serial acceptance agree") {
    PhaseSpectrum s;
    s.theta = VectorXd::LinSpaced(40, -3.0, 3.1);
    s.weight = VectorXd::Constant(40, 1.0 / 40);
    for (int pad : {0, 2, 5}) {
        PhaseEstimationConfig pe;
        pe.deltaP = 0.05;
        pe.padding = pad;
        CHECK(acceptanceProbability(s, pe) == doctest::Approx(acceptanceProbabilitySerial(s, pe)).epsilon(1e-13));
    }
}

TEST_CASE("sampling is seeded and close to the analytic value") {
    PhaseSpectrum s;
    s.theta = VectorXd(3);
    s.theta << 0.0, 0.4, -1.2;
    s.weight = VectorXd(3);
    s.weight << 0.5, 0.3, 0.2;
    PhaseEstimationConfig pe;
    pe.deltaP = 0.1;
    const double p = acceptanceProbability(s, pe);
    const int shots = 20000;
    double a = sampledAcceptance(s, pe, shots, 42), b = sampledAcceptance(s, pe, shots, 42);
    CHECK(a == b);
    CHECK(std::abs(a - p) < 5 * std::sqrt(p * (1 - p) / shots) + 1e-12);
}

TEST_CASE("block success is a binomial tail") {
    CHECK(blockSuccess(0.7, 0.5, 1, true) == doctest::Approx(0.7));
    CHECK(blockSuccess(0.7, 0.5, 1, false) == doctest::Approx(0.3));
    for (int n : {3, 7, 20})
        CHECK(blockSuccess(0.62, 0.5, n, true) == doctest::Approx(binomialAbove(0.62, 0.5, n)).epsilon(1e-12));
}

TEST_CASE("false inputs lose acceptance as precision grows") {
    EstimatorConfig cfg;
    cfg.padding = 0;
    PreparedFormula p = prepareFormula(parseFormula("MAJ(x1,x2,x3)"), cfg);
    for (const auto& x : testutil::allInputs(3)) {
        if (evaluateClassically(p.formula, x)) continue;
        WalkOperator wx = applyOracle(p.walk, x);
        PhaseSpectrum s = startStateSpectrum(wx);
        CHECK(s.weight.sum() == doctest::Approx(1.0));
        double prev = 2.0;
        for (int pad : {0, 2, 4}) {
            PhaseEstimationConfig pe = p.pe;
            pe.padding = pad;
            double a = acceptanceProbability(s, pe);
            CHECK(a <= prev + 1e-12);
            prev = a;
        }
        CHECK(prev < 0.2);
    }
}

TEST_CASE("MAJ is evaluated correctly with the checked-in settings") {
    EstimatorConfig cfg = loadDefaultConfig();
    PreparedFormula p = prepareFormula(parseFormula("MAJ(x1,x2,x3)"), cfg);
    auto par = evaluateAll(p, cfg);
    auto ser = evaluateAllSerial(p, cfg);
    REQUIRE(par.size() == 8);
    REQUIRE(ser.size() == 8);
    for (std::size_t k = 0; k < par.size(); ++k) {
        CHECK(par[k].x == ser[k].x);
        CHECK(par[k].pAccept == doctest::Approx(ser[k].pAccept).epsilon(1e-12));
        CHECK(par[k].correct());
        CHECK(par[k].queries == querySchedule(p.pe));
    }
    auto j = toJson(par[0]);
    for (const char* key : {"formula", "x", "decision", "pAccept", "queries", "advPhi"}) CHECK(j.contains(key));
}

TEST_CASE("config round trip and validation") {
    EstimatorConfig c;
    c.epsW = 0.15;
    c.eps = 0.05;
    c.threshold = 0.4;
    c.padding = 2;
    c.seed = 99;
    c.format = "json";
    c.lambdaProbe = {1e-2};
    EstimatorConfig d = configFromJson(toJson(c));
    CHECK(d.epsW == c.epsW);
    CHECK(d.eps == c.eps);
    CHECK(d.threshold == c.threshold);
    CHECK(d.padding == c.padding);
    CHECK(d.seed == c.seed);
    CHECK(d.format == c.format);
    CHECK(d.lambdaProbe == c.lambdaProbe);

    auto path = (std::filesystem::temp_directory_path() / "spanwalk_cfg_test.json").string();
    saveConfig(c, path);
    CHECK(loadConfig(path).eps == c.eps);
    std::remove(path.c_str());
    CHECK(loadConfig(path + ".missing").eps == EstimatorConfig{}.eps);

    nlohmann::json bad = toJson(c);
    bad["deltaE"] = 0.7;
    CHECK_THROWS_AS(configFromJson(bad), std::invalid_argument);
    bad = toJson(c);
    bad["format"] = "xml";
    CHECK_THROWS_AS(configFromJson(bad), std::invalid_argument);
}

TEST_CASE("unequal children need a cost-weighted gate form") {
    CHECK_THROWS_AS(prepareFormula(parseFormula("EQUAL(x1,x2,AND(x3,x4))"), EstimatorConfig{}),
                    std::invalid_argument);
    PreparedFormula p = prepareFormula(parseFormula("MAJ(x1,x2,MAJ(x3,x4,x5))"), loadDefaultConfig());
    CHECK(p.advPhi == doctest::Approx(1 + std::sqrt(3.0)));
    for (const auto& r : evaluateAll(p, loadDefaultConfig())) CHECK(r.correct());
}
