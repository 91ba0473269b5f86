#include "spanwalk/estimator.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "spanwalk/gate_catalog.hpp"

#ifndef SPANWALK_SOURCE_DIR
#define SPANWALK_SOURCE_DIR "."
#endif

namespace spanwalk {

using std::numbers::pi;

int PhaseEstimationConfig::ancillaBits() const {
    if (!(deltaP > 0)) throw std::invalid_argument("phase precision must be positive");
    return int(std::ceil(std::log2(2 * pi / deltaP))) + padding;
}

std::int64_t querySchedule(const PhaseEstimationConfig& cfg) {
    const int t = cfg.ancillaBits();
    if (t >= 62) throw std::overflow_error("too many ancilla bits");
    return ((std::int64_t(1) << t) - 1) * cfg.repetitions;
}

// ---- config ---------------------------------------------------------------------

nlohmann::json toJson(const EstimatorConfig& c) {
    return {{"epsW", c.epsW},         {"eps", c.eps},
            {"deltaE", c.deltaE},     {"threshold", c.threshold},
            {"padding", c.padding},   {"repetitions", c.repetitions},
            {"kernelTol", c.kernelTol}, {"rankTol", c.rankTol},
            {"lambdaProbe", c.lambdaProbe}, {"seed", c.seed},
            {"format", c.format},     {"fullSpace", c.fullSpace},
            {"calibration", c.calibration}};
}

EstimatorConfig configFromJson(const nlohmann::json& j) {
    EstimatorConfig c;
    c.epsW = j.value("epsW", c.epsW);
    c.eps = j.value("eps", c.eps);
    c.deltaE = j.value("deltaE", c.deltaE);
    c.threshold = j.value("threshold", c.threshold);
    c.padding = j.value("padding", c.padding);
    c.repetitions = j.value("repetitions", c.repetitions);
    c.kernelTol = j.value("kernelTol", c.kernelTol);
    c.rankTol = j.value("rankTol", c.rankTol);
    c.lambdaProbe = j.value("lambdaProbe", c.lambdaProbe);
    c.seed = j.value("seed", c.seed);
    c.format = j.value("format", c.format);
    c.fullSpace = j.value("fullSpace", c.fullSpace);
    if (j.contains("calibration")) c.calibration = j["calibration"];
    if (!(c.epsW > 0 && c.eps > 0 && c.kernelTol > 0 && c.rankTol > 0))
        throw std::invalid_argument("config tolerances and weights must be positive");
    if (!(c.deltaE > 0 && c.deltaE < 0.5)) throw std::invalid_argument("deltaE must lie in (0, 1/2)");
    if (c.repetitions < 1 || c.padding < 0) throw std::invalid_argument("bad repetitions or padding");
    if (c.format != "table" && c.format != "json" && c.format != "dot")
        throw std::invalid_argument("format must be table, json or dot");
    return c;
}

std::string defaultConfigPath() {
    if (const char* env = std::getenv("SPANWALK_CONFIG"); env && *env) return env;
    return std::string(SPANWALK_SOURCE_DIR) + "/config/spanwalk.json";
}

EstimatorConfig loadConfig(const std::string& path) {
    std::ifstream in(path);
    if (!in) return EstimatorConfig{};
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("malformed config " + path + ": " + e.what());
    }
    return configFromJson(j);
}

EstimatorConfig loadDefaultConfig() { return loadConfig(defaultConfigPath()); }

void saveConfig(const EstimatorConfig& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << toJson(c).dump(2) << "\n";
}

// ---- phase estimation --------------------------------------------------------------

PhaseSpectrum startStateSpectrum(const WalkOperator& wx) {
    const int s = wx.startIndex();
    if (s < 0) throw std::invalid_argument("initial state |aO,bO> is not in the walk basis");
    // Ux is normal, so its Schur form is diagonal and the Schur vectors are eigenvectors.
    Eigen::ComplexSchur<MatrixXcd> cs(wx.Ux, true);
    const MatrixXcd& Z = cs.matrixU();
    PhaseSpectrum out;
    const Eigen::Index n = Z.cols();
    out.theta.resize(n);
    out.weight.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.theta(k) = std::arg(cs.matrixT()(k, k));
        out.weight(k) = std::norm(Z(s, k));
    }
    return out;
}

double phaseKernel(double phi, std::int64_t M) {
    const double half = std::remainder(phi, 2 * pi) / 2;
    const double den = std::sin(half);
    if (std::abs(den) < 1e-14) return 1.0;
    const double r = std::sin(double(M) * half) / (double(M) * den);
    return r * r;
}

std::vector<std::int64_t> acceptanceWindow(const PhaseEstimationConfig& cfg) {
    const int t = cfg.ancillaBits();
    const std::int64_t M = std::int64_t(1) << t;
    // Outcomes near 0 and near M/2; the window holds O(2^padding) of them.
    const std::int64_t reach = std::int64_t(std::floor(cfg.deltaP * double(M) / (2 * pi))) + 1;
    std::vector<std::int64_t> out;
    for (std::int64_t centre : {std::int64_t(0), M / 2})
        for (std::int64_t d = -reach; d <= reach; ++d) {
            const std::int64_t m = ((centre + d) % M + M) % M;
            const double phase = 2 * pi * double(m) / double(M);
            const double dist = std::min({phase, std::abs(phase - pi), 2 * pi - phase});
            if (dist <= cfg.deltaP + 1e-15 && std::find(out.begin(), out.end(), m) == out.end())
                out.push_back(m);
        }
    std::sort(out.begin(), out.end());
    return out;
}

double acceptanceProbabilitySerial(const PhaseSpectrum& s, const PhaseEstimationConfig& cfg) {
    const std::int64_t M = std::int64_t(1) << cfg.ancillaBits();
    const auto window = acceptanceWindow(cfg);
    double p = 0.0;
    for (Eigen::Index k = 0; k < s.theta.size(); ++k) {
        double q = 0.0;
        for (std::int64_t m : window) q += phaseKernel(s.theta(k) - 2 * pi * double(m) / double(M), M);
        p += s.weight(k) * q;
    }
    return std::clamp(p, 0.0, 1.0);
}

double acceptanceProbability(const PhaseSpectrum& s, const PhaseEstimationConfig& cfg) {
    const std::int64_t M = std::int64_t(1) << cfg.ancillaBits();
    const auto window = acceptanceWindow(cfg);
    const long long n = s.theta.size();
    double p = 0.0;
#pragma omp parallel for reduction(+ : p)
    for (long long k = 0; k < n; ++k) {
        double q = 0.0;
        for (std::int64_t m : window) q += phaseKernel(s.theta(k) - 2 * pi * double(m) / double(M), M);
        p += s.weight(k) * q;
    }
    return std::clamp(p, 0.0, 1.0);
}

double acceptanceProbability(const WalkOperator& wx, const PhaseEstimationConfig& cfg) {
    return acceptanceProbability(startStateSpectrum(wx), cfg);
}

double sampledAcceptance(const PhaseSpectrum& s, const PhaseEstimationConfig& cfg, int shots,
                         std::uint64_t seed) {
    if (shots <= 0) throw std::invalid_argument("shots must be positive");
    const std::int64_t M = std::int64_t(1) << cfg.ancillaBits();
    if (M > (std::int64_t(1) << 20)) throw std::invalid_argument("ancilla register too large to sample");
    const auto window = acceptanceWindow(cfg);
    std::vector<bool> accept(std::size_t(M), false);
    for (auto m : window) accept[std::size_t(m)] = true;
    std::mt19937_64 rng(seed);
    std::discrete_distribution<Eigen::Index> pickComponent(s.weight.data(), s.weight.data() + s.weight.size());
    // Outcome distributions are built lazily per eigencomponent.
    std::vector<std::optional<std::discrete_distribution<std::int64_t>>> outcome(std::size_t(s.theta.size()));
    int hits = 0;
    for (int k = 0; k < shots; ++k) {
        const Eigen::Index c = pickComponent(rng);
        auto& dist = outcome[std::size_t(c)];
        if (!dist) {
            std::vector<double> w(static_cast<std::size_t>(M));
            for (std::int64_t m = 0; m < M; ++m)
                w[std::size_t(m)] = phaseKernel(s.theta(c) - 2 * pi * double(m) / double(M), M);
            dist.emplace(w.begin(), w.end());
        }
        if (accept[std::size_t((*dist)(rng))]) ++hits;
    }
    return double(hits) / shots;
}

double blockSuccess(double pAccept, double threshold, int reps, bool expectTrue) {
    // P[#accepts / reps > threshold] from the binomial distribution.
    double above = 0.0;
    for (int k = 0; k <= reps; ++k) {
        if (!(double(k) / reps > threshold)) continue;
        const double logC = std::lgamma(reps + 1.0) - std::lgamma(k + 1.0) - std::lgamma(reps - k + 1.0);
        const double a = k == 0 ? 0.0 : k * std::log(pAccept);
        const double b = reps - k == 0 ? 0.0 : (reps - k) * std::log1p(-pAccept);
        above += std::exp(logC + a + b);
    }
    above = std::clamp(above, 0.0, 1.0);
    return expectTrue ? above : 1.0 - above;
}

// ---- pipeline ---------------------------------------------------------------------

PreparedFormula prepareFormula(const Formula& f, const EstimatorConfig& cfg) {
    PreparedFormula p;
    p.formula = f;
    p.text = printFormula(f);
    p.advPhi = nodeAdv(f.root);
    const SpanProgram prog = formulaProgram(f);
    p.graph = reweightOutput(buildGadgetGraph(prog), p.advPhi, cfg.epsW);
    p.delta = deltaDecompose(p.graph);
    p.walk = buildWalk(p.graph, p.delta, cfg.fullSpace);
    p.pe.deltaP = std::asin(std::min(1.0, cfg.eps / (p.delta.normAPrime * p.advPhi)));
    p.pe.deltaE = cfg.deltaE;
    p.pe.padding = cfg.padding;
    p.pe.repetitions = cfg.repetitions;
    return p;
}

EvaluationResult evaluatePrepared(const PreparedFormula& p, const Bits& x, const EstimatorConfig& cfg) {
    if (int(x.size()) != p.formula.numInputs)
        throw std::invalid_argument("input has " + std::to_string(x.size()) + " bits, formula needs " +
                                    std::to_string(p.formula.numInputs));
    const WalkOperator wx = applyOracle(p.walk, x);
    const PhaseSpectrum s = startStateSpectrum(wx);
    EvaluationResult r;
    r.formula = p.text;
    r.x = bitsToString(x);
    r.classical = evaluateClassically(p.formula, x);
    r.pAccept = acceptanceProbabilitySerial(s, p.pe);
    r.decision = r.pAccept > cfg.threshold;
    r.queries = querySchedule(p.pe);
    r.advPhi = p.advPhi;
    r.ancillaBits = p.pe.ancillaBits();
    r.deltaP = p.pe.deltaP;
    r.blockSuccess = blockSuccess(r.pAccept, cfg.threshold, p.pe.repetitions, r.classical);
    for (Eigen::Index k = 0; k < s.theta.size(); ++k)
        if (s.weight(k) > 1e-6) r.components.push_back({s.theta(k), s.weight(k)});
    std::sort(r.components.begin(), r.components.end(),
              [](const EigenComponent& a, const EigenComponent& b) { return a.weight > b.weight; });
    return r;
}

EvaluationResult evaluateFormula(const Formula& f, const Bits& x, const EstimatorConfig& cfg) {
    return evaluatePrepared(prepareFormula(f, cfg), x, cfg);
}

std::vector<EvaluationResult> evaluateAllSerial(const PreparedFormula& p, const EstimatorConfig& cfg) {
    const int n = p.formula.numInputs;
    if (n > 20) throw std::invalid_argument("too many inputs to enumerate");
    std::vector<EvaluationResult> out;
    for (std::uint64_t v = 0; v < (std::uint64_t(1) << n); ++v)
        out.push_back(evaluatePrepared(p, bitsFromIndex(v, n), cfg));
    return out;
}

std::vector<EvaluationResult> evaluateAll(const PreparedFormula& p, const EstimatorConfig& cfg) {
    const int n = p.formula.numInputs;
    if (n > 20) throw std::invalid_argument("too many inputs to enumerate");
    const long long N = 1LL << n;
    std::vector<EvaluationResult> out(static_cast<std::size_t>(N));
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (long long v = 0; v < N; ++v) {
        try {
            out[std::size_t(v)] = evaluatePrepared(p, bitsFromIndex(std::uint64_t(v), n), cfg);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return out;
}

nlohmann::json toJson(const EvaluationResult& r, bool diagnostics) {
    nlohmann::json j = {{"formula", r.formula}, {"x", r.x},           {"decision", r.decision},
                        {"pAccept", r.pAccept}, {"queries", r.queries}, {"advPhi", r.advPhi}};
    if (diagnostics) {
        j["classical"] = r.classical;
        j["ancillaBits"] = r.ancillaBits;
        j["deltaP"] = r.deltaP;
        j["blockSuccess"] = r.blockSuccess;
        nlohmann::json c = nlohmann::json::array();
        for (const auto& e : r.components) c.push_back({{"theta", e.theta}, {"weight", e.weight}});
        j["components"] = c;
    }
    return j;
}

// ---- calibration ----------------------------------------------------------------

CaseSummary spectralSummary(const PreparedFormula& p) {
    CaseSummary c;
    c.formula = p.text;
    c.advPhi = p.advPhi;
    c.minGapTimesAdv = std::numeric_limits<double>::infinity();
    c.minTrueSupport = std::numeric_limits<double>::infinity();
    const int n = p.formula.numInputs;
    for (std::uint64_t v = 0; v < (std::uint64_t(1) << n); ++v) {
        const Bits x = bitsFromIndex(v, n);
        const SpectrumReport s = spectrumReport(applyInput(p.graph, x));
        if (evaluateClassically(p.formula, x)) {
            c.minTrueSupport = std::min(c.minTrueSupport, s.supportA);
        } else if (s.gapWitness) {
            c.minGapTimesAdv = std::min(c.minGapTimesAdv, *s.gapWitness * p.advPhi);
        }
    }
    return c;
}

std::vector<std::string> defaultCalibrationSuite() {
    std::vector<std::string> suite{"MAJ(x1,x2,x3)",
                                   "MAJ(MAJ(x1,x2,x3),MAJ(x4,x5,x6),MAJ(x7,x8,x9))"};
    auto tableOf = [](const CatalogEntry& e) {
        const SpanProgram p = flatten(e.program(1.0), e.arity);
        std::uint32_t t = 0;
        for (std::uint64_t v = 0; v < (std::uint64_t(1) << e.arity); ++v)
            if (evaluateSpanProgram(p, bitsFromIndex(v, e.arity)))
                t |= std::uint32_t(1) << ((1u << e.arity) - 1 - v);
        return t;
    };
    for (const auto& e : threeBitGates()) {
        if (!e.program) continue;
        suite.push_back("TT3:" + std::to_string(tableOf(e)) + "(x1,x2,x3)");
    }
    for (const auto& e : fourBitEntries()) {
        if (e.parameterized) continue;
        suite.push_back("TT4:" + std::to_string(tableOf(e)) + "(x1,x2,x3,x4)");
    }
    return suite;
}

CalibrationResult calibrate(const std::vector<std::string>& suite, const EstimatorConfig& base,
                            const CalibrationOptions& opt) {
    if (suite.empty() || opt.epsWSweep.empty() || opt.gapFractionSweep.empty() || opt.paddingSweep.empty())
        throw std::invalid_argument("empty calibration sweep");
    CalibrationResult best;
    bool bestFeasible = false;
    double bestMargin = -std::numeric_limits<double>::infinity();
    std::int64_t bestQueries = std::numeric_limits<std::int64_t>::max();
    nlohmann::json sweep = nlohmann::json::array();
    nlohmann::json bestCases;
    for (double epsW : opt.epsWSweep) {
        EstimatorConfig cfg = base;
        cfg.epsW = epsW;
        std::vector<PreparedFormula> prepared;
        std::vector<CaseSummary> cases;
        double minGap = std::numeric_limits<double>::infinity();
        for (const auto& text : suite) {
            prepared.push_back(prepareFormula(parseFormula(text), cfg));
            cases.push_back(spectralSummary(prepared.back()));
            minGap = std::min(minGap, cases.back().minGapTimesAdv);
        }
        if (!std::isfinite(minGap)) throw std::runtime_error("calibration suite has no false input");

        // The walk spectra do not depend on eps or the padding.
        std::vector<std::vector<PhaseSpectrum>> spectra(prepared.size());
        std::vector<std::vector<bool>> truth(prepared.size());
        for (std::size_t k = 0; k < prepared.size(); ++k) {
            const PreparedFormula& p = prepared[k];
            const int n = p.formula.numInputs;
            const long long N = 1LL << n;
            spectra[k].resize(static_cast<std::size_t>(N));
            truth[k].resize(static_cast<std::size_t>(N));
#pragma omp parallel for schedule(dynamic)
            for (long long v = 0; v < N; ++v) {
                const Bits x = bitsFromIndex(std::uint64_t(v), n);
                spectra[k][std::size_t(v)] = startStateSpectrum(applyOracle(p.walk, x));
                truth[k][std::size_t(v)] = evaluateClassically(p.formula, x);
            }
        }

        for (double fraction : opt.gapFractionSweep)
            for (int padding : opt.paddingSweep) {
                cfg.eps = fraction * minGap;
                cfg.padding = padding;
                double completeness = 1.0, soundness = 0.0;
                std::int64_t queries = 0;
                nlohmann::json perCase = nlohmann::json::array();
                for (std::size_t k = 0; k < prepared.size(); ++k) {
                    PhaseEstimationConfig pe = prepared[k].pe;
                    pe.deltaP = std::asin(std::min(1.0, cfg.eps / (prepared[k].delta.normAPrime * prepared[k].advPhi)));
                    pe.padding = padding;
                    CaseSummary& c = cases[k];
                    c.completeness = 1.0;
                    c.soundness = 0.0;
                    for (std::size_t v = 0; v < spectra[k].size(); ++v) {
                        const double pa = acceptanceProbability(spectra[k][v], pe);
                        if (truth[k][v]) c.completeness = std::min(c.completeness, pa);
                        else c.soundness = std::max(c.soundness, pa);
                    }
                    c.queries = querySchedule(pe);
                    queries += c.queries;
                    completeness = std::min(completeness, c.completeness);
                    soundness = std::max(soundness, c.soundness);
                    perCase.push_back({{"formula", c.formula},
                                       {"advPhi", c.advPhi},
                                       {"minGapTimesAdv", c.minGapTimesAdv},
                                       {"minTrueSupport", c.minTrueSupport},
                                       {"completeness", c.completeness},
                                       {"soundness", c.soundness},
                                       {"queries", c.queries}});
                }
                const double margin = completeness - soundness;
                sweep.push_back({{"epsW", epsW},
                                 {"gapFraction", fraction},
                                 {"padding", padding},
                                 {"eps", cfg.eps},
                                 {"completeness", completeness},
                                 {"soundness", soundness},
                                 {"margin", margin},
                                 {"totalQueries", queries}});
                const bool feasible = margin >= opt.minMargin;
                bool better;
                if (feasible != bestFeasible) better = feasible;
                else if (feasible) better = queries < bestQueries || (queries == bestQueries && margin > bestMargin);
                else better = margin > bestMargin;
                if (better) {
                    bestFeasible = feasible;
                    bestMargin = margin;
                    bestQueries = queries;
                    best.config = cfg;
                    best.config.threshold = 0.5 * (completeness + soundness);
                    best.cases = cases;
                    bestCases = perCase;
                }
            }
    }
    best.sweep = sweep;
    best.config.calibration = {{"suite", suite},
                               {"minMargin", opt.minMargin},
                               {"selected", {{"epsW", best.config.epsW},
                                             {"eps", best.config.eps},
                                             {"padding", best.config.padding},
                                             {"margin", bestMargin},
                                             {"totalQueries", bestQueries}}},
                               {"cases", bestCases},
                               {"sweep", sweep}};
    return best;
}

}  // namespace spanwalk
