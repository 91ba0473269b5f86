#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "spanwalk/formula.hpp"
#include "spanwalk/gadget_graph.hpp"
#include "spanwalk/szegedy_walk.hpp"

namespace spanwalk {

struct PhaseEstimationConfig {
    double deltaP = 0.1;   // precision in radians
    double deltaE = 0.1;   // error rate
    int padding = 1;       // extra ancilla bits beyond ceil(log2(2 pi / deltaP))
    int repetitions = 1;

    int ancillaBits() const;
};

// (2^t - 1) controlled-Ux applications per run, times repetitions.
std::int64_t querySchedule(const PhaseEstimationConfig& cfg);

struct EstimatorConfig {
    double epsW = 0.2;        // output edge weight is epsW / sqrt(ADV)
    double eps = 0.07;        // spectral gap constant; deltaP = asin(eps / (|A'| ADV))
    double deltaE = 0.1;
    double threshold = 0.5;   // decision threshold on the acceptance probability
    int padding = 1;
    int repetitions = 1;
    double kernelTol = 1e-8;
    double rankTol = 1e-10;
    std::vector<double> lambdaProbe{1e-3, 1e-4, 1e-5};
    std::uint64_t seed = 1;
    std::string format = "table";
    bool fullSpace = false;
    nlohmann::json calibration;  // sweep data the defaults were chosen from
};

nlohmann::json toJson(const EstimatorConfig& c);
EstimatorConfig configFromJson(const nlohmann::json& j);
// Path from SPANWALK_CONFIG, else the checked-in config/spanwalk.json.
std::string defaultConfigPath();
// Built-in defaults when the file is missing; throws on a malformed file.
EstimatorConfig loadConfig(const std::string& path);
EstimatorConfig loadDefaultConfig();
void saveConfig(const EstimatorConfig& c, const std::string& path);

// Eigenphases theta_k of Ux and the weights |<psi_k|aO,bO>|^2.
struct PhaseSpectrum {
    VectorXd theta;   // in (-pi, pi]
    VectorXd weight;  // sums to 1
};

PhaseSpectrum startStateSpectrum(const WalkOperator& wx);

// |(1/M) sum_k e^{i k phi}|^2.
double phaseKernel(double phi, std::int64_t M);

// Outcomes m with dist(2 pi m / M, {0, pi}) <= deltaP.
std::vector<std::int64_t> acceptanceWindow(const PhaseEstimationConfig& cfg);

double acceptanceProbability(const PhaseSpectrum& s, const PhaseEstimationConfig& cfg);
double acceptanceProbabilitySerial(const PhaseSpectrum& s, const PhaseEstimationConfig& cfg);
double acceptanceProbability(const WalkOperator& wx, const PhaseEstimationConfig& cfg);

// Seeded Monte-Carlo: fraction of `shots` simulated runs that land in the window.
double sampledAcceptance(const PhaseSpectrum& s, const PhaseEstimationConfig& cfg, int shots,
                         std::uint64_t seed);

// Probability that the accept frequency over `reps` runs lands on the correct
// side of the threshold.
double blockSuccess(double pAccept, double threshold, int reps, bool expectTrue);

struct PreparedFormula {
    Formula formula;
    std::string text;
    double advPhi = 0.0;
    GadgetGraph graph;  // reweighted output edge
    DeltaDecomposition delta;
    WalkOperator walk;
    PhaseEstimationConfig pe;
};

// Composes catalog programs, builds and reweights the graph, lifts to the walk.
// ADV(phi) is the cost-weighted bound, so a gate with unequal children is
// accepted when the catalog has a cost-weighted form for it (MAJ, AND, OR,
// PARITY).  Throws std::invalid_argument otherwise and on catalog misses.
PreparedFormula prepareFormula(const Formula& f, const EstimatorConfig& cfg);

struct EigenComponent {
    double theta = 0.0;
    double weight = 0.0;
};

struct EvaluationResult {
    std::string formula;
    std::string x;
    bool decision = false;
    bool classical = false;
    double pAccept = 0.0;
    std::int64_t queries = 0;
    double advPhi = 0.0;
    int ancillaBits = 0;
    double deltaP = 0.0;
    double blockSuccess = 0.0;
    std::vector<EigenComponent> components;  // start-state weight above 1e-6

    bool correct() const { return decision == classical; }
};

EvaluationResult evaluatePrepared(const PreparedFormula& p, const Bits& x, const EstimatorConfig& cfg);
EvaluationResult evaluateFormula(const Formula& f, const Bits& x, const EstimatorConfig& cfg);

// Every input in index order.
std::vector<EvaluationResult> evaluateAll(const PreparedFormula& p, const EstimatorConfig& cfg);
std::vector<EvaluationResult> evaluateAllSerial(const PreparedFormula& p, const EstimatorConfig& cfg);

nlohmann::json toJson(const EvaluationResult& r, bool diagnostics = false);

// ---- calibration --------------------------------------------------------------

struct CaseSummary {
    std::string formula;
    double advPhi = 0.0;
    double minGapTimesAdv = 0.0;   // over false inputs, inf if none
    double minTrueSupport = 0.0;   // |aO|^2 in the kernel, over true inputs
    double completeness = 1.0;     // min pAccept over true inputs
    double soundness = 0.0;        // max pAccept over false inputs
    std::int64_t queries = 0;
};

struct CalibrationOptions {
    std::vector<double> epsWSweep{0.05, 0.1, 0.2};
    std::vector<double> gapFractionSweep{0.5, 0.6, 0.7, 0.8, 0.9};  // eps = fraction * min gap * ADV
    std::vector<int> paddingSweep{0, 1, 2};
    double minMargin = 0.5;  // sweep points below this worst-case margin are not selected
};

struct CalibrationResult {
    EstimatorConfig config;
    std::vector<CaseSummary> cases;
    nlohmann::json sweep;
};

// Spectral quantities of one formula that do not depend on eps.
CaseSummary spectralSummary(const PreparedFormula& p);

// Sweeps epsW, the gap fraction and the padding.  Among points whose worst
// margin reaches minMargin it keeps the one with the fewest total queries
// (ties to the larger margin); the threshold sits midway between worst
// completeness and worst soundness.
CalibrationResult calibrate(const std::vector<std::string>& suite, const EstimatorConfig& base,
                            const CalibrationOptions& opt = {});

std::vector<std::string> defaultCalibrationSuite();

}  // namespace spanwalk
