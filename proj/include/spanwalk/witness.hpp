#pragma once

#include <vector>

#include "json.hpp"
#include "spanwalk/formula.hpp"
#include "spanwalk/spanprog.hpp"

namespace spanwalk {

// Subformula complexity per input variable (all ones by default).
using ComplexityVector = std::vector<double>;

// Per-column grouped complexity G_j(x).
VectorXd groupedComplexity(const SpanProgram& p, const Bits& x, const ComplexityVector& u);

struct WitnessReport {
    bool trueCase = false;
    double value = 0.0;        // primary closed form
    double altValue = 0.0;     // second, independent closed form
    VectorXcd witness;         // |J| entries when true, rows() entries when false
    double residual = 0.0;     // feasibility residual of the witness
};

// Witness size at x.  Throws if the two closed forms disagree beyond `agreeTol`
// or if the rank test and the witness constraints disagree.  The target must
// lie in the span of all input vectors (otherwise f is constant false).
WitnessReport witnessSize(const SpanProgram& p, const Bits& x, const ComplexityVector& u = {},
                          double agreeTol = 1e-9);

struct WitnessExtremes {
    double maxTrue = 0.0;
    double maxFalse = 0.0;
    double max() const { return maxTrue > maxFalse ? maxTrue : maxFalse; }
};

// Largest true-case and false-case witness sizes over all inputs (OpenMP).
WitnessExtremes witnessExtremes(const SpanProgram& p, const ComplexityVector& u = {});
// Single-threaded reference of the same sweep.
WitnessExtremes witnessExtremesSerial(const SpanProgram& p, const ComplexityVector& u = {});

double maxWitnessSize(const SpanProgram& p, const ComplexityVector& u = {});
double maxWitnessSizeSerial(const SpanProgram& p, const ComplexityVector& u = {});

// Witness size under input costs: costs are rescaled so the smallest is 1 and
// the result is scaled back, which keeps every complexity at least 1.
WitnessExtremes costWeightedExtremes(const SpanProgram& p, const ComplexityVector& costs);
double costWeightedWitnessSize(const SpanProgram& p, const ComplexityVector& costs);

// Rescale the output row so the largest true and false witness sizes agree;
// the resulting witness size is sqrt(maxTrue * maxFalse).
SpanProgram balanceProgram(const SpanProgram& p, const ComplexityVector& costs = {});

// Bottom-up prediction of subformula complexity: each gate contributes the
// witness size of its catalog program under its children's predictions.
struct ComplexityPrediction {
    std::string node;
    double predicted = 0.0;
    double adv = 0.0;
};
std::vector<ComplexityPrediction> composedComplexityBound(const Formula& f);

nlohmann::json toJson(const WitnessReport& r, const Bits& x);

}  // namespace spanwalk
