#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "spanwalk/estimator.hpp"
#include "spanwalk/formula.hpp"
#include "spanwalk/spanprog.hpp"

namespace spanwalk {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    double timeLimit = 0.0;  // seconds, 0 if unbounded
    std::string summary;
    nlohmann::json detail;
};

// One catalog program with the label and costs it is checked under.
struct CatalogProgram {
    std::string label;
    SpanProgram program;
    std::vector<double> costs;  // per variable
    double adv = 0.0;
};

// Three-bit programs at unit cost, four-bit entries at beta = 1, and the
// parameterized entries at every beta in `betas`.
std::vector<CatalogProgram> catalogPrograms(const std::vector<double>& betas = {1.0});

// Seeded random normalized program: 1-4 rows, at least as many columns (up
// to 6), 2-4 variables, Gaussian complex entries, one or two literals per
// column.  The columns span the target almost surely.
SpanProgram randomSpanProgram(std::uint64_t seed);

CheckResult checkGateTable();            // 1
CheckResult checkFourBitCatalog();       // 2
CheckResult checkDualRail();             // 3
CheckResult checkFormulaSpectrum(const EstimatorConfig& cfg);  // 4
CheckResult checkWalkCorrespondence(const EstimatorConfig& cfg);  // 5
CheckResult checkEndToEnd(const EstimatorConfig& cfg);  // 6
CheckResult checkWitnessForms();         // 7
CheckResult checkOutputRatios();         // 8
CheckResult checkComposition();          // 9

CheckResult runCriterion(int id, const EstimatorConfig& cfg);

// catalog, spectra, walk, witness, ratios, composition, all.  Throws
// std::invalid_argument on an unknown scope.
std::vector<int> criteriaForScope(const std::string& scope);

// Walk correspondence for one formula over every input.
CheckResult checkFormulaWalk(const Formula& f, const EstimatorConfig& cfg);

nlohmann::json toJson(const CheckResult& r);
std::string resultLine(const CheckResult& r);

}  // namespace spanwalk
