#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spanwalk/formula.hpp"
#include "spanwalk/spanprog.hpp"
#include "spanwalk/witness.hpp"

namespace spanwalk {

// ---- truth tables and equivalence ------------------------------------------

// f2(x) = f(sigma(x) xor flip) xor negateOutput, with sigma(x)_k = x_{perm[k]}.
struct FunctionTransform {
    std::vector<int> perm;
    std::vector<bool> flip;
    bool negateOutput = false;
};

// A 3-bit table as a 4-bit table with x4 ignored.
std::uint32_t embedThreeBit(std::uint32_t table8);
std::uint32_t applyTransform(std::uint32_t table, int n, const FunctionTransform& t);
std::vector<FunctionTransform> allTransforms(int n);

// Smallest 16-bit number over all equivalent functions.  Arity-3 tables are
// embedded first and only the 96 transforms fixing x4 are searched.
std::uint32_t canonicalFunctionId(std::uint32_t table, int arity);

// A transform t with applyTransform(from, n, t) == to, if one exists.
std::optional<FunctionTransform> findTransform(std::uint32_t from, std::uint32_t to, int n);

inline bool tableBit(std::uint32_t table, int n, std::uint64_t v) {
    return (table >> ((1u << n) - 1 - v)) & 1u;
}

// ---- adversary certificates ------------------------------------------------

struct AdversaryCertificate {
    int n = 0;
    MatrixXd gamma;  // 2^n x 2^n, indexed by val(x) with x1 most significant
};

// Symmetric matrix from a labeled block, e.g. rows {"100","010"}, cols {"011","101"}.
AdversaryCertificate makeCertificate(int n, const std::vector<std::string>& rows,
                                     const std::vector<std::string>& cols,
                                     const std::vector<std::vector<double>>& block);

// Weight one on every pair at Hamming distance one where f differs.
AdversaryCertificate sensitivityCertificate(std::uint32_t table, int n);

// Certificate for applyTransform(f, n, t) given one for f.
AdversaryCertificate transformCertificate(const AdversaryCertificate& c, const FunctionTransform& t);

// ||Gamma|| / max_i ||Gamma o D_i|| / cost_i.  Throws if Gamma is not a valid
// certificate for the table.
double certificateRatio(const AdversaryCertificate& c, std::uint32_t table,
                        const std::vector<double>& costs = {});

// ---- program trees ---------------------------------------------------------

struct ProgramTree;

// A slot of an outer program: a leaf variable or a sub-program, possibly negated.
struct Slot {
    int leafVar = -1;
    bool negated = false;
    std::shared_ptr<const ProgramTree> sub;
};

struct ProgramTree {
    SpanProgram outer;  // over variables 0..slots.size()-1
    std::vector<Slot> slots;
    bool negateOutput = false;  // realized by the dual program
};

ProgramTree directTree(SpanProgram p);
SpanProgram flatten(const ProgramTree& t, int numInputs);
// Witness size of the outer program with each slot costed at its sub-program's
// witness size (leaf slots use leafCosts).  Negations do not change costs.
double treeWitnessSize(const ProgramTree& t, const std::vector<double>& leafCosts);

// ---- gate programs ---------------------------------------------------------

SpanProgram majProgram();
SpanProgram majUnbalancedProgram(double beta);  // costs (1, 1, beta)
SpanProgram equalProgram(int k);
SpanProgram andProgram(int k);                   // single grouped column
SpanProgram andPairProgram(double B, double Bp); // two singleton columns
SpanProgram orProgram(const std::vector<double>& costs);
SpanProgram parityProgram();
SpanProgram gProgram();
SpanProgram thresholdTwoOfFourProgram(bool negated = false);

// Program tree for one gate with children costed as given.  Slot k of the
// result refers to gate input k.
ProgramTree gateTree(const GateNode& g, const std::vector<double>& childCosts);
SpanProgram catalogProgramFor(const GateNode& g, const std::vector<double>& childCosts);

// Whole-formula program: gate trees substituted into each other, NOT gates
// realized as literal negations or a final dual.
ProgramTree formulaTree(const Formula& f);
SpanProgram formulaProgram(const Formula& f);

// ---- catalog ---------------------------------------------------------------

struct CatalogEntry {
    std::uint32_t id = 0;
    std::string name;
    int arity = 3;
    bool parameterized = false;  // cost beta on x3, costs (1, 1, beta)
    std::function<double(double)> adv;
    std::function<ProgramTree(double)> program;                  // program used
    std::function<std::optional<SpanProgram>(double)> printed;   // as listed, if listed
    std::function<std::optional<AdversaryCertificate>(double)> certificate;
    std::uint32_t certificateTable = 0;  // function the certificate is written for
    std::string programSource;
    std::string certificateSource;
};

const std::vector<CatalogEntry>& threeBitGates();
const std::vector<CatalogEntry>& fourBitEntries();
std::vector<double> entryCosts(const CatalogEntry& e, double beta);

// Unit-cost adversary value for a canonical id, if catalogued.
std::optional<double> certifiedAdv(std::uint32_t canonicalId);

struct CatalogRow {
    std::uint32_t id = 0;
    std::string name;
    double beta = 1.0;
    std::uint32_t programTable = 0;
    std::uint32_t canonicalId = 0;
    bool tableOk = false;
    double adv = 0.0;
    double wsize = 0.0;
    double flatWsize = 0.0;
    std::optional<double> printedWsize;          // listed weights as printed
    std::optional<double> printedBalancedWsize;  // after rescaling the output row
    std::optional<double> certRatio;
    bool wsizeOk = false;
    bool certOk = false;
    bool printedOk = true;
    std::string note;

    bool pass() const { return tableOk && wsizeOk && certOk; }
};

CatalogRow verifyEntry(const CatalogEntry& e, double beta, double wsizeTol = 1e-9,
                       double certTol = 1e-6);
// Every three-bit row at beta = 1 and every four-bit entry, parameterized
// entries at beta in {1/2, 1, 2}.
std::vector<CatalogRow> verifyCatalog();

nlohmann::json catalogJson();

}  // namespace spanwalk
