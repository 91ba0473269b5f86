#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "spanwalk/types.hpp"

namespace spanwalk {

enum class GateKind { Leaf, Not, And, Or, Parity, Maj3, EqualK, TruthTable3, TruthTable4 };

struct GateNode {
    GateKind kind = GateKind::Leaf;
    int var = -1;             // Leaf: 0-based variable index
    std::uint32_t table = 0;  // TruthTable3 / TruthTable4: MSB-first table
    std::vector<GateNode> children;

    int arity() const { return int(children.size()); }
};

struct Formula {
    GateNode root;
    int numInputs = 0;
};

class FormulaError : public std::runtime_error {
public:
    FormulaError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), pos_(pos) {}
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

struct FormulaOptions {
    int maxEqualArity = 8;
};

Formula parseFormula(const std::string& text, const FormulaOptions& opt = {});
std::string printFormula(const Formula& f);
std::string printNode(const GateNode& g);

bool evaluateClassically(const Formula& f, const Bits& x);
bool evaluateNode(const GateNode& g, const Bits& x);

// Value of the gate as a function of its children's values.
bool gateFunction(const GateNode& g, const std::vector<int>& childValues);

// Gate truth table over its own arity, MSB-first.
std::uint32_t gateTruthTable(const GateNode& g);

// Adversary bound of the gate with unit-cost inputs.  Throws for truth-table
// gates without a certified value and for constant gates.
double gateAdv(const GateNode& g);

struct BalanceViolation {
    std::string gate;
    std::vector<double> childAdv;
};

struct BalanceReport {
    bool balanced = true;
    std::vector<BalanceViolation> violations;
};

BalanceReport checkAdversaryBalanced(const Formula& f, double tol = 1e-9);

// Product of gate bounds along root-to-leaf paths; throws if not balanced.
double formulaAdv(const Formula& f, double tol = 1e-9);

// Bound of a subtree, computed bottom-up without the balance requirement
// (children enter as costs only where the catalog gives a cost-weighted form).
double nodeAdv(const GateNode& g, double tol = 1e-9);

// Leaf variables of a subtree in left-to-right order.
std::vector<int> leafVariables(const GateNode& g);

}  // namespace spanwalk
