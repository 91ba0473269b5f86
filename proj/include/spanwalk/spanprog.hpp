#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "spanwalk/types.hpp"

namespace spanwalk {

struct Literal {
    int var = 0;  // 0-based variable index
    bool neg = false;

    bool operator==(const Literal& o) const { return var == o.var && neg == o.neg; }
};

inline bool literalValue(const Literal& l, const Bits& x) {
    return bool(x.at(l.var)) != l.neg;
}

using LiteralSet = std::vector<Literal>;

// Target t, input vectors as the columns of A, and a literal set per column.
// Row 0 is the output coordinate O; the remaining rows are the constraints C.
struct SpanProgram {
    VectorXcd target;
    MatrixXcd A;
    std::vector<LiteralSet> X;
    int numInputs = 0;

    Eigen::Index rows() const { return A.rows(); }
    Eigen::Index cols() const { return A.cols(); }
    int numLeaves() const;
    bool isNormalized(double tol = 0.0) const;
};

// Build a normalized program (t = e_1) from a dense matrix and literal sets.
SpanProgram makeProgram(const MatrixXcd& A, std::vector<LiteralSet> X, int numInputs);

// "x1", "~x2" style literal shorthand used by the catalog.
Literal parseLiteral(const std::string& s);
LiteralSet literals(std::initializer_list<const char*> names);

SpanProgram normalizeTarget(const SpanProgram& p);

// Columns whose literal sets are all true under x.
std::vector<int> trueColumns(const SpanProgram& p, const Bits& x);

bool evaluateSpanProgram(const SpanProgram& p, const Bits& x, double rankTol = 1e-10);

// Truth table over n >= numInputs variables, MSB-first (bit 2^n-1-val(x) holds f(x)).
std::uint64_t truthTable(const SpanProgram& p, int n = -1);

// Dual program computing the negation: NOT gadgets at the output and at every
// input, with all literals complemented.  Requires t = e_1.
SpanProgram dualSpanProgram(const SpanProgram& p);

// An inner input for composition: either a bare variable or a program.
struct Inner {
    std::optional<SpanProgram> program;
    int leafVar = -1;

    static Inner leaf(int v) { return Inner{std::nullopt, v}; }
    static Inner of(SpanProgram p) { return Inner{std::move(p), -1}; }
};

// Substitute inners[k] for outer variable k.  Negated occurrences use the dual
// of the inner program.  Each occurrence receives its own copy.
SpanProgram composeSpanPrograms(const SpanProgram& outer, const std::vector<Inner>& inners,
                                int numInputs);

// Rename variables: literal (v, neg) becomes (perm[v], neg ^ flip[v]).
SpanProgram relabel(const SpanProgram& p, const std::vector<int>& perm,
                    const std::vector<bool>& flip, int numInputs);

// Replace every grouped input by |X_j| singleton inputs joined by an AND gadget.
SpanProgram expandGroupedInputs(const SpanProgram& p);

nlohmann::json toJson(const SpanProgram& p);
SpanProgram spanProgramFromJson(const nlohmann::json& j);

std::string describe(const SpanProgram& p);

}  // namespace spanwalk
