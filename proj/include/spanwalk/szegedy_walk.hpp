#pragma once

#include <utility>
#include <vector>

#include "spanwalk/gadget_graph.hpp"
#include "spanwalk/types.hpp"

namespace spanwalk {

// How the phase of a complex edge weight is shared between the two rows of Delta.
enum class PhaseSplit { Principal, BlackRows };

struct DeltaDecomposition {
    MatrixXcd delta;
    double normAPrime = 0.0;  // largest eigenvalue of the entrywise |A|
    VectorXd principal;       // Perron vector of |A|, strictly positive
    std::vector<bool> black;
};

// A(v, u) = normAPrime * conj(Delta(v, u)) * Delta(u, v), unit row norms.
// Throws std::invalid_argument on a disconnected graph.
DeltaDecomposition deltaDecompose(const GadgetGraph& g, PhaseSplit split = PhaseSplit::Principal);

double deltaRowNormError(const DeltaDecomposition& d);
double deltaReconstructionError(const DeltaDecomposition& d, const MatrixXcd& A);

struct WalkOperator {
    std::vector<std::pair<int, int>> basis;  // directed edge states |v, w>
    MatrixXcd T;                             // basis x vertices, columns |v~>
    MatrixXcd S;                             // swap
    MatrixXcd U0;                            // i (2 T T^* - 1) S
    VectorXd oracle;                         // +-1 on the basis
    MatrixXcd Ux;                            // oracle * U0
    std::vector<int> leafVertices;
    std::vector<Literal> leafLiterals;
    int numVertices = 0;

    int index(int v, int w) const;  // -1 if absent
    int startIndex() const { return index(GadgetGraph::aO, GadgetGraph::bO); }
};

// fullSpace keeps every |v, w>; otherwise the span of edge states and the
// leaf self-states |b_i, b_i>, which is invariant under S and T T^*.
WalkOperator buildWalk(const GadgetGraph& g, const DeltaDecomposition& d, bool fullSpace = false);

// Phase -1 on every edge or self state whose first vertex is a leaf with a true literal.
WalkOperator applyOracle(const WalkOperator& w, const Bits& x);

// Lift for input x: rows of true leaves replaced by the self-state |b_i, b_i>.
MatrixXcd inputLift(const WalkOperator& w, const Bits& x);

// A_{G(x)} / normAPrime plus a unit diagonal entry at every true leaf.
MatrixXcd sinkAdjacency(const GadgetGraph& g, const Bits& x, double normAPrime);

VectorXcd eigenvaluesOf(const MatrixXcd& U);

// Largest distance between matched elements; infinity if the sizes differ.
double eigenvalueMultisetDistance(std::vector<cd> a, std::vector<cd> b);

struct CorrespondenceReport {
    double unitarity = 0.0;       // max |Ux^* Ux - 1|
    double involution = 0.0;      // max |S^2 - 1|
    double projection = 0.0;      // max |Pi^2 - Pi|
    double liftResidual = 0.0;    // max |T_x^* S T_x - sinkAdjacency|
    double invariance = 0.0;      // max |Ux Q - Q (Q^* Ux Q)| on R
    double spectrumMismatch = 0.0;  // max distance in the matched eigenvalue multisets
    double complementResidual = 0.0;  // max |(U + S) P_{R-perp}| with U = -i Ux
};

CorrespondenceReport checkCorrespondence(const GadgetGraph& g, const WalkOperator& w, const Bits& x);

}  // namespace spanwalk
