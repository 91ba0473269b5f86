#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "spanwalk/gate_catalog.hpp"
#include "spanwalk/spanprog.hpp"
#include "spanwalk/types.hpp"

namespace spanwalk {

enum class VertexKind { OutputA, OutputB, Constraint, Column, Leaf };

struct Vertex {
    VertexKind kind;
    std::string id;  // hierarchical path, e.g. "s0/aJ2"
    bool black() const { return kind == VertexKind::OutputA || kind == VertexKind::Column; }
};

struct InputEdge {
    int leaf = 0;    // vertex index of b_i
    int column = 0;  // vertex index of a_j
    Literal literal;
};

// Vertices are stored in block order: aO, bO, bC..., aJ..., bI...
// The adjacency is Hermitian; H(b, a) carries the program entry.
struct GadgetGraph {
    std::vector<Vertex> vertices;
    MatrixXcd adjacency;
    std::vector<InputEdge> inputs;
    int numRows = 1;  // bO plus constraint rows
    int numCols = 0;
    int numInputs = 0;
    double outputWeight = 1.0;

    static constexpr int aO = 0;
    static constexpr int bO = 1;
    int size() const { return int(vertices.size()); }
    int firstColumn() const { return 1 + numRows; }
    int firstLeaf() const { return 1 + numRows + numCols; }
    int numLeaves() const { return int(inputs.size()); }
};

GadgetGraph buildGadgetGraph(const SpanProgram& p);

// Rows b-side (bO, bC, bI), columns a-side (aO, aJ).
MatrixXcd upperRightBlock(const GadgetGraph& g);

// Deletes the input edges whose literal is true.
GadgetGraph applyInput(const GadgetGraph& g, const Bits& x);
// Output edge weight epsW / sqrt(advPhi).
GadgetGraph reweightOutput(const GadgetGraph& g, double advPhi, double epsW);
GadgetGraph withOutputWeight(const GadgetGraph& g, double w);

bool isBipartite(const GadgetGraph& g);
bool isConnected(const GadgetGraph& g);

struct SpectrumReport {
    VectorXd eigenvalues;  // ascending
    double supportA = 0.0;  // max |<aO|psi>|^2 over unit kernel vectors
    double supportB = 0.0;
    std::optional<double> gapWitness;  // min |lambda| of a non-kernel eigenvector touching {aO, bO}
    double kernelTol = 0.0;
    double pairingError = 0.0;  // max |lambda_k + lambda_{n-1-k}|
    int kernelDimension = 0;
};

SpectrumReport spectrumReport(const GadgetGraph& g, double kernelRel = 1e-8, double suppTol = 1e-8);

struct ZeroSupport {
    double abO = 0.0;
    bool sideA = false;  // true: support on aO (f = 1); false: on bO
    double otherSide = 0.0;
};

// Solutions of every lambda = 0 constraint of G(x) except the one at aO.
ZeroSupport zeroEigenvectorSupport(const GadgetGraph& g, const Bits& x);

// ---- graph-route composition ------------------------------------------------

// Complements the program: a NOT gadget above the output and below every leaf.
GadgetGraph graphDual(const GadgetGraph& g);

struct InnerGraph {
    std::optional<GadgetGraph> graph;
    int leafVar = -1;
};

// Identifies each input edge of `outer` on variable k with the output edge of
// a copy of inners[k] (through a NOT gadget for negated literals).
GadgetGraph composeGraphs(const GadgetGraph& outer, const std::vector<InnerGraph>& inners, int numInputs);

// Graph of a program tree built entirely by graph surgery.
GadgetGraph treeGraph(const ProgramTree& t, int numInputs);

// ---- output ratios -----------------------------------------------------------

// Leaf ratio r_i = a_i / b_i for a literal of complexity s: -1/(lambda s) if
// true, lambda s if false.
std::vector<double> leafRatios(const SpanProgram& p, const Bits& x, double lambda,
                               const std::vector<double>& s = {});

struct RatioReport {
    double closedForm = 0.0;
    double direct = 0.0;
    double sO = 0.0;  // -1/(lambda rO) if true, rO/lambda if false
    bool trueCase = false;
};

// r_O = a_O / b_O for the small-eigenvalue equations with input ratios r_I.
// Throws std::domain_error if lambda <= 0 or a required inverse fails.
RatioReport outputRatio(const SpanProgram& p, const std::vector<double>& inputRatios, double lambda,
                        bool trueCase);

double notGateRatio(double inputRatio, double lambda);
// Same quantity from the eigenvalue equations of the two-edge gadget.
double notGateRatioDirect(double inputRatio, double lambda);

// ---- export -----------------------------------------------------------------

nlohmann::json toJson(const GadgetGraph& g);
std::string toDot(const GadgetGraph& g);

}  // namespace spanwalk
