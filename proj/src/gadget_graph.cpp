#include "spanwalk/gadget_graph.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "spanwalk/linalg.hpp"

namespace spanwalk {

namespace {

std::string literalName(const Literal& l) { return (l.neg ? "~x" : "x") + std::to_string(l.var + 1); }

}  // namespace

GadgetGraph buildGadgetGraph(const SpanProgram& p) {
    if (!p.isNormalized(1e-12)) throw std::invalid_argument("gadget graph needs a normalized target");
    const int R = int(p.rows()), J = int(p.cols()), L = p.numLeaves();
    GadgetGraph g;
    g.numRows = R;
    g.numCols = J;
    g.numInputs = p.numInputs;
    g.vertices.push_back({VertexKind::OutputA, "aO"});
    g.vertices.push_back({VertexKind::OutputB, "bO"});
    for (int r = 1; r < R; ++r) g.vertices.push_back({VertexKind::Constraint, "bC" + std::to_string(r)});
    for (int j = 0; j < J; ++j) g.vertices.push_back({VertexKind::Column, "aJ" + std::to_string(j + 1)});
    for (int k = 0; k < L; ++k) g.vertices.push_back({VertexKind::Leaf, "bI" + std::to_string(k + 1)});
    const int n = 1 + R + J + L;
    MatrixXcd H = MatrixXcd::Zero(n, n);
    auto link = [&H](int b, int a, cd w) {
        H(b, a) = w;
        H(a, b) = std::conj(w);
    };
    link(GadgetGraph::bO, GadgetGraph::aO, 1.0);
    for (int r = 0; r < R; ++r)
        for (int j = 0; j < J; ++j) link(1 + r, 1 + R + j, p.A(r, j));
    int k = 0;
    for (int j = 0; j < J; ++j)
        for (const auto& l : p.X[j]) {
            const int leaf = 1 + R + J + k;
            link(leaf, 1 + R + j, 1.0);
            g.inputs.push_back({leaf, 1 + R + j, l});
            ++k;
        }
    g.adjacency = H;
    return g;
}

MatrixXcd upperRightBlock(const GadgetGraph& g) {
    std::vector<int> bs, as;
    for (int v = 0; v < g.size(); ++v) (g.vertices[v].black() ? as : bs).push_back(v);
    MatrixXcd B(bs.size(), as.size());
    for (std::size_t r = 0; r < bs.size(); ++r)
        for (std::size_t c = 0; c < as.size(); ++c) B(r, c) = g.adjacency(bs[r], as[c]);
    return B;
}

GadgetGraph applyInput(const GadgetGraph& g, const Bits& x) {
    if (int(x.size()) < g.numInputs) throw std::invalid_argument("input shorter than the number of variables");
    GadgetGraph out = g;
    for (const auto& e : g.inputs)
        if (literalValue(e.literal, x)) {
            out.adjacency(e.leaf, e.column) = 0.0;
            out.adjacency(e.column, e.leaf) = 0.0;
        }
    return out;
}

GadgetGraph withOutputWeight(const GadgetGraph& g, double w) {
    GadgetGraph out = g;
    out.outputWeight = w;
    out.adjacency(GadgetGraph::aO, GadgetGraph::bO) = w;
    out.adjacency(GadgetGraph::bO, GadgetGraph::aO) = w;
    return out;
}

GadgetGraph reweightOutput(const GadgetGraph& g, double advPhi, double epsW) {
    if (!(advPhi > 0) || !(epsW > 0)) throw std::invalid_argument("reweighting needs advPhi > 0 and epsW > 0");
    return withOutputWeight(g, epsW / std::sqrt(advPhi));
}

bool isBipartite(const GadgetGraph& g) {
    for (int u = 0; u < g.size(); ++u)
        for (int v = 0; v < g.size(); ++v)
            if (g.adjacency(u, v) != cd(0.0) && g.vertices[u].black() == g.vertices[v].black()) return false;
    return true;
}

bool isConnected(const GadgetGraph& g) {
    const int n = g.size();
    if (n == 0) return true;
    std::vector<bool> seen(n, false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    int count = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v = 0; v < n; ++v)
            if (!seen[v] && g.adjacency(u, v) != cd(0.0)) {
                seen[v] = true;
                ++count;
                q.push(v);
            }
    }
    return count == n;
}

SpectrumReport spectrumReport(const GadgetGraph& g, double kernelRel, double suppTol) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(g.adjacency);
    SpectrumReport r;
    r.eigenvalues = es.eigenvalues();
    const MatrixXcd& V = es.eigenvectors();
    const int n = g.size();
    r.kernelTol = kernelRel * std::max(linalg::spectralNorm(g.adjacency), 1.0);
    for (int k = 0; k < n; ++k) {
        r.pairingError = std::max(r.pairingError, std::abs(r.eigenvalues(k) + r.eigenvalues(n - 1 - k)));
        const double lam = r.eigenvalues(k);
        const double sa = std::norm(V(GadgetGraph::aO, k)), sb = std::norm(V(GadgetGraph::bO, k));
        if (std::abs(lam) < r.kernelTol) {
            r.supportA += sa;
            r.supportB += sb;
            ++r.kernelDimension;
        } else if (sa + sb > suppTol) {
            if (!r.gapWitness || std::abs(lam) < *r.gapWitness) r.gapWitness = std::abs(lam);
        }
    }
    return r;
}

ZeroSupport zeroEigenvectorSupport(const GadgetGraph& g, const Bits& x) {
    const GadgetGraph gx = applyInput(g, x);
    const int n = g.size();
    MatrixXcd C(n - 1, n);
    C << gx.adjacency.bottomRows(n - 1);  // drop the aO row
    const MatrixXcd N = linalg::nullSpace(C, 1e-10);
    ZeroSupport z;
    const double a = N.row(GadgetGraph::aO).squaredNorm(), b = N.row(GadgetGraph::bO).squaredNorm();
    z.sideA = a > b;
    z.abO = z.sideA ? a : b;
    z.otherSide = z.sideA ? b : a;
    return z;
}

// ---- graph-route composition ----------------------------------------------

namespace {

// Vertex list of g split into blocks, in block order.
struct Parts {
    int aO;
    std::vector<int> rows;  // bO first
    std::vector<int> cols;
    std::vector<int> leaves;
};

Parts partsOf(const GadgetGraph& g) {
    Parts p{0, {}, {}, {}};
    for (int r = 0; r < g.numRows; ++r) p.rows.push_back(1 + r);
    for (int c = 0; c < g.numCols; ++c) p.cols.push_back(g.firstColumn() + c);
    for (const auto& e : g.inputs) p.leaves.push_back(e.leaf);
    return p;
}

std::string prefixed(const std::string& pre, const std::string& id) { return pre + "/" + id; }

}  // namespace

GadgetGraph graphDual(const GadgetGraph& g) {
    // New order: aO*, [g.aO, g.aJ...] as rows, [g.bO, g.bC..., g.bI...] as
    // columns, then one new leaf per old leaf with the complemented literal.
    const Parts p = partsOf(g);
    std::vector<int> order;  // old vertex at each new position (-1 = new vertex)
    std::vector<Vertex> vs;
    order.push_back(-1);
    vs.push_back({VertexKind::OutputA, "aO"});
    order.push_back(g.aO);
    vs.push_back({VertexKind::OutputB, prefixed("dual", g.vertices[g.aO].id)});
    for (int c : p.cols) {
        order.push_back(c);
        vs.push_back({VertexKind::Constraint, prefixed("dual", g.vertices[c].id)});
    }
    for (int r : p.rows) {
        order.push_back(r);
        vs.push_back({VertexKind::Column, prefixed("dual", g.vertices[r].id)});
    }
    for (int l : p.leaves) {
        order.push_back(l);
        vs.push_back({VertexKind::Column, prefixed("dual", g.vertices[l].id)});
    }
    const int firstNewLeaf = int(order.size());
    const int L = int(p.leaves.size());
    for (int k = 0; k < L; ++k) {
        order.push_back(-1);
        vs.push_back({VertexKind::Leaf, prefixed("dual", "not" + std::to_string(k + 1))});
    }
    const int n = int(order.size());
    std::vector<int> pos(g.size(), -1);
    for (int i = 0; i < n; ++i)
        if (order[i] >= 0) pos[order[i]] = i;

    GadgetGraph d;
    d.vertices = vs;
    d.numRows = 1 + g.numCols;
    d.numCols = g.numRows + L;
    d.numInputs = g.numInputs;
    d.adjacency = MatrixXcd::Zero(n, n);
    for (int u = 0; u < g.size(); ++u)
        for (int v = 0; v < g.size(); ++v) d.adjacency(pos[u], pos[v]) = g.adjacency(u, v);
    d.adjacency(0, 1) = d.adjacency(1, 0) = 1.0;
    for (int k = 0; k < L; ++k) {
        const int oldLeaf = pos[p.leaves[k]], nl = firstNewLeaf + k;
        d.adjacency(nl, oldLeaf) = d.adjacency(oldLeaf, nl) = 1.0;
        Literal l = g.inputs[k].literal;
        l.neg = !l.neg;
        d.inputs.push_back({nl, oldLeaf, l});
    }
    return d;
}

GadgetGraph composeGraphs(const GadgetGraph& outer, const std::vector<InnerGraph>& inners, int numInputs) {
    const Parts po = partsOf(outer);

    struct Block {
        GadgetGraph g;
        int column;  // outer vertex a_j
        std::string prefix;
    };
    std::vector<Block> blocks;
    std::vector<InputEdge> kept;
    int occurrence = 0;
    for (const auto& e : outer.inputs) {
        const InnerGraph& in = inners.at(e.literal.var);
        if (!in.graph) {
            if (in.leafVar < 0 || in.leafVar >= numInputs) throw std::invalid_argument("leaf variable out of range");
            kept.push_back({e.leaf, e.column, Literal{in.leafVar, e.literal.neg}});
            continue;
        }
        GadgetGraph q = e.literal.neg ? graphDual(*in.graph) : *in.graph;
        if (q.adjacency(GadgetGraph::bO, GadgetGraph::aO) != cd(1.0))
            throw std::invalid_argument("inner output edge must have weight one");
        blocks.push_back({std::move(q), e.column, "s" + std::to_string(occurrence)});
        ++occurrence;
    }

    // Map (source, vertex) -> new index.  Source -1 is the outer graph.
    std::vector<Vertex> vs;
    std::vector<int> outerPos(outer.size(), -1);
    std::vector<std::vector<int>> blockPos(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) blockPos[b].assign(blocks[b].g.size(), -1);

    auto addOuter = [&](int v) {
        outerPos[v] = int(vs.size());
        vs.push_back(outer.vertices[v]);
    };
    auto addBlock = [&](std::size_t b, int v, VertexKind kind) {
        blockPos[b][v] = int(vs.size());
        vs.push_back({kind, prefixed(blocks[b].prefix, blocks[b].g.vertices[v].id)});
    };

    addOuter(po.aO);
    for (int r : po.rows) addOuter(r);
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (int r : partsOf(blocks[b].g).rows) addBlock(b, r, VertexKind::Constraint);
    for (int c : po.cols) addOuter(c);
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (int c : partsOf(blocks[b].g).cols) addBlock(b, c, VertexKind::Column);
    std::vector<InputEdge> inputs;
    for (const auto& e : kept) {
        addOuter(e.leaf);
        inputs.push_back({outerPos[e.leaf], outerPos[e.column], e.literal});
    }
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (const auto& e : blocks[b].g.inputs) {
            addBlock(b, e.leaf, VertexKind::Leaf);
            inputs.push_back({blockPos[b][e.leaf], blockPos[b][e.column], e.literal});
        }
    // The inner output vertex a_O is identified with the outer column a_j.
    for (std::size_t b = 0; b < blocks.size(); ++b) blockPos[b][GadgetGraph::aO] = outerPos[blocks[b].column];

    const int n = int(vs.size());
    GadgetGraph g;
    g.vertices = std::move(vs);
    g.numInputs = numInputs;
    g.numCols = outer.numCols;
    g.numRows = outer.numRows;
    for (const auto& b : blocks) {
        g.numRows += b.g.numRows;
        g.numCols += b.g.numCols;
    }
    g.outputWeight = outer.outputWeight;
    g.adjacency = MatrixXcd::Zero(n, n);
    for (int u = 0; u < outer.size(); ++u)
        for (int v = 0; v < outer.size(); ++v)
            if (outerPos[u] >= 0 && outerPos[v] >= 0) g.adjacency(outerPos[u], outerPos[v]) = outer.adjacency(u, v);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto& q = blocks[b].g;
        for (int u = 0; u < q.size(); ++u)
            for (int v = 0; v < q.size(); ++v)
                if (q.adjacency(u, v) != cd(0.0)) g.adjacency(blockPos[b][u], blockPos[b][v]) = q.adjacency(u, v);
    }
    g.inputs = std::move(inputs);
    return g;
}

GadgetGraph treeGraph(const ProgramTree& t, int numInputs) {
    const int k = int(t.slots.size());
    GadgetGraph outer = buildGadgetGraph(t.outer);
    std::vector<InnerGraph> inners(k);
    for (int s = 0; s < k; ++s) {
        const Slot& sl = t.slots[s];
        if (sl.sub) inners[s].graph = treeGraph(*sl.sub, numInputs);
        else inners[s].leafVar = sl.leafVar;
    }
    // Slot negation complements the outer literal.
    for (auto& e : outer.inputs)
        if (t.slots.at(e.literal.var).negated) e.literal.neg = !e.literal.neg;
    GadgetGraph g = composeGraphs(outer, inners, numInputs);
    return t.negateOutput ? graphDual(g) : g;
}

// ---- output ratios ------------------------------------------------------------

std::vector<double> leafRatios(const SpanProgram& p, const Bits& x, double lambda, const std::vector<double>& s) {
    if (!(lambda > 0)) throw std::domain_error("leaf ratios need lambda > 0");
    std::vector<double> r;
    int k = 0;
    for (const auto& Xj : p.X)
        for (const auto& l : Xj) {
            const double si = s.empty() ? 1.0 : s.at(k);
            r.push_back(literalValue(l, x) ? -1.0 / (lambda * si) : lambda * si);
            ++k;
        }
    return r;
}

RatioReport outputRatio(const SpanProgram& p, const std::vector<double>& r, double lambda, bool trueCase) {
    if (!(lambda > 0)) throw std::domain_error("output ratio needs lambda > 0");
    if (!p.isNormalized(1e-12)) throw std::invalid_argument("output ratio needs a normalized target");
    const int R = int(p.rows()), J = int(p.cols()), L = p.numLeaves();
    if (int(r.size()) != L) throw std::invalid_argument("one ratio per leaf is required");
    for (double ri : r)
        if (ri == 0.0 || !std::isfinite(ri)) throw std::domain_error("input ratios must be finite and nonzero");

    // Closed form with grouped ratios rt_j = (sum_i 1/r_i - lambda)^{-1}.  The
    // Woodbury form cancels terms of order 1/lambda^2, so it runs in long double.
    using cld = std::complex<long double>;
    using MatL = Eigen::Matrix<cld, Eigen::Dynamic, Eigen::Dynamic>;
    const long double lam = lambda;
    MatL Rt = MatL::Zero(J, J);
    {
        int k = 0;
        for (int j = 0; j < J; ++j) {
            long double s = -lam;
            for (std::size_t m = 0; m < p.X[j].size(); ++m) s += 1.0L / (long double)r[k++];
            if (s == 0.0L) throw std::domain_error("grouped input ratio does not exist");
            Rt(j, j) = 1.0L / s;
        }
    }
    const MatL C = p.A.bottomRows(R - 1).cast<cld>();
    const MatL o = p.A.row(0).adjoint().cast<cld>();
    MatL middle = Rt;
    if (R > 1) {
        const MatL inner = MatL::Identity(R - 1, R - 1) + C * Rt * C.adjoint() / cld(lam);
        Eigen::FullPivLU<MatL> lu(inner);
        if (!lu.isInvertible()) throw std::domain_error("(1 + C rt C^*/lambda) is singular");
        middle -= Rt * C.adjoint() * lu.solve(MatL(C * Rt)) / cld(lam);
    }
    RatioReport rep;
    rep.trueCase = trueCase;
    rep.closedForm = double(lam + (o.adjoint() * middle * o)(0, 0).real());

    // Direct solve, unknowns (aO, bC, aJ, bI) with bO = 1.
    const int N = 1 + (R - 1) + J + L;
    const int iaO = 0, ibC = 1, iaJ = 1 + (R - 1), ibI = iaJ + J;
    MatrixXcd M = MatrixXcd::Zero(N, N);
    VectorXcd rhs = VectorXcd::Zero(N);
    int eq = 0;
    {
        int k = 0;
        for (int j = 0; j < J; ++j)
            for (std::size_t m = 0; m < p.X[j].size(); ++m, ++k) {
                M(eq, ibI + k) = 1.0;
                M(eq, iaJ + j) = -1.0 / r[k];
                ++eq;
            }
    }
    M(eq, iaO) = 1.0;
    for (int j = 0; j < J; ++j) M(eq, iaJ + j) = p.A(0, j);
    rhs(eq) = lambda;
    ++eq;
    for (int c = 1; c < R; ++c, ++eq) {
        M(eq, ibC + c - 1) = lambda;
        for (int j = 0; j < J; ++j) M(eq, iaJ + j) = -p.A(c, j);
    }
    {
        std::vector<int> leafCol;
        for (int j = 0; j < J; ++j)
            for (std::size_t m = 0; m < p.X[j].size(); ++m) leafCol.push_back(j);
        for (int j = 0; j < J; ++j, ++eq) {
            M(eq, iaJ + j) = lambda;
            for (int c = 1; c < R; ++c) M(eq, ibC + c - 1) = -std::conj(p.A(c, j));
            for (int k = 0; k < L; ++k)
                if (leafCol[k] == j) M(eq, ibI + k) = -1.0;
            rhs(eq) = std::conj(p.A(0, j));
        }
    }
    Eigen::FullPivLU<MatrixXcd> dlu(M);
    if (!dlu.isInvertible()) throw std::domain_error("eigenvalue equations are singular at this lambda");
    const VectorXcd z = dlu.solve(rhs);
    rep.direct = z(iaO).real();

    rep.sO = trueCase ? -1.0 / (lambda * rep.closedForm) : rep.closedForm / lambda;
    return rep;
}

double notGateRatio(double inputRatio, double lambda) { return lambda - 1.0 / inputRatio; }

double notGateRatioDirect(double inputRatio, double lambda) {
    // Vertices aO, m (= bO = a_i), b_i.  With m = 1 and b_i = a_i / r_i,
    // the equation at m reads lambda * m = aO + b_i.
    Eigen::Matrix2d M;
    Eigen::Vector2d rhs;
    M << 1.0, 1.0,  // aO + b_i = lambda
        0.0, inputRatio;  // r_i * b_i = 1
    rhs << lambda, 1.0;
    return M.fullPivLu().solve(rhs)(0);
}

// ---- export -------------------------------------------------------------------

nlohmann::json toJson(const GadgetGraph& g) {
    nlohmann::json vs = nlohmann::json::array(), es = nlohmann::json::array();
    for (const auto& v : g.vertices) vs.push_back({{"id", v.id}, {"side", v.black() ? "a" : "b"}});
    for (int u = 0; u < g.size(); ++u)
        for (int v = u + 1; v < g.size(); ++v) {
            const cd w = g.adjacency(u, v);
            if (w == cd(0.0)) continue;
            nlohmann::json e = {{"u", g.vertices[u].id}, {"v", g.vertices[v].id}, {"w", {w.real(), w.imag()}}};
            for (const auto& in : g.inputs)
                if ((in.leaf == u && in.column == v) || (in.leaf == v && in.column == u))
                    e["literal"] = literalName(in.literal);
            if ((u == GadgetGraph::aO && v == GadgetGraph::bO)) e["output"] = true;
            es.push_back(e);
        }
    return {{"vertices", vs}, {"edges", es}, {"numInputs", g.numInputs}};
}

std::string toDot(const GadgetGraph& g) {
    std::ostringstream os;
    os << "graph G {\n  node [shape=circle, fontsize=10];\n";
    for (const auto& v : g.vertices)
        os << "  \"" << v.id << "\" [style=filled, fillcolor=" << (v.black() ? "gray30, fontcolor=white" : "white")
           << "];\n";
    for (int u = 0; u < g.size(); ++u)
        for (int v = u + 1; v < g.size(); ++v) {
            const cd w = g.adjacency(u, v);
            if (w == cd(0.0)) continue;
            os << "  \"" << g.vertices[u].id << "\" -- \"" << g.vertices[v].id << "\" [label=\"";
            bool labeled = false;
            for (const auto& in : g.inputs)
                if ((in.leaf == u && in.column == v) || (in.leaf == v && in.column == u)) {
                    os << literalName(in.literal);
                    labeled = true;
                }
            if (!labeled) {
                os.precision(3);
                if (w.imag() == 0.0) os << w.real();
                else os << w.real() << (w.imag() < 0 ? "" : "+") << w.imag() << "i";
            }
            os << "\"];\n";
        }
    os << "}\n";
    return os.str();
}

}  // namespace spanwalk
