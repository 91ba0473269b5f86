#include "spanwalk/szegedy_walk.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spanwalk/linalg.hpp"

namespace spanwalk {

namespace {

using MatrixXld = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXld = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// Newton steps on (L - s) v = 0, v.v = 1 in extended precision. Small
// components of the Perron vector set the row-norm accuracy of Delta.
void refinePerron(const MatrixXd& L, VectorXd& v, double& s) {
    const Eigen::Index n = L.rows();
    const MatrixXld Ll = L.cast<long double>();
    VectorXld x = v.cast<long double>();
    long double mu = s;
    for (int it = 0; it < 3; ++it) {
        MatrixXld K = MatrixXld::Zero(n + 1, n + 1);
        K.topLeftCorner(n, n) = Ll - mu * MatrixXld::Identity(n, n);
        K.block(0, n, n, 1) = -x;
        K.block(n, 0, 1, n) = x.transpose();
        VectorXld rhs(n + 1);
        rhs.head(n) = -(Ll * x - mu * x);
        rhs(n) = 0;
        const VectorXld step = K.fullPivLu().solve(rhs);
        x += step.head(n);
        mu += step(n);
        x /= x.norm();
    }
    v = x.cast<double>();
    s = double(mu);
}

}  // namespace

DeltaDecomposition deltaDecompose(const GadgetGraph& g, PhaseSplit split) {
    const int n = g.size();
    const MatrixXd Aabs = g.adjacency.cwiseAbs();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Aabs);
    DeltaDecomposition d;
    d.normAPrime = es.eigenvalues()(n - 1);
    d.principal = es.eigenvectors().col(n - 1).cwiseAbs();
    refinePerron(Aabs, d.principal, d.normAPrime);
    if (!isConnected(g) || d.principal.minCoeff() <= 1e-14 * d.principal.maxCoeff())
        throw std::invalid_argument("Delta decomposition needs a connected graph");
    d.black.resize(n);
    for (int v = 0; v < n; ++v) d.black[v] = g.vertices[v].black();
    d.delta = MatrixXcd::Zero(n, n);
    const double sn = std::sqrt(d.normAPrime);
    for (int v = 0; v < n; ++v)
        for (int u = 0; u < n; ++u) {
            const cd h = g.adjacency(v, u);
            if (h == cd(0.0)) continue;
            const double scale = std::sqrt(d.principal(u) / d.principal(v)) / sn;
            cd e;
            if (split == PhaseSplit::Principal) {
                e = d.black[v] ? std::conj(std::sqrt(h)) : std::sqrt(g.adjacency(u, v));
            } else {
                const double m = std::sqrt(std::abs(h));
                e = d.black[v] ? std::conj(h) / std::abs(h) * m : cd(m);
            }
            d.delta(v, u) = e * scale;
        }
    return d;
}

double deltaRowNormError(const DeltaDecomposition& d) {
    return (d.delta.rowwise().squaredNorm().array() - 1.0).abs().maxCoeff();
}

double deltaReconstructionError(const DeltaDecomposition& d, const MatrixXcd& A) {
    const MatrixXcd R = d.normAPrime * d.delta.conjugate().cwiseProduct(d.delta.transpose());
    return (R - A).cwiseAbs().maxCoeff();
}

int WalkOperator::index(int v, int w) const {
    auto it = std::lower_bound(basis.begin(), basis.end(), std::make_pair(v, w));
    if (it == basis.end() || *it != std::make_pair(v, w)) return -1;
    return int(it - basis.begin());
}

WalkOperator buildWalk(const GadgetGraph& g, const DeltaDecomposition& d, bool fullSpace) {
    const int n = g.size();
    WalkOperator w;
    w.numVertices = n;
    for (const auto& e : g.inputs) {
        w.leafVertices.push_back(e.leaf);
        w.leafLiterals.push_back(e.literal);
    }
    for (int v = 0; v < n; ++v)
        for (int u = 0; u < n; ++u) {
            const bool leafSelf = v == u && std::find(w.leafVertices.begin(), w.leafVertices.end(), v) !=
                                                w.leafVertices.end();
            if (fullSpace || d.delta(v, u) != cd(0.0) || leafSelf) w.basis.emplace_back(v, u);
        }
    const int m = int(w.basis.size());
    w.T = MatrixXcd::Zero(m, n);
    for (int i = 0; i < m; ++i) {
        auto [v, u] = w.basis[i];
        w.T(i, v) = d.delta(v, u);
    }
    w.S = MatrixXcd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        auto [v, u] = w.basis[i];
        const int j = w.index(u, v);
        if (j < 0) throw std::logic_error("basis is not closed under the swap");
        w.S(j, i) = 1.0;
    }
    const MatrixXcd Pi = w.T * w.T.adjoint();
    w.U0 = cd(0.0, 1.0) * (2.0 * Pi - MatrixXcd::Identity(m, m)) * w.S;
    w.oracle = VectorXd::Ones(m);
    w.Ux = w.U0;
    return w;
}

WalkOperator applyOracle(const WalkOperator& w, const Bits& x) {
    WalkOperator out = w;
    std::vector<bool> flip(w.numVertices, false);
    for (std::size_t k = 0; k < w.leafVertices.size(); ++k)
        if (literalValue(w.leafLiterals[k], x)) flip[w.leafVertices[k]] = true;
    // Only edge states and leaf self-states are marked, so the extra states of
    // the full space stay outside the walk.
    for (std::size_t i = 0; i < w.basis.size(); ++i) {
        auto [v, u] = w.basis[i];
        const bool inEdgeSpace = v == u || w.T(i, v) != cd(0.0);
        out.oracle(i) = flip[v] && inEdgeSpace ? -1.0 : 1.0;
    }
    out.Ux = out.oracle.cast<cd>().asDiagonal() * w.U0;
    return out;
}

MatrixXcd inputLift(const WalkOperator& w, const Bits& x) {
    MatrixXcd T = w.T;
    for (std::size_t k = 0; k < w.leafVertices.size(); ++k) {
        if (!literalValue(w.leafLiterals[k], x)) continue;
        const int b = w.leafVertices[k];
        T.col(b).setZero();
        T(w.index(b, b), b) = 1.0;
    }
    return T;
}

MatrixXcd sinkAdjacency(const GadgetGraph& g, const Bits& x, double normAPrime) {
    MatrixXcd M = applyInput(g, x).adjacency / normAPrime;
    for (const auto& e : g.inputs)
        if (literalValue(e.literal, x)) M(e.leaf, e.leaf) = 1.0;
    return M;
}

VectorXcd eigenvaluesOf(const MatrixXcd& U) {
    Eigen::ComplexSchur<MatrixXcd> cs(U, false);
    return cs.matrixT().diagonal();
}

// Greedy nearest matching, visiting the first list in phase order.
double eigenvalueMultisetDistance(std::vector<cd> a, std::vector<cd> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    auto byPhase = [](const cd& p, const cd& q) { return std::arg(p) < std::arg(q); };
    std::sort(a.begin(), a.end(), byPhase);
    std::vector<bool> used(b.size(), false);
    double worst = 0.0;
    for (const cd& z : a) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0;
        for (std::size_t j = 0; j < b.size(); ++j)
            if (!used[j] && std::abs(z - b[j]) < best) {
                best = std::abs(z - b[j]);
                bi = j;
            }
        used[bi] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

CorrespondenceReport checkCorrespondence(const GadgetGraph& g, const WalkOperator& w, const Bits& x) {
    CorrespondenceReport r;
    const int m = int(w.basis.size());
    const MatrixXcd I = MatrixXcd::Identity(m, m);
    const WalkOperator wx = applyOracle(w, x);
    r.unitarity = (wx.Ux.adjoint() * wx.Ux - I).cwiseAbs().maxCoeff();
    r.involution = (w.S * w.S - I).cwiseAbs().maxCoeff();
    const MatrixXcd Tx = inputLift(w, x);
    const MatrixXcd Pi = Tx * Tx.adjoint();
    r.projection = (Pi * Pi - Pi).cwiseAbs().maxCoeff();

    // Norm of |A'| for the un-applied graph fixes the scale of the lift.
    const double nrm = g.adjacency.cwiseAbs().selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff();
    const MatrixXcd M = Tx.adjoint() * w.S * Tx;
    const MatrixXcd Mx = sinkAdjacency(g, x, nrm);
    r.liftResidual = (M - Mx).cwiseAbs().maxCoeff();

    // Invariant subspace R = span(T_x, S T_x).
    MatrixXcd span(m, 2 * Tx.cols());
    span << Tx, w.S * Tx;
    const MatrixXcd Q = linalg::nullSpace(linalg::rangeProjector(span) - I, 1e-9);
    const MatrixXcd UR = Q.adjoint() * wx.Ux * Q;
    r.invariance = (wx.Ux * Q - Q * UR).cwiseAbs().maxCoeff();

    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(Mx);
    std::vector<cd> predicted;
    const cd i(0.0, 1.0);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        const double mu = std::clamp(es.eigenvalues()(k), -1.0, 1.0);
        if (1.0 - std::abs(mu) < 1e-9) {
            predicted.push_back(i * mu);
        } else {
            const double c = std::sqrt(1.0 - mu * mu);
            predicted.push_back(i * mu - c);
            predicted.push_back(i * mu + c);
        }
    }
    const VectorXcd ev = eigenvaluesOf(UR);
    r.spectrumMismatch = eigenvalueMultisetDistance(std::vector<cd>(ev.data(), ev.data() + ev.size()), predicted);

    const MatrixXcd Pperp = I - Q * Q.adjoint();
    const MatrixXcd U = -i * wx.Ux;
    r.complementResidual = ((U + w.S) * Pperp).cwiseAbs().maxCoeff();
    return r;
}

}  // namespace spanwalk
