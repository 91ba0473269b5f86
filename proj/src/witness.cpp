#include "spanwalk/witness.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>

#include "spanwalk/gate_catalog.hpp"
#include "spanwalk/linalg.hpp"

namespace spanwalk {

using linalg::pinv;

namespace {

ComplexityVector unitOr(const SpanProgram& p, const ComplexityVector& u) {
    if (u.empty()) return ComplexityVector(std::size_t(p.numInputs), 1.0);
    if (int(u.size()) < p.numInputs) throw std::invalid_argument("complexity vector too short");
    return u;
}

}  // namespace

VectorXd groupedComplexity(const SpanProgram& p, const Bits& x, const ComplexityVector& uIn) {
    const ComplexityVector u = unitOr(p, uIn);
    VectorXd g(p.cols());
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
        const auto& Xj = p.X[j];
        bool allTrue = true;
        double sumTrue = 0.0, sumInvFalse = 0.0;
        for (const auto& l : Xj) {
            sumTrue += u.at(l.var);
            if (!literalValue(l, x)) {
                allTrue = false;
                sumInvFalse += 1.0 / u.at(l.var);
            }
        }
        g(j) = allTrue ? std::max(sumTrue, 1.0) : 1.0 / sumInvFalse;
    }
    return g;
}

WitnessReport witnessSize(const SpanProgram& p, const Bits& x, const ComplexityVector& uIn,
                          double agreeTol) {
    if (!p.isNormalized(1e-12)) throw std::invalid_argument("witness size needs a normalized target");
    const ComplexityVector u = unitOr(p, uIn);
    const Eigen::Index J = p.cols();
    if ((p.target - linalg::rangeProjector(p.A) * p.target).norm() > 1e-9)
        throw std::invalid_argument("target is outside the span of the input vectors");
    const VectorXd g = groupedComplexity(p, x, u);
    VectorXcd piDiag = VectorXcd::Zero(J);
    for (int j : trueColumns(p, x)) piDiag(j) = 1.0;
    const MatrixXcd Pi = piDiag.asDiagonal();
    const MatrixXcd Pbar = MatrixXcd::Identity(J, J) - Pi;
    const MatrixXcd Sq = g.cwiseSqrt().cast<cd>().asDiagonal();
    const MatrixXcd SqInv = g.cwiseSqrt().cwiseInverse().cast<cd>().asDiagonal();
    const VectorXcd& t = p.target;
    const MatrixXcd Id = MatrixXcd::Identity(J, J);

    // Components orthogonal to the target, and the output row as a vector.
    const MatrixXcd At = p.A - t * (t.adjoint() * p.A);
    const VectorXcd o = p.A.adjoint() * t;

    WitnessReport r;
    r.trueCase = evaluateSpanProgram(p, x);
    const double scale = std::max(1.0, linalg::maxAbs(p.A));

    if (r.trueCase) {
        const MatrixXcd B = p.A * Pi * SqInv;
        const VectorXcd y = pinv(B) * t;
        r.value = y.squaredNorm();
        r.witness = SqInv * y;
        r.residual = (p.A * Pi * r.witness - t).norm();

        const MatrixXcd Bt = At * Pi * SqInv;
        const VectorXcd z = (Pi - pinv(Bt) * Bt) * SqInv * o;
        r.altValue = 1.0 / z.squaredNorm();
        if (r.residual > 1e-6 * scale)
            throw std::runtime_error("true input without a feasible witness at x=" + bitsToString(x));
    } else {
        const MatrixXcd AS = p.A * Sq;
        const MatrixXcd ASp = pinv(AS);
        const MatrixXcd M = Pbar * ASp * AS - Id;
        const VectorXcd z = (Id + pinv(M) * Pi) * ASp * t;
        r.value = 1.0 / z.squaredNorm();

        const MatrixXcd AtH = At.adjoint();
        const MatrixXcd AtPi = At * Pi;
        const MatrixXcd DeltaBar = MatrixXcd::Identity(p.rows(), p.rows()) - AtPi * pinv(AtPi);
        const VectorXcd q = (Id - AtH * pinv(Pi * AtH)) * o;
        const MatrixXcd D = DeltaBar * At * Sq;
        r.altValue = ((Id - pinv(D) * D) * Sq * q).squaredNorm();

        // Witness vector: w = t + T c, minimize |S A^* w| subject to Pi A^* w = 0.
        const MatrixXcd T = linalg::nullSpace(t.adjoint());
        const MatrixXcd C = Pi * p.A.adjoint() * T;
        const VectorXcd d = -(Pi * p.A.adjoint() * t);
        const VectorXcd c0 = pinv(C) * d;
        const MatrixXcd N = linalg::nullSpace(C);
        const MatrixXcd G = Sq * p.A.adjoint();
        const VectorXcd w0 = t + T * c0;
        VectorXcd w = w0;
        if (N.cols() > 0) w -= T * N * (pinv(G * T * N) * (G * w0));
        r.witness = w;
        r.residual = std::abs(t.dot(r.witness) - cd(1.0)) + (Pi * p.A.adjoint() * r.witness).norm() +
                     std::abs((G * w).squaredNorm() - r.value) / std::max(1.0, r.value);
        if (r.residual > 1e-6 * scale)
            throw std::runtime_error("false input without a feasible witness at x=" + bitsToString(x));
    }
    if (!(std::abs(r.value - r.altValue) <= agreeTol * std::max(1.0, std::abs(r.value))))
        throw std::runtime_error("witness size closed forms disagree at x=" + bitsToString(x) + ": " +
                                 std::to_string(r.value) + " vs " + std::to_string(r.altValue));
    return r;
}

WitnessExtremes witnessExtremesSerial(const SpanProgram& p, const ComplexityVector& u) {
    if (p.numInputs > 16) throw std::invalid_argument("too many inputs to enumerate");
    WitnessExtremes e;
    const std::uint64_t N = std::uint64_t(1) << p.numInputs;
    for (std::uint64_t v = 0; v < N; ++v) {
        auto r = witnessSize(p, bitsFromIndex(v, p.numInputs), u);
        double& slot = r.trueCase ? e.maxTrue : e.maxFalse;
        slot = std::max(slot, r.value);
    }
    return e;
}

WitnessExtremes witnessExtremes(const SpanProgram& p, const ComplexityVector& u) {
    if (p.numInputs > 16) throw std::invalid_argument("too many inputs to enumerate");
    const long long N = 1LL << p.numInputs;
    double mt = 0.0, mf = 0.0;
    std::exception_ptr err;
#pragma omp parallel for reduction(max : mt, mf) schedule(dynamic)
    for (long long v = 0; v < N; ++v) {
        try {
            auto r = witnessSize(p, bitsFromIndex(std::uint64_t(v), p.numInputs), u);
            if (r.trueCase) mt = std::max(mt, r.value);
            else mf = std::max(mf, r.value);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return {mt, mf};
}

double maxWitnessSize(const SpanProgram& p, const ComplexityVector& u) {
    return witnessExtremes(p, u).max();
}

double maxWitnessSizeSerial(const SpanProgram& p, const ComplexityVector& u) {
    return witnessExtremesSerial(p, u).max();
}

WitnessExtremes costWeightedExtremes(const SpanProgram& p, const ComplexityVector& costs) {
    ComplexityVector u = unitOr(p, costs);
    double m = std::numeric_limits<double>::infinity();
    for (int k = 0; k < p.numInputs; ++k) m = std::min(m, u[k]);
    if (!(m > 0)) throw std::invalid_argument("costs must be positive");
    for (auto& v : u) v /= m;
    auto e = witnessExtremes(p, u);
    return {e.maxTrue * m, e.maxFalse * m};
}

double costWeightedWitnessSize(const SpanProgram& p, const ComplexityVector& costs) {
    return costWeightedExtremes(p, costs).max();
}

SpanProgram balanceProgram(const SpanProgram& p, const ComplexityVector& costs) {
    auto e = costWeightedExtremes(p, costs);
    if (e.maxTrue <= 0 || e.maxFalse <= 0) return p;
    SpanProgram q = p;
    q.A.row(0) *= std::pow(e.maxTrue / e.maxFalse, 0.25);
    return q;
}

namespace {

double predict(const GateNode& g, std::vector<ComplexityPrediction>& out) {
    if (g.kind == GateKind::Leaf) return 1.0;
    std::vector<double> child;
    for (const auto& c : g.children) child.push_back(predict(c, out));
    double s;
    if (g.kind == GateKind::Not) {
        s = child[0];
    } else {
        SpanProgram prog = catalogProgramFor(g, child);
        s = costWeightedWitnessSize(prog, child);
    }
    out.push_back({printNode(g), s, nodeAdv(g)});
    return s;
}

}  // namespace

std::vector<ComplexityPrediction> composedComplexityBound(const Formula& f) {
    std::vector<ComplexityPrediction> out;
    predict(f.root, out);
    return out;
}

nlohmann::json toJson(const WitnessReport& r, const Bits& x) {
    nlohmann::json w = nlohmann::json::array();
    for (Eigen::Index k = 0; k < r.witness.size(); ++k)
        w.push_back({r.witness(k).real(), r.witness(k).imag()});
    return {{"x", bitsToString(x)},
            {"case", r.trueCase ? "true" : "false"},
            {"value", r.value},
            {"witness", w},
            {"residual", r.residual}};
}

}  // namespace spanwalk
