#include "spanwalk/linalg.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <stdexcept>

namespace spanwalk {

Bits bitsFromString(const std::string& s) {
    Bits x;
    x.reserve(s.size());
    for (char c : s) {
        if (c == '0') x.push_back(0);
        else if (c == '1') x.push_back(1);
        else throw std::invalid_argument("bitstring may only contain 0 and 1: " + s);
    }
    return x;
}

namespace linalg {

namespace {
Eigen::JacobiSVD<MatrixXcd> svd(const MatrixXcd& a, unsigned opts) {
    return Eigen::JacobiSVD<MatrixXcd>(a, opts);
}
}  // namespace

MatrixXcd pinv(const MatrixXcd& a, double rel) {
    if (a.size() == 0) return MatrixXcd::Zero(a.cols(), a.rows());
    auto s = svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& sv = s.singularValues();
    double cut = std::max(rel * (sv.size() ? sv(0) : 0.0), kAbsoluteFloor);
    VectorXd inv = VectorXd::Zero(sv.size());
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv(k) > cut && sv(k) > 0) inv(k) = 1.0 / sv(k);
    return s.matrixV() * inv.asDiagonal() * s.matrixU().adjoint();
}

int rank(const MatrixXcd& a, double rel) {
    if (a.size() == 0) return 0;
    auto s = svd(a, 0);
    const VectorXd& sv = s.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    double cut = std::max(rel * sv(0), kAbsoluteFloor);
    int r = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv(k) > cut) ++r;
    return r;
}

MatrixXcd nullSpace(const MatrixXcd& a, double rel) {
    const Eigen::Index n = a.cols();
    if (a.rows() == 0 || n == 0) return MatrixXcd::Identity(n, n);
    auto s = svd(a, Eigen::ComputeFullV);
    const VectorXd& sv = s.singularValues();
    double cut = std::max(rel * (sv.size() ? sv(0) : 0.0), kAbsoluteFloor);
    Eigen::Index r = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv(k) > cut) ++r;
    return s.matrixV().rightCols(n - r);
}

double spectralNorm(const MatrixXcd& a) {
    if (a.size() == 0) return 0.0;
    return svd(a, 0).singularValues()(0);
}

MatrixXcd rangeProjector(const MatrixXcd& a, double rel) {
    return a * pinv(a, rel);
}

double maxAbs(const MatrixXcd& a) {
    return a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace linalg
}  // namespace spanwalk
