#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace spanwalk {

using cd = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;
using VectorXcd = Eigen::VectorXcd;
using MatrixXd = Eigen::MatrixXd;
using VectorXd = Eigen::VectorXd;

// Input assignment x_1..x_n, stored 0-based.
using Bits = std::vector<int>;

// Bits of v with x_1 as the most significant bit.
inline Bits bitsFromIndex(std::uint64_t v, int n) {
    Bits x(n);
    for (int k = 0; k < n; ++k) x[k] = int((v >> (n - 1 - k)) & 1u);
    return x;
}

inline std::uint64_t indexFromBits(const Bits& x) {
    std::uint64_t v = 0;
    for (int b : x) v = (v << 1) | std::uint64_t(b & 1);
    return v;
}

inline std::string bitsToString(const Bits& x) {
    std::string s;
    for (int b : x) s.push_back(b ? '1' : '0');
    return s;
}

Bits bitsFromString(const std::string& s);

}  // namespace spanwalk
