#pragma once

#include "spanwalk/types.hpp"

namespace spanwalk::linalg {

// Singular values at or below this are treated as zero regardless of the
// relative cut, so numerically vanishing matrices are not inverted.
inline constexpr double kAbsoluteFloor = 1e-12;

// Moore-Penrose pseudoinverse; singular values below rel * sigma_max are dropped.
MatrixXcd pinv(const MatrixXcd& a, double rel = 1e-10);

int rank(const MatrixXcd& a, double rel = 1e-10);

// Orthonormal basis of ker(a), one column per null direction.
MatrixXcd nullSpace(const MatrixXcd& a, double rel = 1e-10);

double spectralNorm(const MatrixXcd& a);

// Orthogonal projector onto range(a).
MatrixXcd rangeProjector(const MatrixXcd& a, double rel = 1e-10);

double maxAbs(const MatrixXcd& a);

}  // namespace spanwalk::linalg
