#pragma once

#include "npg/mdp.hpp"

namespace npg {

/// Singular values below relative_cutoff * sigma_max are treated as zero.
inline constexpr double kPinvRelativeCutoff = 1e-10;

/// Moore-Penrose pseudoinverse through an SVD.
Matrix pseudo_inverse(const Matrix& m, double relative_cutoff = kPinvRelativeCutoff);

/// Minimal-norm minimizer of ||a x - b||_2.
Vector min_norm_least_squares(const Matrix& a, const Vector& b,
                              double relative_cutoff = kPinvRelativeCutoff);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& symmetric);

/// Eigen-split of a symmetric PSD matrix into range and null space; eigenvalues
/// at or below relative_cutoff * max|lambda| count as null.
struct SymmetricRange {
  Matrix basis;   // columns span the range
  Vector values;  // matching eigenvalues, all > cutoff
  Matrix null_basis;
};
SymmetricRange symmetric_range(const Matrix& symmetric,
                               double relative_cutoff = kPinvRelativeCutoff);

}  // namespace npg
