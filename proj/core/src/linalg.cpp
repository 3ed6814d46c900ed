#include "npg/linalg.hpp"

#include <Eigen/SVD>

namespace npg {

Matrix pseudo_inverse(const Matrix& m, double relative_cutoff) {
  if (m.size() == 0) return Matrix::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const double threshold = relative_cutoff * (sigma.size() > 0 ? sigma[0] : 0.0);
  Vector inv = Vector::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma[i] > threshold && sigma[i] > 0.0) inv[i] = 1.0 / sigma[i];
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Vector min_norm_least_squares(const Matrix& a, const Vector& b, double relative_cutoff) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const double threshold = relative_cutoff * (sigma.size() > 0 ? sigma[0] : 0.0);
  Vector coeffs = svd.matrixU().transpose() * b;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    coeffs[i] = (sigma[i] > threshold && sigma[i] > 0.0) ? coeffs[i] / sigma[i] : 0.0;
  }
  return svd.matrixV() * coeffs;
}

double min_eigenvalue(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

SymmetricRange symmetric_range(const Matrix& symmetric, double relative_cutoff) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric);
  const Vector& values = eig.eigenvalues();
  const double top = values.size() > 0 ? values.cwiseAbs().maxCoeff() : 0.0;
  const double threshold = relative_cutoff * top;
  Eigen::Index kept = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] > threshold && values[i] > 0.0) ++kept;
  }
  SymmetricRange out;
  out.basis.resize(symmetric.rows(), kept);
  out.values.resize(kept);
  out.null_basis.resize(symmetric.rows(), values.size() - kept);
  Eigen::Index r = 0, n = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] > threshold && values[i] > 0.0) {
      out.basis.col(r) = eig.eigenvectors().col(i);
      out.values[r++] = values[i];
    } else {
      out.null_basis.col(n++) = eig.eigenvectors().col(i);
    }
  }
  return out;
}

}  // namespace npg
