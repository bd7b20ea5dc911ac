#include "mee/density_matrix.hpp"

#include <cmath>

#include "mee/error.hpp"

namespace mee {

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw DomainError("density matrix must be square and non-empty",
                      {{"rows", entries_.rows()}, {"cols", entries_.cols()}});
  }
  if (!entries_.allFinite()) {
    throw DomainError("density matrix entries must be finite");
  }
}

DensityMatrix DensityMatrix::from_diagonal(std::span<const double> diagonal) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(diagonal.size()),
                                               static_cast<Eigen::Index>(diagonal.size()));
  for (std::size_t i = 0; i < diagonal.size(); ++i) {
    m(i, i) = diagonal[i];
  }
  return DensityMatrix(std::move(m));
}

double DensityMatrix::trace() const { return entries_.trace().real(); }

std::vector<double> DensityMatrix::diagonal() const {
  std::vector<double> d(dim());
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = entries_(i, i).real();
  }
  return d;
}

bool DensityMatrix::is_hermitian(double tol) const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool DensityMatrix::is_diagonal(double tol) const {
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
      if (i != j && std::abs(entries_(i, j)) > tol) {
        return false;
      }
    }
  }
  return true;
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  const Eigen::MatrixXcd herm = 0.5 * (entries_ + entries_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

DensityMatrix DensityMatrix::normalized() const {
  const double tr = trace();
  if (!(tr > 0.0)) {
    throw DomainError("cannot normalize a matrix with non-positive trace", {{"trace", tr}});
  }
  return DensityMatrix(entries_ / tr);
}

double hs_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) {
    throw DomainError("dimension mismatch", {{"lhs", a.dim()}, {"rhs", b.dim()}});
  }
  return (a.matrix() - b.matrix()).norm();
}

Eigen::MatrixXcd partial_trace_b(std::span<const std::complex<double>> psi, std::size_t dim_a,
                                 std::size_t dim_b) {
  if (psi.size() != dim_a * dim_b) {
    throw DomainError("state length does not match |A|·|B|",
                      {{"length", psi.size()}, {"dim_a", dim_a}, {"dim_b", dim_b}});
  }
  const auto da = static_cast<Eigen::Index>(dim_a);
  const auto db = static_cast<Eigen::Index>(dim_b);
  Eigen::Map<const Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      psi.data(), da, db);
  const double norm2 = m.squaredNorm();
  if (!(norm2 > 0.0)) {
    throw DomainError("cannot trace out a zero state");
  }
  return (m * m.adjoint()) / norm2;
}

}  // namespace mee
