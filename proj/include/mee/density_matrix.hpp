#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mee {

/// Small Hermitian matrix. The trace is reported, never forced to one.
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd entries);

  static DensityMatrix from_diagonal(std::span<const double> diagonal);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  const Eigen::MatrixXcd& matrix() const noexcept { return entries_; }
  std::complex<double> operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }

  double trace() const;
  std::vector<double> diagonal() const;
  bool is_hermitian(double tol = 1e-12) const;
  bool is_diagonal(double tol = 0.0) const;
  /// Eigenvalues of the Hermitian part, ascending.
  Eigen::VectorXd eigenvalues() const;
  DensityMatrix normalized() const;

 private:
  Eigen::MatrixXcd entries_;
};

/// Hilbert-Schmidt (Frobenius) distance ‖A - B‖₂.
double hs_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Tr_B |ψ><ψ| for ψ in A ⊗ B stored A-major (index a·|B| + b).
/// The state is normalized first.
Eigen::MatrixXcd partial_trace_b(std::span<const std::complex<double>> psi, std::size_t dim_a,
                                 std::size_t dim_b);

}  // namespace mee
