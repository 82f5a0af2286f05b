#pragma once

// Dense complex linear algebra and the entropy calculus of bipartite pure
// states. All entropies are in bits.

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace entwine {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Eigenvalues below this fraction of the largest one are treated as kernel.
inline constexpr double kKernelCutoff = 1e-12;

/// Tolerance for Hermiticity checks, relative to max(1, ||H||_F).
inline constexpr double kHermiticityTol = 1e-10;

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted descending. Each eigenvector column has its first
/// component of non-negligible magnitude made real and positive, so the
/// result is reproducible for a fixed input. Under degenerate eigenvalues the
/// eigenvectors are not unique; nothing downstream depends on that choice.
struct HermitianSpectrum {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;

  ComplexMatrix reconstruct() const;
};

/// A (possibly unnormalized) vector on C^dim_a (x) C^dim_b.
///
/// Amplitude index convention is a * dim_b + b.
class BipartiteVector {
 public:
  BipartiteVector(std::size_t dim_a, std::size_t dim_b, ComplexVector amplitudes);

  /// Zero vector of the given shape.
  static BipartiteVector zero(std::size_t dim_a, std::size_t dim_b);
  /// Product basis vector |a>|b>.
  static BipartiteVector basis(std::size_t dim_a, std::size_t dim_b, std::size_t a,
                               std::size_t b);

  std::size_t dim_a() const { return dim_a_; }
  std::size_t dim_b() const { return dim_b_; }
  std::size_t size() const { return dim_a_ * dim_b_; }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  Complex operator()(std::size_t a, std::size_t b) const { return amplitudes_(a * dim_b_ + b); }

  double squared_norm() const { return amplitudes_.squaredNorm(); }
  double norm() const { return amplitudes_.norm(); }
  bool same_shape(const BipartiteVector& other) const {
    return dim_a_ == other.dim_a_ && dim_b_ == other.dim_b_;
  }

  /// Unit vector along this one; throws DegenerateInputError for zero.
  BipartiteVector normalized() const;

  BipartiteVector operator*(Complex scale) const;
  BipartiteVector operator+(const BipartiteVector& other) const;

  /// Row-major dim_a x dim_b coefficient matrix.
  ComplexMatrix coefficient_matrix() const;

  /// Exact equality of shape and amplitudes.
  friend bool operator==(const BipartiteVector& x, const BipartiteVector& y) {
    return x.same_shape(y) && x.amplitudes_ == y.amplitudes_;
  }

 private:
  std::size_t dim_a_;
  std::size_t dim_b_;
  ComplexVector amplitudes_;
};

/// Hermitian positive semidefinite operator. The trace is not required to be
/// one; unnormalized operators carry the weight of unnormalized vectors.
class DensityOperator {
 public:
  /// Validates Hermiticity (1e-12) and positivity (min eigenvalue >= -1e-10).
  explicit DensityOperator(ComplexMatrix matrix);

  /// Skips validation. For operators that are PSD by construction.
  struct Trusted {};
  DensityOperator(ComplexMatrix matrix, Trusted);

  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  const ComplexMatrix& matrix() const { return matrix_; }
  double trace() const { return matrix_.trace().real(); }

 private:
  ComplexMatrix matrix_;
};

/// Schmidt decomposition sum_k s_k |a_k> (x) |b_k>.
struct SchmidtForm {
  RealVector coefficients;  // descending, strictly positive
  ComplexMatrix basis_a;    // dim_a x rank, orthonormal columns
  ComplexMatrix basis_b;    // dim_b x rank, orthonormal columns

  std::size_t rank() const { return static_cast<std::size_t>(coefficients.size()); }
  BipartiteVector reconstruct() const;
};

bool is_hermitian(const ComplexMatrix& h, double tol = kHermiticityTol);

HermitianSpectrum herm_eig(const ComplexMatrix& h);

/// tr_B |psi><phi|, a dim_a x dim_a matrix.
ComplexMatrix partial_trace_b(const BipartiteVector& psi, const BipartiteVector& phi);

/// tr_B |psi><psi|.
DensityOperator reduced_density(const BipartiteVector& psi);

SchmidtForm schmidt(const BipartiteVector& psi);

/// -tr rho log2 rho. Requires trace one within 1e-10.
double vn_entropy(const DensityOperator& rho);

/// ||psi||^2 E(psi / ||psi||) = -tr s log2(s / tr s), s = tr_B|psi><psi|.
/// Zero for the zero vector.
double homog_entanglement(const BipartiteVector& psi);

/// -tr a log2(a / tr a) for a PSD matrix a, on the support of a.
double homog_entropy(const ComplexMatrix& a);

/// log2(a / scale) restricted to the support of the PSD matrix a
/// (eigenvalues above kKernelCutoff * max eigenvalue). Zero on the kernel.
ComplexMatrix support_log2(const ComplexMatrix& a, double scale = 1.0);

/// tr[sigma_ij log2 sigma_ii], summed over the support of sigma_ii only.
Complex entropy_term(const ComplexMatrix& sigma_ij, const DensityOperator& sigma_ii);

/// First derivative of t -> -tr[A log2(A / tr A)] along direction a_dot:
/// -tr[a_dot log2(a / tr a)] on the support of a.
double entropy_flow_derivative(const DensityOperator& a, const ComplexMatrix& a_dot);

/// Second derivative of the same flow at a point where A' = 0:
/// -tr[a_ddot log2(a0 / tr a0)]. The vanishing first derivative is the
/// caller's responsibility.
double entropy_flow_second(const DensityOperator& a0, const ComplexMatrix& a_ddot);

}  // namespace entwine
