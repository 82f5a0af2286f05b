#include "entwine/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "entwine/errors.hpp"

namespace entwine {

namespace {

using RowMajorMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajorMatrix> as_matrix(const BipartiteVector& v) {
  return {v.amplitudes().data(), static_cast<Eigen::Index>(v.dim_a()),
          static_cast<Eigen::Index>(v.dim_b())};
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ShapeError(std::string(what) + ": expected a non-empty square matrix, got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(what) + ": shape mismatch");
  }
}

// Components smaller than this are skipped when fixing eigenvector phases.
constexpr double kPhaseFixThreshold = 1e-10;

// Tr[x * f(a)] where f acts on the eigenvalues of a above the kernel cutoff.
double log_weighted_trace(const ComplexMatrix& x, const ComplexMatrix& a, double scale) {
  return (x * support_log2(a, scale)).trace().real();
}

}  // namespace

ComplexMatrix HermitianSpectrum::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

BipartiteVector::BipartiteVector(std::size_t dim_a, std::size_t dim_b, ComplexVector amplitudes)
    : dim_a_(dim_a), dim_b_(dim_b), amplitudes_(std::move(amplitudes)) {
  if (dim_a == 0 || dim_b == 0) {
    throw ShapeError("BipartiteVector: dimensions must be positive");
  }
  if (static_cast<std::size_t>(amplitudes_.size()) != dim_a * dim_b) {
    throw ShapeError("BipartiteVector: expected " + std::to_string(dim_a * dim_b) +
                     " amplitudes, got " + std::to_string(amplitudes_.size()));
  }
  if (!amplitudes_.allFinite()) {
    throw ValidationError("BipartiteVector: non-finite amplitude");
  }
}

BipartiteVector BipartiteVector::zero(std::size_t dim_a, std::size_t dim_b) {
  return {dim_a, dim_b, ComplexVector::Zero(static_cast<Eigen::Index>(dim_a * dim_b))};
}

BipartiteVector BipartiteVector::basis(std::size_t dim_a, std::size_t dim_b, std::size_t a,
                                       std::size_t b) {
  if (a >= dim_a || b >= dim_b) throw ShapeError("BipartiteVector::basis: index out of range");
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dim_a * dim_b));
  v(static_cast<Eigen::Index>(a * dim_b + b)) = 1.0;
  return {dim_a, dim_b, std::move(v)};
}

BipartiteVector BipartiteVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw DegenerateInputError("cannot normalize the zero vector");
  return {dim_a_, dim_b_, amplitudes_ / n};
}

BipartiteVector BipartiteVector::operator*(Complex scale) const {
  return {dim_a_, dim_b_, amplitudes_ * scale};
}

BipartiteVector BipartiteVector::operator+(const BipartiteVector& other) const {
  if (!same_shape(other)) throw ShapeError("BipartiteVector: cannot add different shapes");
  return {dim_a_, dim_b_, amplitudes_ + other.amplitudes_};
}

ComplexMatrix BipartiteVector::coefficient_matrix() const { return as_matrix(*this); }

DensityOperator::DensityOperator(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
  require_square(matrix_, "DensityOperator");
  if (!matrix_.allFinite()) throw ValidationError("DensityOperator: non-finite entry");
  if (!is_hermitian(matrix_, 1e-12)) throw HermiticityError("DensityOperator: not Hermitian");
  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-10) {
    throw ValidationError("DensityOperator: not positive semidefinite (min eigenvalue " +
                          std::to_string(solver.eigenvalues().minCoeff()) + ")");
  }
}

DensityOperator::DensityOperator(ComplexMatrix matrix, Trusted) : matrix_(std::move(matrix)) {}

BipartiteVector SchmidtForm::reconstruct() const {
  const auto da = static_cast<std::size_t>(basis_a.rows());
  const auto db = static_cast<std::size_t>(basis_b.rows());
  RowMajorMatrix m = basis_a * coefficients.cast<Complex>().asDiagonal() * basis_b.transpose();
  return {da, db, Eigen::Map<const ComplexVector>(m.data(), m.size())};
}

bool is_hermitian(const ComplexMatrix& h, double tol) {
  if (h.rows() != h.cols()) return false;
  return (h - h.adjoint()).norm() <= tol * std::max(1.0, h.norm());
}

HermitianSpectrum herm_eig(const ComplexMatrix& h) {
  require_square(h, "herm_eig");
  if (!is_hermitian(h)) throw HermiticityError("herm_eig: input is not Hermitian");
  // Eigen reads only the lower triangle; symmetrize so both halves count.
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  const Eigen::Index n = h.rows();

  HermitianSpectrum out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  for (Eigen::Index k = 0; k < n; ++k) {
    auto col = out.eigenvectors.col(k);
    for (Eigen::Index r = 0; r < n; ++r) {
      if (std::abs(col(r)) > kPhaseFixThreshold) {
        col *= std::conj(col(r)) / std::abs(col(r));
        col(r) = std::abs(col(r));
        break;
      }
    }
  }
  return out;
}

ComplexMatrix partial_trace_b(const BipartiteVector& psi, const BipartiteVector& phi) {
  if (!psi.same_shape(phi)) throw ShapeError("partial_trace_b: dimension mismatch");
  return as_matrix(psi) * as_matrix(phi).adjoint();
}

DensityOperator reduced_density(const BipartiteVector& psi) {
  ComplexMatrix s = partial_trace_b(psi, psi);
  // Exact Hermiticity; the product is Hermitian only up to rounding.
  s = 0.5 * (s + s.adjoint()).eval();
  return {std::move(s), DensityOperator::Trusted{}};
}

SchmidtForm schmidt(const BipartiteVector& psi) {
  if (psi.squared_norm() == 0.0) throw DegenerateInputError("schmidt: zero vector");
  const ComplexMatrix m = psi.coefficient_matrix();
  const Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > kKernelCutoff * s(0)) ++rank;

  SchmidtForm out;
  out.coefficients = s.head(rank);
  out.basis_a = svd.matrixU().leftCols(rank);
  // m = U S V^H, so the B-side vectors are the conjugated right singular vectors.
  out.basis_b = svd.matrixV().leftCols(rank).conjugate();
  return out;
}

ComplexMatrix support_log2(const ComplexMatrix& a, double scale) {
  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a);
  const RealVector& lambda = solver.eigenvalues();
  const double cutoff = kKernelCutoff * lambda.maxCoeff();
  RealVector logs = RealVector::Zero(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (lambda(k) > cutoff && lambda(k) > 0.0) logs(k) = std::log2(lambda(k) / scale);
  }
  const ComplexMatrix& v = solver.eigenvectors();
  return v * logs.cast<Complex>().asDiagonal() * v.adjoint();
}

double homog_entropy(const ComplexMatrix& a) {
  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a, Eigen::EigenvaluesOnly);
  const RealVector& lambda = solver.eigenvalues();
  const double max_lambda = lambda.maxCoeff();
  if (max_lambda <= 0.0) return 0.0;
  const double cutoff = kKernelCutoff * max_lambda;
  double total = 0.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (lambda(k) > cutoff) total += lambda(k);
  }
  double h = 0.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (lambda(k) > cutoff) h -= lambda(k) * std::log2(lambda(k) / total);
  }
  return h;
}

double vn_entropy(const DensityOperator& rho) {
  if (std::abs(rho.trace() - 1.0) > 1e-10) {
    throw NormalizationError("vn_entropy: trace " + std::to_string(rho.trace()) + " is not 1");
  }
  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho.matrix(), Eigen::EigenvaluesOnly);
  double h = 0.0;
  for (const double lambda : solver.eigenvalues()) {
    if (lambda > 0.0) h -= lambda * std::log2(lambda);
  }
  return std::clamp(h, 0.0, std::log2(static_cast<double>(rho.dim())));
}

double homog_entanglement(const BipartiteVector& psi) {
  if (psi.squared_norm() == 0.0) return 0.0;
  // Schmidt coefficients from the SVD keep small eigenvalues of tr_B|psi><psi|
  // accurate to relative precision.
  const Eigen::JacobiSVD<ComplexMatrix> svd(psi.coefficient_matrix());
  const RealVector lambda = svd.singularValues().array().square();
  const double cutoff = kKernelCutoff * lambda.maxCoeff();
  double total = 0.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (lambda(k) > cutoff) total += lambda(k);
  }
  double h = 0.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (lambda(k) > cutoff) h -= lambda(k) * std::log2(lambda(k) / total);
  }
  return h;
}

Complex entropy_term(const ComplexMatrix& sigma_ij, const DensityOperator& sigma_ii) {
  require_same_shape(sigma_ij, sigma_ii.matrix(), "entropy_term");
  return (sigma_ij * support_log2(sigma_ii.matrix())).trace();
}

double entropy_flow_derivative(const DensityOperator& a, const ComplexMatrix& a_dot) {
  require_same_shape(a_dot, a.matrix(), "entropy_flow_derivative");
  if (!is_hermitian(a_dot)) throw HermiticityError("entropy_flow_derivative: a_dot not Hermitian");
  if (a.trace() <= 0.0) throw ValidationError("entropy_flow_derivative: trace must be positive");
  return -log_weighted_trace(a_dot, a.matrix(), a.trace());
}

double entropy_flow_second(const DensityOperator& a0, const ComplexMatrix& a_ddot) {
  require_same_shape(a_ddot, a0.matrix(), "entropy_flow_second");
  if (!is_hermitian(a_ddot)) throw HermiticityError("entropy_flow_second: a_ddot not Hermitian");
  if (a0.trace() <= 0.0) throw ValidationError("entropy_flow_second: trace must be positive");
  return -log_weighted_trace(a_ddot, a0.matrix(), a0.trace());
}

}  // namespace entwine
