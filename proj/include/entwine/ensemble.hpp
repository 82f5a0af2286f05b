#pragma once

// Pure-state decompositions of mixed states, kept in "tilde" form: each
// member is an unnormalized vector whose squared norm is its weight.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "entwine/linalg.hpp"

namespace entwine {

/// Members with squared norm at or below this are dropped.
inline constexpr double kWeightCutoff = 1e-14;

class Ensemble {
 public:
  /// Empty ensemble on the given split.
  Ensemble(std::size_t dim_a, std::size_t dim_b);
  /// Prunes members with squared norm <= kWeightCutoff. Order is preserved.
  Ensemble(std::size_t dim_a, std::size_t dim_b, std::vector<BipartiteVector> vectors);

  std::size_t dim_a() const { return dim_a_; }
  std::size_t dim_b() const { return dim_b_; }
  std::size_t count() const { return vectors_.size(); }
  bool empty() const { return vectors_.empty(); }

  const std::vector<BipartiteVector>& vectors() const { return vectors_; }
  const BipartiteVector& operator[](std::size_t i) const { return vectors_[i]; }

  /// p_i = ||psi~_i||^2.
  std::vector<double> weights() const;
  /// psi_i = psi~_i / ||psi~_i||.
  std::vector<BipartiteVector> states() const;
  double total_weight() const;
  /// True when all weights agree within `tol` (relative to their mean).
  bool has_uniform_weights(double tol = 1e-10) const;

 private:
  std::size_t dim_a_;
  std::size_t dim_b_;
  std::vector<BipartiteVector> vectors_;
};

/// An m x n matrix with U^dagger U = 1_n.
class RightUnitary {
 public:
  /// Validates m >= n and isometry to 1e-10 (Frobenius).
  explicit RightUnitary(ComplexMatrix u);

  std::size_t rows() const { return static_cast<std::size_t>(u_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(u_.cols()); }
  const ComplexMatrix& matrix() const { return u_; }

 private:
  ComplexMatrix u_;
};

/// {(p_i, psi_i)} -> {sqrt(p_i) psi_i}, dropping zero weights.
Ensemble from_weighted(std::span<const double> weights, std::span<const BipartiteVector> states);

/// sum_i |psi~_i><psi~_i| on the full dim_a*dim_b space.
DensityOperator density(const Ensemble& e);

/// sum_i E~(psi~_i) = sum_i p_i E(psi_i).
double avg_entanglement(const Ensemble& e);

/// phi~_j = sum_i U_ji psi~_i.
Ensemble transform(const Ensemble& e, const RightUnitary& u);

/// sqrt(lambda_k) v_k for the eigenpairs of rho above the kernel cutoff.
Ensemble spectral_ensemble(const DensityOperator& rho, std::size_t dim_a, std::size_t dim_b);

/// All products psi~_i (x) phi~_j on the split (A1 A2 | B1 B2); row-major in
/// (i, j).
Ensemble tensor_product_ensemble(const Ensemble& e1, const Ensemble& e2);

/// Tensor product of two bipartite vectors regrouped as (a1 a2 | b1 b2).
BipartiteVector tensor_product(const BipartiteVector& x, const BipartiteVector& y);

/// Seeded Haar-like isometry from the QR factors of a complex Gaussian matrix.
RightUnitary random_right_unitary(std::size_t m, std::size_t n, std::uint64_t seed);

}  // namespace entwine
