#pragma once

// Closed-form two-qubit entanglement of formation and an optimal
// decomposition, used as ground truth for the numerical routines.

#include <cstdint>

#include "entwine/ensemble.hpp"
#include "entwine/linalg.hpp"

namespace entwine {

/// 4x4 density matrix with unit trace on C^2 (x) C^2.
class TwoQubitState {
 public:
  /// Validates shape, Hermiticity, positivity (>= -1e-10) and trace (1e-10).
  explicit TwoQubitState(ComplexMatrix matrix);
  explicit TwoQubitState(const DensityOperator& rho) : TwoQubitState(rho.matrix()) {}

  const ComplexMatrix& matrix() const { return rho_.matrix(); }
  const DensityOperator& density() const { return rho_; }

 private:
  DensityOperator rho_;
};

/// sigma_y (x) sigma_y, real.
ComplexMatrix spin_flip_operator();

/// -p log2 p - (1-p) log2 (1-p).
double binary_entropy(double p);

/// h((1 + sqrt(1 - C^2)) / 2).
double eof_from_concurrence(double c);

/// max(0, l1 - l2 - l3 - l4), l_k the descending square roots of the
/// eigenvalues of rho (sy x sy) conj(rho) (sy x sy).
double concurrence(const TwoQubitState& rho);

double eof_2qubit(const TwoQubitState& rho);

/// |<psi|psi~>| / <psi|psi> for a non-zero two-qubit vector.
double pure_concurrence(const BipartiteVector& psi);

struct WoottersDecomposition {
  Ensemble ensemble{2, 2};
  double concurrence = 0.0;
  /// Set when the direct construction failed its self-check and the state
  /// was jittered by 1e-10 with `jitter_seed` before retrying.
  bool jittered = false;
  std::uint64_t jitter_seed = 0;
};

/// At most four vectors realizing rho, each with concurrence C(rho), so the
/// average entanglement equals eof_2qubit(rho).
WoottersDecomposition optimal_decomposition_2qubit(const TwoQubitState& rho);

}  // namespace entwine
