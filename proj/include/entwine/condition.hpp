#pragma once

// Optimality test for a set of pure states. A set {psi_i} is optimal iff
//
//   G(c) = E~(sum_i c_i psi_i) + Re sum_ij c_i conj(c_j) M_ij >= 0
//
// for every complex c, with M_ij = tr[sigma_ij log2 sigma_ii] and
// sigma_ij = tr_B |psi_i><psi_j|. This module builds M, evaluates G, and
// searches the unit sphere for violations.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "entwine/ensemble.hpp"
#include "entwine/linalg.hpp"

namespace entwine {

struct CrossTable {
  std::vector<BipartiteVector> states;
  ComplexMatrix m_table;
  std::vector<ComplexMatrix> sigma;  // row-major n x n, sigma[i * n + j] = sigma_ij

  std::size_t n() const { return states.size(); }
  const ComplexMatrix& sigma_at(std::size_t i, std::size_t j) const { return sigma[i * n() + j]; }
};

enum class Verdict { kViolated, kNoViolationFound };

std::string to_string(Verdict v);

struct LocalMinimum {
  std::size_t restart;
  double gap;
};

/// Best point found by minimize_gap. NO_VIOLATION_FOUND is a one-sided
/// statement about the search, not a proof of optimality.
struct GapCertificate {
  ComplexVector c;
  double gap = 0.0;
  Verdict verdict = Verdict::kNoViolationFound;
  std::size_t restarts_used = 0;
  std::vector<LocalMinimum> min_history;
  std::uint64_t seed = 0;
};

struct GapOptions {
  std::size_t restarts = 64;
  std::size_t max_iters = 500;
  double initial_step = 0.5;
  double armijo = 1e-4;
  double grad_tol = 1e-10;
  std::uint64_t seed = 0;
  double tau_gap = 1e-7;
};

/// Requires normalized states of one shape, n >= 1.
CrossTable build_cross_table(std::span<const BipartiteVector> states);

double gap(const CrossTable& ct, const ComplexVector& c);

/// Euclidean gradient of G in complex form: dG = Re sum_k conj(g_k) dc_k.
ComplexVector gap_gradient(const CrossTable& ct, const ComplexVector& c);

/// Multistart projected gradient descent of G on the unit sphere.
///
/// Starting points: the basis vectors and the pairwise combinations
/// (e_k +- e_l)/sqrt2, (e_k +- i e_l)/sqrt2 are screened by their G value and
/// the best of them fill up to half the restart budget; seeded random points
/// fill the rest. Restarts run in parallel and are merged by (gap, index).
GapCertificate minimize_gap(const CrossTable& ct, const GapOptions& opts = {});

/// max_{k != l} |M_kl - conj(M_lk)|. Vanishes for optimal sets.
double hermiticity_check(const CrossTable& ct);

enum class RotationFamily { kRealPlus, kRealMinus, kImagPlus, kImagMinus };

/// d/dtheta at 0 of the total entanglement of the uniform-weight
/// decomposition in which states k and l are rotated into each other (real
/// rotation for kReal*, phase rotation for kImag*).
double rotation_derivative(const CrossTable& ct, std::size_t k, std::size_t l,
                           RotationFamily family);

struct SecondDerivativeCheck {
  double analytic;
  double numeric;
};

/// Second t-derivative at 0 of the total entanglement along the perturbation
/// path, computed from the entropy-flow formula (analytic) and by a central
/// difference with step h (numeric). The analytic value equals (2/n) G(c).
SecondDerivativeCheck second_derivative_crosscheck(const Ensemble& e, const ComplexVector& c,
                                                   double h = 1e-3);

/// Lower bound on E~(sum c_i psi_i) that holds when the set is optimal:
/// sum |c_i|^2 E(psi_i) - Re sum_{i != j} c_i conj(c_j) M_ij.
double superposition_bound(const CrossTable& ct, const ComplexVector& c);

}  // namespace entwine
