#pragma once

// Constructive side of the optimality condition: turning a violation
// certificate into a better decomposition, and direct minimization of the
// average entanglement over all decompositions of a state.

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>

#include "entwine/condition.hpp"
#include "entwine/ensemble.hpp"
#include "entwine/perturbation.hpp"

namespace entwine {

struct ImproveOptions {
  double t_max = std::numbers::pi / 2.0;
  std::size_t evaluations = 60;
  double tau_gap = 1e-7;
};

/// Strictly better decomposition of the same state, found by golden-section
/// search in t along the perturbation path seeded by a violation certificate.
///
/// Uniform-weight ensembles use cert.c directly. For other weights the
/// direction is rescaled by 1/sqrt(p_i) so the path's curvature at t = 0 is
/// still proportional to the certified negative gap.
///
/// Throws ValidationError when the certificate is not a violation and
/// SearchFailure when the decrease is below min(1e-6, 1e-2 |gap|).
Ensemble improve(const Ensemble& e, const GapCertificate& cert, const ImproveOptions& opts = {});

struct EofOptions {
  std::size_t restarts = 32;
  std::size_t max_iters = 500;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  double initial_step = 0.5;
  double armijo = 1e-4;
};

struct EofResult {
  double value = 0.0;
  Ensemble ensemble{1, 1};
  std::size_t m = 0;
  std::size_t iterations = 0;
  std::size_t restarts = 0;
  std::uint64_t seed = 0;
};

/// Upper bound on the entanglement of formation of rho (trace one) by
/// projected gradient descent over m x n isometries on the Stiefel manifold,
/// n = rank rho. Defaults to m = rank^2.
EofResult eof_min(const DensityOperator& rho, std::size_t dim_a, std::size_t dim_b,
                  std::optional<std::size_t> m = std::nullopt, const EofOptions& opts = {});

/// sum_j E~(sum_i U_ji psi~_i) and its Euclidean gradient in complex form
/// (dF = Re tr(grad^dagger dU)).
double decomposition_entanglement(const Ensemble& base, const ComplexMatrix& u,
                                  ComplexMatrix* grad = nullptr);

struct AdditivityReport {
  Ensemble product{1, 1};
  GapCertificate certificate;
  double hermiticity_residual = 0.0;
  double seconds = 0.0;
  /// Filled only when the certificate reports a violation.
  std::optional<double> product_entanglement;
  std::optional<double> improved_entanglement;
  std::optional<double> eof_upper_bound;
  std::string double_check_note;
};

/// Runs the optimality test on the tensor-product set of e1 and e2. A
/// violation is double-checked by improve and eof_min and reported, never
/// asserted.
AdditivityReport additivity_probe(const Ensemble& e1, const Ensemble& e2,
                                  const GapOptions& opts = {});

}  // namespace entwine
