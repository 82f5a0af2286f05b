#include "entwine/condition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <tuple>

#include "entwine/errors.hpp"
#include "entwine/parallel.hpp"
#include "entwine/perturbation.hpp"

namespace entwine {

namespace {

void require_length(const CrossTable& ct, const ComplexVector& c, const char* what) {
  if (static_cast<std::size_t>(c.size()) != ct.n()) {
    throw ShapeError(std::string(what) + ": coefficient vector has length " +
                     std::to_string(c.size()) + ", table has " + std::to_string(ct.n()) +
                     " states");
  }
}

BipartiteVector superpose(const CrossTable& ct, const ComplexVector& c) {
  const auto& first = ct.states.front();
  ComplexVector acc = ComplexVector::Zero(static_cast<Eigen::Index>(first.size()));
  for (std::size_t i = 0; i < ct.n(); ++i) {
    acc.noalias() += c(static_cast<Eigen::Index>(i)) * ct.states[i].amplitudes();
  }
  return {first.dim_a(), first.dim_b(), std::move(acc)};
}

// Re sum_ij c_i conj(c_j) M_ij.
double quadratic_term(const ComplexMatrix& m, const ComplexVector& c) {
  return (c.transpose() * m * c.conjugate()).value().real();
}

// Makes the largest-magnitude component real and positive.
ComplexVector canonical_phase(ComplexVector c) {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < c.size(); ++k) {
    if (std::abs(c(k)) > std::abs(c(best)) + 1e-12) best = k;
  }
  const double mag = std::abs(c(best));
  if (mag > 0.0) c *= std::conj(c(best)) / mag;
  return c;
}

std::vector<ComplexVector> structured_starts(std::size_t n) {
  const auto dim = static_cast<Eigen::Index>(n);
  std::vector<ComplexVector> starts;
  for (Eigen::Index k = 0; k < dim; ++k) starts.push_back(ComplexVector::Unit(dim, k));
  const double r = 1.0 / std::numbers::sqrt2;
  const Complex phases[] = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
  for (Eigen::Index k = 0; k < dim; ++k) {
    for (Eigen::Index l = k + 1; l < dim; ++l) {
      for (const Complex phase : phases) {
        ComplexVector v = ComplexVector::Zero(dim);
        v(k) = r;
        v(l) = r * phase;
        starts.push_back(std::move(v));
      }
    }
  }
  return starts;
}

struct Descent {
  ComplexVector c;
  double gap;
};

Descent descend(const CrossTable& ct, ComplexVector c, const GapOptions& opts) {
  c.normalize();
  double value = gap(ct, c);
  for (std::size_t it = 0; it < opts.max_iters; ++it) {
    const ComplexVector g = gap_gradient(ct, c);
    // Tangent projection; the real inner product on C^n is Re <a, b>.
    const ComplexVector tangent = g - c.dot(g).real() * c;
    const double g2 = tangent.squaredNorm();
    if (std::sqrt(g2) < opts.grad_tol) break;

    bool accepted = false;
    for (double step = opts.initial_step; step > 1e-16; step *= 0.5) {
      ComplexVector trial = c - step * tangent;
      trial.normalize();
      const double trial_value = gap(ct, trial);
      if (trial_value <= value - opts.armijo * step * g2) {
        c = std::move(trial);
        value = trial_value;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return {std::move(c), value};
}

}  // namespace

std::string to_string(Verdict v) {
  return v == Verdict::kViolated ? "VIOLATED" : "NO_VIOLATION_FOUND";
}

CrossTable build_cross_table(std::span<const BipartiteVector> states) {
  if (states.empty()) throw ValidationError("build_cross_table: empty state set");
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!states[i].same_shape(states.front())) {
      throw ShapeError("build_cross_table: state " + std::to_string(i) + " has a different shape");
    }
    if (std::abs(states[i].norm() - 1.0) > 1e-10) {
      throw ValidationError("build_cross_table: state " + std::to_string(i) +
                            " is not normalized (norm " + std::to_string(states[i].norm()) + ")");
    }
  }
  const std::size_t n = states.size();
  CrossTable ct;
  ct.states.assign(states.begin(), states.end());
  ct.sigma.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      ct.sigma[i * n + j] = partial_trace_b(states[i], states[j]);
    }
    auto& diag = ct.sigma[i * n + i];
    diag = 0.5 * (diag + diag.adjoint()).eval();
  }
  // Enforce sigma_ji = sigma_ij^dagger exactly.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) ct.sigma[j * n + i] = ct.sigma[i * n + j].adjoint();
  }

  const auto dim = static_cast<Eigen::Index>(n);
  ct.m_table = ComplexMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < n; ++i) {
    const DensityOperator sigma_ii(ct.sigma_at(i, i), DensityOperator::Trusted{});
    for (std::size_t j = 0; j < n; ++j) {
      ct.m_table(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          entropy_term(ct.sigma_at(i, j), sigma_ii);
    }
  }
  return ct;
}

double gap(const CrossTable& ct, const ComplexVector& c) {
  require_length(ct, c, "gap");
  return homog_entanglement(superpose(ct, c)) + quadratic_term(ct.m_table, c);
}

ComplexVector gap_gradient(const CrossTable& ct, const ComplexVector& c) {
  require_length(ct, c, "gap_gradient");
  const ComplexMatrix& m = ct.m_table;
  // Quadratic part: d Re(c^T M conj(c)) = Re sum_k dc_k h_k.
  const ComplexVector h = m * c.conjugate() + (m.transpose() * c).conjugate();
  ComplexVector grad = h.conjugate();

  const BipartiteVector phi = superpose(ct, c);
  const ComplexMatrix phi_m = phi.coefficient_matrix();
  const ComplexMatrix a = phi_m * phi_m.adjoint();
  const double tr = a.trace().real();
  if (tr > 0.0) {
    // dE~ = -2 Re sum_k dc_k <L Phi, psi_k>, L = log2(A / tr A) on supp A.
    using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const RowMajor w = support_log2(a, tr) * phi_m;
    const Eigen::Map<const ComplexVector> w_vec(w.data(), w.size());
    for (std::size_t k = 0; k < ct.n(); ++k) {
      const Complex g = w_vec.dot(ct.states[k].amplitudes());
      grad(static_cast<Eigen::Index>(k)) -= 2.0 * std::conj(g);
    }
  }
  return grad;
}

GapCertificate minimize_gap(const CrossTable& ct, const GapOptions& opts) {
  const std::size_t n = ct.n();
  const std::size_t budget = std::max<std::size_t>(opts.restarts, 1);

  std::vector<ComplexVector> structured = structured_starts(n);
  std::vector<std::pair<double, std::size_t>> screened;
  screened.reserve(structured.size());
  for (std::size_t s = 0; s < structured.size(); ++s) {
    screened.emplace_back(gap(ct, structured[s]), s);
  }
  std::ranges::sort(screened);
  const std::size_t structured_count = std::min(structured.size(), std::max<std::size_t>(budget / 2, 1));

  std::vector<ComplexVector> starts;
  starts.reserve(budget);
  for (std::size_t s = 0; s < structured_count; ++s) starts.push_back(structured[screened[s].second]);
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (starts.size() < budget) {
    ComplexVector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      const double re = gauss(rng);
      v(k) = Complex(re, gauss(rng));
    }
    starts.push_back(std::move(v));
  }

  std::vector<Descent> results(starts.size());
  parallel_for(starts.size(), [&](std::size_t r) { results[r] = descend(ct, starts[r], opts); });

  GapCertificate cert;
  cert.seed = opts.seed;
  cert.restarts_used = results.size();
  std::size_t best = 0;
  for (std::size_t r = 0; r < results.size(); ++r) {
    cert.min_history.push_back({r, results[r].gap});
    if (results[r].gap < results[best].gap) best = r;
  }
  cert.c = canonical_phase(results[best].c);
  cert.gap = results[best].gap;
  cert.verdict = cert.gap < -opts.tau_gap ? Verdict::kViolated : Verdict::kNoViolationFound;
  return cert;
}

double hermiticity_check(const CrossTable& ct) {
  double worst = 0.0;
  const auto n = static_cast<Eigen::Index>(ct.n());
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l < n; ++l) {
      if (k == l) continue;
      worst = std::max(worst, std::abs(ct.m_table(k, l) - std::conj(ct.m_table(l, k))));
    }
  }
  return worst;
}

double rotation_derivative(const CrossTable& ct, std::size_t k, std::size_t l,
                           RotationFamily family) {
  if (k >= ct.n() || l >= ct.n()) throw ShapeError("rotation_derivative: index out of range");
  if (k == l) throw ValidationError("rotation_derivative: k and l must differ");
  const double inv_n = 1.0 / static_cast<double>(ct.n());
  const ComplexMatrix& s_kl = ct.sigma_at(k, l);
  const ComplexMatrix& s_lk = ct.sigma_at(l, k);
  const Complex i_unit(0.0, 1.0);

  ComplexMatrix dot_k, dot_l;
  switch (family) {
    case RotationFamily::kRealPlus:
    case RotationFamily::kRealMinus: {
      const double s = family == RotationFamily::kRealPlus ? 1.0 : -1.0;
      dot_k = s * inv_n * (s_lk + s_kl);
      dot_l = -s * inv_n * (s_kl + s_lk);
      break;
    }
    case RotationFamily::kImagPlus:
    case RotationFamily::kImagMinus: {
      const double s = family == RotationFamily::kImagPlus ? 1.0 : -1.0;
      dot_k = s * inv_n * i_unit * (s_lk - s_kl);
      dot_l = s * inv_n * i_unit * (s_kl - s_lk);
      break;
    }
  }
  const DensityOperator a_k(inv_n * ct.sigma_at(k, k), DensityOperator::Trusted{});
  const DensityOperator a_l(inv_n * ct.sigma_at(l, l), DensityOperator::Trusted{});
  return entropy_flow_derivative(a_k, dot_k) + entropy_flow_derivative(a_l, dot_l);
}

SecondDerivativeCheck second_derivative_crosscheck(const Ensemble& e, const ComplexVector& c,
                                                   double h) {
  if (e.empty()) throw ValidationError("second_derivative_crosscheck: empty ensemble");
  if (!e.has_uniform_weights()) {
    throw ValidationError("second_derivative_crosscheck: ensemble weights are not uniform");
  }
  if (static_cast<std::size_t>(c.size()) != e.count()) {
    throw ShapeError("second_derivative_crosscheck: coefficient length mismatch");
  }
  if (std::abs(c.norm() - 1.0) > 1e-10) {
    throw ValidationError("second_derivative_crosscheck: c is not a unit vector");
  }

  const std::size_t n = e.count();
  ComplexVector mixed = ComplexVector::Zero(static_cast<Eigen::Index>(e.dim_a() * e.dim_b()));
  for (std::size_t j = 0; j < n; ++j) mixed += c(static_cast<Eigen::Index>(j)) * e[j].amplitudes();
  const BipartiteVector mixed_vec(e.dim_a(), e.dim_b(), mixed);

  // Old members: psi~_i(t) = psi~_i - t^2/2 conj(c_i) Phi~ + O(t^3), so A_i' = 0
  // and A_i'' = -(conj(c_i) tr_B|Phi~><psi~_i| + c_i tr_B|psi~_i><Phi~|).
  double analytic = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex ci = c(static_cast<Eigen::Index>(i));
    const ComplexMatrix cross = partial_trace_b(mixed_vec, e[i]);
    const ComplexMatrix a_ddot = -(std::conj(ci) * cross + ci * cross.adjoint());
    analytic += entropy_flow_second(reduced_density(e[i]), a_ddot);
  }
  // New member: sin^2(t) E~(Phi~).
  analytic += 2.0 * homog_entanglement(mixed_vec);

  const PerturbationPath path(e, c);
  const double s0 = path.entanglement_at(0.0);
  const double numeric = (path.entanglement_at(h) - 2.0 * s0 + path.entanglement_at(-h)) / (h * h);
  return {analytic, numeric};
}

double superposition_bound(const CrossTable& ct, const ComplexVector& c) {
  require_length(ct, c, "superposition_bound");
  double bound = 0.0;
  const auto n = static_cast<Eigen::Index>(ct.n());
  for (Eigen::Index i = 0; i < n; ++i) {
    bound += std::norm(c(i)) * homog_entanglement(ct.states[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) bound -= (c(i) * std::conj(c(j)) * ct.m_table(i, j)).real();
    }
  }
  return bound;
}

}  // namespace entwine
