#include "entwine/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "entwine/errors.hpp"
#include "entwine/parallel.hpp"

namespace entwine {

namespace {

using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

ComplexMatrix stacked(const Ensemble& e) {
  ComplexMatrix p(static_cast<Eigen::Index>(e.dim_a() * e.dim_b()),
                  static_cast<Eigen::Index>(e.count()));
  for (std::size_t i = 0; i < e.count(); ++i) p.col(static_cast<Eigen::Index>(i)) = e[i].amplitudes();
  return p;
}

// Orthonormal factor of a thin QR with the diagonal of R made positive.
ComplexMatrix qr_retract(const ComplexMatrix& y) {
  const Eigen::HouseholderQR<ComplexMatrix> qr(y);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(y.rows(), y.cols());
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < y.cols(); ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0.0) q.col(k) *= r(k, k) / mag;
  }
  return q;
}

struct StiefelRun {
  ComplexMatrix u;
  double value;
  std::size_t iterations;
};

StiefelRun stiefel_descent(const Ensemble& base, ComplexMatrix u, const EofOptions& opts) {
  ComplexMatrix grad;
  double value = decomposition_entanglement(base, u, &grad);
  std::size_t it = 0;
  for (; it < opts.max_iters; ++it) {
    const ComplexMatrix uh_g = u.adjoint() * grad;
    const ComplexMatrix riem = grad - u * (0.5 * (uh_g + uh_g.adjoint()));
    const double g2 = riem.squaredNorm();
    if (std::sqrt(g2) < opts.tol) break;

    bool accepted = false;
    for (double step = opts.initial_step; step > 1e-16; step *= 0.5) {
      ComplexMatrix trial = qr_retract(u - step * riem);
      ComplexMatrix trial_grad;
      const double trial_value = decomposition_entanglement(base, trial, &trial_grad);
      if (trial_value <= value - opts.armijo * step * g2) {
        u = std::move(trial);
        grad = std::move(trial_grad);
        value = trial_value;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return {std::move(u), value, it};
}

Ensemble apply_isometry(const Ensemble& base, const ComplexMatrix& u) {
  // Re-orthonormalize so RightUnitary's 1e-10 check holds after long runs.
  return transform(base, RightUnitary(qr_retract(u)));
}

}  // namespace

double decomposition_entanglement(const Ensemble& base, const ComplexMatrix& u,
                                  ComplexMatrix* grad) {
  if (static_cast<std::size_t>(u.cols()) != base.count()) {
    throw ShapeError("decomposition_entanglement: isometry columns do not match ensemble size");
  }
  const auto da = static_cast<Eigen::Index>(base.dim_a());
  const auto db = static_cast<Eigen::Index>(base.dim_b());
  const ComplexMatrix p = stacked(base);
  const ComplexMatrix phis = p * u.transpose();  // column j = sum_i U_ji psi~_i
  ComplexMatrix w;
  if (grad != nullptr) w = ComplexMatrix::Zero(phis.rows(), phis.cols());

  double total = 0.0;
  for (Eigen::Index j = 0; j < phis.cols(); ++j) {
    const Eigen::Map<const RowMajor> phi(phis.col(j).data(), da, db);
    const ComplexMatrix a = phi * phi.adjoint();
    const double tr = a.trace().real();
    if (tr <= 0.0) continue;
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a);
    const RealVector& lambda = solver.eigenvalues();
    const double cutoff = kKernelCutoff * lambda.maxCoeff();
    RealVector logs = RealVector::Zero(lambda.size());
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
      if (lambda(k) > cutoff && lambda(k) > 0.0) {
        logs(k) = std::log2(lambda(k) / tr);
        total -= lambda(k) * logs(k);
      }
    }
    if (grad != nullptr) {
      const ComplexMatrix& v = solver.eigenvectors();
      const RowMajor lw = v * logs.cast<Complex>().asDiagonal() * v.adjoint() * phi;
      w.col(j) = Eigen::Map<const ComplexVector>(lw.data(), lw.size());
    }
  }
  if (grad != nullptr) *grad = -2.0 * (p.adjoint() * w).transpose();
  return total;
}

Ensemble improve(const Ensemble& e, const GapCertificate& cert, const ImproveOptions& opts) {
  if (cert.verdict != Verdict::kViolated || !(cert.gap < -opts.tau_gap)) {
    throw ValidationError("improve: certificate does not report a violation");
  }
  if (static_cast<std::size_t>(cert.c.size()) != e.count()) {
    throw ShapeError("improve: certificate length " + std::to_string(cert.c.size()) +
                     " does not match ensemble size " + std::to_string(e.count()));
  }
  ComplexVector direction = cert.c;
  if (!e.has_uniform_weights()) {
    const auto w = e.weights();
    for (std::size_t i = 0; i < w.size(); ++i) {
      direction(static_cast<Eigen::Index>(i)) /= std::sqrt(w[i]);
    }
  }
  direction.normalize();
  const PerturbationPath path(e, direction);

  const double start = avg_entanglement(e);
  const double required = std::min(1e-6, std::abs(cert.gap) * 1e-2);
  double best_t = 0.0;
  double best_value = start;
  auto eval = [&](double t) {
    const double v = path.entanglement_at(t);
    if (v < best_value) {
      best_value = v;
      best_t = t;
    }
    return v;
  };

  // Golden-section search on (0, t_max].
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0;
  double hi = opts.t_max;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = eval(x1);
  double f2 = eval(x2);
  for (std::size_t used = 2; used < opts.evaluations; ++used) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = eval(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = eval(x2);
    }
  }
  // The bracket end t_max is never sampled by the interior points.
  if (opts.evaluations > 0) eval(opts.t_max);

  if (!(best_value <= start - required)) {
    throw SearchFailure("improve: no decrease of at least " + std::to_string(required) +
                        " bits found along the certificate direction");
  }
  return path.at(best_t);
}

EofResult eof_min(const DensityOperator& rho, std::size_t dim_a, std::size_t dim_b,
                  std::optional<std::size_t> m, const EofOptions& opts) {
  if (std::abs(rho.trace() - 1.0) > 1e-10) {
    throw ValidationError("eof_min: state trace " + std::to_string(rho.trace()) + " is not 1");
  }
  const Ensemble base = spectral_ensemble(rho, dim_a, dim_b);
  const std::size_t rank = base.count();
  if (rank == 0) throw ValidationError("eof_min: zero state");
  const std::size_t size = m.value_or(rank * rank);
  if (size < rank) {
    throw ValidationError("eof_min: decomposition size " + std::to_string(size) +
                          " is below the rank " + std::to_string(rank));
  }

  const std::size_t restarts = std::max<std::size_t>(opts.restarts, 1);
  std::vector<std::uint64_t> seeds(restarts);
  std::mt19937_64 seeder(opts.seed);
  for (auto& s : seeds) s = seeder();

  std::vector<StiefelRun> runs(restarts);
  parallel_for(restarts, [&](std::size_t r) {
    runs[r] = stiefel_descent(base, random_right_unitary(size, rank, seeds[r]).matrix(), opts);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].value < runs[best].value) best = r;
  }

  EofResult out;
  out.ensemble = apply_isometry(base, runs[best].u);
  out.value = avg_entanglement(out.ensemble);
  out.m = size;
  out.iterations = runs[best].iterations;
  out.restarts = restarts;
  out.seed = opts.seed;
  return out;
}

AdditivityReport additivity_probe(const Ensemble& e1, const Ensemble& e2, const GapOptions& opts) {
  const auto started = std::chrono::steady_clock::now();
  AdditivityReport report;
  report.product = tensor_product_ensemble(e1, e2);
  const auto states = report.product.states();
  const CrossTable ct = build_cross_table(states);
  report.hermiticity_residual = hermiticity_check(ct);
  report.certificate = minimize_gap(ct, opts);

  if (report.certificate.verdict == Verdict::kViolated) {
    // Uniform weights over the product set; the verdict is weight-independent.
    const std::vector<double> w(states.size(), 1.0 / static_cast<double>(states.size()));
    const Ensemble uniform = from_weighted(w, states);
    report.product_entanglement = avg_entanglement(uniform);
    try {
      report.improved_entanglement = avg_entanglement(improve(uniform, report.certificate));
      report.double_check_note = "improve found a strictly better decomposition";
    } catch (const SearchFailure& err) {
      report.double_check_note = std::string("improve failed: ") + err.what();
    }
    const DensityOperator rho = density(uniform);
    const std::size_t rank = spectral_ensemble(rho, uniform.dim_a(), uniform.dim_b()).count();
    EofOptions eof_opts;
    eof_opts.restarts = 4;
    eof_opts.seed = opts.seed;
    const std::size_t size = std::max(rank, std::min<std::size_t>(rank * rank, 64));
    report.eof_upper_bound = eof_min(rho, uniform.dim_a(), uniform.dim_b(), size, eof_opts).value;
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace entwine
