#include "entwine/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "entwine/errors.hpp"

namespace entwine {

Ensemble::Ensemble(std::size_t dim_a, std::size_t dim_b) : dim_a_(dim_a), dim_b_(dim_b) {
  if (dim_a == 0 || dim_b == 0) throw ShapeError("Ensemble: dimensions must be positive");
}

Ensemble::Ensemble(std::size_t dim_a, std::size_t dim_b, std::vector<BipartiteVector> vectors)
    : Ensemble(dim_a, dim_b) {
  vectors_.reserve(vectors.size());
  for (auto& v : vectors) {
    if (v.dim_a() != dim_a || v.dim_b() != dim_b) {
      throw ShapeError("Ensemble: member shape does not match the declared split");
    }
    if (v.squared_norm() > kWeightCutoff) vectors_.push_back(std::move(v));
  }
}

std::vector<double> Ensemble::weights() const {
  std::vector<double> w;
  w.reserve(vectors_.size());
  for (const auto& v : vectors_) w.push_back(v.squared_norm());
  return w;
}

std::vector<BipartiteVector> Ensemble::states() const {
  std::vector<BipartiteVector> s;
  s.reserve(vectors_.size());
  for (const auto& v : vectors_) s.push_back(v.normalized());
  return s;
}

double Ensemble::total_weight() const {
  double total = 0.0;
  for (const auto& v : vectors_) total += v.squared_norm();
  return total;
}

bool Ensemble::has_uniform_weights(double tol) const {
  if (vectors_.empty()) return true;
  const auto w = weights();
  const double mean = total_weight() / static_cast<double>(w.size());
  return std::ranges::all_of(w, [&](double x) { return std::abs(x - mean) <= tol * mean; });
}

RightUnitary::RightUnitary(ComplexMatrix u) : u_(std::move(u)) {
  if (u_.rows() < u_.cols() || u_.cols() == 0) {
    throw ShapeError("RightUnitary: need m >= n >= 1, got " + std::to_string(u_.rows()) + "x" +
                     std::to_string(u_.cols()));
  }
  const auto n = u_.cols();
  const double err = (u_.adjoint() * u_ - ComplexMatrix::Identity(n, n)).norm();
  if (err > 1e-10) {
    throw ValidationError("RightUnitary: U^dagger U deviates from identity by " +
                          std::to_string(err));
  }
}

Ensemble from_weighted(std::span<const double> weights, std::span<const BipartiteVector> states) {
  if (weights.size() != states.size()) {
    throw ValidationError("from_weighted: " + std::to_string(weights.size()) + " weights for " +
                          std::to_string(states.size()) + " states");
  }
  if (states.empty()) throw ValidationError("from_weighted: no states");
  double total = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0)) throw ValidationError("from_weighted: negative or NaN weight");
    total += w;
  }
  if (total > 1.0 + 1e-10) throw ValidationError("from_weighted: weights sum above one");

  std::vector<BipartiteVector> vectors;
  vectors.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!states[i].same_shape(states.front())) throw ShapeError("from_weighted: mixed shapes");
    if (std::abs(states[i].norm() - 1.0) > 1e-10) {
      throw ValidationError("from_weighted: state " + std::to_string(i) + " is not normalized");
    }
    vectors.push_back(states[i] * std::sqrt(weights[i]));
  }
  return {states.front().dim_a(), states.front().dim_b(), std::move(vectors)};
}

DensityOperator density(const Ensemble& e) {
  const auto dim = static_cast<Eigen::Index>(e.dim_a() * e.dim_b());
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  for (const auto& v : e.vectors()) {
    rho.noalias() += v.amplitudes() * v.amplitudes().adjoint();
  }
  return {std::move(rho), DensityOperator::Trusted{}};
}

double avg_entanglement(const Ensemble& e) {
  double total = 0.0;
  for (const auto& v : e.vectors()) total += homog_entanglement(v);
  return total;
}

Ensemble transform(const Ensemble& e, const RightUnitary& u) {
  if (u.cols() != e.count()) {
    throw ShapeError("transform: unitary has " + std::to_string(u.cols()) + " columns, ensemble " +
                     std::to_string(e.count()) + " members");
  }
  const ComplexMatrix& m = u.matrix();
  std::vector<BipartiteVector> out;
  out.reserve(u.rows());
  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    ComplexVector acc = ComplexVector::Zero(static_cast<Eigen::Index>(e.dim_a() * e.dim_b()));
    for (Eigen::Index i = 0; i < m.cols(); ++i) {
      acc.noalias() += m(j, i) * e[static_cast<std::size_t>(i)].amplitudes();
    }
    out.emplace_back(e.dim_a(), e.dim_b(), std::move(acc));
  }
  return {e.dim_a(), e.dim_b(), std::move(out)};
}

Ensemble spectral_ensemble(const DensityOperator& rho, std::size_t dim_a, std::size_t dim_b) {
  if (dim_a == 0 || dim_b == 0 || rho.dim() != dim_a * dim_b) {
    throw ValidationError("spectral_ensemble: operator dimension " + std::to_string(rho.dim()) +
                          " does not match the declared split " + std::to_string(dim_a) + "x" +
                          std::to_string(dim_b));
  }
  const HermitianSpectrum eig = herm_eig(rho.matrix());
  const double cutoff = kKernelCutoff * std::max(eig.eigenvalues(0), 0.0);
  std::vector<BipartiteVector> vectors;
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    const double lambda = eig.eigenvalues(k);
    if (lambda <= cutoff || lambda <= 0.0) break;
    vectors.emplace_back(dim_a, dim_b, std::sqrt(lambda) * eig.eigenvectors.col(k));
  }
  return {dim_a, dim_b, std::move(vectors)};
}

BipartiteVector tensor_product(const BipartiteVector& x, const BipartiteVector& y) {
  const std::size_t a1 = x.dim_a(), b1 = x.dim_b(), a2 = y.dim_a(), b2 = y.dim_b();
  ComplexVector out(static_cast<Eigen::Index>(a1 * a2 * b1 * b2));
  // Target index: ((i1 * a2 + i2) * b1 + j1) * b2 + j2.
  for (std::size_t i1 = 0; i1 < a1; ++i1) {
    for (std::size_t i2 = 0; i2 < a2; ++i2) {
      for (std::size_t j1 = 0; j1 < b1; ++j1) {
        for (std::size_t j2 = 0; j2 < b2; ++j2) {
          out(static_cast<Eigen::Index>(((i1 * a2 + i2) * b1 + j1) * b2 + j2)) =
              x(i1, j1) * y(i2, j2);
        }
      }
    }
  }
  return {a1 * a2, b1 * b2, std::move(out)};
}

Ensemble tensor_product_ensemble(const Ensemble& e1, const Ensemble& e2) {
  std::vector<BipartiteVector> out;
  out.reserve(e1.count() * e2.count());
  for (const auto& x : e1.vectors()) {
    for (const auto& y : e2.vectors()) out.push_back(tensor_product(x, y));
  }
  return {e1.dim_a() * e2.dim_a(), e1.dim_b() * e2.dim_b(), std::move(out)};
}

RightUnitary random_right_unitary(std::size_t m, std::size_t n, std::uint64_t seed) {
  if (n == 0 || m < n) {
    throw ShapeError("random_right_unitary: need m >= n >= 1, got m=" + std::to_string(m) +
                     " n=" + std::to_string(n));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto rows = static_cast<Eigen::Index>(m);
  const auto cols = static_cast<Eigen::Index>(n);
  ComplexMatrix g(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = gauss(rng);
      g(r, c) = Complex(re, gauss(rng));
    }
  }
  const Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(rows, cols);
  // Fix the phase ambiguity of QR so the distribution is Haar.
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < cols; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0.0) q.col(k) *= r(k, k) / mag;
  }
  return RightUnitary(std::move(q));
}

}  // namespace entwine
