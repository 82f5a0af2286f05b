#include "entwine/wootters.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include "entwine/errors.hpp"

namespace entwine {

namespace {

constexpr double kCheckTol = 1e-8;
constexpr double kJitter = 1e-10;
constexpr std::uint64_t kJitterSeed = 0x5eed'2b17'0000'0001ULL;

DensityOperator validated(ComplexMatrix m) {
  if (m.rows() != 4 || m.cols() != 4) {
    throw ValidationError("TwoQubitState: expected a 4x4 matrix, got " + std::to_string(m.rows()) +
                          "x" + std::to_string(m.cols()));
  }
  DensityOperator rho(std::move(m));
  if (std::abs(rho.trace() - 1.0) > 1e-10) {
    throw ValidationError("TwoQubitState: trace " + std::to_string(rho.trace()) + " is not 1");
  }
  return rho;
}

// <a|b~> = a^dagger Y conj(b).
Complex flip_overlap(const ComplexVector& a, const ComplexVector& b) {
  return a.dot(spin_flip_operator() * b.conjugate());
}

// tau_kl = <v_k|v~_l> over the spectral vectors of rho, symmetrized.
ComplexMatrix flip_matrix(const Ensemble& spectral) {
  const auto rank = static_cast<Eigen::Index>(spectral.count());
  ComplexMatrix tau(rank, rank);
  for (Eigen::Index k = 0; k < rank; ++k) {
    for (Eigen::Index l = 0; l < rank; ++l) {
      tau(k, l) = flip_overlap(spectral[static_cast<std::size_t>(k)].amplitudes(),
                               spectral[static_cast<std::size_t>(l)].amplitudes());
    }
  }
  return 0.5 * (tau + tau.transpose());
}

// Descending l_k: the singular values of tau, which are the square roots of
// the eigenvalues of rho rho~. Working with tau avoids square roots of
// eigenvalues that are roundoff-sized for rank-deficient states.
std::array<double, 4> spin_flip_roots(const ComplexMatrix& rho) {
  const Ensemble spectral = spectral_ensemble(DensityOperator(rho, DensityOperator::Trusted{}), 2, 2);
  const Eigen::JacobiSVD<ComplexMatrix> svd(flip_matrix(spectral));
  std::array<double, 4> out{};
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
    out[static_cast<std::size_t>(k)] = svd.singularValues()(k);
  }
  return out;
}

// Takagi factorization tau = W diag(s) W^T of a complex symmetric matrix,
// via the real symmetric embedding [[Re, Im], [Im, -Re]] whose eigenvectors
// (u; v) with eigenvalue s > 0 give Takagi vectors u + i v.
void takagi(const ComplexMatrix& tau, ComplexMatrix& w, RealVector& s) {
  const Eigen::Index n = tau.rows();
  Eigen::MatrixXd emb(2 * n, 2 * n);
  emb << tau.real(), tau.imag(), tau.imag(), -tau.real();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(emb);
  const double scale = std::max(eig.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);

  w = ComplexMatrix::Zero(n, n);
  s = RealVector::Zero(n);
  Eigen::Index filled = 0;
  for (Eigen::Index k = 2 * n - 1; k >= 0 && filled < n; --k) {
    if (eig.eigenvalues()(k) <= 1e-12 * scale) break;
    const auto vec = eig.eigenvectors().col(k);
    w.col(filled) = vec.head(n).cast<Complex>() + Complex(0.0, 1.0) * vec.tail(n).cast<Complex>();
    s(filled) = eig.eigenvalues()(k);
    ++filled;
  }
  // Complete with an orthonormal basis of the complement (zero Takagi values).
  for (Eigen::Index b = 0; b < n && filled < n; ++b) {
    ComplexVector cand = ComplexVector::Unit(n, b);
    for (Eigen::Index j = 0; j < filled; ++j) cand -= w.col(j).dot(cand) * w.col(j);
    for (Eigen::Index j = 0; j < filled; ++j) cand -= w.col(j).dot(cand) * w.col(j);
    if (cand.norm() > 1e-6) {
      w.col(filled) = cand.normalized();
      ++filled;
    }
  }
}

// Real orthogonal O with (O K O^T)_ii = 0 for a traceless real symmetric K,
// built from Givens rotations that each zero one diagonal entry for good.
Eigen::Matrix4d zero_diagonal_rotation(const Eigen::Matrix4d& k) {
  Eigen::Matrix4d o = Eigen::Matrix4d::Identity();
  const double tol = 1e-14 * std::max(1.0, k.norm());
  for (int step = 0; step < 8; ++step) {
    const Eigen::Matrix4d b = o * k * o.transpose();
    int i = -1;
    for (int r = 0; r < 4; ++r) {
      if (std::abs(b(r, r)) > tol && (i < 0 || std::abs(b(r, r)) > std::abs(b(i, i)))) i = r;
    }
    if (i < 0) break;
    int j = -1;
    for (int r = 0; r < 4; ++r) {
      if (r != i && b(r, r) * b(i, i) < 0.0 && (j < 0 || std::abs(b(r, r)) > std::abs(b(j, j)))) {
        j = r;
      }
    }
    if (j < 0) break;
    const double a = b(i, i), d = b(j, j), off = b(i, j);
    const double half_diff = 0.5 * (a - d);
    const double amp = std::hypot(half_diff, off);
    const double phi = std::atan2(off, half_diff);
    const double theta = 0.5 * (phi + std::acos(std::clamp(-0.5 * (a + d) / amp, -1.0, 1.0)));
    const double cs = std::cos(theta), sn = std::sin(theta);
    const Eigen::RowVector4d ri = o.row(i), rj = o.row(j);
    o.row(i) = cs * ri + sn * rj;
    o.row(j) = -sn * ri + cs * rj;
  }
  return o;
}

// Phases phi_k with sum_k exp(i phi_k) l_k = 0, possible when
// l1 <= l2 + l3 + l4 (descending l).
std::array<double, 4> closing_phases(const std::array<double, 4>& l) {
  std::array<double, 4> phi{0.0, 0.0, 0.0, 0.0};
  if (l[1] <= 0.0) return phi;
  const double target_len = std::max(l[0] - l[3], l[1] - l[2]);
  if (l[3] > 0.0 && l[0] > 0.0) {
    const double cos4 = (target_len * target_len - l[0] * l[0] - l[3] * l[3]) / (2.0 * l[0] * l[3]);
    phi[3] = std::acos(std::clamp(cos4, -1.0, 1.0));
  }
  const Complex w = l[0] + std::polar(l[3], phi[3]);
  const Complex target = -w;
  const double r = std::abs(target);
  if (r <= 0.0) {
    phi[2] = std::numbers::pi;
    return phi;
  }
  const double cos_a = (l[1] * l[1] + r * r - l[2] * l[2]) / (2.0 * l[1] * r);
  phi[1] = std::arg(target) + std::acos(std::clamp(cos_a, -1.0, 1.0));
  phi[2] = std::arg(target - std::polar(l[1], phi[1]));
  return phi;
}

// Merges members that are parallel, which keeps the density unchanged.
Ensemble merge_parallel(const Ensemble& e) {
  std::vector<ComplexVector> kept;
  for (const auto& v : e.vectors()) {
    bool merged = false;
    for (auto& k : kept) {
      const double kn = k.norm(), vn = v.norm();
      if (std::abs(k.dot(v.amplitudes())) >= (1.0 - 1e-12) * kn * vn) {
        k *= std::sqrt(kn * kn + vn * vn) / kn;
        merged = true;
        break;
      }
    }
    if (!merged) kept.push_back(v.amplitudes());
  }
  std::vector<BipartiteVector> out;
  for (auto& k : kept) out.emplace_back(2, 2, std::move(k));
  return {2, 2, std::move(out)};
}

std::optional<Ensemble> construct(const ComplexMatrix& rho, double c) {
  const Ensemble spectral = spectral_ensemble(DensityOperator(rho, DensityOperator::Trusted{}), 2, 2);
  const auto rank = static_cast<Eigen::Index>(spectral.count());
  if (rank == 1) return spectral;

  const ComplexMatrix tau = flip_matrix(spectral);
  ComplexMatrix w;
  RealVector s;
  takagi(tau, w, s);

  // x_i = sum_k W_ki v_k satisfies <x_i|x~_j> = s_i delta_ij.
  std::array<ComplexVector, 4> x;
  std::array<double, 4> l{0.0, 0.0, 0.0, 0.0};
  for (Eigen::Index i = 0; i < 4; ++i) {
    x[static_cast<std::size_t>(i)] = ComplexVector::Zero(4);
    if (i >= rank) continue;
    for (Eigen::Index k = 0; k < rank; ++k) {
      x[static_cast<std::size_t>(i)] += w(k, i) * spectral[static_cast<std::size_t>(k)].amplitudes();
    }
    l[static_cast<std::size_t>(i)] = s(i);
  }

  std::array<ComplexVector, 4> y;
  Eigen::Matrix4d o;
  if (l[0] - l[1] - l[2] - l[3] > 0.0) {
    // y = (x1, i x2, i x3, i x4) has <y_j|y~_j> = (l1, -l2, -l3, -l4).
    y[0] = x[0];
    for (std::size_t j = 1; j < 4; ++j) y[j] = Complex(0.0, 1.0) * x[j];
    // Member i gets <z_i|z~_i> = sum_j O_ij^2 d_j; requiring this to equal
    // C <z_i|z_i> makes K = diag(d) - C Re<y_j|y_k> zero on O's diagonal.
    Eigen::Matrix4d k;
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        k(a, b) = -c * y[static_cast<std::size_t>(a)].dot(y[static_cast<std::size_t>(b)]).real();
      }
    }
    k(0, 0) += l[0];
    for (int j = 1; j < 4; ++j) k(j, j) -= l[static_cast<std::size_t>(j)];
    o = zero_diagonal_rotation(0.5 * (k + k.transpose()));
  } else {
    // Phases making sum_j <y_j|y~_j> = 0; an equal-modulus mix then gives
    // every member <z|z~> = 0.
    const auto phi = closing_phases(l);
    for (std::size_t j = 0; j < 4; ++j) y[j] = std::polar(1.0, -0.5 * phi[j]) * x[j];
    o << 1, 1, 1, 1, 1, 1, -1, -1, 1, -1, 1, -1, 1, -1, -1, 1;
    o *= 0.5;
  }

  std::vector<BipartiteVector> members;
  for (int i = 0; i < 4; ++i) {
    ComplexVector z = ComplexVector::Zero(4);
    for (int j = 0; j < 4; ++j) z += o(i, j) * y[static_cast<std::size_t>(j)];
    members.emplace_back(2, 2, std::move(z));
  }
  return merge_parallel(Ensemble(2, 2, std::move(members)));
}

bool passes_checks(const Ensemble& e, const ComplexMatrix& rho, double c) {
  if ((density(e).matrix() - rho).norm() > kCheckTol) return false;
  return std::ranges::all_of(e.vectors(), [&](const BipartiteVector& v) {
    return std::abs(pure_concurrence(v) - c) <= kCheckTol;
  });
}

}  // namespace

TwoQubitState::TwoQubitState(ComplexMatrix matrix) : rho_(validated(std::move(matrix))) {}

ComplexMatrix spin_flip_operator() {
  ComplexMatrix y = ComplexMatrix::Zero(4, 4);
  y(0, 3) = -1.0;
  y(1, 2) = 1.0;
  y(2, 1) = 1.0;
  y(3, 0) = -1.0;
  return y;
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double eof_from_concurrence(double c) {
  const double cc = std::clamp(c, 0.0, 1.0);
  return binary_entropy(0.5 * (1.0 + std::sqrt(1.0 - cc * cc)));
}

double concurrence(const TwoQubitState& rho) {
  const auto l = spin_flip_roots(rho.matrix());
  return std::clamp(l[0] - l[1] - l[2] - l[3], 0.0, 1.0);
}

double eof_2qubit(const TwoQubitState& rho) { return eof_from_concurrence(concurrence(rho)); }

double pure_concurrence(const BipartiteVector& psi) {
  if (psi.dim_a() != 2 || psi.dim_b() != 2) throw ShapeError("pure_concurrence: not two qubits");
  const double n2 = psi.squared_norm();
  if (n2 == 0.0) throw DegenerateInputError("pure_concurrence: zero vector");
  return std::abs(flip_overlap(psi.amplitudes(), psi.amplitudes())) / n2;
}

WoottersDecomposition optimal_decomposition_2qubit(const TwoQubitState& rho) {
  WoottersDecomposition out;
  out.concurrence = concurrence(rho);
  if (auto e = construct(rho.matrix(), out.concurrence);
      e && passes_checks(*e, rho.matrix(), out.concurrence)) {
    out.ensemble = std::move(*e);
    return out;
  }

  // Degenerate spin-flip spectra can defeat the construction; retry on a
  // slightly perturbed full-rank state.
  std::mt19937_64 rng(kJitterSeed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix g(4, 4);
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const double re = gauss(rng);
    g(k) = Complex(re, gauss(rng));
  }
  ComplexMatrix noise = g * g.adjoint();
  noise /= noise.trace().real();
  const ComplexMatrix jittered = (rho.matrix() + kJitter * noise) / (1.0 + kJitter);
  const double c = concurrence(TwoQubitState(jittered));
  auto e = construct(jittered, c);
  if (!e || !passes_checks(*e, rho.matrix(), out.concurrence)) {
    throw SearchFailure("optimal_decomposition_2qubit: construction failed after jitter");
  }
  out.ensemble = std::move(*e);
  out.jittered = true;
  out.jitter_seed = kJitterSeed;
  return out;
}

}  // namespace entwine
