#include <cmath>
#include <random>

#include "doctest.h"
#include "entwine/errors.hpp"
#include "entwine/wootters.hpp"
#include "oracles.hpp"

using namespace entwine;

namespace {

ComplexMatrix werner(double p) {
  // p |Psi-><Psi-| + (1 - p) I/4
  const double r = 1.0 / std::sqrt(2.0);
  ComplexVector s(4);
  s << 0, r, -r, 0;
  return p * s * s.adjoint() + (1.0 - p) * 0.25 * ComplexMatrix::Identity(4, 4);
}

void check_decomposition(const ComplexMatrix& rho) {
  const TwoQubitState st(rho);
  const auto w = optimal_decomposition_2qubit(st);
  const double c = concurrence(st);
  CHECK(w.concurrence == c);
  CHECK(w.ensemble.count() >= 1);
  CHECK(w.ensemble.count() <= 4);
  CHECK((density(w.ensemble).matrix() - rho).norm() <= 1e-8);
  for (const auto& v : w.ensemble.vectors()) {
    CHECK(std::abs(oracle::pure_concurrence(v) - c) <= 1e-8);
    CHECK(std::abs(pure_concurrence(v) - c) <= 1e-8);
  }
  CHECK(std::abs(avg_entanglement(w.ensemble) - eof_2qubit(st)) <= 1e-8);
  if (w.jittered) CHECK(w.jitter_seed != 0);
}

}  // namespace

TEST_CASE("spin flip operator is sigma_y (x) sigma_y") {
  CHECK((spin_flip_operator() - oracle::sigma_yy()).norm() == 0.0);
}

TEST_CASE("TwoQubitState validation") {
  CHECK_THROWS_AS(TwoQubitState(ComplexMatrix::Identity(3, 3) / 3.0), ValidationError);
  CHECK_THROWS_AS(TwoQubitState(ComplexMatrix::Identity(4, 4) / 2.0), ValidationError);
  ComplexMatrix neg = ComplexMatrix::Zero(4, 4);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS(TwoQubitState{neg});
}

TEST_CASE("concurrence examples") {
  CHECK(concurrence(TwoQubitState(oracle::projector(oracle::phi_plus()))) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(concurrence(TwoQubitState(oracle::projector(BipartiteVector::basis(2, 2, 0, 0)))) == doctest::Approx(0.0));
  for (double p : {0.0, 0.1, 0.25, 0.5, 0.8, 1.0}) {
    ComplexMatrix rho = p * oracle::projector(oracle::phi_plus());
    rho(0, 0) += 1.0 - p;
    const double c = concurrence(TwoQubitState(rho));
    CHECK(std::abs(c - p) <= 1e-10);
    CHECK(std::abs(c - oracle::concurrence(rho)) <= 1e-6);
  }
  // Werner: C = max(0, (3p - 1)/2)
  for (double p : {0.0, 0.2, 1.0 / 3.0, 0.5, 0.9}) {
    CHECK(std::abs(concurrence(TwoQubitState(werner(p))) - std::max(0.0, 1.5 * p - 0.5)) <= 1e-10);
  }
}

TEST_CASE("concurrence matches the non-Hermitian eigenvalue oracle") {
  std::mt19937_64 rng(301);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index rank = 1 + trial % 4;
    const ComplexMatrix rho = oracle::random_psd(rng, 4, rank);
    const double c = concurrence(TwoQubitState(rho));
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
    // the oracle takes square roots of eigenvalues, so kernels cost accuracy
    CHECK(std::abs(c - oracle::concurrence(rho)) <= (rank == 4 ? 1e-9 : 1e-6));
  }
}

TEST_CASE("concurrence is invariant under local unitaries") {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix rho = oracle::random_psd(rng, 4, 1 + trial % 4);
    const ComplexMatrix u = Eigen::kroneckerProduct(oracle::random_unitary(rng, 2), oracle::random_unitary(rng, 2)).eval();
    ComplexMatrix rotated = u * rho * u.adjoint();
    rotated = 0.5 * (rotated + rotated.adjoint()).eval();
    CHECK(std::abs(concurrence(TwoQubitState(rotated)) - concurrence(TwoQubitState(rho))) <= 1e-9);
  }
}

TEST_CASE("eof from concurrence") {
  CHECK(eof_from_concurrence(1.0) == doctest::Approx(1.0));
  CHECK(eof_from_concurrence(0.0) == 0.0);
  CHECK(eof_from_concurrence(0.6) == doctest::Approx(0.468996).epsilon(1e-6));
  CHECK(eof_from_concurrence(0.6) == doctest::Approx(oracle::binary_entropy(0.9)).epsilon(1e-14));
  double prev = -1.0;
  for (int k = 0; k <= 100; ++k) {
    const double e = eof_from_concurrence(k / 100.0);
    CHECK(e >= prev);
    prev = e;
  }
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(eof_2qubit(TwoQubitState(oracle::projector(oracle::phi_plus()))) == doctest::Approx(1.0));
}

TEST_CASE("pure-state concurrence") {
  CHECK(pure_concurrence(oracle::phi_plus()) == doctest::Approx(1.0));
  CHECK(pure_concurrence(BipartiteVector::basis(2, 2, 1, 0)) == doctest::Approx(0.0));
  CHECK(pure_concurrence(oracle::phi_plus() * 3.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(pure_concurrence(BipartiteVector::zero(2, 2)), DegenerateInputError);
  CHECK_THROWS_AS(pure_concurrence(BipartiteVector::basis(2, 3, 0, 0)), ShapeError);
  std::mt19937_64 rng(305);
  for (int trial = 0; trial < 50; ++trial) {
    const auto v = oracle::random_state(rng, 2, 2);
    CHECK(std::abs(pure_concurrence(v) - oracle::pure_concurrence(v)) <= 1e-12);
    CHECK(std::abs(eof_from_concurrence(pure_concurrence(v)) - homog_entanglement(v)) <= 1e-10);
  }
}

TEST_CASE("optimal decomposition examples") {
  const auto bell = optimal_decomposition_2qubit(TwoQubitState(oracle::projector(oracle::phi_plus())));
  REQUIRE(bell.ensemble.count() == 1);
  CHECK(std::abs(std::abs(bell.ensemble[0].amplitudes().dot(oracle::phi_plus().amplitudes())) - 1.0) < 1e-12);

  ComplexMatrix sep = ComplexMatrix::Zero(4, 4);
  sep(0, 0) = 0.5;
  sep(3, 3) = 0.5;
  const auto s = optimal_decomposition_2qubit(TwoQubitState(sep));
  CHECK(s.ensemble.count() == 2);
  CHECK(avg_entanglement(s.ensemble) <= 1e-8);
  CHECK((density(s.ensemble).matrix() - sep).norm() <= 1e-8);
}

TEST_CASE("optimal decomposition on random states of every rank") {
  std::mt19937_64 rng(307);
  for (int trial = 0; trial < 120; ++trial) {
    check_decomposition(oracle::random_psd(rng, 4, 1 + trial % 4));
  }
}

TEST_CASE("optimal decomposition on degenerate spin-flip spectra") {
  check_decomposition(0.25 * ComplexMatrix::Identity(4, 4));
  for (double p : {0.1, 1.0 / 3.0, 0.5, 0.75, 0.99}) check_decomposition(werner(p));
  ComplexMatrix sep = ComplexMatrix::Zero(4, 4);
  sep(0, 0) = 0.5;
  sep(1, 1) = 0.5;
  check_decomposition(sep);
  check_decomposition(oracle::projector(BipartiteVector::basis(2, 2, 1, 1)));
  ComplexMatrix mix = 0.5 * oracle::projector(oracle::phi_plus()) + 0.5 * oracle::projector(oracle::phi_minus());
  check_decomposition(mix);
}
