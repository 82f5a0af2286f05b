#pragma once

#include "entwine/ensemble.hpp"

namespace entwine {

/// One-parameter family of decompositions U(t) psi~ where U(t) is the first
/// n columns of exp(tT) and T is the (n+1)x(n+1) skew-Hermitian generator
/// with last row c and last column -conj(c).
///
/// T acts as a rotation in the plane spanned by (conj(c)/|c|, 0) and e_{n+1},
/// so exp(tT) is evaluated in closed form:
///   exp(tT) = 1 + (cos(|c|t) - 1)(u u^+ + e e^+) + sin(|c|t)(e u^+ - u e^+).
class PerturbationPath {
 public:
  /// Any base ensemble; c must be non-zero with length base.count().
  PerturbationPath(Ensemble base, ComplexVector c);

  const Ensemble& base() const { return base_; }
  const ComplexVector& direction() const { return c_; }

  ComplexMatrix generator() const;
  /// exp(tT), (n+1)x(n+1) unitary.
  ComplexMatrix unitary(double t) const;
  /// First n columns of exp(tT).
  RightUnitary isometry(double t) const;
  /// The n+1 member decomposition at t; members of zero weight are pruned.
  Ensemble at(double t) const;
  /// Sum of E~ over the decomposition at t.
  double entanglement_at(double t) const;

 private:
  Ensemble base_;
  ComplexVector c_;
  // sum_i c_i psi~_i, the direction fed into the new member.
  ComplexVector mixed_;
};

/// Perturbed decomposition of a uniform-weight ensemble along unit c.
Ensemble perturb(const Ensemble& e, const ComplexVector& c, double t);

}  // namespace entwine
