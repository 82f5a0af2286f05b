#include "entwine/perturbation.hpp"

#include <cmath>

#include "entwine/errors.hpp"

namespace entwine {

PerturbationPath::PerturbationPath(Ensemble base, ComplexVector c)
    : base_(std::move(base)), c_(std::move(c)) {
  if (base_.empty()) throw ValidationError("PerturbationPath: empty base ensemble");
  if (static_cast<std::size_t>(c_.size()) != base_.count()) {
    throw ShapeError("PerturbationPath: coefficient length does not match ensemble size");
  }
  if (c_.norm() == 0.0) throw DegenerateInputError("PerturbationPath: zero direction");
  mixed_ = ComplexVector::Zero(static_cast<Eigen::Index>(base_.dim_a() * base_.dim_b()));
  for (std::size_t i = 0; i < base_.count(); ++i) {
    mixed_.noalias() += c_(static_cast<Eigen::Index>(i)) * base_[i].amplitudes();
  }
}

ComplexMatrix PerturbationPath::generator() const {
  const auto n = c_.size();
  ComplexMatrix t = ComplexMatrix::Zero(n + 1, n + 1);
  t.row(n).head(n) = c_.transpose();
  t.col(n).head(n) = -c_.conjugate();
  return t;
}

ComplexMatrix PerturbationPath::unitary(double t) const {
  const auto n = c_.size();
  const double len = c_.norm();
  ComplexVector u = ComplexVector::Zero(n + 1);
  u.head(n) = c_.conjugate() / len;
  const ComplexVector e = ComplexVector::Unit(n + 1, n);
  const double cs = std::cos(len * t);
  const double sn = std::sin(len * t);
  ComplexMatrix out = ComplexMatrix::Identity(n + 1, n + 1);
  out += (cs - 1.0) * (u * u.adjoint() + e * e.adjoint());
  out += sn * (e * u.adjoint() - u * e.adjoint());
  return out;
}

RightUnitary PerturbationPath::isometry(double t) const {
  return RightUnitary(unitary(t).leftCols(c_.size()));
}

Ensemble PerturbationPath::at(double t) const {
  // Column-wise form of unitary(t): members i <= n pick up
  // (cos(|c|t) - 1) conj(c_i) Phi~ / |c|^2, the new member is sin(|c|t) Phi~ / |c|.
  const double len = c_.norm();
  const double cs = std::cos(len * t);
  const double sn = std::sin(len * t);
  std::vector<BipartiteVector> out;
  out.reserve(base_.count() + 1);
  for (std::size_t i = 0; i < base_.count(); ++i) {
    const Complex coeff = (cs - 1.0) * std::conj(c_(static_cast<Eigen::Index>(i))) / (len * len);
    out.emplace_back(base_.dim_a(), base_.dim_b(), base_[i].amplitudes() + coeff * mixed_);
  }
  out.emplace_back(base_.dim_a(), base_.dim_b(), (sn / len) * mixed_);
  return {base_.dim_a(), base_.dim_b(), std::move(out)};
}

double PerturbationPath::entanglement_at(double t) const { return avg_entanglement(at(t)); }

Ensemble perturb(const Ensemble& e, const ComplexVector& c, double t) {
  if (!e.has_uniform_weights()) throw ValidationError("perturb: ensemble weights are not uniform");
  if (std::abs(c.norm() - 1.0) > 1e-10) throw ValidationError("perturb: c is not a unit vector");
  return PerturbationPath(e, c).at(t);
}

}  // namespace entwine
