#include "freep/molecule.hpp"

#include <cmath>
#include <stdexcept>

namespace freep {

Molecule::Molecule(SpacePtr space)
    : space_(std::move(space)),
      coeffs_(Eigen::VectorXd::Zero(space_ ? space_->size() : 0)) {
  if (!space_) throw std::invalid_argument("molecule needs a space");
}

Molecule::Molecule(SpacePtr space, Eigen::VectorXd coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (!space_) throw std::invalid_argument("molecule needs a space");
  if (coeffs_.size() != space_->size())
    throw std::invalid_argument("coefficient vector size mismatch");
  coeffs_[space_->base] = 0.0;
}

void Molecule::set_coeff(int idx, double value) {
  if (idx < 0 || idx >= space_->size())
    throw std::invalid_argument("coefficient index out of range");
  if (idx == space_->base) return;  // delta at the base point is zero
  coeffs_[idx] = value;
}

std::vector<int> Molecule::support() const {
  std::vector<int> out;
  for (int i = 0; i < coeffs_.size(); ++i)
    if (coeffs_[i] != 0.0) out.push_back(i);
  return out;
}

bool Molecule::is_zero() const { return coeffs_.isZero(0.0); }

void Molecule::check_compatible(const Molecule& other) const {
  if (space_ != other.space_)
    throw std::invalid_argument("molecules live on different spaces");
}

Molecule& Molecule::operator+=(const Molecule& other) {
  check_compatible(other);
  coeffs_ += other.coeffs_;
  prune();
  return *this;
}

Molecule& Molecule::operator-=(const Molecule& other) {
  check_compatible(other);
  coeffs_ -= other.coeffs_;
  prune();
  return *this;
}

Molecule& Molecule::operator*=(double s) {
  coeffs_ *= s;
  prune();
  return *this;
}

void Molecule::prune(double tol) {
  for (int i = 0; i < coeffs_.size(); ++i)
    if (std::abs(coeffs_[i]) < tol) coeffs_[i] = 0.0;
}

bool Molecule::same_data(const Molecule& other) const {
  return space_ == other.space_ && coeffs_ == other.coeffs_;
}

Molecule delta(SpacePtr space, int x) {
  Molecule mu(std::move(space));
  if (x != mu.space()->base) mu.set_coeff(x, 1.0);
  return mu;
}

Molecule elementary(SpacePtr space, int x, int y) {
  if (x == y) throw std::invalid_argument("elementary molecule needs x != y");
  Molecule mu(std::move(space));
  double d = mu.space()->d(x, y);
  if (x != mu.space()->base) mu.set_coeff(x, 1.0 / d);
  if (y != mu.space()->base) mu.set_coeff(y, mu.coeff(y) - 1.0 / d);
  return mu;
}

Molecule ElementaryDecomposition::reconstruct(const SpacePtr& space) const {
  Molecule acc(space);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(space->size());
  for (const auto& term : terms) {
    double d = space->d(term.x, term.y);
    c[term.x] += term.a / d;
    c[term.y] -= term.a / d;
  }
  c[space->base] = 0.0;
  return Molecule(space, std::move(c));
}

double ElementaryDecomposition::cost(double p) const {
  double acc = 0.0;
  for (const auto& term : terms) acc += std::pow(std::abs(term.a), p);
  return std::pow(acc, 1.0 / p);
}

Molecule pushforward(const Molecule& mu, const PointMap& h, SpacePtr target) {
  const QuasiMetricSpace& src = *mu.space();
  if (static_cast<int>(h.size()) != src.size())
    throw std::invalid_argument("point map size mismatch");
  if (h[src.base] != target->base)
    throw std::invalid_argument("point map must preserve the base point");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(target->size());
  for (int x : mu.support()) {
    int w = h[x];
    if (w < 0 || w >= target->size())
      throw std::invalid_argument("point map undefined on a support point");
    c[w] += mu.coeff(x);
  }
  c[target->base] = 0.0;  // mass landing on the base point is dropped
  Molecule out(std::move(target), std::move(c));
  out.prune();
  return out;
}

double lipschitz_constant(const PointMap& h, const QuasiMetricSpace& source,
                          const QuasiMetricSpace& target) {
  if (static_cast<int>(h.size()) != source.size())
    throw std::invalid_argument("point map size mismatch");
  for (int x = 0; x < source.size(); ++x)
    if (h[x] < 0 || h[x] >= target.size())
      throw std::invalid_argument("point map must be total on the source");
  double worst = 0.0;
  for (int x = 0; x < source.size(); ++x)
    for (int y = x + 1; y < source.size(); ++y)
      worst = std::max(worst, target.d(h[x], h[y]) / source.d(x, y));
  return worst;
}

}  // namespace freep
