#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace forage {

/// Probability vector over a finite support. Entries are nonnegative and sum
/// to one within 1e-9; construction validates, from_weights normalizes.
class Categorical {
 public:
  Categorical() = default;

  explicit Categorical(std::vector<double> probs) : p_(std::move(probs)) {
    validate();
  }

  static Categorical uniform(std::size_t n) {
    Categorical c;
    c.p_.assign(n, 1.0 / static_cast<double>(n));
    return c;
  }

  static Categorical delta(std::size_t n, std::size_t i) {
    if (i >= n) throw std::invalid_argument("Categorical::delta: index out of range");
    Categorical c;
    c.p_.assign(n, 0.0);
    c.p_[i] = 1.0;
    return c;
  }

  /// Normalizes nonnegative weights into a distribution.
  static Categorical from_weights(std::vector<double> w) {
    double total = 0.0;
    for (double x : w) {
      if (x < 0.0) throw std::invalid_argument("Categorical: negative weight");
      total += x;
    }
    if (total <= 0.0) throw std::invalid_argument("Categorical: zero total weight");
    for (double& x : w) x /= total;
    Categorical c;
    c.p_ = std::move(w);
    return c;
  }

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& probs() const { return p_; }
  std::span<const double> span() const { return p_; }

  std::size_t argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < p_.size(); ++i)
      if (p_[i] > p_[best]) best = i;
    return best;
  }

  double entropy() const {
    double h = 0.0;
    for (double x : p_)
      if (x > 0.0) h -= x * std::log(x);
    return h;
  }

  void validate() const {
    if (p_.empty()) throw std::invalid_argument("Categorical: empty support");
    double total = 0.0;
    for (double x : p_) {
      if (!(x >= 0.0)) throw std::invalid_argument("Categorical: negative entry");
      total += x;
    }
    if (std::fabs(total - 1.0) > 1e-9)
      throw std::invalid_argument("Categorical: entries do not sum to 1");
  }

 private:
  std::vector<double> p_;
};

}  // namespace forage
