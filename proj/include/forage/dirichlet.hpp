#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "forage/categorical.hpp"

namespace forage {

/// Which model a count tensor parameterizes. Purely a tag; the math is the
/// same either way.
enum class CountRole { likelihood, transition };

/// Dirichlet concentration parameters for a conditional categorical model:
/// one column of `outcomes` counts per conditioning cell. Counts must stay
/// strictly positive; the per-column sums are maintained incrementally so the
/// planner can normalize on the fly.
class DirichletCounts {
 public:
  DirichletCounts() = default;

  DirichletCounts(std::size_t outcomes, std::size_t cells, double alpha0,
                  CountRole role)
      : outcomes_(outcomes), cells_(cells), role_(role) {
    if (outcomes == 0 || cells == 0)
      throw std::invalid_argument("DirichletCounts: empty shape");
    if (!(alpha0 > 0.0))
      throw std::invalid_argument("DirichletCounts: alpha0 must be positive");
    c_.assign(outcomes * cells, alpha0);
    colsum_.assign(cells, alpha0 * static_cast<double>(outcomes));
  }

  std::size_t outcomes() const { return outcomes_; }
  std::size_t cells() const { return cells_; }
  CountRole role() const { return role_; }

  double at(std::size_t outcome, std::size_t cell) const {
    return c_[cell * outcomes_ + outcome];
  }

  double col_sum(std::size_t cell) const { return colsum_[cell]; }

  std::span<const double> column(std::size_t cell) const {
    return {c_.data() + cell * outcomes_, outcomes_};
  }

  /// Dirichlet-mean probability of `outcome` in `cell`.
  double normalized(std::size_t outcome, std::size_t cell) const {
    return at(outcome, cell) / colsum_[cell];
  }

  void add(std::size_t outcome, std::size_t cell, double w) {
    c_[cell * outcomes_ + outcome] += w;
    colsum_[cell] += w;
  }

  /// Overwrites one entry; used by undo stacks to restore bit-identical state.
  void set(std::size_t outcome, std::size_t cell, double value) {
    const std::size_t idx = cell * outcomes_ + outcome;
    colsum_[cell] += value - c_[idx];
    c_[idx] = value;
  }

  double total() const {
    double t = 0.0;
    for (double s : colsum_) t += s;
    return t;
  }

  const std::vector<double>& raw() const { return c_; }

 private:
  std::size_t outcomes_ = 0;
  std::size_t cells_ = 0;
  CountRole role_ = CountRole::likelihood;
  std::vector<double> c_;
  std::vector<double> colsum_;
};

/// Column-stochastic probability table: `outcomes` probabilities per cell.
struct ProbTable {
  std::size_t outcomes = 0;
  std::size_t cells = 0;
  std::vector<double> p;  // cell-major columns

  ProbTable() = default;
  ProbTable(std::size_t o, std::size_t c, double fill = 0.0)
      : outcomes(o), cells(c), p(o * c, fill) {}

  double at(std::size_t outcome, std::size_t cell) const {
    return p[cell * outcomes + outcome];
  }
  double& at(std::size_t outcome, std::size_t cell) {
    return p[cell * outcomes + outcome];
  }
  std::span<const double> column(std::size_t cell) const {
    return {p.data() + cell * outcomes, outcomes};
  }
};

/// Dirichlet-mean conditional probabilities: entry = count / column sum.
inline ProbTable normalize_counts(const DirichletCounts& counts) {
  ProbTable t(counts.outcomes(), counts.cells());
  for (std::size_t cell = 0; cell < counts.cells(); ++cell) {
    double sum = 0.0;
    for (std::size_t o = 0; o < counts.outcomes(); ++o) {
      const double c = counts.at(o, cell);
      if (!(c > 0.0))
        throw std::invalid_argument("normalize_counts: non-positive count");
      sum += c;
    }
    for (std::size_t o = 0; o < counts.outcomes(); ++o)
      t.at(o, cell) = counts.at(o, cell) / sum;
  }
  return t;
}

/// Soft count allocation: counts(obs, cell) += belief(cell) for every
/// conditioning cell. The total count rises by exactly one per observation.
inline void update_concentration_inplace(DirichletCounts& counts,
                                         const Categorical& belief,
                                         std::size_t observation) {
  if (belief.size() != counts.cells())
    throw std::invalid_argument("update_concentration: belief size mismatch");
  if (observation >= counts.outcomes())
    throw std::invalid_argument("update_concentration: observation out of range");
  for (std::size_t cell = 0; cell < belief.size(); ++cell)
    if (belief[cell] != 0.0) counts.add(observation, cell, belief[cell]);
}

inline DirichletCounts update_concentration(DirichletCounts counts,
                                            const Categorical& belief,
                                            std::size_t observation) {
  update_concentration_inplace(counts, belief, observation);
  return counts;
}

}  // namespace forage
