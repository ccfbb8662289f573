#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "forage/categorical.hpp"

namespace forage {

/// Factored (mean-field) posterior over the two hidden state factors. The
/// joint belief is the outer product of the factors.
struct BeliefState {
  Categorical position;
  Categorical context;
};

struct BayesUpdateResult {
  BeliefState belief;
  /// True when the observation had zero probability under the predictive
  /// prior; the belief then falls back to the predictive prior itself.
  bool degenerate = false;
};

/// Square column-stochastic matrix, column = source state. Stored row-major:
/// m[next * n + prev] = p(next | prev).
struct StochasticMatrix {
  std::size_t n = 0;
  std::vector<double> m;

  StochasticMatrix() = default;
  StochasticMatrix(std::size_t n_, std::vector<double> values)
      : n(n_), m(std::move(values)) {
    if (m.size() != n * n)
      throw std::invalid_argument("StochasticMatrix: size mismatch");
  }

  double at(std::size_t next, std::size_t prev) const { return m[next * n + prev]; }

  static StochasticMatrix identity(std::size_t n) {
    StochasticMatrix s;
    s.n = n;
    s.m.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) s.m[i * n + i] = 1.0;
    return s;
  }
};

/// prior pushed through a column-stochastic transition: out = M * prior.
inline Categorical propagate(const Categorical& prior, const StochasticMatrix& m) {
  if (prior.size() != m.n)
    throw std::invalid_argument("propagate: dimension mismatch");
  std::vector<double> out(m.n, 0.0);
  for (std::size_t prev = 0; prev < m.n; ++prev) {
    const double q = prior[prev];
    if (q == 0.0) continue;
    for (std::size_t next = 0; next < m.n; ++next)
      out[next] += m.at(next, prev) * q;
  }
  return Categorical::from_weights(std::move(out));
}

/// Conditions a factored predictive belief on an observation with joint
/// likelihood lik(position_cell, context) and re-factors the exact joint
/// posterior by marginalization. Zero total evidence falls back to the
/// predictive prior with the degenerate flag set.
template <class LikelihoodFn>
BayesUpdateResult condition_factored(const BeliefState& predictive,
                                     LikelihoodFn&& lik) {
  const std::size_t np = predictive.position.size();
  const std::size_t nc = predictive.context.size();
  std::vector<double> pos_w(np, 0.0), ctx_w(nc, 0.0);
  double total = 0.0;
  for (std::size_t p = 0; p < np; ++p) {
    const double qp = predictive.position[p];
    if (qp == 0.0) continue;
    for (std::size_t k = 0; k < nc; ++k) {
      const double qk = predictive.context[k];
      if (qk == 0.0) continue;
      const double w = qp * qk * lik(p, k);
      if (w == 0.0) continue;
      pos_w[p] += w;
      ctx_w[k] += w;
      total += w;
    }
  }
  if (total <= 0.0) return {predictive, true};
  for (double& x : pos_w) x /= total;
  for (double& x : ctx_w) x /= total;
  return {BeliefState{Categorical(std::move(pos_w)), Categorical(std::move(ctx_w))},
          false};
}

/// One step of future evidence used by backwards smoothing: the transition
/// taken out of the previous step and the observation likelihood at this one.
struct SmoothingStep {
  const StochasticMatrix* transition = nullptr;
  std::vector<double> likelihood;
};

/// Reweights the stored filtered posterior at some past step with the product
/// of transition-propagated future likelihoods, i.e. the classic backward
/// message; `steps` covers (tau, t] in order. An empty window returns the
/// stored posterior unchanged.
inline Categorical smooth_with_future(const Categorical& filtered_tau,
                                      std::span<const SmoothingStep> steps) {
  const std::size_t n = filtered_tau.size();
  std::vector<double> beta(n, 1.0);
  for (std::size_t j = steps.size(); j-- > 0;) {
    const SmoothingStep& st = steps[j];
    if (st.transition == nullptr || st.transition->n != n ||
        st.likelihood.size() != n)
      throw std::invalid_argument("smooth_with_future: shape mismatch");
    std::vector<double> next(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      double acc = 0.0;
      for (std::size_t sp = 0; sp < n; ++sp)
        acc += st.transition->at(sp, s) * st.likelihood[sp] * beta[sp];
      next[s] = acc;
    }
    beta.swap(next);
  }
  std::vector<double> w(n);
  double total = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    w[s] = filtered_tau[s] * beta[s];
    total += w[s];
  }
  if (total <= 0.0) return filtered_tau;
  for (double& x : w) x /= total;
  return Categorical(std::move(w));
}

}  // namespace forage
