// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0
//
// Reference implementations written directly from the definitions in
// extended precision. They share no code with the library so that agreement
// is evidence rather than tautology.

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace uaai::testing {

using LD = long double;
using Vec = std::vector<LD>;
using Mat = std::vector<Vec>;

inline Vec softmax_ld(const std::vector<double>& z) {
  LD m = z[0];
  for (double v : z) m = std::max<LD>(m, v);
  Vec e(z.size());
  LD s = 0;
  for (std::size_t i = 0; i < z.size(); ++i) s += (e[i] = std::exp(static_cast<LD>(z[i]) - m));
  for (auto& v : e) v /= s;
  return e;
}

inline LD entropy_ld(const Vec& p) {
  LD h = 0;
  for (LD v : p)
    if (v > 0) h -= v * std::log(v);
  return h;
}

inline LD kl_ld(const Vec& p, const Vec& q) {
  LD d = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0) d += p[i] * std::log(p[i] / q[i]);
  return d;
}

/// (counts + smoothing) normalized along each row.
inline Mat confusion_rows_ld(const std::vector<std::vector<double>>& counts, double smoothing) {
  Mat c(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    LD total = 0;
    for (double v : counts[i]) total += v + smoothing;
    for (double v : counts[i]) c[i].push_back((v + smoothing) / total);
  }
  return c;
}

/// lambda C + (1 - lambda) / K with lambda = 1 - H(p) / ln K.
inline Mat tempered_likelihood_ld(const Mat& c, const Vec& frame_probs) {
  const std::size_t k = c.size();
  const LD lambda = 1 - entropy_ld(frame_probs) / std::log(static_cast<LD>(k));
  Mat a = c;
  for (auto& row : a)
    for (auto& v : row) v = lambda * v + (1 - lambda) / static_cast<LD>(k);
  return a;
}

struct Predictive {
  Vec p_obs;
  Mat posterior;  // posterior[o][s]
};

inline Predictive predictive_ld(const Vec& belief, const Mat& a) {
  const std::size_t k = belief.size();
  Predictive out{Vec(k, 0), Mat(k, Vec(k, 0))};
  for (std::size_t o = 0; o < k; ++o) {
    for (std::size_t s = 0; s < k; ++s) out.p_obs[o] += belief[s] * a[s][o];
    for (std::size_t s = 0; s < k; ++s) out.posterior[o][s] = belief[s] * a[s][o] / out.p_obs[o];
  }
  return out;
}

/// Negative expected information gain.
inline LD efe_info_gain_ld(const Vec& belief, const Mat& a) {
  const auto pr = predictive_ld(belief, a);
  LD g = 0;
  for (std::size_t o = 0; o < belief.size(); ++o) g -= pr.p_obs[o] * kl_ld(pr.posterior[o], belief);
  return g;
}

/// Expected cross-entropy of the target under the post-observation belief,
/// minus the belief-weighted entropy of the likelihood rows.
inline LD efe_label_target_ld(const Vec& belief, const Mat& a, std::size_t target) {
  const auto pr = predictive_ld(belief, a);
  LD g = 0;
  for (std::size_t o = 0; o < belief.size(); ++o) g -= pr.p_obs[o] * std::log(pr.posterior[o][target]);
  for (std::size_t s = 0; s < belief.size(); ++s) g -= belief[s] * entropy_ld(a[s]);
  return g;
}

/// p(s | o_1..o_n) from the joint prior(s) * prod_t A_t(s, o_t).
inline Vec joint_posterior_ld(const Vec& prior, const std::vector<Mat>& likelihoods, const std::vector<std::size_t>& obs) {
  Vec joint = prior;
  for (std::size_t s = 0; s < prior.size(); ++s)
    for (std::size_t t = 0; t < obs.size(); ++t) joint[s] *= likelihoods[t][s][obs[t]];
  LD z = 0;
  for (LD v : joint) z += v;
  for (auto& v : joint) v /= z;
  return joint;
}

}  // namespace uaai::testing
