// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "uaai/efe/efe.hpp"
#include "uaai/efe/spatial.hpp"
#include "uaai/genmodel/genmodel.hpp"
#include "uaai/learnkit/grad_check.hpp"
#include "uaai/numkit/categorical.hpp"
#include "uaai/numkit/rng.hpp"
#include "uaai/pipeline/model.hpp"
#include "uaai/umix/umix.hpp"
#include "uaai/uncertainty/uncertainty.hpp"

namespace uaai::testing {

namespace {

using numkit::Categorical;
using Engine = std::mt19937_64;

std::vector<double> normal_vec(Engine& eng, std::size_t n, double scale) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = d(eng);
  return v;
}

std::size_t uniform_index(Engine& eng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(eng);
}

double uniform_real(Engine& eng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); }

Categorical random_categorical(Engine& eng, std::size_t k, double scale = 2.0) {
  return numkit::softmax(normal_vec(eng, k, scale));
}

Eigen::MatrixXd random_counts(Engine& eng, std::size_t k, int max_count) {
  Eigen::MatrixXd c(k, k);
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j) c(i, j) = static_cast<double>(uniform_index(eng, 0, max_count));
  return c;
}

Eigen::MatrixXd random_stochastic(Engine& eng, std::size_t k) {
  Eigen::MatrixXd a(k, k);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = uniform_real(eng, 0.01, 1.0);
    a.row(i) /= a.row(i).sum();
  }
  return a;
}

Vec to_ld(std::span<const double> v) { return Vec(v.begin(), v.end()); }

Mat to_ld(const Eigen::MatrixXd& m) {
  Mat out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)].push_back(m(i, j));
  return out;
}

// Runs `trial` `trials` times; a trial returns an empty string on success or a
// description of what went wrong.
PropertyOutcome run_property(const std::string& module, const std::string& name, std::size_t trials, Engine& eng,
                             const std::function<std::string(Engine&)>& trial) {
  PropertyOutcome out{module, name, trials, 0, {}};
  for (std::size_t t = 0; t < trials; ++t) {
    std::string err;
    try {
      err = trial(eng);
    } catch (const std::exception& e) {
      err = std::string("threw: ") + e.what();
    }
    if (!err.empty()) {
      if (out.failures == 0) out.first_failure = "trial " + std::to_string(t) + ": " + err;
      ++out.failures;
    }
  }
  return out;
}

std::string describe(const char* what, double got, double bound) {
  std::ostringstream ss;
  ss.precision(17);
  ss << what << " = " << got << " (bound " << bound << ")";
  return ss.str();
}

}  // namespace

std::vector<PropertyOutcome> math_core_properties(std::uint64_t seed, std::size_t trials) {
  Engine eng(seed);
  std::vector<PropertyOutcome> out;

  out.push_back(run_property("numkit", "softmax lies on the simplex", trials, eng, [](Engine& e) {
    const std::size_t k = uniform_index(e, 2, 12);
    const auto p = numkit::softmax(normal_vec(e, k, uniform_real(e, 0.1, 60.0)));
    double s = 0.0;
    for (double v : p.probs()) {
      if (!(v >= 0.0 && v <= 1.0)) return describe("entry", v, 1.0);
      s += v;
    }
    return std::abs(s - 1.0) <= 1e-12 ? std::string() : describe("|sum - 1|", std::abs(s - 1.0), 1e-12);
  }));

  out.push_back(run_property("numkit", "softmax matches extended-precision oracle", trials, eng, [](Engine& e) {
    const std::size_t k = uniform_index(e, 2, 12);
    const auto z = normal_vec(e, k, 5.0);
    const auto p = numkit::softmax(z);
    const auto q = softmax_ld(z);
    for (std::size_t i = 0; i < k; ++i) {
      const double err = static_cast<double>(std::abs(p[i] - q[i]));
      if (err > 1e-12) return describe("abs error", err, 1e-12);
    }
    return std::string();
  }));

  out.push_back(run_property("numkit", "softmax is shift invariant", trials, eng, [](Engine& e) {
    const std::size_t k = uniform_index(e, 2, 12);
    auto z = normal_vec(e, k, 3.0);
    const auto p = numkit::softmax(z);
    const double c = uniform_real(e, -100.0, 100.0);
    for (auto& v : z) v += c;
    const auto q = numkit::softmax(z);
    for (std::size_t i = 0; i < k; ++i)
      if (std::abs(p[i] - q[i]) > 1e-12) return describe("shifted diff", std::abs(p[i] - q[i]), 1e-12);
    return std::string();
  }));

  out.push_back(run_property("numkit", "KL is nonnegative, zero on itself, matches oracle", trials, eng,
                             [](Engine& e) {
                               const std::size_t k = uniform_index(e, 2, 10);
                               const auto p = random_categorical(e, k);
                               const auto q = random_categorical(e, k);
                               const double d = numkit::kl_divergence(p, q);
                               if (d < 0.0) return describe("KL", d, 0.0);
                               if (numkit::kl_divergence(p, p) != 0.0 && numkit::kl_divergence(p, p) > 1e-15)
                                 return describe("KL(p,p)", numkit::kl_divergence(p, p), 1e-15);
                               const double ref = static_cast<double>(kl_ld(to_ld(p.probs()), to_ld(q.probs())));
                               return std::abs(d - ref) <= 1e-10 ? std::string()
                                                                 : describe("|KL - oracle|", std::abs(d - ref), 1e-10);
                             }));

  out.push_back(run_property("numkit", "entropy within [0, ln K] with both ends attained", trials, eng,
                             [](Engine& e) {
                               const std::size_t k = uniform_index(e, 2, 12);
                               const double lnk = std::log(static_cast<double>(k));
                               const double h = numkit::entropy(random_categorical(e, k, 4.0));
                               if (h < 0.0 || h > lnk) return describe("H", h, lnk);
                               if (std::abs(numkit::entropy(Categorical::uniform(k)) - lnk) > 1e-12)
                                 return std::string("uniform entropy is not ln K");
                               if (numkit::entropy(Categorical::one_hot(k, uniform_index(e, 0, k - 1))) != 0.0)
                                 return std::string("one-hot entropy is not 0");
                               return std::string();
                             }));

  out.push_back(run_property("numkit", "Beta(a, a) support and moments", std::max<std::size_t>(1, trials / 10), eng,
                             [](Engine& e) {
                               const double a = uniform_real(e, 0.2, 3.0);
                               numkit::RngStream rng(e(), 7);
                               const int n = 4000;
                               double m = 0.0, m2 = 0.0;
                               for (int i = 0; i < n; ++i) {
                                 const double x = numkit::sample_beta(a, rng);
                                 if (!(x > 0.0 && x < 1.0)) return describe("draw", x, 1.0);
                                 m += x;
                                 m2 += x * x;
                               }
                               m /= n;
                               const double var = m2 / n - m * m;
                               const double expected_var = 1.0 / (4.0 * (2.0 * a + 1.0));
                               if (std::abs(m - 0.5) > 0.05) return describe("mean", m, 0.5);
                               if (std::abs(var - expected_var) > 0.025) return describe("variance", var, expected_var);
                               return std::string();
                             }));

  out.push_back(run_property("genmodel", "tempered likelihood is row-stochastic", trials, eng, [](Engine& e) {
    const std::size_t k = uniform_index(e, 2, 8);
    const genmodel::ConfusionModel c(random_counts(e, k, 30), uniform_real(e, 0.1, 2.0));
    const auto a = genmodel::frame_likelihood(c, random_categorical(e, k, 3.0)).matrix;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if ((a.row(i).array() < 0.0).any()) return std::string("negative entry");
      if (std::abs(a.row(i).sum() - 1.0) > 1e-12) return describe("row sum - 1", a.row(i).sum() - 1.0, 1e-12);
    }
    return std::string();
  }));

  out.push_back(run_property("genmodel", "Bayes update preserves the simplex", trials, eng, [](Engine& e) {
    const std::size_t k = uniform_index(e, 2, 8);
    const genmodel::Belief b(random_categorical(e, k));
    const genmodel::LikelihoodMatrix a{random_stochastic(e, k), 0, 1.0};
    const auto post = genmodel::belief_update(b, a, uniform_index(e, 0, k - 1));
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (post[i] < 0.0 || post[i] > 1.0) return describe("posterior entry", post[i], 1.0);
      s += post[i];
    }
    return std::abs(s - 1.0) <= 1e-12 ? std::string() : describe("|sum - 1|", std::abs(s - 1.0), 1e-12);
  }));

  out.push_back(run_property("genmodel", "Bayes updates commute", trials, eng, [](Engine& e) {
    const std::size_t k = uniform_index(e, 2, 8);
    const genmodel::Belief b(random_categorical(e, k));
    const genmodel::LikelihoodMatrix a1{random_stochastic(e, k), 0, 1.0};
    const genmodel::LikelihoodMatrix a2{random_stochastic(e, k), 1, 1.0};
    const std::size_t o1 = uniform_index(e, 0, k - 1), o2 = uniform_index(e, 0, k - 1);
    const auto x = genmodel::belief_update(genmodel::belief_update(b, a1, o1), a2, o2);
    const auto y = genmodel::belief_update(genmodel::belief_update(b, a2, o2), a1, o1);
    for (std::size_t i = 0; i < k; ++i)
      if (std::abs(x[i] - y[i]) > 1e-12) return describe("order difference", std::abs(x[i] - y[i]), 1e-12);
    return std::string();
  }));

  out.push_back(run_property("efe", "information gain is nonnegative and matches oracle", trials, eng,
                             [](Engine& e) {
                               const std::size_t k = uniform_index(e, 2, 8);
                               const genmodel::Belief b(random_categorical(e, k));
                               const genmodel::LikelihoodMatrix a{random_stochastic(e, k), 0, 1.0};
                               const double ig = efe::expected_info_gain(b, a);
                               if (ig < 0.0) return describe("info gain", ig, 0.0);
                               const double ref =
                                   -static_cast<double>(efe_info_gain_ld(to_ld(b.dist().probs()), to_ld(a.matrix)));
                               return std::abs(ig - ref) <= 1e-10 ? std::string()
                                                                  : describe("|IG - oracle|", std::abs(ig - ref), 1e-10);
                             }));

  out.push_back(run_property("efe", "uniform likelihood carries zero information", trials, eng, [](Engine& e) {
    const std::size_t k = uniform_index(e, 2, 12);
    const genmodel::Belief b(random_categorical(e, k, 4.0));
    const genmodel::LikelihoodMatrix a{Eigen::MatrixXd::Constant(k, k, 1.0 / static_cast<double>(k)), 0, 0.0};
    const double ig = efe::expected_info_gain(b, a);
    return ig == 0.0 ? std::string() : describe("info gain", ig, 0.0);
  }));

  out.push_back(run_property("uncertainty", "MC variance is bounded by 1/4", trials, eng, [](Engine& e) {
    const std::size_t k = uniform_index(e, 2, 8);
    const std::size_t t = uniform_index(e, 1, 12);
    std::vector<Categorical> passes;
    const bool adversarial = uniform_index(e, 0, 3) == 0;
    for (std::size_t i = 0; i < t; ++i) {
      passes.push_back(adversarial ? Categorical::one_hot(k, i % 2) : random_categorical(e, k, 6.0));
    }
    const auto s = uncertainty::score_from_passes(passes);
    for (double v : s.per_class_variance)
      if (v < 0.0) return describe("variance", v, 0.0);
    return s.u <= 0.25 ? std::string() : describe("u", s.u, 0.25);
  }));

  out.push_back(run_property("uncertainty", "weight decreases with uncertainty", trials, eng, [](Engine& e) {
    double u1 = uniform_real(e, 0.0, 0.25), u2 = uniform_real(e, 0.0, 0.25);
    if (u1 > u2) std::swap(u1, u2);
    const double alpha = uniform_real(e, 0.5, 20.0), beta = uniform_real(e, 0.01, 1.0);
    using uncertainty::WeightRule;
    for (auto rule : {WeightRule::exp_beta, WeightRule::one_minus_u}) {
      const double w1 = uncertainty::weight_from_uncertainty(u1, alpha, beta, rule).w;
      const double w2 = uncertainty::weight_from_uncertainty(u2, alpha, beta, rule).w;
      if (w1 < w2) return describe("w(u1) - w(u2)", w1 - w2, 0.0);
      if (u1 < u2 && !(w1 > w2)) return std::string("weight is not strictly decreasing");
    }
    return std::string();
  }));

  out.push_back(run_property("umix", "mixup endpoints reproduce the inputs", trials, eng, [](Engine& e) {
    const std::size_t n = uniform_index(e, 1, 40);
    const auto a = normal_vec(e, n, 2.0), b = normal_vec(e, n, 2.0);
    const numkit::FloatArray xi({n}, std::vector<float>(a.begin(), a.end()));
    const numkit::FloatArray xj({n}, std::vector<float>(b.begin(), b.end()));
    if (umix::mix_samples(xi, 0, xj, 1, 1.0).x_mixed != xi) return std::string("lambda = 1 does not give x_i");
    if (umix::mix_samples(xi, 0, xj, 1, 0.0).x_mixed != xj) return std::string("lambda = 0 does not give x_j");
    return std::string();
  }));

  out.push_back(run_property("umix", "mixup is symmetric under swapping the pair", trials, eng, [](Engine& e) {
    const std::size_t n = uniform_index(e, 1, 40), k = uniform_index(e, 2, 8);
    const auto a = normal_vec(e, n, 2.0), b = normal_vec(e, n, 2.0);
    const numkit::FloatArray xi({n}, std::vector<float>(a.begin(), a.end()));
    const numkit::FloatArray xj({n}, std::vector<float>(b.begin(), b.end()));
    const double lambda = uniform_real(e, 0.0, 1.0), wi = uniform_real(e, 0.1, 1.1), wj = uniform_real(e, 0.1, 1.1);
    const std::size_t yi = uniform_index(e, 0, k - 1), yj = uniform_index(e, 0, k - 1);
    const auto m1 = umix::mix_samples(xi, yi, xj, yj, lambda, wi, wj);
    const auto m2 = umix::mix_samples(xj, yj, xi, yi, 1.0 - lambda, wj, wi);
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(m1.x_mixed.data()[i] - m2.x_mixed.data()[i]) > 1e-5f) return std::string("mixed inputs differ");
    const auto s1 = m1.soft_label(k), s2 = m2.soft_label(k);
    for (std::size_t c = 0; c < k; ++c)
      if (std::abs(s1[c] - s2[c]) > 1e-12) return std::string("soft labels differ");
    const auto logits = normal_vec(e, k, 2.0);
    const double l1 = umix::umix_loss(logits, m1), l2 = umix::umix_loss(logits, m2);
    return std::abs(l1 - l2) <= 1e-12 ? std::string() : describe("loss difference", std::abs(l1 - l2), 1e-12);
  }));

  return out;
}

namespace {

using DParams = learnkit::BasicParamSet<double>;
using DArray = numkit::NumArray;

DArray random_array(Engine& eng, numkit::Shape shape, double scale) {
  const auto v = normal_vec(eng, numkit::shape_size(shape), scale);
  return DArray(std::move(shape), v);
}

double dot(const DArray& a, const DArray& r) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * r.data()[i];
  return s;
}

DParams random_model_params(Engine& eng, const pipeline::BasicModel<double>& model) {
  numkit::RngStream rng(eng(), 11);
  DParams p = model.init(rng);
  for (auto& [key, t] : p.mutable_tensors()) {
    if (key.ends_with(".bias")) t = random_array(eng, t.shape(), 0.1);
  }
  return p;
}

pipeline::ModelShape small_shape(bool spatial) {
  pipeline::ModelShape s;
  s.classes = 3;
  s.grid = 6;
  s.channels = 2;
  s.embedding = 5;
  s.dropout = 0.3;
  s.spatial = spatial;
  return s;
}

double logits_check(Engine& eng, const std::function<double(std::span<const double>, std::span<double>)>& loss,
                    std::size_t k) {
  DParams p;
  p.add("logits", random_array(eng, {k}, 2.0));
  return learnkit::grad_check(
      p,
      [&](const DParams& q, DParams* grads) {
        const auto& z = q.at("logits");
        std::vector<double> g(k);
        const double v = loss(z.storage(), g);
        if (grads) grads->mutable_at("logits") = DArray({k}, g);
        return v;
      },
      1e-6);
}

}  // namespace

std::vector<GradOutcome> gradient_fidelity(std::uint64_t seed, std::size_t instances) {
  Engine eng(seed);
  std::vector<GradOutcome> out;
  constexpr double kEps = 1e-6;

  auto model_path = [&](const std::string& name, bool spatial) {
    GradOutcome g{name, instances, 0.0};
    const pipeline::BasicModel<double> model(small_shape(spatial));
    for (std::size_t i = 0; i < instances; ++i) {
      const DParams params = random_model_params(eng, model);
      const std::size_t per = uniform_index(eng, 1, 3), seqs = uniform_index(eng, 1, 3);
      const DArray frames = random_array(eng, {seqs * per, 6, 6}, 1.0);
      const DArray r = random_array(eng, {seqs, 3}, 1.0);
      const numkit::RngStream masks(eng(), 13);
      g.max_relative_error = std::max(
          g.max_relative_error,
          learnkit::grad_check(
              params,
              [&](const DParams& p, DParams* grads) {
                numkit::RngStream rng = masks;
                pipeline::ModelTrace<double> trace;
                const DArray logits =
                    model.sequence_logits(p, frames, per, learnkit::Mode::train, rng, grads ? &trace : nullptr);
                if (grads) model.backward(p, trace, r, *grads);
                return dot(logits, r);
              },
              kEps));
    }
    out.push_back(g);
  };
  model_path("encoder + classifier (no attention)", false);
  model_path("encoder + spatial attention + classifier", true);

  {
    GradOutcome g{"classifier", instances, 0.0};
    const pipeline::BasicModel<double> model(small_shape(false));
    for (std::size_t i = 0; i < instances; ++i) {
      const DParams all = random_model_params(eng, model);
      DParams params;
      for (const auto& [key, t] : all.tensors())
        if (key.starts_with("classifier.")) params.add(key, t);
      const std::size_t m = uniform_index(eng, 1, 4);
      const DArray emb = random_array(eng, {m, 5}, 1.0);
      const DArray r = random_array(eng, {m, 3}, 1.0);
      const numkit::RngStream masks(eng(), 17);
      const std::vector<learnkit::LayerSpec> head = model.networks().at("classifier");
      const learnkit::Sequential<double> chain(head);
      g.max_relative_error = std::max(
          g.max_relative_error, learnkit::grad_check(
                                    params,
                                    [&](const DParams& p, DParams* grads) {
                                      numkit::RngStream rng = masks;
                                      learnkit::ForwardTrace<double> trace;
                                      const DArray y = chain.forward(p, emb, learnkit::Mode::train, rng,
                                                                     grads ? &trace : nullptr);
                                      if (grads) chain.backward(p, trace, r, *grads);
                                      return dot(y, r);
                                    },
                                    kEps));
    }
    out.push_back(g);
  }

  {
    GradOutcome g{"spatial attention (mask and features)", instances, 0.0};
    for (std::size_t i = 0; i < instances; ++i) {
      const std::size_t n = uniform_index(eng, 1, 2), c = uniform_index(eng, 1, 4), h = uniform_index(eng, 3, 8),
                        w = uniform_index(eng, 3, 8);
      DParams params;
      params.add("attention.conv.weight", random_array(eng, {1, 2, 7, 7}, 0.3));
      params.add("attention.conv.bias", random_array(eng, {1}, 0.3));
      params.add("features", random_array(eng, {n, c, h, w}, 1.0));
      const DArray r_out = random_array(eng, {n, c, h, w}, 1.0);
      const DArray r_mask = random_array(eng, {n, 1, h, w}, 1.0);
      g.max_relative_error =
          std::max(g.max_relative_error,
                   learnkit::grad_check(
                       params,
                       [&](const DParams& p, DParams* grads) {
                         efe::AttentionTrace<double> trace;
                         const auto o = efe::spatial_attention_forward(p.at("features"), p, grads ? &trace : nullptr);
                         if (grads) {
                           grads->mutable_at("features") =
                               efe::spatial_attention_backward(p, trace, r_out, *grads, &r_mask);
                         }
                         return dot(o.reweighted, r_out) + dot(o.mask, r_mask);
                       },
                       kEps));
    }
    out.push_back(g);
  }

  {
    GradOutcome g{"umix_loss", instances, 0.0};
    for (std::size_t i = 0; i < instances; ++i) {
      const std::size_t k = uniform_index(eng, 2, 10);
      umix::MixedSample s;
      s.y_i = uniform_index(eng, 0, k - 1);
      s.y_j = uniform_index(eng, 0, k - 1);
      s.lambda = uniform_real(eng, 0.0, 1.0);
      s.w_i = uniform_real(eng, 0.1, 1.1);
      s.w_j = uniform_real(eng, 0.1, 1.1);
      g.max_relative_error = std::max(
          g.max_relative_error,
          logits_check(eng, [&](std::span<const double> z, std::span<double> gz) { return umix::umix_loss(z, s, gz); },
                       k));
    }
    out.push_back(g);
  }

  {
    GradOutcome g{"vfe_loss", instances, 0.0};
    for (std::size_t i = 0; i < instances; ++i) {
      const std::size_t k = uniform_index(eng, 2, 10);
      const std::size_t label = uniform_index(eng, 0, k - 1);
      genmodel::VFEConfig cfg(k, uniform_real(eng, 0.0, 1.0));
      if (uniform_index(eng, 0, 1) == 1) cfg.prior = random_categorical(eng, k, 1.0);
      g.max_relative_error = std::max(g.max_relative_error,
                                      logits_check(
                                          eng,
                                          [&](std::span<const double> z, std::span<double> gz) {
                                            return genmodel::vfe_loss_from_logits(z, label, cfg, gz);
                                          },
                                          k));
    }
    out.push_back(g);
  }
  return out;
}

OracleOutcome oracle_equivalence(std::uint64_t seed, std::size_t instances) {
  Engine eng(seed);
  OracleOutcome out;
  out.instances = instances;
  constexpr std::size_t kT = 5, kK = 3;
  for (std::size_t n = 0; n < instances; ++n) {
    const Eigen::MatrixXd counts = random_counts(eng, kK, 9);
    std::vector<std::vector<double>> logits;
    for (std::size_t t = 0; t < kT; ++t) logits.push_back(normal_vec(eng, kK, 2.0));
    // Every fourth instance gets an exact duplicate frame to exercise tie-breaking.
    if (n % 4 == 0) {
      const std::size_t a = uniform_index(eng, 0, kT - 2);
      logits[uniform_index(eng, a + 1, kT - 1)] = logits[a];
      ++out.tie_instances;
    }
    std::vector<Categorical> soft;
    for (const auto& z : logits) soft.push_back(numkit::softmax(z));
    const genmodel::ConfusionModel confusion(counts, 1.0);
    std::vector<std::vector<double>> counts_rows(kK);
    for (std::size_t i = 0; i < kK; ++i)
      for (std::size_t j = 0; j < kK; ++j) counts_rows[i].push_back(counts(i, j));
    const Mat c = confusion_rows_ld(counts_rows, 1.0);
    const Vec belief(kK, 1.0L / kK);
    const std::size_t target = uniform_index(eng, 0, kK - 1);

    auto brute_first = [&](bool info_gain) {
      std::size_t best = 0;
      LD best_g = 0;
      for (std::size_t t = 0; t < kT; ++t) {
        const Mat a = tempered_likelihood_ld(c, softmax_ld(logits[t]));
        const LD g = info_gain ? efe_info_gain_ld(belief, a) : efe_label_target_ld(belief, a, target);
        if (t == 0 || g < best_g) {
          best = t;
          best_g = g;
        }
      }
      return best;
    };
    // The duplicate is bitwise identical, so both sides see an exact tie and
    // must resolve it to the earlier frame.
    if (efe::select_frames(soft, confusion, 1, efe::EFEMode::info_gain()).selected.front() == brute_first(true)) {
      ++out.info_gain_matches;
    }
    if (efe::select_frames(soft, confusion, 1, efe::EFEMode::label_target(target)).selected.front() ==
        brute_first(false)) {
      ++out.label_target_matches;
    }
  }

  constexpr std::size_t kChainK = 4;
  out.chains = instances;
  for (std::size_t n = 0; n < instances; ++n) {
    const Categorical prior = random_categorical(eng, kChainK, 1.5);
    std::vector<genmodel::LikelihoodMatrix> as;
    std::vector<Mat> as_ld;
    std::vector<std::size_t> obs;
    genmodel::Belief b(prior);
    for (std::size_t t = 0; t < 3; ++t) {
      as.push_back({random_stochastic(eng, kChainK), t, 1.0});
      as_ld.push_back(to_ld(as.back().matrix));
      obs.push_back(uniform_index(eng, 0, kChainK - 1));
      b = genmodel::belief_update(b, as.back(), obs.back());
    }
    const Vec joint = joint_posterior_ld(to_ld(prior.probs()), as_ld, obs);
    for (std::size_t s = 0; s < kChainK; ++s) {
      out.max_belief_error = std::max(out.max_belief_error, static_cast<double>(std::abs(b[s] - joint[s])));
    }
  }
  return out;
}

}  // namespace uaai::testing
