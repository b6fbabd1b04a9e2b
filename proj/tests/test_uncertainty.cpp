// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "properties.hpp"
#include "uaai/error.hpp"
#include "uaai/learnkit/param_set.hpp"
#include "uaai/uncertainty/uncertainty.hpp"

using namespace uaai;
using namespace uaai::uncertainty;
using numkit::Categorical;

TEST_CASE("population variance over passes") {
  const std::vector<Categorical> passes{Categorical({0.9, 0.1}), Categorical({0.5, 0.5}), Categorical({0.7, 0.3})};
  const auto s = score_from_passes(passes);
  const double var = ((0.2 * 0.2) + (0.2 * 0.2) + 0.0) / 3.0;
  CHECK(s.per_class_variance[0] == doctest::Approx(var));
  CHECK(s.per_class_variance[1] == doctest::Approx(var));
  CHECK(s.u == doctest::Approx(var));
  CHECK_THROWS_AS(score_from_passes({}), InvalidInput);
}

TEST_CASE("identical passes have zero uncertainty and alternating one-hots reach 1/4") {
  const std::vector<Categorical> same(5, Categorical({0.2, 0.3, 0.5}));
  CHECK(score_from_passes(same).u == 0.0);
  const std::vector<Categorical> flip{Categorical::one_hot(3, 0), Categorical::one_hot(3, 1),
                                      Categorical::one_hot(3, 0), Categorical::one_hot(3, 1)};
  CHECK(score_from_passes(flip).u == doctest::Approx(0.25));
}

TEST_CASE("weights under both rules") {
  CHECK(weight_from_uncertainty(0.0, 10.0, 0.1).w == doctest::Approx(1.1));
  CHECK(weight_from_uncertainty(0.25, 10.0, 0.1).w == doctest::Approx(std::exp(-2.5) + 0.1));
  CHECK(weight_from_uncertainty(0.1, 10.0, 0.1, WeightRule::one_minus_u).w == doctest::Approx(0.9));
  CHECK(weight_from_uncertainty(0.1, 10.0, 0.1).source_u == 0.1);
  CHECK_THROWS_AS(weight_from_uncertainty(0.3, 10.0, 0.1), InvalidInput);
  CHECK_THROWS_AS(weight_from_uncertainty(-0.01, 10.0, 0.1), InvalidInput);
  CHECK_THROWS_AS(weight_from_uncertainty(0.1, -1.0, 0.1), InvalidInput);
  CHECK_THROWS_AS(weight_from_uncertainty(0.1, 10.0, 0.0), InvalidInput);
  CHECK(weight_rule_from_string(to_string(WeightRule::one_minus_u)) == WeightRule::one_minus_u);
  CHECK_THROWS_AS(weight_rule_from_string("linear"), InvalidConfig);
}

TEST_CASE("MC config validation") {
  CHECK_THROWS_AS((MCConfig{0, 0.3}).validate(), InvalidConfig);
  CHECK_THROWS_AS((MCConfig{5, 1.0}).validate(), InvalidConfig);
  CHECK_NOTHROW((MCConfig{}).validate());
}

TEST_CASE("mc_uncertainty gives pass t the stream rng.child(t)") {
  const numkit::RngStream root(77, 3);
  std::vector<double> seen;
  const auto s = mc_uncertainty(
      [&](numkit::RngStream& rng) {
        const double x = rng.uniform();
        seen.push_back(x);
        return Categorical({x, 1.0 - x});
      },
      MCConfig{4, 0.3}, root);
  REQUIRE(seen.size() == 4);
  for (std::size_t t = 0; t < 4; ++t) {
    numkit::RngStream expected = root.child(t);
    CHECK(seen[t] == expected.uniform());
  }
  CHECK(s.u > 0.0);
}

TEST_CASE("network form: no dropout means no uncertainty, dropout means some") {
  using learnkit::LayerSpec;
  learnkit::ParamSet p;
  numkit::RngStream init(1, 1);
  const std::vector<LayerSpec> plain{LayerSpec::linear("fc1", 6, 16), LayerSpec::relu(), LayerSpec::linear("fc2", 16, 3)};
  learnkit::init_params(plain, p, init);
  std::vector<LayerSpec> dropped = plain;
  dropped.insert(dropped.begin() + 2, LayerSpec::dropout(0.5));
  const numkit::FloatArray x({1, 6}, std::vector<float>{1, -1, 2, 0.5f, -2, 1});
  CHECK(mc_uncertainty(plain, p, x, MCConfig{5, 0.0}, numkit::RngStream(2, 2)).u < 1e-20);
  const auto s = mc_uncertainty(dropped, p, x, MCConfig{8, 0.5}, numkit::RngStream(2, 2));
  CHECK(s.u > 0.0);
  CHECK(s.u <= 0.25);
  CHECK(mc_uncertainty(dropped, p, x, MCConfig{8, 0.5}, numkit::RngStream(2, 2)).u == s.u);
}

TEST_CASE("uncertainty math-core properties") {
  for (const auto& p : testing::math_core_properties(707, 300)) {
    if (p.module != "uncertainty") continue;
    INFO(p.name << ": " << p.first_failure);
    CHECK(p.passed());
  }
}
