// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace uaai::numkit {

/// Counter-based random stream. The n-th draw is a pure function of
/// (seed, stream_id, n), so identical keys reproduce identical sequences on
/// every platform. Child streams hash the parent key with a child id.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

  RngStream child(std::uint64_t id) const;
  RngStream child(std::uint64_t id, std::uint64_t sub_id) const { return child(id).child(sub_id); }

  std::uint64_t next_u64();
  /// Uniform on the open interval (0,1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Unbiased integer in [0, n).
  std::uint64_t index(std::uint64_t n);
  double normal();
  /// Gamma(shape, 1) via Marsaglia-Tsang, boosted for shape < 1.
  double gamma(double shape);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Draw from the symmetric Beta(alpha, alpha) as X / (X + Y) with X, Y ~ Gamma(alpha).
/// The result is strictly inside (0,1).
double sample_beta(double alpha, RngStream& rng);

}  // namespace uaai::numkit
