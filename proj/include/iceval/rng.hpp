// Copyright 2026 The iceval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace iceval {

/// Splittable random stream: splitmix64 key derivation feeding an
/// xoshiro256** core, normals via Box-Muller. Nothing here touches <random>
/// distributions, whose algorithms the standard leaves implementation
/// defined; every draw below is fully specified, so runs reproduce bit for
/// bit across toolchains.
///
/// Streams are addressed, not advanced into: derive(a, b, ...) hashes the
/// path into a fresh key, so (seed, replication-index) always names the same
/// stream no matter which worker consumes it.
class RngStream {
 public:
  static constexpr const char* kAlgorithmId = "splitmix64+xoshiro256**+boxmuller/v1";

  explicit RngStream(std::uint64_t seed);

  /// Child stream addressed by one or two path components.
  RngStream derive(std::uint64_t a) const;
  RngStream derive(std::uint64_t a, std::uint64_t b) const;
  RngStream derive(std::uint64_t a, std::uint64_t b, std::uint64_t c) const;

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 significant bits.
  double uniform();

  /// Standard normal (Box-Muller; consumes exactly two uniforms).
  double normal();

  /// Index draw from an unnormalized-free probability row via inverse CDF.
  /// Rows are expected to sum to 1 up to roundoff; mass deficits fall through
  /// to the last positive entry.
  std::size_t categorical(std::span<const double> probs);

  /// Uniform index in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = uniform_index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t state_[4];
};

}  // namespace iceval
