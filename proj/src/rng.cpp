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

#include "iceval/rng.hpp"

#include <cassert>
#include <cmath>

namespace iceval {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += kGolden);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t fold(std::uint64_t key, std::uint64_t x) {
  std::uint64_t s = key ^ (kGolden * (x + 1));
  return splitmix64(s);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed) : key_(seed) {
  std::uint64_t s = seed;
  for (auto& word : state_) word = splitmix64(s);
}

RngStream RngStream::derive(std::uint64_t a) const { return RngStream(fold(key_, a)); }

RngStream RngStream::derive(std::uint64_t a, std::uint64_t b) const {
  return RngStream(fold(fold(key_, a), b));
}

RngStream RngStream::derive(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
  return RngStream(fold(fold(fold(key_, a), b), c));
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  double u1 = uniform();
  const double u2 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

std::size_t RngStream::categorical(std::span<const double> probs) {
  assert(!probs.empty());
  const double u = uniform();
  double cum = 0.0;
  std::size_t last_positive = 0;
  bool seen_positive = false;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (probs[j] > 0.0) {
      last_positive = j;
      seen_positive = true;
      cum += probs[j];
      if (u < cum) return j;
    }
  }
  assert(seen_positive);
  (void)seen_positive;
  return last_positive;
}

std::size_t RngStream::uniform_index(std::size_t n) {
  assert(n > 0);
  // Fixed-point multiply; bias is O(n / 2^64), irrelevant at these sizes.
  return static_cast<std::size_t>(
      (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

}  // namespace iceval
