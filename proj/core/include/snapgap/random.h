/*
 * Copyright 2026 The snapgap Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SNAPGAP_RANDOM_H_
#define SNAPGAP_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace snapgap {

using RandomEngine = std::mt19937_64;

// Child seed for a named task. Pure function of (root, tag) so results do not
// depend on the order in which tasks run.
std::uint64_t DeriveSeed(std::uint64_t root, std::string_view tag);
std::uint64_t DeriveSeed(std::uint64_t root, std::string_view tag,
                         std::uint64_t index);

// Uniform integer in [0, bound). Lemire's multiply-shift with rejection, so
// the stream is identical on every standard library.
std::uint64_t UniformIndex(RandomEngine& rng, std::uint64_t bound);

// Uniform double in [0, 1) from the top 53 bits.
double UniformUnit(RandomEngine& rng);

// Standard normal via Box-Muller.
double StandardNormal(RandomEngine& rng);

// Fisher-Yates using UniformIndex.
template <typename T>
void Shuffle(std::span<T> values, RandomEngine& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = UniformIndex(rng, i);
    std::swap(values[i - 1], values[j]);
  }
}

template <typename T>
void Shuffle(std::vector<T>& values, RandomEngine& rng) {
  Shuffle(std::span<T>(values), rng);
}

}  // namespace snapgap

#endif  // SNAPGAP_RANDOM_H_
