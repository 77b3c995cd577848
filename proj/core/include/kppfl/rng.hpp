/*
   Copyright 2026 The kppfl Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// Counter-based random numbers. Every draw is addressed by a logical
// coordinate (seed, purpose, three indices, draw number), so results never
// depend on evaluation order or thread count.

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace kppfl::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
inline Counter philox4x32_10(Counter ctr, Key key) noexcept
{
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
               static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
               static_cast<std::uint32_t>(p0)};
    }
    return ctr;
}

/// What a draw is used for; occupies the top byte of the last counter word.
enum class Purpose : std::uint32_t {
    field_coefficients = 1,
    initial_positions = 2,
    mutation_noise = 3,
    selection = 4,
    diagnostics = 5,
};

inline constexpr Key make_key(std::uint64_t seed) noexcept
{
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

/// splitmix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Derives an independent subsystem seed from a master seed, a tag and an index.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index = 0) noexcept;

/// Maps 64 random bits to the open interval (0, 1): midpoints of a 2^-52 grid, all exact.
inline constexpr double to_open_unit(std::uint64_t bits) noexcept
{
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Standard normal quantile, Wichura's AS241 (PPND16); relative error ~1e-16.
double inverse_normal_cdf(double p) noexcept;

/// Stream of draws for one purpose under one seed.
class Stream {
public:
    Stream(std::uint64_t seed, Purpose purpose) noexcept
        : key_(make_key(seed)), tag_(static_cast<std::uint32_t>(purpose) << 24)
    {
    }

    Counter raw(std::uint32_t i0, std::uint32_t i1, std::uint32_t i2,
                std::uint32_t draw = 0) const noexcept
    {
        return philox4x32_10({i0, i1, i2, tag_ | (draw & 0x00FFFFFFu)}, key_);
    }

    std::array<double, 2> uniforms(std::uint32_t i0, std::uint32_t i1, std::uint32_t i2,
                                   std::uint32_t draw = 0) const noexcept
    {
        const Counter r = raw(i0, i1, i2, draw);
        return {to_open_unit((std::uint64_t{r[1]} << 32) | r[0]),
                to_open_unit((std::uint64_t{r[3]} << 32) | r[2])};
    }

    std::array<double, 2> normals(std::uint32_t i0, std::uint32_t i1, std::uint32_t i2,
                                  std::uint32_t draw = 0) const noexcept
    {
        const auto u = uniforms(i0, i1, i2, draw);
        return {inverse_normal_cdf(u[0]), inverse_normal_cdf(u[1])};
    }

private:
    Key key_;
    std::uint32_t tag_;
};

} // namespace kppfl::rng
