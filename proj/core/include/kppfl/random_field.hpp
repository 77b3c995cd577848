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

// Random Fourier synthesis of stationary Gaussian fields with an equispaced
// discrete spectrum k_j = j dk:
//
//   xi(x) = sum_{j=0}^{N_F} sqrt(2 E(k_j) dk_j) [zeta_j cos(2 pi k_j x) + eta_j sin(2 pi k_j x)]
//
// with dk_0 = dk / 2 and dk_j = dk otherwise. Realizations are periodic with
// period 1 / dk.

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kppfl/spectrum.hpp"

namespace kppfl {

inline constexpr int kDefaultMaxModes = 1 << 22;

/// Frozen coefficients of one realization. Immutable after construction.
class FieldRealization {
public:
    /// Builds a realization from explicit coefficients (replay, tests).
    /// Throws SpectrumError if E(k_j) is negative or non-finite for some j.
    FieldRealization(SpectralDensity spectrum, double delta_k, std::uint64_t seed,
                     std::vector<double> zeta, std::vector<double> eta);

    const SpectralDensity& spectrum() const noexcept { return spectrum_; }
    double delta_k() const noexcept { return delta_k_; }
    double period() const noexcept { return 1.0 / delta_k_; }
    int n_modes() const noexcept { return static_cast<int>(zeta_.size()) - 1; }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<double>& zeta() const noexcept { return zeta_; }
    const std::vector<double>& eta() const noexcept { return eta_; }

    /// sqrt(2 E(k_j) dk_j).
    double amplitude(int j) const { return amplitude_.at(static_cast<std::size_t>(j)); }

    double operator()(double x) const noexcept;

private:
    SpectralDensity spectrum_;
    double delta_k_;
    std::uint64_t seed_;
    std::vector<double> zeta_;
    std::vector<double> eta_;
    std::vector<double> amplitude_;
    std::vector<double> cos_coeff_; // amplitude_j * zeta_j
    std::vector<double> sin_coeff_; // amplitude_j * eta_j
};

/// Draws 2 (N_F + 1) standard normals keyed by (seed, mode index).
FieldRealization sample_realization(const SpectralDensity& spectrum, double delta_k, int n_modes,
                                    std::uint64_t seed);

double eval_scalar(const FieldRealization& field, double x) noexcept;

/// Doubles the mode count at fixed dk. Coefficients 0..N_F are copied
/// unchanged; the new ones come from the same seeded stream at their own
/// mode indices, so refine(sample(N)) == sample(2N) exactly.
FieldRealization refine(const FieldRealization& field, int max_modes = kDefaultMaxModes);

/// Partial sum of the exact two-point correlation for an isotropic field in
/// `dim` dimensions: kernels cos, J_0 and sinc for dim 1, 2, 3.
/// With `tail_tolerance`, also requires g(n_terms + 1) <= tolerance.
double correlation_exact(const SpectralDensity& spectrum, double delta_k, int dim, double r,
                         long long n_terms, std::optional<double> tail_tolerance = std::nullopt);

struct CorrelationEstimate {
    double value = 0.0;
    double std_error = 0.0;
    int n_seeds = 0;
};

/// Monte Carlo estimate of <xi(x0) xi(x0 + r)> over `n_seeds` realizations.
/// Each realization is averaged over 2 N_F + 2 equispaced base points, which
/// integrates the product exactly over one period.
CorrelationEstimate correlation_empirical(const SpectralDensity& spectrum, double delta_k,
                                          int n_modes, double r, int n_seeds,
                                          std::uint64_t base_seed = 0);

/// g(N_F + 1): uniform bound on |R(r) - R_truncated(r)|.
double truncation_error_bound(const SpectralDensity& spectrum, double delta_k, int n_modes);

/// {delta_k, n_f, seed, spectrum_name, zeta[], eta[]}; doubles round-trip exactly.
nlohmann::json realization_to_json(const FieldRealization& field);
FieldRealization realization_from_json(const nlohmann::json& doc);

} // namespace kppfl
