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

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace kppfl {

/// Scalar energy spectrum E(k), k in cycles per unit length.
class SpectralDensity {
public:
    SpectralDensity(std::string name, std::function<double(double)> density);

    /// Named presets: "k05exp" (|k|^{1/2} e^{-|k|}), "exp", "gauss", "zero".
    static SpectralDensity preset(std::string_view name);
    static std::vector<std::string> preset_names();

    const std::string& name() const noexcept { return name_; }
    double operator()(double k) const { return density_(k < 0.0 ? -k : k); }

private:
    std::string name_;
    std::function<double(double)> density_;
};

/// Tail sum g(first) = 2 * sum_{j >= first} E(j dk) dk.
///
/// Stops once the running increment stays below 1e-14 of the partial sum for
/// ten consecutive terms. Throws SpectrumError when `max_terms` is exhausted
/// first (tail not summable in practice) or a negative density is met.
double spectral_tail_sum(const SpectralDensity& spectrum, double delta_k, long long first,
                         long long max_terms = 100'000'000);

/// Numerical evidence for the regularity properties the random Fourier
/// method relies on, sampled on the grid k_j = j dk.
struct SpectrumReport {
    bool nonnegative = false;
    bool integrable = false;          // finite integral and second moment
    bool finite_at_zero = false;
    bool bounded_derivatives = false; // finite E, E', E'' on the grid
    bool tail_decay = false;          // g(y) y^2 nonincreasing at large y
    double integral = 0.0;
    double second_moment = 0.0;
    double max_density = 0.0;
    double max_first_derivative = 0.0;
    double max_second_derivative = 0.0;
    std::vector<double> tail_scaled; // g(y) y^2 at y = y0 * 2^i

    bool ok() const noexcept
    {
        return nonnegative && integrable && finite_at_zero && bounded_derivatives && tail_decay;
    }
};

SpectrumReport check_spectrum(const SpectralDensity& spectrum, double delta_k,
                              long long n_samples = 4000, long long tail_start = 100);

} // namespace kppfl
