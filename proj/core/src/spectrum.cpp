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

#include "kppfl/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "kppfl/error.hpp"

namespace kppfl {

SpectralDensity::SpectralDensity(std::string name, std::function<double(double)> density)
    : name_(std::move(name)), density_(std::move(density))
{
    require(static_cast<bool>(density_), "spectral density callable is empty");
}

SpectralDensity SpectralDensity::preset(std::string_view name)
{
    if (name == "k05exp") {
        return {"k05exp", [](double k) { return std::sqrt(k) * std::exp(-k); }};
    }
    if (name == "exp") {
        return {"exp", [](double k) { return std::exp(-k); }};
    }
    if (name == "gauss") {
        return {"gauss", [](double k) { return std::exp(-k * k); }};
    }
    if (name == "zero") {
        return {"zero", [](double) { return 0.0; }};
    }
    throw SpectrumError("unknown spectrum preset '" + std::string(name) + "'");
}

std::vector<std::string> SpectralDensity::preset_names()
{
    return {"k05exp", "exp", "gauss", "zero"};
}

double spectral_tail_sum(const SpectralDensity& spectrum, double delta_k, long long first,
                         long long max_terms)
{
    require(delta_k > 0.0, "delta_k must be positive");
    require(first >= 0, "tail start index must be nonnegative");
    double sum = 0.0;
    int quiet = 0;
    for (long long n = 0; n < max_terms; ++n) {
        const long long j = first + n;
        const double e = spectrum(static_cast<double>(j) * delta_k);
        if (!(e >= 0.0) || !std::isfinite(e)) {
            throw SpectrumError("spectrum '" + spectrum.name() + "' is negative or non-finite at k=" +
                                std::to_string(static_cast<double>(j) * delta_k));
        }
        const double increment = 2.0 * e * delta_k;
        sum += increment;
        quiet = increment <= 1e-14 * sum ? quiet + 1 : 0;
        if (quiet >= 10) {
            return sum;
        }
    }
    throw SpectrumError("tail of spectrum '" + spectrum.name() + "' did not converge within " +
                        std::to_string(max_terms) + " terms");
}

SpectrumReport check_spectrum(const SpectralDensity& spectrum, double delta_k,
                              long long n_samples, long long tail_start)
{
    require(delta_k > 0.0, "delta_k must be positive");
    require(n_samples >= 3, "need at least three spectral samples");
    SpectrumReport report;

    std::vector<double> e(static_cast<std::size_t>(n_samples));
    bool finite = true;
    report.nonnegative = true;
    for (long long j = 0; j < n_samples; ++j) {
        e[j] = spectrum(static_cast<double>(j) * delta_k);
        finite = finite && std::isfinite(e[j]);
        report.nonnegative = report.nonnegative && e[j] >= 0.0;
    }
    report.finite_at_zero = std::isfinite(e[0]);
    if (!finite || !report.nonnegative) {
        return report;
    }

    for (long long j = 0; j < n_samples; ++j) {
        const double k = static_cast<double>(j) * delta_k;
        const double w = (j == 0 || j == n_samples - 1) ? 0.5 : 1.0;
        report.integral += w * e[j] * delta_k;
        report.second_moment += w * k * k * e[j] * delta_k;
        report.max_density = std::max(report.max_density, e[j]);
    }
    for (long long j = 1; j + 1 < n_samples; ++j) {
        const double d1 = (e[j + 1] - e[j - 1]) / (2.0 * delta_k);
        const double d2 = (e[j + 1] - 2.0 * e[j] + e[j - 1]) / (delta_k * delta_k);
        report.max_first_derivative = std::max(report.max_first_derivative, std::fabs(d1));
        report.max_second_derivative = std::max(report.max_second_derivative, std::fabs(d2));
    }
    report.integrable = std::isfinite(report.integral) && std::isfinite(report.second_moment);
    report.bounded_derivatives = std::isfinite(report.max_first_derivative) &&
                                 std::isfinite(report.max_second_derivative);

    try {
        for (int i = 0; i < 4; ++i) {
            const long long y = tail_start << i;
            const double g = spectral_tail_sum(spectrum, delta_k, y);
            report.tail_scaled.push_back(g * static_cast<double>(y) * static_cast<double>(y));
        }
        report.tail_decay = report.tail_scaled.back() <= report.tail_scaled.front() &&
                            report.tail_scaled.back() <= report.tail_scaled[report.tail_scaled.size() - 2];
    } catch (const SpectrumError&) {
        report.tail_decay = false;
    }
    return report;
}

} // namespace kppfl
