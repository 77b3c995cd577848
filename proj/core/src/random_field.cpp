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

#include "kppfl/random_field.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "kppfl/error.hpp"
#include "kppfl/rng.hpp"

namespace kppfl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Exact sincos anchors every this many modes bound the rotation error.
constexpr int kAnchorStride = 64;

double mode_weight(int j, double delta_k)
{
    return j == 0 ? 0.5 * delta_k : delta_k;
}

} // namespace

FieldRealization::FieldRealization(SpectralDensity spectrum, double delta_k, std::uint64_t seed,
                                   std::vector<double> zeta, std::vector<double> eta)
    : spectrum_(std::move(spectrum)), delta_k_(delta_k), seed_(seed), zeta_(std::move(zeta)),
      eta_(std::move(eta))
{
    require(delta_k_ > 0.0 && std::isfinite(delta_k_), "delta_k must be positive and finite");
    require(!zeta_.empty() && zeta_.size() == eta_.size(),
            "zeta and eta must both hold N_F + 1 coefficients");
    const std::size_t n = zeta_.size();
    amplitude_.resize(n);
    cos_coeff_.resize(n);
    sin_coeff_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double k = static_cast<double>(j) * delta_k_;
        const double e = spectrum_(k);
        if (!(e >= 0.0) || !std::isfinite(e)) {
            throw SpectrumError("spectrum '" + spectrum_.name() +
                                "' is negative or non-finite at k=" + std::to_string(k));
        }
        amplitude_[j] = std::sqrt(2.0 * e * mode_weight(static_cast<int>(j), delta_k_));
        cos_coeff_[j] = amplitude_[j] * zeta_[j];
        sin_coeff_[j] = amplitude_[j] * eta_[j];
    }
}

double FieldRealization::operator()(double x) const noexcept
{
    double phase = x * delta_k_;
    phase -= std::floor(phase);
    const double theta = kTwoPi * phase;
    const double step_c = std::cos(theta);
    const double step_s = std::sin(theta);

    const std::size_t n = cos_coeff_.size();
    double sum = cos_coeff_[0];
    double c = 1.0;
    double s = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
        if (j % kAnchorStride == 0) {
            const double angle = static_cast<double>(j) * theta;
            c = std::cos(angle);
            s = std::sin(angle);
        } else {
            const double c_next = c * step_c - s * step_s;
            s = s * step_c + c * step_s;
            c = c_next;
        }
        sum += cos_coeff_[j] * c + sin_coeff_[j] * s;
    }
    return sum;
}

FieldRealization sample_realization(const SpectralDensity& spectrum, double delta_k, int n_modes,
                                    std::uint64_t seed)
{
    require(n_modes >= 0, "mode count must be nonnegative");
    require(delta_k > 0.0, "delta_k must be positive");
    const rng::Stream stream(seed, rng::Purpose::field_coefficients);
    std::vector<double> zeta(static_cast<std::size_t>(n_modes) + 1);
    std::vector<double> eta(zeta.size());
    for (std::size_t j = 0; j < zeta.size(); ++j) {
        const auto z = stream.normals(static_cast<std::uint32_t>(j), 0, 0);
        zeta[j] = z[0];
        eta[j] = z[1];
    }
    return {spectrum, delta_k, seed, std::move(zeta), std::move(eta)};
}

double eval_scalar(const FieldRealization& field, double x) noexcept
{
    return field(x);
}

FieldRealization refine(const FieldRealization& field, int max_modes)
{
    const long long target = 2LL * field.n_modes();
    if (target > max_modes) {
        throw CapacityError("refinement to " + std::to_string(target) +
                            " modes exceeds the configured maximum of " + std::to_string(max_modes));
    }
    std::vector<double> zeta = field.zeta();
    std::vector<double> eta = field.eta();
    const rng::Stream stream(field.seed(), rng::Purpose::field_coefficients);
    for (long long j = field.n_modes() + 1; j <= target; ++j) {
        const auto z = stream.normals(static_cast<std::uint32_t>(j), 0, 0);
        zeta.push_back(z[0]);
        eta.push_back(z[1]);
    }
    return {field.spectrum(), field.delta_k(), field.seed(), std::move(zeta), std::move(eta)};
}

double correlation_exact(const SpectralDensity& spectrum, double delta_k, int dim, double r,
                         long long n_terms, std::optional<double> tail_tolerance)
{
    require(dim >= 1 && dim <= 3, "correlation dimension must be 1, 2 or 3");
    require(delta_k > 0.0, "delta_k must be positive");
    require(n_terms >= 0, "term count must be nonnegative");
    if (tail_tolerance) {
        const double tail = spectral_tail_sum(spectrum, delta_k, n_terms + 1);
        require(tail <= *tail_tolerance, "n_terms too small: tail bound " + std::to_string(tail) +
                                             " exceeds tolerance");
    }
    double sum = 0.0;
    for (long long j = 0; j <= n_terms; ++j) {
        const double k = static_cast<double>(j) * delta_k;
        const double arg = kTwoPi * k * r;
        double kernel = 1.0;
        if (dim == 1) {
            kernel = std::cos(arg);
        } else if (dim == 2) {
            kernel = std::cyl_bessel_j(0.0, std::fabs(arg));
        } else if (arg != 0.0) {
            kernel = std::sin(arg) / arg;
        }
        sum += 2.0 * spectrum(k) * (j == 0 ? 0.5 * delta_k : delta_k) * kernel;
    }
    return sum;
}

CorrelationEstimate correlation_empirical(const SpectralDensity& spectrum, double delta_k,
                                          int n_modes, double r, int n_seeds,
                                          std::uint64_t base_seed)
{
    require(n_seeds >= 2, "empirical correlation needs at least two seeds");
    const int n_base = 2 * n_modes + 2;
    const double period = 1.0 / delta_k;
    std::vector<double> per_seed(static_cast<std::size_t>(n_seeds));
    for (int s = 0; s < n_seeds; ++s) {
        const FieldRealization field = sample_realization(
            spectrum, delta_k, n_modes, rng::derive_seed(base_seed, "correlation", static_cast<std::uint64_t>(s)));
        double acc = 0.0;
        for (int b = 0; b < n_base; ++b) {
            const double x0 = period * static_cast<double>(b) / n_base;
            acc += field(x0) * field(x0 + r);
        }
        per_seed[s] = acc / n_base;
    }
    double mean = 0.0;
    for (const double v : per_seed) {
        mean += v;
    }
    mean /= n_seeds;
    double var = 0.0;
    for (const double v : per_seed) {
        var += (v - mean) * (v - mean);
    }
    var /= (n_seeds - 1);
    return {mean, std::sqrt(var / n_seeds), n_seeds};
}

double truncation_error_bound(const SpectralDensity& spectrum, double delta_k, int n_modes)
{
    require(n_modes >= 0, "mode count must be nonnegative");
    return spectral_tail_sum(spectrum, delta_k, static_cast<long long>(n_modes) + 1);
}

nlohmann::json realization_to_json(const FieldRealization& field)
{
    return {
        {"delta_k", field.delta_k()},
        {"n_f", field.n_modes()},
        {"seed", field.seed()},
        {"spectrum_name", field.spectrum().name()},
        {"zeta", field.zeta()},
        {"eta", field.eta()},
    };
}

FieldRealization realization_from_json(const nlohmann::json& doc)
{
    try {
        const auto n_f = doc.at("n_f").get<int>();
        auto zeta = doc.at("zeta").get<std::vector<double>>();
        auto eta = doc.at("eta").get<std::vector<double>>();
        require(static_cast<int>(zeta.size()) == n_f + 1 && static_cast<int>(eta.size()) == n_f + 1,
                "coefficient arrays must hold n_f + 1 entries");
        return {SpectralDensity::preset(doc.at("spectrum_name").get<std::string>()),
                doc.at("delta_k").get<double>(), doc.at("seed").get<std::uint64_t>(),
                std::move(zeta), std::move(eta)};
    } catch (const nlohmann::json::exception& e) {
        throw ContractError(std::string("malformed realization document: ") + e.what());
    }
}

} // namespace kppfl
