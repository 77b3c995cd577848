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

#include "kppfl/ensemble_stats.hpp"

#include <cmath>

#include "kppfl/error.hpp"
#include "line_fit.hpp"

namespace kppfl {

Moments moments(const ParticleEnsemble& ensemble)
{
    const std::size_t n = ensemble.size();
    const int d = ensemble.dim;
    require(n >= 2, "moments need at least two particles");
    Moments m;
    m.dim = d;
    m.mean.assign(static_cast<std::size_t>(d), 0.0);
    m.covariance.assign(static_cast<std::size_t>(d) * d, 0.0);
    for (std::size_t l = 0; l < n; ++l) {
        const auto x = ensemble.particle(l);
        for (int i = 0; i < d; ++i) {
            m.mean[i] += x[i];
        }
    }
    for (double& v : m.mean) {
        v /= static_cast<double>(n);
    }
    for (std::size_t l = 0; l < n; ++l) {
        const auto x = ensemble.particle(l);
        for (int i = 0; i < d; ++i) {
            const double di = x[i] - m.mean[i];
            for (int j = i; j < d; ++j) {
                m.covariance[static_cast<std::size_t>(i) * d + j] += di * (x[j] - m.mean[j]);
            }
        }
    }
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            double& c = m.covariance[static_cast<std::size_t>(i) * d + j];
            c /= static_cast<double>(n - 1);
            m.covariance[static_cast<std::size_t>(j) * d + i] = c;
        }
    }
    return m;
}

void MomentSeries::append(double t, const ParticleEnsemble& ensemble)
{
    if (times.empty()) {
        dim = ensemble.dim;
    }
    require(ensemble.dim == dim, "ensemble dimension changed within a moment series");
    const Moments m = moments(ensemble);
    std::vector<double> var(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        var[i] = m.cov(i, i);
    }
    times.push_back(t);
    center.push_back(m.mean);
    second_moment.push_back(std::move(var));
}

ExponentFit diffusion_exponent(const MomentSeries& series, int axis, double tail_fraction)
{
    require(series.size() >= 4, "exponent fit needs at least four time points");
    require(axis >= 0 && axis < series.dim, "axis out of range");
    require(tail_fraction > 0.0 && tail_fraction <= 1.0, "tail fraction must lie in (0, 1]");
    const std::size_t n = series.size();
    const auto window = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n))));
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t k = n - std::min(window, n); k < n; ++k) {
        const double t = series.times[k];
        const double D = series.second_moment[k][static_cast<std::size_t>(axis)];
        require(t > 0.0 && D > 0.0 && std::isfinite(D), "exponent fit needs positive times and variances");
        x.push_back(std::log(t));
        y.push_back(std::log(D));
    }
    const detail::LineFit fit = detail::fit_line(x, y);
    return {fit.slope, fit.stderr_slope, static_cast<int>(x.size())};
}

double Histogram::bin_lo(std::size_t i) const noexcept
{
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(counts.size());
}

double Histogram::bin_hi(std::size_t i) const noexcept
{
    return lo + (hi - lo) * static_cast<double>(i + 1) / static_cast<double>(counts.size());
}

Histogram histogram(const ParticleEnsemble& ensemble, int axis, int n_bins, double lo, double hi)
{
    require(n_bins >= 1, "histogram needs at least one bin");
    require(std::isfinite(lo) && std::isfinite(hi) && hi > lo, "histogram range must be nonempty");
    require(axis >= 0 && axis < ensemble.dim, "axis out of range");
    Histogram h;
    h.lo = lo;
    h.hi = hi;
    h.counts.assign(static_cast<std::size_t>(n_bins), 0);
    const double scale = n_bins / (hi - lo);
    for (std::size_t l = 0; l < ensemble.size(); ++l) {
        const double x = ensemble.particle(l)[static_cast<std::size_t>(axis)];
        if (!(x >= lo && x <= hi)) {
            ++h.out_of_range;
            continue;
        }
        const auto bin = std::min(static_cast<std::size_t>((x - lo) * scale), h.counts.size() - 1);
        ++h.counts[bin];
    }
    return h;
}

ParticleEnsemble torus_projection(const ParticleEnsemble& ensemble, std::span<const double> period)
{
    require(static_cast<int>(period.size()) == ensemble.dim, "one period per dimension required");
    for (double p : period) {
        require(std::isfinite(p) && p > 0.0, "projection period must be positive");
    }
    ParticleEnsemble out = ensemble;
    const auto d = static_cast<std::size_t>(ensemble.dim);
    for (std::size_t i = 0; i < out.positions.size(); ++i) {
        const double L = period[i % d];
        double r = out.positions[i] - L * std::floor(out.positions[i] / L);
        if (r >= L || r < 0.0) {
            r = 0.0;
        }
        out.positions[i] = r;
    }
    out.domain = DomainSpec{DomainKind::torus, std::vector<double>(period.begin(), period.end())};
    return out;
}

} // namespace kppfl
