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

#include <cstddef>
#include <span>
#include <vector>

#include "kppfl/ipm_engine.hpp"

namespace kppfl {

struct Moments {
    int dim = 0;
    std::vector<double> mean;
    std::vector<double> covariance;  // dim x dim, row-major, unbiased

    double cov(int i, int j) const noexcept
    {
        return covariance[static_cast<std::size_t>(i) * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)];
    }
};

/// Sample mean and unbiased covariance (two-pass).
Moments moments(const ParticleEnsemble& ensemble);

/// Center E and per-axis variance D of an ensemble over time.
struct MomentSeries {
    int dim = 0;
    std::vector<double> times;
    std::vector<std::vector<double>> center;         // [time][axis]
    std::vector<std::vector<double>> second_moment;  // [time][axis]

    void append(double t, const ParticleEnsemble& ensemble);
    std::size_t size() const noexcept { return times.size(); }
};

struct ExponentFit {
    double exponent = 0.0;
    double stderr_exponent = 0.0;
    int n_points = 0;
};

/// Slope of log D against log t over the last `tail_fraction` of the series.
ExponentFit diffusion_exponent(const MomentSeries& series, int axis, double tail_fraction = 0.5);

struct Histogram {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::size_t> counts;
    std::size_t out_of_range = 0;

    double bin_lo(std::size_t i) const noexcept;
    double bin_hi(std::size_t i) const noexcept;
};

/// Uniform bins over [lo, hi]; the top edge belongs to the last bin.
Histogram histogram(const ParticleEnsemble& ensemble, int axis, int n_bins, double lo, double hi);

/// Coordinate-wise modulo into [0, L); the source is not modified.
ParticleEnsemble torus_projection(const ParticleEnsemble& ensemble, std::span<const double> period);

} // namespace kppfl
