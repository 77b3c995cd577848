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

// CSV serialization of result tables. Doubles use the shortest decimal form
// that round-trips, so identical values always produce identical bytes.

#include <optional>
#include <ostream>
#include <span>
#include <string>

#include "kppfl/ensemble_stats.hpp"
#include "kppfl/eulerian.hpp"
#include "kppfl/front_speed.hpp"
#include "kppfl/ipm_engine.hpp"
#include "kppfl/random_field.hpp"

namespace kppfl {

std::string format_double(double value);

/// generation (1-based), mutation (1-based), pfgr.
void write_mu_trace_csv(std::ostream& out, const MuTrace& trace);

/// generation, mu.
void write_generation_mu_csv(std::ostream& out, const MuTrace& trace);

/// One row per particle; with `projection`, coordinates are mapped modulo it.
void write_ensemble_csv(std::ostream& out, const ParticleEnsemble& ensemble,
                        std::optional<std::span<const double>> projection = std::nullopt);

/// t, E_1..E_d, D_1..D_d.
void write_moments_csv(std::ostream& out, const MomentSeries& series);

/// bin_lo, bin_hi, count; the out-of-range count is a trailing comment line.
void write_histogram_csv(std::ostream& out, const Histogram& histogram);

/// delta, seed, lambda, e_1..e_d, mu, ratio.
void write_samples_csv(std::ostream& out, std::span<const SweepRow> rows, int dim);

/// delta, c_star_mean, c_star_stderr, then a '# fit ' JSON footer when given.
void write_summary_csv(std::ostream& out, std::span<const SweepRow> rows,
                       const std::optional<SlopeFit>& fit);

/// step, t, log_increment.
void write_log_increments_csv(std::ostream& out, std::span<const double> increments, double dt);

/// j, k_j, amplitude, zeta, eta, magnitude = amplitude * |(zeta, eta)|.
void write_coefficients_csv(std::ostream& out, const FieldRealization& field);

} // namespace kppfl
