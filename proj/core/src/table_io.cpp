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

#include "kppfl/table_io.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include <nlohmann/json.hpp>

#include "kppfl/error.hpp"

namespace kppfl {

std::string format_double(double value)
{
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) {
        throw Error("cannot format floating-point value");
    }
    return {buf.data(), end};
}

void write_mu_trace_csv(std::ostream& out, const MuTrace& trace)
{
    out << "generation,mutation,pfgr\n";
    const auto H = static_cast<std::size_t>(trace.n_mutations);
    for (std::size_t k = 0; k < trace.per_mutation_pfgr.size(); ++k) {
        out << k / H + 1 << ',' << k % H + 1 << ',' << format_double(trace.per_mutation_pfgr[k]) << '\n';
    }
}

void write_generation_mu_csv(std::ostream& out, const MuTrace& trace)
{
    out << "generation,mu\n";
    for (std::size_t j = 0; j < trace.per_generation_mu.size(); ++j) {
        out << j + 1 << ',' << format_double(trace.per_generation_mu[j]) << '\n';
    }
}

void write_ensemble_csv(std::ostream& out, const ParticleEnsemble& ensemble,
                        std::optional<std::span<const double>> projection)
{
    const ParticleEnsemble& src = ensemble;
    std::optional<ParticleEnsemble> projected;
    if (projection) {
        projected = torus_projection(ensemble, *projection);
    }
    const ParticleEnsemble& e = projected ? *projected : src;
    static constexpr std::array<const char*, 3> names{"x", "y", "z"};
    for (int k = 0; k < e.dim; ++k) {
        out << (k ? "," : "") << names[static_cast<std::size_t>(k)];
    }
    out << '\n';
    for (std::size_t l = 0; l < e.size(); ++l) {
        const auto x = e.particle(l);
        for (std::size_t k = 0; k < x.size(); ++k) {
            out << (k ? "," : "") << format_double(x[k]);
        }
        out << '\n';
    }
}

void write_moments_csv(std::ostream& out, const MomentSeries& series)
{
    out << 't';
    for (int k = 1; k <= series.dim; ++k) {
        out << ",E_" << k;
    }
    for (int k = 1; k <= series.dim; ++k) {
        out << ",D_" << k;
    }
    out << '\n';
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << format_double(series.times[i]);
        for (double c : series.center[i]) {
            out << ',' << format_double(c);
        }
        for (double d : series.second_moment[i]) {
            out << ',' << format_double(d);
        }
        out << '\n';
    }
}

void write_histogram_csv(std::ostream& out, const Histogram& histogram)
{
    out << "bin_lo,bin_hi,count\n";
    for (std::size_t i = 0; i < histogram.counts.size(); ++i) {
        out << format_double(histogram.bin_lo(i)) << ',' << format_double(histogram.bin_hi(i)) << ','
            << histogram.counts[i] << '\n';
    }
    out << "# out_of_range " << histogram.out_of_range << '\n';
}

void write_samples_csv(std::ostream& out, std::span<const SweepRow> rows, int dim)
{
    out << "delta,seed,lambda";
    for (int k = 1; k <= dim; ++k) {
        out << ",e_" << k;
    }
    out << ",mu,ratio\n";
    for (const SweepRow& row : rows) {
        for (std::size_t s = 0; s < row.per_seed.size(); ++s) {
            for (const FrontSpeedSample& smp : row.per_seed[s].samples) {
                out << format_double(row.delta) << ',' << s << ',' << format_double(smp.lambda);
                for (int k = 0; k < dim; ++k) {
                    out << ',' << format_double(smp.e[static_cast<std::size_t>(k)]);
                }
                out << ',' << format_double(smp.mu) << ',' << format_double(smp.ratio) << '\n';
            }
        }
    }
}

void write_summary_csv(std::ostream& out, std::span<const SweepRow> rows,
                       const std::optional<SlopeFit>& fit)
{
    out << "delta,c_star_mean,c_star_stderr\n";
    for (const SweepRow& row : rows) {
        out << format_double(row.delta) << ',' << format_double(row.c_star_mean) << ','
            << format_double(row.c_star_stderr) << '\n';
    }
    if (fit) {
        // JSON has no NaN; an undefined standard error becomes null.
        const auto number = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
        const nlohmann::json doc{{"slope", number(fit->slope)},
                                 {"intercept", number(fit->intercept)},
                                 {"stderr", number(fit->stderr_slope)}};
        out << "# fit " << doc.dump() << '\n';
    }
}

void write_log_increments_csv(std::ostream& out, std::span<const double> increments, double dt)
{
    out << "step,t,log_increment\n";
    for (std::size_t s = 0; s < increments.size(); ++s) {
        out << s + 1 << ',' << format_double(static_cast<double>(s + 1) * dt) << ','
            << format_double(increments[s]) << '\n';
    }
}

void write_coefficients_csv(std::ostream& out, const FieldRealization& field)
{
    out << "j,k,amplitude,zeta,eta,magnitude\n";
    for (int j = 0; j <= field.n_modes(); ++j) {
        const auto uj = static_cast<std::size_t>(j);
        const double a = field.amplitude(j);
        const double z = field.zeta()[uj];
        const double e = field.eta()[uj];
        out << j << ',' << format_double(j * field.delta_k()) << ',' << format_double(a) << ','
            << format_double(z) << ',' << format_double(e) << ',' << format_double(a * std::hypot(z, e))
            << '\n';
    }
}

} // namespace kppfl
