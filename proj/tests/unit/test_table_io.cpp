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

#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "kppfl/rng.hpp"
#include "kppfl/table_io.hpp"

using namespace kppfl;

namespace {

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

} // namespace

TEST(FormatDouble, ShortestRoundTrip)
{
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(2.0), "2");
    EXPECT_EQ(format_double(-1.5e-300), "-1.5e-300");
    EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
    EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
    const rng::Stream s(1, rng::Purpose::diagnostics);
    for (std::uint32_t i = 0; i < 1000; ++i) {
        const double x = s.normals(i, 0, 0)[0] * std::pow(10.0, static_cast<int>(i % 40) - 20);
        EXPECT_EQ(std::stod(format_double(x)), x);
    }
}

TEST(TableIo, MuTraceIsOneBased)
{
    MuTrace t;
    t.n_mutations = 2;
    t.per_mutation_pfgr = {1.0, 2.0, 3.0, 4.5};
    t.per_generation_mu = {1.5, 3.75};
    std::ostringstream a;
    write_mu_trace_csv(a, t);
    EXPECT_EQ(lines(a.str()), (std::vector<std::string>{"generation,mutation,pfgr", "1,1,1", "1,2,2", "2,1,3", "2,2,4.5"}));
    std::ostringstream b;
    write_generation_mu_csv(b, t);
    EXPECT_EQ(b.str(), "generation,mu\n1,1.5\n2,3.75\n");
}

TEST(TableIo, EnsembleWithOptionalProjection)
{
    ParticleEnsemble e{2, {7.0, -1.0, 0.5, 0.25}, 0, 0, DomainSpec{DomainKind::unbounded, {1.0, 1.0}}};
    std::ostringstream a;
    write_ensemble_csv(a, e);
    EXPECT_EQ(a.str(), "x,y\n7,-1\n0.5,0.25\n");
    std::ostringstream b;
    const std::vector<double> period{4.0, 4.0};
    write_ensemble_csv(b, e, std::span<const double>(period));
    EXPECT_EQ(b.str(), "x,y\n3,3\n0.5,0.25\n");
}

TEST(TableIo, MomentsHeaderFollowsDimension)
{
    MomentSeries s;
    s.dim = 3;
    s.times = {0.5};
    s.center = {{1.0, 2.0, 3.0}};
    s.second_moment = {{0.1, 0.2, 0.3}};
    std::ostringstream out;
    write_moments_csv(out, s);
    EXPECT_EQ(out.str(), "t,E_1,E_2,E_3,D_1,D_2,D_3\n0.5,1,2,3,0.1,0.2,0.3\n");
}

TEST(TableIo, HistogramWithOverflowFooter)
{
    Histogram h;
    h.lo = 0.0;
    h.hi = 1.0;
    h.counts = {3, 1};
    h.out_of_range = 2;
    std::ostringstream out;
    write_histogram_csv(out, h);
    EXPECT_EQ(out.str(), "bin_lo,bin_hi,count\n0,0.5,3\n0.5,1,1\n# out_of_range 2\n");
}

TEST(TableIo, SamplesAndSummary)
{
    SweepRow row;
    row.delta = 4.0;
    row.c_star_mean = 2.5;
    row.c_star_stderr = 0.125;
    FrontSpeedResult r;
    r.samples.push_back({1.0, {1.0, 0.0, 0.0}, 2.5, 2.5});
    row.per_seed = {r, r};
    const std::vector<SweepRow> rows{row};
    std::ostringstream a;
    write_samples_csv(a, rows, 2);
    EXPECT_EQ(a.str(), "delta,seed,lambda,e_1,e_2,mu,ratio\n4,0,1,1,0,2.5,2.5\n4,1,1,1,0,2.5,2.5\n");

    std::ostringstream b;
    write_summary_csv(b, rows, SlopeFit{0.25, 1.0, std::numeric_limits<double>::quiet_NaN()});
    const auto l = lines(b.str());
    ASSERT_EQ(l.size(), 3u);
    EXPECT_EQ(l[1], "4,2.5,0.125");
    ASSERT_EQ(l[2].rfind("# fit ", 0), 0u);
    const auto fit = nlohmann::json::parse(l[2].substr(6));
    EXPECT_EQ(fit.at("slope").get<double>(), 0.25);
    EXPECT_TRUE(fit.at("stderr").is_null());

    std::ostringstream c;
    write_summary_csv(c, rows, std::nullopt);
    EXPECT_EQ(lines(c.str()).size(), 2u);
}

TEST(TableIo, LogIncrements)
{
    std::ostringstream out;
    const std::vector<double> inc{0.01, 0.02};
    write_log_increments_csv(out, inc, 0.5);
    EXPECT_EQ(out.str(), "step,t,log_increment\n1,0.5,0.01\n2,1,0.02\n");
}

TEST(TableIo, CoefficientsOfZeroSpectrumHaveZeroMagnitude)
{
    const auto f = sample_realization(SpectralDensity::preset("zero"), 0.5, 3, 9);
    std::ostringstream out;
    write_coefficients_csv(out, f);
    const auto l = lines(out.str());
    ASSERT_EQ(l.size(), 5u);
    EXPECT_EQ(l[0], "j,k,amplitude,zeta,eta,magnitude");
    for (std::size_t i = 1; i < l.size(); ++i) {
        EXPECT_EQ(l[i].substr(l[i].rfind(',') + 1), "0");
        EXPECT_EQ(l[i].substr(0, l[i].find(',')), std::to_string(i - 1));
    }
}

TEST(TableIo, IdenticalInputsIdenticalBytes)
{
    const auto f = sample_realization(SpectralDensity::preset("k05exp"), 0.1, 50, 3);
    std::ostringstream a;
    std::ostringstream b;
    write_coefficients_csv(a, f);
    write_coefficients_csv(b, sample_realization(SpectralDensity::preset("k05exp"), 0.1, 50, 3));
    EXPECT_EQ(a.str(), b.str());
}
