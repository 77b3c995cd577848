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

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "kppfl/error.hpp"
#include "kppfl/flow_model.hpp"
#include "kppfl/front_speed.hpp"
#include "kppfl/random_field.hpp"

using namespace kppfl;

namespace {

const std::vector<double> kX{1.0, 0.0};

// mu for zero flow: kappa lambda^2 + f'(0), independent of e.
MuEstimator zero_flow_mu(double kappa = 1.0, double f0 = 1.0)
{
    return [=](const DualVariable& d) { return kappa * d.lambda * d.lambda + f0; };
}

// Smooth anisotropic model with its minimum away from e = z.
MuEstimator anisotropic_mu()
{
    return [](const DualVariable& d) {
        const double tilt = std::atan2(d.e[1], d.e[0]);
        return d.lambda * d.lambda * (1.0 + 0.5 * std::sin(tilt - 0.2) * std::sin(tilt - 0.2)) + 1.0 -
               0.3 * d.lambda * d.e[1];
    };
}

double min_ratio(const FrontSpeedResult& r)
{
    double m = r.samples.front().ratio;
    for (const auto& s : r.samples) {
        m = std::min(m, s.ratio);
    }
    return m;
}

EstimatorConfig small_ipm()
{
    EstimatorConfig cfg;
    cfg.ipm.n_particles = 200;
    cfg.ipm.n_generations = 2;
    cfg.ipm.n_mutations = 4;
    return cfg;
}

} // namespace

TEST(FrontSpeed, ZeroFlowAnalyticMinimum)
{
    FrontSpeedQuery q;
    q.z = kX;
    q.lambda_grid = {0.25, 0.5, 1.0, 2.0, 4.0};
    const auto r = compute_front_speed(q, zero_flow_mu());
    EXPECT_NEAR(r.c_star, 2.0, 1e-15);
    EXPECT_EQ(r.lambda_opt, 1.0);
    EXPECT_NEAR(r.mu_at_opt, 2.0, 1e-15);
}

TEST(FrontSpeed, ClassicalSpeedScalesWithParameters)
{
    // min over lambda of (kappa lambda^2 + f) / lambda = 2 sqrt(kappa f) at lambda = sqrt(f / kappa).
    FrontSpeedQuery q;
    q.z = kX;
    q.lambda_grid = {0.5, std::sqrt(3.0 / 0.75), 4.0};
    const auto r = compute_front_speed(q, zero_flow_mu(0.75, 3.0));
    EXPECT_NEAR(r.c_star, 2.0 * std::sqrt(0.75 * 3.0), 1e-14);
}

TEST(FrontSpeed, ZeroFlowThroughIpm)
{
    const FlowModel flow(2, BaseFlow::zero, 1.0);
    FrontSpeedQuery q;
    q.z = kX;
    q.lambda_grid = {0.5, 1.0, 2.0};
    const auto r = compute_front_speed(q, flow, KppParams{}, small_ipm());
    EXPECT_NEAR(r.c_star, 2.0, 1e-9);
}

TEST(FrontSpeed, ShearAlongStreamlinesKeepsClassicalSpeed)
{
    const auto field = std::make_shared<const FieldRealization>(sample_realization(
        SpectralDensity::preset("k05exp"), 1.0 / (20.0 * std::numbers::pi), 100, 8));
    FrontSpeedQuery q;
    q.z = kX;
    q.lambda_grid = {0.5, 1.0, 2.0};
    for (double delta : {1.0, 4.0, 16.0}) {
        const FlowModel flow(2, BaseFlow::shear2d_zero_base, delta, 1.0, field);
        EXPECT_NEAR(compute_front_speed(q, flow, KppParams{}, small_ipm()).c_star, 2.0, 1e-9) << delta;
    }
}

TEST(FrontSpeed, CStarIsMinimumOfSampleTable)
{
    FrontSpeedQuery q;
    q.z = {0.6, 0.8};
    q.e_search = ESearch::cone(30.0, 7);
    const auto r = compute_front_speed(q, anisotropic_mu());
    EXPECT_EQ(r.c_star, min_ratio(r));
    for (const auto& s : r.samples) {
        const double zl = s.lambda * (0.6 * s.e[0] + 0.8 * s.e[1]);
        EXPECT_GT(zl, 0.0);
        EXPECT_NEAR(s.ratio, s.mu / zl, 1e-14 * std::abs(s.ratio));
    }
}

TEST(FrontSpeed, GlobalSearchSamplesAreAdmissible)
{
    FrontSpeedQuery q;
    q.z = {0.0, 1.0};
    q.e_search = ESearch::global(24);
    const auto r = compute_front_speed(q, anisotropic_mu());
    for (const auto& s : r.samples) {
        EXPECT_GT(s.e[1], 1e-12);
        EXPECT_GT(s.lambda, 0.0);
    }
}

TEST(FrontSpeed, LargerSearchSetNeverIncreasesSpeed)
{
    FrontSpeedQuery q;
    q.z = {std::cos(0.1), std::sin(0.1)};
    q.refine = false;
    auto speed = [&](ESearch e) {
        q.e_search = e;
        return compute_front_speed(q, anisotropic_mu()).c_star;
    };
    const double fixed = speed(ESearch::fixed());
    const double cone3 = speed(ESearch::cone(20.0, 3));
    const double cone5 = speed(ESearch::cone(20.0, 5));
    const double cone9 = speed(ESearch::cone(20.0, 9));
    EXPECT_LE(cone3, fixed);
    EXPECT_LE(cone5, cone3);
    EXPECT_LE(cone9, cone5);
    const double g8 = speed(ESearch::global(8));
    const double g16 = speed(ESearch::global(16));
    const double g32 = speed(ESearch::global(32));
    EXPECT_LE(g16, g8);
    EXPECT_LE(g32, g16);
    // The model's optimum is off z, so searching e must help strictly.
    EXPECT_LT(cone9, fixed);
}

TEST(FrontSpeed, LargerLambdaGridNeverIncreasesSpeed)
{
    FrontSpeedQuery q;
    q.z = kX;
    q.refine = false;
    q.lambda_grid = {0.3, 0.9, 2.7};
    const double coarse = compute_front_speed(q, anisotropic_mu()).c_star;
    q.lambda_grid = {0.3, 0.6, 0.9, 1.3, 2.7};
    EXPECT_LE(compute_front_speed(q, anisotropic_mu()).c_star, coarse);
}

TEST(FrontSpeed, TiesGoToSmallestLambda)
{
    // ratio = (lambda^2 + 1) / lambda is equal at lambda and 1 / lambda.
    FrontSpeedQuery q;
    q.z = kX;
    q.refine = false;
    q.lambda_grid = {2.0, 0.5};
    const auto r = compute_front_speed(q, [](const DualVariable& d) { return d.lambda == 2.0 ? 5.0 : 1.25; });
    EXPECT_EQ(r.lambda_opt, 0.5);
    EXPECT_EQ(r.c_star, 2.5);
}

TEST(FrontSpeed, GridIsSortedAndDeduplicated)
{
    FrontSpeedQuery q;
    q.z = kX;
    q.refine = false;
    q.lambda_grid = {2.0, 1.0, 2.0, 0.5};
    const auto r = compute_front_speed(q, zero_flow_mu());
    ASSERT_EQ(r.samples.size(), 3u);
    EXPECT_EQ(r.samples[0].lambda, 0.5);
    EXPECT_EQ(r.samples[2].lambda, 2.0);
}

TEST(FrontSpeed, RefinementAddsPointsAroundCoarseMinimum)
{
    FrontSpeedQuery q;
    q.z = kX;
    q.lambda_grid = {0.5, 1.2, 3.0};
    const auto r = compute_front_speed(q, zero_flow_mu());
    ASSERT_EQ(r.samples.size(), 7u);
    for (std::size_t k = 3; k < r.samples.size(); ++k) {
        EXPECT_GT(r.samples[k].lambda, 0.5);
        EXPECT_LT(r.samples[k].lambda, 3.0);
    }
    // 1.2 * (0.5 / 1.2)^(1/3) = 0.8963 is closer to the true optimum at 1.
    EXPECT_LT(r.c_star, 1.2 + 1.0 / 1.2);
    EXPECT_NEAR(r.lambda_opt, 1.2 * std::cbrt(0.5 / 1.2), 1e-14);
}

TEST(FrontSpeed, RefinementAtGridEdgeStaysInside)
{
    FrontSpeedQuery q;
    q.z = kX;
    q.lambda_grid = {1.0, 2.0, 4.0};
    const auto r = compute_front_speed(q, zero_flow_mu());
    EXPECT_EQ(r.samples.size(), 5u);
    EXPECT_EQ(r.c_star, 2.0);
}

TEST(FrontSpeed, EstimatorErrorsCarrySampleCoordinates)
{
    FrontSpeedQuery q;
    q.z = kX;
    q.lambda_grid = {0.5, 1.5};
    const MuEstimator failing = [](const DualVariable& d) -> double {
        if (d.lambda > 1.0) {
            throw DegeneracyError("weights collapsed");
        }
        return 1.0;
    };
    try {
        compute_front_speed(q, failing);
        FAIL() << "expected DegeneracyError";
    } catch (const DegeneracyError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("lambda=1.5"), std::string::npos) << msg;
        EXPECT_NE(msg.find("e=(1,0)"), std::string::npos) << msg;
        EXPECT_NE(msg.find("weights collapsed"), std::string::npos) << msg;
    }
    const MuEstimator blowing = [](const DualVariable&) -> double { throw BlowUpError("nan"); };
    EXPECT_THROW(compute_front_speed(q, blowing), BlowUpError);
}

TEST(FrontSpeed, InvalidQueriesRejected)
{
    FrontSpeedQuery q;
    q.z = kX;
    q.lambda_grid = {};
    EXPECT_THROW(compute_front_speed(q, zero_flow_mu()), ContractError);
    q.lambda_grid = {1.0, -1.0};
    EXPECT_THROW(compute_front_speed(q, zero_flow_mu()), ContractError);
    q.lambda_grid = {1.0};
    q.z = {0.0, 0.0};
    EXPECT_THROW(compute_front_speed(q, zero_flow_mu()), ContractError);
    q.z = {1.0, 0.0, 0.0};
    EXPECT_THROW(compute_front_speed(q, FlowModel(2, BaseFlow::zero, 1.0), KppParams{}, small_ipm()),
                 ContractError);
}

TEST(SearchDirections, FixedIsNormalizedZ)
{
    const auto d = search_directions(std::vector<double>{3.0, 4.0}, ESearch::fixed());
    ASSERT_EQ(d.size(), 1u);
    EXPECT_NEAR(d[0][0], 0.6, 1e-15);
    EXPECT_NEAR(d[0][1], 0.8, 1e-15);
}

TEST(SearchDirections, ConeIn2dSpansHalfAngle)
{
    const auto d = search_directions(kX, ESearch::cone(15.0, 5));
    ASSERT_EQ(d.size(), 5u);
    const double h = 15.0 * std::numbers::pi / 180.0;
    double lo = 0.0;
    double hi = 0.0;
    for (const auto& e : d) {
        const double a = std::atan2(e[1], e[0]);
        lo = std::min(lo, a);
        hi = std::max(hi, a);
        EXPECT_NEAR(std::hypot(e[0], e[1]), 1.0, 1e-15);
    }
    EXPECT_NEAR(lo, -h, 1e-14);
    EXPECT_NEAR(hi, h, 1e-14);
}

TEST(SearchDirections, ConeIn3dIsOnRimPlusAxis)
{
    const std::vector<double> z{0.0, 0.0, 1.0};
    const auto d = search_directions(z, ESearch::cone(20.0, 6));
    ASSERT_EQ(d.size(), 7u);
    EXPECT_EQ(d[0][2], 1.0);
    for (std::size_t k = 1; k < d.size(); ++k) {
        EXPECT_NEAR(d[k][2], std::cos(20.0 * std::numbers::pi / 180.0), 1e-14);
        EXPECT_NEAR(d[k][0] * d[k][0] + d[k][1] * d[k][1] + d[k][2] * d[k][2], 1.0, 1e-14);
    }
}

TEST(SearchDirections, GlobalKeepsOpenHalfSpace)
{
    const std::vector<double> z{1.0, 1.0, 1.0};
    const auto d = search_directions(z, ESearch::global(200));
    EXPECT_GT(d.size(), 80u);
    EXPECT_LT(d.size(), 120u);
    for (const auto& e : d) {
        EXPECT_GT(e[0] + e[1] + e[2], 0.0);
    }
    // Four directions in 2D: only (1,0) is strictly inside the half plane of z = (1,0).
    EXPECT_EQ(search_directions(kX, ESearch::global(4)).size(), 1u);
}

TEST(SearchDirections, BadConeRejected)
{
    EXPECT_THROW(search_directions(kX, ESearch::cone(90.0, 3)), ContractError);
    EXPECT_THROW(search_directions(kX, ESearch::cone(10.0, 0)), ContractError);
    EXPECT_THROW(search_directions(kX, ESearch::global(0)), ContractError);
}

TEST(LambdaGrid, DefaultIsLogSpaced)
{
    const auto g = default_lambda_grid();
    ASSERT_EQ(g.size(), 16u);
    EXPECT_DOUBLE_EQ(g.front(), 0.125);
    EXPECT_DOUBLE_EQ(g.back(), 8.0);
    for (std::size_t i = 2; i < g.size(); ++i) {
        EXPECT_NEAR(g[i] / g[i - 1], g[1] / g[0], 1e-12);
    }
}

TEST(Estimator, NamesRoundTrip)
{
    for (auto k : {EstimatorKind::ipm, EstimatorKind::sl_cn, EstimatorKind::spectral}) {
        EXPECT_EQ(estimator_from_string(to_string(k)), k);
    }
    EXPECT_THROW(estimator_from_string("fdm"), ContractError);
}

TEST(Estimator, EulerianEstimatorsAreTwoDimensional)
{
    const FlowModel flow(3, BaseFlow::abc3d, 1.0);
    EXPECT_THROW(make_estimator(EstimatorKind::sl_cn, flow, KppParams{}, EstimatorConfig{}), ContractError);
    EXPECT_THROW(make_estimator(EstimatorKind::spectral, flow, KppParams{}, EstimatorConfig{}), ContractError);
}

TEST(Estimator, SpectralAndSlAgreeOnZeroFlow)
{
    const FlowModel flow(2, BaseFlow::zero, 1.0);
    EstimatorConfig cfg;
    cfg.sl_nodes = 32;
    cfg.sl_steps = 100;
    cfg.spectral_nodes = 8;
    const DualVariable d(1.5, kX);
    EXPECT_NEAR(make_estimator(EstimatorKind::spectral, flow, KppParams{}, cfg)(d), 1.5 * 1.5 + 1.0, 1e-10);
    EXPECT_NEAR(make_estimator(EstimatorKind::sl_cn, flow, KppParams{}, cfg)(d), 1.5 * 1.5 + 1.0, 1e-10);
}

TEST(FrontSpeed, CellularIpmWithinFivePercentOfSl)
{
    const FlowModel flow(2, BaseFlow::cellular2d, 4.0);
    FrontSpeedQuery q;
    q.z = kX;
    q.lambda_grid = {0.6, 0.83, 1.1};
    q.refine = false;
    EstimatorConfig cfg;
    cfg.ipm.n_particles = 10000;
    cfg.ipm.n_generations = 48;
    cfg.ipm.n_mutations = 32;
    cfg.ipm.dt = 1.0 / 256.0;
    cfg.ipm.seed = 2024;
    cfg.ipm_tail_generations = 16;
    cfg.sl_nodes = 128;
    cfg.sl_dt = 0.01;
    cfg.sl_steps = 1000;
    q.estimator = EstimatorKind::ipm;
    const double ipm = compute_front_speed(q, flow, KppParams{}, cfg).c_star;
    q.estimator = EstimatorKind::sl_cn;
    const double sl = compute_front_speed(q, flow, KppParams{}, cfg).c_star;
    EXPECT_LT(std::abs(ipm - sl) / sl, 0.05) << "ipm " << ipm << " sl " << sl;
}

TEST(Sweep, ZeroAmplitudeGivesClassicalSpeed)
{
    FrontSpeedQuery q;
    q.z = kX;
    q.lambda_grid = {0.5, 1.0, 2.0};
    const std::vector<FlowModel> flows{FlowModel(2, BaseFlow::cellular2d, 1.0),
                                       FlowModel(2, BaseFlow::cellular2d, 1.0)};
    const std::vector<double> deltas{0.0};
    const auto rows = sweep_amplitude(deltas, q, flows, KppParams{}, small_ipm());
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_NEAR(rows[0].c_star_mean, 2.0, 1e-9);
    EXPECT_NEAR(rows[0].c_star_stderr, 0.0, 1e-9);
    EXPECT_EQ(rows[0].per_seed.size(), 2u);
}

TEST(Sweep, RejectsNegativeAmplitude)
{
    FrontSpeedQuery q;
    q.z = kX;
    const std::vector<FlowModel> flows{FlowModel(2, BaseFlow::zero, 1.0)};
    const std::vector<double> deltas{-1.0};
    EXPECT_THROW(sweep_amplitude(deltas, q, flows, KppParams{}, small_ipm()), ContractError);
}

TEST(SlopeFit, ExactPowerLaw)
{
    const std::vector<double> d{1.0, 2.0, 4.0, 8.0, 16.0};
    std::vector<double> c;
    for (double x : d) {
        c.push_back(3.0 * std::pow(x, 0.25));
    }
    const auto f = fit_loglog_slope(d, c);
    EXPECT_NEAR(f.slope, 0.25, 1e-14);
    EXPECT_NEAR(f.intercept, std::log(3.0), 1e-14);
    EXPECT_LT(f.stderr_slope, 1e-14);
}

TEST(SlopeFit, TwoPoints)
{
    const auto f = fit_loglog_slope(std::vector<double>{1.0, 4.0}, std::vector<double>{2.0, 4.0});
    EXPECT_NEAR(f.slope, std::log(2.0) / std::log(4.0), 1e-15);
    EXPECT_TRUE(std::isnan(f.stderr_slope));
}

TEST(SlopeFit, NoisyDataStandardError)
{
    // Residuals +-0.1 alternate around slope 1 in log space.
    const std::vector<double> d{1.0, 2.0, 4.0, 8.0};
    std::vector<double> c;
    for (std::size_t i = 0; i < d.size(); ++i) {
        c.push_back(d[i] * std::exp(i % 2 == 0 ? 0.1 : -0.1));
    }
    const auto f = fit_loglog_slope(d, c);
    // Independent closed form with x = k log 2, k = 0..3.
    const double l2 = std::log(2.0);
    const double sxx = 5.0 * l2 * l2;
    double sxy = 0.0;
    std::vector<double> y;
    for (std::size_t i = 0; i < d.size(); ++i) {
        y.push_back(std::log(c[i]));
    }
    const double my = (y[0] + y[1] + y[2] + y[3]) / 4.0;
    for (int k = 0; k < 4; ++k) {
        sxy += (k - 1.5) * l2 * (y[k] - my);
    }
    const double slope = sxy / sxx;
    double rss = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double r = y[k] - my - slope * (k - 1.5) * l2;
        rss += r * r;
    }
    EXPECT_NEAR(f.slope, slope, 1e-14);
    EXPECT_NEAR(f.stderr_slope, std::sqrt(rss / 2.0 / sxx), 1e-14);
}

TEST(SlopeFit, InvalidInputRejected)
{
    EXPECT_THROW(fit_loglog_slope(std::vector<double>{1.0}, std::vector<double>{1.0}), ContractError);
    EXPECT_THROW(fit_loglog_slope(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0}), ContractError);
    EXPECT_THROW(fit_loglog_slope(std::vector<double>{0.0, 2.0}, std::vector<double>{1.0, 2.0}), ContractError);
}
