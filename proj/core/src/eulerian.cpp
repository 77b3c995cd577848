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

#include "kppfl/eulerian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>

#include <fftw3.h>

#include "kppfl/error.hpp"

namespace kppfl {

namespace {

constexpr double kPi = std::numbers::pi;

void check_shape(std::array<int, 2> n, std::array<double, 2> period)
{
    for (int a = 0; a < 2; ++a) {
        require(n[a] >= 1, "grid needs at least one node per axis");
        require(std::isfinite(period[a]) && period[a] > 0.0, "grid period must be positive");
    }
}

void check_operator(const FlowModel& flow, const DualVariable& dual, const KppParams& kpp)
{
    require(flow.dim() == 2, "Eulerian estimators are two-dimensional");
    require(dual.dim == 2, "dual direction must be two-dimensional");
    kpp.validate();
}

double wrap_index(double s, int n, int& i0) noexcept
{
    const double f = std::floor(s);
    long long i = static_cast<long long>(f) % n;
    if (i < 0) {
        i += n;
    }
    i0 = static_cast<int>(i);
    return s - f;
}

// Neumaier compensated sum; mass totals feed log increments that must stay
// exact to ~1e-15 on constant potentials.
double compensated_sum(std::span<const double> v) noexcept
{
    double sum = 0.0;
    double carry = 0.0;
    for (const double x : v) {
        const double t = sum + x;
        carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return sum + carry;
}

struct FftwDeleter {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

} // namespace

double crank_nicolson_factor(double kappa, double k_squared, double dt) noexcept
{
    const double a = 0.5 * kappa * k_squared * dt;
    return (1.0 - a) / (1.0 + a);
}

EulerianGrid EulerianGrid::uniform(std::array<int, 2> n, std::array<double, 2> period)
{
    check_shape(n, period);
    EulerianGrid g;
    g.n = n;
    g.period = period;
    g.q.assign(static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]),
               1.0 / (period[0] * period[1]));
    return g;
}

double EulerianGrid::mass() const noexcept
{
    return compensated_sum(q) * cell_area();
}

struct SlCnStepper::Impl {
    struct Stencil {
        std::array<std::uint32_t, 4> idx;
        std::array<double, 4> w;  // bilinear weights times exp(c dt)
    };

    std::array<int, 2> n{};
    std::array<double, 2> period{};
    double dt = 0.0;
    std::vector<Stencil> stencil;
    std::vector<double> factor;  // CN factor / (n_x n_y), per complex coefficient
    std::unique_ptr<double, FftwDeleter> real;
    std::unique_ptr<fftw_complex, FftwDeleter> spec;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    ~Impl()
    {
        if (forward != nullptr) {
            fftw_destroy_plan(forward);
        }
        if (backward != nullptr) {
            fftw_destroy_plan(backward);
        }
    }
};

SlCnStepper::SlCnStepper(std::array<int, 2> n, std::array<double, 2> period, const FlowModel& flow,
                         const DualVariable& dual, const KppParams& kpp, double dt)
    : impl_(std::make_unique<Impl>())
{
    check_shape(n, period);
    check_operator(flow, dual, kpp);
    require(std::isfinite(dt) && dt > 0.0, "time step must be positive");
    require(flow.compatible_with_torus(period), "grid period is not a union of flow periods");
    Impl& s = *impl_;
    s.n = n;
    s.period = period;
    s.dt = dt;
    const int nx = n[0];
    const int ny = n[1];
    const double hx = period[0] / nx;
    const double hy = period[1] / ny;
    const std::size_t total = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);

    s.stencil.resize(total);
    const double shift = 2.0 * kpp.kappa * dual.lambda;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const double x[2] = {ix * hx, iy * hy};
            const Vec3 v = flow(x);
            const double bx = v[0] - shift * dual.e[0];
            const double by = v[1] - shift * dual.e[1];
            require(std::abs(bx) * dt < 0.5 * period[0] && std::abs(by) * dt < 0.5 * period[1],
                    "time step too large: departure point leaves the half cell");
            const double growth = std::exp(potential_from_velocity(v, dual, kpp, 2) * dt);
            int i0 = 0;
            int j0 = 0;
            const double fx = wrap_index((x[0] - bx * dt) / hx, nx, i0);
            const double fy = wrap_index((x[1] - by * dt) / hy, ny, j0);
            const int i1 = (i0 + 1) % nx;
            const int j1 = (j0 + 1) % ny;
            auto at = [nx](int i, int j) { return static_cast<std::uint32_t>(j * nx + i); };
            auto& st = s.stencil[static_cast<std::size_t>(iy) * nx + ix];
            st.idx = {at(i0, j0), at(i1, j0), at(i0, j1), at(i1, j1)};
            st.w = {growth * (1.0 - fx) * (1.0 - fy), growth * fx * (1.0 - fy),
                    growth * (1.0 - fx) * fy, growth * fx * fy};
        }
    }

    const int nxc = nx / 2 + 1;
    const std::size_t ncomplex = static_cast<std::size_t>(ny) * static_cast<std::size_t>(nxc);
    s.factor.resize(ncomplex);
    const double norm = 1.0 / static_cast<double>(total);
    for (int jy = 0; jy < ny; ++jy) {
        const int my = jy <= ny / 2 ? jy : jy - ny;
        const double ky = 2.0 * kPi * my / period[1];
        for (int jx = 0; jx < nxc; ++jx) {
            const double kx = 2.0 * kPi * jx / period[0];
            s.factor[static_cast<std::size_t>(jy) * nxc + jx] =
                norm * crank_nicolson_factor(kpp.kappa, kx * kx + ky * ky, dt);
        }
    }

    s.real.reset(static_cast<double*>(fftw_malloc(sizeof(double) * total)));
    s.spec.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * ncomplex)));
    if (!s.real || !s.spec) {
        throw std::bad_alloc();
    }
    s.forward = fftw_plan_dft_r2c_2d(ny, nx, s.real.get(), s.spec.get(), FFTW_ESTIMATE);
    s.backward = fftw_plan_dft_c2r_2d(ny, nx, s.spec.get(), s.real.get(), FFTW_ESTIMATE);
    if (s.forward == nullptr || s.backward == nullptr) {
        throw Error("FFT planning failed");
    }
}

SlCnStepper::~SlCnStepper() = default;
SlCnStepper::SlCnStepper(SlCnStepper&&) noexcept = default;
SlCnStepper& SlCnStepper::operator=(SlCnStepper&&) noexcept = default;

double SlCnStepper::dt() const noexcept { return impl_->dt; }

std::vector<double> SlCnStepper::mode_factors() const
{
    const double total = static_cast<double>(impl_->n[0]) * static_cast<double>(impl_->n[1]);
    std::vector<double> out(impl_->factor);
    for (double& f : out) {
        f *= total;
    }
    return out;
}

double SlCnStepper::step(EulerianGrid& grid) const
{
    const Impl& s = *impl_;
    require(grid.n == s.n && grid.period == s.period, "grid does not match the stepper");
    const double mass_before = grid.mass();
    if (!(mass_before > 0.0) || !std::isfinite(mass_before)) {
        throw DegeneracyError("grid has no positive mass");
    }
    const std::size_t total = grid.size();
    double* real = s.real.get();
    const double* q = grid.q.data();

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(total); ++p) {
        const auto& st = s.stencil[static_cast<std::size_t>(p)];
        const double val = st.w[0] * q[st.idx[0]] + st.w[1] * q[st.idx[1]] + st.w[2] * q[st.idx[2]] +
                           st.w[3] * q[st.idx[3]];
        real[p] = std::max(val, 0.0);
    }

    fftw_execute(s.forward);
    fftw_complex* spec = s.spec.get();
    for (std::size_t k = 0; k < s.factor.size(); ++k) {
        spec[k][0] *= s.factor[k];
        spec[k][1] *= s.factor[k];
    }
    fftw_execute(s.backward);

    for (std::size_t p = 0; p < total; ++p) {
        grid.q[p] = std::max(real[p], 0.0);
    }
    const double mass = grid.mass();
    if (!(mass > 0.0) || !std::isfinite(mass)) {
        throw DegeneracyError("field vanished after clamping");
    }
    const double inv = 1.0 / mass;
    for (double& v : grid.q) {
        v *= inv;
    }
    const double increment = std::log(mass / mass_before);
    grid.log_mass += increment;
    return increment;
}

EulerianGrid sl_cn_step(const EulerianGrid& grid, const FlowModel& flow, const DualVariable& dual,
                        const KppParams& kpp, double dt)
{
    const SlCnStepper stepper(grid.n, grid.period, flow, dual, kpp, dt);
    EulerianGrid out = grid;
    stepper.step(out);
    return out;
}

SlRunResult run_mu_sl(const EulerianGrid& grid0, const FlowModel& flow, const DualVariable& dual,
                      const KppParams& kpp, double dt, int n_steps, double burn_in_fraction)
{
    require(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0, "burn-in fraction must lie in [0, 1)");
    const int first = static_cast<int>(std::floor(n_steps * burn_in_fraction));
    require(n_steps - first >= 10, "averaging window needs at least 10 steps");
    const SlCnStepper stepper(grid0.n, grid0.period, flow, dual, kpp, dt);
    SlRunResult r;
    r.final_grid = grid0;
    r.log_increments.reserve(static_cast<std::size_t>(n_steps));
    double window = 0.0;
    for (int s = 0; s < n_steps; ++s) {
        const double inc = stepper.step(r.final_grid);
        r.log_increments.push_back(inc);
        if (s >= first) {
            window += inc;
        }
    }
    r.mu = window / ((n_steps - first) * dt);
    return r;
}

} // namespace kppfl
