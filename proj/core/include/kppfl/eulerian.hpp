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

// Eulerian estimators of the principal eigenvalue mu(lambda e) on a periodic
// cell. Both work with the operator
//   A = kappa Laplacian + b . grad + c
// of the particle engine and serve as its cross-check.

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "kppfl/flow_model.hpp"

namespace kppfl {

/// Node values q(i h_x, j h_y) on a periodic 2D cell, row-major in x.
///
/// Invariants: q >= 0; after every step the midpoint mass sum(q) h_x h_y is 1.
struct EulerianGrid {
    std::array<int, 2> n{};
    std::array<double, 2> period{};
    std::vector<double> q;
    double log_mass = 0.0;

    /// Uniform unit-mass field.
    static EulerianGrid uniform(std::array<int, 2> n, std::array<double, 2> period);

    double h(int axis) const noexcept { return period[axis] / n[axis]; }
    double cell_area() const noexcept { return h(0) * h(1); }
    std::size_t size() const noexcept { return q.size(); }
    double mass() const noexcept;
    std::size_t index(int ix, int iy) const noexcept
    {
        return static_cast<std::size_t>(iy) * static_cast<std::size_t>(n[0]) + static_cast<std::size_t>(ix);
    }
};

/// Crank-Nicolson amplification (1 - a) / (1 + a), a = kappa |k|^2 dt / 2,
/// of a Fourier mode with angular wavenumber squared `k_squared`.
double crank_nicolson_factor(double kappa, double k_squared, double dt) noexcept;

/// Semi-Lagrangian advection-reaction followed by Crank-Nicolson spectral
/// diffusion. Departure points, interpolation weights and growth factors are
/// precomputed, so repeated steps only interpolate and transform.
class SlCnStepper {
public:
    SlCnStepper(std::array<int, 2> n, std::array<double, 2> period, const FlowModel& flow,
                const DualVariable& dual, const KppParams& kpp, double dt);
    ~SlCnStepper();
    SlCnStepper(SlCnStepper&&) noexcept;
    SlCnStepper& operator=(SlCnStepper&&) noexcept;
    SlCnStepper(const SlCnStepper&) = delete;
    SlCnStepper& operator=(const SlCnStepper&) = delete;

    double dt() const noexcept;

    /// CN amplification of every r2c coefficient, row-major (n_y, n_x / 2 + 1).
    std::vector<double> mode_factors() const;

    /// Advances `grid` in place and returns log(mass after / mass before).
    double step(EulerianGrid& grid) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

EulerianGrid sl_cn_step(const EulerianGrid& grid, const FlowModel& flow, const DualVariable& dual,
                        const KppParams& kpp, double dt);

struct SlRunResult {
    double mu = 0.0;
    std::vector<double> log_increments;  // one per step
    EulerianGrid final_grid;
};

/// mu = (sum of log-mass increments after burn-in) / (window duration).
SlRunResult run_mu_sl(const EulerianGrid& grid0, const FlowModel& flow, const DualVariable& dual,
                      const KppParams& kpp, double dt, int n_steps, double burn_in_fraction = 0.5);

/// Dense row-major Fourier-collocation matrix of A on an n_x x n_y grid.
/// An axis with a single node carries no derivative, which reduces the
/// operator to functions constant along it.
struct CollocationMatrix {
    int size = 0;
    std::vector<double> entries;

    double operator()(int row, int col) const noexcept
    {
        return entries[static_cast<std::size_t>(row) * static_cast<std::size_t>(size) + static_cast<std::size_t>(col)];
    }
};

CollocationMatrix assemble_collocation(const FlowModel& flow, const DualVariable& dual,
                                       const KppParams& kpp, std::array<int, 2> n,
                                       std::array<double, 2> period);

struct SpectralOptions {
    int max_size = 4096;       // matrix dimension cap
    int dense_threshold = 400; // full eigendecomposition up to this size
    int max_iterations = 500;
    double tolerance = 1e-11;
};

struct SpectralResult {
    double mu = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool dense = false;
};

/// Eigenvalue of maximal real part of the collocation matrix. Large
/// matrices use shifted inverse iteration with a shift above the spectrum's
/// real parts, which makes the principal eigenvalue dominant.
SpectralResult spectral_eigen(const FlowModel& flow, const DualVariable& dual, const KppParams& kpp,
                              std::array<int, 2> n, std::array<double, 2> period,
                              const SpectralOptions& options = {});

} // namespace kppfl
