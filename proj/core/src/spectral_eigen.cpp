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
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

// Single-threaded products keep results independent of the OpenMP worker count.
#define EIGEN_DONT_PARALLELIZE
#include <Eigen/Dense>

#include "kppfl/error.hpp"
#include "kppfl/eulerian.hpp"

namespace kppfl {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// First and second periodic differentiation matrices on n equispaced nodes
// of a cell of length L. A single node gives zero derivatives.
void diff_matrices(int n, double L, Eigen::MatrixXd& d1, Eigen::MatrixXd& d2)
{
    d1 = Eigen::MatrixXd::Zero(n, n);
    d2 = Eigen::MatrixXd::Zero(n, n);
    if (n == 1) {
        return;
    }
    const double h = 2.0 * std::numbers::pi / n;
    const double s = 2.0 * std::numbers::pi / L;
    const bool even = n % 2 == 0;
    const double diag2 = even ? -std::numbers::pi * std::numbers::pi / (3.0 * h * h) - 1.0 / 6.0
                              : -std::numbers::pi * std::numbers::pi / (3.0 * h * h) + 1.0 / 12.0;
    for (int j = 0; j < n; ++j) {
        d2(j, j) = diag2 * s * s;
        for (int k = 0; k < n; ++k) {
            if (j == k) {
                continue;
            }
            const int m = j - k;
            const double sign = (m % 2 == 0) ? 1.0 : -1.0;
            const double half = 0.5 * m * h;
            const double sn = std::sin(half);
            if (even) {
                d1(j, k) = 0.5 * sign * std::cos(half) / sn * s;
                d2(j, k) = -0.5 * sign / (sn * sn) * s * s;
            } else {
                d1(j, k) = 0.5 * sign / sn * s;
                d2(j, k) = -0.5 * sign * std::cos(half) / (sn * sn) * s * s;
            }
        }
    }
}

} // namespace

CollocationMatrix assemble_collocation(const FlowModel& flow, const DualVariable& dual,
                                       const KppParams& kpp, std::array<int, 2> n,
                                       std::array<double, 2> period)
{
    require(flow.dim() == 2 && dual.dim == 2, "collocation operator is two-dimensional");
    kpp.validate();
    for (int a = 0; a < 2; ++a) {
        require(n[a] >= 1, "grid needs at least one node per axis");
        require(std::isfinite(period[a]) && period[a] > 0.0, "grid period must be positive");
    }
    const int nx = n[0];
    const int ny = n[1];
    const int size = nx * ny;
    Eigen::MatrixXd d1x, d2x, d1y, d2y;
    diff_matrices(nx, period[0], d1x, d2x);
    diff_matrices(ny, period[1], d1y, d2y);

    CollocationMatrix out;
    out.size = size;
    out.entries.assign(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0.0);
    Eigen::Map<RowMatrix> A(out.entries.data(), size, size);
    const double shift = 2.0 * kpp.kappa * dual.lambda;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const int p = iy * nx + ix;
            const double x[2] = {ix * period[0] / nx, iy * period[1] / ny};
            const Vec3 v = flow(x);
            const double bx = v[0] - shift * dual.e[0];
            const double by = v[1] - shift * dual.e[1];
            for (int jx = 0; jx < nx; ++jx) {
                A(p, iy * nx + jx) += kpp.kappa * d2x(ix, jx) + bx * d1x(ix, jx);
            }
            for (int jy = 0; jy < ny; ++jy) {
                A(p, jy * nx + ix) += kpp.kappa * d2y(iy, jy) + by * d1y(iy, jy);
            }
            A(p, p) += potential_from_velocity(v, dual, kpp, 2);
        }
    }
    return out;
}

SpectralResult spectral_eigen(const FlowModel& flow, const DualVariable& dual, const KppParams& kpp,
                              std::array<int, 2> n, std::array<double, 2> period,
                              const SpectralOptions& options)
{
    require(static_cast<long long>(n[0]) * n[1] <= options.max_size,
            "collocation grid exceeds the configured size cap");
    const CollocationMatrix op = assemble_collocation(flow, dual, kpp, n, period);
    const int size = op.size;
    const Eigen::Map<const RowMatrix> A(op.entries.data(), size, size);

    SpectralResult result;
    if (size <= options.dense_threshold) {
        const Eigen::EigenSolver<Eigen::MatrixXd> solver(Eigen::MatrixXd(A), false);
        if (solver.info() != Eigen::Success) {
            throw ConvergenceError("dense eigensolver failed", 0.0);
        }
        const auto& ev = solver.eigenvalues();
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < ev.size(); ++i) {
            if (ev[i].real() > ev[best].real()) {
                best = i;
            }
        }
        result.mu = ev[best].real();
        result.dense = true;
        return result;
    }

    // Principal eigenvalue <= max of the potential; any real shift above it
    // makes the principal mode dominant for (shift - A)^{-1}.
    double max_c = -std::numeric_limits<double>::infinity();
    for (int iy = 0; iy < n[1]; ++iy) {
        for (int ix = 0; ix < n[0]; ++ix) {
            const double x[2] = {ix * period[0] / n[0], iy * period[1] / n[1]};
            max_c = std::max(max_c, potential_from_velocity(flow(x), dual, kpp, 2));
        }
    }
    const double shift = max_c + 1.0;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(shift * Eigen::MatrixXd::Identity(size, size) - Eigen::MatrixXd(A));

    Eigen::VectorXd x = Eigen::VectorXd::Ones(size) / std::sqrt(static_cast<double>(size));
    double residual = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= options.max_iterations; ++it) {
        Eigen::VectorXd y = lu.solve(x);
        x = y / y.norm();
        const Eigen::VectorXd ax = A * x;
        const double mu = x.dot(ax);
        residual = (ax - mu * x).norm();
        result.mu = mu;
        result.iterations = it;
        if (residual <= options.tolerance * std::max(1.0, std::abs(mu))) {
            result.residual = residual;
            return result;
        }
    }
    std::ostringstream msg;
    msg << "inverse iteration did not converge in " << options.max_iterations
        << " iterations (residual " << residual << ")";
    throw ConvergenceError(msg.str(), residual);
}

} // namespace kppfl
