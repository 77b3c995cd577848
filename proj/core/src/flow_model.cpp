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

#include "kppfl/flow_model.hpp"

#include <cmath>
#include <numbers>

#include "kppfl/error.hpp"

namespace kppfl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int native_dim(BaseFlow base)
{
    switch (base) {
    case BaseFlow::cellular2d:
    case BaseFlow::shear2d_zero_base:
        return 2;
    case BaseFlow::abc3d:
    case BaseFlow::cellular3d:
        return 3;
    case BaseFlow::zero:
        return 0;
    }
    return 0;
}

bool is_multiple(double length, double period, double rel_tol)
{
    const double ratio = length / period;
    const double n = std::round(ratio);
    return n >= 1.0 && std::fabs(ratio - n) <= rel_tol * ratio;
}

} // namespace

std::string_view to_string(BaseFlow base) noexcept
{
    switch (base) {
    case BaseFlow::zero:
        return "zero";
    case BaseFlow::cellular2d:
        return "cellular2d";
    case BaseFlow::shear2d_zero_base:
        return "shear2d_zero_base";
    case BaseFlow::abc3d:
        return "abc3d";
    case BaseFlow::cellular3d:
        return "cellular3d";
    }
    return "zero";
}

BaseFlow base_flow_from_string(std::string_view name)
{
    for (BaseFlow b : {BaseFlow::zero, BaseFlow::cellular2d, BaseFlow::shear2d_zero_base,
                       BaseFlow::abc3d, BaseFlow::cellular3d}) {
        if (to_string(b) == name) {
            return b;
        }
    }
    throw ContractError("unknown base flow '" + std::string(name) + "'");
}

DualVariable::DualVariable(double lambda_, std::span<const double> e_)
    : lambda(lambda_), e{0.0, 0.0, 0.0}, dim(static_cast<int>(e_.size()))
{
    require(dim >= 1 && dim <= 3, "dual direction must have 1 to 3 components");
    require(std::isfinite(lambda) && lambda >= 0.0, "lambda must be finite and nonnegative");
    double norm2 = 0.0;
    for (int i = 0; i < dim; ++i) {
        e[i] = e_[i];
        norm2 += e_[i] * e_[i];
    }
    require(std::fabs(std::sqrt(norm2) - 1.0) < 1e-12, "dual direction e must be a unit vector");
}

DualVariable DualVariable::along(double lambda, std::span<const double> direction)
{
    double norm2 = 0.0;
    for (const double c : direction) {
        norm2 += c * c;
    }
    require(norm2 > 0.0, "direction must be nonzero");
    std::vector<double> unit(direction.begin(), direction.end());
    const double norm = std::sqrt(norm2);
    for (double& c : unit) {
        c /= norm;
    }
    return {lambda, unit};
}

void KppParams::validate() const
{
    require(kappa > 0.0 && std::isfinite(kappa), "kappa must be positive");
    require(std::isfinite(f_prime0), "f'(0) must be finite");
}

FlowModel::FlowModel(int dim, BaseFlow base, double delta, double epsilon,
                     std::shared_ptr<const FieldRealization> perturbation, int perturbed_component)
    : dim_(dim), base_(base), delta_(delta), epsilon_(epsilon), field_(std::move(perturbation)),
      component_(perturbed_component)
{
    require(dim_ == 2 || dim_ == 3, "flow dimension must be 2 or 3");
    const int nd = native_dim(base_);
    require(nd == 0 || nd == dim_, "base flow '" + std::string(to_string(base_)) +
                                       "' is defined in " + std::to_string(nd) + " dimensions");
    require(std::isfinite(delta_) && std::isfinite(epsilon_), "flow amplitudes must be finite");
    require(component_ >= 1 && component_ < dim_,
            "perturbed component must be a coordinate other than x_1");
}

FlowModel FlowModel::with_delta(double delta) const
{
    return {dim_, base_, delta, epsilon_, field_, component_};
}

std::vector<double> FlowModel::minimal_period() const
{
    const bool varies = base_ != BaseFlow::zero && base_ != BaseFlow::shear2d_zero_base;
    std::vector<double> period(static_cast<std::size_t>(dim_), varies ? kTwoPi : 0.0);
    if (field_ && epsilon_ != 0.0) {
        const double p = field_->period();
        if (period[0] == 0.0) {
            period[0] = p;
        } else if (is_multiple(p, period[0], 1e-9)) {
            period[0] = p;
        } else if (!is_multiple(period[0], p, 1e-9)) {
            throw ContractError("perturbation period is not commensurate with the base period");
        }
    }
    return period;
}

std::vector<double> FlowModel::natural_period() const
{
    const auto minimal = minimal_period();
    if (field_ && epsilon_ != 0.0) {
        return std::vector<double>(static_cast<std::size_t>(dim_), minimal[0]);
    }
    return std::vector<double>(static_cast<std::size_t>(dim_), kTwoPi);
}

bool FlowModel::compatible_with_torus(std::span<const double> periods, double rel_tol) const
{
    if (static_cast<int>(periods.size()) != dim_) {
        return false;
    }
    const auto minimal = minimal_period();
    for (int i = 0; i < dim_; ++i) {
        if (!(periods[i] > 0.0)) {
            return false;
        }
        if (minimal[i] > 0.0 && !is_multiple(periods[i], minimal[i], rel_tol)) {
            return false;
        }
    }
    return true;
}

Vec3 FlowModel::operator()(const double* x) const noexcept
{
    Vec3 v{0.0, 0.0, 0.0};
    switch (base_) {
    case BaseFlow::cellular2d: {
        const double sx = std::sin(x[0]), cx = std::cos(x[0]);
        const double sy = std::sin(x[1]), cy = std::cos(x[1]);
        v = {-sx * cy, cx * sy, 0.0};
        break;
    }
    case BaseFlow::abc3d: {
        const double sx = std::sin(x[0]), cx = std::cos(x[0]);
        const double sy = std::sin(x[1]), cy = std::cos(x[1]);
        const double sz = std::sin(x[2]), cz = std::cos(x[2]);
        v = {sz + cy, sx + cz, sy + cx};
        break;
    }
    case BaseFlow::cellular3d: {
        const double sx = std::sin(x[0]), cx = std::cos(x[0]);
        const double sy = std::sin(x[1]), cy = std::cos(x[1]);
        const double sz = std::sin(x[2]), cz = std::cos(x[2]);
        v = {-sx * cy * cz, -sy * cx * cz, 2.0 * sz * cx * cy};
        break;
    }
    case BaseFlow::zero:
    case BaseFlow::shear2d_zero_base:
        break;
    }
    if (field_ && epsilon_ != 0.0) {
        v[component_] += epsilon_ * (*field_)(x[0]);
    }
    for (int i = 0; i < dim_; ++i) {
        v[i] *= delta_;
    }
    return v;
}

Vec3 velocity(const FlowModel& flow, std::span<const double> x)
{
    require(static_cast<int>(x.size()) == flow.dim(), "position dimension does not match flow");
    return flow(x.data());
}

Vec3 drift(const FlowModel& flow, const DualVariable& dual, const KppParams& kpp,
           std::span<const double> x)
{
    require(dual.dim == flow.dim(), "dual dimension does not match flow");
    Vec3 b = velocity(flow, x);
    for (int i = 0; i < flow.dim(); ++i) {
        b[i] -= 2.0 * kpp.kappa * dual.lambda * dual.e[i];
    }
    return b;
}

double potential(const FlowModel& flow, const DualVariable& dual, const KppParams& kpp,
                 std::span<const double> x)
{
    require(dual.dim == flow.dim(), "dual dimension does not match flow");
    return potential_from_velocity(velocity(flow, x), dual, kpp, flow.dim());
}

double numerical_divergence(const FlowModel& flow, std::span<const double> x, double h)
{
    std::array<double, 3> p{};
    double div = 0.0;
    for (int i = 0; i < flow.dim(); ++i) {
        std::copy(x.begin(), x.end(), p.begin());
        p[i] = x[i] + h;
        const double plus = flow(p.data())[i];
        p[i] = x[i] - h;
        const double minus = flow(p.data())[i];
        div += (plus - minus) / (2.0 * h);
    }
    return div;
}

} // namespace kppfl
