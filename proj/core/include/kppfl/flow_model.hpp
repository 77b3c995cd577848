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

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kppfl/random_field.hpp"

namespace kppfl {

using Vec3 = std::array<double, 3>;

enum class BaseFlow { zero, cellular2d, shear2d_zero_base, abc3d, cellular3d };

std::string_view to_string(BaseFlow base) noexcept;
BaseFlow base_flow_from_string(std::string_view name);

/// Dual direction: lambda >= 0 along a unit vector e.
struct DualVariable {
    DualVariable(double lambda, std::span<const double> e);

    /// Normalizes `direction` before construction.
    static DualVariable along(double lambda, std::span<const double> direction);

    double lambda;
    Vec3 e;
    int dim;
};

struct KppParams {
    double kappa = 1.0;
    double f_prime0 = 1.0;

    void validate() const;
};

/// v(x) = delta * (base(x) + epsilon * xi(x_1) * unit(component)).
///
/// The perturbation depends on the first coordinate only and is added to a
/// different component, so every composite stays divergence-free.
class FlowModel {
public:
    FlowModel(int dim, BaseFlow base, double delta, double epsilon = 0.0,
              std::shared_ptr<const FieldRealization> perturbation = nullptr,
              int perturbed_component = 1);

    int dim() const noexcept { return dim_; }
    BaseFlow base() const noexcept { return base_; }
    double delta() const noexcept { return delta_; }
    double epsilon() const noexcept { return epsilon_; }
    int perturbed_component() const noexcept { return component_; }
    const std::shared_ptr<const FieldRealization>& perturbation() const noexcept { return field_; }

    /// Same flow with a different amplitude; the realization is shared.
    FlowModel with_delta(double delta) const;

    /// Smallest period per dimension; 0 marks a direction the flow does not
    /// vary in (any period is compatible).
    std::vector<double> minimal_period() const;

    /// Period used for a default torus: 1/dk in every dimension when a
    /// perturbation is active, otherwise 2 pi.
    std::vector<double> natural_period() const;

    /// True when a torus of the given per-dimension lengths is a union of whole periods.
    bool compatible_with_torus(std::span<const double> periods, double rel_tol = 1e-9) const;

    Vec3 operator()(const double* x) const noexcept;

private:
    int dim_;
    BaseFlow base_;
    double delta_;
    double epsilon_;
    std::shared_ptr<const FieldRealization> field_;
    int component_;
};

Vec3 velocity(const FlowModel& flow, std::span<const double> x);

/// b = -2 kappa lambda e + v.
Vec3 drift(const FlowModel& flow, const DualVariable& dual, const KppParams& kpp,
           std::span<const double> x);

/// c = kappa lambda^2 - lambda v.e + f'(0).
double potential(const FlowModel& flow, const DualVariable& dual, const KppParams& kpp,
                 std::span<const double> x);

/// Potential from an already evaluated velocity.
inline double potential_from_velocity(const Vec3& v, const DualVariable& dual, const KppParams& kpp,
                                      int dim) noexcept
{
    double ve = 0.0;
    for (int i = 0; i < dim; ++i) {
        ve += v[i] * dual.e[i];
    }
    return kpp.kappa * dual.lambda * dual.lambda - dual.lambda * ve + kpp.f_prime0;
}

/// Central-difference divergence with step h.
double numerical_divergence(const FlowModel& flow, std::span<const double> x, double h = 1e-5);

} // namespace kppfl
