/*
 * Copyright 2026 The hestonpde Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HESTONPDE_QUADRATURE_HPP
#define HESTONPDE_QUADRATURE_HPP

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "hestonpde/params.hpp"

namespace heston {

using Complex = std::complex<double>;

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

struct GridSpec {
    double x_max = 0.0;        ///< 0 = choose from weight tail / basis reach
    double xi_max = 0.0;       ///< 0 = choose from weight tail / basis reach
    int x_panels_half = 8;     ///< panels on each of [-x_max,0], [0,x_max]
    int xi_panels = 16;
    int points_per_panel = 24;
    double x_ratio = 1.35;     ///< geometric panel growth away from x = 0
    double xi_ratio = 1.15;    ///< geometric panel growth away from xi = 0

    static GridSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// Tensor quadrature over the half-plane: composite Gauss-Legendre panels,
/// split at x = 0 (no node sits at 0, so sign x is well defined) and graded
/// toward xi = 0.  Immutable after construction.
class QuadratureGrid {
public:
    explicit QuadratureGrid(const GridSpec& spec);

    /// Grid sized for integrals against the weight w(x,xi): truncation set so
    /// the weight's tail mass beyond the box is < 1e-12 of its total, panel
    /// counts scaled to resolve basis oscillation up to the given orders.
    static QuadratureGrid for_weight(const WeightParams& w, int m_max, int n_max);

    /// The spec behind for_weight, exposed so callers can override fields.
    static GridSpec weight_spec(const WeightParams& w, int m_max, int n_max);

    /// Grid sized for plain-L2 integrals of basis functions (orthonormality
    /// checks): the Hermite/Laguerre natural decay sets the truncation.
    static QuadratureGrid for_plain_l2(int m_max, int n_max);

    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& wx() const { return wx_; }
    const std::vector<double>& xi() const { return xi_; }
    const std::vector<double>& wxi() const { return wxi_; }
    double x_max() const { return spec_.x_max; }
    double xi_max() const { return spec_.xi_max; }
    const GridSpec& spec() const { return spec_; }

    /// Edges of the xi panels (ascending), used by the trace extrapolation.
    const std::vector<double>& xi_edges() const { return xi_edges_; }

    /// Analytic bound on the relative weight mass outside the box.
    static double tail_mass_bound(const WeightParams& w, double x_max, double xi_max);

private:
    GridSpec spec_;
    std::vector<double> x_, wx_, xi_, wxi_;
    std::vector<double> xi_edges_;
};

/// Function on the half-plane with optional analytic partials.
struct WeightedFunction {
    std::function<Complex(double, double)> value;
    std::function<Complex(double, double)> dx;  ///< optional
    std::function<Complex(double, double)> dxi; ///< optional

    bool has_partials() const { return static_cast<bool>(dx) && static_cast<bool>(dxi); }
};

/// The weight xi^{beta-1} e^{-gamma|x| - mu xi}; domain error for xi <= 0.
double weight_eval(double x, double xi, const WeightParams& w);

/// Weighted L2 inner product (u, v)_H by quadrature.
Complex inner_H(const WeightedFunction& u, const WeightedFunction& v,
                const QuadratureGrid& grid, const WeightParams& w);

/// First-order product: gradient terms carry the extra factor xi.
Complex inner_V(const WeightedFunction& u, const WeightedFunction& v,
                const QuadratureGrid& grid, const WeightParams& w);

struct InequalityReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
    double l0 = 0.0;          ///< trace limit toward xi = 0 (traces only)
    double l_infinity = 0.0;  ///< trace limit toward xi = infinity
    std::map<std::string, double> constants;

    nlohmann::json to_json() const;
};

/// Relative tolerance absorbing quadrature error in inequality checks.
inline constexpr double kInequalityTolRel = 1e-8;

/// Hardy-type inequality; refused (throws) when beta <= 1.
InequalityReport check_hardy(const WeightedFunction& u, const QuadratureGrid& grid,
                             const WeightParams& w);

/// Sobolev-type inequality with constants (2/mu)^2 and 2 beta / mu.
InequalityReport check_sobolev(const WeightedFunction& u, const QuadratureGrid& grid,
                               const WeightParams& w);

/// Trace limits toward xi = 0, xi = infinity and x = +-infinity, estimated by
/// Richardson extrapolation over the three extreme panels.  Pass iff all
/// limits are below 1e-8 * ||u||_H^2 in absolute value.
InequalityReport check_traces(const WeightedFunction& u, const QuadratureGrid& grid,
                              const WeightParams& w);

/// Equivalent-norm constant 1 + max{(2/mu)^2, 8/(beta-1)^2}
///                            + max{2 beta/mu, 2 mu^2/(beta-1)^2}.
double equivalent_norm_constant(const WeightParams& w);

/// ||u||_V_sharp^2 = ||u||_V^2 + int |u|^2 (xi + 1/xi) w.
double norm_V_sharp_sq(const WeightedFunction& u, const QuadratureGrid& grid,
                       const WeightParams& w);

} // namespace heston

#endif // HESTONPDE_QUADRATURE_HPP
