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

#ifndef HESTONPDE_PRICING_HPP
#define HESTONPDE_PRICING_HPP

#include <functional>
#include <string>
#include <vector>

#include "hestonpde/basis.hpp"
#include "hestonpde/params.hpp"

namespace heston {

enum class PayoffKind { Call, Put, Custom };

struct Payoff {
    PayoffKind kind = PayoffKind::Put;
    double strike = 100.0;
    std::function<double(double)> custom; ///< of x = ln(S/K); Custom only

    double operator()(double x) const;
    static Payoff call(double strike) { return {PayoffKind::Call, strike, {}}; }
    static Payoff put(double strike) { return {PayoffKind::Put, strike, {}}; }

    /// Finite ||h||_H under the given weight; a call additionally requires
    /// gamma > 2.  Throws when membership fails.
    void require_in_H(const WeightParams& w, const QuadratureGrid& grid) const;
};

/// Projection of a payoff after the H-membership check.
ProjectionResult project_payoff(const Payoff& payoff, const TensorBasis& basis,
                                const QuadratureGrid& grid, const WeightParams& w);

struct PriceSurface {
    std::vector<double> x;      ///< log-moneyness grid
    std::vector<double> v;      ///< variance grid
    Eigen::MatrixXd value;      ///< p(x, v) (rows x, cols v)
    Eigen::MatrixXd du_dxi;     ///< analytic xi-derivative of u
    double time_to_maturity = 0.0;

    void save_csv(const std::string& path) const;
};

/// Maps solver output back to prices in original variables:
/// p(x, v) = e^{-r * ttm} u(x, v / sigma) evaluated on the given grids.
PriceSurface price_surface(const CoefficientVector& state, const TensorBasis& basis,
                           const ModelParams& m, double time_to_maturity,
                           const std::vector<double>& x_grid,
                           const std::vector<double>& v_grid);

/// Default interior grid for the completeness diagnostic:
/// x in [-1.5, 1.5], xi in [0.1 theta_sigma, 4 theta_sigma], 60x60 cells.
std::pair<std::vector<double>, std::vector<double>> completeness_grid(
    const TransformedParams& t, double sigma);

struct CompletenessReport {
    struct Slice {
        double time_to_maturity = 0.0;
        double min_du_dxi = 0.0;   ///< signed minimum over the interior grid
        double max_du_dxi = 0.0;
        double zero_set_fraction = 0.0; ///< fraction of cells with a sign change
        bool positive = false;          ///< min_du_dxi > 0
    };
    std::vector<Slice> slices;
    double tolerance = 0.0;
    bool pass = false; ///< every slice: zero_set_fraction < tolerance

    nlohmann::json to_json() const;
};

/// Sign-change census of det G = du/dxi over a sequence of surfaces.
CompletenessReport completeness_report(const std::vector<PriceSurface>& surfaces,
                                       double tolerance);

/// Writes the sign map of du/dxi (one row per x, +1/-1 per cell).
void save_sign_map_csv(const PriceSurface& s, const std::string& path);

} // namespace heston

#endif // HESTONPDE_PRICING_HPP
