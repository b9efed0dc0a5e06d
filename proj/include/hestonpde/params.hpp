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

#ifndef HESTONPDE_PARAMS_HPP
#define HESTONPDE_PARAMS_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace heston {

/// Raw Heston market inputs (annualized rates, variance units).
struct ModelParams {
    double r = 0.0;        ///< risk-free rate
    double q = 0.0;        ///< dividend yield
    double kappa = 0.0;    ///< mean-reversion rate of the variance
    double theta = 0.0;    ///< long-run variance
    double sigma = 0.0;    ///< volatility of volatility
    double rho = 0.0;      ///< correlation of the two Brownian drivers
    double lambda = 0.0;   ///< price-of-volatility-risk coefficient
    double strike = 0.0;   ///< strike K
    double maturity = 0.0; ///< maturity T in years

    /// Throws std::invalid_argument naming the violated invariant.
    void check() const;

    static ModelParams from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// Reduced parameter set after absorbing r and lambda and rescaling the
/// variance by the vol-of-vol.
struct TransformedParams {
    double kappa_star = 0.0;  ///< kappa + lambda
    double theta_star = 0.0;  ///< kappa*theta / (kappa + lambda)
    double theta_sigma = 0.0; ///< theta_star / sigma
    double q_r = 0.0;         ///< q - r
    double sigma = 0.0;
    double rho = 0.0;

    static TransformedParams from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// Weight exponents (beta, gamma, mu) of the weighted L2 space.
struct WeightParams {
    double beta = 2.0;
    double gamma = 0.5;
    double mu = 1.0;
};

/// Explicit constants entering the Garding and boundedness estimates.
struct CoercivityConstants {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double c1_prime = 0.0;
    double c2_prime = 0.0;
    double m1 = 0.0;

    nlohmann::json to_json() const;
};

struct ConditionCheck {
    std::string name;
    double slack = 0.0; ///< sign convention documented per check
    bool pass = false;
};

/// Outcome of the admissibility calculus: per-condition slack plus the
/// derived weight parameters and explicit constants.
struct AdmissibilityReport {
    bool admissible = false;
    std::vector<ConditionCheck> checks;
    WeightParams weight;
    CoercivityConstants constants;
    double beta_max = 0.0;       ///< 2 kappa* theta* / sigma^2
    double kappa_threshold = 0.0; ///< sigma (gamma|rho| + sqrt(gamma(1+gamma)))
    double feller_slack = 0.0;    ///< sigma^2/2 - kappa* theta* (pass iff < 0)

    const ConditionCheck* find(const std::string& name) const;
    nlohmann::json to_json() const;
};

/// Absorbs r and lambda into the reduced parameter set.  Exact identity
/// kappa_star * theta_star == kappa * theta is preserved.
TransformedParams transform(const ModelParams& m);

/// Runs every admissibility condition for the given gamma, derives
/// (beta, gamma, mu) and all explicit constants.  Failures are reported,
/// never thrown.  beta_override replaces the default beta = min(2, beta_max).
///
/// Note on the mu convention: mu = kappa_star / sigma - gamma |rho| uses the
/// risk-adjusted reversion rate kappa_star = kappa + lambda, not the raw
/// kappa.  With lambda > 0 the two differ; always feed TransformedParams.
AdmissibilityReport validate(const TransformedParams& t, double gamma,
                             std::optional<double> beta_override = std::nullopt);

/// Constants c1, c2, c3, c1', c2', M1 for an already-chosen weight.
CoercivityConstants coercivity_constants(const TransformedParams& t,
                                         const WeightParams& w);

} // namespace heston

#endif // HESTONPDE_PARAMS_HPP
