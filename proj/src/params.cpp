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

#include "hestonpde/params.hpp"

#include <cmath>
#include <stdexcept>

namespace heston {

void ModelParams::check() const {
    auto fail = [](const std::string& what) {
        throw std::invalid_argument("invalid model parameter: " + what);
    };
    if (!(kappa > 0)) fail("kappa must be > 0");
    if (!(theta > 0)) fail("theta must be > 0");
    if (!(sigma > 0)) fail("sigma must be > 0");
    if (!(std::abs(rho) < 1)) fail("|rho| must be < 1");
    if (!(lambda >= 0)) fail("lambda must be >= 0");
    if (!(strike > 0)) fail("strike must be > 0");
    if (!(maturity > 0)) fail("maturity must be > 0");
}

ModelParams ModelParams::from_json(const nlohmann::json& j) {
    ModelParams m;
    m.r = j.value("r", 0.0);
    m.q = j.value("q", 0.0);
    m.kappa = j.at("kappa").get<double>();
    m.theta = j.at("theta").get<double>();
    m.sigma = j.at("sigma").get<double>();
    m.rho = j.at("rho").get<double>();
    m.lambda = j.value("lambda", 0.0);
    m.strike = j.at("strike").get<double>();
    m.maturity = j.at("maturity").get<double>();
    return m;
}

nlohmann::json ModelParams::to_json() const {
    return {{"r", r},         {"q", q},           {"kappa", kappa},
            {"theta", theta}, {"sigma", sigma},   {"rho", rho},
            {"lambda", lambda}, {"strike", strike}, {"maturity", maturity}};
}

TransformedParams TransformedParams::from_json(const nlohmann::json& j) {
    TransformedParams t;
    t.kappa_star = j.at("kappa_star").get<double>();
    t.theta_star = j.at("theta_star").get<double>();
    t.sigma = j.at("sigma").get<double>();
    t.rho = j.at("rho").get<double>();
    t.q_r = j.value("q_r", 0.0);
    t.theta_sigma = t.theta_star / t.sigma;
    return t;
}

nlohmann::json TransformedParams::to_json() const {
    return {{"kappa_star", kappa_star}, {"theta_star", theta_star},
            {"theta_sigma", theta_sigma}, {"q_r", q_r},
            {"sigma", sigma},            {"rho", rho}};
}

nlohmann::json CoercivityConstants::to_json() const {
    return {{"c1", c1}, {"c2", c2}, {"c3", c3},
            {"c1_prime", c1_prime}, {"c2_prime", c2_prime}, {"m1", m1}};
}

const ConditionCheck* AdmissibilityReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

nlohmann::json AdmissibilityReport::to_json() const {
    nlohmann::json jc = nlohmann::json::array();
    for (const auto& c : checks)
        jc.push_back({{"name", c.name}, {"slack", c.slack}, {"pass", c.pass}});
    return {{"admissible", admissible},
            {"checks", jc},
            {"beta", weight.beta},
            {"gamma", weight.gamma},
            {"mu", weight.mu},
            {"beta_max", beta_max},
            {"kappa_threshold", kappa_threshold},
            {"feller_slack", feller_slack},
            {"constants", constants.to_json()}};
}

TransformedParams transform(const ModelParams& m) {
    m.check();
    TransformedParams t;
    t.kappa_star = m.kappa + m.lambda;
    t.theta_star = m.kappa * m.theta / (m.kappa + m.lambda);
    t.theta_sigma = t.theta_star / m.sigma;
    t.q_r = m.q - m.r;
    t.sigma = m.sigma;
    t.rho = m.rho;
    return t;
}

CoercivityConstants coercivity_constants(const TransformedParams& t,
                                         const WeightParams& w) {
    const double k = t.kappa_star, s = t.sigma, rho = t.rho;
    const double ts = t.theta_sigma, qr = t.q_r;
    const double b = w.beta, g = w.gamma, mu = w.mu;

    CoercivityConstants c;
    c.c1 = (mu * k - 0.5 * s * (g * g + mu * mu)) - s * g * std::abs(0.5 - mu * rho);
    c.c1_prime = 0.5 * s * (std::pow(k / s - g * std::abs(rho), 2) - g * (1.0 + g));
    c.c2 = (b * mu * s - k * (b + mu * ts)) - g * std::abs(b * rho * s + qr);
    c.c3 = (b - 1.0) / s * (k * t.theta_star - 0.5 * b * s * s);
    c.c2_prime = s * (1.0 - std::abs(rho)) + std::abs(c.c2);
    c.m1 = 2.0 * std::max({0.5 * (1.0 + g) * s,
                           std::abs(k - 0.5 * mu * s) + g * rho * s,
                           std::abs(qr),
                           std::abs(0.5 * b * s - k * ts)});
    return c;
}

AdmissibilityReport validate(const TransformedParams& t, double gamma,
                             std::optional<double> beta_override) {
    if (!(gamma > 0)) throw std::invalid_argument("gamma must be > 0");
    if (!(t.kappa_star > 0) || !(t.theta_star > 0) || !(t.sigma > 0) ||
        !(std::abs(t.rho) < 1))
        throw std::invalid_argument("transformed parameters out of range");

    AdmissibilityReport rep;
    const double s = t.sigma, k = t.kappa_star;

    rep.feller_slack = 0.5 * s * s - k * t.theta_star;
    const bool feller_ok = rep.feller_slack < 0.0;
    rep.checks.push_back({"feller", rep.feller_slack, feller_ok});

    rep.kappa_threshold =
        s * (gamma * std::abs(t.rho) + std::sqrt(gamma * (1.0 + gamma)));
    const double kappa_slack = k - rep.kappa_threshold;
    const bool kappa_ok = kappa_slack >= 0.0;
    rep.checks.push_back({"kappa_bound", kappa_slack, kappa_ok});

    const double mu = k / s - gamma * std::abs(t.rho);
    const bool mu_ok = mu > 0.0;
    rep.checks.push_back({"mu_positive", mu, mu_ok});

    rep.beta_max = 2.0 * k * t.theta_star / (s * s);
    double beta = beta_override.value_or(std::min(2.0, rep.beta_max));
    const bool beta_ok = beta > 1.0 && beta <= rep.beta_max;
    rep.checks.push_back({"beta_range", std::min(beta - 1.0, rep.beta_max - beta),
                          beta_ok});

    rep.weight = WeightParams{beta, gamma, mu};
    rep.constants = coercivity_constants(t, rep.weight);
    rep.checks.push_back({"c1_prime_nonneg", rep.constants.c1_prime,
                          rep.constants.c1_prime >= 0.0});
    rep.checks.push_back({"c3_nonneg", rep.constants.c3,
                          rep.constants.c3 >= 0.0});

    rep.admissible = true;
    for (const auto& c : rep.checks) rep.admissible = rep.admissible && c.pass;
    return rep;
}

} // namespace heston
