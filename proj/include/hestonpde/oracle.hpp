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

#ifndef HESTONPDE_ORACLE_HPP
#define HESTONPDE_ORACLE_HPP

#include <cstdint>
#include <functional>

#include <json.hpp>

#include "hestonpde/params.hpp"
#include "hestonpde/pricing.hpp"

namespace heston {

struct McConfig {
    std::int64_t paths = 100000;
    int steps = 100;            ///< time steps over [0, T]
    std::uint64_t seed = 1234;
    bool antithetic = true;
    int threads = 0;            ///< 0 = hardware concurrency

    static McConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct McEstimate {
    double price = 0.0;
    double std_error = 0.0;
    std::int64_t paths = 0;

    nlohmann::json to_json() const;
};

/// Full-truncation Euler simulation of the Heston pair (X_t, V_t) with
/// counter-based per-path random streams: serial and parallel runs produce
/// bit-identical estimates for a fixed seed.
McEstimate mc_price(const ModelParams& m, double s0, double v0,
                    const Payoff& payoff, const McConfig& cfg);

/// As above with an arbitrary terminal functional of S_T.
McEstimate mc_expectation(const ModelParams& m, double s0, double v0,
                          const std::function<double(double)>& payoff_of_s,
                          const McConfig& cfg, bool discount = true);

/// Debug dump: per-sample discounted payoffs for the first n samples, CSV
/// columns (sample, payoff).  Uses the same streams as mc_price.
void mc_dump_paths(const ModelParams& m, double s0, double v0,
                   const Payoff& payoff, const McConfig& cfg, std::int64_t n,
                   const std::string& path);

/// Semi-closed-form price via the two-probability characteristic-function
/// representation, with a branch-cut-safe complex logarithm and adaptive
/// panel integration.  Throws on non-convergent tails.
double closed_form_price(const ModelParams& m, double s0, double v0, bool call);

/// Black-Scholes price with constant variance (degenerate limit oracle).
double black_scholes_price(double s0, double strike, double r, double q,
                           double variance, double maturity, bool call);

} // namespace heston

#endif // HESTONPDE_ORACLE_HPP
