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

#ifndef HESTONPDE_EVOLUTION_HPP
#define HESTONPDE_EVOLUTION_HPP

#include <functional>
#include <optional>

#include "hestonpde/operator.hpp"

namespace heston {

struct SolveConfig {
    double dt = 1e-3;
    double theta_scheme = 1.0; ///< 1 = implicit Euler, 1/2 = trapezoidal
    double t_end = 0.5;
    /// optional forcing, coefficient-vector valued
    std::function<Eigen::VectorXcd(double)> forcing;
    double envelope_tol = 1e-6; ///< relative slack allowed on the norm envelope
    /// snapshot times at which the full state is recorded
    std::vector<double> snapshot_times;

    void check() const;
};

struct StepRecord {
    double t = 0.0;
    double h_norm = 0.0;
    double v_norm = 0.0;
    double envelope = 0.0; ///< admissible bound on h_norm at this time
    bool violated = false;
};

struct TrajectoryReport {
    std::vector<StepRecord> steps;
    bool envelope_ok = true;
    double max_excess = 0.0; ///< max over steps of h_norm/envelope - 1
    double growth_rate = 0.0; ///< max log-norm slope observed

    void save_csv(const std::string& path) const;
};

struct EvolveResult {
    TrajectoryReport traj;
    CoefficientVector final_state;
    std::vector<std::pair<double, CoefficientVector>> snapshots;
};

/// Theta-scheme solve of M dc/dt + A c = M f with the norm envelope
/// ||c(t)||_M <= e^{(c2'/2) t} (||c0||_M + int ||f||_M).
EvolveResult evolve(const OperatorMatrices& mats, const CoefficientVector& c0,
                    const SolveConfig& cfg);

/// Same for the shifted operator.  The initial state is the H-projection of
/// the holomorphically shifted reconstruction of c0; at zero shift this is c0
/// itself and the solve coincides with evolve().
EvolveResult evolve_shifted(const OperatorMatrices& mats, const CoefficientVector& c0,
                            const ShiftParams& shift, const SolveConfig& cfg,
                            const QuadratureGrid& grid);

struct PathParams {
    double y0 = 0.0;
    double omega0 = 0.0;
    double phi = 0.0;
    double t_prime = 0.25;
    double kappa0 = 0.1;
    double nu0 = 10.0;

    /// Checks the admissibility conditions, including kappa0 * t_prime <= pi/4.
    void check() const;
};

/// Time-dependent solve along the ramp path.  The step size is aligned so the
/// ramp end s = t_prime is a grid point.  Checks the one-step discrete
/// derivative bound d/ds ||v||^2 <= c2' ||v||^2 and the envelope
/// ||v(s)|| <= e^{c2' s} ||v0|| (note: c2', not c2'/2).
EvolveResult evolve_along_path(const OperatorMatrices& mats,
                               const CoefficientVector& c0, const PathParams& path,
                               const SolveConfig& cfg, bool weak_l3 = false);

/// Membership test for the parabolic holomorphy domain.
bool in_gamma(double y, double omega, double alpha, double tau,
              const PathParams& p);

} // namespace heston

#endif // HESTONPDE_EVOLUTION_HPP
