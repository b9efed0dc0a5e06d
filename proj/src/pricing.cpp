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

#include "hestonpde/pricing.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace heston {

double Payoff::operator()(double x) const {
    switch (kind) {
        case PayoffKind::Call: return strike * std::max(std::exp(x) - 1.0, 0.0);
        case PayoffKind::Put: return strike * std::max(1.0 - std::exp(x), 0.0);
        case PayoffKind::Custom: return custom(x);
    }
    return 0.0;
}

void Payoff::require_in_H(const WeightParams& w, const QuadratureGrid& grid) const {
    if (kind == PayoffKind::Call && !(w.gamma > 2.0))
        throw std::invalid_argument(
            "call payoff requires gamma > 2 for H-membership");
    if (kind == PayoffKind::Custom && !custom)
        throw std::invalid_argument("custom payoff without callable");
    // quadrature membership proxy: finite norm with a decaying outer tail
    const auto& xs = grid.x();
    double total = 0.0, outer = 0.0;
    const double split = 0.9 * grid.x_max();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double h = (*this)(xs[i]);
        const double cell =
            grid.wx()[i] * std::exp(-w.gamma * std::abs(xs[i])) * h * h;
        total += cell;
        if (std::abs(xs[i]) > split) outer += cell;
    }
    if (!std::isfinite(total))
        throw std::invalid_argument("payoff is not square integrable on the grid");
    if (total > 0 && outer > 0.01 * total)
        throw std::invalid_argument(
            "payoff tail mass exceeds 1% inside the truncation box; "
            "not in H for this gamma");
}

ProjectionResult project_payoff(const Payoff& payoff, const TensorBasis& basis,
                                const QuadratureGrid& grid, const WeightParams& w) {
    payoff.require_in_H(w, grid);
    return project([&](double x, double) { return Complex(payoff(x), 0.0); },
                   basis, grid, w);
}

void PriceSurface::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "x,v,p,du_dxi\n";
    out.precision(17);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j)
            out << x[i] << "," << v[j] << "," << value(i, j) << ","
                << du_dxi(i, j) << "\n";
}

PriceSurface price_surface(const CoefficientVector& state, const TensorBasis& basis,
                           const ModelParams& m, double time_to_maturity,
                           const std::vector<double>& x_grid,
                           const std::vector<double>& v_grid) {
    if (state.m_max != basis.m_max() || state.n_max != basis.n_max())
        throw std::invalid_argument("price_surface: state/basis mismatch");
    if (time_to_maturity < 0)
        throw std::invalid_argument("price_surface: negative time to maturity");
    PriceSurface s;
    s.x = x_grid;
    s.v = v_grid;
    s.time_to_maturity = time_to_maturity;
    const double disc = std::exp(-m.r * time_to_maturity);

    std::vector<double> xis(v_grid.size());
    for (std::size_t j = 0; j < v_grid.size(); ++j) xis[j] = v_grid[j] / m.sigma;
    const Eigen::MatrixXd hx = basis.hermite_matrix(x_grid, 0);
    const Eigen::MatrixXd l0 = basis.laguerre_matrix(xis, 0);
    const Eigen::MatrixXd l1 = basis.laguerre_matrix(xis, 1);
    const auto cm = state.as_matrix();
    const Eigen::MatrixXcd u = hx * cm * l0.transpose();
    const Eigen::MatrixXcd du = hx * cm * l1.transpose();
    s.value = disc * u.real();
    s.du_dxi = du.real();
    return s;
}

std::pair<std::vector<double>, std::vector<double>> completeness_grid(
    const TransformedParams& t, double sigma) {
    constexpr int kCells = 60;
    std::vector<double> xg(kCells + 1), vg(kCells + 1);
    const double xi_lo = 0.1 * t.theta_sigma, xi_hi = 4.0 * t.theta_sigma;
    for (int i = 0; i <= kCells; ++i) {
        xg[i] = -1.5 + 3.0 * i / kCells;
        vg[i] = sigma * (xi_lo + (xi_hi - xi_lo) * i / kCells);
    }
    return {xg, vg};
}

nlohmann::json CompletenessReport::to_json() const {
    nlohmann::json js = nlohmann::json::array();
    for (const auto& s : slices)
        js.push_back({{"time_to_maturity", s.time_to_maturity},
                      {"min_du_dxi", s.min_du_dxi},
                      {"max_du_dxi", s.max_du_dxi},
                      {"zero_set_fraction", s.zero_set_fraction},
                      {"positive", s.positive}});
    return {{"slices", js}, {"tolerance", tolerance}, {"pass", pass}};
}

CompletenessReport completeness_report(const std::vector<PriceSurface>& surfaces,
                                       double tolerance) {
    CompletenessReport rep;
    rep.tolerance = tolerance;
    rep.pass = true;
    for (const auto& s : surfaces) {
        CompletenessReport::Slice sl;
        sl.time_to_maturity = s.time_to_maturity;
        sl.min_du_dxi = s.du_dxi.minCoeff();
        sl.max_du_dxi = s.du_dxi.maxCoeff();
        long changes = 0, cells = 0;
        for (Eigen::Index i = 0; i + 1 < s.du_dxi.rows(); ++i)
            for (Eigen::Index j = 0; j + 1 < s.du_dxi.cols(); ++j) {
                ++cells;
                const double a = s.du_dxi(i, j);
                const bool flip = a * s.du_dxi(i + 1, j) < 0 ||
                                  a * s.du_dxi(i, j + 1) < 0 ||
                                  a * s.du_dxi(i + 1, j + 1) < 0;
                if (flip) ++changes;
            }
        sl.zero_set_fraction = cells > 0 ? double(changes) / double(cells) : 0.0;
        sl.positive = sl.min_du_dxi > 0.0;
        rep.pass = rep.pass && sl.zero_set_fraction < tolerance;
        rep.slices.push_back(sl);
    }
    return rep;
}

void save_sign_map_csv(const PriceSurface& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    for (Eigen::Index i = 0; i < s.du_dxi.rows(); ++i) {
        for (Eigen::Index j = 0; j < s.du_dxi.cols(); ++j) {
            if (j) out << ",";
            out << (s.du_dxi(i, j) > 0 ? 1 : (s.du_dxi(i, j) < 0 ? -1 : 0));
        }
        out << "\n";
    }
}

} // namespace heston
