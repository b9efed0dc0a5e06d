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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hestonpde/quadrature.hpp"

using namespace heston;

namespace {

const WeightParams kRef{2.0, 2.0, 2.5};

WeightedFunction exp_exp() {
    // u = e^{-|x|} e^{-xi}; the x-kink sits on the panel split at 0
    WeightedFunction f;
    f.value = [](double x, double xi) {
        return Complex(std::exp(-std::abs(x) - xi), 0.0);
    };
    f.dx = [](double x, double xi) {
        const double s = x > 0 ? 1.0 : -1.0;
        return Complex(-s * std::exp(-std::abs(x) - xi), 0.0);
    };
    f.dxi = [](double x, double xi) {
        return Complex(-std::exp(-std::abs(x) - xi), 0.0);
    };
    return f;
}

WeightedFunction constant_one() {
    WeightedFunction f;
    f.value = [](double, double) { return Complex(1.0, 0.0); };
    f.dx = [](double, double) { return Complex(0.0, 0.0); };
    f.dxi = [](double, double) { return Complex(0.0, 0.0); };
    return f;
}

} // namespace

TEST_CASE("weight evaluation") {
    CHECK(weight_eval(0.0, 1.0, kRef) == doctest::Approx(std::exp(-2.5)).epsilon(1e-12));
    CHECK(weight_eval(0.7, 0.3, kRef) == weight_eval(-0.7, 0.3, kRef));
    // beta = 2: linear vanishing toward xi = 0
    const double v1 = weight_eval(0.0, 1e-6, kRef);
    const double v2 = weight_eval(0.0, 2e-6, kRef);
    CHECK(v2 / v1 == doctest::Approx(2.0).epsilon(1e-5));
    CHECK_THROWS_AS(weight_eval(0.0, 0.0, kRef), std::domain_error);
    CHECK_THROWS_AS(weight_eval(0.0, -1.0, kRef), std::domain_error);
}

TEST_CASE("grid invariants") {
    const auto g = QuadratureGrid::for_weight(kRef, 16, 16);
    for (double wv : g.wx()) CHECK(wv > 0.0);
    for (double wv : g.wxi()) CHECK(wv > 0.0);
    for (double xv : g.x()) CHECK(xv != 0.0);
    for (double xv : g.xi()) CHECK(xv > 0.0);
    CHECK(QuadratureGrid::tail_mass_bound(kRef, g.x_max(), g.xi_max()) < 1e-12);
}

TEST_CASE("inner_H of constants matches the Gamma integral") {
    const auto g = QuadratureGrid::for_weight(kRef, 8, 8);
    const auto one = constant_one();
    // (2/gamma) Gamma(beta) / mu^beta = 1 * 1 / 6.25
    const double expected = 2.0 / kRef.gamma *
                            std::tgamma(kRef.beta) /
                            std::pow(kRef.mu, kRef.beta);
    CHECK(expected == doctest::Approx(0.16).epsilon(1e-15));
    CHECK(inner_H(one, one, g, kRef).real() ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(inner_V(one, one, g, kRef).real() ==
          doctest::Approx(expected).epsilon(1e-12)); // gradients vanish
}

TEST_CASE("quadrature converges under panel refinement") {
    const auto g1 = QuadratureGrid::for_weight(kRef, 8, 8);
    GridSpec s = g1.spec();
    s.x_panels_half *= 2;
    s.xi_panels *= 2;
    const QuadratureGrid g2(s);
    const auto one = constant_one();
    const double a = inner_H(one, one, g1, kRef).real();
    const double b = inner_H(one, one, g2, kRef).real();
    CHECK(std::abs(a - b) / std::abs(b) < 1e-10);
}

TEST_CASE("inner products are conjugate symmetric and positive") {
    const auto g = QuadratureGrid::for_weight(kRef, 8, 8);
    WeightedFunction u;
    u.value = [](double x, double xi) {
        return Complex(std::exp(-x * x - 0.3 * xi), 0.4 * std::exp(-0.5 * xi - std::abs(x)));
    };
    WeightedFunction v;
    v.value = [](double x, double xi) {
        return Complex(x * std::exp(-x * x - xi), -0.2 * std::exp(-x * x - 0.7 * xi));
    };
    const Complex uv = inner_H(u, v, g, kRef);
    const Complex vu = inner_H(v, u, g, kRef);
    CHECK(std::abs(uv - std::conj(vu)) < 1e-14 * std::abs(uv) + 1e-300);
    CHECK(inner_H(u, u, g, kRef).real() > 0.0);
    CHECK(std::abs(inner_H(u, u, g, kRef).imag()) <
          1e-14 * inner_H(u, u, g, kRef).real());
}

TEST_CASE("hardy worked example") {
    const auto g = QuadratureGrid::for_weight(kRef, 8, 8);
    const auto rep = check_hardy(exp_exp(), g, kRef);
    CHECK(rep.lhs == doctest::Approx(1.0 / 9.0).epsilon(1e-6));
    CHECK(rep.rhs == doctest::Approx(0.2249657).epsilon(1e-6));
    CHECK(rep.pass);
}

TEST_CASE("sobolev worked example") {
    const auto g = QuadratureGrid::for_weight(kRef, 8, 8);
    const auto rep = check_sobolev(exp_exp(), g, kRef);
    CHECK(rep.lhs == doctest::Approx(0.010973937).epsilon(1e-6));
    CHECK(rep.rhs == doctest::Approx(0.046529492).epsilon(1e-6));
    CHECK(rep.pass);
}

TEST_CASE("trace limits vanish for decaying functions") {
    const auto g = QuadratureGrid::for_weight(kRef, 8, 8);
    const auto rep = check_traces(exp_exp(), g, kRef);
    CHECK(std::abs(rep.l0) < 1e-10);
    CHECK(std::abs(rep.l_infinity) < 1e-10);
    CHECK(rep.pass);
}

TEST_CASE("hardy refused for beta <= 1") {
    const WeightParams bad{1.0, 2.0, 2.5};
    const auto g = QuadratureGrid::for_weight(kRef, 8, 8);
    CHECK_THROWS_AS(check_hardy(exp_exp(), g, bad), std::invalid_argument);
}

TEST_CASE("inequality suite passes on a polynomial-gaussian-exponential family") {
    const auto g = QuadratureGrid::for_weight(kRef, 12, 12);
    int count = 0;
    for (double a : {0.4, 1.0})
        for (double b : {0.4, 1.0})
            for (int px : {0, 1, 2})
                for (int pq : {0, 1}) {
                    WeightedFunction f;
                    f.value = [=](double x, double xi) {
                        return Complex(std::pow(x, px) * std::pow(xi, pq) *
                                           std::exp(-a * x * x - b * xi),
                                       0.0);
                    };
                    f.dx = [=](double x, double xi) {
                        const double base = std::pow(xi, pq) * std::exp(-a * x * x - b * xi);
                        const double poly = px == 0 ? 0.0 : px * std::pow(x, px - 1);
                        return Complex((poly - 2.0 * a * x * std::pow(x, px)) * base, 0.0);
                    };
                    f.dxi = [=](double x, double xi) {
                        const double base = std::pow(x, px) * std::exp(-a * x * x - b * xi);
                        const double poly = pq == 0 ? 0.0 : pq * std::pow(xi, pq - 1);
                        return Complex((poly - b * std::pow(xi, pq)) * base, 0.0);
                    };
                    ++count;
                    CHECK(check_hardy(f, g, kRef).pass);
                    CHECK(check_sobolev(f, g, kRef).pass);
                    CHECK(check_traces(f, g, kRef).pass);

                    // equivalent-norm sandwich
                    const double v2 = inner_V(f, f, g, kRef).real();
                    const double vs2 = norm_V_sharp_sq(f, g, kRef);
                    const double ceq = equivalent_norm_constant(kRef);
                    CHECK(v2 <= vs2 * (1.0 + 1e-12));
                    CHECK(vs2 <= ceq * v2 * (1.0 + 1e-12));
                }
    CHECK(count == 24);
}

TEST_CASE("inner_V requires partials") {
    const auto g = QuadratureGrid::for_weight(kRef, 8, 8);
    WeightedFunction f;
    f.value = [](double, double) { return Complex(1.0, 0.0); };
    CHECK_THROWS_AS(inner_V(f, f, g, kRef), std::invalid_argument);
}
