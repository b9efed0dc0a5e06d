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

#include "hestonpde/oracle.hpp"

#include <cmath>
#include <complex>
#include <atomic>
#include <fstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "hestonpde/quadrature.hpp"

namespace heston {

McConfig McConfig::from_json(const nlohmann::json& j) {
    McConfig c;
    c.paths = j.value("paths", std::int64_t(100000));
    c.steps = j.value("steps", 100);
    c.seed = j.value("seed", std::uint64_t(1234));
    c.antithetic = j.value("antithetic", true);
    c.threads = j.value("threads", 0);
    return c;
}

nlohmann::json McConfig::to_json() const {
    return {{"paths", paths}, {"steps", steps}, {"seed", seed},
            {"antithetic", antithetic}, {"threads", threads}};
}

nlohmann::json McEstimate::to_json() const {
    return {{"price", price}, {"std_error", std_error}, {"paths", paths}};
}

namespace {

// splitmix64: the per-path stream is a pure function of (seed, path, counter),
// which keeps serial and parallel runs bit-identical.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct PathRng {
    std::uint64_t state;
    bool have_spare = false;
    double spare = 0.0;

    PathRng(std::uint64_t seed, std::uint64_t path) {
        state = seed ^ (path * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
        // warm up the mix
        std::uint64_t s = state;
        state = splitmix64(s) ^ (s << 1);
    }
    double uniform() {
        // 53-bit mantissa in (0, 1)
        return ((splitmix64(state) >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }
    double normal() {
        if (have_spare) {
            have_spare = false;
            return spare;
        }
        const double u1 = uniform(), u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare = r * std::sin(a);
        have_spare = true;
        return r * std::cos(a);
    }
};

struct PathResult {
    double sum = 0.0;
    double sumsq = 0.0;
};

} // namespace

namespace {

struct McKernel {
    const ModelParams& m;
    const McConfig& cfg;
    const std::function<double(double)>& payoff_of_s;
    double x0, v0, dt, sdt, rho2, qr;

    McKernel(const ModelParams& mm, double s0, double vv0,
             const std::function<double(double)>& f, const McConfig& c)
        : m(mm), cfg(c), payoff_of_s(f), v0(vv0) {
        dt = m.maturity / cfg.steps;
        sdt = std::sqrt(dt);
        rho2 = std::sqrt(1.0 - m.rho * m.rho);
        x0 = std::log(s0 / m.strike);
        qr = m.q - m.r;
    }

    // full-truncation Euler on one stream of draws; flip negates the normals
    double run_path(PathRng& rng, double flip) const {
        double x = x0, v = v0;
        for (int k = 0; k < cfg.steps; ++k) {
            const double z1 = flip * rng.normal();
            const double z2 = flip * rng.normal();
            const double vp = std::max(v, 0.0);
            const double sq = std::sqrt(vp);
            const double dw = sdt * z1;
            const double dz = sdt * (m.rho * z1 + rho2 * z2);
            x += -(qr + 0.5 * vp) * dt + sq * dw;
            v += m.kappa * (m.theta - vp) * dt + m.sigma * sq * dz;
        }
        return payoff_of_s(m.strike * std::exp(x));
    }

    double sample(std::int64_t i) const {
        if (cfg.antithetic) {
            PathRng rng_a(cfg.seed, static_cast<std::uint64_t>(i));
            PathRng rng_b(cfg.seed, static_cast<std::uint64_t>(i));
            return 0.5 * (run_path(rng_a, 1.0) + run_path(rng_b, -1.0));
        }
        PathRng rng(cfg.seed, static_cast<std::uint64_t>(i));
        return run_path(rng, 1.0);
    }
};

} // namespace

McEstimate mc_expectation(const ModelParams& m, double s0, double v0,
                          const std::function<double(double)>& payoff_of_s,
                          const McConfig& cfg, bool discount) {
    if (!(cfg.paths > 0) || !(cfg.steps > 0))
        throw std::invalid_argument("mc: paths and steps must be positive");
    if (!(s0 > 0) || !(v0 > 0))
        throw std::invalid_argument("mc: s0 and v0 must be positive");
    m.check();

    const double disc = discount ? std::exp(-m.r * m.maturity) : 1.0;
    const McKernel kernel(m, s0, v0, payoff_of_s, cfg);
    const std::int64_t nsamples = cfg.antithetic ? cfg.paths / 2 : cfg.paths;
    auto run_chunk = [&](std::int64_t lo, std::int64_t hi) {
        PathResult acc;
        for (std::int64_t i = lo; i < hi; ++i) {
            const double sample = kernel.sample(i);
            acc.sum += sample;
            acc.sumsq += sample * sample;
        }
        return acc;
    };

    // Fixed chunk size and index-ordered reduction: the arithmetic is the
    // same no matter how many workers execute the chunks.
    constexpr std::int64_t kChunk = 8192;
    const std::int64_t nchunks = (nsamples + kChunk - 1) / kChunk;
    std::vector<PathResult> partial(nchunks);
    std::atomic<std::int64_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::int64_t c = next.fetch_add(1);
            if (c >= nchunks) return;
            partial[c] = run_chunk(c * kChunk,
                                   std::min(nsamples, (c + 1) * kChunk));
        }
    };
    int nthreads = cfg.threads > 0
                       ? cfg.threads
                       : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(nchunks)));
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    PathResult total;
    for (const PathResult& r : partial) {
        total.sum += r.sum;
        total.sumsq += r.sumsq;
    }

    McEstimate est;
    est.paths = cfg.paths;
    const double n = static_cast<double>(nsamples);
    const double mean = total.sum / n;
    const double var = std::max(0.0, (total.sumsq - n * mean * mean) / (n - 1.0));
    est.price = disc * mean;
    est.std_error = disc * std::sqrt(var / n);
    return est;
}

McEstimate mc_price(const ModelParams& m, double s0, double v0,
                    const Payoff& payoff, const McConfig& cfg) {
    const double k = m.strike;
    return mc_expectation(
        m, s0, v0,
        [&payoff, k](double s) { return payoff(std::log(s / k)); }, cfg, true);
}

void mc_dump_paths(const ModelParams& m, double s0, double v0,
                   const Payoff& payoff, const McConfig& cfg, std::int64_t n,
                   const std::string& path) {
    m.check();
    const double k = m.strike;
    const std::function<double(double)> f = [&payoff, k](double s) {
        return payoff(std::log(s / k));
    };
    const McKernel kernel(m, s0, v0, f, cfg);
    const double disc = std::exp(-m.r * m.maturity);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "sample,payoff\n";
    out.precision(17);
    const std::int64_t nsamples = cfg.antithetic ? cfg.paths / 2 : cfg.paths;
    for (std::int64_t i = 0; i < std::min(n, nsamples); ++i)
        out << i << "," << disc * kernel.sample(i) << "\n";
}

namespace {

// integrand of the j-th Heston probability; trap-safe branch handling
struct CfIntegrand {
    double kappa_eff, a, b, sigma, rho, r, q, T, x0, lnK, v0, u;

    double operator()(double phi) const {
        const Complex i(0.0, 1.0);
        const Complex ib = b - rho * sigma * i * phi;
        const Complex d =
            std::sqrt(ib * ib - sigma * sigma * (2.0 * u * i * phi - phi * phi));
        const Complex g = (ib - d) / (ib + d);
        const Complex ee = std::exp(-d * T);
        const Complex C = (r - q) * i * phi * T +
                          a / (sigma * sigma) *
                              ((ib - d) * T -
                               2.0 * std::log((1.0 - g * ee) / (1.0 - g)));
        const Complex D = (ib - d) / (sigma * sigma) * (1.0 - ee) / (1.0 - g * ee);
        const Complex f = std::exp(C + D * v0 + i * phi * x0);
        return (std::exp(-i * phi * lnK) * f / (i * phi)).real();
    }
};

double heston_probability(const CfIntegrand& integrand) {
    std::vector<double> gx, gw;
    gauss_legendre(32, gx, gw);
    // keep at least ~6 quadrature points per oscillation of e^{i phi (x0-lnK)}
    const double freq = std::max(std::abs(integrand.x0 - integrand.lnK), 0.2);
    const double max_width = 32.0 * (2.0 * M_PI / freq) / 6.0;
    double total = 0.0;
    double lo = 0.0, width = std::min(5.0, max_width);
    const double eps_phi = 1e-10;
    int quiet = 0;
    for (int panel = 0; panel < 4000; ++panel) {
        const double hi = lo + width;
        double acc = 0.0;
        for (std::size_t k = 0; k < gx.size(); ++k) {
            const double phi =
                std::max(eps_phi, 0.5 * (hi - lo) * gx[k] + 0.5 * (hi + lo));
            acc += 0.5 * (hi - lo) * gw[k] * integrand(phi);
        }
        total += acc;
        lo = hi;
        quiet = std::abs(acc) < 1e-13 * (std::abs(total) + 1.0) ? quiet + 1 : 0;
        if (panel > 4 && quiet >= 2) return 0.5 + total / M_PI;
        if (panel > 8) width = std::min(width * 1.3, max_width);
    }
    throw std::runtime_error(
        "closed_form_price: characteristic-function integral did not converge "
        "(tail at phi = " +
        std::to_string(lo) + " still contributes)");
}

} // namespace

double closed_form_price(const ModelParams& m, double s0, double v0, bool call) {
    m.check();
    if (!(s0 > 0) || !(v0 > 0))
        throw std::invalid_argument("closed_form_price: s0, v0 must be positive");
    const double ks = m.kappa + m.lambda; // risk-adjusted reversion
    CfIntegrand base{};
    base.a = m.kappa * m.theta;
    base.sigma = m.sigma;
    base.rho = m.rho;
    base.r = m.r;
    base.q = m.q;
    base.T = m.maturity;
    base.x0 = std::log(s0);
    base.lnK = std::log(m.strike);
    base.v0 = v0;

    CfIntegrand i1 = base;
    i1.u = 0.5;
    i1.b = ks - m.rho * m.sigma;
    CfIntegrand i2 = base;
    i2.u = -0.5;
    i2.b = ks;

    const double p1 = heston_probability(i1);
    const double p2 = heston_probability(i2);
    const double c = s0 * std::exp(-m.q * m.maturity) * p1 -
                     m.strike * std::exp(-m.r * m.maturity) * p2;
    if (call) return c;
    return c - s0 * std::exp(-m.q * m.maturity) +
           m.strike * std::exp(-m.r * m.maturity);
}

double black_scholes_price(double s0, double strike, double r, double q,
                           double variance, double maturity, bool call) {
    if (!(variance > 0) || !(maturity > 0)) {
        const double fwd = s0 * std::exp((r - q) * maturity);
        const double intrinsic =
            call ? std::max(fwd - strike, 0.0) : std::max(strike - fwd, 0.0);
        return std::exp(-r * maturity) * intrinsic;
    }
    const double sd = std::sqrt(variance * maturity);
    const double d1 =
        (std::log(s0 / strike) + (r - q + 0.5 * variance) * maturity) / sd;
    const double d2 = d1 - sd;
    auto ncdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    const double c = s0 * std::exp(-q * maturity) * ncdf(d1) -
                     strike * std::exp(-r * maturity) * ncdf(d2);
    if (call) return c;
    return c - s0 * std::exp(-q * maturity) + strike * std::exp(-r * maturity);
}

} // namespace heston
