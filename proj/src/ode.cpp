#include "yamabe/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace yamabe {

void validate(const OdeConfig& cfg) {
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
        throw std::invalid_argument("ode config: tolerances must be positive");
    if (!(cfg.series_radius > 0.0) || !(cfg.series_radius < cfg.r_max))
        throw std::invalid_argument("ode config: need 0 < series_radius < r_max");
    if (!(cfg.blowup_threshold > 1.0))
        throw std::invalid_argument("ode config: blowup_threshold must exceed 1");
    if (!(cfg.underflow_threshold > 0.0) || !(cfg.underflow_threshold < 1.0))
        throw std::invalid_argument("ode config: underflow_threshold must lie in (0, 1)");
    if (cfg.max_steps < 1)
        throw std::invalid_argument("ode config: max_steps must be positive");
    if (!(cfg.min_step > 0.0))
        throw std::invalid_argument("ode config: min_step must be positive");
    if (!(cfg.out_step > 0.0))
        throw std::invalid_argument("ode config: out_step must be positive");
    if (!(cfg.out_geometric_ratio > 1.0))
        throw std::invalid_argument("ode config: out_geometric_ratio must exceed 1");
}

std::string_view to_string(Termination t) {
    switch (t) {
    case Termination::ReachedRmax: return "reached-rmax";
    case Termination::BlowUp: return "blow-up";
    case Termination::Underflow: return "underflow";
    case Termination::StepFailure: return "step-failure";
    }
    return "unknown";
}

Termination termination_from_string(std::string_view s) {
    if (s == "reached-rmax") return Termination::ReachedRmax;
    if (s == "blow-up") return Termination::BlowUp;
    if (s == "underflow") return Termination::Underflow;
    if (s == "step-failure") return Termination::StepFailure;
    throw std::invalid_argument("unknown termination: " + std::string(s));
}

OdeState series_start(const ModelParams& params, double u0, double r_eps) {
    if (!(u0 > 0.0)) throw std::domain_error("series_start: u0 must be positive");
    if (!(r_eps > 0.0)) throw std::domain_error("series_start: r_eps must be positive");
    const double s = params.c_n * (std::pow(u0, params.p) - u0);
    OdeState st;
    st.r = r_eps;
    st.u = u0 + s / (2.0 * params.n) * r_eps * r_eps;
    st.du = s / params.n * r_eps;
    return st;
}

namespace {

// Sample grid: geometric from series_radius up to min(1, r_max), then uniform
// with out_step; always ends exactly at r_max.
std::vector<double> output_grid(const OdeConfig& cfg) {
    std::vector<double> rs;
    rs.push_back(cfg.series_radius);
    const double knee = std::min(1.0, cfg.r_max);
    double r = cfg.series_radius;
    while (r * cfg.out_geometric_ratio < knee * (1.0 - 1e-12)) {
        r *= cfg.out_geometric_ratio;
        rs.push_back(r);
    }
    if (cfg.r_max <= 1.0) {
        rs.push_back(cfg.r_max);
        return rs;
    }
    rs.push_back(1.0);
    for (long i = 1;; ++i) {
        const double v = 1.0 + i * cfg.out_step;
        // keep the final interval at least half a step wide
        if (v >= cfg.r_max - 0.5 * cfg.out_step) break;
        rs.push_back(v);
    }
    rs.push_back(cfg.r_max);
    return rs;
}

struct State2 {
    double u, du;
};

// Dormand-Prince 5(4) coefficients.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
// b - b_hat, for the embedded error estimate (7 stages, FSAL).
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;

} // namespace

RadialSolution integrate(const ModelParams& params, const WarpingFunction& w,
                         double u0, const OdeConfig& cfg) {
    if (!(u0 > 0.0)) throw std::domain_error("integrate: u0 must be positive");
    validate(cfg);
    if (cfg.r_max > w.r_limit())
        throw std::out_of_range("integrate: r_max past end of warp table");

    RadialSolution sol;
    sol.params = params;
    sol.warp_name = w.name();
    sol.u0 = u0;
    sol.rel_tol = cfg.rel_tol;
    sol.abs_tol = cfg.abs_tol;
    sol.samples.push_back({0.0, u0, 0.0});

    const std::vector<double> grid = output_grid(cfg);

    // The constant solution is an exact equilibrium; report it directly
    // instead of drifting off the unstable manifold.
    if (u0 == 1.0) {
        for (double r : grid) sol.samples.push_back({r, 1.0, 0.0});
        sol.termination = Termination::ReachedRmax;
        sol.r_stop = cfg.r_max;
        return sol;
    }

    const double c_n = params.c_n, p = params.p, n1 = params.n - 1;
    auto rhs = [&](double r, State2 y) -> State2 {
        const WarpEval e = w.eval(r);
        return {y.du, c_n * (std::pow(y.u, p) - y.u) - n1 * e.df / e.f * y.du};
    };

    OdeState start = series_start(params, u0, cfg.series_radius);
    double r = start.r;
    State2 y{start.u, start.du};
    sol.samples.push_back({r, y.u, y.du});

    auto finish = [&](Termination t, double r_stop) {
        if (r > sol.samples.back().r) sol.samples.push_back({r, y.u, y.du});
        sol.termination = t;
        sol.r_stop = r_stop;
    };

    State2 k1 = rhs(r, y);
    double h = std::min(1e-4, grid[1] - grid[0]);
    double facold = 1e-4;
    std::size_t next = 1;  // grid[0] already recorded

    while (true) {
        if (sol.n_steps + sol.n_rejected >= cfg.max_steps) {
            finish(Termination::StepFailure, r);
            return sol;
        }
        const double target = grid[next];
        bool hit = false;
        if (r + h >= target) {
            h = target - r;
            hit = true;
        }

        const State2 k2 = rhs(r + C2 * h, {y.u + h * A21 * k1.u, y.du + h * A21 * k1.du});
        const State2 k3 = rhs(r + C3 * h, {y.u + h * (A31 * k1.u + A32 * k2.u),
                                           y.du + h * (A31 * k1.du + A32 * k2.du)});
        const State2 k4 = rhs(r + C4 * h,
                              {y.u + h * (A41 * k1.u + A42 * k2.u + A43 * k3.u),
                               y.du + h * (A41 * k1.du + A42 * k2.du + A43 * k3.du)});
        const State2 k5 = rhs(r + C5 * h,
                              {y.u + h * (A51 * k1.u + A52 * k2.u + A53 * k3.u + A54 * k4.u),
                               y.du + h * (A51 * k1.du + A52 * k2.du + A53 * k3.du + A54 * k4.du)});
        const State2 k6 = rhs(r + h,
                              {y.u + h * (A61 * k1.u + A62 * k2.u + A63 * k3.u + A64 * k4.u +
                                          A65 * k5.u),
                               y.du + h * (A61 * k1.du + A62 * k2.du + A63 * k3.du + A64 * k4.du +
                                           A65 * k5.du)});
        const State2 ynew{
            y.u + h * (B1 * k1.u + B3 * k3.u + B4 * k4.u + B5 * k5.u + B6 * k6.u),
            y.du + h * (B1 * k1.du + B3 * k3.du + B4 * k4.du + B5 * k5.du + B6 * k6.du)};
        const State2 k7 = rhs(r + h, ynew);

        const double eu =
            h * (E1 * k1.u + E3 * k3.u + E4 * k4.u + E5 * k5.u + E6 * k6.u + E7 * k7.u);
        const double edu =
            h * (E1 * k1.du + E3 * k3.du + E4 * k4.du + E5 * k5.du + E6 * k6.du + E7 * k7.du);
        const double scu = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y.u), std::abs(ynew.u));
        const double scdu = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y.du), std::abs(ynew.du));
        double err = std::sqrt(0.5 * ((eu / scu) * (eu / scu) + (edu / scdu) * (edu / scdu)));
        if (!std::isfinite(err) || !std::isfinite(ynew.u) || !std::isfinite(ynew.du))
            err = 1e10;

        if (err <= 1.0) {
            // accepted; PI controller for the next step
            sol.n_steps++;
            sol.accumulated_error += std::abs(eu);
            r = hit ? target : r + h;
            y = ynew;
            k1 = k7;  // FSAL

            const double fac11 = std::pow(std::max(err, 1e-16), 0.17);
            double fac = fac11 / std::pow(facold, 0.04);
            fac = std::max(0.2, std::min(5.0, fac / 0.9));
            h = h / fac;
            facold = std::max(err, 1e-4);

            if (!(y.u > 0.0) || y.u < cfg.underflow_threshold) {
                finish(Termination::Underflow, r);
                return sol;
            }
            if (y.u > cfg.blowup_threshold) {
                finish(Termination::BlowUp, r);
                return sol;
            }
            if (hit) {
                sol.samples.push_back({r, y.u, y.du});
                next++;
                if (next == grid.size()) {
                    sol.termination = Termination::ReachedRmax;
                    sol.r_stop = cfg.r_max;
                    return sol;
                }
            }
        } else {
            sol.n_rejected++;
            const double fac11 = std::pow(err, 0.17);
            h = h / std::min(10.0, std::max(fac11 / 0.9, 1.0));
        }
        if (h < cfg.min_step) {
            finish(Termination::StepFailure, r);
            return sol;
        }
    }
}

std::pair<double, double> solution_at(const RadialSolution& sol, double r) {
    if (sol.samples.empty()) throw std::out_of_range("solution_at: empty solution");
    if (r < 0.0 || r > sol.samples.back().r)
        throw std::out_of_range("solution_at: r outside the sampled range");
    const auto cmp = [](const Sample& s, double x) { return s.r < x; };
    auto it = std::lower_bound(sol.samples.begin(), sol.samples.end(), r, cmp);
    if (it != sol.samples.end() && it->r == r) return {it->u, it->du};
    const Sample& s1 = *it;
    const Sample& s0 = *(it - 1);
    const double h = s1.r - s0.r;
    const double t = (r - s0.r) / h;
    const double h00 = (2 * t - 3) * t * t + 1, h10 = ((t - 2) * t + 1) * t;
    const double h01 = (3 - 2 * t) * t * t, h11 = (t - 1) * t * t;
    const double g00 = 6 * t * t - 6 * t, g10 = 3 * t * t - 4 * t + 1;
    const double g01 = 6 * t - 6 * t * t, g11 = 3 * t * t - 2 * t;
    const double u = h00 * s0.u + h01 * s1.u + h * (h10 * s0.du + h11 * s1.du);
    const double du = (g00 * s0.u + g01 * s1.u) / h + g10 * s0.du + g11 * s1.du;
    return {u, du};
}

RadialSolution solution_from_samples(const ModelParams& params, std::string warp_name,
                                     double u0, std::vector<Sample> samples,
                                     Termination termination, double r_stop) {
    if (samples.size() < 2)
        throw std::invalid_argument("solution_from_samples: need at least 2 samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i].u > 0.0))
            throw std::invalid_argument("solution_from_samples: u must be positive");
        if (i > 0 && !(samples[i].r > samples[i - 1].r))
            throw std::invalid_argument("solution_from_samples: r must be strictly increasing");
    }
    if (samples.front().r != 0.0)
        throw std::invalid_argument("solution_from_samples: samples must start at r = 0");
    RadialSolution sol;
    sol.params = params;
    sol.warp_name = std::move(warp_name);
    sol.u0 = u0;
    sol.samples = std::move(samples);
    sol.termination = termination;
    sol.r_stop = r_stop;
    return sol;
}

} // namespace yamabe
