#include "yamabe/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace yamabe {

std::string_view to_string(SolutionClass c) {
    switch (c) {
    case SolutionClass::ConstantOne: return "constant-one";
    case SolutionClass::Subsolution: return "subsolution";
    case SolutionClass::Supersolution: return "supersolution";
    case SolutionClass::Indeterminate: return "indeterminate";
    }
    return "unknown";
}

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::Complete: return "complete";
    case Verdict::Incomplete: return "incomplete";
    case Verdict::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

Classification classify(const RadialSolution& sol, double eq_tol) {
    if (sol.samples.size() < 2)
        throw std::invalid_argument("classify: need at least 2 samples");

    double sup_dev = 0.0;
    for (const Sample& s : sol.samples) sup_dev = std::max(sup_dev, std::abs(s.u - 1.0));
    if (sup_dev <= eq_tol) return {SolutionClass::ConstantOne, 0.0};

    const auto& ss = sol.samples;
    const Sample& last = ss.back();
    const bool sub = last.u < 1.0 && last.du < 0.0;
    const bool sup = last.u > 1.0 && last.du > 0.0;
    if (!sub && !sup)
        return {SolutionClass::Indeterminate, std::numeric_limits<double>::quiet_NaN()};

    auto matches = [&](const Sample& s) {
        return sub ? (s.u < 1.0 && s.du < 0.0) : (s.u > 1.0 && s.du > 0.0);
    };
    std::size_t first = ss.size() - 1;
    while (first > 0 && ss[first - 1].r > 0.0 && matches(ss[first - 1])) --first;
    return {sub ? SolutionClass::Subsolution : SolutionClass::Supersolution, ss[first].r};
}

DecayFit decay_fit(const RadialSolution& sol, double r_lo, double r_hi) {
    if (!(r_lo < r_hi))
        throw std::invalid_argument("decay_fit: need r_lo < r_hi");
    const Classification cls = classify(sol);
    if (cls.cls != SolutionClass::Subsolution)
        throw std::domain_error("decay_fit: solution does not classify as a subsolution");

    std::vector<double> rs, ys;
    for (const Sample& s : sol.samples) {
        if (s.r < r_lo || s.r > r_hi) continue;
        if (!(s.u > 0.0)) continue;
        rs.push_back(s.r);
        ys.push_back(std::log(s.u));
    }
    if (rs.size() < 8)
        throw std::invalid_argument("decay_fit: fewer than 8 samples in the window");

    const double n = static_cast<double>(rs.size());
    double rbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        rbar += rs[i];
        ybar += ys[i];
    }
    rbar /= n;
    ybar /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        sxx += (rs[i] - rbar) * (rs[i] - rbar);
        sxy += (rs[i] - rbar) * (ys[i] - ybar);
    }
    const double slope = sxy / sxx;
    const double intercept = ybar - slope * rbar;
    double ss = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const double resid = ys[i] - (intercept + slope * rs[i]);
        ss += resid * resid;
    }
    DecayFit fit;
    fit.c = -slope;
    fit.C_tilde = std::exp(intercept);
    fit.r_lo = r_lo;
    fit.r_hi = r_hi;
    fit.rms_log_residual = std::sqrt(ss / n);
    fit.n_points = static_cast<int>(rs.size());
    return fit;
}

bool fit_usable_for_tail(const DecayFit& fit) {
    return fit.c > 0.0 && fit.rms_log_residual <= 0.05 &&
           fit.c * (fit.r_hi - fit.r_lo) >= 1.0;
}

CompletenessReport conformal_length(const RadialSolution& sol,
                                    const std::optional<DecayFit>& fit) {
    if (sol.samples.empty())
        throw std::invalid_argument("conformal_length: empty sample list");

    const double q = 2.0 / (sol.params.n - 2);
    double length = 0.0;
    for (std::size_t i = 1; i < sol.samples.size(); ++i) {
        const Sample& a = sol.samples[i - 1];
        const Sample& b = sol.samples[i];
        length += 0.5 * (std::pow(a.u, q) + std::pow(b.u, q)) * (b.r - a.r);
    }

    CompletenessReport rep;
    rep.length_numeric = length;
    const Classification cls = classify(sol);

    if (cls.cls == SolutionClass::ConstantOne) {
        // the tail integrand is 1; the ray has infinite conformal length
        rep.length_total = std::numeric_limits<double>::infinity();
        rep.verdict = Verdict::Complete;
        return rep;
    }
    if (cls.cls == SolutionClass::Supersolution &&
        sol.termination == Termination::ReachedRmax) {
        // u increased past 1 through the whole ray: bounded below, so the
        // remaining tail grows at least linearly
        rep.length_total = std::numeric_limits<double>::infinity();
        rep.verdict = Verdict::Complete;
        return rep;
    }
    if (cls.cls == SolutionClass::Subsolution && fit && fit_usable_for_tail(*fit)) {
        const double R = sol.samples.back().r;
        const double qc = q * fit->c;
        const double tail = std::pow(fit->C_tilde, q) * std::exp(-qc * R) / qc;
        rep.tail_rate = fit->c;
        rep.length_total = length + tail;
        rep.verdict = Verdict::Incomplete;
        return rep;
    }
    rep.length_total = length;  // known lower bound only
    rep.verdict = Verdict::Inconclusive;
    return rep;
}

namespace {

// Composite Simpson with panel doubling until two consecutive refinements
// agree to a relative 1e-12.
double simpson_converged(const std::function<double(double)>& fn, double a, double b) {
    const int max_doublings = 22;
    long n = 8;
    auto simpson = [&](long panels) {
        const double h = (b - a) / static_cast<double>(panels);
        double acc = fn(a) + fn(b);
        for (long i = 1; i < panels; ++i)
            acc += fn(a + i * h) * ((i % 2) ? 4.0 : 2.0);
        return acc * h / 3.0;
    };
    double prev = simpson(n);
    for (int d = 0; d < max_doublings; ++d) {
        n *= 2;
        const double cur = simpson(n);
        if (!std::isfinite(cur))
            throw std::runtime_error("quadrature failure: integrand not finite");
        if (std::abs(cur - prev) <= 1e-12 * std::max(1e-300, std::abs(cur)))
            return cur;
        prev = cur;
    }
    throw std::runtime_error("quadrature failure: no convergence");
}

} // namespace

double integral_ratio_check(const WarpingFunction& w, const ModelParams& params,
                            double r_prime, double r) {
    if (!(r_prime > 0.0) || !(r > r_prime))
        throw std::invalid_argument("integral_ratio_check: need 0 < r' < r");
    const double nm1 = params.n - 1;
    const std::function<double(double)> fn = [&](double s) {
        return std::pow(w.eval(s).f, nm1);
    };
    const double denom = std::pow(w.eval(r).f, nm1);
    if (!std::isfinite(denom) || !(denom > 0.0))
        throw std::runtime_error("integral_ratio_check: f^(n-1)(r) not positive finite");
    return simpson_converged(fn, r_prime, r) / denom;
}

BarrierFit barrier_fit(const RadialSolution& sol) {
    if (sol.samples.empty())
        throw std::invalid_argument("barrier_fit: empty sample list");
    const double u0 = sol.samples.front().u;
    if (!(u0 < 1.0))
        throw std::domain_error("barrier_fit: requires u(0) < 1");
    for (const Sample& s : sol.samples)
        if (s.u > 1.0 + 1e-12)
            throw std::domain_error("barrier_fit: requires u <= 1 on the data");

    // violation of u <= 1 - a e^(-C r); the r = 0 term is exactly a - (1 - u0)
    auto max_violation = [&](double a, double C) {
        double worst = -std::numeric_limits<double>::infinity();
        for (const Sample& s : sol.samples)
            worst = std::max(worst, s.u - 1.0 + a * std::exp(-C * s.r));
        return worst;
    };

    BarrierFit best;
    best.max_violation = std::numeric_limits<double>::infinity();
    double a = 1.0 - u0;
    for (int halving = 0; halving <= 20; ++halving) {
        for (int j = 0; j <= 120; ++j) {
            const double C = std::pow(10.0, -3.0 + 0.05 * j);
            const double viol = max_violation(a, C);
            if (viol < best.max_violation) {
                best.a = a;
                best.C = C;
                best.max_violation = viol;
            }
            if (viol <= 0.0) return best;
        }
        a *= 0.5;
    }
    return best;
}

namespace {

SweepRow run_row(const ModelParams& params, const WarpingFunction& w, double u0,
                 const OdeConfig& cfg, const SweepOptions& opts) {
    SweepRow row;
    row.u0 = u0;
    try {
        const RadialSolution sol = integrate(params, w, u0, cfg);
        row.termination = sol.termination;
        row.r_stop = sol.r_stop;
        row.classification = classify(sol, opts.eq_tol);
        if (row.classification.cls == SolutionClass::Subsolution) {
            const double R = sol.samples.back().r;
            try {
                row.fit = decay_fit(sol, opts.fit_lo_frac * R, opts.fit_hi_frac * R);
            } catch (const std::exception&) {
                // window too short or too few samples: report without a fit
            }
        }
        row.completeness = conformal_length(sol, row.fit);
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

} // namespace

std::vector<SweepRow> sweep_serial(const ModelParams& params, const WarpingFunction& w,
                                   std::span<const double> u0_grid, const OdeConfig& cfg,
                                   const SweepOptions& opts) {
    std::vector<SweepRow> rows(u0_grid.size());
    for (std::size_t i = 0; i < u0_grid.size(); ++i)
        rows[i] = run_row(params, w, u0_grid[i], cfg, opts);
    return rows;
}

std::vector<SweepRow> sweep(const ModelParams& params, const WarpingFunction& w,
                            std::span<const double> u0_grid, const OdeConfig& cfg,
                            const SweepOptions& opts) {
    std::vector<SweepRow> rows(u0_grid.size());
    const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(u0_grid.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i)
        rows[i] = run_row(params, w, u0_grid[i], cfg, opts);
    return rows;
}

} // namespace yamabe
