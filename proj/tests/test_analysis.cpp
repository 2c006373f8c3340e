#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "yamabe/analysis.hpp"
#include "yamabe/closed_forms.hpp"
#include "yamabe/ode.hpp"

using namespace yamabe;

namespace {

RadialSolution family_run(int n, double b, double r_max) {
    const ModelParams m = model_params(n);
    OdeConfig cfg;
    cfg.r_max = r_max;
    return integrate(m, WarpingFunction::scaled_hyperbolic(n), std::pow(b, -0.5 * (n - 2)), cfg);
}

// synthetic profile u(r) = 1 - a e^(-C r)
RadialSolution barrier_profile(double a, double C, double r_max, double step) {
    const ModelParams m = model_params(3);
    std::vector<Sample> samples;
    for (double r = 0.0; r <= r_max + 1e-12; r += step)
        samples.push_back({r, 1.0 - a * std::exp(-C * r), a * C * std::exp(-C * r)});
    return solution_from_samples(m, "synthetic", samples.front().u, std::move(samples),
                                 Termination::ReachedRmax, r_max);
}

double exact_length(int n, double b) {
    return std::sqrt(static_cast<double>(n) * (n - 1)) * std::log((b + 1.0) / (b - 1.0));
}

} // namespace

TEST_CASE("classification of the three branches") {
    const RadialSolution one = family_run(3, 1.0, 15.0);
    const Classification c1 = classify(one);
    CHECK(c1.cls == SolutionClass::ConstantOne);
    CHECK(c1.witness_r == 0.0);

    const RadialSolution sub = family_run(3, 2.0, 15.0);
    const Classification c2 = classify(sub);
    CHECK(c2.cls == SolutionClass::Subsolution);
    CHECK(c2.witness_r == sub.samples[1].r);  // pattern holds from the first positive sample

    const ModelParams m3 = model_params(3);
    OdeConfig cfg;
    cfg.r_max = 20.0;
    const RadialSolution sup = integrate(m3, WarpingFunction::scaled_hyperbolic(3), 1.05, cfg);
    const Classification c3 = classify(sup);
    CHECK(c3.cls == SolutionClass::Supersolution);
    CHECK(c3.witness_r == sup.samples[1].r);

    // below 1 but increasing: matches neither sign pattern
    const RadialSolution synth = barrier_profile(0.5, 2.0, 15.0, 0.05);
    CHECK(classify(synth).cls == SolutionClass::Indeterminate);
}

TEST_CASE("decay fit recovers an exact exponential") {
    const ModelParams m3 = model_params(3);
    std::vector<Sample> samples;
    const double c = 0.31, C = 0.9;
    for (double r = 0.0; r <= 20.0 + 1e-12; r += 0.1)
        samples.push_back({r, C * std::exp(-c * r), -c * C * std::exp(-c * r)});
    const RadialSolution sol = solution_from_samples(m3, "synthetic", C, samples,
                                                     Termination::ReachedRmax, 20.0);
    const DecayFit fit = decay_fit(sol, 5.0, 15.0);
    CHECK(fit.c == doctest::Approx(c).epsilon(1e-12));
    CHECK(fit.C_tilde == doctest::Approx(C).epsilon(1e-12));
    CHECK(fit.rms_log_residual <= 1e-12);
    CHECK(fit.n_points >= 8);
    CHECK(fit_usable_for_tail(fit));
}

TEST_CASE("decay fit preconditions") {
    const RadialSolution one = family_run(3, 1.0, 15.0);
    CHECK_THROWS_AS(decay_fit(one, 5.0, 12.0), std::domain_error);

    const RadialSolution sub = family_run(3, 2.0, 15.0);
    CHECK_THROWS_AS(decay_fit(sub, 14.9, 14.99), std::invalid_argument);  // too few samples
    CHECK_THROWS_AS(decay_fit(sub, 12.0, 5.0), std::invalid_argument);
    CHECK_NOTHROW(decay_fit(sub, 8.0, 14.0));
}

TEST_CASE("conformal length of the constant solution") {
    const RadialSolution one = family_run(3, 1.0, 20.0);
    const CompletenessReport rep = conformal_length(one, std::nullopt);
    CHECK(rep.length_numeric == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(std::isinf(rep.length_total));
    CHECK(rep.verdict == Verdict::Complete);
}

TEST_CASE("closed-form length formula against the quadrature oracle") {
    // length = integral of u_b^(2/(n-2)) dr = k ln((b+1)/(b-1)); the
    // substitution rho = tanh(r/2k) turns it into 2kb / (b^2 - rho^2)
    for (int n : {3, 4}) {
        const double k = std::sqrt(static_cast<double>(n) * (n - 1));
        for (double b : {2.0, 3.0, 5.0}) {
            const double quad = oracles::simpson(
                [&](double rho) { return 2.0 * k * b / (b * b - rho * rho); }, 0.0,
                1.0 - 1e-12);
            CHECK(quad == doctest::Approx(exact_length(n, b)).epsilon(1e-9));
        }
    }
    CHECK(exact_length(3, 2) == doctest::Approx(2.69087).epsilon(1e-5));
    CHECK(exact_length(4, 3) == doctest::Approx(2.40190).epsilon(1e-5));
}

TEST_CASE("conformal length of family members matches the closed form") {
    for (int n : {3, 4}) {
        for (double b : {2.0, 3.0, 5.0}) {
            const RadialSolution sol = family_run(n, b, 15.0);
            const double R = sol.samples.back().r;
            const DecayFit fit = decay_fit(sol, 0.55 * R, 0.95 * R);
            const CompletenessReport rep = conformal_length(sol, fit);
            CHECK(rep.verdict == Verdict::Incomplete);
            const double expect = exact_length(n, b);
            CHECK(std::abs(rep.length_total - expect) <= 0.01 * expect);
            CHECK(rep.length_total >= rep.length_numeric);
        }
    }
}

TEST_CASE("blow-up and truncated supersolutions") {
    const ModelParams m3 = model_params(3);
    const WarpingFunction hy = WarpingFunction::scaled_hyperbolic(3);
    OdeConfig cfg;
    cfg.r_max = 20.0;
    const RadialSolution burst = integrate(m3, hy, 1.5, cfg);
    CHECK(burst.termination == Termination::BlowUp);
    const CompletenessReport rep = conformal_length(burst, std::nullopt);
    CHECK(rep.verdict == Verdict::Inconclusive);
    CHECK(rep.length_total == rep.length_numeric);

    // a supersolution that reaches r_max is bounded below by u(witness) > 1
    OdeConfig shallow;
    shallow.r_max = 10.0;
    const RadialSolution slow = integrate(m3, hy, 1.0 + 1e-6, shallow);
    CHECK(slow.termination == Termination::ReachedRmax);
    CHECK(classify(slow).cls == SolutionClass::Supersolution);
    const CompletenessReport rep2 = conformal_length(slow, std::nullopt);
    CHECK(rep2.verdict == Verdict::Complete);
    CHECK(std::isinf(rep2.length_total));
}

TEST_CASE("subsolution without a usable fit is inconclusive") {
    const RadialSolution sub = family_run(3, 2.0, 15.0);
    const CompletenessReport rep = conformal_length(sub, std::nullopt);
    CHECK(rep.verdict == Verdict::Inconclusive);

    // a window too short for one e-folding must not certify incompleteness
    DecayFit fit = decay_fit(sub, 12.0, 14.0);
    CHECK(!fit_usable_for_tail(fit));
    const CompletenessReport rep2 = conformal_length(sub, fit);
    CHECK(rep2.verdict == Verdict::Inconclusive);
}

TEST_CASE("integral ratio witness") {
    const ModelParams m3 = model_params(3);
    const WarpingFunction eu = WarpingFunction::euclidean();
    // exact: (r^3 - r'^3)/3 / r^2
    CHECK(integral_ratio_check(eu, m3, 1.0, 10.0) == doctest::Approx(3.33).epsilon(1e-12));

    // the ratio grows with r for a positive integrand
    double prev = 0.0;
    for (double r : {5.0, 10.0, 20.0}) {
        const double cur = integral_ratio_check(eu, m3, 1.0, r);
        CHECK(cur > prev);
        prev = cur;
    }

    // sinh warp: limit is 1/(n-1) = 1/2; the quadrature at r = 20 is already
    // within 1e-9 of it
    const WarpingFunction sh = WarpingFunction::sinh_unit();
    CHECK(integral_ratio_check(sh, m3, 1.0, 20.0) == doctest::Approx(0.5).epsilon(1e-9));

    CHECK_THROWS_AS(integral_ratio_check(eu, m3, 0.0, 5.0), std::invalid_argument);
    CHECK_THROWS_AS(integral_ratio_check(eu, m3, 5.0, 1.0), std::invalid_argument);
}

TEST_CASE("barrier fit on a family run") {
    const RadialSolution sub = family_run(3, 2.0, 15.0);
    const BarrierFit fit = barrier_fit(sub);
    CHECK(fit.max_violation <= 0.0);
    CHECK(fit.a == 1.0 - sub.samples.front().u);
    // any positive C works for a decreasing profile, so the grid minimum wins
    CHECK(fit.C == doctest::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("barrier fit recovers a synthetic barrier") {
    const RadialSolution synth = barrier_profile(0.5, 2.0, 15.0, 0.05);
    const BarrierFit fit = barrier_fit(synth);
    CHECK(fit.a == 0.5);
    CHECK(fit.max_violation <= 0.0);
    // smallest grid C above the true rate 2: 10^0.35
    CHECK(fit.C == doctest::Approx(std::pow(10.0, 0.35)).epsilon(1e-12));
    CHECK(fit.C >= 2.0);
    CHECK(fit.C <= 2.0 * std::pow(10.0, 0.05));
}

TEST_CASE("barrier fit preconditions") {
    const RadialSolution one = family_run(3, 1.0, 10.0);
    CHECK_THROWS_AS(barrier_fit(one), std::domain_error);

    const ModelParams m3 = model_params(3);
    OdeConfig cfg;
    cfg.r_max = 15.0;
    const RadialSolution sup = integrate(m3, WarpingFunction::scaled_hyperbolic(3), 1.2, cfg);
    CHECK_THROWS_AS(barrier_fit(sup), std::domain_error);
}

TEST_CASE("decay bound and barrier hold together past the fit window") {
    for (double u0 : {0.3, std::pow(2.0, -0.5)}) {
        const ModelParams m3 = model_params(3);
        OdeConfig cfg;
        cfg.r_max = 15.0;
        const RadialSolution sol =
            integrate(m3, WarpingFunction::scaled_hyperbolic(3), u0, cfg);
        const double R = sol.samples.back().r;
        const DecayFit fit = decay_fit(sol, 0.55 * R, 0.95 * R);
        const BarrierFit bar = barrier_fit(sol);
        CHECK(bar.max_violation <= 0.0);
        for (const Sample& s : sol.samples) {
            CHECK(s.u <= 1.0 - bar.a * std::exp(-bar.C * s.r) + 1e-12);
            if (s.r >= fit.r_hi)
                CHECK(s.u <= fit.C_tilde * std::exp(-fit.c * s.r) * (1.0 + 1e-9));
        }

        // the fitted tail mass bounds the observed mass beyond the window,
        // and stays within 10% of it
        const double q = 2.0 / (m3.n - 2);
        double observed = 0.0;
        for (std::size_t i = 1; i < sol.samples.size(); ++i) {
            const Sample& a = sol.samples[i - 1];
            const Sample& b = sol.samples[i];
            if (a.r < fit.r_hi) continue;
            observed += 0.5 * (std::pow(a.u, q) + std::pow(b.u, q)) * (b.r - a.r);
        }
        const double qc = q * fit.c;
        const double model = std::pow(fit.C_tilde, q) *
                             (std::exp(-qc * fit.r_hi) - std::exp(-qc * R)) / qc;
        CHECK(model >= observed * 0.999);
        CHECK(model <= observed * 1.1);
    }
}

TEST_CASE("sweep classifies a mixed grid") {
    const ModelParams m3 = model_params(3);
    const WarpingFunction hy = WarpingFunction::scaled_hyperbolic(3);
    OdeConfig cfg;
    cfg.r_max = 24.0;
    const std::vector<double> grid = {0.3, 0.6, 0.9, 1.0, 1.01, 1.5};
    const std::vector<SweepRow> rows = sweep(m3, hy, grid, cfg);
    REQUIRE(rows.size() == grid.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].u0 == grid[i]);
        CHECK(rows[i].error.empty());
    }
    for (int i : {0, 1, 2}) {
        CHECK(rows[i].classification.cls == SolutionClass::Subsolution);
        CHECK(rows[i].completeness.verdict == Verdict::Incomplete);
    }
    CHECK(rows[3].classification.cls == SolutionClass::ConstantOne);
    CHECK(rows[3].completeness.verdict == Verdict::Complete);
    for (int i : {4, 5}) {
        CHECK(rows[i].classification.cls == SolutionClass::Supersolution);
        CHECK(rows[i].termination == Termination::BlowUp);
    }
}

TEST_CASE("sweep parallel path matches the serial reference exactly") {
    const ModelParams m4 = model_params(4);
    const WarpingFunction hy = WarpingFunction::scaled_hyperbolic(4);
    OdeConfig cfg;
    cfg.r_max = 18.0;
    std::vector<double> grid;
    for (int i = 0; i < 17; ++i) grid.push_back(0.15 + 0.1 * i);
    const std::vector<SweepRow> par = sweep(m4, hy, grid, cfg);
    const std::vector<SweepRow> ser = sweep_serial(m4, hy, grid, cfg);
    REQUIRE(par.size() == ser.size());
    for (std::size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i].u0 == ser[i].u0);
        CHECK(par[i].classification.cls == ser[i].classification.cls);
        CHECK(par[i].completeness.length_numeric == ser[i].completeness.length_numeric);
        CHECK(par[i].completeness.length_total == ser[i].completeness.length_total);
        CHECK(par[i].completeness.verdict == ser[i].completeness.verdict);
        CHECK(par[i].fit.has_value() == ser[i].fit.has_value());
        if (par[i].fit) {
            CHECK(par[i].fit->c == ser[i].fit->c);
            CHECK(par[i].fit->C_tilde == ser[i].fit->C_tilde);
        }
        CHECK(par[i].termination == ser[i].termination);
    }
}

TEST_CASE("trichotomy is exhaustive on sweeps and sign patterns hold") {
    const ModelParams m3 = model_params(3);
    const WarpingFunction hy = WarpingFunction::scaled_hyperbolic(3);
    OdeConfig cfg;
    cfg.r_max = 24.0;
    std::vector<double> grid;
    for (int i = 0; i < 12; ++i) grid.push_back(0.2 + 0.16 * i);
    grid.push_back(1.0);
    const SweepOptions opts;
    const std::vector<SweepRow> rows = sweep(m3, hy, grid, cfg, opts);
    for (const SweepRow& row : rows) {
        REQUIRE(row.error.empty());
        const bool near_one = std::abs(row.u0 - 1.0) <= opts.eq_tol;
        if (near_one) {
            CHECK(row.classification.cls == SolutionClass::ConstantOne);
        } else if (row.u0 < 1.0) {
            CHECK(row.classification.cls == SolutionClass::Subsolution);
        } else {
            CHECK(row.classification.cls == SolutionClass::Supersolution);
        }
    }
}

TEST_CASE("monotone invariant and positivity on sweep trajectories") {
    const ModelParams m5 = model_params(5);
    const WarpingFunction hy = WarpingFunction::scaled_hyperbolic(5);
    OdeConfig cfg;
    cfg.r_max = 12.0;
    for (double u0 : {0.25, 0.8, 1.1, 1.6}) {
        const RadialSolution sol = integrate(m5, hy, u0, cfg);
        for (const Sample& s : sol.samples) {
            CHECK(s.u > 0.0);
            if (s.r == 0.0) continue;
            if (u0 < 1.0) {
                CHECK(s.u < 1.0);
                CHECK(s.du < 0.0);
            } else {
                CHECK(s.u > 1.0);
                CHECK(s.du > 0.0);
            }
        }
    }
}

TEST_CASE("uniqueness illustration: no complete non-constant rows") {
    const ModelParams m3 = model_params(3);
    const WarpingFunction hy = WarpingFunction::scaled_hyperbolic(3);
    const WarpBoundCertificate cert = certify_warp_bounds(hy, 3.0, 30.0, 500);
    REQUIRE(cert.growth_ok);

    OdeConfig cfg;
    cfg.r_max = 30.0;
    std::vector<double> grid;
    for (int i = 0; i < 10; ++i) grid.push_back(0.15 + 0.2 * i);
    const std::vector<SweepRow> rows = sweep(m3, hy, grid, cfg);
    for (const SweepRow& row : rows) {
        REQUIRE(row.error.empty());
        if (std::abs(row.u0 - 1.0) <= 1e-7) continue;
        const bool incomplete_sub = row.classification.cls == SolutionClass::Subsolution &&
                                    row.completeness.verdict == Verdict::Incomplete;
        const bool blown_super = row.classification.cls == SolutionClass::Supersolution &&
                                 row.termination == Termination::BlowUp;
        CHECK((incomplete_sub || blown_super));
        CHECK(row.completeness.verdict != Verdict::Complete);
    }
}
