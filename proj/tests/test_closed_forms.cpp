#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "yamabe/closed_forms.hpp"

using namespace yamabe;

namespace {

std::vector<double> grid_points(double lo, double hi, int count) {
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i)
        g[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
    return g;
}

} // namespace

TEST_CASE("poincare factor values") {
    const ModelParams m3 = model_params(3);
    const ModelParams m4 = model_params(4);
    CHECK(poincare_factor(m3, 0.0) == doctest::Approx(std::pow(24.0, 0.25)).epsilon(1e-15));
    CHECK(poincare_factor(m3, 0.0) == doctest::Approx(2.21336).epsilon(1e-5));
    CHECK(poincare_factor(m4, 0.0) == doctest::Approx(std::sqrt(48.0)).epsilon(1e-15));
    CHECK(poincare_factor(m4, 0.5) == doctest::Approx(std::sqrt(48.0) / 0.75).epsilon(1e-15));
    CHECK_THROWS_AS(poincare_factor(m3, 1.0), std::domain_error);
    CHECK_THROWS_AS(poincare_factor(m3, -0.1), std::domain_error);
}

TEST_CASE("hyperbolic family values") {
    const ModelParams m3 = model_params(3);
    const ModelParams m4 = model_params(4);
    const HyperbolicFamilyParam one = hyperbolic_family_param(m4, 1.0);
    for (double rho : {0.0, 0.3, 0.9, 0.999})
        CHECK(hyperbolic_family(one, rho) == 1.0);

    const HyperbolicFamilyParam f42 = hyperbolic_family_param(m4, 2.0);
    CHECK(hyperbolic_family(f42, 0.0) == doctest::Approx(0.5).epsilon(1e-15));

    // u_b -> 0 at the boundary for b > 1
    const HyperbolicFamilyParam f32 = hyperbolic_family_param(m3, 2.0);
    double prev = hyperbolic_family(f32, 0.9);
    for (double rho : {0.99, 0.9999, 0.999999}) {
        const double cur = hyperbolic_family(f32, rho);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK(prev < 2e-3);

    CHECK_THROWS_AS(hyperbolic_family_param(m3, 0.5), std::domain_error);
    CHECK_THROWS_AS(hyperbolic_family(f32, 1.0), std::domain_error);
}

TEST_CASE("euclidean family values") {
    const ModelParams m3 = model_params(3);
    const ModelParams m4 = model_params(4);
    CHECK(euclidean_family(m3, 1.0, 0.0) == doctest::Approx(std::pow(24.0, 0.25)).epsilon(1e-15));
    CHECK(euclidean_family(m4, 2.0, 0.0) ==
          doctest::Approx(std::sqrt(192.0) / 4.0).epsilon(1e-15));
    CHECK(euclidean_family(m4, 2.0, 0.0) == doctest::Approx(3.46410).epsilon(1e-5));
    CHECK_THROWS_AS(euclidean_family(m3, 2.0, 2.0), std::domain_error);
    CHECK_THROWS_AS(euclidean_family(m3, 0.5, 0.0), std::domain_error);
}

TEST_CASE("factorization w_b = u_b * v") {
    for (int n : {3, 4, 5}) {
        const ModelParams m = model_params(n);
        for (double b : {1.0, 2.0, 5.0}) {
            const HyperbolicFamilyParam fam = hyperbolic_family_param(m, b);
            for (double rho : grid_points(0.005, 0.95, 100)) {
                const double w = euclidean_family(m, b, rho);
                const double uv = hyperbolic_family(fam, rho) * poincare_factor(m, rho);
                CHECK(std::abs(uv / w - 1.0) <= 1e-12);
            }
        }
    }
}

TEST_CASE("family is decreasing in b and below 1") {
    for (int n : {3, 5}) {
        const ModelParams m = model_params(n);
        for (double rho : {0.1, 0.5, 0.9}) {
            double prev = hyperbolic_family(hyperbolic_family_param(m, 1.0), rho);
            for (double b : {1.25, 1.5, 2.0, 3.0, 5.0, 10.0}) {
                const double cur = hyperbolic_family(hyperbolic_family_param(m, b), rho);
                CHECK(cur < prev);
                CHECK(cur < 1.0);
                prev = cur;
            }
        }
    }
}

TEST_CASE("radius_to_rho against the arc-length quadrature oracle") {
    for (int n : {3, 4, 6}) {
        const ModelParams m = model_params(n);
        const double k = std::sqrt(static_cast<double>(n) * (n - 1));
        CHECK(radius_to_rho(m, 0.0) == 0.0);

        // independent oracle: r(rho) = integral of 2k/(1 - t^2) dt
        auto arc = [&](double rho) {
            return oracles::simpson([&](double t) { return 2.0 * k / (1.0 - t * t); }, 0.0, rho);
        };
        for (double rho : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const double r = rho_to_radius(m, rho);
            CHECK(std::abs(r - arc(rho)) <= 1e-8);
            CHECK(radius_to_rho(m, r) == doctest::Approx(rho).epsilon(1e-13));
        }
    }
    // spot value: r at rho = 0.5 for n = 3 is 2 sqrt(6) artanh(1/2)
    const ModelParams m3 = model_params(3);
    CHECK(rho_to_radius(m3, 0.5) ==
          doctest::Approx(2.0 * std::sqrt(6.0) * std::atanh(0.5)).epsilon(1e-15));
    CHECK(rho_to_radius(m3, 0.5) == doctest::Approx(2.6910396).epsilon(1e-7));
}

TEST_CASE("radius_to_rho is increasing with limit 1") {
    const ModelParams m4 = model_params(4);
    double prev = -1.0;
    for (double r = 0.0; r <= 60.0; r += 1.7) {
        const double rho = radius_to_rho(m4, r);
        CHECK(rho > prev);
        CHECK(rho < 1.0);
        prev = rho;
    }
    CHECK(prev > 1.0 - 1e-7);
}

TEST_CASE("warp against conformal factor: k sinh(r/k) = lambda(rho) rho") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> dist(0.01, 25.0);
    for (int n : {3, 5}) {
        const ModelParams m = model_params(n);
        const double k = std::sqrt(static_cast<double>(n) * (n - 1));
        for (int i = 0; i < 20; ++i) {
            const double r = dist(rng);
            const double rho = radius_to_rho(m, r);
            const double lambda = 2.0 * k / (1.0 - rho * rho);
            CHECK(k * std::sinh(r / k) == doctest::Approx(lambda * rho).epsilon(1e-12));
        }
    }
}

TEST_CASE("hyperbolic family radial profile") {
    const ModelParams m3 = model_params(3);
    CHECK(hyperbolic_family_radial(hyperbolic_family_param(m3, 1.0), 7.0) == 1.0);
    const HyperbolicFamilyParam f32 = hyperbolic_family_param(m3, 2.0);
    CHECK(hyperbolic_family_radial(f32, 0.0) ==
          doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-15));

    // asymptotic prefactor: u_b ~ (4b/(b^2-1))^((n-2)/2) e^(-(n-2) r / (2k))
    const double c = 1.0 / (2.0 * std::sqrt(6.0));
    const double pref = std::sqrt(8.0 / 3.0);
    const double r = 30.0;
    CHECK(hyperbolic_family_radial(f32, r) * std::exp(c * r) ==
          doctest::Approx(pref).epsilon(1e-4));
}

TEST_CASE("exact derivatives match high-order finite differences") {
    const ModelParams m3 = model_params(3);
    const ModelParams m5 = model_params(5);
    const HyperbolicFamilyParam f32 = hyperbolic_family_param(m3, 2.0);
    const HyperbolicFamilyParam f53 = hyperbolic_family_param(m5, 3.0);

    for (const auto& fam : {f32, f53}) {
        auto u_of_r = [&](double r) { return hyperbolic_family_radial(fam, r); };
        for (double r : {0.5, 1.0, 3.0, 8.0}) {
            const ProfileDerivs d = hyperbolic_family_radial_derivs(fam, r);
            CHECK(d.u == doctest::Approx(u_of_r(r)).epsilon(1e-14));
            CHECK(d.du == doctest::Approx(oracles::fd_first(u_of_r, r, 1e-3)).epsilon(1e-8));
            CHECK(d.d2u == doctest::Approx(oracles::fd_second(u_of_r, r, 1e-3)).epsilon(1e-6));
        }
    }

    auto w_of_rho = [&](double rho) { return euclidean_family(m3, 2.0, rho); };
    for (double rho : {0.2, 0.6, 1.2, 1.8}) {
        const ProfileDerivs d = euclidean_family_derivs(m3, 2.0, rho);
        CHECK(d.u == doctest::Approx(w_of_rho(rho)).epsilon(1e-14));
        CHECK(d.du == doctest::Approx(oracles::fd_first(w_of_rho, rho, 1e-4)).epsilon(1e-7));
        CHECK(d.d2u == doctest::Approx(oracles::fd_second(w_of_rho, rho, 1e-4)).epsilon(1e-5));
    }
}

TEST_CASE("radial residual values") {
    const ModelParams m3 = model_params(3);
    const WarpingFunction eu = WarpingFunction::euclidean();
    const WarpingFunction hy = WarpingFunction::scaled_hyperbolic(3);

    // constants solve the warped equation at u = 1 only
    CHECK(radial_residual(eu, m3, 1.0, 0.0, 0.0, 2.5) == 0.0);
    CHECK(radial_residual(hy, m3, 1.0, 0.0, 0.0, 7.0) == 0.0);
    CHECK(radial_residual(eu, m3, 2.0, 0.0, 0.0, 1.0) == doctest::Approx(-3.75).epsilon(1e-15));

    const HyperbolicFamilyParam f32 = hyperbolic_family_param(m3, 2.0);
    const ProfileDerivs d = hyperbolic_family_radial_derivs(f32, 1.0);
    CHECK(std::abs(radial_residual(hy, m3, d.u, d.du, d.d2u, 1.0)) <= 1e-12);

    CHECK_THROWS_AS(radial_residual(eu, m3, 1.0, 0.0, 0.0, 0.0), std::domain_error);
}

TEST_CASE("euclidean residual values") {
    const ModelParams m3 = model_params(3);
    const ModelParams m4 = model_params(4);

    const ProfileDerivs d1 = euclidean_family_derivs(m3, 1.0, 0.5);
    CHECK(std::abs(euclidean_residual(m3, d1.u, d1.du, d1.d2u, 0.5)) <= 1e-10);
    const ProfileDerivs d2 = euclidean_family_derivs(m4, 2.0, 1.0);
    CHECK(std::abs(euclidean_residual(m4, d2.u, d2.du, d2.d2u, 1.0)) <= 1e-10);

    // constants never solve the flat equation
    const double c = 1.7;
    CHECK(euclidean_residual(m3, c, 0.0, 0.0, 0.8) ==
          doctest::Approx(-m3.c_n * std::pow(c, 5.0)).epsilon(1e-14));

    CHECK_THROWS_AS(euclidean_residual(m3, 1.0, 0.0, 0.0, 0.0), std::domain_error);
}

TEST_CASE("residual scans stay below 1e-9 with exact derivatives") {
    const std::vector<double> grid = grid_points(0.01, 0.95, 200);
    for (int n : {3, 4, 5, 6}) {
        const ModelParams m = model_params(n);
        for (double b : {1.0, 2.0, 5.0}) {
            const HyperbolicFamilyParam fam = hyperbolic_family_param(m, b);
            const ResidualReport hr = hyperbolic_residual_scan(fam, grid);
            CHECK(hr.max_abs_residual <= 1e-9);
            const ResidualReport er = euclidean_residual_scan(m, b, grid);
            CHECK(er.max_abs_residual <= 1e-9);
        }
    }
}

TEST_CASE("serial and parallel scans agree exactly") {
    const std::vector<double> grid = grid_points(0.02, 0.9, 173);
    const ModelParams m5 = model_params(5);
    const HyperbolicFamilyParam fam = hyperbolic_family_param(m5, 2.0);
    const ResidualReport a = hyperbolic_residual_scan(fam, grid);
    const ResidualReport b = hyperbolic_residual_scan_serial(fam, grid);
    CHECK(a.max_abs_residual == b.max_abs_residual);
    CHECK(a.argmax_point == b.argmax_point);
    const ResidualReport c = euclidean_residual_scan(m5, 2.0, grid);
    const ResidualReport d = euclidean_residual_scan_serial(m5, 2.0, grid);
    CHECK(c.max_abs_residual == d.max_abs_residual);
    CHECK(c.argmax_point == d.argmax_point);
}

TEST_CASE("conformal identity check") {
    const ModelParams m3 = model_params(3);
    const HyperbolicFamilyParam f32 = hyperbolic_family_param(m3, 2.0);
    const RadialProfile u = hyperbolic_family_profile(f32);
    const RadialProfile v = poincare_profile(m3);
    const std::vector<double> grid = grid_points(0.1, 0.8, 141);

    const ResidualReport r1 = conformal_identity_check(m3, u, v, grid, 1e-4);
    CHECK(r1.max_abs_residual <= 1e-5);

    // centered differences are second order: halving the step cuts the
    // discrepancy by about 4
    const ResidualReport r2 = conformal_identity_check(m3, u, v, grid, 5e-5);
    CHECK(r1.max_abs_residual / r2.max_abs_residual > 3.5);
    CHECK(r1.max_abs_residual / r2.max_abs_residual < 4.5);

    // u = 1: left side reduces to the flat equation satisfied by v itself
    const RadialProfile ones = [](long double) { return 1.0L; };
    const std::vector<double> inner = grid_points(0.1, 0.7, 121);
    const ResidualReport r3 = conformal_identity_check(m3, ones, v, inner, 1e-4);
    CHECK(r3.max_abs_residual <= 1e-5);

    const ResidualReport r4 = conformal_identity_check_serial(m3, u, v, grid, 1e-4);
    CHECK(r4.max_abs_residual == r1.max_abs_residual);
    CHECK(r4.argmax_point == r1.argmax_point);

    const std::vector<double> bad = {0.0, 0.5};
    CHECK_THROWS_AS(conformal_identity_check(m3, u, v, bad, 1e-4), std::domain_error);
    const std::vector<double> bad2 = {0.5, 0.99999};
    CHECK_THROWS_AS(conformal_identity_check(m3, u, v, bad2, 1e-4), std::domain_error);
}
