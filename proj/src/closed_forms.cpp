#include "yamabe/closed_forms.hpp"

#include <cmath>
#include <stdexcept>

namespace yamabe {

HyperbolicFamilyParam hyperbolic_family_param(const ModelParams& params, double b) {
    if (!(b >= 1.0))
        throw std::domain_error("hyperbolic_family_param: b must be >= 1");
    return {params, b};
}

double poincare_factor(const ModelParams& params, double rho) {
    if (!(rho >= 0.0) || rho >= 1.0)
        throw std::domain_error("poincare_factor: rho must lie in [0, 1)");
    return detail::poincare_factor_t<double>(params.n, rho);
}

double hyperbolic_family(const HyperbolicFamilyParam& fam, double rho) {
    if (!(rho >= 0.0) || rho >= 1.0)
        throw std::domain_error("hyperbolic_family: rho must lie in [0, 1)");
    return detail::hyperbolic_family_t<double>(fam.params.n, fam.b, rho);
}

double euclidean_family(const ModelParams& params, double b, double rho) {
    if (!(b >= 1.0))
        throw std::domain_error("euclidean_family: b must be >= 1");
    if (!(rho >= 0.0) || rho >= b)
        throw std::domain_error("euclidean_family: rho must lie in [0, b)");
    return detail::euclidean_family_t<double>(params.n, b, rho);
}

double radius_to_rho(const ModelParams& params, double r) {
    if (!(r >= 0.0))
        throw std::domain_error("radius_to_rho: r must be >= 0");
    return detail::radius_to_rho_t<double>(params.n, r);
}

double rho_to_radius(const ModelParams& params, double rho) {
    if (!(rho >= 0.0) || rho >= 1.0)
        throw std::domain_error("rho_to_radius: rho must lie in [0, 1)");
    return 2.0 * detail::warp_scale_t<double>(params.n) * std::atanh(rho);
}

double hyperbolic_family_radial(const HyperbolicFamilyParam& fam, double r) {
    if (!(r >= 0.0))
        throw std::domain_error("hyperbolic_family_radial: r must be >= 0");
    return detail::hyperbolic_family_t<double>(fam.params.n, fam.b,
                                               detail::radius_to_rho_t<double>(fam.params.n, r));
}

ProfileDerivs hyperbolic_family_radial_derivs(const HyperbolicFamilyParam& fam, double r) {
    if (!(r >= 0.0))
        throw std::domain_error("hyperbolic_family_radial_derivs: r must be >= 0");
    const auto d = detail::hyperbolic_family_radial_derivs_t<double>(fam.params.n, fam.b, r);
    return {d.u, d.du, d.d2u};
}

ProfileDerivs hyperbolic_family_rho_derivs(const HyperbolicFamilyParam& fam, double rho) {
    if (!(rho >= 0.0) || rho >= 1.0)
        throw std::domain_error("hyperbolic_family_rho_derivs: rho must lie in [0, 1)");
    const auto d = detail::hyperbolic_family_rho_derivs_t<double>(fam.params.n, fam.b, rho);
    return {d.u, d.du, d.d2u};
}

ProfileDerivs euclidean_family_derivs(const ModelParams& params, double b, double rho) {
    if (!(b >= 1.0))
        throw std::domain_error("euclidean_family_derivs: b must be >= 1");
    if (!(rho >= 0.0) || rho >= b)
        throw std::domain_error("euclidean_family_derivs: rho must lie in [0, b)");
    const auto d = detail::euclidean_family_derivs_t<double>(params.n, b, rho);
    return {d.u, d.du, d.d2u};
}

double radial_residual(const WarpingFunction& w, const ModelParams& params,
                       double u, double du, double d2u, double r) {
    if (!(r > 0.0))
        throw std::domain_error("radial_residual: singular at r <= 0");
    if (!(u > 0.0))
        throw std::domain_error("radial_residual: u must be positive");
    const double drift = drift_coefficient(w, params, r);
    return detail::radial_residual_t<double>(params.n, drift, u, du, d2u);
}

double euclidean_residual(const ModelParams& params, double w, double dw,
                          double d2w, double rho) {
    if (!(rho > 0.0))
        throw std::domain_error("euclidean_residual: singular at rho <= 0");
    if (!(w > 0.0))
        throw std::domain_error("euclidean_residual: w must be positive");
    return detail::euclidean_residual_t<double>(params.n, w, dw, d2w, rho);
}

namespace {

// Combines per-point |residual| values into the report; ties resolved toward
// the smaller grid index so the result does not depend on thread count.
template <class PointFn>
ResidualReport scan_grid(std::span<const double> grid, PointFn&& point, bool parallel) {
    if (grid.empty())
        throw std::invalid_argument("residual scan: empty grid");
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(grid.size());
    std::vector<double> vals(grid.size());
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) vals[i] = point(grid[i]);
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) vals[i] = point(grid[i]);
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (vals[i] > vals[best]) best = i;
    ResidualReport rep;
    rep.grid.assign(grid.begin(), grid.end());
    rep.max_abs_residual = vals[best];
    rep.argmax_point = grid[best];
    return rep;
}

long double hyperbolic_point_residual(int n, long double b, long double rho) {
    const long double k = detail::warp_scale_t<long double>(n);
    const long double r = 2 * k * std::atanh(rho);
    const auto d = detail::hyperbolic_family_radial_derivs_t<long double>(n, b, r);
    const long double drift = (n - 1) / (k * std::tanh(r / k));
    return detail::radial_residual_t<long double>(n, drift, d.u, d.du, d.d2u);
}

long double euclidean_point_residual(int n, long double b, long double rho) {
    const auto d = detail::euclidean_family_derivs_t<long double>(n, b, rho);
    return detail::euclidean_residual_t<long double>(n, d.u, d.du, d.d2u, rho);
}

void check_rho_grid(std::span<const double> grid, double upper) {
    for (double rho : grid)
        if (!(rho > 0.0) || !(rho < upper))
            throw std::domain_error("residual scan: grid point outside the open domain");
}

} // namespace

ResidualReport hyperbolic_residual_scan(const HyperbolicFamilyParam& fam,
                                        std::span<const double> rho_grid) {
    check_rho_grid(rho_grid, 1.0);
    const int n = fam.params.n;
    const long double b = fam.b;
    return scan_grid(rho_grid, [n, b](double rho) {
        return static_cast<double>(std::abs(hyperbolic_point_residual(n, b, rho)));
    }, true);
}

ResidualReport hyperbolic_residual_scan_serial(const HyperbolicFamilyParam& fam,
                                               std::span<const double> rho_grid) {
    check_rho_grid(rho_grid, 1.0);
    const int n = fam.params.n;
    const long double b = fam.b;
    return scan_grid(rho_grid, [n, b](double rho) {
        return static_cast<double>(std::abs(hyperbolic_point_residual(n, b, rho)));
    }, false);
}

ResidualReport euclidean_residual_scan(const ModelParams& params, double b,
                                       std::span<const double> rho_grid) {
    if (!(b >= 1.0))
        throw std::domain_error("euclidean_residual_scan: b must be >= 1");
    check_rho_grid(rho_grid, b);
    const int n = params.n;
    const long double bl = b;
    return scan_grid(rho_grid, [n, bl](double rho) {
        return static_cast<double>(std::abs(euclidean_point_residual(n, bl, rho)));
    }, true);
}

ResidualReport euclidean_residual_scan_serial(const ModelParams& params, double b,
                                              std::span<const double> rho_grid) {
    if (!(b >= 1.0))
        throw std::domain_error("euclidean_residual_scan: b must be >= 1");
    check_rho_grid(rho_grid, b);
    const int n = params.n;
    const long double bl = b;
    return scan_grid(rho_grid, [n, bl](double rho) {
        return static_cast<double>(std::abs(euclidean_point_residual(n, bl, rho)));
    }, false);
}

namespace {

// Both sides of the conformal identity at one grid point; see header.
long double conformal_point_residual(int n, const RadialProfile& u_profile,
                                     const RadialProfile& v_profile,
                                     long double rho, long double h) {
    const long double c_n = static_cast<long double>(n - 2) / (4 * (n - 1));
    const long double p = static_cast<long double>(n + 2) / (n - 2);
    const long double k = detail::warp_scale_t<long double>(n);

    const auto uv = [&](long double x) { return u_profile(x) * v_profile(x); };
    const long double f0 = uv(rho), fp = uv(rho + h), fm = uv(rho - h);
    const long double lap_flat =
        (fp - 2 * f0 + fm) / (h * h) + (n - 1) / rho * (fp - fm) / (2 * h);

    const long double r = 2 * k * std::atanh(rho);
    const auto u_of_r = [&](long double s) { return u_profile(std::tanh(s / (2 * k))); };
    const long double u0 = u_of_r(r), up = u_of_r(r + h), um = u_of_r(r - h);
    const long double drift = (n - 1) / (k * std::tanh(r / k));
    const long double lap_hyp =
        (up - 2 * u0 + um) / (h * h) + drift * (up - um) / (2 * h);

    const long double v0 = v_profile(rho);
    // R_gc = -1 for the scaled hyperbolic metric, R_g = 0 for the flat one.
    const long double rhs = std::pow(v0, p) * (lap_hyp + c_n * u0);
    return lap_flat - rhs;
}

void check_identity_grid(std::span<const double> grid, double h) {
    if (!(h > 0.0))
        throw std::invalid_argument("conformal_identity_check: fd_step must be positive");
    for (double rho : grid)
        if (!(rho - h > 0.0) || !(rho + h < 1.0))
            throw std::domain_error(
                "conformal_identity_check: grid must keep rho +/- fd_step inside (0, 1)");
}

} // namespace

ResidualReport conformal_identity_check(const ModelParams& params,
                                        const RadialProfile& u_profile,
                                        const RadialProfile& v_profile,
                                        std::span<const double> rho_grid,
                                        double fd_step) {
    check_identity_grid(rho_grid, fd_step);
    const int n = params.n;
    return scan_grid(rho_grid, [&, n](double rho) {
        return static_cast<double>(std::abs(
            conformal_point_residual(n, u_profile, v_profile, rho, fd_step)));
    }, true);
}

ResidualReport conformal_identity_check_serial(const ModelParams& params,
                                               const RadialProfile& u_profile,
                                               const RadialProfile& v_profile,
                                               std::span<const double> rho_grid,
                                               double fd_step) {
    check_identity_grid(rho_grid, fd_step);
    const int n = params.n;
    return scan_grid(rho_grid, [&, n](double rho) {
        return static_cast<double>(std::abs(
            conformal_point_residual(n, u_profile, v_profile, rho, fd_step)));
    }, false);
}

RadialProfile hyperbolic_family_profile(const HyperbolicFamilyParam& fam) {
    const int n = fam.params.n;
    const long double b = fam.b;
    return [n, b](long double rho) { return detail::hyperbolic_family_t<long double>(n, b, rho); };
}

RadialProfile poincare_profile(const ModelParams& params) {
    const int n = params.n;
    return [n](long double rho) { return detail::poincare_factor_t<long double>(n, rho); };
}

} // namespace yamabe
