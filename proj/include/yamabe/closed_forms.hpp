#ifndef YAMABE_CLOSED_FORMS_HPP
#define YAMABE_CLOSED_FORMS_HPP

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "yamabe/geometry.hpp"

namespace yamabe {

/// One member of the closed-form solution family on the scaled hyperbolic
/// ball, u_b(rho) = (b (1 - rho^2) / (b^2 - rho^2))^((n-2)/2), b >= 1.
struct HyperbolicFamilyParam {
    ModelParams params;
    double b = 1.0;
};

/// Validates b >= 1 (the family is only asserted there).
HyperbolicFamilyParam hyperbolic_family_param(const ModelParams& params, double b);

namespace detail {

// Formula cores shared between the double API and the extended-precision
// residual scans. T is double or long double.

template <class T>
T poincare_factor_t(int n, T rho) {
    const T m = T(n - 2) / 2;
    const T scale = T(4) * T(n) * T(n - 1);
    return std::pow(scale, m / 2) * std::pow(T(1) - rho * rho, -m);
}

template <class T>
T hyperbolic_family_t(int n, T b, T rho) {
    if (b == T(1)) return T(1);
    const T m = T(n - 2) / 2;
    return std::pow(b * (T(1) - rho * rho) / (b * b - rho * rho), m);
}

template <class T>
T euclidean_family_t(int n, T b, T rho) {
    const T m = T(n - 2) / 2;
    const T amp = std::pow(T(4) * b * b * T(n) * T(n - 1), m / 2);
    return amp * std::pow(b * b - rho * rho, -m);
}

template <class T>
T warp_scale_t(int n) {
    return std::sqrt(T(n) * T(n - 1));
}

template <class T>
T radius_to_rho_t(int n, T r) {
    return std::tanh(r / (2 * warp_scale_t<T>(n)));
}

template <class T>
struct Derivs {
    T u, du, d2u;
};

// u_b and its first two rho-derivatives.
template <class T>
Derivs<T> hyperbolic_family_rho_derivs_t(int n, T b, T rho) {
    if (b == T(1)) return {T(1), T(0), T(0)};
    const T m = T(n - 2) / 2;
    const T s = b * b - rho * rho;
    const T g = b * (T(1) - rho * rho) / s;
    const T bb1 = b * (b * b - T(1));
    const T gp = -2 * rho * bb1 / (s * s);
    const T gpp = -2 * bb1 * (b * b + 3 * rho * rho) / (s * s * s);
    const T um1 = std::pow(g, m - 1);
    const T u = um1 * g;
    const T du = m * um1 * gp;
    const T d2u = m * (m - 1) * um1 / g * gp * gp + m * um1 * gpp;
    return {u, du, d2u};
}

// u_b composed with rho(r) = tanh(r / 2k); derivatives with respect to r.
template <class T>
Derivs<T> hyperbolic_family_radial_derivs_t(int n, T b, T r) {
    const T k = warp_scale_t<T>(n);
    const T rho = std::tanh(r / (2 * k));
    const T sech2 = T(1) - rho * rho;
    const T drho = sech2 / (2 * k);
    const T d2rho = -rho * sech2 / (2 * k * k);
    const Derivs<T> d = hyperbolic_family_rho_derivs_t<T>(n, b, rho);
    return {d.u, d.du * drho, d.d2u * drho * drho + d.du * d2rho};
}

// w_b and its first two rho-derivatives.
template <class T>
Derivs<T> euclidean_family_derivs_t(int n, T b, T rho) {
    const T m = T(n - 2) / 2;
    const T amp = std::pow(T(4) * b * b * T(n) * T(n - 1), m / 2);
    const T s = b * b - rho * rho;
    const T w = amp * std::pow(s, -m);
    const T dw = 2 * m * rho * w / s;
    const T d2w = 2 * m * w / (s * s) * (s + 2 * (m + 1) * rho * rho);
    return {w, dw, d2w};
}

template <class T>
T radial_residual_t(int n, T drift, T u, T du, T d2u) {
    const T c_n = T(n - 2) / (4 * T(n - 1));
    const T p = T(n + 2) / T(n - 2);
    return d2u + drift * du - c_n * (std::pow(u, p) - u);
}

template <class T>
T euclidean_residual_t(int n, T w, T dw, T d2w, T rho) {
    const T c_n = T(n - 2) / (4 * T(n - 1));
    const T p = T(n + 2) / T(n - 2);
    return d2w + T(n - 1) / rho * dw - c_n * std::pow(w, p);
}

} // namespace detail

/// Conformal factor v of the scaled Poincare metric on the unit ball,
/// v(rho)^(4/(n-2)) = 4 n(n-1) / (1 - rho^2)^2. Throws std::domain_error
/// unless 0 <= rho < 1.
double poincare_factor(const ModelParams& params, double rho);

/// u_b(rho); exactly 1 when b = 1. Throws std::domain_error unless
/// 0 <= rho < 1.
double hyperbolic_family(const HyperbolicFamilyParam& fam, double rho);

/// w_b(rho) = (4 b^2 n(n-1))^((n-2)/4) / (b^2 - rho^2)^((n-2)/2), the flat
/// equation's family; rho = b is the pole. Throws std::domain_error unless
/// 0 <= rho < b and b >= 1.
double euclidean_family(const ModelParams& params, double b, double rho);

/// Euclidean radius rho = tanh(r / (2 sqrt(n(n-1)))) of the point at geodesic
/// distance r from the center of the scaled Poincare ball.
double radius_to_rho(const ModelParams& params, double r);

/// Inverse of radius_to_rho.
double rho_to_radius(const ModelParams& params, double rho);

/// Radial profile u_b(radius_to_rho(r)); the oracle the ODE output is
/// compared against.
double hyperbolic_family_radial(const HyperbolicFamilyParam& fam, double r);

struct ProfileDerivs {
    double u, du, d2u;
};

/// u_b and exact r-derivatives (chain rule through rho(r)).
ProfileDerivs hyperbolic_family_radial_derivs(const HyperbolicFamilyParam& fam, double r);

/// u_b and exact rho-derivatives.
ProfileDerivs hyperbolic_family_rho_derivs(const HyperbolicFamilyParam& fam, double rho);

/// w_b and exact rho-derivatives.
ProfileDerivs euclidean_family_derivs(const ModelParams& params, double b, double rho);

/// Residual of the radial equation
///   u'' + (n-1)(f'/f) u' - c_n (u^p - u)
/// at radius r > 0; zero for exact solutions on the matching warp.
double radial_residual(const WarpingFunction& w, const ModelParams& params,
                       double u, double du, double d2u, double r);

/// Residual of the flat critical equation
///   w'' + ((n-1)/rho) w' - c_n w^p
/// at rho > 0; zero for the w_b family.
double euclidean_residual(const ModelParams& params, double w, double dw,
                          double d2w, double rho);

/// Result of a grid scan: worst absolute residual and where it occurred.
struct ResidualReport {
    std::vector<double> grid;
    double max_abs_residual = 0.0;
    double argmax_point = 0.0;
};

/// Scans |radial_residual| of u_b (exact derivatives, scaled-hyperbolic
/// geometry) over a rho-grid in (0, 1). Evaluated in extended precision so
/// the report reflects the equations rather than roundoff. OpenMP-parallel
/// with a serial reference.
ResidualReport hyperbolic_residual_scan(const HyperbolicFamilyParam& fam,
                                        std::span<const double> rho_grid);
ResidualReport hyperbolic_residual_scan_serial(const HyperbolicFamilyParam& fam,
                                               std::span<const double> rho_grid);

/// Same scan for |euclidean_residual| of w_b over a rho-grid in (0, b).
ResidualReport euclidean_residual_scan(const ModelParams& params, double b,
                                       std::span<const double> rho_grid);
ResidualReport euclidean_residual_scan_serial(const ModelParams& params, double b,
                                              std::span<const double> rho_grid);

/// Radial profile on the ball, rho in (0,1) -> value.
using RadialProfile = std::function<long double(long double)>;

/// Finite-difference check of the conformal identity
///   (Lap_g - c_n R_g)(u v) = v^p (Lap_gc - c_n R_gc) u
/// with g the flat metric on the ball and gc the scaled hyperbolic metric
/// (v the Poincare factor, R_g = 0, R_gc = -1). The left side is differenced
/// in rho, the right side in the hyperbolic arc length r, both with step
/// fd_step. Grid points must keep rho - fd_step > 0 and rho + fd_step < 1.
ResidualReport conformal_identity_check(const ModelParams& params,
                                        const RadialProfile& u_profile,
                                        const RadialProfile& v_profile,
                                        std::span<const double> rho_grid,
                                        double fd_step);
ResidualReport conformal_identity_check_serial(const ModelParams& params,
                                               const RadialProfile& u_profile,
                                               const RadialProfile& v_profile,
                                               std::span<const double> rho_grid,
                                               double fd_step);

/// Closure for u_b usable with conformal_identity_check.
RadialProfile hyperbolic_family_profile(const HyperbolicFamilyParam& fam);

/// Closure for the Poincare factor.
RadialProfile poincare_profile(const ModelParams& params);

} // namespace yamabe

#endif
