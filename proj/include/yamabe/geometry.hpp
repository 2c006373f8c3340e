#ifndef YAMABE_GEOMETRY_HPP
#define YAMABE_GEOMETRY_HPP

#include <span>
#include <string>
#include <vector>

namespace yamabe {

/// Dimension-derived model constants for the critical semilinear equation
///   laplacian(u) + c_n u = c_n u^p,   c_n = (n-2)/(4(n-1)),  p = (n+2)/(n-2).
struct ModelParams {
    int n = 0;
    double c_n = 0.0;
    double p = 0.0;
};

/// Builds the constants for dimension n. Throws std::domain_error for n < 3.
ModelParams model_params(int n);

enum class WarpKind { Euclidean, Sinh, ScaledHyperbolic, Tabulated };

struct WarpEval {
    double f;    // warp value, length
    double df;   // first derivative, dimensionless
    double d2f;  // second derivative, 1/length
};

struct WarpTableRow {
    double r, f, df, d2f;
};

/// Rotationally symmetric warping function for the metric
/// g = dr^2 + f(r)^2 dTheta^2, with f(0) = 0, f'(0) = 1 and f > 0 on (0, inf).
///
/// Built-in kinds are closed forms; Tabulated interpolates a user table with
/// a monotone cubic (Fritsch-Carlson) on (r, f), derivatives taken from the
/// interpolant. Immutable and safe to evaluate concurrently.
class WarpingFunction {
public:
    static WarpingFunction euclidean();
    static WarpingFunction sinh_unit();
    static WarpingFunction scaled_hyperbolic(int n);
    /// Rows must start at (0, 0, 1, *) with strictly increasing r and f > 0
    /// beyond the origin. Throws std::invalid_argument on malformed tables.
    static WarpingFunction tabulated(std::vector<WarpTableRow> rows, std::string name = "table");

    WarpKind kind() const { return kind_; }
    const std::string& name() const { return name_; }

    /// Scale k = sqrt(n(n-1)) for ScaledHyperbolic; 1 otherwise.
    double scale() const { return k_; }

    /// Largest evaluable radius: table end for Tabulated, +inf otherwise.
    double r_limit() const;

    /// (f, f', f'') at radius r >= 0. Throws std::domain_error for r < 0 and
    /// std::out_of_range past the end of a table.
    WarpEval eval(double r) const;

private:
    WarpingFunction(WarpKind kind, std::string name, double k)
        : kind_(kind), name_(std::move(name)), k_(k) {}

    WarpEval eval_tabulated(double r) const;

    WarpKind kind_;
    std::string name_;
    double k_ = 1.0;
    // tabulated data: nodes plus monotone-cubic node derivatives
    std::vector<double> tr_, tf_, td_;
};

/// First-order coefficient (n-1) f'(r)/f(r) of the radial Laplacian.
/// r = 0 is singular here; the ODE layer owns the series limit.
double drift_coefficient(const WarpingFunction& w, const ModelParams& params, double r);

/// Radial Ricci curvature -(n-1) f''(r)/f(r).
double radial_ricci(const WarpingFunction& w, const ModelParams& params, double r);

/// Scalar curvature of the warped metric,
///   R = -2(n-1) f''/f - (n-1)(n-2) (f'^2 - 1)/f^2.
/// Constant in r for the built-in warps (0, -n(n-1), -1).
double scalar_curvature(const WarpingFunction& w, const ModelParams& params, double r);

/// Grid-sampled witness for the hypotheses sup |f'/f| <= C_o on [R_o, r_max]
/// and f increasing without bound. The bound is only claimed on the recorded
/// grid (samples points, uniform spacing).
struct WarpBoundCertificate {
    double R_o = 0.0;
    double r_max = 0.0;
    double C_o = 0.0;       // observed sup of |f'/f| on the grid
    double f_at_rmax = 0.0;
    bool growth_ok = false; // f' > 0 on the grid and f(r_max) > f(R_o)
    int samples = 0;
    double spacing = 0.0;
};

/// Samples |f'/f| on a uniform grid over [R_o, r_max] (endpoints included).
/// Throws std::invalid_argument on bad arguments and std::runtime_error when
/// a sample sees f <= 0. OpenMP-parallel; the _serial variant is the
/// reference implementation used by the tests and the benchmark.
WarpBoundCertificate certify_warp_bounds(const WarpingFunction& w, double R_o,
                                         double r_max, int samples);
WarpBoundCertificate certify_warp_bounds_serial(const WarpingFunction& w, double R_o,
                                                double r_max, int samples);

} // namespace yamabe

#endif
