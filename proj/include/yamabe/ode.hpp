#ifndef YAMABE_ODE_HPP
#define YAMABE_ODE_HPP

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "yamabe/geometry.hpp"

namespace yamabe {

/// Settings for one integration of the radial equation
///   u'' + (n-1)(f'/f) u' = c_n (u^p - u)
/// from the regular center r = 0.
struct OdeConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double r_max = 15.0;
    double series_radius = 1e-3;  // Taylor start hands off to the stepper here
    double blowup_threshold = 1e6;
    double underflow_threshold = 1e-14;
    long max_steps = 2000000;
    double min_step = 1e-14;
    double out_step = 0.05;            // sample spacing beyond r = 1
    double out_geometric_ratio = 1.2;  // sample ratio on (series_radius, 1)
};

/// Throws std::invalid_argument when a field is out of range.
void validate(const OdeConfig& cfg);

enum class Termination { ReachedRmax, BlowUp, Underflow, StepFailure };

std::string_view to_string(Termination t);
Termination termination_from_string(std::string_view s);

struct OdeState {
    double r, u, du;
};

struct Sample {
    double r, u, du;
};

/// One integrated trajectory. Samples start at (0, u0, 0) -- regularity
/// forces u'(0) = 0 -- with r strictly increasing and u > 0 throughout.
struct RadialSolution {
    ModelParams params;
    std::string warp_name;
    double u0 = 0.0;
    std::vector<Sample> samples;
    Termination termination = Termination::ReachedRmax;
    double r_stop = 0.0;
    double rel_tol = 0.0;
    double abs_tol = 0.0;
    // Sum of the embedded local error estimates on u (absolute scale); an
    // upper proxy for the accumulated discretization error.
    double accumulated_error = 0.0;
    long n_steps = 0;
    long n_rejected = 0;
};

/// Two-term Taylor state at r_eps, from u''(0) = c_n (u0^p - u0) / n:
///   u(r_eps)  = u0 + (c_n / 2n)(u0^p - u0) r_eps^2
///   u'(r_eps) =      (c_n /  n)(u0^p - u0) r_eps.
/// Throws std::domain_error for u0 <= 0 or r_eps <= 0.
OdeState series_start(const ModelParams& params, double u0, double r_eps);

/// Integrates from the series start with an embedded Dormand-Prince 5(4)
/// pair under PI step-size control, sampling on a grid that is geometric on
/// (series_radius, 1) and uniform beyond. Terminates at r_max, blow-up,
/// underflow, or step failure; blow-up is a reported outcome, not an error.
/// u0 = 1 short-circuits to the exact constant solution.
RadialSolution integrate(const ModelParams& params, const WarpingFunction& w,
                         double u0, const OdeConfig& cfg);

/// Cubic Hermite interpolation of (u, u') between the stored samples.
/// Throws std::out_of_range outside [0, last sample].
std::pair<double, double> solution_at(const RadialSolution& sol, double r);

/// Wraps an externally supplied trajectory (a table, or a reloaded CSV) in a
/// RadialSolution so the analysis layer can run on it.
RadialSolution solution_from_samples(const ModelParams& params, std::string warp_name,
                                     double u0, std::vector<Sample> samples,
                                     Termination termination, double r_stop);

} // namespace yamabe

#endif
