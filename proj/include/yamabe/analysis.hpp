#ifndef YAMABE_ANALYSIS_HPP
#define YAMABE_ANALYSIS_HPP

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "yamabe/geometry.hpp"
#include "yamabe/ode.hpp"

namespace yamabe {

/// Trichotomy of radial trajectories: non-constant solutions either stay
/// below 1 and decrease, or stay above 1 and increase.
enum class SolutionClass { ConstantOne, Subsolution, Supersolution, Indeterminate };

std::string_view to_string(SolutionClass c);

struct Classification {
    SolutionClass cls = SolutionClass::Indeterminate;
    // First radius from which the defining sign pattern holds through the end
    // of the data; 0 for ConstantOne, NaN for Indeterminate.
    double witness_r = 0.0;
};

/// ConstantOne when sup |u - 1| <= eq_tol; otherwise Sub/Supersolution if the
/// sign pattern (u < 1, u' < 0) resp. (u > 1, u' > 0) holds from some sample
/// onward; Indeterminate when neither is confirmed.
Classification classify(const RadialSolution& sol, double eq_tol = 1e-7);

/// Least-squares exponential fit u ~ C_tilde exp(-c r) on ln u over a window.
struct DecayFit {
    double c = 0.0;
    double C_tilde = 0.0;
    double r_lo = 0.0, r_hi = 0.0;
    double rms_log_residual = 0.0;
    int n_points = 0;
};

/// Fits (r, ln u) over samples with r in [r_lo, r_hi]. Requires the solution
/// to classify as Subsolution and at least 8 usable samples in the window;
/// throws std::domain_error / std::invalid_argument otherwise.
DecayFit decay_fit(const RadialSolution& sol, double r_lo, double r_hi);

/// A fit qualifies for tail extrapolation when the rate is positive, the
/// window spans at least one e-folding, and the fit is tight.
bool fit_usable_for_tail(const DecayFit& fit);

enum class Verdict { Complete, Incomplete, Inconclusive };

std::string_view to_string(Verdict v);

/// Conformal length of the sampled radial ray, ds = u^(2/(n-2)) dr.
struct CompletenessReport {
    double length_numeric = 0.0;  // quadrature over the data
    double tail_rate = 0.0;       // decay rate used for extrapolation, 0 if unused
    double length_total = 0.0;    // may be +infinity
    Verdict verdict = Verdict::Inconclusive;
};

/// Quadrature of u^(2/(n-2)) over the samples plus a tail rule:
///  - constant-one data, or a monotone-increasing run that reached r_max,
///    certifies divergence (Complete, total = +inf);
///  - a usable decay fit certifies a convergent exponential tail
///    (Incomplete, total = numeric + closed-form tail integral);
///  - anything else (including blow-up and step failure) is Inconclusive
///    with total = numeric as the known lower bound.
CompletenessReport conformal_length(const RadialSolution& sol,
                                    const std::optional<DecayFit>& fit);

/// Quadrature witness for the lower bound
///   integral_{r'}^{r} f^(n-1)(s) ds / f^(n-1)(r) >= c' > 0
/// behind the exponential decay estimate. Throws std::runtime_error when the
/// quadrature fails to converge.
double integral_ratio_check(const WarpingFunction& w, const ModelParams& params,
                            double r_prime, double r);

/// Upper barrier u(r) <= 1 - a exp(-C r). max_violation <= 0 means the
/// barrier holds at every sample.
struct BarrierFit {
    double a = 0.0;
    double C = 0.0;
    double max_violation = 0.0;
};

/// Searches the barrier with a_0 = 1 - u(0) and C on a fixed geometric grid
/// (121 points spanning [1e-3, 1e3]), halving a up to 20 times. Requires
/// u(0) < 1 and u <= 1 on the data. A failed search is reported through
/// max_violation > 0, not an exception.
BarrierFit barrier_fit(const RadialSolution& sol);

/// One row of a u0 sweep.
struct SweepRow {
    double u0 = 0.0;
    Classification classification;
    CompletenessReport completeness;
    std::optional<DecayFit> fit;
    Termination termination = Termination::ReachedRmax;
    double r_stop = 0.0;
    std::string error;  // nonempty when this row failed; never aborts the sweep
};

struct SweepOptions {
    double eq_tol = 1e-7;
    // Decay-fit window as fractions of r_max.
    double fit_lo_frac = 0.55;
    double fit_hi_frac = 0.95;
};

/// Runs integrate + classify + decay fit + conformal length for every u0.
/// Rows are independent; the parallel version distributes them over OpenMP
/// threads and is bit-identical to the serial reference.
std::vector<SweepRow> sweep(const ModelParams& params, const WarpingFunction& w,
                            std::span<const double> u0_grid, const OdeConfig& cfg,
                            const SweepOptions& opts = {});
std::vector<SweepRow> sweep_serial(const ModelParams& params, const WarpingFunction& w,
                                   std::span<const double> u0_grid, const OdeConfig& cfg,
                                   const SweepOptions& opts = {});

} // namespace yamabe

#endif
