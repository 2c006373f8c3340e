#include "yamabe/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "yamabe/analysis.hpp"
#include "yamabe/closed_forms.hpp"
#include "yamabe/geometry.hpp"
#include "yamabe/io.hpp"
#include "yamabe/ode.hpp"

namespace yamabe::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::string out_dir = ".";
    int precision = 17;
    bool strict = false;
};

WarpingFunction make_warp(const std::string& spec, int n) {
    if (spec == "euclidean") return WarpingFunction::euclidean();
    if (spec == "sinh") return WarpingFunction::sinh_unit();
    if (spec == "scaled-hyperbolic") return WarpingFunction::scaled_hyperbolic(n);
    if (spec.rfind("table:", 0) == 0) return io::load_warp_table_csv(spec.substr(6));
    throw std::invalid_argument(
        "unknown warp '" + spec + "' (expected euclidean | sinh | scaled-hyperbolic | table:<path>)");
}

json ode_to_json(const OdeConfig& c) {
    return {{"rel_tol", c.rel_tol},
            {"abs_tol", c.abs_tol},
            {"r_max", c.r_max},
            {"series_radius", c.series_radius},
            {"blowup_threshold", c.blowup_threshold},
            {"underflow_threshold", c.underflow_threshold},
            {"max_steps", c.max_steps},
            {"min_step", c.min_step},
            {"out_step", c.out_step},
            {"out_geometric_ratio", c.out_geometric_ratio}};
}

OdeConfig ode_from_json(const json& j) {
    OdeConfig c;
    c.rel_tol = j.value("rel_tol", c.rel_tol);
    c.abs_tol = j.value("abs_tol", c.abs_tol);
    c.r_max = j.value("r_max", c.r_max);
    c.series_radius = j.value("series_radius", c.series_radius);
    c.blowup_threshold = j.value("blowup_threshold", c.blowup_threshold);
    c.underflow_threshold = j.value("underflow_threshold", c.underflow_threshold);
    c.max_steps = j.value("max_steps", c.max_steps);
    c.min_step = j.value("min_step", c.min_step);
    c.out_step = j.value("out_step", c.out_step);
    c.out_geometric_ratio = j.value("out_geometric_ratio", c.out_geometric_ratio);
    return c;
}

const json& config_node(const json& j) {
    return j.contains("config") ? j.at("config") : j;
}

// Adds the shared integrator flags; returns nothing, options bind into cfg.
void add_ode_options(CLI::App* sub, OdeConfig& cfg) {
    sub->add_option("--rmax", cfg.r_max, "integration endpoint");
    sub->add_option("--rel-tol", cfg.rel_tol, "relative tolerance");
    sub->add_option("--abs-tol", cfg.abs_tol, "absolute tolerance");
    sub->add_option("--series-radius", cfg.series_radius, "Taylor handoff radius");
    sub->add_option("--blowup", cfg.blowup_threshold, "blow-up threshold");
    sub->add_option("--underflow", cfg.underflow_threshold, "underflow threshold");
    sub->add_option("--max-steps", cfg.max_steps, "step budget");
    sub->add_option("--min-step", cfg.min_step, "smallest allowed step");
    sub->add_option("--out-step", cfg.out_step, "sample spacing beyond r=1");
}

void merge_ode_flags(const CLI::App* sub, const OdeConfig& flags, OdeConfig& dst) {
    if (sub->count("--rmax")) dst.r_max = flags.r_max;
    if (sub->count("--rel-tol")) dst.rel_tol = flags.rel_tol;
    if (sub->count("--abs-tol")) dst.abs_tol = flags.abs_tol;
    if (sub->count("--series-radius")) dst.series_radius = flags.series_radius;
    if (sub->count("--blowup")) dst.blowup_threshold = flags.blowup_threshold;
    if (sub->count("--underflow")) dst.underflow_threshold = flags.underflow_threshold;
    if (sub->count("--max-steps")) dst.max_steps = flags.max_steps;
    if (sub->count("--min-step")) dst.min_step = flags.min_step;
    if (sub->count("--out-step")) dst.out_step = flags.out_step;
}

std::vector<double> linspace(double lo, double hi, int count) {
    if (count < 1) throw std::invalid_argument("grid count must be >= 1");
    std::vector<double> xs(count);
    if (count == 1) {
        xs[0] = lo;
        return xs;
    }
    for (int i = 0; i < count; ++i)
        xs[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
    xs.back() = hi;
    return xs;
}

std::optional<DecayFit> try_decay_fit(const RadialSolution& sol, const Classification& cls,
                                      double fit_lo, double fit_hi) {
    if (cls.cls != SolutionClass::Subsolution) return std::nullopt;
    try {
        return decay_fit(sol, fit_lo, fit_hi);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void print_analysis(const Classification& cls, const CompletenessReport& rep,
                    const std::optional<DecayFit>& fit) {
    std::cout << "class: " << to_string(cls.cls);
    if (cls.cls == SolutionClass::Subsolution || cls.cls == SolutionClass::Supersolution)
        std::cout << " (witness_r=" << io::format_float(cls.witness_r, 6) << ")";
    std::cout << "\ncompleteness: " << to_string(rep.verdict)
              << " (length_numeric=" << io::format_float(rep.length_numeric, 10)
              << ", length_total=" << io::format_float(rep.length_total, 10) << ")\n";
    if (fit)
        std::cout << "decay fit: c=" << io::format_float(fit->c, 10)
                  << " C=" << io::format_float(fit->C_tilde, 10)
                  << " rms_log_residual=" << io::format_float(fit->rms_log_residual, 4)
                  << " window=[" << io::format_float(fit->r_lo, 6) << ", "
                  << io::format_float(fit->r_hi, 6) << "]\n";
}

json analysis_json(const Classification& cls, const CompletenessReport& rep,
                   const std::optional<DecayFit>& fit) {
    json j;
    j["class"] = std::string(to_string(cls.cls));
    if (!std::isnan(cls.witness_r)) j["witness_r"] = cls.witness_r;
    j["length_numeric"] = rep.length_numeric;
    if (std::isinf(rep.length_total))
        j["length_total"] = "inf";
    else
        j["length_total"] = rep.length_total;
    j["tail_rate"] = rep.tail_rate;
    j["verdict"] = std::string(to_string(rep.verdict));
    if (fit) {
        j["decay"] = {{"c", fit->c},
                      {"C_tilde", fit->C_tilde},
                      {"r_lo", fit->r_lo},
                      {"r_hi", fit->r_hi},
                      {"rms_log_residual", fit->rms_log_residual},
                      {"n_points", fit->n_points}};
    }
    return j;
}

// ----------------------------------------------------------------- solve --

struct SolveConfig {
    int n = 3;
    std::string warp = "scaled-hyperbolic";
    double u0 = 1.0;
    OdeConfig ode;
    double eq_tol = 1e-7;
    double fit_lo = -1.0;  // < 0 means automatic (fractions of the data end)
    double fit_hi = -1.0;
    std::string prefix = "solution";
};

json solve_to_json(const SolveConfig& c, const CommonOpts& common) {
    return {{"command", "solve"},
            {"n", c.n},
            {"warp", c.warp},
            {"u0", c.u0},
            {"ode", ode_to_json(c.ode)},
            {"eq_tol", c.eq_tol},
            {"fit_lo", c.fit_lo},
            {"fit_hi", c.fit_hi},
            {"prefix", c.prefix},
            {"out_dir", common.out_dir},
            {"precision", common.precision}};
}

SolveConfig solve_from_json(const json& j0, CommonOpts& common) {
    const json& j = config_node(j0);
    SolveConfig c;
    c.n = j.value("n", c.n);
    c.warp = j.value("warp", c.warp);
    c.u0 = j.value("u0", c.u0);
    if (j.contains("ode")) c.ode = ode_from_json(j.at("ode"));
    c.eq_tol = j.value("eq_tol", c.eq_tol);
    c.fit_lo = j.value("fit_lo", c.fit_lo);
    c.fit_hi = j.value("fit_hi", c.fit_hi);
    c.prefix = j.value("prefix", c.prefix);
    common.out_dir = j.value("out_dir", common.out_dir);
    common.precision = j.value("precision", common.precision);
    return c;
}

int run_solve(const SolveConfig& c, const CommonOpts& common) {
    const ModelParams params = model_params(c.n);
    const WarpingFunction warp = make_warp(c.warp, c.n);
    validate(c.ode);
    const RadialSolution sol = integrate(params, warp, c.u0, c.ode);

    const Classification cls = classify(sol, c.eq_tol);
    const double R = sol.samples.back().r;
    const double lo = c.fit_lo >= 0.0 ? c.fit_lo : 0.55 * R;
    const double hi = c.fit_hi >= 0.0 ? c.fit_hi : 0.95 * R;
    const std::optional<DecayFit> fit = try_decay_fit(sol, cls, lo, hi);
    const CompletenessReport rep = conformal_length(sol, fit);

    fs::create_directories(common.out_dir);
    const fs::path csv = fs::path(common.out_dir) / (c.prefix + ".csv");
    const fs::path meta = fs::path(common.out_dir) / (c.prefix + ".json");
    io::write_solution_csv(csv, sol, common.precision);

    json out;
    out["command"] = "solve";
    out["config"] = solve_to_json(c, common);
    out["results"] = io::solution_metadata(sol);
    out["results"].update(analysis_json(cls, rep, fit));
    io::write_json_file(meta, out);

    std::cout << "n=" << c.n << " warp=" << warp.name()
              << " u0=" << io::format_float(c.u0, common.precision) << "\n"
              << "termination: " << to_string(sol.termination)
              << " (r_stop=" << io::format_float(sol.r_stop, 10) << ", "
              << sol.samples.size() << " samples)\n";
    print_analysis(cls, rep, fit);
    std::cout << "wrote " << csv.string() << " and " << meta.string() << "\n";
    return 0;
}

// ----------------------------------------------------------------- sweep --

struct SweepConfig {
    int n = 3;
    std::string warp = "scaled-hyperbolic";
    double u0_min = 0.1;
    double u0_max = 2.0;
    int count = 20;
    std::vector<double> u0_list;
    OdeConfig ode;
    double eq_tol = 1e-7;
    bool serial = false;
    std::string prefix = "sweep";
};

json sweep_to_json(const SweepConfig& c, const CommonOpts& common) {
    return {{"command", "sweep"},
            {"n", c.n},
            {"warp", c.warp},
            {"u0_min", c.u0_min},
            {"u0_max", c.u0_max},
            {"count", c.count},
            {"u0_list", c.u0_list},
            {"ode", ode_to_json(c.ode)},
            {"eq_tol", c.eq_tol},
            {"serial", c.serial},
            {"prefix", c.prefix},
            {"out_dir", common.out_dir},
            {"precision", common.precision},
            {"strict", common.strict}};
}

SweepConfig sweep_from_json(const json& j0, CommonOpts& common) {
    const json& j = config_node(j0);
    SweepConfig c;
    c.n = j.value("n", c.n);
    c.warp = j.value("warp", c.warp);
    c.u0_min = j.value("u0_min", c.u0_min);
    c.u0_max = j.value("u0_max", c.u0_max);
    c.count = j.value("count", c.count);
    c.u0_list = j.value("u0_list", c.u0_list);
    if (j.contains("ode")) c.ode = ode_from_json(j.at("ode"));
    c.eq_tol = j.value("eq_tol", c.eq_tol);
    c.serial = j.value("serial", c.serial);
    c.prefix = j.value("prefix", c.prefix);
    common.out_dir = j.value("out_dir", common.out_dir);
    common.precision = j.value("precision", common.precision);
    common.strict = j.value("strict", common.strict);
    return c;
}

int run_sweep(const SweepConfig& c, const CommonOpts& common) {
    const ModelParams params = model_params(c.n);
    const WarpingFunction warp = make_warp(c.warp, c.n);
    validate(c.ode);
    const std::vector<double> grid =
        c.u0_list.empty() ? linspace(c.u0_min, c.u0_max, c.count) : c.u0_list;
    for (double u0 : grid)
        if (!(u0 > 0.0)) throw std::domain_error("sweep: u0 values must be positive");

    SweepOptions opts;
    opts.eq_tol = c.eq_tol;
    const std::vector<SweepRow> rows = c.serial ? sweep_serial(params, warp, grid, c.ode, opts)
                                                : sweep(params, warp, grid, c.ode, opts);

    fs::create_directories(common.out_dir);
    const fs::path csv = fs::path(common.out_dir) / (c.prefix + ".csv");
    const fs::path meta = fs::path(common.out_dir) / (c.prefix + ".json");
    io::write_sweep_csv(csv, rows, common.precision);
    json out;
    out["command"] = "sweep";
    out["config"] = sweep_to_json(c, common);
    out["report"] = io::sweep_report(rows);
    io::write_json_file(meta, out);

    int n_sub = 0, n_sup = 0, n_one = 0, n_ind = 0, n_fail = 0;
    for (const SweepRow& row : rows) {
        if (!row.error.empty() || row.termination == Termination::StepFailure) n_fail++;
        if (!row.error.empty()) continue;
        switch (row.classification.cls) {
        case SolutionClass::ConstantOne: n_one++; break;
        case SolutionClass::Subsolution: n_sub++; break;
        case SolutionClass::Supersolution: n_sup++; break;
        case SolutionClass::Indeterminate: n_ind++; break;
        }
    }
    std::cout << rows.size() << " rows: " << n_sub << " subsolution, " << n_one
              << " constant-one, " << n_sup << " supersolution, " << n_ind
              << " indeterminate\n"
              << "wrote " << csv.string() << " and " << meta.string() << "\n";
    if (common.strict && n_fail > 0) {
        std::cerr << "strict mode: " << n_fail << " failed row(s)\n";
        return 1;
    }
    return 0;
}

// ---------------------------------------------------------------- verify --

struct VerifyConfig {
    std::string family = "hyperbolic";
    int n = 3;
    double b = 2.0;
    double grid_min = 0.01;
    double grid_max = 0.95;
    int grid_count = 200;
    double tol_residual = 1e-9;
    double tol_ode = 1e-6;
    double tol_factorization = 1e-12;
    OdeConfig ode;
    std::string prefix = "verify";
};

json verify_to_json(const VerifyConfig& c, const CommonOpts& common) {
    return {{"command", "verify"},
            {"family", c.family},
            {"n", c.n},
            {"b", c.b},
            {"grid_min", c.grid_min},
            {"grid_max", c.grid_max},
            {"grid_count", c.grid_count},
            {"tol_residual", c.tol_residual},
            {"tol_ode", c.tol_ode},
            {"tol_factorization", c.tol_factorization},
            {"ode", ode_to_json(c.ode)},
            {"prefix", c.prefix},
            {"out_dir", common.out_dir},
            {"precision", common.precision}};
}

VerifyConfig verify_from_json(const json& j0, CommonOpts& common) {
    const json& j = config_node(j0);
    VerifyConfig c;
    c.family = j.value("family", c.family);
    c.n = j.value("n", c.n);
    c.b = j.value("b", c.b);
    c.grid_min = j.value("grid_min", c.grid_min);
    c.grid_max = j.value("grid_max", c.grid_max);
    c.grid_count = j.value("grid_count", c.grid_count);
    c.tol_residual = j.value("tol_residual", c.tol_residual);
    c.tol_ode = j.value("tol_ode", c.tol_ode);
    c.tol_factorization = j.value("tol_factorization", c.tol_factorization);
    if (j.contains("ode")) c.ode = ode_from_json(j.at("ode"));
    c.prefix = j.value("prefix", c.prefix);
    common.out_dir = j.value("out_dir", common.out_dir);
    common.precision = j.value("precision", common.precision);
    return c;
}

int run_verify(const VerifyConfig& c, const CommonOpts& common) {
    const ModelParams params = model_params(c.n);
    if (c.family != "hyperbolic" && c.family != "euclidean")
        throw std::invalid_argument("verify: family must be hyperbolic or euclidean");
    const HyperbolicFamilyParam fam = hyperbolic_family_param(params, c.b);
    const std::vector<double> grid = linspace(c.grid_min, c.grid_max, c.grid_count);

    json results;
    bool ok = true;

    if (c.family == "hyperbolic") {
        const ResidualReport rep = hyperbolic_residual_scan(fam, grid);
        const bool resid_ok = rep.max_abs_residual <= c.tol_residual;
        ok = ok && resid_ok;
        std::cout << "radial residual: max |R| = "
                  << io::format_float(rep.max_abs_residual, 6) << " at rho="
                  << io::format_float(rep.argmax_point, 6) << " (tol "
                  << io::format_float(c.tol_residual, 6) << ") "
                  << (resid_ok ? "ok" : "FAIL") << "\n";
        results["max_abs_residual"] = rep.max_abs_residual;
        results["residual_argmax"] = rep.argmax_point;

        const double u0 = std::pow(c.b, -0.5 * (c.n - 2));
        const WarpingFunction warp = WarpingFunction::scaled_hyperbolic(c.n);
        const RadialSolution sol = integrate(params, warp, u0, c.ode);
        double sup = 0.0, arg = 0.0;
        for (const Sample& s : sol.samples) {
            const double exact = hyperbolic_family_radial(fam, s.r);
            const double rel = std::abs(s.u / exact - 1.0);
            if (rel > sup) {
                sup = rel;
                arg = s.r;
            }
        }
        const bool ode_ok = sup <= c.tol_ode && sol.termination == Termination::ReachedRmax;
        ok = ok && ode_ok;
        std::cout << "ode vs closed form: sup rel err = " << io::format_float(sup, 6)
                  << " at r=" << io::format_float(arg, 6) << " (tol "
                  << io::format_float(c.tol_ode, 6) << ") " << (ode_ok ? "ok" : "FAIL")
                  << "\n";
        results["ode_sup_rel_err"] = sup;
        results["ode_argmax_r"] = arg;
    } else {
        const ResidualReport rep = euclidean_residual_scan(params, c.b, grid);
        const bool resid_ok = rep.max_abs_residual <= c.tol_residual;
        ok = ok && resid_ok;
        std::cout << "euclidean residual: max |R| = "
                  << io::format_float(rep.max_abs_residual, 6) << " at rho="
                  << io::format_float(rep.argmax_point, 6) << " (tol "
                  << io::format_float(c.tol_residual, 6) << ") "
                  << (resid_ok ? "ok" : "FAIL") << "\n";
        results["max_abs_residual"] = rep.max_abs_residual;
        results["residual_argmax"] = rep.argmax_point;

        // w_b = u_b * v is the conformal factorization behind the family
        double worst = 0.0;
        for (double rho : grid) {
            const double w = euclidean_family(params, c.b, rho);
            const double uv = hyperbolic_family(fam, rho) * poincare_factor(params, rho);
            worst = std::max(worst, std::abs(uv / w - 1.0));
        }
        const bool fact_ok = worst <= c.tol_factorization;
        ok = ok && fact_ok;
        std::cout << "factorization w_b = u_b * v: max rel err = "
                  << io::format_float(worst, 6) << " (tol "
                  << io::format_float(c.tol_factorization, 6) << ") "
                  << (fact_ok ? "ok" : "FAIL") << "\n";
        results["factorization_max_rel_err"] = worst;
    }

    fs::create_directories(common.out_dir);
    const fs::path meta = fs::path(common.out_dir) / (c.prefix + ".json");
    json out;
    out["command"] = "verify";
    out["config"] = verify_to_json(c, common);
    out["results"] = results;
    out["pass"] = ok;
    io::write_json_file(meta, out);

    std::cout << "verify: " << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? 0 : 1;
}

// ---------------------------------------------------------- completeness --

struct CompletenessConfig {
    std::string input;
    std::string meta;  // sidecar from a previous solve; optional
    int n = 3;
    std::string warp = "scaled-hyperbolic";
    std::string termination = "reached-rmax";
    double r_stop = -1.0;  // < 0: last sample
    double eq_tol = 1e-7;
    double fit_lo = -1.0;
    double fit_hi = -1.0;
    std::string prefix = "completeness";
};

json completeness_to_json(const CompletenessConfig& c, const CommonOpts& common) {
    return {{"command", "completeness"}, {"input", c.input},   {"meta", c.meta},
            {"n", c.n},                  {"warp", c.warp},     {"termination", c.termination},
            {"r_stop", c.r_stop},        {"eq_tol", c.eq_tol}, {"fit_lo", c.fit_lo},
            {"fit_hi", c.fit_hi},        {"prefix", c.prefix}, {"out_dir", common.out_dir},
            {"precision", common.precision}};
}

CompletenessConfig completeness_from_json(const json& j0, CommonOpts& common) {
    const json& j = config_node(j0);
    CompletenessConfig c;
    c.input = j.value("input", c.input);
    c.meta = j.value("meta", c.meta);
    c.n = j.value("n", c.n);
    c.warp = j.value("warp", c.warp);
    c.termination = j.value("termination", c.termination);
    c.r_stop = j.value("r_stop", c.r_stop);
    c.eq_tol = j.value("eq_tol", c.eq_tol);
    c.fit_lo = j.value("fit_lo", c.fit_lo);
    c.fit_hi = j.value("fit_hi", c.fit_hi);
    c.prefix = j.value("prefix", c.prefix);
    common.out_dir = j.value("out_dir", common.out_dir);
    common.precision = j.value("precision", common.precision);
    return c;
}

int run_completeness(CompletenessConfig c, const CommonOpts& common) {
    if (c.input.empty())
        throw std::invalid_argument("completeness: --input is required");
    if (!c.meta.empty()) {
        const json m = io::read_json_file(c.meta);
        if (m.contains("config")) {
            c.n = m["config"].value("n", c.n);
            c.warp = m["config"].value("warp", c.warp);
        }
        if (m.contains("results")) {
            c.termination = m["results"].value("termination", c.termination);
            c.r_stop = m["results"].value("r_stop", c.r_stop);
        }
    }
    const ModelParams params = model_params(c.n);
    const Termination term = termination_from_string(c.termination);
    RadialSolution sol = io::read_solution_csv(c.input, params, c.warp, term, c.r_stop);
    if (c.r_stop < 0.0) sol.r_stop = sol.samples.back().r;

    const Classification cls = classify(sol, c.eq_tol);
    const double R = sol.samples.back().r;
    const double lo = c.fit_lo >= 0.0 ? c.fit_lo : 0.55 * R;
    const double hi = c.fit_hi >= 0.0 ? c.fit_hi : 0.95 * R;
    const std::optional<DecayFit> fit = try_decay_fit(sol, cls, lo, hi);
    const CompletenessReport rep = conformal_length(sol, fit);

    fs::create_directories(common.out_dir);
    const fs::path meta = fs::path(common.out_dir) / (c.prefix + ".json");
    json out;
    out["command"] = "completeness";
    out["config"] = completeness_to_json(c, common);
    out["results"] = analysis_json(cls, rep, fit);
    io::write_json_file(meta, out);

    print_analysis(cls, rep, fit);
    std::cout << "wrote " << meta.string() << "\n";
    return 0;
}

// -------------------------------------------------------------- curvature --

struct CurvatureConfig {
    std::string warp = "scaled-hyperbolic";
    int n = 3;
    double r_min = 0.1;
    double r_max = 30.0;
    int count = 300;
    double cert_Ro = 1.0;
    int cert_samples = 1000;
    std::string prefix = "curvature";
};

json curvature_to_json(const CurvatureConfig& c, const CommonOpts& common) {
    return {{"command", "curvature"},
            {"warp", c.warp},
            {"n", c.n},
            {"r_min", c.r_min},
            {"r_max", c.r_max},
            {"count", c.count},
            {"cert_Ro", c.cert_Ro},
            {"cert_samples", c.cert_samples},
            {"prefix", c.prefix},
            {"out_dir", common.out_dir},
            {"precision", common.precision}};
}

CurvatureConfig curvature_from_json(const json& j0, CommonOpts& common) {
    const json& j = config_node(j0);
    CurvatureConfig c;
    c.warp = j.value("warp", c.warp);
    c.n = j.value("n", c.n);
    c.r_min = j.value("r_min", c.r_min);
    c.r_max = j.value("r_max", c.r_max);
    c.count = j.value("count", c.count);
    c.cert_Ro = j.value("cert_Ro", c.cert_Ro);
    c.cert_samples = j.value("cert_samples", c.cert_samples);
    c.prefix = j.value("prefix", c.prefix);
    common.out_dir = j.value("out_dir", common.out_dir);
    common.precision = j.value("precision", common.precision);
    return c;
}

int run_curvature(const CurvatureConfig& c, const CommonOpts& common) {
    const ModelParams params = model_params(c.n);
    const WarpingFunction warp = make_warp(c.warp, c.n);
    if (!(c.r_min > 0.0) || !(c.r_max > c.r_min))
        throw std::invalid_argument("curvature: need 0 < r_min < r_max");

    const std::vector<double> grid = linspace(c.r_min, c.r_max, c.count);
    std::ostringstream csv;
    csv << "r,f,df,d2f,radial_ricci,scalar_R\n";
    double R_lo = std::numeric_limits<double>::infinity();
    double R_hi = -std::numeric_limits<double>::infinity();
    for (double r : grid) {
        const WarpEval e = warp.eval(r);
        const double ric = radial_ricci(warp, params, r);
        const double R = scalar_curvature(warp, params, r);
        R_lo = std::min(R_lo, R);
        R_hi = std::max(R_hi, R);
        csv << io::format_float(r, common.precision) << ',' << io::format_float(e.f, common.precision)
            << ',' << io::format_float(e.df, common.precision) << ','
            << io::format_float(e.d2f, common.precision) << ','
            << io::format_float(ric, common.precision) << ','
            << io::format_float(R, common.precision) << '\n';
    }

    const WarpBoundCertificate cert =
        certify_warp_bounds(warp, c.cert_Ro, std::min(c.r_max, warp.r_limit()), c.cert_samples);

    fs::create_directories(common.out_dir);
    const fs::path csv_path = fs::path(common.out_dir) / (c.prefix + ".csv");
    const fs::path meta = fs::path(common.out_dir) / (c.prefix + ".json");
    io::write_text_file(csv_path, csv.str());
    json out;
    out["command"] = "curvature";
    out["config"] = curvature_to_json(c, common);
    out["results"] = {{"scalar_R_min", R_lo},
                      {"scalar_R_max", R_hi},
                      {"certificate",
                       {{"R_o", cert.R_o},
                        {"r_max", cert.r_max},
                        {"C_o", cert.C_o},
                        {"f_at_rmax", cert.f_at_rmax},
                        {"growth_ok", cert.growth_ok},
                        {"samples", cert.samples},
                        {"spacing", cert.spacing}}}};
    io::write_json_file(meta, out);

    std::cout << "scalar curvature over [" << io::format_float(c.r_min, 6) << ", "
              << io::format_float(c.r_max, 6) << "]: min=" << io::format_float(R_lo, 10)
              << " max=" << io::format_float(R_hi, 10) << "\n"
              << "warp bound certificate: C_o=" << io::format_float(cert.C_o, 10)
              << " on [" << io::format_float(cert.R_o, 6) << ", "
              << io::format_float(cert.r_max, 6) << "] (" << cert.samples
              << " samples), growth_ok=" << (cert.growth_ok ? "true" : "false") << "\n"
              << "wrote " << csv_path.string() << " and " << meta.string() << "\n";
    return 0;
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"radial solutions of the critical Yamabe-type equation on warped products"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOpts common;
    app.add_option("--out-dir", common.out_dir, "output directory");
    app.add_option("--precision", common.precision, "significant digits in file output");
    app.add_flag("--strict", common.strict, "fail on per-row errors in sweeps");

    std::string config_path;

    SolveConfig solve_cfg;
    auto* solve = app.add_subcommand("solve", "integrate one trajectory and analyze it");
    solve->add_option("--config", config_path, "JSON config (flags override)");
    solve->add_option("--n", solve_cfg.n, "dimension (>= 3)");
    solve->add_option("--warp", solve_cfg.warp, "euclidean | sinh | scaled-hyperbolic | table:<path>");
    solve->add_option("--u0", solve_cfg.u0, "center value u(0)");
    solve->add_option("--eq-tol", solve_cfg.eq_tol, "constant-one tolerance");
    solve->add_option("--fit-lo", solve_cfg.fit_lo, "decay fit window start");
    solve->add_option("--fit-hi", solve_cfg.fit_hi, "decay fit window end");
    solve->add_option("--prefix", solve_cfg.prefix, "output file prefix");
    add_ode_options(solve, solve_cfg.ode);

    SweepConfig sweep_cfg;
    auto* sweepc = app.add_subcommand("sweep", "classify a grid of center values");
    sweepc->add_option("--config", config_path, "JSON config (flags override)");
    sweepc->add_option("--n", sweep_cfg.n, "dimension (>= 3)");
    sweepc->add_option("--warp", sweep_cfg.warp, "warp spec");
    sweepc->add_option("--u0-min", sweep_cfg.u0_min, "grid start");
    sweepc->add_option("--u0-max", sweep_cfg.u0_max, "grid end");
    sweepc->add_option("--count", sweep_cfg.count, "grid size");
    sweepc->add_option("--u0-list", sweep_cfg.u0_list, "explicit u0 values")->delimiter(',');
    sweepc->add_option("--eq-tol", sweep_cfg.eq_tol, "constant-one tolerance");
    sweepc->add_flag("--serial", sweep_cfg.serial, "use the serial reference path");
    sweepc->add_option("--prefix", sweep_cfg.prefix, "output file prefix");
    add_ode_options(sweepc, sweep_cfg.ode);

    VerifyConfig verify_cfg;
    auto* verify = app.add_subcommand("verify", "closed-form residual and oracle checks");
    verify->add_option("--config", config_path, "JSON config (flags override)");
    verify->add_option("--family", verify_cfg.family, "hyperbolic | euclidean");
    verify->add_option("--n", verify_cfg.n, "dimension (>= 3)");
    verify->add_option("--b", verify_cfg.b, "family parameter (>= 1)");
    verify->add_option("--grid-min", verify_cfg.grid_min, "rho grid start");
    verify->add_option("--grid-max", verify_cfg.grid_max, "rho grid end");
    verify->add_option("--grid-count", verify_cfg.grid_count, "rho grid size");
    verify->add_option("--tol-residual", verify_cfg.tol_residual, "residual tolerance");
    verify->add_option("--tol-ode", verify_cfg.tol_ode, "ODE comparison tolerance");
    verify->add_option("--prefix", verify_cfg.prefix, "output file prefix");
    add_ode_options(verify, verify_cfg.ode);

    CompletenessConfig comp_cfg;
    auto* comp = app.add_subcommand("completeness", "re-analyze an existing solution CSV");
    comp->add_option("--config", config_path, "JSON config (flags override)");
    comp->add_option("--input", comp_cfg.input, "solution CSV path");
    comp->add_option("--meta", comp_cfg.meta, "sidecar JSON from solve");
    comp->add_option("--n", comp_cfg.n, "dimension (used when no meta)");
    comp->add_option("--warp", comp_cfg.warp, "warp name (used when no meta)");
    comp->add_option("--termination", comp_cfg.termination, "termination tag (used when no meta)");
    comp->add_option("--r-stop", comp_cfg.r_stop, "termination radius");
    comp->add_option("--eq-tol", comp_cfg.eq_tol, "constant-one tolerance");
    comp->add_option("--fit-lo", comp_cfg.fit_lo, "decay fit window start");
    comp->add_option("--fit-hi", comp_cfg.fit_hi, "decay fit window end");
    comp->add_option("--prefix", comp_cfg.prefix, "output file prefix");

    CurvatureConfig curv_cfg;
    auto* curv = app.add_subcommand("curvature", "curvature profile and warp certificate");
    curv->add_option("--config", config_path, "JSON config (flags override)");
    curv->add_option("--warp", curv_cfg.warp, "warp spec");
    curv->add_option("--n", curv_cfg.n, "dimension (>= 3)");
    curv->add_option("--r-min", curv_cfg.r_min, "grid start");
    curv->add_option("--r-max", curv_cfg.r_max, "grid end");
    curv->add_option("--count", curv_cfg.count, "grid size");
    curv->add_option("--cert-ro", curv_cfg.cert_Ro, "certificate R_o");
    curv->add_option("--cert-samples", curv_cfg.cert_samples, "certificate sample count");
    curv->add_option("--prefix", curv_cfg.prefix, "output file prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const bool have_config = !config_path.empty();

    try {
        if (solve->parsed()) {
            SolveConfig cfg = solve_cfg;
            if (have_config) {
                CommonOpts file_common = common;
                cfg = solve_from_json(io::read_json_file(config_path), file_common);
                if (!app.count("--out-dir")) common.out_dir = file_common.out_dir;
                if (!app.count("--precision")) common.precision = file_common.precision;
                if (solve->count("--n")) cfg.n = solve_cfg.n;
                if (solve->count("--warp")) cfg.warp = solve_cfg.warp;
                if (solve->count("--u0")) cfg.u0 = solve_cfg.u0;
                if (solve->count("--eq-tol")) cfg.eq_tol = solve_cfg.eq_tol;
                if (solve->count("--fit-lo")) cfg.fit_lo = solve_cfg.fit_lo;
                if (solve->count("--fit-hi")) cfg.fit_hi = solve_cfg.fit_hi;
                if (solve->count("--prefix")) cfg.prefix = solve_cfg.prefix;
                merge_ode_flags(solve, solve_cfg.ode, cfg.ode);
            }
            return run_solve(cfg, common);
        }
        if (sweepc->parsed()) {
            SweepConfig cfg = sweep_cfg;
            if (have_config) {
                CommonOpts file_common = common;
                cfg = sweep_from_json(io::read_json_file(config_path), file_common);
                if (!app.count("--out-dir")) common.out_dir = file_common.out_dir;
                if (!app.count("--precision")) common.precision = file_common.precision;
                if (!app.count("--strict")) common.strict = file_common.strict;
                if (sweepc->count("--n")) cfg.n = sweep_cfg.n;
                if (sweepc->count("--warp")) cfg.warp = sweep_cfg.warp;
                if (sweepc->count("--u0-min")) cfg.u0_min = sweep_cfg.u0_min;
                if (sweepc->count("--u0-max")) cfg.u0_max = sweep_cfg.u0_max;
                if (sweepc->count("--count")) cfg.count = sweep_cfg.count;
                if (sweepc->count("--u0-list")) cfg.u0_list = sweep_cfg.u0_list;
                if (sweepc->count("--eq-tol")) cfg.eq_tol = sweep_cfg.eq_tol;
                if (sweepc->count("--serial")) cfg.serial = sweep_cfg.serial;
                if (sweepc->count("--prefix")) cfg.prefix = sweep_cfg.prefix;
                merge_ode_flags(sweepc, sweep_cfg.ode, cfg.ode);
            }
            return run_sweep(cfg, common);
        }
        if (verify->parsed()) {
            VerifyConfig cfg = verify_cfg;
            if (have_config) {
                CommonOpts file_common = common;
                cfg = verify_from_json(io::read_json_file(config_path), file_common);
                if (!app.count("--out-dir")) common.out_dir = file_common.out_dir;
                if (!app.count("--precision")) common.precision = file_common.precision;
                if (verify->count("--family")) cfg.family = verify_cfg.family;
                if (verify->count("--n")) cfg.n = verify_cfg.n;
                if (verify->count("--b")) cfg.b = verify_cfg.b;
                if (verify->count("--grid-min")) cfg.grid_min = verify_cfg.grid_min;
                if (verify->count("--grid-max")) cfg.grid_max = verify_cfg.grid_max;
                if (verify->count("--grid-count")) cfg.grid_count = verify_cfg.grid_count;
                if (verify->count("--tol-residual")) cfg.tol_residual = verify_cfg.tol_residual;
                if (verify->count("--tol-ode")) cfg.tol_ode = verify_cfg.tol_ode;
                if (verify->count("--prefix")) cfg.prefix = verify_cfg.prefix;
                merge_ode_flags(verify, verify_cfg.ode, cfg.ode);
            }
            return run_verify(cfg, common);
        }
        if (comp->parsed()) {
            CompletenessConfig cfg = comp_cfg;
            if (have_config) {
                CommonOpts file_common = common;
                cfg = completeness_from_json(io::read_json_file(config_path), file_common);
                if (!app.count("--out-dir")) common.out_dir = file_common.out_dir;
                if (!app.count("--precision")) common.precision = file_common.precision;
                if (comp->count("--input")) cfg.input = comp_cfg.input;
                if (comp->count("--meta")) cfg.meta = comp_cfg.meta;
                if (comp->count("--n")) cfg.n = comp_cfg.n;
                if (comp->count("--warp")) cfg.warp = comp_cfg.warp;
                if (comp->count("--termination")) cfg.termination = comp_cfg.termination;
                if (comp->count("--r-stop")) cfg.r_stop = comp_cfg.r_stop;
                if (comp->count("--eq-tol")) cfg.eq_tol = comp_cfg.eq_tol;
                if (comp->count("--fit-lo")) cfg.fit_lo = comp_cfg.fit_lo;
                if (comp->count("--fit-hi")) cfg.fit_hi = comp_cfg.fit_hi;
                if (comp->count("--prefix")) cfg.prefix = comp_cfg.prefix;
            }
            return run_completeness(cfg, common);
        }
        if (curv->parsed()) {
            CurvatureConfig cfg = curv_cfg;
            if (have_config) {
                CommonOpts file_common = common;
                cfg = curvature_from_json(io::read_json_file(config_path), file_common);
                if (!app.count("--out-dir")) common.out_dir = file_common.out_dir;
                if (!app.count("--precision")) common.precision = file_common.precision;
                if (curv->count("--warp")) cfg.warp = curv_cfg.warp;
                if (curv->count("--n")) cfg.n = curv_cfg.n;
                if (curv->count("--r-min")) cfg.r_min = curv_cfg.r_min;
                if (curv->count("--r-max")) cfg.r_max = curv_cfg.r_max;
                if (curv->count("--count")) cfg.count = curv_cfg.count;
                if (curv->count("--cert-ro")) cfg.cert_Ro = curv_cfg.cert_Ro;
                if (curv->count("--cert-samples")) cfg.cert_samples = curv_cfg.cert_samples;
                if (curv->count("--prefix")) cfg.prefix = curv_cfg.prefix;
            }
            return run_curvature(cfg, common);
        }
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace yamabe::cli
