#include "yamabe/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace yamabe {

ModelParams model_params(int n) {
    if (n < 3) throw std::domain_error("model_params: n must be >= 3");
    ModelParams mp;
    mp.n = n;
    mp.c_n = static_cast<double>(n - 2) / (4.0 * static_cast<double>(n - 1));
    mp.p = static_cast<double>(n + 2) / static_cast<double>(n - 2);
    return mp;
}

WarpingFunction WarpingFunction::euclidean() {
    return WarpingFunction(WarpKind::Euclidean, "euclidean", 1.0);
}

WarpingFunction WarpingFunction::sinh_unit() {
    return WarpingFunction(WarpKind::Sinh, "sinh", 1.0);
}

WarpingFunction WarpingFunction::scaled_hyperbolic(int n) {
    if (n < 3) throw std::domain_error("scaled_hyperbolic: n must be >= 3");
    double k = std::sqrt(static_cast<double>(n) * (n - 1));
    return WarpingFunction(WarpKind::ScaledHyperbolic, "scaled-hyperbolic", k);
}

namespace {

// Fritsch-Carlson node derivatives for a monotone cubic through (x, y).
std::vector<double> pchip_derivatives(const std::vector<double>& x,
                                      const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> h(n - 1), delta(n - 1), d(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    if (n == 2) {
        d[0] = d[1] = delta[0];
        return d;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d[i] = 0.0;
        } else {
            double w1 = 2.0 * h[i] + h[i - 1];
            double w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d * d0 <= 0.0) return 0.0;
        if (d0 * d1 <= 0.0 && std::abs(d) > 3.0 * std::abs(d0)) return 3.0 * d0;
        return d;
    };
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return d;
}

} // namespace

WarpingFunction WarpingFunction::tabulated(std::vector<WarpTableRow> rows, std::string name) {
    if (rows.size() < 3)
        throw std::invalid_argument("tabulated warp: need at least 3 rows");
    if (rows.front().r != 0.0 || rows.front().f != 0.0)
        throw std::invalid_argument("tabulated warp: table must start at r=0 with f=0");
    if (std::abs(rows.front().df - 1.0) > 1e-9)
        throw std::invalid_argument("tabulated warp: table must have f'(0)=1");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (!(rows[i].r > rows[i - 1].r))
            throw std::invalid_argument("tabulated warp: r must be strictly increasing");
        if (!(rows[i].f > 0.0))
            throw std::invalid_argument("tabulated warp: f must be positive for r > 0");
    }
    WarpingFunction w(WarpKind::Tabulated, std::move(name), 1.0);
    w.tr_.reserve(rows.size());
    w.tf_.reserve(rows.size());
    for (const auto& row : rows) {
        w.tr_.push_back(row.r);
        w.tf_.push_back(row.f);
    }
    w.td_ = pchip_derivatives(w.tr_, w.tf_);
    return w;
}

double WarpingFunction::r_limit() const {
    if (kind_ == WarpKind::Tabulated) return tr_.back();
    return std::numeric_limits<double>::infinity();
}

WarpEval WarpingFunction::eval_tabulated(double r) const {
    if (r > tr_.back())
        throw std::out_of_range("tabulated warp: r past end of table");
    auto it = std::upper_bound(tr_.begin(), tr_.end(), r);
    std::size_t i = (it == tr_.begin()) ? 0 : static_cast<std::size_t>(it - tr_.begin()) - 1;
    if (i + 1 >= tr_.size()) i = tr_.size() - 2;
    const double h = tr_[i + 1] - tr_[i];
    const double t = (r - tr_[i]) / h;
    const double y0 = tf_[i], y1 = tf_[i + 1], d0 = td_[i], d1 = td_[i + 1];
    const double h00 = (2 * t - 3) * t * t + 1, h10 = ((t - 2) * t + 1) * t;
    const double h01 = (3 - 2 * t) * t * t, h11 = (t - 1) * t * t;
    const double g00 = 6 * t * t - 6 * t, g10 = 3 * t * t - 4 * t + 1;
    const double g01 = 6 * t - 6 * t * t, g11 = 3 * t * t - 2 * t;
    WarpEval e;
    e.f = h00 * y0 + h01 * y1 + h * (h10 * d0 + h11 * d1);
    e.df = (g00 * y0 + g01 * y1) / h + g10 * d0 + g11 * d1;
    e.d2f = ((12 * t - 6) * (y0 - y1) / h + (6 * t - 4) * d0 + (6 * t - 2) * d1) / h;
    return e;
}

WarpEval WarpingFunction::eval(double r) const {
    if (r < 0.0) throw std::domain_error("warp eval: r must be >= 0");
    switch (kind_) {
    case WarpKind::Euclidean:
        return {r, 1.0, 0.0};
    case WarpKind::Sinh:
        return {std::sinh(r), std::cosh(r), std::sinh(r)};
    case WarpKind::ScaledHyperbolic:
        return {k_ * std::sinh(r / k_), std::cosh(r / k_), std::sinh(r / k_) / k_};
    case WarpKind::Tabulated:
        return eval_tabulated(r);
    }
    throw std::logic_error("warp eval: unknown kind");
}

double drift_coefficient(const WarpingFunction& w, const ModelParams& params, double r) {
    if (r <= 0.0) throw std::domain_error("drift_coefficient: singular at r <= 0");
    const WarpEval e = w.eval(r);
    return (params.n - 1) * e.df / e.f;
}

double radial_ricci(const WarpingFunction& w, const ModelParams& params, double r) {
    if (r <= 0.0) throw std::domain_error("radial_ricci: singular at r <= 0");
    const WarpEval e = w.eval(r);
    return -(params.n - 1) * e.d2f / e.f;
}

double scalar_curvature(const WarpingFunction& w, const ModelParams& params, double r) {
    if (r <= 0.0) throw std::domain_error("scalar_curvature: singular at r <= 0");
    const WarpEval e = w.eval(r);
    const double n1 = params.n - 1, n2 = params.n - 2;
    return -2.0 * n1 * e.d2f / e.f - n1 * n2 * (e.df * e.df - 1.0) / (e.f * e.f);
}

namespace {

void check_certify_args(const WarpingFunction& w, double R_o, double r_max, int samples) {
    if (!(R_o > 0.0) || !(r_max > R_o))
        throw std::invalid_argument("certify_warp_bounds: need 0 < R_o < r_max");
    if (samples < 2)
        throw std::invalid_argument("certify_warp_bounds: need samples >= 2");
    if (r_max > w.r_limit())
        throw std::out_of_range("certify_warp_bounds: r_max past end of warp table");
}

struct CertScan {
    double c_o = 0.0;
    bool positive = true;
    bool increasing = true;
};

CertScan scan_point(const WarpingFunction& w, double r, const CertScan& acc) {
    CertScan out = acc;
    const WarpEval e = w.eval(r);
    if (!(e.f > 0.0)) {
        out.positive = false;
        return out;
    }
    out.c_o = std::max(out.c_o, std::abs(e.df / e.f));
    if (!(e.df > 0.0)) out.increasing = false;
    return out;
}

WarpBoundCertificate finish_certificate(const WarpingFunction& w, double R_o, double r_max,
                                        int samples, const CertScan& scan) {
    if (!scan.positive)
        throw std::runtime_error("certify_warp_bounds: warp invariant violated, f <= 0 at a sample");
    WarpBoundCertificate cert;
    cert.R_o = R_o;
    cert.r_max = r_max;
    cert.C_o = scan.c_o;
    cert.f_at_rmax = w.eval(r_max).f;
    cert.growth_ok = scan.increasing && cert.f_at_rmax > w.eval(R_o).f;
    cert.samples = samples;
    cert.spacing = (r_max - R_o) / (samples - 1);
    return cert;
}

} // namespace

WarpBoundCertificate certify_warp_bounds_serial(const WarpingFunction& w, double R_o,
                                                double r_max, int samples) {
    check_certify_args(w, R_o, r_max, samples);
    const double dr = (r_max - R_o) / (samples - 1);
    CertScan scan;
    for (int i = 0; i < samples; ++i)
        scan = scan_point(w, (i + 1 == samples) ? r_max : R_o + i * dr, scan);
    return finish_certificate(w, R_o, r_max, samples, scan);
}

WarpBoundCertificate certify_warp_bounds(const WarpingFunction& w, double R_o,
                                         double r_max, int samples) {
    check_certify_args(w, R_o, r_max, samples);
    const double dr = (r_max - R_o) / (samples - 1);
    double c_o = 0.0;
    bool positive = true;
    bool increasing = true;
#pragma omp parallel for schedule(static) reduction(max : c_o) \
    reduction(&& : positive) reduction(&& : increasing)
    for (int i = 0; i < samples; ++i) {
        const double r = (i + 1 == samples) ? r_max : R_o + i * dr;
        const WarpEval e = w.eval(r);
        if (!(e.f > 0.0)) {
            positive = false;
        } else {
            c_o = std::max(c_o, std::abs(e.df / e.f));
            if (!(e.df > 0.0)) increasing = false;
        }
    }
    CertScan scan;
    scan.c_o = c_o;
    scan.positive = positive;
    scan.increasing = increasing;
    return finish_certificate(w, R_o, r_max, samples, scan);
}

} // namespace yamabe
