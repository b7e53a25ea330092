#include "cch/decay.hpp"

#include "cch/error.hpp"
#include "cch/functionals.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>

namespace cch {

namespace {

double sphere_area(int dim) {
    switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default: fail(ErrorKind::InvalidArgument, "dimension must be 1, 2 or 3");
    }
}

std::string p_label(double p) { return std::isinf(p) ? std::string("inf") : format_double(p); }

} // namespace

void DiagnosticsSpec::validate() const {
    if (N < 0 || K < 0) {
        fail(ErrorKind::InvalidArgument, "diagnostics: N and K must be >= 0");
    }
    for (double x : s) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            fail(ErrorKind::InvalidArgument, "diagnostics: s values must be positive");
        }
    }
    for (double x : p) {
        if (!(x >= 1.0)) {
            fail(ErrorKind::InvalidArgument, "diagnostics: p values must be >= 1");
        }
    }
}

DiagnosticsRow make_row(double t, const SpectralField& u_hat, const DiagnosticsSpec& spec) {
    DiagnosticsRow row;
    row.t = t;
    std::vector<int> levels(static_cast<std::size_t>(spec.N) + 1);
    for (int n = 0; n <= spec.N; ++n) {
        levels[n] = n;
    }
    const EnergyReport rep = energy_report(t, u_hat, levels, spec.s, spec.p);
    for (int n = 0; n <= spec.N; ++n) {
        row.E.push_back(rep.E.at(n));
        row.D.push_back(rep.D.at(n));
    }
    for (double s : spec.s) {
        row.neg.push_back(rep.neg_norms.at(s));
    }
    for (int k = 0; k <= spec.K; ++k) {
        row.dk.push_back(homogeneous_norm(u_hat, k));
    }
    for (double p : spec.p) {
        row.lp.push_back(rep.lp_norms.at(p));
    }
    row.mean = rep.mean;
    row.linf = rep.linf;
    return row;
}

std::string format_double(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::vector<std::string> column_names(const DiagnosticsSpec& spec) {
    std::vector<std::string> names{"t"};
    for (int n = 0; n <= spec.N; ++n) {
        names.push_back("E" + std::to_string(n));
    }
    for (int n = 0; n <= spec.N; ++n) {
        names.push_back("D" + std::to_string(n));
    }
    for (double s : spec.s) {
        names.push_back("neg_s_" + format_double(s));
    }
    for (int k = 0; k <= spec.K; ++k) {
        names.push_back("dk_" + std::to_string(k));
    }
    for (double p : spec.p) {
        names.push_back("lp_" + p_label(p));
    }
    names.emplace_back("mean");
    names.emplace_back("linf");
    return names;
}

std::vector<double> row_values(const DiagnosticsRow& row) {
    std::vector<double> v{row.t};
    v.insert(v.end(), row.E.begin(), row.E.end());
    v.insert(v.end(), row.D.begin(), row.D.end());
    v.insert(v.end(), row.neg.begin(), row.neg.end());
    v.insert(v.end(), row.dk.begin(), row.dk.end());
    v.insert(v.end(), row.lp.begin(), row.lp.end());
    v.push_back(row.mean);
    v.push_back(row.linf);
    return v;
}

DiagnosticsRow row_from_values(const DiagnosticsSpec& spec, std::span<const double> values) {
    const std::size_t levels = static_cast<std::size_t>(spec.N) + 1;
    const std::size_t orders = static_cast<std::size_t>(spec.K) + 1;
    const std::size_t expected = 1 + 2 * levels + spec.s.size() + orders + spec.p.size() + 2;
    if (values.size() != expected) {
        fail(ErrorKind::InvalidArgument, "row has " + std::to_string(values.size()) + " values, schema needs " +
                                             std::to_string(expected));
    }
    DiagnosticsRow row;
    auto it = values.begin();
    auto take = [&](std::size_t count) {
        std::vector<double> out(it, it + static_cast<std::ptrdiff_t>(count));
        it += static_cast<std::ptrdiff_t>(count);
        return out;
    };
    row.t = *it++;
    row.E = take(levels);
    row.D = take(levels);
    row.neg = take(spec.s.size());
    row.dk = take(orders);
    row.lp = take(spec.p.size());
    row.mean = *it++;
    row.linf = *it++;
    return row;
}

RowSelector select_dk(int k) {
    return [k](const DiagnosticsRow& r) {
        if (k < 0 || static_cast<std::size_t>(k) >= r.dk.size()) {
            fail(ErrorKind::OutOfRange, "dk_" + std::to_string(k) + " not recorded");
        }
        return r.dk[k];
    };
}

RowSelector select_column(const DiagnosticsSpec& spec, const std::string& name) {
    const auto names = column_names(spec);
    const auto pos = std::find(names.begin(), names.end(), name);
    if (pos == names.end()) {
        fail(ErrorKind::InvalidArgument, "unknown column '" + name + "'");
    }
    const auto index = static_cast<std::size_t>(pos - names.begin());
    return [index](const DiagnosticsRow& r) { return row_values(r).at(index); };
}

double theoretical_sigma(int k, double p, int dim, bool allow_out_of_range) {
    if (k < 0) {
        fail(ErrorKind::InvalidArgument, "theoretical_sigma: k must be >= 0");
    }
    if (dim < 1 || dim > 3) {
        fail(ErrorKind::InvalidArgument, "theoretical_sigma: dimension must be 1, 2 or 3");
    }
    const bool in_range = dim != 3 || (p >= 1.5 && p <= 2.0);
    if (!(p >= 1.0)) {
        fail(ErrorKind::OutOfRange, "theoretical_sigma: p must be >= 1");
    }
    if (!in_range) {
        if (!allow_out_of_range) {
            fail(ErrorKind::OutOfRange, "theoretical_sigma: p = " + format_double(p) + " outside [3/2, 2]");
        }
        std::cerr << "warning: theoretical_sigma evaluated at p = " << format_double(p)
                  << " outside the proven range [3/2, 2]\n";
    }
    return 0.5 * dim * (1.0 / p - 0.5) + 0.5 * k;
}

FitWindow default_fit_window(const GridSpec& grid) {
    FitWindow w;
    w.t_lo = 1.0;
    const double horizon = grid.box_length / 8.0;
    w.t_hi = horizon * horizon;
    return w;
}

DecayFit fit_power_law(std::span<const double> t, std::span<const double> v, const FitWindow& window) {
    if (t.size() != v.size()) {
        fail(ErrorKind::InvalidArgument, "fit_power_law: t and v differ in length");
    }
    if (!(window.t_lo < window.t_hi)) {
        fail(ErrorKind::InvalidArgument, "fit_power_law: empty window");
    }
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < window.t_lo || t[i] > window.t_hi) {
            continue;
        }
        if (!(t[i] > 0.0) || !(v[i] > 0.0)) {
            fail(ErrorKind::NonPositiveValue, "fit_power_law: non-positive value at t = " + format_double(t[i]));
        }
        if (window.floor && v[i] < window.floor_factor * window.floor(t[i])) {
            continue;
        }
        x.push_back(std::log(t[i]));
        y.push_back(std::log(v[i]));
    }
    if (x.size() < 5) {
        fail(ErrorKind::InsufficientData,
             "fit_power_law: " + std::to_string(x.size()) + " points in window, need 5");
    }
    const double count = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= count;
    my /= count;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) {
        fail(ErrorKind::InsufficientData, "fit_power_law: all points share one time");
    }
    const double slope = sxy / sxx;
    DecayFit fit;
    fit.exponent = -slope;
    fit.intercept = my - slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + slope * x[i]);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / count);
    fit.t_lo = std::exp(x.front());
    fit.t_hi = std::exp(x.back());
    fit.points_used = static_cast<int>(x.size());
    return fit;
}

DecayFit fit_power_law(std::span<const DiagnosticsRow> rows, const RowSelector& select, const FitWindow& window) {
    std::vector<double> t;
    std::vector<double> v;
    t.reserve(rows.size());
    v.reserve(rows.size());
    for (const auto& r : rows) {
        if (r.t < window.t_lo || r.t > window.t_hi) {
            continue;
        }
        t.push_back(r.t);
        v.push_back(select(r));
    }
    return fit_power_law(t, v, window);
}

double linear_decay_oracle(int k, const GaussianData& data, double t, int dim) {
    if (k < 0 || !(t >= 0.0) || !(data.width > 0.0)) {
        fail(ErrorKind::InvalidArgument, "linear_decay_oracle: need k >= 0, t >= 0, w > 0");
    }
    const double area = sphere_area(dim);
    const double w = data.width;
    const double a = data.amplitude;
    if (a == 0.0) {
        return 0.0;
    }
    // |u0_hat(rho)|^2 = A^2 (2 pi)^dim w^{2 dim} exp(-w^2 rho^2); the (2 pi)^dim
    // cancels against the Plancherel factor. Substituting rho = x / c with
    // c^2 = w^2 + 2t turns the Gaussian part into exp(-x^2).
    const double c = std::sqrt(w * w + 2.0 * t);
    const int power = 2 * k + dim - 1;
    auto integrand = [&](double x) {
        const double rho = x / c;
        const double r2 = rho * rho;
        return std::pow(x, power) * std::exp(-x * x - 2.0 * t * r2 * r2);
    };
    double err = 0.0;
    double l1 = 0.0;
    const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-12, &err, &l1);
    if (!std::isfinite(integral) || !(integral > 0.0) || err > 1e-8 * integral) {
        fail(ErrorKind::QuadratureFailure, "linear_decay_oracle: quadrature did not reach 1e-8 relative");
    }
    const double scale = area * a * a * std::pow(w, 2 * dim) / std::pow(c, power + 1);
    return std::sqrt(scale * integral);
}

} // namespace cch
