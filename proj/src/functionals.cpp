#include "cch/functionals.hpp"

#include "cch/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cch {

namespace {

// Sum over the full spectrum of |xi|^{2r} |F|^2, scaled so that the result is
// the squared L2(box) norm. For r != 0 the zero mode contributes nothing.
double weighted_energy(const SpectralField& f_hat, double r) {
    const GridSpec& g = f_hat.grid();
    const auto k2 = wavenumber_squared(g);
    const auto c = f_hat.coeffs();
    double sum = 0.0;
    for_each_mode(g, [&](std::size_t i, const Mode& mode) {
        double w = mode.weight * std::norm(c[i]);
        if (r != 0.0) {
            w = k2[i] == 0.0 ? 0.0 : w * std::pow(k2[i], r);
        }
        sum += w;
    });
    const double total = static_cast<double>(g.real_size());
    return g.volume() * sum / (total * total);
}

// Same as weighted_energy but for a batch of integer levels, sharing the
// per-mode loop. levels[j] = l gives sum |xi|^{2l} |F|^2.
std::vector<double> level_energies(const SpectralField& f_hat, int max_level) {
    const GridSpec& g = f_hat.grid();
    const auto k2 = wavenumber_squared(g);
    const auto c = f_hat.coeffs();
    std::vector<double> sums(static_cast<std::size_t>(max_level) + 1, 0.0);
    for_each_mode(g, [&](std::size_t i, const Mode& mode) {
        double w = mode.weight * std::norm(c[i]);
        for (auto& s : sums) {
            s += w;
            w *= k2[i];
        }
    });
    const double total = static_cast<double>(g.real_size());
    for (auto& s : sums) {
        s *= g.volume() / (total * total);
    }
    return sums;
}

double safe_root(double sq) { return std::sqrt(std::max(sq, 0.0)); }

// ||Lambda^alpha f||_{L^p}; alpha = 0 skips the transform pair.
double derivative_lp(const SpectralField& f_hat, double alpha, double p) {
    if (p == 2.0) {
        return safe_root(weighted_energy(f_hat, alpha));
    }
    if (alpha == 0.0) {
        return lp_norm(from_spectral(f_hat), p);
    }
    return lp_norm(from_spectral(apply_lambda_power(f_hat, alpha)), p);
}

double reciprocal(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

} // namespace

double homogeneous_norm(const SpectralField& u_hat, double r) {
    if (r < 0.0) {
        require_mean_zero(u_hat, "homogeneous_norm");
    }
    return safe_root(weighted_energy(u_hat, r));
}

double homogeneous_norm(const RealField& u, double r) { return homogeneous_norm(to_spectral(u), r); }

double inner_product(const SpectralField& f_hat, const SpectralField& g_hat) {
    const GridSpec& g = f_hat.grid();
    if (!(g == g_hat.grid())) {
        fail(ErrorKind::InvalidArgument, "inner_product: grid mismatch");
    }
    const auto a = f_hat.coeffs();
    const auto b = g_hat.coeffs();
    double sum = 0.0;
    for_each_mode(g, [&](std::size_t i, const Mode& mode) {
        sum += mode.weight * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
    });
    const double total = static_cast<double>(g.real_size());
    return g.volume() * sum / (total * total);
}

double energy_EN(const SpectralField& u_hat, int N) {
    if (N < 0) {
        fail(ErrorKind::InvalidArgument, "energy_EN: N must be >= 0");
    }
    const auto levels = level_energies(u_hat, N);
    double e = 0.0;
    for (int l = 0; l <= N; ++l) {
        e += levels[l];
    }
    return e;
}

double energy_EN(const RealField& u, int N) { return energy_EN(to_spectral(u), N); }

double dissipation_DN(const SpectralField& u_hat, int N) {
    if (N < 0) {
        fail(ErrorKind::InvalidArgument, "dissipation_DN: N must be >= 0");
    }
    const auto levels = level_energies(u_hat, N + 2);
    double d = 0.0;
    for (int l = 0; l <= N; ++l) {
        d += levels[l + 1] + levels[l + 2];
    }
    return d;
}

double dissipation_DN(const RealField& u, int N) { return dissipation_DN(to_spectral(u), N); }

double lp_norm(const RealField& u, double p) {
    const auto v = u.samples();
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : v) {
            m = std::max(m, std::abs(x));
        }
        return m;
    }
    if (!(p >= 1.0)) {
        fail(ErrorKind::InvalidArgument, "lp_norm: p must be >= 1, got " + std::to_string(p));
    }
    double sum = 0.0;
    if (p == 2.0) {
        for (double x : v) {
            sum += x * x;
        }
        return std::sqrt(u.grid().cell_volume() * sum);
    }
    for (double x : v) {
        sum += std::pow(std::abs(x), p);
    }
    return std::pow(u.grid().cell_volume() * sum, 1.0 / p);
}

double gn_theta(const GnExponents& e, int dim) {
    constexpr double tol = 1e-12;
    if (!(e.m >= 0.0 && e.alpha >= 0.0 && e.m <= e.l && e.alpha <= e.l)) {
        fail(ErrorKind::ConstraintUnsatisfiable, "gn: need 0 <= m, alpha <= l");
    }
    if (!(e.p >= 1.0 && e.q >= 1.0 && e.r >= 1.0)) {
        fail(ErrorKind::ConstraintUnsatisfiable, "gn: exponents p, q, r must be >= 1");
    }
    const double d = dim;
    const double lhs = e.alpha / d - reciprocal(e.p);
    const double low = e.m / d - reciprocal(e.q);
    const double high = e.l / d - reciprocal(e.r);
    double theta = 0.0;
    if (std::abs(high - low) < tol) {
        if (std::abs(lhs - low) > tol) {
            fail(ErrorKind::ConstraintUnsatisfiable, "gn: scaling relation has no solution");
        }
        theta = std::isinf(e.p) ? 0.5 : 0.0;
    } else {
        theta = (lhs - low) / (high - low);
    }
    if (theta < -tol || theta > 1.0 + tol) {
        fail(ErrorKind::ConstraintUnsatisfiable, "gn: theta = " + std::to_string(theta) + " outside [0,1]");
    }
    if (std::isinf(e.p) && (theta <= tol || theta >= 1.0 - tol)) {
        fail(ErrorKind::ConstraintUnsatisfiable, "gn: p = infinity requires theta in (0,1)");
    }
    return std::clamp(theta, 0.0, 1.0);
}

double gn_ratio(const RealField& f, const GnExponents& e) {
    const double theta = gn_theta(e, f.grid().dim);
    const SpectralField f_hat = to_spectral(f);
    const double num = derivative_lp(f_hat, e.alpha, e.p);
    const double low = derivative_lp(f_hat, e.m, e.q);
    const double high = derivative_lp(f_hat, e.l, e.r);
    const double den = std::pow(low, 1.0 - theta) * std::pow(high, theta);
    if (!(den > 0.0)) {
        fail(ErrorKind::InvalidArgument, "gn_ratio: field has a vanishing norm");
    }
    return num / den;
}

double hls_ratio(const RealField& f, double s, double p) {
    const double d = f.grid().dim;
    if (std::abs(0.5 + s / d - 1.0 / p) > 1e-12) {
        fail(ErrorKind::ConstraintUnsatisfiable, "hls: need 1/2 + s/d = 1/p");
    }
    if (!(s >= 0.0 && s < d / 2.0 && p > 1.0 && p <= 2.0)) {
        fail(ErrorKind::ConstraintUnsatisfiable, "hls: need 0 <= s < d/2 and 1 < p <= 2");
    }
    const SpectralField f_hat = to_spectral(f);
    const double num = homogeneous_norm(f_hat, -s);
    const double den = lp_norm(f, p);
    if (!(den > 0.0)) {
        fail(ErrorKind::InvalidArgument, "hls_ratio: zero field");
    }
    return num / den;
}

InterpolationGap interpolation_terms(const SpectralField& f_hat, double l, double k, double s) {
    if (!(l >= 0.0 && k >= 0.0 && s >= 0.0 && k + s > 0.0)) {
        fail(ErrorKind::InvalidArgument, "interpolation: need l, k, s >= 0 and k + s > 0");
    }
    require_mean_zero(f_hat, "interpolation_gap");
    const double theta = k / (l + k + s);
    InterpolationGap g;
    g.lhs = homogeneous_norm(f_hat, l);
    g.rhs = std::pow(homogeneous_norm(f_hat, l + k), 1.0 - theta) *
            std::pow(homogeneous_norm(f_hat, -s), theta);
    return g;
}

double interpolation_gap(const RealField& f, double l, double k, double s) {
    return interpolation_terms(to_spectral(f), l, k, s).gap();
}

EnergyReport energy_report(double t, const SpectralField& u_hat, std::span<const int> levels,
                           std::span<const double> neg_s, std::span<const double> p_list) {
    EnergyReport rep;
    rep.t = t;
    int top = 0;
    for (int n : levels) {
        if (n < 0) {
            fail(ErrorKind::InvalidArgument, "energy_report: negative level");
        }
        top = std::max(top, n);
    }
    const auto lv = level_energies(u_hat, top + 2);
    for (int n : levels) {
        double e = 0.0;
        double d = 0.0;
        for (int l = 0; l <= n; ++l) {
            e += lv[l];
            d += lv[l + 1] + lv[l + 2];
        }
        rep.E[n] = e;
        rep.D[n] = d;
    }
    for (double s : neg_s) {
        rep.neg_norms[s] = homogeneous_norm(u_hat, -s);
    }
    const RealField u = from_spectral(u_hat);
    for (double p : p_list) {
        rep.lp_norms[p] = lp_norm(u, p);
    }
    rep.linf = lp_norm(u, std::numeric_limits<double>::infinity());
    rep.mean = u_hat.mean();
    return rep;
}

double negative_norm_forcing(const SpectralField& u_hat, const ModelParams& params, double s) {
    // (b - 1) Delta u is quadratic in the energy and belongs with the linear
    // symbol; only the cubic and convective parts count as forcing.
    ModelParams nonlinear = params;
    nonlinear.b = 1.0;
    const SpectralField n_hat = nonlinear_term(u_hat, nonlinear);
    return 2.0 * inner_product(apply_lambda_power(u_hat, -s), apply_lambda_power(n_hat, -s));
}

double gradient_h1_squared(const SpectralField& u_hat) {
    const auto lv = level_energies(u_hat, 2);
    return lv[1] + lv[2];
}

EnergyLadderReport energy_ladder(std::span<const double> t, std::span<const double> energy,
                                 std::span<const double> dissipation) {
    if (t.size() != energy.size() || t.size() != dissipation.size() || t.empty()) {
        fail(ErrorKind::InvalidArgument, "energy_ladder: series length mismatch");
    }
    EnergyLadderReport rep;
    rep.e0 = energy[0];
    if (!(rep.e0 > 0.0)) {
        fail(ErrorKind::NonPositiveValue, "energy_ladder: E(0) must be positive");
    }
    double integral = 0.0;
    rep.max_ladder_ratio = 1.0;
    rep.max_relative_increase = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < t.size(); ++j) {
        integral += dissipation[j - 1] * (t[j] - t[j - 1]);
        rep.max_relative_increase = std::max(rep.max_relative_increase, (energy[j] - energy[j - 1]) / rep.e0);
        rep.max_ladder_ratio = std::max(rep.max_ladder_ratio, (energy[j] + integral) / rep.e0);
    }
    if (t.size() == 1) {
        rep.max_relative_increase = 0.0;
    }
    return rep;
}

NegativeNormBound negative_norm_bound(std::span<const double> t, std::span<const double> neg_norm,
                                      std::span<const double> forcing, std::span<const double> grad_h1_sq) {
    const std::size_t n = t.size();
    if (n == 0 || neg_norm.size() != n || forcing.size() != n || grad_h1_sq.size() != n) {
        fail(ErrorKind::InvalidArgument, "negative_norm_bound: series length mismatch");
    }
    NegativeNormBound rep;
    for (std::size_t j = 0; j < n; ++j) {
        const double weight = grad_h1_sq[j] * neg_norm[j];
        if (weight > 0.0) {
            rep.effective_constant = std::max(rep.effective_constant, std::max(forcing[j], 0.0) / weight);
        }
        rep.sup_norm = std::max(rep.sup_norm, neg_norm[j]);
    }
    rep.bound.resize(n);
    double integral = 0.0;
    rep.bound[0] = neg_norm[0] * neg_norm[0];
    for (std::size_t j = 1; j < n; ++j) {
        integral += grad_h1_sq[j - 1] * neg_norm[j - 1] * (t[j] - t[j - 1]);
        rep.bound[j] = rep.bound[0] + rep.effective_constant * integral;
    }
    for (double b : rep.bound) {
        rep.sup_bound = std::max(rep.sup_bound, std::sqrt(b));
    }
    return rep;
}

} // namespace cch
