#pragma once

// Time-series diagnostics, algebraic decay fits, predicted decay exponents and
// the continuum linear-semigroup oracle for Gaussian data.

#include "cch/grid.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace cch {

struct DiagnosticsSpec {
    /// E_0..E_N and D_0..D_N are recorded.
    int N = 1;
    /// Negative norms ||Lambda^{-s} u|| for each s > 0 (requires mean-zero data).
    std::vector<double> s;
    /// L^p norms for each p (infinity allowed).
    std::vector<double> p;
    /// ||grad^k u|| for k = 0..K.
    int K = 2;

    void validate() const;
};

struct DiagnosticsRow {
    double t = 0.0;
    std::vector<double> E;
    std::vector<double> D;
    std::vector<double> neg;
    std::vector<double> dk;
    std::vector<double> lp;
    double mean = 0.0;
    double linf = 0.0;

    friend bool operator==(const DiagnosticsRow&, const DiagnosticsRow&) = default;
};

DiagnosticsRow make_row(double t, const SpectralField& u_hat, const DiagnosticsSpec& spec);

/// Column names in schema order: t, E0..EN, D0..DN, neg_s_<s>, dk_<k>,
/// lp_<p> (lp_inf for infinity), mean, linf. Numbers use shortest round-trip
/// formatting.
std::vector<std::string> column_names(const DiagnosticsSpec& spec);
std::vector<double> row_values(const DiagnosticsRow& row);
DiagnosticsRow row_from_values(const DiagnosticsSpec& spec, std::span<const double> values);

/// Shortest decimal that parses back to exactly `x` ("inf", "-inf", "nan" for
/// non-finite values).
std::string format_double(double x);

using RowSelector = std::function<double(const DiagnosticsRow&)>;
RowSelector select_dk(int k);
/// Selector for a named schema column, e.g. "dk_1" or "lp_1.5".
RowSelector select_column(const DiagnosticsSpec& spec, const std::string& name);

/// sigma_k = (dim/2)(1/p - 1/2) + k/2. For dim = 3 the admissible range is
/// p in [3/2, 2]; outside it OutOfRange is thrown unless allow_out_of_range,
/// in which case a warning is written to stderr. Other dimensions are an
/// extrapolation of the same heat scaling.
double theoretical_sigma(int k, double p, int dim, bool allow_out_of_range = false);

struct FitWindow {
    double t_lo = 1.0;
    double t_hi = 1e300;
    /// Optional saturation floor: rows with value < floor_factor * floor(t)
    /// are dropped.
    std::function<double(double)> floor;
    double floor_factor = 10.0;
};

/// [1, (L/8)^2]: past t* = (L/8)^2 periodic images of the initial data start
/// to dominate the low-frequency content and the torus departs from the
/// whole-space decay.
FitWindow default_fit_window(const GridSpec& grid);

struct DecayFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    int points_used = 0;
};

/// Least squares line log v = intercept - exponent log t over the rows inside
/// the window. Throws InsufficientData below 5 points and NonPositiveValue if
/// a selected t or value is <= 0.
DecayFit fit_power_law(std::span<const double> t, std::span<const double> v, const FitWindow& window);
DecayFit fit_power_law(std::span<const DiagnosticsRow> rows, const RowSelector& select, const FitWindow& window);

/// u0(x) = A exp(-|x|^2 / (2 w^2)) on R^dim.
struct GaussianData {
    double amplitude = 1.0;
    double width = 1.0;
};

/// ||grad^k e^{-t(Lap^2 - Lap)} u0||_{L2(R^dim)} by adaptive quadrature of the
/// radial Fourier integral, relative error <= 1e-8. Throws QuadratureFailure.
double linear_decay_oracle(int k, const GaussianData& data, double t, int dim = 3);

} // namespace cch
