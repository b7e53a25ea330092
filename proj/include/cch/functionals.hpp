#pragma once

// Norms and functionals of fields on the periodic box. All derivative norms
// use the homogeneous convention ||grad^l u|| := ||Lambda^l u||_{L2}, evaluated
// exactly on the Fourier side via Parseval.

#include "cch/grid.hpp"
#include "cch/model.hpp"

#include <map>
#include <span>
#include <vector>

namespace cch {

/// ||Lambda^r u||_{L2}. For r < 0 the field must be mean-zero and the zero
/// mode is excluded; r = 0 is the plain L2 norm.
double homogeneous_norm(const SpectralField& u_hat, double r);
double homogeneous_norm(const RealField& u, double r);

/// L2(box) inner product computed from spectra.
double inner_product(const SpectralField& f_hat, const SpectralField& g_hat);

/// E_N = sum_{l=0}^N ||grad^l u||^2.
double energy_EN(const SpectralField& u_hat, int N);
double energy_EN(const RealField& u, int N);

/// D_N = sum_{l=0}^N (||grad^{l+1} u||^2 + ||grad^{l+2} u||^2).
double dissipation_DN(const SpectralField& u_hat, int N);
double dissipation_DN(const RealField& u, int N);

/// Rectangle-rule L^p norm ((L/n)^dim sum |u_i|^p)^{1/p}; p = infinity gives
/// the maximum modulus. Exact only for smooth, well resolved fields.
double lp_norm(const RealField& u, double p);

/// Exponents of a Gagliardo-Nirenberg instance
/// ||grad^alpha f||_p <~ ||grad^m f||_q^{1-theta} ||grad^l f||_r^theta.
struct GnExponents {
    double alpha = 0.0;
    double p = 2.0;
    double m = 0.0;
    double q = 2.0;
    double l = 1.0;
    double r = 2.0;
};

/// theta solving alpha/d - 1/p = (m/d - 1/q)(1 - theta) + (l/d - 1/r) theta.
/// Throws ConstraintUnsatisfiable if no theta in [0,1] exists (or (0,1) when
/// p = infinity), or unless 0 <= m, alpha <= l.
double gn_theta(const GnExponents& e, int dim);

/// ||grad^alpha f||_p / (||grad^m f||_q^{1-theta} ||grad^l f||_r^theta).
double gn_ratio(const RealField& f, const GnExponents& e);

/// ||f||_{Hdot^{-s}} / ||f||_{L^p}; requires 1/2 + s/d = 1/p within 1e-12,
/// 0 <= s < d/2, 1 < p <= 2 and a mean-zero field.
double hls_ratio(const RealField& f, double s, double p);

/// RHS - LHS of ||grad^l f|| <= ||grad^{l+k} f||^{1-theta} ||f||_{Hdot^{-s}}^theta
/// with theta = k / (l + k + s). Nonnegative up to rounding.
struct InterpolationGap {
    double lhs = 0.0;
    double rhs = 0.0;
    double gap() const noexcept { return rhs - lhs; }
};
InterpolationGap interpolation_terms(const SpectralField& f_hat, double l, double k, double s);
double interpolation_gap(const RealField& f, double l, double k, double s);

struct EnergyReport {
    double t = 0.0;
    std::map<int, double> E;
    std::map<int, double> D;
    std::map<double, double> neg_norms;
    std::map<double, double> lp_norms;
    double linf = 0.0;
    double mean = 0.0;
};

EnergyReport energy_report(double t, const SpectralField& u_hat, std::span<const int> levels,
                           std::span<const double> neg_s, std::span<const double> p_list);

/// 2 <Lambda^{-s} u, Lambda^{-s} N_nl(u)>, N_nl being the cubic and
/// convective part of N. The (b - 1) Delta u term is grouped with the linear
/// symbol: per mode the pair contributes -2 |xi|^{-2s} (|xi|^4 + b |xi|^2) |u_hat|^2
/// to d/dt ||Lambda^{-s} u||^2, which is non-positive once every active mode
/// has |xi|^2 >= -b, i.e. lies outside the spinodal band when b = -1.
double negative_norm_forcing(const SpectralField& u_hat, const ModelParams& params, double s);

/// ||grad u||_{H^1}^2 = ||grad u||^2 + ||grad^2 u||^2.
double gradient_h1_squared(const SpectralField& u_hat);

/// Discrete mirror of E_1(t) + int_0^t D_1 <= C E_1(0) along recorded rows.
/// The dissipation integral is the left rectangle sum over record intervals.
struct EnergyLadderReport {
    double e0 = 0.0;
    /// max_j (E(t_{j+1}) - E(t_j)) / E(0)
    double max_relative_increase = 0.0;
    /// max_j (E(t_j) + sum_{i<j} D(t_i) (t_{i+1} - t_i)) / E(0)
    double max_ladder_ratio = 0.0;
    bool monotone(double tol) const noexcept { return max_relative_increase <= tol; }
    bool bounded(double factor) const noexcept { return max_ladder_ratio <= factor; }
};
EnergyLadderReport energy_ladder(std::span<const double> t, std::span<const double> energy,
                                 std::span<const double> dissipation);

/// Discrete mirror of E_{-s}(t) <= E_{-s}(0) + C int ||grad u||_{H^1}^2 sqrt(E_{-s}).
/// The constant is measured from the run: C_eff = max_j forcing_j^+ /
/// (||grad u||_{H^1}^2 sqrt(E_{-s}))(t_j).
struct NegativeNormBound {
    double effective_constant = 0.0;
    /// sup_t ||Lambda^{-s} u(t)||
    double sup_norm = 0.0;
    /// sup_t sqrt(bound(t))
    double sup_bound = 0.0;
    std::vector<double> bound;
    bool holds(double factor) const noexcept { return sup_norm <= factor * sup_bound; }
};
NegativeNormBound negative_norm_bound(std::span<const double> t, std::span<const double> neg_norm,
                                      std::span<const double> forcing, std::span<const double> grad_h1_sq);

} // namespace cch
