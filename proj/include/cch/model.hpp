#pragma once

#include "cch/grid.hpp"

namespace cch {

/// Convective Cahn-Hilliard model  u_t + Lap^2 u = Lap phi(u) + gamma beta . grad psi(u)
/// with phi(u) = a u^3 + b u and psi(u) = u^2 / 2. Defaults give the
/// double-well potential phi(u) = u^3 - u; b = +1 selects the stable surrogate.
struct ModelParams {
    double a = 1.0;
    double b = -1.0;
    Wavevector beta{1.0, 1.0, 1.0};
    double gamma = 1.0;
};

/// Stiff linear symbol lambda(xi) = |xi|^4 + |xi|^2 of the split form
/// u_t = -lambda u + N(u).
double linear_symbol(const Wavevector& xi) noexcept;
inline double linear_symbol_k2(double k2) noexcept { return k2 * k2 + k2; }

/// N(u) = Lap(a u^3 + (b - 1) u) + gamma u (beta . grad u). Both powers come
/// from one degree-3 padded evaluation, exact for the cube and the square. The
/// convection is evaluated as gamma beta . grad(u^2 / 2), so the zero mode of
/// the result is exactly 0.
SpectralField nonlinear_term(const SpectralField& u_hat, const ModelParams& params);
SpectralField nonlinear_term(const RealField& u, const ModelParams& params);

/// -lambda(xi) u_hat + N(u).
SpectralField full_rhs(const SpectralField& u_hat, const ModelParams& params);
SpectralField full_rhs(const RealField& u, const ModelParams& params);

/// Direct evaluation of -Lap^2 u + Lap phi(u) + gamma u (beta . grad u) without
/// the stabilizing split; products formed factor by factor in product form.
SpectralField unsplit_rhs(const SpectralField& u_hat, const ModelParams& params);

/// Frozen-coefficient nonlinearity of the fixed-point map:
/// Lap((a w^2 + b - 1) u) + gamma w (beta . grad u). Equals
/// nonlinear_term(u) when w == u.
SpectralField frozen_nonlinear_term(const SpectralField& frozen_hat, const SpectralField& u_hat,
                                    const ModelParams& params);

} // namespace cch
