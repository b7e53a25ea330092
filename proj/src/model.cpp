#include "cch/model.hpp"

#include <array>
#include <vector>

namespace cch {

namespace {

bool has_convection(const ModelParams& p, int dim) {
    if (p.gamma == 0.0) {
        return false;
    }
    for (int j = 0; j < dim; ++j) {
        if (p.beta[j] != 0.0) {
            return true;
        }
    }
    return false;
}

// Product-form convection carries content on the Nyquist planes that the
// divergence form never produces; drop it so both forms agree exactly.
void zero_nyquist(SpectralField& field) {
    auto c = field.coeffs();
    for_each_mode(field.grid(), [&](std::size_t idx, const Mode& mode) {
        if (mode.nyquist) {
            c[idx] = Complex{};
        }
    });
}

} // namespace

double linear_symbol(const Wavevector& xi) noexcept {
    const double k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    return linear_symbol_k2(k2);
}

SpectralField nonlinear_term(const SpectralField& u_hat, const ModelParams& params) {
    const GridSpec& g = u_hat.grid();
    const bool cubic = params.a != 0.0;
    const bool convect = has_convection(params, g.dim);

    std::vector<int> powers;
    if (convect) {
        powers.push_back(2);
    }
    if (cubic) {
        powers.push_back(3);
    }
    std::vector<SpectralField> pw;
    if (!powers.empty()) {
        pw = dealiased_powers(u_hat, powers);
    }
    const SpectralField* square = convect ? &pw[0] : nullptr;
    const SpectralField* cube = cubic ? &pw[convect ? 1 : 0] : nullptr;

    // potential part: Lap(a u^3 + (b - 1) u)
    const auto k2 = wavenumber_squared(g);
    SpectralField out(g);
    auto dst = out.coeffs();
    const auto u = u_hat.coeffs();
    const double lin = params.b - 1.0;
    for (std::size_t i = 0; i < dst.size(); ++i) {
        Complex phi = lin * u[i];
        if (cube != nullptr) {
            phi += params.a * (*cube)[i];
        }
        dst[i] = -k2[i] * phi;
    }

    if (square != nullptr) {
        SpectralField flux = *square;
        flux *= 0.5 * params.gamma;
        out += directional_derivative(flux, params.beta);
    }
    dst[0] = Complex{};
    return out;
}

SpectralField nonlinear_term(const RealField& u, const ModelParams& params) {
    return nonlinear_term(to_spectral(u), params);
}

SpectralField full_rhs(const SpectralField& u_hat, const ModelParams& params) {
    SpectralField out = nonlinear_term(u_hat, params);
    const auto k2 = wavenumber_squared(u_hat.grid());
    auto dst = out.coeffs();
    const auto u = u_hat.coeffs();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] -= linear_symbol_k2(k2[i]) * u[i];
    }
    return out;
}

SpectralField full_rhs(const RealField& u, const ModelParams& params) {
    return full_rhs(to_spectral(u), params);
}

SpectralField unsplit_rhs(const SpectralField& u_hat, const ModelParams& params) {
    const GridSpec& g = u_hat.grid();
    const auto k2 = wavenumber_squared(g);
    SpectralField out(g);
    auto dst = out.coeffs();
    const auto u = u_hat.coeffs();

    std::array<SpectralField, 3> cube_factors{u_hat, u_hat, u_hat};
    const SpectralField cube = dealias_product_spectral(cube_factors, 3);
    for (std::size_t i = 0; i < dst.size(); ++i) {
        const Complex phi = params.a * cube[i] + params.b * u[i];
        dst[i] = -k2[i] * k2[i] * u[i] - k2[i] * phi;
    }
    if (has_convection(params, g.dim)) {
        std::array<SpectralField, 2> conv{u_hat, directional_derivative(u_hat, params.beta)};
        SpectralField c = dealias_product_spectral(conv, 2);
        c *= params.gamma;
        zero_nyquist(c);
        out += c;
    }
    return out;
}

SpectralField frozen_nonlinear_term(const SpectralField& frozen_hat, const SpectralField& u_hat,
                                    const ModelParams& params) {
    const GridSpec& g = u_hat.grid();
    const auto k2 = wavenumber_squared(g);
    SpectralField out(g);
    auto dst = out.coeffs();
    const auto u = u_hat.coeffs();
    const double lin = params.b - 1.0;

    SpectralField mobility(g);
    if (params.a != 0.0) {
        std::array<SpectralField, 3> f{frozen_hat, frozen_hat, u_hat};
        mobility = dealias_product_spectral(f, 3);
    }
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = -k2[i] * (params.a * mobility[i] + lin * u[i]);
    }
    if (has_convection(params, g.dim)) {
        std::array<SpectralField, 2> conv{frozen_hat, directional_derivative(u_hat, params.beta)};
        SpectralField c = dealias_product_spectral(conv, 2);
        c *= params.gamma;
        zero_nyquist(c);
        out += c;
    }
    return out;
}

} // namespace cch
