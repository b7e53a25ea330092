#include "cch/model.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace cch;

namespace {

constexpr double kPi = std::numbers::pi;

double rel_diff(const SpectralField& a, const SpectralField& b) {
    const auto fa = support::full_from_half(a);
    const auto fb = support::full_from_half(b);
    return support::max_diff(fa, fb) / std::max(support::max_abs(fb), 1e-300);
}

// Band-limited field below Nyquist with mean 0.2.
RealField smooth_field(const GridSpec& g, double amp) {
    return support::trig_field(g, [&](const Wavevector& x) {
        double v = 0.2 + std::sin(x[0] + 0.3);
        if (g.dim >= 2) {
            v += 0.7 * std::cos(2 * x[0] - 3 * x[1]) + 0.4 * std::sin(5 * x[1] + 1.0);
        }
        if (g.dim == 3) {
            v += 0.5 * std::sin(x[0] + 2 * x[1] - 4 * x[2]) + 0.3 * std::cos(6 * x[2]);
        }
        return amp * v;
    });
}

} // namespace

TEST_CASE("linear symbol") {
    CHECK(linear_symbol({0.0, 0.0, 0.0}) == 0.0);
    CHECK(linear_symbol({1.0, 0.0, 0.0}) == 2.0);
    CHECK(linear_symbol({1.0, 1.0, 0.0}) == 6.0);
    CHECK(linear_symbol({0.0, 0.0, 2.0}) == 20.0);
}

TEST_CASE("nonlinear term matches an independent dense evaluation") {
    for (int dim = 1; dim <= 2; ++dim) {
        CAPTURE(dim);
        const GridSpec g{dim, 16, 2.0 * kPi, 3};
        const RealField u = support::noise_field(g, 5 + dim, 2.0);
        ModelParams p;
        p.a = 1.3;
        p.b = -0.7;
        p.gamma = 0.9;
        p.beta = {1.0, -2.0, 0.5};
        const SpectralField got = nonlinear_term(u, p);

        // Reference: -|xi|^2 (a u^3 + (b-1) u)^ + gamma i (beta . xi) (u^2/2)^,
        // Nyquist entries of the derivative dropped.
        const auto cube = support::dense_product({&u, &u, &u});
        const auto square = support::dense_product({&u, &u});
        const auto lin = support::direct_dft(u);
        std::vector<Complex> ref(lin.size());
        const int n = g.n;
        const double k0 = 1.0;
        for (std::size_t q = 0; q < ref.size(); ++q) {
            std::array<int, 3> m{0, 0, 0};
            std::size_t r = q;
            for (int j = dim - 1; j >= 0; --j) {
                m[j] = support::signed_index(static_cast<int>(r % n), n);
                r /= n;
            }
            double k2 = 0.0;
            double proj = 0.0;
            bool nyq = false;
            for (int j = 0; j < dim; ++j) {
                k2 += k0 * k0 * m[j] * m[j];
                proj += p.beta[j] * k0 * m[j];
                nyq = nyq || m[j] == -n / 2;
            }
            ref[q] = -k2 * (p.a * cube[q] + (p.b - 1.0) * lin[q]);
            if (!nyq) {
                ref[q] += p.gamma * Complex(0.0, proj) * 0.5 * square[q];
            }
        }
        ref[0] = 0.0;
        const auto full = support::full_from_half(got);
        CHECK(support::max_diff(full, ref) < 1e-12 * support::max_abs(ref));
    }
}

TEST_CASE("zero mode of N vanishes exactly") {
    const GridSpec g{3, 16, 7.0, 3};
    const SpectralField n = nonlinear_term(support::noise_field(g, 9, 3.0), ModelParams{});
    CHECK(n[0] == Complex{});
}

TEST_CASE("split and unsplit right-hand sides agree") {
    for (int dim = 1; dim <= 3; ++dim) {
        CAPTURE(dim);
        const GridSpec g{dim, 16, 2.0 * kPi, 3};
        const SpectralField u = to_spectral(smooth_field(g, 0.8));
        ModelParams p;
        p.beta = {0.3, 1.0, -1.5};
        CHECK(rel_diff(full_rhs(u, p), unsplit_rhs(u, p)) < 1e-12);
        p.b = 1.0;
        p.gamma = 2.0;
        CHECK(rel_diff(full_rhs(u, p), unsplit_rhs(u, p)) < 1e-12);
    }
}

TEST_CASE("frozen nonlinearity reduces to N on the diagonal") {
    for (int dim = 1; dim <= 3; ++dim) {
        const GridSpec g{dim, 16, 2.0 * kPi, 3};
        const SpectralField u = to_spectral(smooth_field(g, 0.5));
        ModelParams p;
        CHECK(rel_diff(frozen_nonlinear_term(u, u, p), nonlinear_term(u, p)) < 1e-12);
    }
}

TEST_CASE("frozen nonlinearity is linear in its second argument") {
    const GridSpec g{2, 16, 2.0 * kPi, 3};
    const SpectralField w = to_spectral(smooth_field(g, 0.5));
    const SpectralField u = to_spectral(support::noise_field(g, 4));
    const SpectralField v = to_spectral(support::noise_field(g, 5));
    ModelParams p;
    const SpectralField lhs = frozen_nonlinear_term(w, 2.0 * u + v, p);
    const SpectralField rhs = 2.0 * frozen_nonlinear_term(w, u, p) + frozen_nonlinear_term(w, v, p);
    CHECK(rel_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("N vanishes for the linear stable surrogate") {
    const GridSpec g{1, 16, 2.0 * kPi, 3};
    ModelParams p;
    p.a = 0.0;
    p.b = 1.0;
    p.gamma = 0.0;
    const SpectralField n = nonlinear_term(smooth_field(g, 1.0), p);
    for (std::size_t i = 0; i < n.size(); ++i) {
        CHECK(n[i] == Complex{});
    }
}
