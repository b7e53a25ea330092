#pragma once

// Independent reference computations for tests: direct O(N^2) DFT, dense
// spectral convolution on the Nyquist-split extended lattice, and small
// field builders. Nothing here calls the transform or padding code.

#include "cch/grid.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

namespace support {

using cch::Complex;
using cch::GridSpec;

inline int signed_index(int i, int n) { return i < n / 2 ? i : i - n; }

/// Full spectrum F[i0, i1, i2] (n per active axis, storage index i, wavenumber
/// signed_index(i)) of real samples by direct summation.
inline std::vector<Complex> direct_dft(const cch::RealField& u) {
    const GridSpec& g = u.grid();
    const int n = g.n;
    const std::size_t total = g.real_size();
    std::vector<Complex> out(total);
    std::vector<std::array<int, 3>> idx(total);
    for (std::size_t p = 0; p < total; ++p) {
        std::size_t r = p;
        std::array<int, 3> a{0, 0, 0};
        for (int j = g.dim - 1; j >= 0; --j) {
            a[j] = static_cast<int>(r % n);
            r /= n;
        }
        idx[p] = a;
    }
    std::vector<Complex> twiddle(n);
    for (int k = 0; k < n; ++k) {
        twiddle[k] = std::polar(1.0, -2.0 * std::numbers::pi * k / n);
    }
    for (std::size_t q = 0; q < total; ++q) {
        Complex sum{};
        for (std::size_t p = 0; p < total; ++p) {
            int phase = 0;
            for (int j = 0; j < g.dim; ++j) {
                phase += idx[q][j] * idx[p][j];
            }
            sum += u[p] * twiddle[phase % n];
        }
        out[q] = sum;
    }
    return out;
}

/// Expands the half layout into the full spectrum using Hermitian symmetry.
inline std::vector<Complex> full_from_half(const cch::SpectralField& f) {
    const GridSpec& g = f.grid();
    const int n = g.n;
    const int h = n / 2 + 1;
    const std::size_t total = g.real_size();
    std::vector<Complex> out(total);
    const int n0 = g.dim == 3 ? n : 1;
    const int n1 = g.dim >= 2 ? n : 1;
    for (int i0 = 0; i0 < n0; ++i0) {
        for (int i1 = 0; i1 < n1; ++i1) {
            for (int i2 = 0; i2 < n; ++i2) {
                const std::size_t full = (static_cast<std::size_t>(i0) * n1 + i1) * n + i2;
                if (i2 <= n / 2) {
                    out[full] = f[(static_cast<std::size_t>(i0) * n1 + i1) * h + i2];
                } else {
                    const int j0 = (n0 - i0) % n0;
                    const int j1 = (n1 - i1) % n1;
                    out[full] = std::conj(f[(static_cast<std::size_t>(j0) * n1 + j1) * h + (n - i2)]);
                }
            }
        }
    }
    return out;
}

inline double max_abs(const std::vector<Complex>& v) {
    double m = 0.0;
    for (const auto& z : v) {
        m = std::max(m, std::abs(z));
    }
    return m;
}

/// Sparse map from integer wavevector to coefficient on an unbounded lattice.
struct Lattice {
    int dim = 1;
    std::vector<std::array<int, 3>> m;
    std::vector<Complex> c;
};

/// Nyquist entries (signed index -n/2) are split equally between -n/2 and +n/2
/// on each axis where they occur.
inline Lattice split_lattice(const std::vector<Complex>& full, const GridSpec& g) {
    const int n = g.n;
    Lattice out;
    out.dim = g.dim;
    // Round-off level entries are dropped so sparse fields stay sparse.
    const double floor = 1e-15 * max_abs(full);
    for (std::size_t p = 0; p < full.size(); ++p) {
        if (std::abs(full[p]) <= floor) {
            continue;
        }
        std::size_t r = p;
        std::array<int, 3> m{0, 0, 0};
        for (int j = g.dim - 1; j >= 0; --j) {
            m[j] = signed_index(static_cast<int>(r % n), n);
            r /= n;
        }
        std::vector<std::array<int, 3>> images{m};
        for (int j = 0; j < g.dim; ++j) {
            if (m[j] == -n / 2) {
                const std::size_t count = images.size();
                for (std::size_t q = 0; q < count; ++q) {
                    auto flip = images[q];
                    flip[j] = n / 2;
                    images.push_back(flip);
                }
            }
        }
        const double share = 1.0 / static_cast<double>(images.size());
        for (const auto& im : images) {
            out.m.push_back(im);
            out.c.push_back(full[p] * share);
        }
    }
    return out;
}

inline Lattice convolve(const Lattice& a, const Lattice& b) {
    Lattice out;
    out.dim = a.dim;
    // Key the result on a dense box large enough for any sum.
    int span = 0;
    for (const auto& m : a.m) {
        for (int j = 0; j < 3; ++j) {
            span = std::max(span, std::abs(m[j]));
        }
    }
    int span_b = 0;
    for (const auto& m : b.m) {
        for (int j = 0; j < 3; ++j) {
            span_b = std::max(span_b, std::abs(m[j]));
        }
    }
    const int R = span + span_b;
    const int W = 2 * R + 1;
    const int w0 = a.dim == 3 ? W : 1;
    const int w1 = a.dim >= 2 ? W : 1;
    std::vector<Complex> box(static_cast<std::size_t>(w0) * w1 * W);
    auto key = [&](const std::array<int, 3>& m) {
        const int k0 = a.dim == 3 ? m[0] + R : 0;
        const int k1 = a.dim == 3 ? m[1] + R : (a.dim == 2 ? m[0] + R : 0);
        const int k2 = m[a.dim - 1] + R;
        return (static_cast<std::size_t>(k0) * w1 + k1) * W + k2;
    };
    for (std::size_t i = 0; i < a.m.size(); ++i) {
        if (a.c[i] == Complex{}) {
            continue;
        }
        for (std::size_t j = 0; j < b.m.size(); ++j) {
            std::array<int, 3> s{a.m[i][0] + b.m[j][0], a.m[i][1] + b.m[j][1], a.m[i][2] + b.m[j][2]};
            box[key(s)] += a.c[i] * b.c[j];
        }
    }
    for (int k0 = 0; k0 < w0; ++k0) {
        for (int k1 = 0; k1 < w1; ++k1) {
            for (int k2 = 0; k2 < W; ++k2) {
                const Complex v = box[(static_cast<std::size_t>(k0) * w1 + k1) * W + k2];
                if (v == Complex{}) {
                    continue;
                }
                std::array<int, 3> m{0, 0, 0};
                if (a.dim == 1) {
                    m = {k2 - R, 0, 0};
                } else if (a.dim == 2) {
                    m = {k1 - R, k2 - R, 0};
                } else {
                    m = {k0 - R, k1 - R, k2 - R};
                }
                out.m.push_back(m);
                out.c.push_back(v);
            }
        }
    }
    return out;
}

/// Restricts to |m_j| <= n/2, folds +-n/2 into the -n/2 slot and returns the
/// full spectrum in storage order, scaled by `scale`.
inline std::vector<Complex> restrict_fold(const Lattice& l, const GridSpec& g, double scale) {
    const int n = g.n;
    std::vector<Complex> out(g.real_size());
    for (std::size_t i = 0; i < l.m.size(); ++i) {
        bool inside = true;
        std::size_t p = 0;
        for (int j = 0; j < g.dim; ++j) {
            const int m = l.m[i][j];
            if (std::abs(m) > n / 2) {
                inside = false;
                break;
            }
            const int slot = m == n / 2 ? n / 2 : (m >= 0 ? m : m + n);
            p = p * n + slot;
        }
        if (inside) {
            out[p] += scale * l.c[i];
        }
    }
    return out;
}

/// Alias-free product of real fields, computed by dense convolution.
inline std::vector<Complex> dense_product(const std::vector<const cch::RealField*>& factors) {
    const GridSpec& g = factors.front()->grid();
    Lattice acc = split_lattice(direct_dft(*factors.front()), g);
    for (std::size_t i = 1; i < factors.size(); ++i) {
        acc = convolve(acc, split_lattice(direct_dft(*factors[i]), g));
    }
    const double total = static_cast<double>(g.real_size());
    return restrict_fold(acc, g, std::pow(total, -static_cast<double>(factors.size() - 1)));
}

inline double max_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

/// Deterministic pseudo-random samples (LCG; independent of the library RNG).
inline cch::RealField noise_field(const GridSpec& g, std::uint64_t seed, double amplitude = 1.0) {
    cch::RealField u(g);
    std::uint64_t x = seed * 2862933555777941757ULL + 3037000493ULL;
    for (std::size_t i = 0; i < u.size(); ++i) {
        x = x * 6364136223846793005ULL + 1442695040888963407ULL;
        u[i] = amplitude * (static_cast<double>(x >> 11) * 0x1.0p-53 - 0.5);
    }
    return u;
}

/// Real field sum of a few Fourier modes below Nyquist, evaluated pointwise.
inline cch::RealField trig_field(const GridSpec& g, const std::function<double(const cch::Wavevector&)>& fn) {
    cch::RealField u(g);
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = fn(u.position(i));
    }
    return u;
}

} // namespace support
