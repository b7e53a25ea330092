#pragma once

// Periodic box discretization, FFT transforms, Fourier multipliers and exact
// (zero-padded) dealiasing of polynomial products.
//
// Transform normalization: the forward transform is unnormalized and the
// inverse carries 1/n^dim, so coeff(0) = n^dim * mean(u). Spectral fields use
// the real-to-complex half layout: shape (n, ..., n, n/2 + 1) in row-major
// order, the last axis holding wavenumbers m_last in [0, n/2]. On every other
// axis storage index i maps to m = i for i < n/2 and m = i - n otherwise, so
// m ranges over [-n/2, n/2).

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <new>
#include <span>
#include <vector>

namespace cch {

using Complex = std::complex<double>;

template <class T>
struct FftwAllocator {
    using value_type = T;
    FftwAllocator() noexcept = default;
    template <class U>
    FftwAllocator(const FftwAllocator<U>&) noexcept {}
    T* allocate(std::size_t count);
    void deallocate(T* ptr, std::size_t) noexcept;
    template <class U>
    bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
};

template <class T>
using AlignedVector = std::vector<T, FftwAllocator<T>>;

struct GridSpec {
    int dim = 1;
    int n = 16;
    double box_length = 1.0;
    int pad_degree = 3;

    /// Throws InvalidArgument unless dim in {1,2,3}, n even and >= 8, L > 0.
    void validate() const;

    std::size_t real_size() const noexcept;
    std::size_t spectral_size() const noexcept;
    int half_n() const noexcept { return n / 2 + 1; }
    double spacing() const noexcept { return box_length / n; }
    double cell_volume() const noexcept;
    double volume() const noexcept;

    /// 2*pi/L, the smallest nonzero wavenumber magnitude.
    double base_wavenumber() const noexcept;

    /// Storage shape padded to three axes with leading ones.
    std::array<int, 3> real_shape() const noexcept;
    std::array<int, 3> spectral_shape() const noexcept;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

using Wavevector = std::array<double, 3>;

/// Integer multi-index of a stored spectral entry; unused axes are zero.
struct Mode {
    std::array<int, 3> m{};
    /// Multiplicity of the entry in the full spectrum: 1 on the m_last = 0
    /// and m_last = n/2 planes, 2 elsewhere.
    double weight = 1.0;
    /// True when some axis sits on the Nyquist index.
    bool nyquist = false;
};

class RealField {
public:
    explicit RealField(const GridSpec& grid);
    RealField(const GridSpec& grid, std::vector<double> samples);

    const GridSpec& grid() const noexcept { return grid_; }
    std::span<const double> samples() const noexcept { return {samples_.data(), samples_.size()}; }
    std::span<double> samples() noexcept { return {samples_.data(), samples_.size()}; }
    std::size_t size() const noexcept { return samples_.size(); }
    double operator[](std::size_t i) const noexcept { return samples_[i]; }
    double& operator[](std::size_t i) noexcept { return samples_[i]; }

    /// Coordinates x_j = i_j * L / n of sample `index`.
    Wavevector position(std::size_t index) const noexcept;
    bool all_finite() const noexcept;

private:
    GridSpec grid_;
    AlignedVector<double> samples_;
};

class SpectralField {
public:
    explicit SpectralField(const GridSpec& grid);

    const GridSpec& grid() const noexcept { return grid_; }
    std::span<const Complex> coeffs() const noexcept { return {coeffs_.data(), coeffs_.size()}; }
    std::span<Complex> coeffs() noexcept { return {coeffs_.data(), coeffs_.size()}; }
    std::size_t size() const noexcept { return coeffs_.size(); }
    const Complex& operator[](std::size_t i) const noexcept { return coeffs_[i]; }
    Complex& operator[](std::size_t i) noexcept { return coeffs_[i]; }

    Mode mode(std::size_t index) const noexcept;
    Wavevector wavevector(std::size_t index) const noexcept;
    /// Storage index of multi-index m (m_last must be >= 0).
    std::size_t index_of(const std::array<int, 3>& m) const noexcept;

    bool all_finite() const noexcept;
    double mean() const noexcept;

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(double factor) noexcept;

private:
    GridSpec grid_;
    AlignedVector<Complex> coeffs_;
};

SpectralField operator+(SpectralField lhs, const SpectralField& rhs);
SpectralField operator-(SpectralField lhs, const SpectralField& rhs);
SpectralField operator*(double factor, SpectralField field);

/// Calls fn(index, mode) for every stored spectral entry, in storage order.
template <class Fn>
void for_each_mode(const GridSpec& grid, Fn&& fn) {
    const auto shape = grid.spectral_shape();
    const int n = grid.n;
    std::size_t index = 0;
    for (int i0 = 0; i0 < shape[0]; ++i0) {
        const int m0 = grid.dim == 3 ? (i0 < n / 2 ? i0 : i0 - n) : 0;
        for (int i1 = 0; i1 < shape[1]; ++i1) {
            const int m1 = grid.dim >= 2 ? (i1 < n / 2 ? i1 : i1 - n) : 0;
            for (int i2 = 0; i2 < shape[2]; ++i2, ++index) {
                Mode mode;
                if (grid.dim == 1) {
                    mode.m = {i2, 0, 0};
                } else if (grid.dim == 2) {
                    mode.m = {m1, i2, 0};
                } else {
                    mode.m = {m0, m1, i2};
                }
                mode.weight = (i2 == 0 || i2 == n / 2) ? 1.0 : 2.0;
                mode.nyquist = i2 == n / 2 || (grid.dim >= 2 && i1 == n / 2) ||
                               (grid.dim == 3 && i0 == n / 2);
                fn(index, mode);
            }
        }
    }
}

/// Squared wavenumber magnitude of every stored entry, in storage order.
std::vector<double> wavenumber_squared(const GridSpec& grid);

SpectralField to_spectral(const RealField& field);

/// Inverse transform. The Hermitian part of the spectrum is inverted; throws
/// SymmetryViolation if the anti-Hermitian residue exceeds 1e-8 relative.
RealField from_spectral(const SpectralField& field);

/// Relative l2 size of the anti-Hermitian part of the (implied) full spectrum.
double hermitian_residue(const SpectralField& field);

using Symbol = std::function<double(const Wavevector&)>;

/// Multiplies coeff(m) by symbol(xi(m)). If the symbol is non-finite at xi = 0
/// the zero mode is mapped to 0 and the field must be mean-zero.
SpectralField apply_symbol(const SpectralField& field, const Symbol& symbol);

/// Lambda^s = |xi|^s. For s < 0 the input must be mean-zero
/// (|mean| <= 1e-12 ||f||_{L2}); the zero mode is mapped to 0 for all s != 0.
SpectralField apply_lambda_power(const SpectralField& field, double s);

/// Laplacian symbol -|xi|^2 and bilaplacian |xi|^4.
SpectralField laplacian(const SpectralField& field);
SpectralField bilaplacian(const SpectralField& field);

/// i * (direction . xi). Entries on any Nyquist plane are zeroed so that real
/// fields stay real.
SpectralField directional_derivative(const SpectralField& field, const Wavevector& direction);

/// Throws NonZeroMeanForNegativePower if |mean| > 1e-12 * ||f||_{L2}.
void require_mean_zero(const SpectralField& field, const char* what);

/// Smallest 7-smooth size M > (degree + 1) * n / 2.
int padded_size(int n, int degree);

/// Alias-free product of band-limited factors: zero-padded to
/// padded_size(n, degree), multiplied pointwise, truncated back. Nyquist
/// entries are split symmetrically on the way in and folded on the way out,
/// so the result equals the exact spectral convolution restricted to
/// |m_j| <= n/2. Throws DegreeTooHigh when degree > pad_degree or
/// factors.size() > degree.
SpectralField dealias_product_spectral(std::span<const SpectralField> factors, int degree);
RealField dealias_product(std::span<const RealField> factors, int degree);

/// Dealiased u^p for each requested power, sharing one padded transform.
std::vector<SpectralField> dealiased_powers(const SpectralField& field, std::span<const int> powers);

} // namespace cch
