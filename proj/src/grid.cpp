#include "cch/grid.hpp"

#include "cch/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

namespace cch {

template <class T>
T* FftwAllocator<T>::allocate(std::size_t count) {
    if (count == 0) {
        return nullptr;
    }
    void* ptr = fftw_malloc(count * sizeof(T));
    if (ptr == nullptr) {
        throw std::bad_alloc();
    }
    return static_cast<T*>(ptr);
}

template <class T>
void FftwAllocator<T>::deallocate(T* ptr, std::size_t) noexcept {
    fftw_free(ptr);
}

template struct FftwAllocator<double>;
template struct FftwAllocator<Complex>;

namespace {

std::size_t ipow(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) {
        r *= base;
    }
    return r;
}

std::size_t real_count(int dim, int size) { return ipow(static_cast<std::size_t>(size), dim); }

std::size_t spectral_count(int dim, int size) {
    return ipow(static_cast<std::size_t>(size), dim - 1) * static_cast<std::size_t>(size / 2 + 1);
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

// Plans are created once per (dim, size) and executed through the new-array
// interface, which is safe to call concurrently.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plans] : plans_) {
            fftw_destroy_plan(plans.forward);
            fftw_destroy_plan(plans.backward);
        }
    }

    PlanPair get(int dim, int size) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_pair(dim, size);
        if (auto it = plans_.find(key); it != plans_.end()) {
            return it->second;
        }
        std::array<int, 3> dims{size, size, size};
        AlignedVector<double> real(real_count(dim, size));
        AlignedVector<Complex> spec(spectral_count(dim, size));
        PlanPair plans;
        plans.forward = fftw_plan_dft_r2c(dim, dims.data(), real.data(), as_fftw(spec.data()), FFTW_ESTIMATE);
        plans.backward = fftw_plan_dft_c2r(dim, dims.data(), as_fftw(spec.data()), real.data(), FFTW_ESTIMATE);
        if (plans.forward == nullptr || plans.backward == nullptr) {
            fail(ErrorKind::InvalidArgument, "FFTW could not create a plan for size " + std::to_string(size));
        }
        plans_.emplace(key, plans);
        return plans;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, PlanPair> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

void forward_transform(int dim, int size, const double* in, Complex* out) {
    const auto plans = plan_cache().get(dim, size);
    // r2c leaves its input untouched.
    fftw_execute_dft_r2c(plans.forward, const_cast<double*>(in), as_fftw(out));
}

// Destroys `in`.
void backward_transform(int dim, int size, Complex* in, double* out) {
    const auto plans = plan_cache().get(dim, size);
    fftw_execute_dft_c2r(plans.backward, as_fftw(in), out);
}

int wrap(int m, int size) { return m >= 0 ? m : m + size; }

// Runs fn(linear, partner) over the self-conjugate planes (last index 0 and,
// for even size, size/2) of a half-layout array, visiting each pair once.
template <class Fn>
void for_each_conjugate_pair(int dim, int size, Fn&& fn) {
    const int half = size / 2 + 1;
    const int lead = dim >= 2 ? size : 1;
    const int lead0 = dim == 3 ? size : 1;
    std::array<int, 2> planes{0, size % 2 == 0 ? size / 2 : -1};
    for (int plane : planes) {
        if (plane < 0) {
            continue;
        }
        for (int i0 = 0; i0 < lead0; ++i0) {
            for (int i1 = 0; i1 < lead; ++i1) {
                const int j0 = dim == 3 ? (size - i0) % size : 0;
                const int j1 = dim >= 2 ? (size - i1) % size : 0;
                const std::size_t a = (static_cast<std::size_t>(i0) * lead + i1) * half + plane;
                const std::size_t b = (static_cast<std::size_t>(j0) * lead + j1) * half + plane;
                if (a <= b) {
                    fn(a, b);
                }
            }
        }
    }
}

void symmetrize(std::span<Complex> data, int dim, int size) {
    for_each_conjugate_pair(dim, size, [&](std::size_t a, std::size_t b) {
        const Complex h = 0.5 * (data[a] + std::conj(data[b]));
        data[a] = h;
        data[b] = std::conj(h);
    });
}

double norm_sq_weighted(std::span<const Complex> data, int size) {
    const int half = size / 2 + 1;
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const int last = static_cast<int>(i % half);
        const double w = (last == 0 || (size % 2 == 0 && last == size / 2)) ? 1.0 : 2.0;
        total += w * std::norm(data[i]);
    }
    return total;
}

// Target slots of one source coordinate along a full axis when padding n -> size.
struct Slot {
    int index;
    double factor;
};

int axis_slots(int m, int n, int size, std::array<Slot, 2>& out) {
    if (m == -n / 2) {
        out[0] = {n / 2, 0.5};
        out[1] = {size - n / 2, 0.5};
        return 2;
    }
    out[0] = {wrap(m, size), 1.0};
    return 1;
}

AlignedVector<Complex> pad_spectrum(const SpectralField& field, int size) {
    const GridSpec& g = field.grid();
    const int n = g.n;
    const int dim = g.dim;
    const int half = size / 2 + 1;
    const int lead = dim >= 2 ? size : 1;
    const double scale = 1.0 / static_cast<double>(g.real_size());
    AlignedVector<Complex> out(spectral_count(dim, size), Complex{});
    const auto coeffs = field.coeffs();

    for_each_mode(g, [&](std::size_t idx, const Mode& mode) {
        const Complex c = coeffs[idx] * scale;
        if (c == Complex{}) {
            return;
        }
        const int last = mode.m[dim - 1];
        const double last_factor = last == n / 2 ? 0.5 : 1.0;
        std::array<Slot, 2> s0{Slot{0, 1.0}, Slot{0, 0.0}};
        std::array<Slot, 2> s1{Slot{0, 1.0}, Slot{0, 0.0}};
        int c0 = 1;
        int c1 = 1;
        if (dim == 3) {
            c0 = axis_slots(mode.m[0], n, size, s0);
            c1 = axis_slots(mode.m[1], n, size, s1);
        } else if (dim == 2) {
            c1 = axis_slots(mode.m[0], n, size, s1);
        }
        for (int a = 0; a < c0; ++a) {
            for (int b = 0; b < c1; ++b) {
                const std::size_t t =
                    (static_cast<std::size_t>(s0[a].index) * lead + s1[b].index) * half + last;
                out[t] += c * (s0[a].factor * s1[b].factor * last_factor);
            }
        }
    });
    symmetrize(out, dim, size);
    return out;
}

SpectralField truncate_spectrum(std::span<const Complex> padded, int size, const GridSpec& g) {
    const int n = g.n;
    const int dim = g.dim;
    const int half = size / 2 + 1;
    const int lead = dim >= 2 ? size : 1;
    const double scale = std::pow(static_cast<double>(n) / size, dim);
    SpectralField out(g);
    auto coeffs = out.coeffs();

    auto at = [&](int p0, int p1, int last) -> Complex {
        if (last >= 0) {
            return padded[(static_cast<std::size_t>(wrap(p0, size)) * lead + wrap(p1, size)) * half + last];
        }
        // Negative last-axis entries are implied by Hermitian symmetry.
        return std::conj(
            padded[(static_cast<std::size_t>(wrap(-p0, size)) * lead + wrap(-p1, size)) * half - last]);
    };

    for_each_mode(g, [&](std::size_t idx, const Mode& mode) {
        std::array<int, 2> p0{0, 0};
        std::array<int, 2> p1{0, 0};
        std::array<int, 2> pl{0, 0};
        int c0 = 1;
        int c1 = 1;
        int cl = 1;
        auto sources = [&](int m, std::array<int, 2>& out_m) {
            if (m == -n / 2 || m == n / 2) {
                out_m = {n / 2, -n / 2};
                return 2;
            }
            out_m[0] = m;
            return 1;
        };
        const int last = mode.m[dim - 1];
        if (last == n / 2) {
            pl = {n / 2, -n / 2};
            cl = 2;
        } else {
            pl[0] = last;
        }
        if (dim == 3) {
            c0 = sources(mode.m[0], p0);
            c1 = sources(mode.m[1], p1);
        } else if (dim == 2) {
            c1 = sources(mode.m[0], p1);
        }
        Complex sum{};
        for (int a = 0; a < c0; ++a) {
            for (int b = 0; b < c1; ++b) {
                for (int c = 0; c < cl; ++c) {
                    sum += at(p0[a], p1[b], pl[c]);
                }
            }
        }
        coeffs[idx] = sum * scale;
    });
    return out;
}

AlignedVector<double> padded_real(const SpectralField& field, int size) {
    auto spec = pad_spectrum(field, size);
    AlignedVector<double> real(real_count(field.grid().dim, size));
    backward_transform(field.grid().dim, size, spec.data(), real.data());
    return real;
}

SpectralField forward_truncate(std::span<const double> real, int size, const GridSpec& g) {
    AlignedVector<Complex> spec(spectral_count(g.dim, size));
    forward_transform(g.dim, size, real.data(), spec.data());
    return truncate_spectrum(spec, size, g);
}

} // namespace

void GridSpec::validate() const {
    if (dim < 1 || dim > 3) {
        fail(ErrorKind::InvalidArgument, "grid dim must be 1, 2 or 3 (got " + std::to_string(dim) + ")");
    }
    if (n < 8 || n % 2 != 0) {
        fail(ErrorKind::InvalidArgument, "grid n must be even and >= 8 (got " + std::to_string(n) + ")");
    }
    if (!(box_length > 0.0) || !std::isfinite(box_length)) {
        fail(ErrorKind::InvalidArgument, "grid box length must be positive");
    }
    if (pad_degree < 1) {
        fail(ErrorKind::InvalidArgument, "grid pad_degree must be >= 1");
    }
}

std::size_t GridSpec::real_size() const noexcept { return real_count(dim, n); }
std::size_t GridSpec::spectral_size() const noexcept { return spectral_count(dim, n); }
double GridSpec::cell_volume() const noexcept { return std::pow(spacing(), dim); }
double GridSpec::volume() const noexcept { return std::pow(box_length, dim); }
double GridSpec::base_wavenumber() const noexcept { return 2.0 * std::numbers::pi / box_length; }

std::array<int, 3> GridSpec::real_shape() const noexcept {
    return {dim == 3 ? n : 1, dim >= 2 ? n : 1, n};
}

std::array<int, 3> GridSpec::spectral_shape() const noexcept {
    return {dim == 3 ? n : 1, dim >= 2 ? n : 1, n / 2 + 1};
}

RealField::RealField(const GridSpec& grid) : grid_(grid) {
    grid_.validate();
    samples_.assign(grid_.real_size(), 0.0);
}

RealField::RealField(const GridSpec& grid, std::vector<double> samples) : grid_(grid) {
    grid_.validate();
    if (samples.size() != grid_.real_size()) {
        fail(ErrorKind::InvalidArgument, "sample count does not match grid");
    }
    samples_.assign(samples.begin(), samples.end());
}

Wavevector RealField::position(std::size_t index) const noexcept {
    Wavevector x{};
    const double h = grid_.spacing();
    for (int j = grid_.dim - 1; j >= 0; --j) {
        x[j] = static_cast<double>(index % grid_.n) * h;
        index /= grid_.n;
    }
    return x;
}

bool RealField::all_finite() const noexcept {
    return std::all_of(samples_.begin(), samples_.end(), [](double v) { return std::isfinite(v); });
}

SpectralField::SpectralField(const GridSpec& grid) : grid_(grid) {
    grid_.validate();
    coeffs_.assign(grid_.spectral_size(), Complex{});
}

Mode SpectralField::mode(std::size_t index) const noexcept {
    const int n = grid_.n;
    const int half = grid_.half_n();
    const int last = static_cast<int>(index % half);
    std::size_t rest = index / half;
    Mode mode;
    std::array<int, 3> raw{};
    raw[grid_.dim - 1] = last;
    for (int j = grid_.dim - 2; j >= 0; --j) {
        const int i = static_cast<int>(rest % n);
        rest /= n;
        raw[j] = i < n / 2 ? i : i - n;
        mode.nyquist = mode.nyquist || i == n / 2;
    }
    mode.m = raw;
    mode.weight = (last == 0 || last == n / 2) ? 1.0 : 2.0;
    mode.nyquist = mode.nyquist || last == n / 2;
    return mode;
}

Wavevector SpectralField::wavevector(std::size_t index) const noexcept {
    const Mode md = mode(index);
    const double k0 = grid_.base_wavenumber();
    Wavevector xi{};
    for (int j = 0; j < grid_.dim; ++j) {
        xi[j] = k0 * md.m[j];
    }
    return xi;
}

std::size_t SpectralField::index_of(const std::array<int, 3>& m) const noexcept {
    const int n = grid_.n;
    std::size_t idx = 0;
    for (int j = 0; j < grid_.dim - 1; ++j) {
        idx = idx * n + static_cast<std::size_t>(wrap(m[j], n));
    }
    return idx * grid_.half_n() + static_cast<std::size_t>(m[grid_.dim - 1]);
}

bool SpectralField::all_finite() const noexcept {
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [](const Complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

double SpectralField::mean() const noexcept {
    return coeffs_[0].real() / static_cast<double>(grid_.real_size());
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    if (!(grid_ == other.grid_)) {
        fail(ErrorKind::InvalidArgument, "spectral fields live on different grids");
    }
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        coeffs_[i] += other.coeffs_[i];
    }
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
    if (!(grid_ == other.grid_)) {
        fail(ErrorKind::InvalidArgument, "spectral fields live on different grids");
    }
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        coeffs_[i] -= other.coeffs_[i];
    }
    return *this;
}

SpectralField& SpectralField::operator*=(double factor) noexcept {
    for (auto& c : coeffs_) {
        c *= factor;
    }
    return *this;
}

SpectralField operator+(SpectralField lhs, const SpectralField& rhs) { return lhs += rhs; }
SpectralField operator-(SpectralField lhs, const SpectralField& rhs) { return lhs -= rhs; }
SpectralField operator*(double factor, SpectralField field) { return field *= factor; }

std::vector<double> wavenumber_squared(const GridSpec& grid) {
    std::vector<double> out(grid.spectral_size());
    const double k0 = grid.base_wavenumber();
    for_each_mode(grid, [&](std::size_t idx, const Mode& mode) {
        double s = 0.0;
        for (int j = 0; j < grid.dim; ++j) {
            s += static_cast<double>(mode.m[j]) * mode.m[j];
        }
        out[idx] = s * k0 * k0;
    });
    return out;
}

SpectralField to_spectral(const RealField& field) {
    SpectralField out(field.grid());
    forward_transform(field.grid().dim, field.grid().n, field.samples().data(), out.coeffs().data());
    return out;
}

double hermitian_residue(const SpectralField& field) {
    const GridSpec& g = field.grid();
    const auto c = field.coeffs();
    double anti = 0.0;
    for_each_conjugate_pair(g.dim, g.n, [&](std::size_t a, std::size_t b) {
        const double d = std::norm(0.5 * (c[a] - std::conj(c[b])));
        anti += a == b ? d : 2.0 * d;
    });
    const double total = norm_sq_weighted(c, g.n);
    if (total == 0.0) {
        return 0.0;
    }
    return std::sqrt(anti / total);
}

RealField from_spectral(const SpectralField& field) {
    const GridSpec& g = field.grid();
    const double residue = hermitian_residue(field);
    if (residue > 1e-8) {
        fail(ErrorKind::SymmetryViolation,
             "spectrum is not Hermitian: relative imaginary residue " + std::to_string(residue));
    }
    AlignedVector<Complex> work(field.coeffs().begin(), field.coeffs().end());
    symmetrize(work, g.dim, g.n);
    RealField out(g);
    backward_transform(g.dim, g.n, work.data(), out.samples().data());
    const double inv = 1.0 / static_cast<double>(g.real_size());
    for (double& v : out.samples()) {
        v *= inv;
    }
    return out;
}

void require_mean_zero(const SpectralField& field, const char* what) {
    const GridSpec& g = field.grid();
    const double mean = std::abs(field.mean());
    const double l2 = std::sqrt(g.volume() * norm_sq_weighted(field.coeffs(), g.n)) /
                      static_cast<double>(g.real_size());
    if (mean > 1e-12 * l2) {
        fail(ErrorKind::NonZeroMeanForNegativePower,
             std::string(what) + " requires a mean-zero field (mean " + std::to_string(field.mean()) + ")");
    }
}

SpectralField apply_symbol(const SpectralField& field, const Symbol& symbol) {
    SpectralField out(field.grid());
    auto dst = out.coeffs();
    const auto src = field.coeffs();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const double s = symbol(field.wavevector(i));
        if (i == 0 && !std::isfinite(s)) {
            require_mean_zero(field, "singular multiplier");
            dst[i] = Complex{};
            continue;
        }
        dst[i] = src[i] * s;
    }
    return out;
}

SpectralField apply_lambda_power(const SpectralField& field, double s) {
    if (s == 0.0) {
        return field;
    }
    if (s < 0.0) {
        require_mean_zero(field, "negative power of Lambda");
    }
    const auto k2 = wavenumber_squared(field.grid());
    SpectralField out(field.grid());
    auto dst = out.coeffs();
    const auto src = field.coeffs();
    const double half_s = 0.5 * s;
    for (std::size_t i = 1; i < src.size(); ++i) {
        dst[i] = src[i] * std::pow(k2[i], half_s);
    }
    return out;
}

SpectralField laplacian(const SpectralField& field) {
    const auto k2 = wavenumber_squared(field.grid());
    SpectralField out(field);
    auto c = out.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        c[i] *= -k2[i];
    }
    return out;
}

SpectralField bilaplacian(const SpectralField& field) {
    const auto k2 = wavenumber_squared(field.grid());
    SpectralField out(field);
    auto c = out.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        c[i] *= k2[i] * k2[i];
    }
    return out;
}

SpectralField directional_derivative(const SpectralField& field, const Wavevector& direction) {
    const GridSpec& g = field.grid();
    const double k0 = g.base_wavenumber();
    SpectralField out(g);
    auto dst = out.coeffs();
    const auto src = field.coeffs();
    for_each_mode(g, [&](std::size_t idx, const Mode& mode) {
        if (mode.nyquist) {
            return;
        }
        double proj = 0.0;
        for (int j = 0; j < g.dim; ++j) {
            proj += direction[j] * k0 * mode.m[j];
        }
        dst[idx] = Complex{0.0, proj} * src[idx];
    });
    return out;
}

int padded_size(int n, int degree) {
    // strictly above (degree + 1) n / 2 so that folded Nyquist entries stay exact
    const int bound = ((degree + 1) * n) / 2;
    for (int m = bound + 1;; ++m) {
        int r = m;
        for (int p : {2, 3, 5, 7}) {
            while (r % p == 0) {
                r /= p;
            }
        }
        if (r == 1) {
            return m;
        }
    }
}

SpectralField dealias_product_spectral(std::span<const SpectralField> factors, int degree) {
    if (factors.empty()) {
        fail(ErrorKind::InvalidArgument, "dealias_product needs at least one factor");
    }
    const GridSpec& g = factors.front().grid();
    if (degree > g.pad_degree || static_cast<int>(factors.size()) > degree || degree < 1) {
        fail(ErrorKind::DegreeTooHigh, "product degree " + std::to_string(degree) + " with " +
                                           std::to_string(factors.size()) + " factors exceeds pad_degree " +
                                           std::to_string(g.pad_degree));
    }
    for (const auto& f : factors) {
        if (!(f.grid() == g)) {
            fail(ErrorKind::InvalidArgument, "dealias_product factors live on different grids");
        }
    }
    const int size = padded_size(g.n, degree);
    auto product = padded_real(factors[0], size);
    for (std::size_t k = 1; k < factors.size(); ++k) {
        const auto next = padded_real(factors[k], size);
        for (std::size_t i = 0; i < product.size(); ++i) {
            product[i] *= next[i];
        }
    }
    return forward_truncate(product, size, g);
}

RealField dealias_product(std::span<const RealField> factors, int degree) {
    std::vector<SpectralField> spectra;
    spectra.reserve(factors.size());
    for (const auto& f : factors) {
        spectra.push_back(to_spectral(f));
    }
    return from_spectral(dealias_product_spectral(spectra, degree));
}

std::vector<SpectralField> dealiased_powers(const SpectralField& field, std::span<const int> powers) {
    const GridSpec& g = field.grid();
    int degree = 1;
    for (int p : powers) {
        if (p < 1) {
            fail(ErrorKind::InvalidArgument, "dealiased_powers needs positive powers");
        }
        degree = std::max(degree, p);
    }
    if (degree > g.pad_degree) {
        fail(ErrorKind::DegreeTooHigh,
             "power " + std::to_string(degree) + " exceeds pad_degree " + std::to_string(g.pad_degree));
    }
    const int size = padded_size(g.n, degree);
    const auto base = padded_real(field, size);
    std::vector<SpectralField> out;
    out.reserve(powers.size());
    AlignedVector<double> work(base.size());
    for (int p : powers) {
        for (std::size_t i = 0; i < base.size(); ++i) {
            double v = base[i];
            for (int k = 1; k < p; ++k) {
                v *= base[i];
            }
            work[i] = v;
        }
        out.push_back(forward_truncate(work, size, g));
    }
    return out;
}

} // namespace cch
