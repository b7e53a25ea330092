#include "cch/initial_data.hpp"

#include "cch/error.hpp"
#include "cch/functionals.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>

namespace cch {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) noexcept {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double wrapped_offset(double x, double c, double L) {
    double d = std::fmod(x - c, L);
    if (d < -0.5 * L) {
        d += L;
    } else if (d >= 0.5 * L) {
        d -= L;
    }
    return d;
}

RealField gaussian(const GridSpec& g, const InitialDataSpec& spec) {
    RealField u(g);
    Wavevector c{};
    if (spec.center) {
        c = *spec.center;
    } else {
        c.fill(0.5 * g.box_length);
    }
    const double inv = 1.0 / (2.0 * spec.width * spec.width);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const Wavevector x = u.position(i);
        double r2 = 0.0;
        for (int j = 0; j < g.dim; ++j) {
            const double d = wrapped_offset(x[j], c[j], g.box_length);
            r2 += d * d;
        }
        u[i] = spec.amplitude * std::exp(-r2 * inv);
    }
    return u;
}

// Upper half-space representative of a +-m pair on the m_last = 0 plane:
// first nonzero component positive.
bool canonical(const std::array<int, 3>& m, int dim) {
    for (int j = 0; j < dim; ++j) {
        if (m[j] != 0) {
            return m[j] > 0;
        }
    }
    return false;
}

GeneratedData random_band(const GridSpec& g, const InitialDataSpec& spec) {
    Rng rng(spec.seed);
    SpectralField f(g);
    auto c = f.coeffs();
    const int last = g.dim - 1;
    const double lo = static_cast<double>(spec.m_min) * spec.m_min;
    const double hi = static_cast<double>(spec.m_max) * spec.m_max;
    bool any = false;
    for_each_mode(g, [&](std::size_t idx, const Mode& mode) {
        if (mode.nyquist) {
            return;
        }
        double m2 = 0.0;
        for (int j = 0; j < g.dim; ++j) {
            m2 += static_cast<double>(mode.m[j]) * mode.m[j];
        }
        if (m2 < lo || m2 > hi) {
            return;
        }
        if (mode.m[last] == 0 && !canonical(mode.m, g.dim)) {
            return;
        }
        const double amp = std::pow(m2, -0.5 * spec.slope);
        const double phase = 2.0 * std::numbers::pi * rng.uniform();
        c[idx] = std::polar(amp, phase);
        if (mode.m[last] == 0) {
            std::array<int, 3> neg{-mode.m[0], -mode.m[1], -mode.m[2]};
            c[f.index_of(neg)] = std::conj(c[idx]);
        }
        any = true;
    });
    if (!any) {
        fail(ErrorKind::UnreachableTarget, "random_band: no modes in the requested band");
    }
    const double level = std::sqrt(energy_EN(f, spec.target_level));
    if (!(spec.target > 0.0) || !(level > 0.0)) {
        fail(ErrorKind::UnreachableTarget, "random_band: target must be positive");
    }
    f *= spec.target / level;
    return {from_spectral(f), rng.state()};
}

RealField from_file(const GridSpec& g, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::IoError, "cannot open initial data '" + path + "'");
    }
    std::vector<double> values;
    values.reserve(g.real_size());
    double x = 0.0;
    while (in >> x) {
        values.push_back(x);
    }
    if (!in.eof()) {
        fail(ErrorKind::IoError, "initial data '" + path + "': unparseable value");
    }
    if (values.size() != g.real_size()) {
        fail(ErrorKind::ConfigError, "initial data '" + path + "' has " + std::to_string(values.size()) +
                                         " samples, grid needs " + std::to_string(g.real_size()));
    }
    return RealField(g, std::move(values));
}

void subtract_mean(RealField& u) {
    double sum = 0.0;
    for (double v : u.samples()) {
        sum += v;
    }
    const double mean = sum / static_cast<double>(u.size());
    for (double& v : u.samples()) {
        v -= mean;
    }
}

} // namespace

Rng::Rng(std::uint64_t seed) noexcept {
    std::uint64_t x = seed;
    for (auto& w : s_) {
        w = splitmix64(x);
    }
}

Rng Rng::from_state(const State& s) noexcept {
    Rng r;
    r.s_ = s;
    return r;
}

std::uint64_t Rng::next() noexcept {
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
}

double Rng::uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

GeneratedData generate_initial_data(const GridSpec& grid, const InitialDataSpec& spec) {
    grid.validate();
    GeneratedData out{RealField(grid), Rng(spec.seed).state()};
    switch (spec.kind) {
    case InitialKind::Gaussian:
        out.field = gaussian(grid, spec);
        break;
    case InitialKind::RandomBand:
        out = random_band(grid, spec);
        break;
    case InitialKind::File:
        out.field = from_file(grid, spec.path);
        break;
    }
    if (spec.mean_zero && spec.kind != InitialKind::RandomBand) {
        subtract_mean(out.field);
    }
    return out;
}

} // namespace cch
