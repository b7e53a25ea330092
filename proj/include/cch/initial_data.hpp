#pragma once

#include "cch/config.hpp"
#include "cch/grid.hpp"

#include <array>
#include <cstdint>

namespace cch {

/// xoshiro256** seeded through splitmix64. The stream depends only on the
/// 64-bit seed, never on the platform.
class Rng {
public:
    using State = std::array<std::uint64_t, 4>;

    explicit Rng(std::uint64_t seed) noexcept;
    static Rng from_state(const State& s) noexcept;

    std::uint64_t next() noexcept;
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;

    const State& state() const noexcept { return s_; }

private:
    Rng() = default;
    State s_{};
};

struct GeneratedData {
    RealField field;
    /// Generator state after the draw, persisted in checkpoints.
    Rng::State rng_state{};
};

/// gaussian: A exp(-|x - c|^2 / (2 w^2)) with minimum-image distance, minus its
/// mean when mean_zero. random_band: modes m_min <= |m| <= m_max with
/// amplitude |m|^{-slope} and uniform random phases, rescaled so that
/// sqrt(E_target_level) = target. file: whitespace separated samples in
/// storage order. Throws UnreachableTarget, IoError, ConfigError.
GeneratedData generate_initial_data(const GridSpec& grid, const InitialDataSpec& spec);

} // namespace cch
