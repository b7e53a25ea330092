#pragma once

// Flat "section.key = value" experiment configuration. Lines starting with '#'
// (or trailing "# ...") are comments; unknown and duplicate keys are errors.
//
//   grid.dim, grid.n, grid.L, grid.pad_degree
//   model.a, model.b, model.gamma, model.beta            (beta: "1,1,1")
//   solver.scheme, solver.dt, solver.t_end, solver.record_every, solver.blowup_linf
//   initial.kind                                         (gaussian | random_band | file)
//   initial.amplitude, initial.width, initial.center     (gaussian; center defaults to L/2)
//   initial.seed, initial.slope, initial.m_min, initial.m_max,
//   initial.target, initial.target_level                 (random_band)
//   initial.path                                         (file: whitespace separated samples)
//   initial.mean_zero
//   output.dir, output.csv, output.json, output.checkpoint, output.checkpoint_every
//   diag.N, diag.s, diag.p, diag.K                       (s, p: comma lists; p may be "inf")
//   picard.T, picard.dt, picard.tol, picard.max_iter, picard.start  (linear | zero)

#include "cch/decay.hpp"
#include "cch/grid.hpp"
#include "cch/integrators.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cch {

enum class InitialKind { Gaussian, RandomBand, File };

std::string_view initial_kind_name(InitialKind k) noexcept;

struct InitialDataSpec {
    InitialKind kind = InitialKind::Gaussian;
    double amplitude = 1.0;
    double width = 1.0;
    std::optional<Wavevector> center;
    std::uint64_t seed = 0;
    double slope = 1.0;
    int m_min = 1;
    int m_max = 4;
    /// random_band is rescaled so that sqrt(E_target_level) = target.
    double target = 1e-2;
    int target_level = 1;
    bool mean_zero = false;
    std::string path;

    friend bool operator==(const InitialDataSpec&, const InitialDataSpec&) = default;
};

struct OutputSpec {
    std::string dir = ".";
    std::string csv = "diagnostics.csv";
    std::string json = "summary.json";
    std::string checkpoint = "checkpoint.cch";
    /// 0 writes only the final checkpoint.
    std::int64_t checkpoint_every = 0;

    friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct ExperimentConfig {
    GridSpec grid;
    SolverConfig solver;
    InitialDataSpec initial;
    OutputSpec output;
    DiagnosticsSpec diag;
    PicardOptions picard;
};

bool same_config(const ExperimentConfig& a, const ExperimentConfig& b);

/// Throws ConfigError on syntax errors, unknown or duplicate keys and values
/// that fail validation. Forces initial.mean_zero when diag.s is non-empty.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text form; parse_config(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const ExperimentConfig& cfg);

/// Checks cross-field invariants; throws ConfigError.
void validate_config(ExperimentConfig& cfg);

} // namespace cch
