#pragma once

// One-step integrators for u_t = -lambda u + N(u) and the frozen-coefficient
// Picard iteration used for the local solve.

#include "cch/decay.hpp"
#include "cch/grid.hpp"
#include "cch/model.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cch {

enum class Scheme { IMEX1 = 0, ETD1 = 1, ETDRK2 = 2 };

std::string_view scheme_name(Scheme s) noexcept;
/// Accepts "IMEX1", "ETD1", "ETDRK2" (case-insensitive). Throws InvalidArgument.
Scheme parse_scheme(std::string_view name);

/// Additive source f_hat(t) on the right-hand side, treated like N.
using Forcing = std::function<SpectralField(double t, const GridSpec& grid)>;

struct SolverConfig {
    Scheme scheme = Scheme::ETDRK2;
    double dt = 1e-3;
    double t_end = 1.0;
    int record_every = 1;
    double blowup_linf = 1e6;
    ModelParams params;
    Forcing forcing;

    /// dt > 0, t_end >= 0, record_every >= 1, guard > 0.
    void validate() const;
    /// Number of steps to reach t_end, round(t_end / dt).
    std::int64_t total_steps() const;
};

struct StepperState {
    double t = 0.0;
    std::int64_t step = 0;
    SpectralField u_hat;
};

/// (e^z - 1) / z and (e^z - 1 - z) / z^2, by Taylor series for |z| < 1e-4.
double phi1(double z) noexcept;
double phi2(double z) noexcept;

/// Holds the per-mode exponential and phi tables for one (grid, dt, scheme).
class Stepper {
public:
    Stepper(const GridSpec& grid, const SolverConfig& cfg);

    /// One step; t advances to (step + 1) * dt. Throws BlowUp.
    StepperState advance(const StepperState& state) const;

    const SolverConfig& config() const noexcept { return cfg_; }

private:
    SpectralField rhs_nonlinear(const SpectralField& u_hat, double t) const;
    void check_guard(const SpectralField& u_hat, double t) const;

    GridSpec grid_;
    SolverConfig cfg_;
    std::vector<double> lambda_;
    std::vector<double> decay_;
    std::vector<double> phi1_;
    std::vector<double> phi2_;
};

/// One step of cfg.scheme from `state`. Builds a Stepper each call; loops
/// should hold a Stepper instead.
StepperState step(const StepperState& state, const SolverConfig& cfg);

enum class RunStatus { Completed, BlowUp };

struct Trajectory {
    std::vector<DiagnosticsRow> rows;
    StepperState final_state;
    RunStatus status = RunStatus::Completed;
    std::string message;
};

/// Called for every recorded row with the state it was computed from.
using Recorder = std::function<void(const DiagnosticsRow& row, const StepperState& state)>;
/// Called after every completed step (used for checkpointing).
using StepHook = std::function<void(const StepperState& state)>;

/// Records step 0 and every record_every-th step up to total_steps(). On
/// blow-up the rows recorded so far are kept and status is BlowUp.
Trajectory run_simulation(const RealField& u0, const SolverConfig& cfg, const DiagnosticsSpec& diag,
                          const Recorder& recorder = {}, const StepHook& hook = {});

/// Continues from `start` (step count and all) to total_steps(); the starting
/// row itself is not recorded again.
Trajectory continue_simulation(const StepperState& start, const SolverConfig& cfg, const DiagnosticsSpec& diag,
                               const Recorder& recorder = {}, const StepHook& hook = {});

/// Discrete trajectory u^0..u^K of a fixed-dt IMEX1 run, as used by the
/// Picard comparison.
std::vector<SpectralField> imex1_trajectory(const SpectralField& u0_hat, const ModelParams& params, double dt,
                                            std::int64_t steps);

/// (sum_{j=1}^K dt ||a^j - b^j||_{H^2}^2)^{1/2} with ||.||_{H^2}^2 = E_2.
double discrete_l2h2_distance(const std::vector<SpectralField>& a, const std::vector<SpectralField>& b, double dt);

enum class PicardStart { Linear, Zero };

struct PicardOptions {
    double T = 0.1;
    double dt = 1e-3;
    double tol = 1e-10;
    int max_iter = 50;
    PicardStart start = PicardStart::Linear;
};

struct PicardReport {
    int iterates = 0;
    /// ||u^(i+1) - u^(i)|| in discrete L2(0,T;H^2), one per iterate.
    std::vector<double> differences;
    /// differences[i] / differences[i-1].
    std::vector<double> contraction_factors;
    bool converged = false;
};

struct PicardResult {
    StepperState state;
    PicardReport report;
    std::vector<SpectralField> trajectory;
};

/// Iterates w -> u, u solving the frozen-coefficient linear problem
/// u_t + lambda u = Lap((a w^2 + b - 1) u) + gamma w (beta . grad u) by IMEX1
/// with the same dt, until successive iterates differ by less than tol.
/// Throws NonContraction if max_iter is reached with the last factor >= 1;
/// otherwise reports converged = false.
PicardResult picard_local_solve(const RealField& u0, const PicardOptions& options, const ModelParams& params,
                                double blowup_linf = 1e6);

} // namespace cch
