#include "cch/integrators.hpp"

#include "cch/error.hpp"
#include "cch/functionals.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace cch {

namespace {

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
    return out;
}

void require_finite(const SpectralField& u_hat, double t) {
    if (!u_hat.all_finite()) {
        fail(ErrorKind::BlowUp, "non-finite coefficient at t = " + format_double(t));
    }
}

ModelParams linearized(ModelParams p) {
    p.a = 0.0;
    p.gamma = 0.0;
    return p;
}

double h2_squared(const SpectralField& f_hat) { return energy_EN(f_hat, 2); }

} // namespace

std::string_view scheme_name(Scheme s) noexcept {
    switch (s) {
    case Scheme::IMEX1: return "IMEX1";
    case Scheme::ETD1: return "ETD1";
    case Scheme::ETDRK2: return "ETDRK2";
    }
    return "unknown";
}

Scheme parse_scheme(std::string_view name) {
    const std::string u = upper(name);
    if (u == "IMEX1") {
        return Scheme::IMEX1;
    }
    if (u == "ETD1") {
        return Scheme::ETD1;
    }
    if (u == "ETDRK2") {
        return Scheme::ETDRK2;
    }
    fail(ErrorKind::InvalidArgument, "unknown scheme '" + std::string(name) + "'");
}

void SolverConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        fail(ErrorKind::InvalidArgument, "solver: dt must be positive");
    }
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
        fail(ErrorKind::InvalidArgument, "solver: t_end must be >= 0");
    }
    if (record_every < 1) {
        fail(ErrorKind::InvalidArgument, "solver: record_every must be >= 1");
    }
    if (!(blowup_linf > 0.0)) {
        fail(ErrorKind::InvalidArgument, "solver: blow-up guard must be positive");
    }
}

std::int64_t SolverConfig::total_steps() const { return std::llround(t_end / dt); }

double phi1(double z) noexcept {
    if (std::abs(z) < 1e-4) {
        return 1.0 + z * (1.0 / 2 + z * (1.0 / 6 + z * (1.0 / 24 + z * (1.0 / 120 + z * (1.0 / 720 + z / 5040)))));
    }
    return std::expm1(z) / z;
}

double phi2(double z) noexcept {
    if (std::abs(z) < 1e-4) {
        return 1.0 / 2 + z * (1.0 / 6 + z * (1.0 / 24 + z * (1.0 / 120 + z * (1.0 / 720 + z * (1.0 / 5040 + z / 40320)))));
    }
    return (std::expm1(z) - z) / (z * z);
}

Stepper::Stepper(const GridSpec& grid, const SolverConfig& cfg) : grid_(grid), cfg_(cfg) {
    grid_.validate();
    cfg_.validate();
    const auto k2 = wavenumber_squared(grid_);
    lambda_.resize(k2.size());
    decay_.resize(k2.size());
    phi1_.resize(k2.size());
    phi2_.resize(k2.size());
    for (std::size_t i = 0; i < k2.size(); ++i) {
        const double lam = linear_symbol_k2(k2[i]);
        const double z = -lam * cfg_.dt;
        lambda_[i] = lam;
        decay_[i] = std::exp(z);
        phi1_[i] = phi1(z);
        phi2_[i] = phi2(z);
    }
}

SpectralField Stepper::rhs_nonlinear(const SpectralField& u_hat, double t) const {
    SpectralField n_hat = nonlinear_term(u_hat, cfg_.params);
    if (cfg_.forcing) {
        n_hat += cfg_.forcing(t, grid_);
    }
    return n_hat;
}

void Stepper::check_guard(const SpectralField& u_hat, double t) const {
    require_finite(u_hat, t);
    const RealField u = from_spectral(u_hat);
    const double linf = lp_norm(u, std::numeric_limits<double>::infinity());
    if (!std::isfinite(linf) || linf > cfg_.blowup_linf) {
        fail(ErrorKind::BlowUp, "||u||_inf = " + format_double(linf) + " exceeds guard " +
                                    format_double(cfg_.blowup_linf) + " at t = " + format_double(t));
    }
}

StepperState Stepper::advance(const StepperState& state) const {
    if (!(state.u_hat.grid() == grid_)) {
        fail(ErrorKind::InvalidArgument, "stepper: state grid does not match");
    }
    const double dt = cfg_.dt;
    const double t0 = static_cast<double>(state.step) * dt;
    const double t1 = static_cast<double>(state.step + 1) * dt;
    const auto u = state.u_hat.coeffs();
    const SpectralField n0 = rhs_nonlinear(state.u_hat, t0);
    const auto n = n0.coeffs();

    StepperState next{t1, state.step + 1, SpectralField(grid_)};
    auto out = next.u_hat.coeffs();
    switch (cfg_.scheme) {
    case Scheme::IMEX1:
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = (u[i] + dt * n[i]) / (1.0 + dt * lambda_[i]);
        }
        break;
    case Scheme::ETD1:
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = decay_[i] * u[i] + dt * phi1_[i] * n[i];
        }
        break;
    case Scheme::ETDRK2: {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = decay_[i] * u[i] + dt * phi1_[i] * n[i];
        }
        require_finite(next.u_hat, t1);
        const SpectralField n1 = rhs_nonlinear(next.u_hat, t1);
        const auto m = n1.coeffs();
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] += dt * phi2_[i] * (m[i] - n[i]);
        }
        break;
    }
    }
    check_guard(next.u_hat, t1);
    return next;
}

StepperState step(const StepperState& state, const SolverConfig& cfg) {
    return Stepper(state.u_hat.grid(), cfg).advance(state);
}

Trajectory continue_simulation(const StepperState& start, const SolverConfig& cfg, const DiagnosticsSpec& diag,
                               const Recorder& recorder, const StepHook& hook) {
    const Stepper stepper(start.u_hat.grid(), cfg);
    diag.validate();
    Trajectory traj{{}, start, RunStatus::Completed, {}};
    const std::int64_t total = stepper.config().total_steps();
    while (traj.final_state.step < total) {
        try {
            traj.final_state = stepper.advance(traj.final_state);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::BlowUp) {
                throw;
            }
            traj.status = RunStatus::BlowUp;
            traj.message = e.what();
            return traj;
        }
        const StepperState& s = traj.final_state;
        if (s.step % cfg.record_every == 0) {
            traj.rows.push_back(make_row(s.t, s.u_hat, diag));
            if (recorder) {
                recorder(traj.rows.back(), s);
            }
        }
        if (hook) {
            hook(s);
        }
    }
    return traj;
}

Trajectory run_simulation(const RealField& u0, const SolverConfig& cfg, const DiagnosticsSpec& diag,
                          const Recorder& recorder, const StepHook& hook) {
    cfg.validate();
    diag.validate();
    if (!u0.all_finite()) {
        fail(ErrorKind::InvalidArgument, "initial data has non-finite samples");
    }
    StepperState start{0.0, 0, to_spectral(u0)};
    DiagnosticsRow first = make_row(0.0, start.u_hat, diag);
    if (recorder) {
        recorder(first, start);
    }
    Trajectory traj = continue_simulation(start, cfg, diag, recorder, hook);
    traj.rows.insert(traj.rows.begin(), std::move(first));
    return traj;
}

std::vector<SpectralField> imex1_trajectory(const SpectralField& u0_hat, const ModelParams& params, double dt,
                                            std::int64_t steps) {
    SolverConfig cfg;
    cfg.scheme = Scheme::IMEX1;
    cfg.dt = dt;
    cfg.t_end = static_cast<double>(steps) * dt;
    cfg.params = params;
    cfg.blowup_linf = std::numeric_limits<double>::max();
    const Stepper stepper(u0_hat.grid(), cfg);
    std::vector<SpectralField> out{u0_hat};
    StepperState s{0.0, 0, u0_hat};
    for (std::int64_t j = 0; j < steps; ++j) {
        s = stepper.advance(s);
        out.push_back(s.u_hat);
    }
    return out;
}

double discrete_l2h2_distance(const std::vector<SpectralField>& a, const std::vector<SpectralField>& b, double dt) {
    if (a.size() != b.size()) {
        fail(ErrorKind::InvalidArgument, "trajectory lengths differ");
    }
    double sum = 0.0;
    for (std::size_t j = 1; j < a.size(); ++j) {
        sum += dt * h2_squared(a[j] - b[j]);
    }
    return std::sqrt(sum);
}

PicardResult picard_local_solve(const RealField& u0, const PicardOptions& options, const ModelParams& params,
                                double blowup_linf) {
    if (!(options.T > 0.0) || !(options.dt > 0.0) || !(options.tol > 0.0) || options.max_iter < 1) {
        fail(ErrorKind::InvalidArgument, "picard: need T, dt, tol > 0 and max_iter >= 1");
    }
    const GridSpec& g = u0.grid();
    const std::int64_t steps = std::max<std::int64_t>(1, std::llround(options.T / options.dt));
    const SpectralField u0_hat = to_spectral(u0);
    const auto k2 = wavenumber_squared(g);
    const double dt = options.dt;

    std::vector<SpectralField> frozen;
    if (options.start == PicardStart::Linear) {
        frozen = imex1_trajectory(u0_hat, linearized(params), dt, steps);
    } else {
        // w = 0 everywhere, so the first iterate is the linearized evolution
        frozen.assign(static_cast<std::size_t>(steps) + 1, SpectralField(g));
    }

    PicardResult result{StepperState{0.0, 0, u0_hat}, {}, {}};
    PicardReport& rep = result.report;
    for (int it = 1; it <= options.max_iter; ++it) {
        std::vector<SpectralField> next{u0_hat};
        next.reserve(frozen.size());
        for (std::int64_t j = 0; j < steps; ++j) {
            const SpectralField& w = frozen[static_cast<std::size_t>(j)];
            const SpectralField& u = next.back();
            const SpectralField nf = frozen_nonlinear_term(w, u, params);
            SpectralField un(g);
            auto dst = un.coeffs();
            for (std::size_t i = 0; i < dst.size(); ++i) {
                dst[i] = (u[i] + dt * nf[i]) / (1.0 + dt * linear_symbol_k2(k2[i]));
            }
            const double t = static_cast<double>(j + 1) * dt;
            require_finite(un, t);
            next.push_back(std::move(un));
        }
        const double linf = lp_norm(from_spectral(next.back()), std::numeric_limits<double>::infinity());
        if (linf > blowup_linf) {
            fail(ErrorKind::BlowUp, "picard iterate exceeds the blow-up guard");
        }
        const double diff = discrete_l2h2_distance(next, frozen, dt);
        rep.iterates = it;
        if (!rep.differences.empty() && rep.differences.back() > 0.0) {
            rep.contraction_factors.push_back(diff / rep.differences.back());
        }
        rep.differences.push_back(diff);
        frozen = std::move(next);
        if (diff < options.tol) {
            rep.converged = true;
            break;
        }
    }
    if (!rep.converged && !rep.contraction_factors.empty() && rep.contraction_factors.back() >= 1.0) {
        fail(ErrorKind::NonContraction, "picard: contraction factor " + format_double(rep.contraction_factors.back()) +
                                            " after " + std::to_string(rep.iterates) + " iterates");
    }
    result.state = StepperState{static_cast<double>(steps) * dt, steps, frozen.back()};
    result.trajectory = std::move(frozen);
    return result;
}

} // namespace cch
