#include "cch/commands.hpp"

#include "cch/decay.hpp"
#include "cch/error.hpp"
#include "cch/functionals.hpp"
#include "cch/initial_data.hpp"
#include "cch/integrators.hpp"
#include "cch/io.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>

namespace cch {

namespace {

using nlohmann::json;

constexpr const char* kRngName = "xoshiro256** seeded by splitmix64";

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.output.dir) / name).string();
}

void write_json(const std::string& path, const json& j) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::filesystem::create_directories(parent);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << j.dump(2) << '\n';
    if (!out) {
        fail(ErrorKind::IoError, "cannot write '" + path + "'");
    }
}

json number_or_string(double x) { return std::isfinite(x) ? json(x) : json(format_double(x)); }

json fit_json(const DecayFit& f) {
    return {{"exponent", f.exponent},   {"intercept", f.intercept}, {"residual_rms", f.residual_rms},
            {"window", {f.t_lo, f.t_hi}}, {"points_used", f.points_used}};
}

json config_json(const ExperimentConfig& c) {
    const auto& in = c.initial;
    json initial = {{"family", initial_kind_name(in.kind)}, {"mean_zero", in.mean_zero}};
    switch (in.kind) {
    case InitialKind::Gaussian:
        initial["amplitude"] = in.amplitude;
        initial["width"] = in.width;
        break;
    case InitialKind::RandomBand:
        initial["seed"] = in.seed;
        initial["rng"] = kRngName;
        initial["slope"] = in.slope;
        initial["band"] = {in.m_min, in.m_max};
        initial["target"] = in.target;
        initial["target_level"] = in.target_level;
        break;
    case InitialKind::File:
        initial["path"] = in.path;
        break;
    }
    return {{"grid", {{"dim", c.grid.dim}, {"n", c.grid.n}, {"L", c.grid.box_length}}},
            {"model",
             {{"a", c.solver.params.a},
              {"b", c.solver.params.b},
              {"gamma", c.solver.params.gamma},
              {"beta", c.solver.params.beta}}},
            {"solver",
             {{"scheme", scheme_name(c.solver.scheme)},
              {"dt", c.solver.dt},
              {"t_end", c.solver.t_end},
              {"record_every", c.solver.record_every},
              {"blowup_linf", c.solver.blowup_linf}}},
            {"initial_data", initial},
            {"diagnostics", {{"N", c.diag.N}, {"s", c.diag.s}, {"p", c.diag.p}, {"K", c.diag.K}}}};
}

json row_json(const DiagnosticsRow& r, const DiagnosticsSpec& spec) {
    const auto names = column_names(spec);
    const auto values = row_values(r);
    json j = json::object();
    for (std::size_t i = 0; i < names.size(); ++i) {
        j[names[i]] = number_or_string(values[i]);
    }
    return j;
}

// Shared tail of run and resume: steps, streams rows, checkpoints, summary.
int drive(const ExperimentConfig& cfg, const StepperState& start, const Rng::State& rng_state,
          std::vector<DiagnosticsRow> previous_rows, bool fresh, const RealField* u0, std::ostream& out) {
    const std::string csv_path = out_path(cfg, cfg.output.csv);
    const std::string ckpt_path = out_path(cfg, cfg.output.checkpoint);
    const std::string config_text = serialize_config(cfg);

    CsvWriter csv(csv_path, cfg.diag);
    for (const auto& r : previous_rows) {
        csv.write(r);
    }
    std::vector<DiagnosticsRow> rows = std::move(previous_rows);
    auto recorder = [&](const DiagnosticsRow& row, const StepperState&) {
        csv.write(row);
        rows.push_back(row);
    };
    auto save = [&](const StepperState& s) {
        write_checkpoint(ckpt_path, Checkpoint{cfg.grid, s, cfg.solver.scheme, cfg.solver.params, rng_state, config_text});
    };
    auto hook = [&](const StepperState& s) {
        if (cfg.output.checkpoint_every > 0 && s.step % cfg.output.checkpoint_every == 0) {
            csv.flush();
            save(s);
        }
    };

    const Trajectory traj = fresh ? run_simulation(*u0, cfg.solver, cfg.diag, recorder, hook)
                                  : continue_simulation(start, cfg.solver, cfg.diag, recorder, hook);
    csv.flush();
    save(traj.final_state);

    json summary = config_json(cfg);
    summary["status"] = traj.status == RunStatus::Completed ? "completed" : "blow_up";
    if (!traj.message.empty()) {
        summary["message"] = traj.message;
    }
    summary["steps"] = traj.final_state.step;
    summary["t_final"] = traj.final_state.t;
    summary["rows"] = rows.size();
    summary["csv"] = csv_path;
    summary["checkpoint"] = ckpt_path;
    summary["sigma_dimension_extension"] = cfg.grid.dim != 3;
    if (!rows.empty()) {
        summary["first_row"] = row_json(rows.front(), cfg.diag);
        summary["last_row"] = row_json(rows.back(), cfg.diag);
        double drift = 0.0;
        for (const auto& r : rows) {
            drift = std::max(drift, std::abs(r.mean - rows.front().mean));
        }
        summary["max_mean_drift"] = drift;
        try {
            json fits = json::object();
            const FitWindow window = default_fit_window(cfg.grid);
            for (int k = 0; k <= cfg.diag.K; ++k) {
                fits["dk_" + std::to_string(k)] = fit_json(fit_power_law(rows, select_dk(k), window));
            }
            summary["decay_fits"] = fits;
        } catch (const Error& e) {
            summary["decay_fits"] = std::string("not available: ") + e.what();
        }
    }
    write_json(out_path(cfg, cfg.output.json), summary);

    out << "steps " << traj.final_state.step << ", t = " << format_double(traj.final_state.t) << ", rows "
        << rows.size() << '\n';
    out << "csv " << csv_path << "\ncheckpoint " << ckpt_path << '\n';
    if (traj.status == RunStatus::BlowUp) {
        fail(ErrorKind::BlowUp, traj.message);
    }
    return 0;
}

std::vector<double> log_grid(double lo, double hi, int count) {
    std::vector<double> t(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        t[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    }
    return t;
}

RealField sampled_gaussian(const GridSpec& g, double width, bool dipole) {
    RealField f(g);
    const double c = 0.5 * g.box_length;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Wavevector x = f.position(i);
        double r2 = 0.0;
        for (int j = 0; j < g.dim; ++j) {
            r2 += (x[j] - c) * (x[j] - c);
        }
        const double v = std::exp(-r2 / (2.0 * width * width));
        f[i] = dipole ? -(x[0] - c) / (width * width) * v : v;
    }
    if (dipole) {
        double sum = 0.0;
        for (double v : f.samples()) {
            sum += v;
        }
        for (double& v : f.samples()) {
            v -= sum / static_cast<double>(f.size());
        }
    }
    return f;
}

RealField scaled(const RealField& f, double c) {
    RealField g = f;
    for (double& v : g.samples()) {
        v *= c;
    }
    return g;
}

} // namespace

void apply_overrides(ExperimentConfig& cfg, const CommandOptions& opts) {
    if (opts.seed) {
        cfg.initial.seed = *opts.seed;
    }
    if (opts.out_dir) {
        cfg.output.dir = *opts.out_dir;
    }
    if (opts.level) {
        cfg.diag.N = *opts.level;
    }
    if (opts.s) {
        cfg.diag.s = *opts.s;
    }
    if (opts.p) {
        cfg.diag.p = *opts.p;
    }
    validate_config(cfg);
}

int cmd_run(const CommandOptions& opts, std::ostream& out) {
    if (opts.config_path.empty()) {
        fail(ErrorKind::ConfigError, "run needs --config");
    }
    ExperimentConfig cfg = load_config(opts.config_path);
    apply_overrides(cfg, opts);
    const GeneratedData data = generate_initial_data(cfg.grid, cfg.initial);
    const StepperState unused{0.0, 0, SpectralField(cfg.grid)};
    return drive(cfg, unused, data.rng_state, {}, true, &data.field, out);
}

int cmd_resume(const CommandOptions& opts, std::ostream& out) {
    if (opts.checkpoint_path.empty()) {
        fail(ErrorKind::ConfigError, "resume needs a checkpoint path");
    }
    const Checkpoint ck = read_checkpoint(opts.checkpoint_path);
    ExperimentConfig cfg = parse_config(ck.config_text);
    if (opts.out_dir) {
        cfg.output.dir = *opts.out_dir;
    }
    if (!(cfg.grid == ck.grid) || cfg.solver.scheme != ck.scheme) {
        fail(ErrorKind::IoError, "checkpoint header disagrees with its embedded configuration");
    }
    // Keep rows already written up to the checkpoint so the file matches an
    // uninterrupted run.
    std::vector<DiagnosticsRow> kept;
    const std::string csv_path = out_path(cfg, cfg.output.csv);
    if (std::filesystem::exists(csv_path)) {
        for (auto& r : parse_rows(read_csv(csv_path), cfg.diag)) {
            if (r.t <= ck.state.t) {
                kept.push_back(std::move(r));
            }
        }
    }
    return drive(cfg, ck.state, ck.rng_state, std::move(kept), false, nullptr, out);
}

int cmd_fit(const CommandOptions& opts, std::ostream& out) {
    if (opts.csv_path.empty()) {
        fail(ErrorKind::ConfigError, "fit needs a csv path");
    }
    const CsvTable table = read_csv(opts.csv_path);
    const int k = opts.level.value_or(0);
    const std::string column = opts.column.value_or("dk_" + std::to_string(k));
    FitWindow window;
    window.t_lo = 1.0;
    window.t_hi = std::numeric_limits<double>::infinity();
    if (opts.window) {
        window.t_lo = opts.window->first;
        window.t_hi = opts.window->second;
    }
    const DecayFit fit = fit_power_law(table.column("t"), table.column(column), window);
    const int dim = opts.dim.value_or(3);
    out << std::setprecision(12);
    out << "column " << column << '\n';
    out << "exponent " << fit.exponent << '\n';
    out << "intercept " << fit.intercept << '\n';
    out << "residual_rms " << fit.residual_rms << '\n';
    out << "window " << fit.t_lo << ' ' << fit.t_hi << '\n';
    out << "points_used " << fit.points_used << '\n';
    json j = fit_json(fit);
    j["column"] = column;
    json theory = json::array();
    for (double p : opts.p.value_or(std::vector<double>{1.5, 2.0})) {
        const double sigma = theoretical_sigma(k, p, dim, true);
        out << "sigma_theory k=" << k << " p=" << p << " dim=" << dim << ": " << sigma << " (fit - theory "
            << fit.exponent - sigma << ")\n";
        theory.push_back({{"k", k}, {"p", p}, {"dim", dim}, {"sigma", sigma}, {"dimension_extension", dim != 3}});
    }
    j["theory"] = theory;
    if (opts.out_dir) {
        write_json((std::filesystem::path(*opts.out_dir) / "fit.json").string(), j);
    }
    return 0;
}

std::vector<InequalityCheck> run_inequality_suite(std::uint64_t seed, int fields) {
    std::vector<InequalityCheck> checks;
    GridSpec g{3, 16, 2.0 * std::numbers::pi, 3};

    const std::array<std::array<double, 3>, 3> triples{{{0, 1, 0.5}, {1, 1, 0.5}, {0, 2, 0.5}}};
    for (const auto& [l, k, s] : triples) {
        InequalityCheck c;
        c.name = "interpolation l=" + format_double(l) + " k=" + format_double(k) + " s=" + format_double(s);
        double worst = std::numeric_limits<double>::infinity();
        for (int i = 0; i < fields; ++i) {
            InitialDataSpec spec;
            spec.kind = InitialKind::RandomBand;
            spec.seed = seed + static_cast<std::uint64_t>(i);
            spec.m_min = 1;
            spec.m_max = 7;
            spec.slope = 1.0;
            spec.target = 1.0;
            const SpectralField f = to_spectral(generate_initial_data(g, spec).field);
            const InterpolationGap gap = interpolation_terms(f, l, k, s);
            worst = std::min(worst, gap.gap() / gap.rhs);
        }
        c.value = worst;
        c.pass = worst >= -1e-10;
        c.detail = "min gap/rhs over " + std::to_string(fields) + " fields";
        checks.push_back(std::move(c));
    }

    // Resolution studies on a fixed box; the Gaussian is well inside it.
    const double L = 12.0;
    const double w = 1.0;
    const GridSpec coarse{3, 32, L, 3};
    const GridSpec fine{3, 64, L, 3};
    const RealField bump_c = sampled_gaussian(coarse, w, false);
    const RealField bump_f = sampled_gaussian(fine, w, false);
    const RealField dip_c = sampled_gaussian(coarse, w, true);
    const RealField dip_f = sampled_gaussian(fine, w, true);

    auto ratio_checks = [&](const std::string& name, auto&& ratio, const RealField& fc, const RealField& ff) {
        const double rc = ratio(fc);
        const double rf = ratio(ff);
        const double r17 = ratio(scaled(fc, 17.0));
        InequalityCheck finite{name + " finite", std::isfinite(rc) && std::isfinite(rf) && rc > 0.0, rc, "ratio"};
        const double inv = std::abs(r17 - rc) / rc;
        InequalityCheck scale{name + " amplitude invariance", inv <= 1e-12, inv, "relative change for c = 17"};
        const double res = std::abs(rf - rc) / rc;
        InequalityCheck resol{name + " grid doubling", res < 0.1, res, "relative change n = 32 -> 64"};
        checks.push_back(finite);
        checks.push_back(scale);
        checks.push_back(resol);
    };
    const GnExponents l3{0.0, 3.0, 0.0, 2.0, 1.0, 2.0};
    const GnExponents linf{0.0, std::numeric_limits<double>::infinity(), 1.0, 2.0, 2.0, 2.0};
    ratio_checks("gagliardo_nirenberg L3", [&](const RealField& f) { return gn_ratio(f, l3); }, bump_c, bump_f);
    ratio_checks("gagliardo_nirenberg Linf", [&](const RealField& f) { return gn_ratio(f, linf); }, bump_c, bump_f);
    ratio_checks("hardy_littlewood_sobolev s=1/2 p=3/2", [&](const RealField& f) { return hls_ratio(f, 0.5, 1.5); },
                 dip_c, dip_f);
    const double unit = hls_ratio(dip_c, 0.0, 2.0);
    checks.push_back({"hardy_littlewood_sobolev s=0 p=2", std::abs(unit - 1.0) <= 1e-12, unit, "ratio"});
    return checks;
}

int cmd_check_inequalities(const CommandOptions& opts, std::ostream& out) {
    const auto checks = run_inequality_suite(opts.seed.value_or(1), 100);
    bool all = true;
    json report = json::array();
    out << std::setprecision(6);
    for (const auto& c : checks) {
        out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.value << " (" << c.detail << ")\n";
        all = all && c.pass;
        report.push_back({{"name", c.name}, {"pass", c.pass}, {"value", number_or_string(c.value)}, {"detail", c.detail}});
    }
    if (opts.out_dir) {
        write_json((std::filesystem::path(*opts.out_dir) / "inequalities.json").string(),
                   {{"seed", opts.seed.value_or(1)}, {"rng", kRngName}, {"checks", report}});
    }
    return all ? 0 : 1;
}

int cmd_oracle(const CommandOptions& opts, std::ostream& out) {
    GaussianData data;
    int dim = 3;
    if (!opts.config_path.empty()) {
        const ExperimentConfig cfg = load_config(opts.config_path);
        data = {cfg.initial.amplitude, cfg.initial.width};
        dim = cfg.grid.dim;
    }
    data.amplitude = opts.amplitude.value_or(data.amplitude);
    data.width = opts.width.value_or(data.width);
    dim = opts.dim.value_or(dim);
    const int kmax = opts.level.value_or(2);
    const auto [lo, hi] = opts.window.value_or(std::pair<double, double>{1e2, 1e4});
    const auto times = log_grid(lo, hi, 41);

    std::vector<std::vector<double>> curves(static_cast<std::size_t>(kmax) + 1);
    out << std::setprecision(12) << "t";
    for (int k = 0; k <= kmax; ++k) {
        out << ",dk_" << k;
    }
    out << '\n';
    for (double t : times) {
        out << t;
        for (int k = 0; k <= kmax; ++k) {
            curves[k].push_back(linear_decay_oracle(k, data, t, dim));
            out << ',' << curves[k].back();
        }
        out << '\n';
    }
    FitWindow window;
    window.t_lo = lo;
    window.t_hi = hi;
    json fits = json::array();
    for (int k = 0; k <= kmax; ++k) {
        const DecayFit fit = fit_power_law(times, curves[k], window);
        // Gaussian data is integrable, so the L^1 heat scaling applies.
        const double sigma = theoretical_sigma(k, 1.0, dim, true);
        out << "# k=" << k << " fitted " << fit.exponent << " predicted " << sigma << " relative error "
            << std::abs(fit.exponent - sigma) / sigma << '\n';
        json f = fit_json(fit);
        f["k"] = k;
        f["predicted"] = sigma;
        fits.push_back(f);
    }
    if (opts.out_dir) {
        write_json((std::filesystem::path(*opts.out_dir) / "oracle.json").string(),
                   {{"amplitude", data.amplitude}, {"width", data.width}, {"dim", dim}, {"fits", fits}});
    }
    return 0;
}

int cmd_local_solve(const CommandOptions& opts, std::ostream& out) {
    if (opts.config_path.empty()) {
        fail(ErrorKind::ConfigError, "local-solve needs --config");
    }
    ExperimentConfig cfg = load_config(opts.config_path);
    apply_overrides(cfg, opts);
    const GeneratedData data = generate_initial_data(cfg.grid, cfg.initial);
    const PicardResult res = picard_local_solve(data.field, cfg.picard, cfg.solver.params, cfg.solver.blowup_linf);
    const auto direct = imex1_trajectory(to_spectral(data.field), cfg.solver.params, cfg.picard.dt,
                                         static_cast<std::int64_t>(res.trajectory.size()) - 1);
    const double gap = discrete_l2h2_distance(res.trajectory, direct, cfg.picard.dt);
    const auto& rep = res.report;
    out << std::setprecision(6);
    out << "iterates " << rep.iterates << "\nconverged " << (rep.converged ? "yes" : "no") << "\nfactors";
    for (double f : rep.contraction_factors) {
        out << ' ' << f;
    }
    out << "\ndifferences";
    for (double d : rep.differences) {
        out << ' ' << d;
    }
    out << "\ndistance_to_direct " << gap << '\n';
    json j = config_json(cfg);
    j["picard"] = {{"T", cfg.picard.T},
                   {"dt", cfg.picard.dt},
                   {"tol", cfg.picard.tol},
                   {"max_iter", cfg.picard.max_iter},
                   {"start", cfg.picard.start == PicardStart::Linear ? "linear" : "zero"},
                   {"iterates", rep.iterates},
                   {"converged", rep.converged},
                   {"contraction_factors", rep.contraction_factors},
                   {"differences", rep.differences},
                   {"distance_to_direct", gap}};
    write_json(out_path(cfg, "local_solve.json"), j);
    return rep.converged ? 0 : 1;
}

} // namespace cch
