#include "cch/commands.hpp"
#include "cch/config.hpp"
#include "cch/error.hpp"
#include "cch/functionals.hpp"
#include "cch/initial_data.hpp"
#include "cch/io.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

using namespace cch;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("cch_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::InvalidArgument;
}

// Reference xoshiro256** step, written from the published algorithm.
std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
std::uint64_t xoshiro_next(std::array<std::uint64_t, 4>& s) {
    const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
}

const char* kLinearConfig = R"(# single-mode linear decay
grid.dim = 1
grid.n = 16
grid.L = 6.283185307179586
model.a = 0
model.b = 1
model.gamma = 0
solver.scheme = ETDRK2
solver.dt = 0.01
solver.t_end = 1
solver.record_every = 10
initial.kind = file
diag.N = 1
diag.K = 1
)";

} // namespace

TEST_CASE("config parsing") {
    const ExperimentConfig c = parse_config(R"(
grid.dim = 3
grid.n = 32
grid.L = 12.5   # trailing comment
model.beta = 1,0.5,-2
solver.scheme = etd1
solver.dt = 0.02
initial.kind = random_band
initial.m_max = 5
diag.s = 0.5,1
diag.p = 1.5,inf
picard.start = zero
)");
    CHECK(c.grid.dim == 3);
    CHECK(c.grid.box_length == 12.5);
    CHECK(c.solver.params.beta == Wavevector{1.0, 0.5, -2.0});
    CHECK(c.solver.scheme == Scheme::ETD1);
    CHECK(c.initial.kind == InitialKind::RandomBand);
    CHECK(c.initial.mean_zero);
    CHECK(c.diag.p.size() == 2);
    CHECK(std::isinf(c.diag.p[1]));
    CHECK(c.picard.start == PicardStart::Zero);

    CHECK(kind_of([] { parse_config("grid.nn = 3\n"); }) == ErrorKind::ConfigError);
    CHECK(kind_of([] { parse_config("grid.n = 16\ngrid.n = 32\n"); }) == ErrorKind::ConfigError);
    CHECK(kind_of([] { parse_config("grid.n = 15\n"); }) == ErrorKind::ConfigError);
    CHECK(kind_of([] { parse_config("solver.dt = -1\n"); }) == ErrorKind::ConfigError);
    CHECK(kind_of([] { parse_config("grid.n\n"); }) == ErrorKind::ConfigError);
    CHECK(kind_of([] { parse_config("grid.pad_degree = 2\n"); }) == ErrorKind::ConfigError);
    CHECK(kind_of([] { parse_config("grid.n = 16\ninitial.kind = random_band\ninitial.m_max = 8\n"); }) ==
          ErrorKind::ConfigError);
}

TEST_CASE("config serialization round-trips exactly") {
    ExperimentConfig c = parse_config("grid.dim = 2\ngrid.L = 0.1\nsolver.dt = 0.003\nmodel.gamma = 0.7\n"
                                      "initial.center = 0.01,0.02,0\ndiag.p = inf\n");
    const ExperimentConfig back = parse_config(serialize_config(c));
    CHECK(same_config(c, back));
    CHECK(serialize_config(back) == serialize_config(c));
}

TEST_CASE("splitmix64 seeding and the xoshiro stream") {
    Rng rng(0);
    CHECK(rng.state()[0] == 0xe220a8397b1dcdafULL);
    std::array<std::uint64_t, 4> ref = rng.state();
    for (int i = 0; i < 100; ++i) {
        CHECK(rng.next() == xoshiro_next(ref));
    }
    Rng a(42);
    Rng b = Rng::from_state(Rng(42).state());
    for (int i = 0; i < 10; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("initial data generators") {
    const GridSpec g{3, 16, 2.0 * kPi, 3};
    InitialDataSpec spec;
    SUBCASE("zero amplitude gives the zero field") {
        spec.amplitude = 0.0;
        const RealField u = generate_initial_data(g, spec).field;
        for (double v : u.samples()) {
            CHECK(v == 0.0);
        }
    }
    SUBCASE("gaussian peaks at the centre") {
        spec.amplitude = 2.0;
        const RealField u = generate_initial_data(g, spec).field;
        double m = 0.0;
        for (double v : u.samples()) {
            m = std::max(m, v);
        }
        CHECK(m == doctest::Approx(2.0).epsilon(1e-15));
    }
    SUBCASE("random band hits its target and is reproducible") {
        spec.kind = InitialKind::RandomBand;
        spec.seed = 7;
        spec.target = 1e-2;
        const GeneratedData a = generate_initial_data(g, spec);
        const GeneratedData b = generate_initial_data(g, spec);
        CHECK(std::abs(std::sqrt(energy_EN(a.field, 1)) - 1e-2) <= 1e-14);
        CHECK(std::abs(to_spectral(a.field).mean()) < 1e-16);
        CHECK(a.rng_state == b.rng_state);
        for (std::size_t i = 0; i < a.field.size(); ++i) {
            REQUIRE(a.field[i] == b.field[i]);
        }
        spec.seed = 8;
        CHECK(generate_initial_data(g, spec).field[5] != a.field[5]);
    }
    SUBCASE("empty band is unreachable") {
        spec.kind = InitialKind::RandomBand;
        const GridSpec small{1, 16, 1.0, 3};
        spec.m_min = 8;
        spec.m_max = 8;
        CHECK(kind_of([&] { generate_initial_data(small, spec); }) == ErrorKind::UnreachableTarget);
    }
    SUBCASE("file input") {
        const fs::path dir = scratch("file_input");
        spit(dir / "u.txt", "1 2 3\n4 5 6 7 8\n");
        spec.kind = InitialKind::File;
        spec.path = (dir / "u.txt").string();
        CHECK(kind_of([&] { generate_initial_data(g, spec); }) == ErrorKind::ConfigError);
        const GridSpec line{1, 8, 1.0, 3};
        const RealField u = generate_initial_data(line, spec).field;
        CHECK(u[7] == 8.0);
        spec.path = (dir / "missing.txt").string();
        CHECK(kind_of([&] { generate_initial_data(line, spec); }) == ErrorKind::IoError);
    }
}

TEST_CASE("csv round trip") {
    const fs::path dir = scratch("csv");
    const GridSpec g{2, 16, 2.0 * kPi, 3};
    DiagnosticsSpec spec;
    spec.p = {1.5, std::numeric_limits<double>::infinity()};
    InitialDataSpec init;
    init.kind = InitialKind::RandomBand;
    const SpectralField f = to_spectral(generate_initial_data(g, init).field);
    std::vector<DiagnosticsRow> rows{make_row(0.0, f, spec), make_row(0.1, 0.5 * f, spec)};
    write_csv((dir / "d.csv").string(), spec, rows);
    const CsvTable table = read_csv((dir / "d.csv").string());
    CHECK(table.columns == column_names(spec));
    CHECK(parse_rows(table, spec) == rows);
    DiagnosticsSpec other = spec;
    other.N = 2;
    CHECK(kind_of([&] { parse_rows(table, other); }) == ErrorKind::IoError);
    CHECK(kind_of([&] { read_csv((dir / "none.csv").string()); }) == ErrorKind::IoError);
}

TEST_CASE("checkpoint round trip") {
    const fs::path dir = scratch("ckpt");
    const GridSpec g{3, 8, 3.5, 3};
    InitialDataSpec init;
    init.kind = InitialKind::RandomBand;
    init.m_max = 3;
    const GeneratedData d = generate_initial_data(g, init);
    Checkpoint ck{g, StepperState{1.25, 125, to_spectral(d.field)}, Scheme::ETD1, ModelParams{}, d.rng_state,
                  "grid.n = 8\n"};
    ck.params.beta = {0.1, 0.2, 0.3};
    const std::string path = (dir / "c.cch").string();
    write_checkpoint(path, ck);
    const Checkpoint back = read_checkpoint(path);
    CHECK(back.grid == g);
    CHECK(back.state.t == 1.25);
    CHECK(back.state.step == 125);
    CHECK(back.scheme == Scheme::ETD1);
    CHECK(back.params.beta == ck.params.beta);
    CHECK(back.rng_state == d.rng_state);
    CHECK(back.config_text == ck.config_text);
    for (std::size_t i = 0; i < back.state.u_hat.size(); ++i) {
        REQUIRE(back.state.u_hat[i] == ck.state.u_hat[i]);
    }
    std::string bytes = slurp(path);
    bytes[0] = 'X';
    spit(dir / "bad.cch", bytes);
    CHECK(kind_of([&] { read_checkpoint((dir / "bad.cch").string()); }) == ErrorKind::IoError);
    spit(dir / "short.cch", slurp(path).substr(0, 200));
    CHECK(kind_of([&] { read_checkpoint((dir / "short.cch").string()); }) == ErrorKind::IoError);
}

TEST_CASE("run matches the analytic linear decay") {
    const fs::path dir = scratch("run_linear");
    // u0 = sin x + 0.5 cos 3x; E0(t) = pi e^{-4t} + pi/4 e^{-180t}
    std::string samples;
    for (int i = 0; i < 16; ++i) {
        const double x = 2 * kPi * i / 16;
        samples += format_double(std::sin(x) + 0.5 * std::cos(3 * x)) + "\n";
    }
    spit(dir / "u0.txt", samples);
    spit(dir / "run.cfg", std::string(kLinearConfig) + "initial.path = " + (dir / "u0.txt").string() +
                              "\noutput.dir = " + dir.string() + "\n");
    CommandOptions opts;
    opts.config_path = (dir / "run.cfg").string();
    std::ostringstream log;
    REQUIRE(cmd_run(opts, log) == 0);
    const CsvTable t = read_csv((dir / "diagnostics.csv").string());
    const auto time = t.column("t");
    const auto e0 = t.column("E0");
    REQUIRE(time.size() == 11);
    for (std::size_t i = 0; i < time.size(); ++i) {
        const double ref = kPi * std::exp(-4 * time[i]) + 0.25 * kPi * std::exp(-180 * time[i]);
        CHECK(std::abs(e0[i] - ref) <= 1e-10 * ref);
    }
    CHECK(fs::exists(dir / "summary.json"));
    CHECK(fs::exists(dir / "checkpoint.cch"));
}

TEST_CASE("resume reproduces an uninterrupted run bit for bit") {
    const fs::path a = scratch("resume_a");
    const fs::path b = scratch("resume_b");
    const std::string body = R"(grid.dim = 2
grid.n = 16
grid.L = 6.283185307179586
model.b = 1
solver.scheme = ETDRK2
solver.dt = 0.01
solver.t_end = 1
solver.record_every = 5
initial.kind = random_band
initial.seed = 3
initial.target = 0.5
diag.s = 0.5
diag.p = 1.5,inf
)";
    spit(a / "run.cfg", body + "output.dir = " + a.string() + "\n");
    CommandOptions opts;
    opts.config_path = (a / "run.cfg").string();
    std::ostringstream log;
    REQUIRE(cmd_run(opts, log) == 0);

    // Interrupted run in b: stop at step 40, keep its checkpoint and a CSV
    // with a torn trailing row past the checkpoint.
    ExperimentConfig cfg = parse_config(body + "output.dir = " + b.string() + "\n");
    const GeneratedData data = generate_initial_data(cfg.grid, cfg.initial);
    SolverConfig partial = cfg.solver;
    partial.t_end = 0.4;
    const Trajectory first = run_simulation(data.field, partial, cfg.diag);
    REQUIRE(first.final_state.step == 40);
    write_checkpoint((b / "checkpoint.cch").string(), Checkpoint{cfg.grid, first.final_state, cfg.solver.scheme,
                                                                 cfg.solver.params, data.rng_state,
                                                                 serialize_config(cfg)});
    std::vector<DiagnosticsRow> rows = first.rows;
    write_csv((b / "diagnostics.csv").string(), cfg.diag, rows);
    {
        std::ofstream torn(b / "diagnostics.csv", std::ios::app);
        torn << format_double(0.45);
        for (std::size_t i = 1; i < column_names(cfg.diag).size(); ++i) {
            torn << ",1";
        }
        torn << '\n';
    }

    CommandOptions ropts;
    ropts.checkpoint_path = (b / "checkpoint.cch").string();
    REQUIRE(cmd_resume(ropts, log) == 0);
    CHECK(slurp(a / "diagnostics.csv") == slurp(b / "diagnostics.csv"));
    const Checkpoint ca = read_checkpoint((a / "checkpoint.cch").string());
    const Checkpoint cb = read_checkpoint((b / "checkpoint.cch").string());
    CHECK(ca.state.step == cb.state.step);
    CHECK(ca.state.t == cb.state.t);
    CHECK(ca.rng_state == cb.rng_state);
    for (std::size_t i = 0; i < ca.state.u_hat.size(); ++i) {
        REQUIRE(ca.state.u_hat[i] == cb.state.u_hat[i]);
    }
}

TEST_CASE("fit subcommand through the executable") {
    const char* cli = std::getenv("CCH_CLI");
    REQUIRE(cli != nullptr);
    const fs::path dir = scratch("cli_fit");
    DiagnosticsSpec spec;
    spec.K = 0;
    std::ofstream csv(dir / "d.csv");
    const auto names = column_names(spec);
    for (std::size_t i = 0; i < names.size(); ++i) {
        csv << (i ? "," : "") << names[i];
    }
    csv << '\n';
    for (int i = 0; i < 30; ++i) {
        const double t = std::pow(10.0, i / 10.0);
        DiagnosticsRow r;
        r.t = t;
        r.E = {1.0, 1.0};
        r.D = {1.0, 1.0};
        r.dk = {5.0 * std::pow(t, -0.75)};
        const auto vals = row_values(r);
        for (std::size_t j = 0; j < vals.size(); ++j) {
            csv << (j ? "," : "") << format_double(vals[j]);
        }
        csv << '\n';
    }
    csv.close();
    const std::string out = (dir / "out.txt").string();
    const std::string cmd = std::string(cli) + " fit " + (dir / "d.csv").string() + " --column dk_0 > " + out;
    REQUIRE(std::system(cmd.c_str()) == 0);
    const std::string text = slurp(out);
    const auto pos = text.find("exponent ");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(text.substr(pos + 9)) == doctest::Approx(0.75).epsilon(1e-10));

    const std::string bad = std::string(cli) + " run --config " + (dir / "nope.cfg").string() + " 2> " +
                            (dir / "err.txt").string();
    const int status = std::system(bad.c_str());
    CHECK(status != 0);
    CHECK(slurp(dir / "err.txt").find("error[") != std::string::npos);
}

TEST_CASE("shipped configurations parse and validate") {
    const char* dir = std::getenv("CCH_CONFIG_DIR");
    REQUIRE(dir != nullptr);
    int count = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".cfg") {
            continue;
        }
        CAPTURE(entry.path().string());
        ExperimentConfig c = load_config(entry.path().string());
        CHECK_NOTHROW(validate_config(c));
        ++count;
    }
    CHECK(count >= 5);
}
