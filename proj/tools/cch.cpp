// Command line front end. Failures print "error[<category>]: message" to
// stderr and exit with a category-specific status.

#include "cch/commands.hpp"
#include "cch/error.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>

namespace {

int exit_code(cch::ErrorKind kind) {
    switch (kind) {
    case cch::ErrorKind::ConfigError: return 2;
    case cch::ErrorKind::IoError: return 3;
    case cch::ErrorKind::BlowUp: return 4;
    case cch::ErrorKind::NonContraction: return 5;
    default: return 1;
    }
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "inf") {
            out.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) {
            throw std::invalid_argument(item);
        }
        out.push_back(v);
    }
    return out;
}

// CCH_THREADS is accepted for compatibility; transforms run on one thread so
// results do not depend on it.
void check_thread_env() {
    if (const char* v = std::getenv("CCH_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(v, &end, 10);
        if (end == v || *end != '\0' || n < 1) {
            cch::fail(cch::ErrorKind::ConfigError, "CCH_THREADS must be a positive integer");
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convective Cahn-Hilliard simulation and verification tool"};
    app.require_subcommand(1);

    cch::CommandOptions opts;
    std::string window;
    std::string s_list;
    std::string p_list;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", opts.seed, "Override initial.seed");
        sub->add_option("--out-dir", opts.out_dir, "Override output.dir");
        sub->add_option("--level", opts.level, "Energy level N (run) or derivative order k (fit, oracle)");
        sub->add_option("--s", s_list, "Comma separated negative-norm exponents");
        sub->add_option("--p", p_list, "Comma separated Lebesgue exponents (inf allowed)");
        sub->add_option("--window", window, "Fit window lo,hi");
    };

    auto* run = app.add_subcommand("run", "Run a simulation from a config file");
    run->add_option("--config", opts.config_path, "Config file")->required();
    add_common(run);

    auto* resume = app.add_subcommand("resume", "Continue a run from a checkpoint");
    resume->add_option("checkpoint", opts.checkpoint_path, "Checkpoint file")->required();
    add_common(resume);

    auto* fit = app.add_subcommand("fit", "Fit a power law to a diagnostics CSV column");
    fit->add_option("csv", opts.csv_path, "Diagnostics CSV")->required();
    fit->add_option("--column", opts.column, "Column to fit (default dk_<level>)");
    fit->add_option("--dim", opts.dim, "Dimension for the predicted exponent (default 3)");
    add_common(fit);

    auto* check = app.add_subcommand("check-inequalities", "Run the functional inequality suites");
    add_common(check);

    auto* oracle = app.add_subcommand("oracle", "Evaluate the whole-space linear decay oracle");
    oracle->add_option("--config", opts.config_path, "Take dimension and Gaussian data from a config");
    oracle->add_option("--dim", opts.dim, "Dimension (default 3)");
    oracle->add_option("--amplitude", opts.amplitude, "Gaussian amplitude");
    oracle->add_option("--width", opts.width, "Gaussian width");
    add_common(oracle);

    auto* local = app.add_subcommand("local-solve", "Picard local solve with contraction report");
    local->add_option("--config", opts.config_path, "Config file")->required();
    add_common(local);

    CLI11_PARSE(app, argc, argv);

    try {
        check_thread_env();
        try {
            if (!window.empty()) {
                const auto w = parse_list(window);
                if (w.size() != 2) {
                    throw std::invalid_argument(window);
                }
                opts.window = std::pair{w[0], w[1]};
            }
            if (!s_list.empty()) {
                opts.s = parse_list(s_list);
            }
            if (!p_list.empty()) {
                opts.p = parse_list(p_list);
            }
        } catch (const std::exception& e) {
            cch::fail(cch::ErrorKind::ConfigError, std::string("bad numeric list: ") + e.what());
        }

        if (run->parsed()) {
            return cch::cmd_run(opts, std::cout);
        }
        if (resume->parsed()) {
            return cch::cmd_resume(opts, std::cout);
        }
        if (fit->parsed()) {
            return cch::cmd_fit(opts, std::cout);
        }
        if (check->parsed()) {
            return cch::cmd_check_inequalities(opts, std::cout);
        }
        if (oracle->parsed()) {
            return cch::cmd_oracle(opts, std::cout);
        }
        return cch::cmd_local_solve(opts, std::cout);
    } catch (const cch::Error& e) {
        std::cerr << "error[" << e.category() << "]: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << '\n';
        return 1;
    }
}
