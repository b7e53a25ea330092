#include "cch/config.hpp"

#include "cch/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace cch {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, std::string_view value, const char* expected) {
    fail(ErrorKind::ConfigError, key + ": expected " + expected + ", got '" + std::string(value) + "'");
}

double to_double(const std::string& key, std::string_view v) {
    if (v == "inf" || v == "+inf") {
        return std::numeric_limits<double>::infinity();
    }
    double x = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        bad_value(key, v, "a number");
    }
    return x;
}

template <class Int>
Int to_int(const std::string& key, std::string_view v) {
    Int x = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        bad_value(key, v, "an integer");
    }
    return x;
}

bool to_bool(const std::string& key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    bad_value(key, v, "true or false");
}

std::vector<double> to_list(const std::string& key, std::string_view v) {
    std::vector<double> out;
    if (trim(v).empty()) {
        return out;
    }
    std::size_t pos = 0;
    while (pos <= v.size()) {
        const auto comma = v.find(',', pos);
        const auto item = trim(v.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        out.push_back(to_double(key, item));
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

Wavevector to_vector3(const std::string& key, std::string_view v) {
    const auto list = to_list(key, v);
    if (list.empty() || list.size() > 3) {
        bad_value(key, v, "1 to 3 comma separated numbers");
    }
    Wavevector out{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < list.size(); ++i) {
        out[i] = list[i];
    }
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "," : "") + format_double(v[i]);
    }
    return s;
}

std::string join3(const Wavevector& v) { return join({v[0], v[1], v[2]}); }

using Setter = std::function<void(ExperimentConfig&, const std::string&, std::string_view)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"grid.dim", [](auto& c, auto& k, auto v) { c.grid.dim = to_int<int>(k, v); }},
        {"grid.n", [](auto& c, auto& k, auto v) { c.grid.n = to_int<int>(k, v); }},
        {"grid.L", [](auto& c, auto& k, auto v) { c.grid.box_length = to_double(k, v); }},
        {"grid.pad_degree", [](auto& c, auto& k, auto v) { c.grid.pad_degree = to_int<int>(k, v); }},
        {"model.a", [](auto& c, auto& k, auto v) { c.solver.params.a = to_double(k, v); }},
        {"model.b", [](auto& c, auto& k, auto v) { c.solver.params.b = to_double(k, v); }},
        {"model.gamma", [](auto& c, auto& k, auto v) { c.solver.params.gamma = to_double(k, v); }},
        {"model.beta", [](auto& c, auto& k, auto v) { c.solver.params.beta = to_vector3(k, v); }},
        {"solver.scheme",
         [](auto& c, auto& k, auto v) {
             try {
                 c.solver.scheme = parse_scheme(v);
             } catch (const Error&) {
                 bad_value(k, v, "IMEX1, ETD1 or ETDRK2");
             }
         }},
        {"solver.dt", [](auto& c, auto& k, auto v) { c.solver.dt = to_double(k, v); }},
        {"solver.t_end", [](auto& c, auto& k, auto v) { c.solver.t_end = to_double(k, v); }},
        {"solver.record_every", [](auto& c, auto& k, auto v) { c.solver.record_every = to_int<int>(k, v); }},
        {"solver.blowup_linf", [](auto& c, auto& k, auto v) { c.solver.blowup_linf = to_double(k, v); }},
        {"initial.kind",
         [](auto& c, auto& k, auto v) {
             if (v == "gaussian") {
                 c.initial.kind = InitialKind::Gaussian;
             } else if (v == "random_band") {
                 c.initial.kind = InitialKind::RandomBand;
             } else if (v == "file") {
                 c.initial.kind = InitialKind::File;
             } else {
                 bad_value(k, v, "gaussian, random_band or file");
             }
         }},
        {"initial.amplitude", [](auto& c, auto& k, auto v) { c.initial.amplitude = to_double(k, v); }},
        {"initial.width", [](auto& c, auto& k, auto v) { c.initial.width = to_double(k, v); }},
        {"initial.center", [](auto& c, auto& k, auto v) { c.initial.center = to_vector3(k, v); }},
        {"initial.seed", [](auto& c, auto& k, auto v) { c.initial.seed = to_int<std::uint64_t>(k, v); }},
        {"initial.slope", [](auto& c, auto& k, auto v) { c.initial.slope = to_double(k, v); }},
        {"initial.m_min", [](auto& c, auto& k, auto v) { c.initial.m_min = to_int<int>(k, v); }},
        {"initial.m_max", [](auto& c, auto& k, auto v) { c.initial.m_max = to_int<int>(k, v); }},
        {"initial.target", [](auto& c, auto& k, auto v) { c.initial.target = to_double(k, v); }},
        {"initial.target_level", [](auto& c, auto& k, auto v) { c.initial.target_level = to_int<int>(k, v); }},
        {"initial.mean_zero", [](auto& c, auto& k, auto v) { c.initial.mean_zero = to_bool(k, v); }},
        {"initial.path", [](auto& c, auto&, auto v) { c.initial.path = std::string(v); }},
        {"output.dir", [](auto& c, auto&, auto v) { c.output.dir = std::string(v); }},
        {"output.csv", [](auto& c, auto&, auto v) { c.output.csv = std::string(v); }},
        {"output.json", [](auto& c, auto&, auto v) { c.output.json = std::string(v); }},
        {"output.checkpoint", [](auto& c, auto&, auto v) { c.output.checkpoint = std::string(v); }},
        {"output.checkpoint_every",
         [](auto& c, auto& k, auto v) { c.output.checkpoint_every = to_int<std::int64_t>(k, v); }},
        {"diag.N", [](auto& c, auto& k, auto v) { c.diag.N = to_int<int>(k, v); }},
        {"diag.s", [](auto& c, auto& k, auto v) { c.diag.s = to_list(k, v); }},
        {"diag.p", [](auto& c, auto& k, auto v) { c.diag.p = to_list(k, v); }},
        {"diag.K", [](auto& c, auto& k, auto v) { c.diag.K = to_int<int>(k, v); }},
        {"picard.T", [](auto& c, auto& k, auto v) { c.picard.T = to_double(k, v); }},
        {"picard.dt", [](auto& c, auto& k, auto v) { c.picard.dt = to_double(k, v); }},
        {"picard.tol", [](auto& c, auto& k, auto v) { c.picard.tol = to_double(k, v); }},
        {"picard.max_iter", [](auto& c, auto& k, auto v) { c.picard.max_iter = to_int<int>(k, v); }},
        {"picard.start",
         [](auto& c, auto& k, auto v) {
             if (v == "linear") {
                 c.picard.start = PicardStart::Linear;
             } else if (v == "zero") {
                 c.picard.start = PicardStart::Zero;
             } else {
                 bad_value(k, v, "linear or zero");
             }
         }},
    };
    return table;
}

} // namespace

std::string_view initial_kind_name(InitialKind k) noexcept {
    switch (k) {
    case InitialKind::Gaussian: return "gaussian";
    case InitialKind::RandomBand: return "random_band";
    case InitialKind::File: return "file";
    }
    return "unknown";
}

bool same_config(const ExperimentConfig& a, const ExperimentConfig& b) {
    return serialize_config(a) == serialize_config(b);
}

void validate_config(ExperimentConfig& cfg) {
    auto rethrow = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::ConfigError) {
                throw;
            }
            fail(ErrorKind::ConfigError, e.what());
        }
    };
    rethrow([&] { cfg.grid.validate(); });
    rethrow([&] { cfg.solver.validate(); });
    rethrow([&] { cfg.diag.validate(); });
    if (cfg.grid.pad_degree < 3) {
        fail(ErrorKind::ConfigError, "grid.pad_degree must be >= 3 for the cubic term");
    }
    const InitialDataSpec& in = cfg.initial;
    if (in.kind == InitialKind::Gaussian && !(in.width > 0.0)) {
        fail(ErrorKind::ConfigError, "initial.width must be positive");
    }
    if (in.kind == InitialKind::RandomBand) {
        if (!(in.target > 0.0)) {
            fail(ErrorKind::ConfigError, "initial.target must be positive for random_band");
        }
        if (in.m_min < 1 || in.m_max < in.m_min || in.m_max >= cfg.grid.n / 2) {
            fail(ErrorKind::ConfigError, "initial band needs 1 <= m_min <= m_max < n/2");
        }
        if (in.target_level < 0) {
            fail(ErrorKind::ConfigError, "initial.target_level must be >= 0");
        }
    }
    if (in.kind == InitialKind::File && in.path.empty()) {
        fail(ErrorKind::ConfigError, "initial.path is required for kind = file");
    }
    if (!cfg.diag.s.empty()) {
        cfg.initial.mean_zero = true;
    }
    if (cfg.output.checkpoint_every < 0) {
        fail(ErrorKind::ConfigError, "output.checkpoint_every must be >= 0");
    }
    if (!(cfg.picard.T > 0.0 && cfg.picard.dt > 0.0 && cfg.picard.tol > 0.0 && cfg.picard.max_iter >= 1)) {
        fail(ErrorKind::ConfigError, "picard: need T, dt, tol > 0 and max_iter >= 1");
    }
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            fail(ErrorKind::ConfigError, "line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            fail(ErrorKind::ConfigError, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (!seen.insert(key).second) {
            fail(ErrorKind::ConfigError, "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
        it->second(cfg, key, value);
    }
    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorKind::IoError, "cannot open config '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream o;
    auto kv = [&](const char* key, const std::string& value) { o << key << " = " << value << '\n'; };
    auto num = [](double x) { return format_double(x); };
    kv("grid.dim", std::to_string(c.grid.dim));
    kv("grid.n", std::to_string(c.grid.n));
    kv("grid.L", num(c.grid.box_length));
    kv("grid.pad_degree", std::to_string(c.grid.pad_degree));
    kv("model.a", num(c.solver.params.a));
    kv("model.b", num(c.solver.params.b));
    kv("model.gamma", num(c.solver.params.gamma));
    kv("model.beta", join3(c.solver.params.beta));
    kv("solver.scheme", std::string(scheme_name(c.solver.scheme)));
    kv("solver.dt", num(c.solver.dt));
    kv("solver.t_end", num(c.solver.t_end));
    kv("solver.record_every", std::to_string(c.solver.record_every));
    kv("solver.blowup_linf", num(c.solver.blowup_linf));
    kv("initial.kind", std::string(initial_kind_name(c.initial.kind)));
    kv("initial.amplitude", num(c.initial.amplitude));
    kv("initial.width", num(c.initial.width));
    if (c.initial.center) {
        kv("initial.center", join3(*c.initial.center));
    }
    kv("initial.seed", std::to_string(c.initial.seed));
    kv("initial.slope", num(c.initial.slope));
    kv("initial.m_min", std::to_string(c.initial.m_min));
    kv("initial.m_max", std::to_string(c.initial.m_max));
    kv("initial.target", num(c.initial.target));
    kv("initial.target_level", std::to_string(c.initial.target_level));
    kv("initial.mean_zero", c.initial.mean_zero ? "true" : "false");
    if (!c.initial.path.empty()) {
        kv("initial.path", c.initial.path);
    }
    kv("output.dir", c.output.dir);
    kv("output.csv", c.output.csv);
    kv("output.json", c.output.json);
    kv("output.checkpoint", c.output.checkpoint);
    kv("output.checkpoint_every", std::to_string(c.output.checkpoint_every));
    kv("diag.N", std::to_string(c.diag.N));
    kv("diag.s", join(c.diag.s));
    kv("diag.p", join(c.diag.p));
    kv("diag.K", std::to_string(c.diag.K));
    kv("picard.T", num(c.picard.T));
    kv("picard.dt", num(c.picard.dt));
    kv("picard.tol", num(c.picard.tol));
    kv("picard.max_iter", std::to_string(c.picard.max_iter));
    kv("picard.start", c.picard.start == PicardStart::Linear ? "linear" : "zero");
    return o.str();
}

} // namespace cch
