#include "cch/io.hpp"

#include "cch/error.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <sstream>

namespace cch {

namespace {

constexpr char kMagic[4] = {'C', 'C', 'H', '1'};
constexpr std::uint32_t kVersion = 1;

class ByteWriter {
public:
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void i64(std::int64_t v) { put(static_cast<std::uint64_t>(v), 8); }
    void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
    void raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
    const std::vector<char>& bytes() const noexcept { return bytes_; }

private:
    void put(std::uint64_t v, int width) {
        for (int i = 0; i < width; ++i) {
            bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
        }
    }
    std::vector<char> bytes_;
};

class ByteReader {
public:
    ByteReader(std::vector<char> bytes, std::string path) : bytes_(std::move(bytes)), path_(std::move(path)) {}
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    std::int64_t i64() { return static_cast<std::int64_t>(get(8)); }
    double f64() { return std::bit_cast<double>(get(8)); }
    std::string raw(std::size_t n) {
        need(n);
        std::string s(bytes_.data() + pos_, n);
        pos_ += n;
        return s;
    }
    bool at_end() const noexcept { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) {
            fail(ErrorKind::IoError, "checkpoint '" + path_ + "' is truncated");
        }
    }
    std::uint64_t get(int width) {
        need(static_cast<std::size_t>(width));
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        }
        pos_ += static_cast<std::size_t>(width);
        return v;
    }
    std::vector<char> bytes_;
    std::string path_;
    std::size_t pos_ = 0;
};

double parse_number(std::string_view s, const std::string& path) {
    if (s == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    if (s == "-inf") {
        return -std::numeric_limits<double>::infinity();
    }
    if (s == "nan") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double x = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        fail(ErrorKind::IoError, "csv '" + path + "': bad number '" + std::string(s) + "'");
    }
    return x;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

void ensure_parent(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
        if (ec) {
            fail(ErrorKind::IoError, "cannot create directory '" + parent.string() + "': " + ec.message());
        }
    }
}

} // namespace

CsvWriter::CsvWriter(const std::string& path, const DiagnosticsSpec& spec) : path_(path) {
    ensure_parent(path);
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) {
        fail(ErrorKind::IoError, "cannot write '" + path + "'");
    }
    const auto names = column_names(spec);
    for (std::size_t i = 0; i < names.size(); ++i) {
        out_ << (i ? "," : "") << names[i];
    }
    out_ << '\n';
}

void CsvWriter::write(const DiagnosticsRow& row) {
    const auto values = row_values(row);
    for (std::size_t i = 0; i < values.size(); ++i) {
        out_ << (i ? "," : "") << format_double(values[i]);
    }
    out_ << '\n';
    if (!out_) {
        fail(ErrorKind::IoError, "write to '" + path_ + "' failed");
    }
}

void CsvWriter::flush() { out_.flush(); }

std::vector<double> CsvTable::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) {
        fail(ErrorKind::InvalidArgument, "csv has no column '" + name + "'");
    }
    const auto idx = static_cast<std::size_t>(it - columns.begin());
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        out.push_back(r[idx]);
    }
    return out;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorKind::IoError, "cannot open '" + path + "'");
    }
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) {
        fail(ErrorKind::IoError, "csv '" + path + "' is empty");
    }
    for (auto name : split(line)) {
        table.columns.emplace_back(name);
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != table.columns.size()) {
            fail(ErrorKind::IoError, "csv '" + path + "': ragged row");
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (auto c : cells) {
            row.push_back(parse_number(c, path));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_csv(const std::string& path, const DiagnosticsSpec& spec, const std::vector<DiagnosticsRow>& rows) {
    CsvWriter w(path, spec);
    for (const auto& r : rows) {
        w.write(r);
    }
    w.flush();
}

std::vector<DiagnosticsRow> parse_rows(const CsvTable& table, const DiagnosticsSpec& spec) {
    if (table.columns != column_names(spec)) {
        fail(ErrorKind::IoError, "csv header does not match the diagnostics schema");
    }
    std::vector<DiagnosticsRow> rows;
    rows.reserve(table.rows.size());
    for (const auto& r : table.rows) {
        rows.push_back(row_from_values(spec, r));
    }
    return rows;
}

void write_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    const GridSpec& g = ckpt.grid;
    if (!(ckpt.state.u_hat.grid() == g)) {
        fail(ErrorKind::InvalidArgument, "checkpoint grid does not match its state");
    }
    ByteWriter w;
    w.raw(kMagic, 4);
    w.u32(kVersion);
    w.u32(static_cast<std::uint32_t>(g.dim));
    w.u32(static_cast<std::uint32_t>(g.n));
    w.f64(g.box_length);
    w.f64(ckpt.state.t);
    w.i64(ckpt.state.step);
    w.u32(static_cast<std::uint32_t>(ckpt.scheme));
    w.u32(static_cast<std::uint32_t>(g.pad_degree));
    w.f64(ckpt.params.a);
    w.f64(ckpt.params.b);
    w.f64(ckpt.params.gamma);
    for (double b : ckpt.params.beta) {
        w.f64(b);
    }
    for (auto s : ckpt.rng_state) {
        w.u64(s);
    }
    const auto c = ckpt.state.u_hat.coeffs();
    w.u64(c.size());
    for (const Complex& z : c) {
        w.f64(z.real());
        w.f64(z.imag());
    }
    w.u64(ckpt.config_text.size());
    w.raw(ckpt.config_text.data(), ckpt.config_text.size());

    ensure_parent(path);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
        if (!out) {
            fail(ErrorKind::IoError, "cannot write checkpoint '" + tmp + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        fail(ErrorKind::IoError, "cannot move checkpoint into '" + path + "': " + ec.message());
    }
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorKind::IoError, "cannot open checkpoint '" + path + "'");
    }
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    ByteReader r(std::move(bytes), path);
    if (r.raw(4) != std::string(kMagic, 4)) {
        fail(ErrorKind::IoError, "'" + path + "' is not a checkpoint (bad magic)");
    }
    if (const auto v = r.u32(); v != kVersion) {
        fail(ErrorKind::IoError, "checkpoint version " + std::to_string(v) + " is not supported");
    }
    GridSpec grid;
    grid.dim = static_cast<int>(r.u32());
    grid.n = static_cast<int>(r.u32());
    grid.box_length = r.f64();
    const double t = r.f64();
    const std::int64_t step = r.i64();
    const auto scheme = r.u32();
    if (scheme > 2) {
        fail(ErrorKind::IoError, "checkpoint has unknown scheme id " + std::to_string(scheme));
    }
    grid.pad_degree = static_cast<int>(r.u32());
    try {
        grid.validate();
    } catch (const Error& e) {
        fail(ErrorKind::IoError, std::string("checkpoint header: ") + e.what());
    }
    Checkpoint ck{grid, StepperState{t, step, SpectralField(grid)}, static_cast<Scheme>(scheme), {}, {}, {}};
    ck.params.a = r.f64();
    ck.params.b = r.f64();
    ck.params.gamma = r.f64();
    for (double& b : ck.params.beta) {
        b = r.f64();
    }
    for (auto& s : ck.rng_state) {
        s = r.u64();
    }
    const std::uint64_t count = r.u64();
    if (count != ck.grid.spectral_size()) {
        fail(ErrorKind::IoError, "checkpoint payload size does not match its grid");
    }
    auto c = ck.state.u_hat.coeffs();
    for (auto& z : c) {
        const double re = r.f64();
        const double im = r.f64();
        z = Complex(re, im);
    }
    const std::uint64_t len = r.u64();
    ck.config_text = r.raw(len);
    if (!r.at_end()) {
        fail(ErrorKind::IoError, "checkpoint '" + path + "' has trailing bytes");
    }
    return ck;
}

} // namespace cch
