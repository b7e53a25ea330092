#pragma once

// Persistence: diagnostics CSV and binary checkpoints.
//
// Checkpoint layout, little-endian, fixed-width header of 136 bytes:
//   char[4]  magic "CCH1"        u32 version (1)
//   u32 dim  u32 n               f64 L
//   f64 t    i64 step            u32 scheme id  u32 pad_degree
//   f64 a    f64 b               f64 gamma      f64 beta[3]
//   u64 rng_state[4]             u64 coefficient count
// followed by the half-spectrum coefficients in storage order as (re, im)
// f64 pairs, then a u64 byte length and the embedded configuration text.

#include "cch/config.hpp"
#include "cch/decay.hpp"
#include "cch/initial_data.hpp"
#include "cch/integrators.hpp"

#include <fstream>
#include <string>
#include <vector>

namespace cch {

class CsvWriter {
public:
    /// Truncates `path` and writes the header row.
    CsvWriter(const std::string& path, const DiagnosticsSpec& spec);
    void write(const DiagnosticsRow& row);
    void flush();

private:
    std::ofstream out_;
    std::string path_;
};

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    /// Values of a named column; throws InvalidArgument if absent.
    std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const DiagnosticsSpec& spec, const std::vector<DiagnosticsRow>& rows);
/// Parses rows under `spec`; throws IoError if the header differs from the schema.
std::vector<DiagnosticsRow> parse_rows(const CsvTable& table, const DiagnosticsSpec& spec);

struct Checkpoint {
    GridSpec grid;
    StepperState state;
    Scheme scheme = Scheme::ETDRK2;
    ModelParams params;
    Rng::State rng_state{};
    std::string config_text;
};

void write_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::string& path);

} // namespace cch
