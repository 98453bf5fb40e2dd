#pragma once

#include <string>
#include <vector>

#include "mgsim/harness.hpp"

namespace mgsim {

/// Fixed column order of the per-run time series.
extern const char* const kRunCsvHeader;

/// Write the series. Floats use the shortest round-trip representation, so a
/// reload reproduces the exact doubles and rewriting is byte-identical.
void write_run_csv(const std::string& path, const std::vector<Sample>& series);
std::string run_csv_text(const std::vector<Sample>& series);

/// Strict reader for files produced by write_run_csv.
std::vector<Sample> read_run_csv(const std::string& path);

}  // namespace mgsim
