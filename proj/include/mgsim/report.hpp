#pragma once

#include <string>

#include "mgsim/harness.hpp"
#include "mgsim/sweep.hpp"

namespace mgsim {

/// Human-readable summary of a single run.
std::string run_report_md(const RunRecord& rec);

/// Summary of a sweep: metric tables over one axis, classification and metric
/// grids over two.
std::string sweep_report_md(const SweepResult& r);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace mgsim
