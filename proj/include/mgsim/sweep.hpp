#pragma once

#include <string>
#include <vector>

#include "mgsim/config.hpp"
#include "mgsim/harness.hpp"
#include "mgsim/scenario.hpp"

namespace mgsim {

struct SweepCell {
    std::size_t index = 0;
    std::vector<std::string> axis_values;  // aligned with the axes
    Config config;                         // fully resolved for this cell
    RunRecord record;
};

struct SweepResult {
    std::vector<AxisSpec> axes;
    std::vector<SweepCell> cells;  // row-major: axis1 outer, axis2 inner
};

/// Run the cartesian product of the axes declared in the config. Each cell
/// gets a seed derived from the master seed and the cell index, so results do
/// not depend on the worker count or completion order.
SweepResult run_sweep(const Config& base, int jobs);

/// Summary table, one row per cell: index, axis values, metrics, diagnostics.
std::string sweep_summary_csv(const SweepResult& r);

}  // namespace mgsim
