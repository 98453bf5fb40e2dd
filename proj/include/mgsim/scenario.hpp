#pragma once

#include <string>
#include <vector>

#include "mgsim/config.hpp"
#include "mgsim/controller.hpp"
#include "mgsim/netchan.hpp"
#include "mgsim/plant.hpp"
#include "mgsim/qshare.hpp"

namespace mgsim {

/// Thresholds for the derived metrics and classifications. These are artifact
/// defaults, not physical constants; all are configurable.
struct MetricsConfig {
    double restore_threshold = 20.0;  // VAr
    double restore_hold = 0.2;        // s
    double window = 1.0;              // s, final averaging window
    double class_band_floor = 10.0;   // VAr
    double class_band_frac = 0.02;
    double peak_window = 1.0;         // s
    double unstable_factor = 4.0;
    double stable_dq = 20.0;          // VAr
    double degraded_dq = 200.0;       // VAr
    double stable_dv = 2.0;           // V
    double degraded_dv = 10.0;        // V
    double osc_dq_ptp = 20.0;         // VAr
    double osc_dv_ptp = 2.0;          // V

    void validate() const;
};

/// Everything one deterministic run needs. Built from a Config; the channel
/// seeds are derived from the master seed (streams 1 and 2; noise is 3).
struct Scenario {
    PlantParams plant{};
    GfliParams gfli{};
    std::array<ControlGains, 2> gains{};
    std::array<DroopSetpoints, 2> setpoints{};
    SyncConfig sync{};
    QShareParams qshare{};
    ChannelParams chan_12{};  // inverter 1 -> 2
    ChannelParams chan_21{};
    NoiseParams noise{};
    MetricsConfig metrics{};

    std::array<bool, 2> start_connected{true, true};
    double theta0_2 = 0.0;
    double delta_v0_2 = 0.0;
    bool qshare_on_start = false;

    double dt_ctrl = 5e-5;
    double t_end = 6.0;
    double softstart = 0.25;
    double t_event = -1.0;      // reactive load step time (< 0: none)
    double iq_post = 0.0;       // A, gfli.i_q after the step
    double qshare_on_t = -1.0;  // correction enable time (< 0: per qshare_on_start)
    double sync_start_t = -1.0; // inverter 2 sync start (< 0: starts connected)

    int decimation = 20;
    std::uint64_t seed = 1;
    double divergence_bound = 1e6;
    std::string preset;

    void validate() const;
};

Scenario make_scenario(const Config& cfg);

/// Swept config key plus its values (canonical strings).
struct AxisSpec {
    std::string key;
    std::vector<std::string> values;
};

/// Axes declared in the config (sweep.axis1_key/values, axis2 optional).
/// Error if axis1 is missing or any declared axis has no values.
std::vector<AxisSpec> sweep_axes(const Config& cfg);

/// Named experiment presets, each a Config overlay on the defaults.
Config preset_config(const std::string& name);
std::vector<std::string> preset_names();
bool is_preset(const std::string& name);

}  // namespace mgsim
