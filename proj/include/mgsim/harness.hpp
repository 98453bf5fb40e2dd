#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mgsim/netchan.hpp"
#include "mgsim/scenario.hpp"

namespace mgsim {

/// One decimated output row. Column order matches the emitted CSV.
struct Sample {
    double t = 0.0;
    double omega1 = 0.0, omega2 = 0.0;  // rad/s
    double vd1 = 0.0, vd2 = 0.0;        // measured d-axis voltages, V
    double p1 = 0.0, p2 = 0.0;          // filtered, W
    double q1 = 0.0, q2 = 0.0;          // filtered, VAr
    double dq1 = 0.0, dq2 = 0.0;        // sharing corrections, V
    double vpcc_mag = 0.0;              // V
    double delta_q = 0.0;               // |q1 - q2|, VAr
};

enum class Behaviour { Overdamped, Underdamped, Oscillating, Unstable, NotClassified };
enum class Stability { Stable, Degraded, Failed };

const char* to_string(Behaviour b);
const char* to_string(Stability s);

struct RunMetrics {
    double dq_max = 0.0;                 // peak |Q1-Q2| from the event on, VAr
    std::optional<double> t_restore;     // s after the event until sharing is restored
    Behaviour behaviour = Behaviour::NotClassified;
    Stability stability = Stability::Degraded;
    double final_p1 = 0.0, final_p2 = 0.0;
    double final_q1 = 0.0, final_q2 = 0.0;
    double final_vpcc = 0.0;
    double final_dq = 0.0;   // residual |Q1-Q2|, VAr
    double final_eq = 0.0;   // sharing error = final_dq / 2
    double vpcc_pred = 0.0;  // droop-consistent PCC voltage, V
    double vdev = 0.0;       // |final_vpcc - vpcc_pred|, V
    double dq_ptp_final = 0.0;
    double vpcc_ptp_final = 0.0;
};

struct RunDiagnostics {
    std::array<std::uint64_t, 2> duty_sat{0, 0};
    std::array<std::uint64_t, 2> v_clamp{0, 0};
    std::array<std::uint64_t, 2> i_clamp{0, 0};
    std::array<std::uint64_t, 2> dq_clamp{0, 0};
    bool diverged = false;
    double t_diverged = -1.0;
    bool sync_failed = false;
    double t_connected = -1.0;  // when inverter 2 actually closed
    // inverter 2 sync corrections at the moment of closing and at the end,
    // to observe their decay through the relay feedback
    double sync_dw_connect = 0.0, sync_dv_connect = 0.0;
    double sync_dw_final = 0.0, sync_dv_final = 0.0;
};

struct RunRecord {
    std::vector<Sample> series;
    RunMetrics metrics;
    RunDiagnostics diag;
    std::array<ChannelStats, 2> chan{};         // [0]: link 1->2, [1]: link 2->1
    std::array<double, 2> max_staleness{0, 0};  // s, at the receiving end of each link
    Scenario scenario;
};

/// Run one scenario to completion (or divergence / sync failure).
RunRecord run_scenario(const Scenario& sc);

/// First time after the event at which |Q1-Q2| drops below the threshold and
/// stays below for the hold duration. Returned relative to the event.
std::optional<double> restoration_time(const std::vector<Sample>& series, double t_event,
                                       const MetricsConfig& mc);

/// Damping character of the post-event |Q1-Q2| transient, by counting entries
/// into a settling band around the settled value. Requires at least the peak
/// window of post-event data, else NotClassified.
Behaviour classify_behaviour(const std::vector<Sample>& series, double t_event, bool diverged,
                             const MetricsConfig& mc);

/// All derived quantities for a finished series. Uses only the samples, the
/// scenario constants and the diagnostics, so it can be recomputed from an
/// emitted CSV.
RunMetrics compute_metrics(const std::vector<Sample>& series, const Scenario& sc,
                           const RunDiagnostics& diag);

}  // namespace mgsim
