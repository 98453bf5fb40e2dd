#include "mgsim/report.hpp"

#include <cstdio>
#include <fstream>

#include "mgsim/common.hpp"

namespace mgsim {

namespace {

std::string num(double v, int prec = 3) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

std::string restore_text(const RunMetrics& m) {
    return m.t_restore.has_value() ? num(*m.t_restore) + " s" : "not reached";
}

}  // namespace

std::string run_report_md(const RunRecord& rec) {
    const RunMetrics& m = rec.metrics;
    const Scenario& sc = rec.scenario;
    std::string out;
    out += "# Run report";
    if (!sc.preset.empty()) out += " (" + sc.preset + ")";
    out += "\n\n";

    out += "## Setup\n\n";
    out += "| quantity | value |\n|---|---|\n";
    out += "| duration | " + num(sc.t_end, 2) + " s |\n";
    out += "| control period | " + Config::format_f64(sc.dt_ctrl) + " s |\n";
    out += "| plant step | " + Config::format_f64(sc.plant.dt) + " s |\n";
    out += "| reactive load current | " + num(sc.gfli.i_q_ref, 3) + " A |\n";
    if (sc.t_event >= 0.0)
        out += "| load step | -> " + num(sc.iq_post, 3) + " A at " + num(sc.t_event, 2) + " s |\n";
    out += "| virtual inductance | " + Config::format_f64(sc.gains[0].l_v) + " / " +
           Config::format_f64(sc.gains[1].l_v) + " H |\n";
    out += "| sharing correction | ";
    if (sc.qshare_on_start)
        out += "on, k = " + Config::format_f64(sc.qshare.k_iq);
    else if (sc.qshare_on_t >= 0.0)
        out += "on at " + num(sc.qshare_on_t, 2) + " s, k = " + Config::format_f64(sc.qshare.k_iq);
    else
        out += "off";
    out += " |\n";
    out += "| channel | " + num(sc.chan_12.rate_hz, 1) + " Hz, delay " +
           Config::format_f64(sc.chan_12.delay_s) + " s, loss " +
           Config::format_f64(sc.chan_12.loss_prob) + " |\n";
    out += "| seed | " + std::to_string(sc.seed) + " |\n\n";

    out += "## Outcome\n\n";
    out += "| metric | value |\n|---|---|\n";
    out += "| peak |Q1-Q2| | " + num(m.dq_max, 1) + " VAr |\n";
    out += "| restoration time | " + restore_text(m) + " |\n";
    out += "| behaviour | " + std::string(to_string(m.behaviour)) + " |\n";
    out += "| stability | " + std::string(to_string(m.stability)) + " |\n";
    out += "| final Q1 / Q2 | " + num(m.final_q1, 1) + " / " + num(m.final_q2, 1) + " VAr |\n";
    out += "| residual |Q1-Q2| | " + num(m.final_dq, 2) + " VAr |\n";
    out += "| sharing error | " + num(m.final_eq, 2) + " VAr |\n";
    out += "| final PCC voltage | " + num(m.final_vpcc, 2) + " V |\n";
    out += "| droop-consistent PCC voltage | " + num(m.vpcc_pred, 2) + " V |\n";
    out += "| voltage deviation | " + num(m.vdev, 3) + " V |\n\n";

    out += "## Diagnostics\n\n";
    out += "| item | inverter 1 | inverter 2 |\n|---|---|---|\n";
    out += "| duty saturation steps | " + std::to_string(rec.diag.duty_sat[0]) + " | " +
           std::to_string(rec.diag.duty_sat[1]) + " |\n";
    out += "| voltage-loop clamp steps | " + std::to_string(rec.diag.v_clamp[0]) + " | " +
           std::to_string(rec.diag.v_clamp[1]) + " |\n";
    out += "| current-loop clamp steps | " + std::to_string(rec.diag.i_clamp[0]) + " | " +
           std::to_string(rec.diag.i_clamp[1]) + " |\n";
    out += "| correction clamp steps | " + std::to_string(rec.diag.dq_clamp[0]) + " | " +
           std::to_string(rec.diag.dq_clamp[1]) + " |\n";
    out += "\n";
    out += "| link | sent | dropped | delivered | max staleness |\n|---|---|---|---|---|\n";
    for (int i = 0; i < 2; ++i) {
        out += std::string("| ") + (i == 0 ? "1 -> 2" : "2 -> 1") + " | " +
               std::to_string(rec.chan[i].sent) + " | " + std::to_string(rec.chan[i].dropped) +
               " | " + std::to_string(rec.chan[i].delivered) + " | " +
               num(rec.max_staleness[i], 3) + " s |\n";
    }
    if (rec.diag.diverged)
        out += "\n**Run diverged at t = " + num(rec.diag.t_diverged, 3) + " s.**\n";
    if (rec.diag.sync_failed) out += "\n**Synchronization timed out.**\n";
    if (rec.diag.t_connected > 0.0)
        out += "\nInverter 2 connected at t = " + num(rec.diag.t_connected, 3) + " s.\n";
    return out;
}

std::string sweep_report_md(const SweepResult& r) {
    std::string out = "# Sweep report";
    const std::string preset = r.cells.empty() ? "" : r.cells[0].config.get_str("scenario.preset");
    if (!preset.empty()) out += " (" + preset + ")";
    out += "\n\n";

    if (r.axes.size() == 1) {
        out += "| " + r.axes[0].key +
               " | peak dQ (VAr) | restore (s) | behaviour | stability | Q1 (VAr) | Q2 (VAr) | "
               "e_Q (VAr) | v_pcc (V) |\n";
        out += "|---|---|---|---|---|---|---|---|---|\n";
        for (const auto& cell : r.cells) {
            const RunMetrics& m = cell.record.metrics;
            out += "| " + cell.axis_values[0] + " | " + num(m.dq_max, 1) + " | " +
                   (m.t_restore ? num(*m.t_restore, 2) : std::string("-")) + " | " +
                   to_string(m.behaviour) + " | " + to_string(m.stability) + " | " +
                   num(m.final_q1, 1) + " | " + num(m.final_q2, 1) + " | " + num(m.final_eq, 1) +
                   " | " + num(m.final_vpcc, 2) + " |\n";
        }
        return out;
    }

    const std::size_t n2 = r.axes[1].values.size();
    auto cell_at = [&](std::size_t i1, std::size_t i2) -> const SweepCell& {
        return r.cells[i1 * n2 + i2];
    };

    auto grid = [&](const std::string& title, auto&& fmt) {
        out += "## " + title + "\n\n";
        out += "| " + r.axes[0].key + " \\ " + r.axes[1].key + " |";
        for (const auto& v : r.axes[1].values) out += " " + v + " |";
        out += "\n|---|";
        for (std::size_t i = 0; i < n2; ++i) out += "---|";
        out += "\n";
        for (std::size_t i1 = 0; i1 < r.axes[0].values.size(); ++i1) {
            out += "| " + r.axes[0].values[i1] + " |";
            for (std::size_t i2 = 0; i2 < n2; ++i2) out += " " + fmt(cell_at(i1, i2)) + " |";
            out += "\n";
        }
        out += "\n";
    };

    grid("Stability", [](const SweepCell& c) -> std::string {
        return to_string(c.record.metrics.stability);
    });
    grid("Restoration time (s)", [](const SweepCell& c) -> std::string {
        return c.record.metrics.t_restore ? num(*c.record.metrics.t_restore, 2) : std::string("-");
    });
    grid("Peak |Q1-Q2| (VAr)", [](const SweepCell& c) -> std::string {
        return num(c.record.metrics.dq_max, 0);
    });
    grid("Residual |Q1-Q2| (VAr)", [](const SweepCell& c) -> std::string {
        return num(c.record.metrics.final_dq, 1);
    });
    grid("Voltage deviation (V)", [](const SweepCell& c) -> std::string {
        return num(c.record.metrics.vdev, 2);
    });
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << text;
}

}  // namespace mgsim
