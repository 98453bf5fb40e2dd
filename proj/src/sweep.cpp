#include "mgsim/sweep.hpp"

#include <atomic>
#include <thread>

#include "mgsim/rng.hpp"

namespace mgsim {

SweepResult run_sweep(const Config& base, int jobs) {
    SweepResult result;
    result.axes = sweep_axes(base);

    const std::size_t n1 = result.axes[0].values.size();
    const std::size_t n2 = result.axes.size() > 1 ? result.axes[1].values.size() : 1;
    const std::size_t total = n1 * n2;
    const std::uint64_t master = base.get_u64("run.seed");

    result.cells.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        SweepCell& cell = result.cells[i];
        cell.index = i;
        cell.config = base;
        const std::size_t i1 = i / n2;
        const std::size_t i2 = i % n2;
        cell.axis_values.push_back(result.axes[0].values[i1]);
        cell.config.set(result.axes[0].key, result.axes[0].values[i1]);
        if (result.axes.size() > 1) {
            cell.axis_values.push_back(result.axes[1].values[i2]);
            cell.config.set(result.axes[1].key, result.axes[1].values[i2]);
        }
        // per-cell seed: mixed from the master seed and the cell index only
        cell.config.set("run.seed", std::to_string(derive_stream(master, 100 + i)));
    }

    int workers = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    if (static_cast<std::size_t>(workers) > total) workers = static_cast<int>(total);

    std::atomic<std::size_t> next{0};
    std::vector<std::string> errors(total);
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total) return;
            try {
                result.cells[i].record = run_scenario(make_scenario(result.cells[i].config));
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (std::size_t i = 0; i < total; ++i)
        if (!errors[i].empty())
            throw ConfigError("sweep cell " + std::to_string(i) + ": " + errors[i]);
    return result;
}

std::string sweep_summary_csv(const SweepResult& r) {
    std::string out = "index";
    for (const auto& ax : r.axes) {
        out += ',';
        out += ax.key;
    }
    out +=
        ",dq_max,t_restore,behaviour,stability,final_q1,final_q2,final_eq,final_vpcc,vdev,"
        "diverged,sync_failed,msgs_sent,msgs_dropped,max_staleness\n";

    for (const auto& cell : r.cells) {
        const RunMetrics& m = cell.record.metrics;
        out += std::to_string(cell.index);
        for (const auto& v : cell.axis_values) {
            out += ',';
            out += v;
        }
        out += ',';
        out += Config::format_f64(m.dq_max);
        out += ',';
        if (m.t_restore.has_value()) out += Config::format_f64(*m.t_restore);
        out += ',';
        out += to_string(m.behaviour);
        out += ',';
        out += to_string(m.stability);
        out += ',';
        out += Config::format_f64(m.final_q1);
        out += ',';
        out += Config::format_f64(m.final_q2);
        out += ',';
        out += Config::format_f64(m.final_eq);
        out += ',';
        out += Config::format_f64(m.final_vpcc);
        out += ',';
        out += Config::format_f64(m.vdev);
        out += ',';
        out += cell.record.diag.diverged ? "1" : "0";
        out += ',';
        out += cell.record.diag.sync_failed ? "1" : "0";
        out += ',';
        out += std::to_string(cell.record.chan[0].sent + cell.record.chan[1].sent);
        out += ',';
        out += std::to_string(cell.record.chan[0].dropped + cell.record.chan[1].dropped);
        out += ',';
        out += Config::format_f64(std::max(cell.record.max_staleness[0], cell.record.max_staleness[1]));
        out += '\n';
    }
    return out;
}

}  // namespace mgsim
