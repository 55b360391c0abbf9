#include "rowsim/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "rowsim/svg_chart.hpp"

namespace rowsim {

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    const std::size_t dots = text.find("..");
    if (dots != std::string::npos) {
        const long lo = std::stol(text.substr(0, dots));
        const long hi = std::stol(text.substr(dots + 2));
        for (long v = lo; v <= hi; ++v) out.push_back(static_cast<double>(v));
        return out;
    }
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    for (double v : parse_number_list(text)) out.push_back(static_cast<std::uint64_t>(v));
    return out;
}

std::string metrics_csv_header() {
    return "strategy,lambda,seed,avg_delay_s,throughput,ideal_throughput,"
           "messages_total,messages_per_vehicle,deadlock_ties,collisions";
}

std::string metrics_csv_row(const SweepRow& row) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%g,%llu,%.6f,%d,%d,%ld,%.6f,%d,%d",
                  to_string(row.strategy), row.lambda,
                  static_cast<unsigned long long>(row.seed),
                  row.metrics.average_delay, row.metrics.throughput,
                  row.metrics.ideal_throughput, row.metrics.messages_total,
                  row.metrics.messages_per_vehicle, row.metrics.deadlock_tie_events,
                  row.metrics.collision_events);
    return buf;
}

std::vector<Aggregate> aggregate_rows(const std::vector<SweepRow>& rows) {
    std::vector<Aggregate> out;
    for (const SweepRow& row : rows) {
        Aggregate* agg = nullptr;
        for (Aggregate& a : out)
            if (a.strategy == row.strategy && a.lambda == row.lambda) agg = &a;
        if (agg == nullptr) {
            out.push_back({row.strategy, row.lambda, 0, 0, 0, 0, 0, 0, 0});
            agg = &out.back();
        }
        ++agg->n;
        agg->delay_mean += row.metrics.average_delay;
        agg->throughput_mean += row.metrics.throughput;
        agg->ideal_mean += row.metrics.ideal_throughput;
        agg->messages_per_vehicle_mean += row.metrics.messages_per_vehicle;
    }
    for (Aggregate& a : out) {
        a.delay_mean /= a.n;
        a.throughput_mean /= a.n;
        a.ideal_mean /= a.n;
        a.messages_per_vehicle_mean /= a.n;
    }
    for (const SweepRow& row : rows) {
        for (Aggregate& a : out) {
            if (a.strategy == row.strategy && a.lambda == row.lambda) {
                const double dd = row.metrics.average_delay - a.delay_mean;
                const double dt = row.metrics.throughput - a.throughput_mean;
                a.delay_sd += dd * dd;
                a.throughput_sd += dt * dt;
            }
        }
    }
    for (Aggregate& a : out) {
        a.delay_sd = a.n > 1 ? std::sqrt(a.delay_sd / (a.n - 1)) : 0.0;
        a.throughput_sd = a.n > 1 ? std::sqrt(a.throughput_sd / (a.n - 1)) : 0.0;
    }
    return out;
}

namespace {

void write_aggregates(const std::string& dir, const std::vector<Aggregate>& aggs) {
    {
        std::ofstream out(dir + "/fig6_delay.csv");
        out << "strategy,lambda,avg_delay_mean,avg_delay_sd,n\n";
        char buf[160];
        for (const Aggregate& a : aggs) {
            std::snprintf(buf, sizeof(buf), "%s,%g,%.6f,%.6f,%d\n", to_string(a.strategy),
                          a.lambda, a.delay_mean, a.delay_sd, a.n);
            out << buf;
        }
    }
    {
        std::ofstream out(dir + "/fig7_throughput.csv");
        out << "strategy,lambda,throughput_mean,throughput_sd,ideal_throughput_mean,n\n";
        char buf[160];
        for (const Aggregate& a : aggs) {
            std::snprintf(buf, sizeof(buf), "%s,%g,%.6f,%.6f,%.6f,%d\n",
                          to_string(a.strategy), a.lambda, a.throughput_mean,
                          a.throughput_sd, a.ideal_mean, a.n);
            out << buf;
        }
    }
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, const SimConfig& base) {
    if (spec.strategies.empty()) throw std::invalid_argument("no strategies selected");
    if (spec.lambdas.empty()) throw std::invalid_argument("no lambda values selected");
    if (spec.seeds.empty()) throw std::invalid_argument("no seeds selected");

    struct Task {
        StrategyKind strategy;
        double lambda;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (StrategyKind strat : spec.strategies)
        for (double lambda : spec.lambdas)
            for (std::uint64_t seed : spec.seeds) tasks.push_back({strat, lambda, seed});

    SweepResult result;
    result.rows.resize(tasks.size());
    std::vector<char> ready(tasks.size(), 0);

    std::filesystem::path dir;
    std::ofstream csv;
    if (!spec.output_dir.empty()) {
        dir = spec.output_dir;
        std::filesystem::create_directories(dir);
        csv.open(dir / "metrics.csv");
        csv << metrics_csv_header() << "\n" << std::flush;
    }

    std::mutex mu;
    std::condition_variable cv;
    std::size_t next_task = 0;
    std::size_t next_write = 0;

    auto worker = [&] {
        for (;;) {
            std::size_t mine;
            {
                std::lock_guard lock(mu);
                if (next_task >= tasks.size()) return;
                mine = next_task++;
            }
            const Task& task = tasks[mine];
            SimConfig cfg = base;
            cfg.lambda = task.lambda;
            cfg.seed = task.seed;
            RunResult run = simulate(cfg, task.strategy);
            SweepRow row;
            row.strategy = task.strategy;
            row.lambda = task.lambda;
            row.seed = task.seed;
            row.metrics = run.metrics;
            row.collided = run.aborted_on_collision;
            row.coop_min_cell_separation = run.coop_min_cell_separation;
            if (spec.write_event_logs && !spec.output_dir.empty()) {
                std::ostringstream name;
                name << "events_" << to_string(task.strategy) << "_l"
                     << static_cast<long>(task.lambda) << "_s" << task.seed << ".log";
                std::ofstream ev(dir / name.str());
                ev << event_log_to_text(run.log);
            }
            {
                std::lock_guard lock(mu);
                result.rows[mine] = row;
                ready[mine] = 1;
                // commit the finished prefix in deterministic order
                while (next_write < tasks.size() && ready[next_write]) {
                    if (csv.is_open())
                        csv << metrics_csv_row(result.rows[next_write]) << "\n"
                            << std::flush;
                    if (result.rows[next_write].collided) result.any_collision = true;
                    ++next_write;
                }
            }
            cv.notify_all();
        }
    };

    const int jobs = std::max(1, spec.jobs);
    std::vector<std::thread> pool;
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    if (!spec.output_dir.empty()) {
        const auto aggs = aggregate_rows(result.rows);
        write_aggregates(dir.string(), aggs);
        if (spec.write_charts) write_sweep_charts(dir.string(), aggs);
    }
    return result;
}

}  // namespace rowsim
