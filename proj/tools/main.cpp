// Batch front end: validate scenario files, execute runs and seed sweeps,
// and distill emitted reports into plot-ready CSV.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ifsim/engine.hpp"
#include "ifsim/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("short write to " + path.string());
}

fs::path default_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("IFSIM_OUT"); env && *env) return env;
    return "ifsim-out";
}

// Scalar per-run metrics used by sweep aggregation and the report command.
std::vector<std::pair<std::string, double>> scalar_metrics(const json& report) {
    std::vector<std::pair<std::string, double>> out;
    const auto& agg = report.at("aggregate");
    const double attempts = agg.at("attempts").get<double>();
    const double outages = agg.at("outages").get<double>();
    const double arrivals = agg.at("arrivals").get<double>();
    const double lost = agg.at("lost").get<double>();
    out.emplace_back("spatial_throughput_overall",
                     report.at("spatial_throughput_overall").get<double>());
    out.emplace_back("outage_rate", attempts > 0 ? outages / attempts : 0.0);
    out.emplace_back("packet_loss_rate", arrivals > 0 ? lost / arrivals : 0.0);
    out.emplace_back("attempts", attempts);
    out.emplace_back("arrivals", arrivals);
    double thr_sum = 0.0;
    long thr_n = 0;
    for (const auto& l : report.at("links")) {
        if (!l.at("effective_throughput").is_null()) {
            thr_sum += l.at("effective_throughput").get<double>();
            ++thr_n;
        }
    }
    out.emplace_back("mean_effective_throughput", thr_n > 0 ? thr_sum / thr_n : 0.0);
    return out;
}

void write_run_artifacts(const fs::path& dir, const ifsim::RunReport& report) {
    fs::create_directories(dir);
    write_file(dir / "resolved_config.json", report.config.dump(2) + "\n");
    const json rj = report.to_json();
    write_file(dir / "report.json", rj.dump(2) + "\n");

    // per-window summary series
    std::ostringstream csv;
    csv << "window_start,window_end,spatial_throughput\n";
    for (const auto& w : report.windows)
        csv << w.start << "," << w.end << "," << w.spatial_throughput << "\n";
    write_file(dir / "metrics.csv", csv.str());

    // per-window link records as JSON lines
    std::ostringstream jl;
    for (const auto& w : rj.at("windows")) jl << w.dump() << "\n";
    write_file(dir / "metrics.jsonl", jl.str());

    std::ostringstream al;
    for (const auto& a : rj.at("adaptation")) al << a.dump() << "\n";
    write_file(dir / "adaptation.jsonl", al.str());

    if (report.initial_topology)
        write_file(dir / "topology.json", rj.at("topology").dump(2) + "\n");

    const bool export_backlog = report.config.value("export_backlog", false);
    if (export_backlog) {
        std::ostringstream bl;
        bl << "link,slot,backlog\n";
        for (const auto& l : report.links)
            for (std::size_t t = 0; t < l.backlog_trace.size(); ++t)
                bl << l.id << "," << t << "," << l.backlog_trace[t] << "\n";
        write_file(dir / "backlog.csv", bl.str());
    }
}

void write_aggregate_csv(const fs::path& path, const std::vector<json>& reports) {
    std::map<std::string, std::vector<double>> series;
    for (const auto& r : reports)
        for (const auto& [name, value] : scalar_metrics(r)) series[name].push_back(value);
    std::ostringstream csv;
    csv << "metric,mean,stddev,runs\n";
    for (const auto& [name, values] : series) {
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        var /= static_cast<double>(values.size());
        csv << name << "," << mean << "," << std::sqrt(var) << "," << values.size() << "\n";
    }
    write_file(path, csv.str());
}

int cmd_validate(const std::string& config_path) {
    const ifsim::ScenarioConfig cfg = ifsim::parse_and_validate(read_file(config_path));
    std::cout << ifsim::resolved_config(cfg).dump(2) << "\n";
    return kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& out_flag,
            std::optional<std::uint64_t> seed_override) {
    ifsim::ScenarioConfig cfg = ifsim::parse_and_validate(read_file(config_path));
    if (seed_override) cfg.seed = *seed_override;
    const ifsim::RunReport report = ifsim::run(cfg);
    const fs::path dir = default_out_dir(out_flag);
    write_run_artifacts(dir, report);
    std::cout << "run complete: " << (dir / "report.json").string() << "\n";
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& out_flag,
              std::optional<std::uint64_t> seed_override, int replications, int jobs) {
    const ifsim::ScenarioConfig base = ifsim::parse_and_validate(read_file(config_path));
    const std::uint64_t seed0 = seed_override.value_or(base.seed);
    const fs::path dir = default_out_dir(out_flag);
    fs::create_directories(dir);

    std::vector<json> reports(static_cast<std::size_t>(replications));
    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::string first_error;

    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= replications) return;
            try {
                ifsim::ScenarioConfig cfg = base;
                cfg.seed = seed0 + static_cast<std::uint64_t>(i);
                const ifsim::RunReport rep = ifsim::run(cfg);
                write_run_artifacts(dir / ("run_" + std::to_string(cfg.seed)), rep);
                reports[static_cast<std::size_t>(i)] = rep.to_json();
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error.empty()) first_error = e.what();
            }
        }
    };

    const int n_threads = std::max(1, std::min(jobs, replications));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    if (!first_error.empty()) throw std::runtime_error(first_error);
    write_aggregate_csv(dir / "aggregate.csv", reports);
    std::cout << "sweep complete: " << replications << " runs in " << dir.string() << "\n";
    return kExitOk;
}

int cmd_report(const std::string& out_flag) {
    const fs::path dir = default_out_dir(out_flag);
    std::vector<std::pair<std::string, json>> found;
    if (fs::exists(dir / "report.json"))
        found.emplace_back(dir.filename().string(), json::parse(read_file(dir / "report.json")));
    if (fs::is_directory(dir)) {
        std::vector<fs::path> run_dirs;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_directory() && entry.path().filename().string().rfind("run_", 0) == 0 &&
                fs::exists(entry.path() / "report.json"))
                run_dirs.push_back(entry.path());
        std::sort(run_dirs.begin(), run_dirs.end());
        for (const auto& p : run_dirs)
            found.emplace_back(p.filename().string(), json::parse(read_file(p / "report.json")));
    }
    if (found.empty()) throw std::runtime_error("no report.json under " + dir.string());

    std::vector<json> reports;
    for (auto& [name, r] : found) reports.push_back(r);
    write_aggregate_csv(dir / "aggregate.csv", reports);

    std::ostringstream csv;
    csv << "run,window_start,window_end,spatial_throughput\n";
    for (const auto& [name, r] : found)
        for (const auto& w : r.at("windows"))
            csv << name << "," << w.at("start").get<long>() << "," << w.at("end").get<long>()
                << "," << w.at("spatial_throughput").get<double>() << "\n";
    write_file(dir / "windows.csv", csv.str());
    std::cout << "report written: " << (dir / "aggregate.csv").string() << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"decentralized interference network simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    int replications = 8;
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    auto* validate = app.add_subcommand("validate", "parse a scenario and echo the resolved config");
    validate->add_option("--config", config_path, "scenario file")->required();

    auto* run_cmd = app.add_subcommand("run", "execute one scenario");
    run_cmd->add_option("--config", config_path, "scenario file")->required();
    run_cmd->add_option("--out", out_dir, "output directory (or $IFSIM_OUT)");
    run_cmd->add_option("--seed", seed, "override the scenario seed");

    auto* sweep = app.add_subcommand("sweep", "run replications over consecutive seeds");
    sweep->add_option("--config", config_path, "scenario file")->required();
    sweep->add_option("--out", out_dir, "output directory (or $IFSIM_OUT)");
    sweep->add_option("--seed", seed, "base seed (default: scenario seed)");
    sweep->add_option("--replications", replications, "number of runs")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);

    auto* report = app.add_subcommand("report", "aggregate emitted reports into CSV");
    report->add_option("--out", out_dir, "directory holding run_*/report.json");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(validate)) return cmd_validate(config_path);
        if (app.got_subcommand(run_cmd)) return cmd_run(config_path, out_dir, seed);
        if (app.got_subcommand(sweep))
            return cmd_sweep(config_path, out_dir, seed, replications, jobs);
        if (app.got_subcommand(report)) return cmd_report(out_dir);
    } catch (const ifsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
