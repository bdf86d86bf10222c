// End-to-end checks of the command-line front end: exit codes, artifact
// determinism, sweep aggregation, and report distillation. Invoked by ctest
// with the CLI binary path as the only argument.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int g_failures = 0;

#define CHECK_MSG(cond, msg)                                                     \
    do {                                                                         \
        if (!(cond)) {                                                           \
            std::printf("FAIL %s:%d  %s\n", __FILE__, __LINE__, msg);            \
            ++g_failures;                                                        \
        }                                                                        \
    } while (0)

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

int run_cmd(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

json scenario() {
    return json{
        {"seed", 5},
        {"total_slots", 3000},
        {"area", {{"width", 100.0}, {"height", 100.0}}},
        {"topology",
         {{"kind", "explicit"},
          {"links",
           json::array({json{{"id", 0}, {"tx", {40.0, 50.0}}, {"rx", {40.0, 55.0}}},
                        json{{"id", 1}, {"tx", {60.0, 50.0}}, {"rx", {60.0, 55.0}}}})}}},
        {"channel",
         {{"path_loss_exponent", 4.0}, {"min_distance", 1.0}, {"fading", "rayleigh"},
          {"tx_power", 1e6}}},
        {"design",
         {{"coding_rate", 1.0}, {"decoder", "ian"}, {"mac", {{"kind", "aloha"}, {"p", 0.6}}},
          {"max_transmissions", 2}}},
        {"arrivals", {{"kind", "bernoulli"}, {"rate", 0.5}}},
        {"export_backlog", true}};
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::printf("usage: cli_tests <path-to-ifsim-binary>\n");
        return 2;
    }
    const std::string bin = argv[1];
    const fs::path work = fs::temp_directory_path() / "ifsim_cli_tests";
    fs::remove_all(work);
    fs::create_directories(work);

    const fs::path cfg_path = work / "scenario.json";
    spit(cfg_path, scenario().dump(2));

    // --- validate ---------------------------------------------------------
    CHECK_MSG(run_cmd(bin + " validate --config " + cfg_path.string() + " > " +
                      (work / "resolved.txt").string()) == 0,
              "validate on a good config exits 0");

    const fs::path bad_path = work / "bad.json";
    json bad = scenario();
    bad["design"]["mac"]["p"] = 1.5;
    spit(bad_path, bad.dump());
    CHECK_MSG(run_cmd(bin + " validate --config " + bad_path.string() + " 2> " +
                      (work / "err.txt").string()) == 2,
              "validate on a bad config exits 2");
    CHECK_MSG(slurp(work / "err.txt").find("config.design.mac.p") != std::string::npos,
              "validation error names the key path");

    const fs::path missing = work / "nosuch.json";
    CHECK_MSG(run_cmd(bin + " run --config " + missing.string() + " --out " +
                      (work / "never").string() + " 2> /dev/null") == 1,
              "missing config file exits 1");
    CHECK_MSG(!fs::exists(work / "never"), "failed run leaves no artifacts");

    // --- run determinism ---------------------------------------------------
    const fs::path out_a = work / "run_a";
    const fs::path out_b = work / "run_b";
    CHECK_MSG(run_cmd(bin + " run --config " + cfg_path.string() + " --out " +
                      out_a.string() + " > /dev/null") == 0,
              "run exits 0");
    CHECK_MSG(run_cmd(bin + " run --config " + cfg_path.string() + " --out " +
                      out_b.string() + " > /dev/null") == 0,
              "second run exits 0");
    for (const char* name :
         {"report.json", "resolved_config.json", "metrics.csv", "metrics.jsonl",
          "adaptation.jsonl", "topology.json", "backlog.csv"}) {
        CHECK_MSG(fs::exists(out_a / name), (std::string("artifact exists: ") + name).c_str());
        CHECK_MSG(slurp(out_a / name) == slurp(out_b / name),
                  (std::string("artifact bytes identical: ") + name).c_str());
    }

    // re-running from the emitted resolved config reproduces everything
    const fs::path out_c = work / "run_c";
    CHECK_MSG(run_cmd(bin + " run --config " + (out_a / "resolved_config.json").string() +
                      " --out " + out_c.string() + " > /dev/null") == 0,
              "run from the resolved config exits 0");
    CHECK_MSG(slurp(out_a / "report.json") == slurp(out_c / "report.json"),
              "resolved config reproduces the report byte for byte");

    // --seed overrides the scenario seed
    const fs::path out_d = work / "run_d";
    CHECK_MSG(run_cmd(bin + " run --config " + cfg_path.string() + " --seed 6 --out " +
                      out_d.string() + " > /dev/null") == 0,
              "seed override run exits 0");
    CHECK_MSG(slurp(out_a / "report.json") != slurp(out_d / "report.json"),
              "different seed changes the report");

    // --- sweep + aggregate --------------------------------------------------
    const fs::path sweep_dir = work / "sweep";
    CHECK_MSG(run_cmd(bin + " sweep --config " + cfg_path.string() + " --out " +
                      sweep_dir.string() + " --replications 4 --jobs 2 > /dev/null") == 0,
              "sweep exits 0");
    for (int seed = 5; seed < 9; ++seed)
        CHECK_MSG(fs::exists(sweep_dir / ("run_" + std::to_string(seed)) / "report.json"),
                  "sweep wrote every replication");

    // aggregate means equal the arithmetic means of per-run values
    double sum_spatial = 0.0;
    for (int seed = 5; seed < 9; ++seed) {
        const json rep = json::parse(
            slurp(sweep_dir / ("run_" + std::to_string(seed)) / "report.json"));
        sum_spatial += rep.at("spatial_throughput_overall").get<double>();
    }
    const double expect_mean = sum_spatial / 4.0;

    double got_mean = -1.0;
    {
        std::istringstream agg(slurp(sweep_dir / "aggregate.csv"));
        std::string line;
        std::getline(agg, line); // header
        while (std::getline(agg, line)) {
            if (line.rfind("spatial_throughput_overall,", 0) == 0) {
                const auto c1 = line.find(',');
                const auto c2 = line.find(',', c1 + 1);
                got_mean = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
            }
        }
    }
    CHECK_MSG(std::abs(got_mean - expect_mean) <= 1e-9 * std::max(1.0, std::abs(expect_mean)),
              "aggregate mean equals the arithmetic mean of per-run values");

    // --- report -------------------------------------------------------------
    CHECK_MSG(run_cmd(bin + " report --out " + sweep_dir.string() + " > /dev/null") == 0,
              "report exits 0");
    CHECK_MSG(fs::exists(sweep_dir / "windows.csv"), "report wrote the window series");
    const std::string windows = slurp(sweep_dir / "windows.csv");
    CHECK_MSG(windows.find("run_5,") != std::string::npos, "window series names the runs");

    if (g_failures == 0) {
        std::printf("cli tests passed\n");
        return 0;
    }
    std::printf("%d cli check(s) failed\n", g_failures);
    return 1;
}
