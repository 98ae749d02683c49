// Command-line front end: run scenario files, sweep the gate/buffer grid,
// audit saved reports, and run the built-in demos.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "medchain/harness/library.hpp"

using namespace medchain;
using namespace medchain::harness;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

int finish_run(const Scenario& sc, const std::string& report_path,
               const std::string& events_path, const std::string& dbo_store_dir) {
    RunOutcome outcome = run_scenario(sc);
    RunReport& r = outcome.report;
    evaluate_assertions(r, sc);

    std::cout << "scenario: " << r.scenario_name << " (seed " << r.seed << ")\n";
    std::cout << "ticks: " << (r.events.empty() ? 0 : r.events.back().tick)
              << "  transactions: " << r.events.size() << "\n";
    std::cout << "state digest: " << r.state_digest << "\n";
    for (const auto& [role, w] : r.final_wealth) {
        std::int64_t delta = static_cast<std::int64_t>(w) -
                             static_cast<std::int64_t>(r.initial_wealth.at(role));
        std::cout << "  " << role << ": " << w << " (" << (delta >= 0 ? "+" : "")
                  << delta << ")\n";
    }
    for (const auto& a : r.assertions) {
        std::cout << (a.pass ? "[ok]   " : "[FAIL] ") << a.assertion.type;
        if (!a.assertion.actor.empty()) std::cout << " " << a.assertion.actor;
        if (!a.assertion.text.empty()) std::cout << " " << a.assertion.text;
        std::cout << ": " << a.detail << "\n";
    }
    std::cout << (r.all_passed ? "all assertions passed" : "ASSERTIONS FAILED") << "\n";

    if (!report_path.empty()) write_file(report_path, r.to_json());
    if (!events_path.empty()) write_file(events_path, r.event_log_lines());
    if (!dbo_store_dir.empty()) {
        std::filesystem::create_directories(dbo_store_dir);
        for (const auto& [root_hex, bytes] : outcome.dbo_store_export)
            write_file(dbo_store_dir + "/" + root_hex,
                       std::string(bytes.begin(), bytes.end()));
        std::cout << "dbo store: " << outcome.dbo_store_export.size() << " file(s) exported\n";
    }
    return r.all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic healthcare fair-exchange protocol simulator"};
    app.require_subcommand(1);

    std::string scenario_path, report_path, events_path, dbo_store_dir;
    auto* run_cmd = app.add_subcommand("run", "run a scenario file and check its assertions");
    run_cmd->add_option("scenario", scenario_path, "scenario json file")->required();
    run_cmd->add_option("--report", report_path, "write the full run report as json");
    run_cmd->add_option("--events", events_path, "write the transaction trace as ldjson");
    run_cmd->add_option("--dbo-store", dbo_store_dir,
                        "export the dbo plaintext store, one file per Merkle root");

    std::vector<std::uint32_t> gates{4, 8, 16, 32};
    std::vector<std::uint32_t> buffers{32, 64, 128};
    std::uint64_t sweep_seed = 1;
    std::string sweep_report;
    auto* sweep_cmd = app.add_subcommand("sweep", "run the gate/buffer grid and check cost shape");
    sweep_cmd->add_option("--gates", gates, "input gate counts")->delimiter(',');
    sweep_cmd->add_option("--buffers", buffers, "buffer sizes in bytes")->delimiter(',');
    sweep_cmd->add_option("--seed", sweep_seed, "scenario seed");
    sweep_cmd->add_option("--report", sweep_report, "write the sweep result as json");

    std::string audit_path;
    auto* audit_cmd = app.add_subcommand("audit", "re-derive integrity verdicts from a report");
    audit_cmd->add_option("report", audit_path, "report json file")->required();

    std::string demo_which, demo_save;
    auto* demo_cmd = app.add_subcommand("demo", "run a built-in scenario");
    demo_cmd->add_option("which", demo_which, "treatment | claim | research")->required();
    demo_cmd->add_option("--save-scenario", demo_save, "write the scenario json for editing");
    demo_cmd->add_option("--report", report_path, "write the full run report as json");
    demo_cmd->add_option("--events", events_path, "write the transaction trace as ldjson");
    demo_cmd->add_option("--dbo-store", dbo_store_dir,
                         "export the dbo plaintext store, one file per Merkle root");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            Scenario sc = Scenario::from_json(read_file(scenario_path));
            return finish_run(sc, report_path, events_path, dbo_store_dir);
        }
        if (*sweep_cmd) {
            SweepResult sw = run_sweep(gates, buffers, sweep_seed);
            std::cout << "grid points: " << sw.entries.size() << "\n";
            for (const auto& e : sw.entries) {
                std::cout << "  gates " << e.gates << " buffer " << e.buffer << ": file size "
                          << e.file_size << ", golden " << (e.golden_ok ? "ok" : "FAIL")
                          << ", complaint " << (e.complaint_ok ? "ok" : "FAIL") << "\n";
            }
            for (const auto& c : sw.checks)
                std::cout << (c.pass ? "[ok]   " : "[FAIL] ") << c.name
                          << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
            if (!sweep_report.empty()) write_file(sweep_report, sw.to_json());
            std::cout << (sw.all_ok ? "sweep passed" : "sweep FAILED") << "\n";
            return sw.all_ok ? 0 : 1;
        }
        if (*audit_cmd) {
            RunReport r = RunReport::from_json(read_file(audit_path));
            bool ok = true;
            for (const auto& v : audit_report(r)) {
                std::cout << (v.pass ? "[ok]   " : "[FAIL] ") << v.name
                          << (v.detail.empty() ? "" : ": " + v.detail) << "\n";
                ok = ok && v.pass;
            }
            std::cout << (ok ? "audit passed" : "audit FAILED") << "\n";
            return ok ? 0 : 1;
        }
        if (*demo_cmd) {
            Scenario sc = demo_scenario(demo_which);
            if (!demo_save.empty()) write_file(demo_save, sc.to_json());
            return finish_run(sc, report_path, events_path, dbo_store_dir);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
