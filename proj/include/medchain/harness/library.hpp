#pragma once

#include "medchain/harness/audit.hpp"
#include "medchain/harness/runner.hpp"

namespace medchain::harness {

/// The canonical all-honest end-to-end run: treat, store, buy a policy,
/// claim, approve, research. Every stage carries exact balance assertions.
Scenario golden(ScenarioParams p = {}, std::uint64_t seed = 1);

/// One scenario per adversarial strategy (15 of them), each asserting the
/// honest counterparty's exact outcome.
std::vector<Scenario> fairness_matrix(ScenarioParams p = {});

/// One scenario per deadline-guarded transition; each must end with no live
/// escrow.
std::vector<Scenario> timeout_suite(ScenarioParams p = {});

/// golden + fairness matrix + timeout suite.
std::vector<Scenario> default_suite(ScenarioParams p = {});

/// Named demo runs for the CLI: treatment | claim | research.
Scenario demo_scenario(const std::string& which);

struct SweepEntry {
    std::uint32_t gates = 0;
    std::uint32_t buffer = 0;
    bool golden_ok = false;
    bool complaint_ok = false;
    std::int64_t file_size = 0;
    std::map<std::string, OpStats> golden_ops;
    std::map<std::string, OpStats> complaint_ops;
};

struct SweepResult {
    std::vector<SweepEntry> entries;
    std::vector<AuditVerdict> checks;
    bool all_ok = false;
    std::string to_json() const;
};

/// Runs the golden scenario and a complaint-bearing variant over the
/// gates x buffer grid and checks the qualitative cost shape: file-size
/// arithmetic, complaint cost non-decreasing in gate count, and chain-side op
/// counts independent of the buffer size.
SweepResult run_sweep(const std::vector<std::uint32_t>& gates,
                      const std::vector<std::uint32_t>& buffers, std::uint64_t seed = 1);

}  // namespace medchain::harness
