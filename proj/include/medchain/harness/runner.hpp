#pragma once

#include <memory>

#include "medchain/harness/actors.hpp"
#include "medchain/harness/report.hpp"
#include "medchain/world.hpp"

namespace medchain::harness {

/// A finished run: the report plus the final world and the scenario-known
/// sensitive material the audits scan for.
struct RunOutcome {
    RunReport report;
    std::unique_ptr<World> world;
    std::vector<std::string> sensitive_strings;
    std::vector<Bytes> research_deliveries;
    /// Content-addressed export of the database owner's plaintext store,
    /// keyed by the file's Merkle root in hex.
    std::map<std::string, Bytes> dbo_store_export;
};

/// Drives the cast against a fresh world until every enabled stage resolves.
/// Deterministic given (scenario, seed): actors are polled in a fixed order,
/// one action per actor per round, and the clock idles only when nobody acts.
RunOutcome run_scenario(const Scenario& sc);

inline RunReport run(const Scenario& sc) { return run_scenario(sc).report; }

}  // namespace medchain::harness
