#pragma once

#include <map>
#include <string>
#include <vector>

#include "medchain/harness/scenario.hpp"
#include "medchain/ledger.hpp"

namespace medchain::harness {

struct AssertionResult {
    Assertion assertion;
    bool pass = false;
    std::string detail;
};

struct OfflineRecord {
    std::uint64_t id = 0;
    Tick sent_at = 0;
    std::string from_hex;
    std::string to_hex;
    std::string kind;
    std::uint64_t size = 0;
    std::string payload_digest;
    bool dropped = false;
};

struct OpStats {
    std::uint64_t calls = 0;
    std::uint64_t ops = 0;
    bool operator==(const OpStats&) const = default;
};

/// Everything observable about one run; serializes to a stable JSON document.
struct RunReport {
    std::string scenario_name;
    std::uint64_t seed = 0;
    ScenarioParams params;
    std::map<std::string, std::string> strategies;
    std::vector<std::string> stages;

    Amount endowment_total = 0;
    std::map<std::string, Amount> initial_wealth;  // role -> balance (+ security)
    std::map<std::string, Amount> final_wealth;
    std::map<std::string, Amount> final_balances;
    std::vector<Amount> conservation_by_tick;
    bool conservation_ok = false;

    std::vector<TxRecord> events;
    std::vector<OfflineRecord> offline;
    std::map<std::string, OpStats> op_counts;        // "contract.function"
    std::map<std::string, std::string> record_digests;  // record key -> value digest
    std::string state_digest;
    std::map<std::string, std::int64_t> flags;
    std::map<std::string, std::string> texts;

    std::vector<AssertionResult> assertions;
    bool all_passed = false;

    std::string to_json() const;
    static RunReport from_json(const std::string& text);

    /// Line-delimited JSON export of the transaction trace:
    /// {tick, contract, function, caller, status, events[], op_count}
    std::string event_log_lines() const;
};

}  // namespace medchain::harness
