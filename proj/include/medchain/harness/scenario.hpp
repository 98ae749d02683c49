#pragma once

#include <set>
#include <string>
#include <vector>

#include "medchain/types.hpp"

namespace medchain::harness {

/// Protocol and economy knobs for one run. Gates and buffer follow the
/// file-size arithmetic fileSize = gates * buffer.
struct ScenarioParams {
    Tick ttl = 10;
    Tick grace_ttl = 10;
    std::uint32_t penalty_percent = 100;
    std::uint32_t gates = 4;    // input gates = file chunks
    std::uint32_t buffer = 32;  // chunk size in bytes
    Amount endowment = 1000;
    Amount estimated_cost = 100;
    Amount final_cost = 80;
    Amount storage_fee = 10;
    Amount policy_price = 50;
    Amount claim_amount = 40;
    Amount approve_amount = 40;  // used by the partial-approval strategy
    Amount security_deposit = 100;
    std::uint64_t max_ticks = 2000;
};

/// Declarative check evaluated on the finished run.
///   conservation            every transaction left the total intact
///   no_stranded_escrows     no live escrow at the end
///   balance                 actor wealth vs initial: op in {eq, ge, le}, delta signed
///   case_phase              the treatment case ended in phase `text`
///   event_count             event `text` appeared `value` times (op applies)
///   flag                    named runner flag `text` equals `value`
///   privacy_chain           chain state free of sensitive strings
///   privacy_delivery        research deliveries free of identifiers
///   privacy_delivery_leaks  negative control: the scan must hit
struct Assertion {
    std::string type;
    std::string actor;  // patient | hospital | insurer | dbo | rc
    std::string op = "eq";
    std::int64_t value = 0;
    std::string text;
};

/// Actor cast with one entity per kind, a strategy each, and the protocol
/// stages the run drives.
struct Scenario {
    std::string name;
    std::uint64_t seed = 1;
    ScenarioParams params;
    std::string patient_strategy = "honest";
    std::string hospital_strategy = "honest";
    std::string insurer_strategy = "honest";
    std::string dbo_strategy = "honest";
    std::set<std::string> stages;  // treat, store, policy, claim, research
    std::set<std::string> drop_offline;  // message kinds the bus silently drops
    std::vector<Assertion> assertions;

    std::string to_json() const;
    static Scenario from_json(const std::string& text);
};

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace medchain::harness
