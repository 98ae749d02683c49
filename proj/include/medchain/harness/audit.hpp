#pragma once

#include "medchain/harness/report.hpp"
#include "medchain/world.hpp"

namespace medchain::harness {

/// Evaluates the scenario's assertion list against a finished report and
/// stores the results (and the all_passed bit) into it.
void evaluate_assertions(RunReport& report, const Scenario& sc);

struct AuditVerdict {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Ledger-wide integrity checks against the live world: conservation at every
/// recorded transaction and now, and immutability of every written record
/// against its write event. The test hooks break exactly these.
std::vector<AuditVerdict> audit_ledger(const World& w);

/// Re-derives what a report alone can support: per-tick conservation,
/// record-digest consistency with the write events, and the assertion
/// verdicts it carries.
std::vector<AuditVerdict> audit_report(const RunReport& r);

}  // namespace medchain::harness
