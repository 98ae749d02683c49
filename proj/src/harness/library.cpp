#include "medchain/harness/library.hpp"

#include <json.hpp>
#include <sstream>

namespace medchain::harness {

namespace {

Assertion balance(const char* actor, const char* op, std::int64_t value) {
    Assertion a;
    a.type = "balance";
    a.actor = actor;
    a.op = op;
    a.value = value;
    return a;
}

Assertion flag(const char* name, const char* op, std::int64_t value) {
    Assertion a;
    a.type = "flag";
    a.text = name;
    a.op = op;
    a.value = value;
    return a;
}

Assertion event_count(const char* name, const char* op, std::int64_t value) {
    Assertion a;
    a.type = "event_count";
    a.text = name;
    a.op = op;
    a.value = value;
    return a;
}

Assertion phase(const char* name) {
    Assertion a;
    a.type = "case_phase";
    a.text = name;
    return a;
}

Assertion simple(const char* type) {
    Assertion a;
    a.type = type;
    return a;
}

void add_common(Scenario& s) {
    s.assertions.push_back(simple("conservation"));
    s.assertions.push_back(simple("no_stranded_escrows"));
    s.assertions.push_back(simple("privacy_chain"));
}

Scenario base(const char* name, ScenarioParams p) {
    Scenario s;
    s.name = name;
    s.params = p;
    return s;
}

}  // namespace

Scenario golden(ScenarioParams p, std::uint64_t seed) {
    Scenario s = base("golden", p);
    s.seed = seed;
    s.stages = {"treat", "store", "policy", "claim", "research"};
    add_common(s);
    s.assertions.push_back(simple("privacy_delivery"));
    std::int64_t fin = static_cast<std::int64_t>(p.final_cost);
    std::int64_t fee = static_cast<std::int64_t>(p.storage_fee);
    std::int64_t price = static_cast<std::int64_t>(p.policy_price);
    std::int64_t claim = static_cast<std::int64_t>(p.claim_amount);
    s.assertions.push_back(balance("patient", "eq", -fin - fee - price + claim));
    s.assertions.push_back(balance("hospital", "eq", fin));
    s.assertions.push_back(balance("insurer", "eq", price - claim));
    s.assertions.push_back(balance("dbo", "eq", fee));
    s.assertions.push_back(balance("rc", "eq", 0));
    s.assertions.push_back(phase("settled"));
    s.assertions.push_back(flag("file_delivered", "eq", 1));
    s.assertions.push_back(flag("dbo_accepted", "eq", 1));
    s.assertions.push_back(flag("storage_sound", "eq", 1));
    s.assertions.push_back(flag("rc_verified", "eq", 1));
    s.assertions.push_back(event_count("case_settled", "eq", 1));
    s.assertions.push_back(event_count("policy_sold", "eq", 1));
    s.assertions.push_back(event_count("claim_approved", "eq", 1));
    s.assertions.push_back(event_count("research_provided", "eq", 1));
    s.assertions.push_back(event_count("complaint_upheld", "eq", 0));
    return s;
}

std::vector<Scenario> fairness_matrix(ScenarioParams p) {
    std::vector<Scenario> out;
    std::int64_t est = static_cast<std::int64_t>(p.estimated_cost);
    std::int64_t fin = static_cast<std::int64_t>(p.final_cost);
    std::int64_t fee = static_cast<std::int64_t>(p.storage_fee);
    std::int64_t price = static_cast<std::int64_t>(p.policy_price);
    std::int64_t partial = static_cast<std::int64_t>(p.approve_amount);

    // --- malicious hospital vs honest patient (patient fairness) -----------------
    {
        Scenario s = base("hospital-overcharge", p);
        s.stages = {"treat"};
        s.hospital_strategy = "overcharge";
        add_common(s);
        s.assertions.push_back(balance("patient", "eq", 0));
        s.assertions.push_back(balance("hospital", "eq", 0));
        s.assertions.push_back(phase("aborted"));
        out.push_back(s);
    }
    {
        Scenario s = base("hospital-wrong-file", p);
        s.stages = {"treat"};
        s.hospital_strategy = "wrong_file";
        add_common(s);
        s.assertions.push_back(balance("patient", "eq", est));  // stake back plus penalty
        s.assertions.push_back(balance("hospital", "eq", -est));
        s.assertions.push_back(phase("complained"));
        s.assertions.push_back(event_count("complaint_upheld", "eq", 1));
        s.assertions.push_back(flag("file_delivered", "eq", 0));
        out.push_back(s);
    }
    {
        Scenario s = base("hospital-wrong-key", p);
        s.stages = {"treat"};
        s.hospital_strategy = "wrong_key";
        add_common(s);
        s.assertions.push_back(balance("patient", "eq", est));
        s.assertions.push_back(balance("hospital", "eq", -est));
        s.assertions.push_back(phase("complained"));
        s.assertions.push_back(event_count("complaint_upheld", "eq", 1));
        out.push_back(s);
    }
    {
        Scenario s = base("hospital-never-start", p);
        s.stages = {"treat"};
        s.hospital_strategy = "never_start";
        add_common(s);
        s.assertions.push_back(balance("patient", "eq", 0));
        s.assertions.push_back(balance("hospital", "eq", 0));
        s.assertions.push_back(phase("aborted"));
        out.push_back(s);
    }
    {
        Scenario s = base("hospital-silent-at-discharge", p);
        s.stages = {"treat"};
        s.hospital_strategy = "silent_at_discharge";
        add_common(s);
        s.assertions.push_back(balance("patient", "eq", 0));
        s.assertions.push_back(balance("hospital", "eq", 0));
        s.assertions.push_back(phase("aborted"));
        out.push_back(s);
    }
    {
        Scenario s = base("hospital-silent-at-key-reveal", p);
        s.stages = {"treat"};
        s.hospital_strategy = "silent_at_key_reveal";
        add_common(s);
        s.assertions.push_back(balance("patient", "eq", 0));
        s.assertions.push_back(balance("hospital", "eq", 0));
        s.assertions.push_back(phase("aborted"));
        out.push_back(s);
    }

    // --- malicious patient vs honest hospital (hospital fairness) -----------------
    {
        Scenario s = base("patient-false-complaint", p);
        s.stages = {"treat"};
        s.patient_strategy = "false_complaint";
        add_common(s);
        s.assertions.push_back(balance("hospital", "eq", fin));  // paid in full
        s.assertions.push_back(balance("patient", "eq", -fin));
        s.assertions.push_back(phase("settled"));
        s.assertions.push_back(event_count("complaint_rejected", "eq", 1));
        out.push_back(s);
    }
    {
        Scenario s = base("patient-no-pay", p);
        s.stages = {"treat"};
        s.patient_strategy = "no_pay";
        add_common(s);
        s.assertions.push_back(balance("hospital", "eq", 0));
        s.assertions.push_back(balance("patient", "eq", 0));
        s.assertions.push_back(phase("aborted"));
        out.push_back(s);
    }
    {
        Scenario s = base("patient-silent-after-reveal", p);
        s.stages = {"treat"};
        s.patient_strategy = "silent_after_reveal";
        add_common(s);
        // the hospital takes both stakes once the consent window lapses
        s.assertions.push_back(balance("hospital", "eq", est));
        s.assertions.push_back(balance("patient", "eq", -est));
        s.assertions.push_back(phase("aborted"));
        out.push_back(s);
    }
    {
        Scenario s = base("patient-tamper-stored-file", p);
        s.stages = {"treat", "store"};
        s.patient_strategy = "tamper_stored_file";
        add_common(s);
        s.assertions.push_back(balance("hospital", "eq", fin));
        s.assertions.push_back(balance("patient", "eq", -fin));  // fee unwound
        s.assertions.push_back(balance("dbo", "eq", 0));
        s.assertions.push_back(flag("dbo_accepted", "eq", 0));
        s.assertions.push_back(event_count("storage_roots_verified", "eq", 0));
        out.push_back(s);
    }

    // --- malicious insurer vs honest buyer (buyer fairness) ------------------------
    {
        Scenario s = base("insurer-never-respond", p);
        s.stages = {"policy"};
        s.insurer_strategy = "never_respond";
        add_common(s);
        s.assertions.push_back(balance("patient", "eq", 0));
        s.assertions.push_back(balance("insurer", "eq", 0));
        s.assertions.push_back(event_count("policy_lock_withdrawn", "eq", 1));
        out.push_back(s);
    }
    {
        Scenario s = base("insurer-ghost-after-sale", p);
        s.stages = {"treat", "store", "policy", "claim"};
        s.insurer_strategy = "ghost_after_sale";
        add_common(s);
        // the security deposit refunds the policy price in full
        s.assertions.push_back(balance("patient", "eq", -fin - fee));
        s.assertions.push_back(balance("insurer", "eq", 0));
        s.assertions.push_back(event_count("buyer_compensated", "eq", 1));
        out.push_back(s);
    }
    {
        Scenario s = base("insurer-steal-data", p);
        s.stages = {"treat", "store", "policy", "claim"};
        s.insurer_strategy = "steal_data";
        add_common(s);
        s.assertions.push_back(balance("patient", "eq", -fin - fee));
        s.assertions.push_back(balance("insurer", "eq", 0));
        s.assertions.push_back(flag("stolen_data_unreadable", "eq", 1));
        s.assertions.push_back(event_count("buyer_compensated", "eq", 1));
        out.push_back(s);
    }
    {
        Scenario s = base("insurer-partial-approve", p);
        s.stages = {"treat", "store", "policy", "claim"};
        s.insurer_strategy = "partial_approve";
        add_common(s);
        s.assertions.push_back(balance("patient", "eq", -fin - fee - price + partial));
        s.assertions.push_back(balance("insurer", "eq", price - partial));
        s.assertions.push_back(event_count("claim_approved", "eq", 1));
        s.assertions.push_back(flag("claim_approved_amount", "eq", partial));
        out.push_back(s);
    }

    // --- leaky database owner (privacy) --------------------------------------------
    {
        Scenario s = base("dbo-wrong-aggregate", p);
        s.stages = {"treat", "store", "research"};
        s.dbo_strategy = "wrong_aggregate";
        s.assertions.push_back(simple("conservation"));
        s.assertions.push_back(simple("no_stranded_escrows"));
        s.assertions.push_back(simple("privacy_chain"));
        Assertion leak;
        leak.type = "privacy_delivery_leaks";
        s.assertions.push_back(leak);
        s.assertions.push_back(flag("rc_verified", "eq", 1));  // integrity still holds
        out.push_back(s);
    }
    return out;
}

std::vector<Scenario> timeout_suite(ScenarioParams p) {
    std::vector<Scenario> out;
    std::int64_t est = static_cast<std::int64_t>(p.estimated_cost);
    std::int64_t fin = static_cast<std::int64_t>(p.final_cost);
    std::int64_t fee = static_cast<std::int64_t>(p.storage_fee);
    std::int64_t price = static_cast<std::int64_t>(p.policy_price);
    std::int64_t claim = static_cast<std::int64_t>(p.claim_amount);

    auto push = [&](Scenario s) { out.push_back(std::move(s)); };

    {
        Scenario s = base("timeout-estimate-lock", p);
        s.stages = {"treat"};
        s.patient_strategy = "no_pay";
        add_common(s);
        s.assertions.push_back(phase("aborted"));
        s.assertions.push_back(balance("patient", "eq", 0));
        s.assertions.push_back(balance("hospital", "eq", 0));
        push(s);
    }
    {
        Scenario s = base("timeout-treatment-start", p);
        s.stages = {"treat"};
        s.hospital_strategy = "never_start";
        add_common(s);
        s.assertions.push_back(phase("aborted"));
        s.assertions.push_back(balance("patient", "eq", 0));
        push(s);
    }
    {
        Scenario s = base("timeout-file-verify", p);
        s.stages = {"treat"};
        s.drop_offline = {"encoded_file"};  // the delivery never arrives
        add_common(s);
        s.assertions.push_back(phase("aborted"));
        s.assertions.push_back(balance("patient", "eq", 0));
        s.assertions.push_back(balance("hospital", "eq", 0));
        push(s);
    }
    {
        Scenario s = base("timeout-discharge", p);
        s.stages = {"treat"};
        s.hospital_strategy = "silent_at_discharge";
        add_common(s);
        s.assertions.push_back(phase("aborted"));
        push(s);
    }
    {
        Scenario s = base("timeout-bill-consent", p);
        s.stages = {"treat"};
        s.patient_strategy = "silent_at_bill_consent";
        add_common(s);
        s.assertions.push_back(phase("aborted"));
        s.assertions.push_back(balance("patient", "eq", 0));
        s.assertions.push_back(balance("hospital", "eq", 0));
        push(s);
    }
    {
        Scenario s = base("timeout-key-reveal", p);
        s.stages = {"treat"};
        s.hospital_strategy = "silent_at_key_reveal";
        add_common(s);
        s.assertions.push_back(phase("aborted"));
        push(s);
    }
    {
        Scenario s = base("timeout-file-consent", p);
        s.stages = {"treat"};
        s.patient_strategy = "silent_after_reveal";
        add_common(s);
        s.assertions.push_back(phase("aborted"));
        s.assertions.push_back(balance("hospital", "eq", est));
        s.assertions.push_back(balance("patient", "eq", -est));
        push(s);
    }
    {
        Scenario s = base("timeout-policy-phase-two", p);
        s.stages = {"policy"};
        s.insurer_strategy = "never_respond";
        add_common(s);
        s.assertions.push_back(balance("patient", "eq", 0));
        push(s);
    }
    {
        Scenario s = base("timeout-claim-reveal", p);
        s.stages = {"treat", "store", "policy", "claim"};
        s.patient_strategy = "silent_at_claim_reveal";
        add_common(s);
        s.assertions.push_back(balance("patient", "eq", -fin - fee - price));
        s.assertions.push_back(balance("insurer", "eq", price));
        s.assertions.push_back(event_count("claim_lock_withdrawn", "eq", 1));
        push(s);
    }
    {
        Scenario s = base("timeout-claim-approve", p);
        s.stages = {"treat", "store", "policy", "claim"};
        s.insurer_strategy = "silent_at_approve";
        add_common(s);
        s.assertions.push_back(balance("patient", "eq", -fin - fee - price + claim));
        s.assertions.push_back(balance("insurer", "eq", price - claim));
        s.assertions.push_back(event_count("claim_self_approved", "eq", 1));
        s.assertions.push_back(flag("claim_self_approved", "eq", 1));
        push(s);
    }
    {
        Scenario s = base("timeout-research-response", p);
        s.stages = {"treat", "store", "research"};
        s.dbo_strategy = "silent_at_research";
        add_common(s);
        s.assertions.push_back(event_count("research_provided", "eq", 0));
        push(s);
    }
    {
        Scenario s = base("timeout-storage-verify", p);
        s.stages = {"treat", "store"};
        s.dbo_strategy = "silent_at_storage_verify";
        add_common(s);
        s.assertions.push_back(balance("patient", "eq", -fin));  // fee unwound
        s.assertions.push_back(balance("dbo", "eq", 0));
        push(s);
    }
    {
        Scenario s = base("timeout-storage-reveal", p);
        s.stages = {"treat", "store"};
        s.patient_strategy = "silent_at_storage_reveal";
        add_common(s);
        s.assertions.push_back(balance("patient", "eq", -fin));
        s.assertions.push_back(balance("dbo", "eq", 0));
        push(s);
    }
    {
        Scenario s = base("timeout-storage-resolve", p);
        s.stages = {"treat", "store"};
        s.dbo_strategy = "silent_at_storage_resolve";
        add_common(s);
        s.assertions.push_back(balance("patient", "eq", -fin));
        push(s);
    }
    return out;
}

std::vector<Scenario> default_suite(ScenarioParams p) {
    std::vector<Scenario> out;
    out.push_back(golden(p));
    for (auto& s : fairness_matrix(p)) out.push_back(std::move(s));
    for (auto& s : timeout_suite(p)) out.push_back(std::move(s));
    return out;
}

Scenario demo_scenario(const std::string& which) {
    ScenarioParams p;
    if (which == "treatment") {
        Scenario s = golden(p);
        s.name = "demo-treatment";
        s.stages = {"treat"};
        s.assertions.clear();
        add_common(s);
        s.assertions.push_back(phase("settled"));
        s.assertions.push_back(balance("patient", "eq", -static_cast<std::int64_t>(p.final_cost)));
        s.assertions.push_back(balance("hospital", "eq", static_cast<std::int64_t>(p.final_cost)));
        s.assertions.push_back(flag("file_delivered", "eq", 1));
        return s;
    }
    if (which == "claim") {
        Scenario s = golden(p);
        s.name = "demo-claim";
        s.stages = {"treat", "store", "policy", "claim"};
        s.assertions.clear();
        add_common(s);
        s.assertions.push_back(event_count("claim_approved", "eq", 1));
        return s;
    }
    if (which == "research") {
        Scenario s = golden(p);
        s.name = "demo-research";
        return s;
    }
    throw ScenarioError("unknown demo: " + which + " (want treatment|claim|research)");
}

std::string SweepResult::to_json() const {
    nlohmann::json j;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json ops = nlohmann::json::object();
        for (const auto& [k, v] : e.golden_ops)
            ops[k] = nlohmann::json{{"calls", v.calls}, {"ops", v.ops}};
        nlohmann::json cops = nlohmann::json::object();
        for (const auto& [k, v] : e.complaint_ops)
            cops[k] = nlohmann::json{{"calls", v.calls}, {"ops", v.ops}};
        arr.push_back(nlohmann::json{{"gates", e.gates},
                                     {"buffer", e.buffer},
                                     {"file_size", e.file_size},
                                     {"golden_ok", e.golden_ok},
                                     {"complaint_ok", e.complaint_ok},
                                     {"golden_ops", ops},
                                     {"complaint_ops", cops}});
    }
    j["entries"] = arr;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : this->checks)
        checks.push_back(nlohmann::json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["checks"] = checks;
    j["all_ok"] = all_ok;
    return j.dump(2);
}

SweepResult run_sweep(const std::vector<std::uint32_t>& gates,
                      const std::vector<std::uint32_t>& buffers, std::uint64_t seed) {
    SweepResult result;
    for (std::uint32_t g : gates) {
        for (std::uint32_t b : buffers) {
            ScenarioParams p;
            p.gates = g;
            p.buffer = b;

            Scenario gold = golden(p, seed);
            gold.name = "golden-g" + std::to_string(g) + "-b" + std::to_string(b);
            RunReport gr = run(gold);
            evaluate_assertions(gr, gold);

            Scenario bad = base("complaint-g", p);
            bad.seed = seed;
            bad.name = "complaint-g" + std::to_string(g) + "-b" + std::to_string(b);
            bad.stages = {"treat"};
            bad.hospital_strategy = "wrong_key";
            bad.assertions.push_back(simple("conservation"));
            bad.assertions.push_back(simple("no_stranded_escrows"));
            bad.assertions.push_back(event_count("complaint_upheld", "eq", 1));
            RunReport br = run(bad);
            evaluate_assertions(br, bad);

            SweepEntry e;
            e.gates = g;
            e.buffer = b;
            e.golden_ok = gr.all_passed;
            e.complaint_ok = br.all_passed;
            e.file_size = gr.flags.count("file_size") ? gr.flags.at("file_size") : -1;
            e.golden_ops = gr.op_counts;
            e.complaint_ops = br.op_counts;
            result.entries.push_back(std::move(e));
        }
    }

    bool ok = true;
    {
        AuditVerdict v{"file_size_arithmetic", true, ""};
        for (const auto& e : result.entries) {
            std::int64_t expect = std::int64_t(e.gates) * e.buffer;
            if (e.file_size != expect) {
                v.pass = false;
                v.detail = "gates " + std::to_string(e.gates) + " buffer " +
                           std::to_string(e.buffer) + " reported " +
                           std::to_string(e.file_size);
                break;
            }
        }
        ok = ok && v.pass;
        result.checks.push_back(v);
    }
    {
        AuditVerdict v{"all_grid_runs_pass", true, ""};
        for (const auto& e : result.entries) {
            if (!e.golden_ok || !e.complaint_ok) {
                v.pass = false;
                v.detail = "grid point gates " + std::to_string(e.gates) + " buffer " +
                           std::to_string(e.buffer) + " failed";
                break;
            }
        }
        ok = ok && v.pass;
        result.checks.push_back(v);
    }
    {
        // complaint verification cost grows with the gate count, never shrinks
        AuditVerdict v{"complaint_cost_monotone_in_gates", true, ""};
        for (std::uint32_t b : buffers) {
            std::uint64_t prev = 0;
            for (std::uint32_t g : gates) {
                for (const auto& e : result.entries) {
                    if (e.gates != g || e.buffer != b) continue;
                    auto it = e.complaint_ops.find("treatment.patient_complain");
                    std::uint64_t ops = it == e.complaint_ops.end() ? 0 : it->second.ops;
                    if (ops < prev) {
                        v.pass = false;
                        v.detail = "ops dropped at gates " + std::to_string(g) + " buffer " +
                                   std::to_string(b);
                    }
                    prev = ops;
                }
            }
        }
        ok = ok && v.pass;
        result.checks.push_back(v);
    }
    {
        // for a fixed gate count the buffer size must not move chain-side costs
        AuditVerdict v{"chain_ops_buffer_independent", true, ""};
        for (std::uint32_t g : gates) {
            const SweepEntry* first = nullptr;
            for (const auto& e : result.entries) {
                if (e.gates != g) continue;
                if (!first) {
                    first = &e;
                    continue;
                }
                if (e.golden_ops != first->golden_ops ||
                    e.complaint_ops != first->complaint_ops) {
                    v.pass = false;
                    v.detail = "op counts differ across buffers at gates " + std::to_string(g);
                }
            }
        }
        ok = ok && v.pass;
        result.checks.push_back(v);
    }
    result.all_ok = ok;
    return result;
}

}  // namespace medchain::harness
