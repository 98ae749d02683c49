#include "medchain/harness/scenario.hpp"

#include <json.hpp>

namespace medchain::harness {

using nlohmann::json;

namespace {

json params_to_json(const ScenarioParams& p) {
    return json{{"ttl", p.ttl},
                {"grace_ttl", p.grace_ttl},
                {"penalty_percent", p.penalty_percent},
                {"gates", p.gates},
                {"buffer", p.buffer},
                {"endowment", p.endowment},
                {"estimated_cost", p.estimated_cost},
                {"final_cost", p.final_cost},
                {"storage_fee", p.storage_fee},
                {"policy_price", p.policy_price},
                {"claim_amount", p.claim_amount},
                {"approve_amount", p.approve_amount},
                {"security_deposit", p.security_deposit},
                {"max_ticks", p.max_ticks}};
}

ScenarioParams params_from_json(const json& j) {
    ScenarioParams p;
    p.ttl = j.value("ttl", p.ttl);
    p.grace_ttl = j.value("grace_ttl", p.grace_ttl);
    p.penalty_percent = j.value("penalty_percent", p.penalty_percent);
    p.gates = j.value("gates", p.gates);
    p.buffer = j.value("buffer", p.buffer);
    p.endowment = j.value("endowment", p.endowment);
    p.estimated_cost = j.value("estimated_cost", p.estimated_cost);
    p.final_cost = j.value("final_cost", p.final_cost);
    p.storage_fee = j.value("storage_fee", p.storage_fee);
    p.policy_price = j.value("policy_price", p.policy_price);
    p.claim_amount = j.value("claim_amount", p.claim_amount);
    p.approve_amount = j.value("approve_amount", p.approve_amount);
    p.security_deposit = j.value("security_deposit", p.security_deposit);
    p.max_ticks = j.value("max_ticks", p.max_ticks);
    if (p.gates == 0 || (p.gates & (p.gates - 1)) != 0)
        throw ScenarioError("gates must be a power of two");
    if (p.buffer == 0) throw ScenarioError("buffer must be positive");
    return p;
}

}  // namespace

std::string Scenario::to_json() const {
    json j;
    j["name"] = name;
    j["seed"] = seed;
    j["params"] = params_to_json(params);
    j["strategies"] = json{{"patient", patient_strategy},
                           {"hospital", hospital_strategy},
                           {"insurer", insurer_strategy},
                           {"dbo", dbo_strategy}};
    j["stages"] = stages;
    j["drop_offline"] = drop_offline;
    json asserts = json::array();
    for (const auto& a : assertions) {
        asserts.push_back(json{{"type", a.type},
                               {"actor", a.actor},
                               {"op", a.op},
                               {"value", a.value},
                               {"text", a.text}});
    }
    j["assertions"] = asserts;
    return j.dump(2);
}

Scenario Scenario::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("invalid scenario json: ") + e.what());
    }
    Scenario s;
    s.name = j.value("name", "unnamed");
    s.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("params")) s.params = params_from_json(j["params"]);
    if (j.contains("strategies")) {
        const auto& st = j["strategies"];
        s.patient_strategy = st.value("patient", "honest");
        s.hospital_strategy = st.value("hospital", "honest");
        s.insurer_strategy = st.value("insurer", "honest");
        s.dbo_strategy = st.value("dbo", "honest");
    }
    if (j.contains("stages"))
        for (const auto& v : j["stages"]) s.stages.insert(v.get<std::string>());
    if (j.contains("drop_offline"))
        for (const auto& v : j["drop_offline"]) s.drop_offline.insert(v.get<std::string>());
    if (j.contains("assertions")) {
        for (const auto& v : j["assertions"]) {
            Assertion a;
            a.type = v.value("type", "");
            a.actor = v.value("actor", "");
            a.op = v.value("op", "eq");
            a.value = v.value("value", std::int64_t{0});
            a.text = v.value("text", "");
            if (a.type.empty()) throw ScenarioError("assertion without a type");
            s.assertions.push_back(a);
        }
    }
    if (s.stages.empty()) throw ScenarioError("scenario has no stages");
    return s;
}

}  // namespace medchain::harness
