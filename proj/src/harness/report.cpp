#include "medchain/harness/report.hpp"

#include <json.hpp>

namespace medchain::harness {

using nlohmann::json;

namespace {

json tx_to_json(const TxRecord& t) {
    json events = json::array();
    for (const auto& e : t.events) {
        json attrs = json::object();
        for (const auto& [k, v] : e.attrs) attrs[k] = v;
        events.push_back(json{{"name", e.name}, {"attrs", attrs}});
    }
    json j{{"tick", t.tick},
           {"contract", t.contract},
           {"function", t.function},
           {"caller", t.caller_hex},
           {"status", t.ok ? "success" : "revert"},
           {"events", events},
           {"op_count", t.op_count}};
    if (!t.ok) j["revert_reason"] = t.revert_reason;
    j["conservation_total"] = t.conservation_total;
    return j;
}

TxRecord tx_from_json(const json& j) {
    TxRecord t;
    t.tick = j.value("tick", std::uint64_t{0});
    t.contract = j.value("contract", "");
    t.function = j.value("function", "");
    t.caller_hex = j.value("caller", "");
    t.ok = j.value("status", "") == "success";
    t.revert_reason = j.value("revert_reason", "");
    t.op_count = j.value("op_count", std::uint64_t{0});
    t.conservation_total = j.value("conservation_total", std::uint64_t{0});
    if (j.contains("events")) {
        for (const auto& e : j["events"]) {
            Event ev;
            ev.name = e.value("name", "");
            if (e.contains("attrs"))
                for (auto it = e["attrs"].begin(); it != e["attrs"].end(); ++it)
                    ev.attrs.emplace_back(it.key(), it.value().get<std::string>());
            t.events.push_back(std::move(ev));
        }
    }
    return t;
}

json params_json(const ScenarioParams& p) {
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

std::vector<json> events_json(const std::vector<TxRecord>& events) {
    std::vector<json> out;
    out.reserve(events.size());
    for (const auto& t : events) out.push_back(tx_to_json(t));
    return out;
}

ScenarioParams params_from(const json& j) {
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
    return p;
}

}  // namespace

std::string RunReport::to_json() const {
    json j;
    j["scenario"] = scenario_name;
    j["seed"] = seed;
    j["params"] = params_json(params);
    j["strategies"] = strategies;
    j["stages"] = stages;
    j["endowment_total"] = endowment_total;
    j["initial_wealth"] = initial_wealth;
    j["final_wealth"] = final_wealth;
    j["final_balances"] = final_balances;
    j["conservation_by_tick"] = conservation_by_tick;
    j["conservation_ok"] = conservation_ok;
    json evs = json::array();
    for (const auto& t : events_json(events)) evs.push_back(t);
    j["events"] = evs;
    json off = json::array();
    for (const auto& o : offline) {
        off.push_back(json{{"id", o.id},
                           {"tick", o.sent_at},
                           {"from", o.from_hex},
                           {"to", o.to_hex},
                           {"kind", o.kind},
                           {"size", o.size},
                           {"payload_digest", o.payload_digest},
                           {"dropped", o.dropped}});
    }
    j["offline"] = off;
    json ops = json::object();
    for (const auto& [k, v] : op_counts) ops[k] = json{{"calls", v.calls}, {"ops", v.ops}};
    j["op_counts"] = ops;
    j["record_digests"] = record_digests;
    j["state_digest"] = state_digest;
    j["flags"] = flags;
    j["texts"] = texts;
    json asserts = json::array();
    for (const auto& a : assertions) {
        asserts.push_back(json{{"type", a.assertion.type},
                               {"actor", a.assertion.actor},
                               {"op", a.assertion.op},
                               {"value", a.assertion.value},
                               {"text", a.assertion.text},
                               {"pass", a.pass},
                               {"detail", a.detail}});
    }
    j["assertions"] = asserts;
    j["all_passed"] = all_passed;
    return j.dump(2);
}

std::string RunReport::event_log_lines() const {
    std::string out;
    for (const auto& t : events_json(events)) {
        out += t.dump();
        out += "\n";
    }
    return out;
}

RunReport RunReport::from_json(const std::string& text) {
    json j = json::parse(text);
    RunReport r;
    r.scenario_name = j.value("scenario", "");
    r.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("params")) r.params = params_from(j["params"]);
    if (j.contains("strategies"))
        for (auto it = j["strategies"].begin(); it != j["strategies"].end(); ++it)
            r.strategies[it.key()] = it.value().get<std::string>();
    if (j.contains("stages"))
        for (const auto& s : j["stages"]) r.stages.push_back(s.get<std::string>());
    r.endowment_total = j.value("endowment_total", std::uint64_t{0});
    auto read_map = [&](const char* key, std::map<std::string, Amount>& into) {
        if (!j.contains(key)) return;
        for (auto it = j[key].begin(); it != j[key].end(); ++it)
            into[it.key()] = it.value().get<Amount>();
    };
    read_map("initial_wealth", r.initial_wealth);
    read_map("final_wealth", r.final_wealth);
    read_map("final_balances", r.final_balances);
    if (j.contains("conservation_by_tick"))
        for (const auto& v : j["conservation_by_tick"]) r.conservation_by_tick.push_back(v);
    r.conservation_ok = j.value("conservation_ok", false);
    if (j.contains("events"))
        for (const auto& e : j["events"]) r.events.push_back(tx_from_json(e));
    if (j.contains("offline")) {
        for (const auto& o : j["offline"]) {
            OfflineRecord rec;
            rec.id = o.value("id", std::uint64_t{0});
            rec.sent_at = o.value("tick", std::uint64_t{0});
            rec.from_hex = o.value("from", "");
            rec.to_hex = o.value("to", "");
            rec.kind = o.value("kind", "");
            rec.size = o.value("size", std::uint64_t{0});
            rec.payload_digest = o.value("payload_digest", "");
            rec.dropped = o.value("dropped", false);
            r.offline.push_back(rec);
        }
    }
    if (j.contains("op_counts")) {
        for (auto it = j["op_counts"].begin(); it != j["op_counts"].end(); ++it) {
            OpStats s;
            s.calls = it.value().value("calls", std::uint64_t{0});
            s.ops = it.value().value("ops", std::uint64_t{0});
            r.op_counts[it.key()] = s;
        }
    }
    if (j.contains("record_digests"))
        for (auto it = j["record_digests"].begin(); it != j["record_digests"].end(); ++it)
            r.record_digests[it.key()] = it.value().get<std::string>();
    r.state_digest = j.value("state_digest", "");
    if (j.contains("flags"))
        for (auto it = j["flags"].begin(); it != j["flags"].end(); ++it)
            r.flags[it.key()] = it.value().get<std::int64_t>();
    if (j.contains("texts"))
        for (auto it = j["texts"].begin(); it != j["texts"].end(); ++it)
            r.texts[it.key()] = it.value().get<std::string>();
    if (j.contains("assertions")) {
        for (const auto& a : j["assertions"]) {
            AssertionResult res;
            res.assertion.type = a.value("type", "");
            res.assertion.actor = a.value("actor", "");
            res.assertion.op = a.value("op", "eq");
            res.assertion.value = a.value("value", std::int64_t{0});
            res.assertion.text = a.value("text", "");
            res.pass = a.value("pass", false);
            res.detail = a.value("detail", "");
            r.assertions.push_back(res);
        }
    }
    r.all_passed = j.value("all_passed", false);
    return r;
}

}  // namespace medchain::harness
