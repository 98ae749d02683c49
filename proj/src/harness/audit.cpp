#include "medchain/harness/audit.hpp"

#include <sstream>

namespace medchain::harness {

namespace {

bool cmp(std::int64_t lhs, const std::string& op, std::int64_t rhs) {
    if (op == "eq") return lhs == rhs;
    if (op == "ge") return lhs >= rhs;
    if (op == "le") return lhs <= rhs;
    if (op == "gt") return lhs > rhs;
    if (op == "lt") return lhs < rhs;
    return false;
}

std::int64_t count_events(const RunReport& r, const std::string& name) {
    std::int64_t n = 0;
    for (const auto& tx : r.events) {
        if (!tx.ok) continue;
        for (const auto& e : tx.events)
            if (e.name == name) ++n;
    }
    return n;
}

AssertionResult eval_one(const RunReport& r, const Assertion& a) {
    AssertionResult res;
    res.assertion = a;
    std::ostringstream detail;

    if (a.type == "conservation") {
        res.pass = r.conservation_ok;
        detail << (res.pass ? "total intact at every transaction"
                            : "conservation violated");
    } else if (a.type == "no_stranded_escrows") {
        auto it = r.flags.find("live_escrows");
        std::int64_t live = it == r.flags.end() ? -1 : it->second;
        res.pass = live == 0;
        detail << "live escrow total at end = " << live;
    } else if (a.type == "balance") {
        auto ini = r.initial_wealth.find(a.actor);
        auto fin = r.final_wealth.find(a.actor);
        if (ini == r.initial_wealth.end() || fin == r.final_wealth.end()) {
            res.pass = false;
            detail << "unknown actor " << a.actor;
        } else {
            std::int64_t delta = static_cast<std::int64_t>(fin->second) -
                                 static_cast<std::int64_t>(ini->second);
            res.pass = cmp(delta, a.op, a.value);
            detail << a.actor << " wealth delta " << delta << " " << a.op << " " << a.value;
        }
    } else if (a.type == "case_phase") {
        auto it = r.texts.find("case_phase");
        std::string phase = it == r.texts.end() ? "(none)" : it->second;
        res.pass = phase == a.text;
        detail << "case phase " << phase << " expected " << a.text;
    } else if (a.type == "event_count") {
        std::int64_t n = count_events(r, a.text);
        res.pass = cmp(n, a.op, a.value);
        detail << "event " << a.text << " count " << n << " " << a.op << " " << a.value;
    } else if (a.type == "flag") {
        auto it = r.flags.find(a.text);
        std::int64_t v = it == r.flags.end() ? -1 : it->second;
        res.pass = cmp(v, a.op, a.value);
        detail << "flag " << a.text << " = " << v << " " << a.op << " " << a.value;
    } else if (a.type == "privacy_chain") {
        auto it = r.flags.find("privacy_chain_hits");
        std::int64_t hits = it == r.flags.end() ? -1 : it->second;
        res.pass = hits == 0;
        detail << "chain-state sensitive-string hits = " << hits;
    } else if (a.type == "privacy_delivery") {
        auto it = r.flags.find("privacy_delivery_hits");
        std::int64_t hits = it == r.flags.end() ? -1 : it->second;
        res.pass = hits == 0;
        detail << "research-delivery identifier hits = " << hits;
    } else if (a.type == "privacy_delivery_leaks") {
        auto it = r.flags.find("privacy_delivery_hits");
        std::int64_t hits = it == r.flags.end() ? 0 : it->second;
        res.pass = hits > 0;
        detail << "expected a leak; identifier hits = " << hits;
    } else {
        res.pass = false;
        detail << "unknown assertion type " << a.type;
    }
    res.detail = detail.str();
    return res;
}

}  // namespace

void evaluate_assertions(RunReport& report, const Scenario& sc) {
    report.assertions.clear();
    report.all_passed = true;
    for (const auto& a : sc.assertions) {
        AssertionResult res = eval_one(report, a);
        if (!res.pass) report.all_passed = false;
        report.assertions.push_back(std::move(res));
    }
}

std::vector<AuditVerdict> audit_ledger(const World& w) {
    std::vector<AuditVerdict> out;
    const ChainState& st = w.state();

    {
        AuditVerdict v{"conservation", true, ""};
        Amount total = st.circulating_total();
        if (total != st.total_endowment) {
            v.pass = false;
            v.detail = "current total " + std::to_string(total) + " != endowment " +
                       std::to_string(st.total_endowment);
        }
        for (const auto& rec : w.ledger.log()) {
            if (rec.conservation_total != st.total_endowment) {
                v.pass = false;
                v.detail = "tick " + std::to_string(rec.tick) + " total " +
                           std::to_string(rec.conservation_total);
                break;
            }
        }
        out.push_back(v);
    }
    {
        // every record must still hash to what its write event announced
        AuditVerdict v{"immutability", true, ""};
        std::map<std::string, std::string> written;
        for (const auto& rec : w.ledger.log()) {
            if (!rec.ok) continue;
            for (const auto& e : rec.events) {
                if (e.name != "record_written") continue;
                std::string key, digest;
                for (const auto& [k, val] : e.attrs) {
                    if (k == "key") key = val;
                    if (k == "value_digest") digest = val;
                }
                written[key] = digest;
            }
        }
        for (const auto& [key, rec] : st.records) {
            auto it = written.find(key);
            if (it == written.end()) {
                v.pass = false;
                v.detail = "record without write event: " + key;
                break;
            }
            if (crypto::hash(rec.value).hex() != it->second) {
                v.pass = false;
                v.detail = "record mutated after write: " + key;
                break;
            }
        }
        out.push_back(v);
    }
    return out;
}

std::vector<AuditVerdict> audit_report(const RunReport& r) {
    std::vector<AuditVerdict> out;
    {
        AuditVerdict v{"conservation", true, ""};
        for (std::size_t i = 0; i < r.conservation_by_tick.size(); ++i) {
            if (r.conservation_by_tick[i] != r.endowment_total) {
                v.pass = false;
                v.detail = "transaction " + std::to_string(i) + " total " +
                           std::to_string(r.conservation_by_tick[i]);
                break;
            }
        }
        out.push_back(v);
    }
    {
        AuditVerdict v{"immutability", true, ""};
        std::map<std::string, std::string> written;
        for (const auto& tx : r.events) {
            if (!tx.ok) continue;
            for (const auto& e : tx.events) {
                if (e.name != "record_written") continue;
                std::string key, digest;
                for (const auto& [k, val] : e.attrs) {
                    if (k == "key") key = val;
                    if (k == "value_digest") digest = val;
                }
                written[key] = digest;
            }
        }
        for (const auto& [key, digest] : r.record_digests) {
            auto it = written.find(key);
            if (it == written.end() || it->second != digest) {
                v.pass = false;
                v.detail = "record digest mismatch: " + key;
                break;
            }
        }
        out.push_back(v);
    }
    {
        AuditVerdict v{"assertions", true, ""};
        for (const auto& a : r.assertions) {
            if (!a.pass) {
                v.pass = false;
                v.detail = a.assertion.type + ": " + a.detail;
                break;
            }
        }
        out.push_back(v);
    }
    return out;
}

}  // namespace medchain::harness
