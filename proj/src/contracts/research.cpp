#include "medchain/contracts/research.hpp"

namespace medchain::research {

EntityId request_data_for_research(TxContext& ctx, EntityId dbo_id, const Digest& hash_query) {
    auto& st = ctx.state();
    EntityId rc_id = registry::require_kind(ctx, EntityKind::ResearchCommunity);
    ctx.require(registry::addr_of(st, EntityKind::DatabaseOwner, dbo_id).has_value(),
                "unknown dbo");

    EntityId rd_id = st.research.next_rd_id++;
    ResearchRequest rq;
    rq.rd_id = rd_id;
    rq.dbo_id = dbo_id;
    rq.rc_id = rc_id;
    rq.hash_query = hash_query;
    rq.t1 = ctx.now();
    st.research.requests[rd_id] = rq;
    ctx.put_record("research/" + std::to_string(rd_id) + "/query", hash_query.bytes());
    ctx.emit("research_requested", {{"rd", std::to_string(rd_id)},
                                    {"rc", std::to_string(rc_id)},
                                    {"dbo", std::to_string(dbo_id)}});
    return rd_id;
}

void provide_data_for_research(TxContext& ctx, EntityId rd_id, const Digest& hash_data,
                               const Signature& sign) {
    auto& st = ctx.state();
    auto it = st.research.requests.find(rd_id);
    ctx.require(it != st.research.requests.end(), "unknown request");
    ResearchRequest& rq = it->second;
    auto dbo_addr = registry::addr_of(st, EntityKind::DatabaseOwner, rq.dbo_id);
    ctx.require(dbo_addr.has_value() && ctx.caller() == *dbo_addr, "caller mismatch");
    ctx.require(!rq.responded, "already responded");
    ctx.require(ctx.now() - rq.t1 <= st.params.ttl, "expired");
    ctx.charge(2);
    ctx.require(crypto::verify_sig(*dbo_addr, hash_data.view(), sign), "bad signature");

    rq.responded = true;
    rq.hash_data = hash_data;
    rq.sign = sign;
    rq.t2 = ctx.now();
    ctx.put_record("research/" + std::to_string(rd_id) + "/data_hash", hash_data.bytes());
    ctx.emit("research_provided", {{"rd", std::to_string(rd_id)},
                                   {"hash", hash_data.hex()}});
}

bool rc_verify_delivery(const ChainState& st, EntityId rd_id, ByteView dataset) {
    auto it = st.research.requests.find(rd_id);
    if (it == st.research.requests.end() || !it->second.responded) return false;
    const ResearchRequest& rq = it->second;
    if (crypto::hash(dataset) != rq.hash_data) return false;
    auto dbo_addr = registry::addr_of(st, EntityKind::DatabaseOwner, rq.dbo_id);
    if (!dbo_addr) return false;
    return crypto::verify_sig(*dbo_addr, rq.hash_data.view(), rq.sign);
}

}  // namespace medchain::research
