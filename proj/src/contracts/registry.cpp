#include "medchain/contracts/registry.hpp"

namespace medchain::registry {

namespace {
std::string entity_record_key(EntityKind kind, EntityId id) {
    return std::string(entity_kind_name(kind)) + "/" + std::to_string(id) + "/info";
}
}  // namespace

EntityId register_entity(TxContext& ctx, EntityKind kind, const Address& addr,
                         const Digest& info_digest) {
    auto& st = ctx.state();
    auto& reg = st.registry;
    auto kind_u8 = static_cast<std::uint8_t>(kind);

    if (kind == EntityKind::DatabaseOwner || kind == EntityKind::ResearchCommunity) {
        ctx.require(ctx.caller() == st.government, "not government");
    } else {
        ctx.require(ctx.caller() == addr, "caller mismatch");
    }
    ctx.charge();
    ctx.require(!reg.id_by_addr.count({kind_u8, addr}), "already registered");

    EntityId id = reg.next_id.count(kind_u8) ? reg.next_id[kind_u8] : 1;
    reg.next_id[kind_u8] = id + 1;
    reg.id_by_addr[{kind_u8, addr}] = id;
    reg.entities[{kind_u8, id}] = EntityRecord{kind, id, addr, info_digest};
    ctx.put_record(entity_record_key(kind, id), info_digest.bytes());
    ctx.emit("entity_registered", {{"kind", entity_kind_name(kind)},
                                   {"id", std::to_string(id)},
                                   {"address", addr.hex()}});
    return id;
}

void grant_access(TxContext& ctx, EntityId owner_pid, const Address& grantee,
                  AccessCategory category) {
    auto& st = ctx.state();
    auto owner_addr = addr_of(st, EntityKind::Patient, owner_pid);
    ctx.require(owner_addr.has_value(), "unknown patient");
    ctx.require(ctx.caller() == *owner_addr, "not owner");
    ctx.charge();
    st.registry.grants[{owner_pid, grantee, static_cast<std::uint8_t>(category)}] = true;
    ctx.emit("access_granted", {{"owner", std::to_string(owner_pid)},
                                {"grantee", grantee.hex()},
                                {"category", access_category_name(category)}});
}

void revoke_access(TxContext& ctx, EntityId owner_pid, const Address& grantee,
                   AccessCategory category) {
    auto& st = ctx.state();
    auto owner_addr = addr_of(st, EntityKind::Patient, owner_pid);
    ctx.require(owner_addr.has_value(), "unknown patient");
    ctx.require(ctx.caller() == *owner_addr, "not owner");
    ctx.charge();
    st.registry.grants[{owner_pid, grantee, static_cast<std::uint8_t>(category)}] = false;
    ctx.emit("access_revoked", {{"owner", std::to_string(owner_pid)},
                                {"grantee", grantee.hex()},
                                {"category", access_category_name(category)}});
}

bool has_access(const ChainState& st, EntityId owner_pid, const Address& grantee,
                AccessCategory category) {
    auto it = st.registry.grants.find({owner_pid, grantee, static_cast<std::uint8_t>(category)});
    return it != st.registry.grants.end() && it->second;
}

void deposit_security(TxContext& ctx, Amount amount) {
    auto& st = ctx.state();
    EntityId ic_id = require_kind(ctx, EntityKind::InsuranceCo);
    ctx.require(!is_deregistered(st, ic_id), "insurer deregistered");
    ctx.require(ctx.attached() == amount, "wrong value");
    ctx.debit(ctx.caller(), amount);
    ctx.credit(st.security_vault, amount);
    st.registry.security_locked[ic_id] += amount;
    ctx.emit("security_deposited", {{"ic", std::to_string(ic_id)},
                                    {"amount", std::to_string(amount)},
                                    {"locked", std::to_string(st.registry.security_locked[ic_id])}});
}

void withdraw_security(TxContext& ctx, Amount amount) {
    auto& st = ctx.state();
    EntityId ic_id = require_kind(ctx, EntityKind::InsuranceCo);
    ctx.require(!is_deregistered(st, ic_id), "insurer deregistered");
    Amount locked = st.registry.security_locked.count(ic_id)
                        ? st.registry.security_locked[ic_id]
                        : 0;
    ctx.require(locked >= amount, "insufficient funds");
    Amount threshold = st.registry.costliest_policy.count(ic_id)
                           ? st.registry.costliest_policy[ic_id]
                           : 0;
    ctx.require(locked - amount >= threshold, "below threshold");
    st.registry.security_locked[ic_id] = locked - amount;
    ctx.debit(st.security_vault, amount);
    ctx.credit(ctx.caller(), amount);
    ctx.emit("security_withdrawn", {{"ic", std::to_string(ic_id)},
                                    {"amount", std::to_string(amount)}});
}

void note_policy_listed(TxContext& ctx, Amount price) {
    auto& st = ctx.state();
    EntityId ic_id = require_kind(ctx, EntityKind::InsuranceCo);
    ctx.require(!is_deregistered(st, ic_id), "insurer deregistered");
    Amount locked = st.registry.security_locked.count(ic_id)
                        ? st.registry.security_locked[ic_id]
                        : 0;
    ctx.require(locked >= price, "below threshold");
    ctx.charge();
    Amount& costliest = st.registry.costliest_policy[ic_id];
    if (price > costliest) costliest = price;
    ctx.emit("policy_listed", {{"ic", std::to_string(ic_id)},
                               {"price", std::to_string(price)}});
}

void deregister_insurer(TxContext& ctx, EntityId ic_id) {
    ctx.charge();
    ctx.state().registry.deregistered_insurers.insert(ic_id);
    ctx.emit("insurer_deregistered", {{"ic", std::to_string(ic_id)}});
}

bool is_deregistered(const ChainState& st, EntityId ic_id) {
    return st.registry.deregistered_insurers.count(ic_id) > 0;
}

std::optional<EntityId> id_of(const ChainState& st, EntityKind kind, const Address& addr) {
    auto it = st.registry.id_by_addr.find({static_cast<std::uint8_t>(kind), addr});
    if (it == st.registry.id_by_addr.end()) return std::nullopt;
    return it->second;
}

std::optional<Address> addr_of(const ChainState& st, EntityKind kind, EntityId id) {
    auto it = st.registry.entities.find({static_cast<std::uint8_t>(kind), id});
    if (it == st.registry.entities.end()) return std::nullopt;
    return it->second.addr;
}

EntityId require_kind(TxContext& ctx, EntityKind kind) {
    auto id = id_of(ctx.state(), kind, ctx.caller());
    ctx.require(id.has_value(), "caller mismatch");
    return *id;
}

bool is_registered_any(const ChainState& st, const Address& addr) {
    for (std::uint8_t k = 0; k <= 4; ++k)
        if (st.registry.id_by_addr.count({k, addr})) return true;
    return false;
}

}  // namespace medchain::registry
