#include "medchain/contracts/insurance.hpp"

namespace medchain::insurance {

namespace {

PolicyDetails& get_policy(TxContext& ctx, EntityId po_id) {
    auto it = ctx.state().insurance.policies.find(po_id);
    if (it == ctx.state().insurance.policies.end()) throw Revert("unknown policy");
    return it->second;
}

ClaimDetails& get_claim(TxContext& ctx, EntityId c_id) {
    auto it = ctx.state().insurance.claims.find(c_id);
    if (it == ctx.state().insurance.claims.end()) throw Revert("unknown claim");
    return it->second;
}

Address buyer_addr(TxContext& ctx, const PolicyDetails& pd) {
    auto a = registry::addr_of(ctx.state(), EntityKind::Patient, pd.buyer_id);
    if (!a) throw Revert("unknown buyer");
    return *a;
}

Address insurer_addr(TxContext& ctx, EntityId ic_id) {
    auto a = registry::addr_of(ctx.state(), EntityKind::InsuranceCo, ic_id);
    if (!a) throw Revert("unknown insurer");
    return *a;
}

}  // namespace

void buy_policy_phase_one(TxContext& ctx, EntityId ic_id, const Digest& terms_hash) {
    auto& st = ctx.state();
    registry::require_kind(ctx, EntityKind::Patient);
    insurer_addr(ctx, ic_id);
    ctx.require(!registry::is_deregistered(st, ic_id), "insurer deregistered");
    ctx.charge();
    ctx.require(!st.insurance.pending.count({ctx.caller(), ic_id}), "duplicate pending");

    PendingPurchase p;
    p.buyer = ctx.caller();
    p.ic_id = ic_id;
    p.locked_price = ctx.attached();
    p.terms_hash = terms_hash;
    p.t1 = ctx.now();
    p.escrow = ctx.lock(ctx.caller(), ctx.attached(), EscrowPurpose::PolicyPrice);
    st.insurance.pending[{ctx.caller(), ic_id}] = p;
    ctx.emit("policy_phase_one", {{"ic", std::to_string(ic_id)},
                                  {"buyer", ctx.caller().hex()},
                                  {"price", std::to_string(p.locked_price)},
                                  {"terms", terms_hash.hex()}});
}

EntityId buy_policy_phase_two(TxContext& ctx, EntityId buyer_pid, Amount price,
                              const Digest& terms_hash) {
    auto& st = ctx.state();
    EntityId ic_id = registry::require_kind(ctx, EntityKind::InsuranceCo);
    ctx.require(!registry::is_deregistered(st, ic_id), "insurer deregistered");
    auto buyer = registry::addr_of(st, EntityKind::Patient, buyer_pid);
    ctx.require(buyer.has_value(), "unknown buyer");
    auto pending_it = st.insurance.pending.find({*buyer, ic_id});
    ctx.require(pending_it != st.insurance.pending.end(), "no pending");
    PendingPurchase pending = pending_it->second;

    Amount security = st.registry.security_locked.count(ic_id)
                          ? st.registry.security_locked[ic_id]
                          : 0;
    if (price > security) {
        // Quote beyond the deposit: the insurer is thrown out and the buyer's
        // lock unwinds. This path commits rather than reverting.
        registry::deregister_insurer(ctx, ic_id);
        ctx.release(pending.escrow, pending.buyer);
        st.insurance.pending.erase({*buyer, ic_id});
        ctx.emit("policy_sale_failed", {{"ic", std::to_string(ic_id)},
                                        {"reason", "price above security money"}});
        return 0;
    }

    ctx.require(ctx.now() - pending.t1 <= st.params.ttl, "expired");
    ctx.require(price == pending.locked_price, "price mismatch");
    ctx.require(terms_hash == pending.terms_hash, "hash mismatch");

    ctx.release(pending.escrow, ctx.caller());
    st.insurance.pending.erase({*buyer, ic_id});

    EntityId po_id = st.insurance.next_po_id++;
    PolicyDetails pd;
    pd.po_id = po_id;
    pd.buyer_id = buyer_pid;
    pd.ic_id = ic_id;
    pd.t_buying_policy = ctx.now();
    pd.terms_hash = terms_hash;
    pd.price = price;
    st.insurance.policies[po_id] = pd;
    ctx.put_record("policy/" + std::to_string(po_id) + "/terms", terms_hash.bytes());
    ctx.emit("policy_sold", {{"po", std::to_string(po_id)},
                             {"buyer", std::to_string(buyer_pid)},
                             {"ic", std::to_string(ic_id)},
                             {"price", std::to_string(price)}});
    return po_id;
}

void withdraw_locked_policy_buying_money(TxContext& ctx, EntityId ic_id) {
    auto& st = ctx.state();
    auto it = st.insurance.pending.find({ctx.caller(), ic_id});
    ctx.require(it != st.insurance.pending.end(), "no pending");
    ctx.require(ctx.now() - it->second.t1 > st.params.ttl, "not yet expired");

    ctx.release(it->second.escrow, ctx.caller());
    st.insurance.pending.erase(it);
    ctx.emit("policy_lock_withdrawn", {{"ic", std::to_string(ic_id)}});
}

EntityId claim_money(TxContext& ctx, EntityId po_id, EntityId eb_id, EntityId as_id,
                     Amount claimed_amount, const Digest& comm_k) {
    auto& st = ctx.state();
    auto& pd = get_policy(ctx, po_id);

    auto ec_it = st.treatment.estimates.find(eb_id);
    ctx.require(ec_it != st.treatment.estimates.end(), "unknown bill");
    const auto& ec = ec_it->second;
    ctx.require(ec.fb_id != 0, "no final bill");
    const auto& fc = st.treatment.final_bills.at(ec.fb_id);
    auto as_it = st.storage.applications.find(as_id);
    ctx.require(as_it != st.storage.applications.end(), "unknown application");
    const auto& as = as_it->second;

    ctx.charge(2);
    ctx.require(ctx.caller() == buyer_addr(ctx, pd), "identity mismatch");
    ctx.require(pd.buyer_id == fc.p_id && fc.p_id == as.p_id, "identity mismatch");
    ctx.require(as.ms_id == ec.ms_id && as.t_approval != 0, "not stored");
    ctx.require(claimed_amount <= fc.final_cost, "over claim");
    ctx.require(!st.insurance.claim_by_policy_bill.count({po_id, eb_id}), "duplicate claim");

    EntityId c_id = st.insurance.next_c_id++;
    ClaimDetails cd;
    cd.c_id = c_id;
    cd.po_id = po_id;
    cd.eb_id = eb_id;
    cd.as_id = as_id;
    cd.t_generating_claim = ctx.now();
    cd.claimed_amount = claimed_amount;
    cd.comm_k = comm_k;
    cd.mr_file = as.mr_file;
    st.insurance.claims[c_id] = cd;
    st.insurance.claim_to_policy[c_id] = po_id;
    st.insurance.claim_by_policy_bill[{po_id, eb_id}] = c_id;
    pd.claim_ids.push_back(c_id);
    ctx.put_record("claim/" + std::to_string(c_id) + "/comm_k", comm_k.bytes());

    // the claim implies consent: the insurer gets expenditure read access
    Address ic = insurer_addr(ctx, pd.ic_id);
    st.registry.grants[{pd.buyer_id, ic,
                        static_cast<std::uint8_t>(AccessCategory::MedicalExpenditure)}] = true;
    ctx.emit("access_granted", {{"owner", std::to_string(pd.buyer_id)},
                                {"grantee", ic.hex()},
                                {"category",
                                 access_category_name(AccessCategory::MedicalExpenditure)}});
    ctx.emit("claim_generated", {{"c", std::to_string(c_id)},
                                 {"po", std::to_string(po_id)},
                                 {"eb", std::to_string(eb_id)},
                                 {"amount", std::to_string(claimed_amount)}});
    return c_id;
}

void keep_sig_on_hash_of_enc_file(TxContext& ctx, EntityId c_id, const Digest& enc_data_hash,
                                  const Signature& sig) {
    auto& st = ctx.state();
    auto& cd = get_claim(ctx, c_id);
    const auto& pd = get_policy(ctx, cd.po_id);
    const auto& as = st.storage.applications.at(cd.as_id);
    ctx.require(ctx.caller() == as.dbo_addr, "caller mismatch");
    ctx.require(!cd.dbo_sig_present, "already processed");
    ctx.require(!cd.key_expired_at_dbo, "key expired");

    Address ic = insurer_addr(ctx, pd.ic_id);
    ctx.charge();
    ctx.require(registry::has_access(st, pd.buyer_id, ic, AccessCategory::MedicalExpenditure),
                "no grant");
    ctx.charge(2);
    ctx.require(crypto::verify_sig(ctx.caller(), enc_data_hash.view(), sig), "bad signature");

    cd.dbo_sig = sig;
    cd.dbo_sig_present = true;
    cd.enc_data_hash = enc_data_hash;
    cd.t_dbo_sig = ctx.now();
    cd.key_expired_at_dbo = true;  // one-time key spent
    ctx.put_record("claim/" + std::to_string(c_id) + "/dbo_sig", sig.bytes());
    ctx.emit("enc_file_signed", {{"c", std::to_string(c_id)},
                                 {"hash", enc_data_hash.hex()}});
}

void lock_claimed_money(TxContext& ctx, EntityId c_id) {
    auto& st = ctx.state();
    auto& cd = get_claim(ctx, c_id);
    const auto& pd = get_policy(ctx, cd.po_id);
    ctx.require(ctx.caller() == insurer_addr(ctx, pd.ic_id), "caller mismatch");
    ctx.require(!registry::is_deregistered(st, pd.ic_id), "insurer deregistered");
    ctx.require(cd.t_locking_by_ic == 0, "already locked");
    ctx.require(ctx.attached() == cd.claimed_amount, "wrong value");

    cd.lock_escrow = ctx.lock(ctx.caller(), cd.claimed_amount, EscrowPurpose::ClaimLock);
    cd.t_locking_by_ic = ctx.now();
    ctx.emit("claim_locked", {{"c", std::to_string(c_id)},
                              {"amount", std::to_string(cd.claimed_amount)}});
}

void reveal_secret_key(TxContext& ctx, EntityId c_id, const SymKey& k) {
    auto& st = ctx.state();
    auto& cd = get_claim(ctx, c_id);
    const auto& pd = get_policy(ctx, cd.po_id);
    ctx.require(ctx.caller() == buyer_addr(ctx, pd), "caller mismatch");
    ctx.require(cd.t_locking_by_ic != 0, "not locked");
    ctx.require(cd.t_reveal_key == 0, "already revealed");
    ctx.require(ctx.now() - cd.t_locking_by_ic <= st.params.ttl, "expired");
    ctx.charge();
    ctx.require(crypto::commit_key(k) == cd.comm_k, "key mismatch");

    cd.k = k;
    cd.k_revealed = true;
    cd.t_reveal_key = ctx.now();
    ctx.put_record("claim/" + std::to_string(c_id) + "/key", Bytes(k.v.begin(), k.v.end()));
    ctx.emit("claim_key_revealed", {{"c", std::to_string(c_id)}});
}

void withdraw_locked_claimed_money(TxContext& ctx, EntityId c_id) {
    auto& st = ctx.state();
    auto& cd = get_claim(ctx, c_id);
    const auto& pd = get_policy(ctx, cd.po_id);
    ctx.require(ctx.caller() == insurer_addr(ctx, pd.ic_id), "caller mismatch");
    ctx.require(cd.t_reveal_key == 0, "key was revealed");
    ctx.require(cd.t_locking_by_ic != 0 && ctx.now() - cd.t_locking_by_ic > st.params.ttl,
                "not yet expired");

    ctx.release(cd.lock_escrow, ctx.caller());
    cd.t_unlocking_by_ic = ctx.now();
    ctx.emit("claim_lock_withdrawn", {{"c", std::to_string(c_id)}});
}

void approve_claim(TxContext& ctx, EntityId c_id, Amount approved_amount) {
    auto& st = ctx.state();
    auto& cd = get_claim(ctx, c_id);
    const auto& pd = get_policy(ctx, cd.po_id);
    ctx.require(ctx.caller() == insurer_addr(ctx, pd.ic_id), "caller mismatch");
    ctx.require(cd.t_reveal_key != 0, "key not revealed");
    ctx.require(cd.t_approval == 0, "already approved");
    ctx.require(ctx.now() - cd.t_reveal_key <= st.params.ttl, "expired");
    ctx.require(approved_amount <= cd.claimed_amount, "over approve");

    cd.approved_amount = approved_amount;
    cd.t_approval = ctx.now();
    Address buyer = buyer_addr(ctx, pd);
    std::vector<std::pair<Address, Amount>> parts;
    if (approved_amount > 0) parts.push_back({buyer, approved_amount});
    Amount remaining = cd.claimed_amount - approved_amount;
    if (remaining > 0) parts.push_back({ctx.caller(), remaining});
    ctx.release_split(cd.lock_escrow, parts);
    ctx.emit("claim_approved", {{"c", std::to_string(c_id)},
                                {"approved", std::to_string(approved_amount)},
                                {"remainder", std::to_string(remaining)}});
}

void self_approve_claim(TxContext& ctx, EntityId c_id) {
    auto& st = ctx.state();
    auto& cd = get_claim(ctx, c_id);
    const auto& pd = get_policy(ctx, cd.po_id);
    ctx.require(ctx.caller() == buyer_addr(ctx, pd), "caller mismatch");
    ctx.require(cd.t_reveal_key != 0, "key not revealed");
    ctx.require(cd.t_approval == 0, "already approved");
    ctx.require(ctx.now() - cd.t_reveal_key > st.params.ttl, "not yet expired");

    cd.approved_amount = cd.claimed_amount;
    cd.t_approval = ctx.now();
    cd.self_approved = true;
    ctx.release(cd.lock_escrow, ctx.caller());
    ctx.emit("claim_self_approved", {{"c", std::to_string(c_id)},
                                     {"amount", std::to_string(cd.claimed_amount)}});
}

void compensate_from_security(TxContext& ctx, EntityId c_id) {
    auto& st = ctx.state();
    auto& cd = get_claim(ctx, c_id);
    const auto& pd = get_policy(ctx, cd.po_id);
    ctx.require(ctx.caller() == buyer_addr(ctx, pd), "caller mismatch");
    ctx.require(cd.t_locking_by_ic == 0, "insurer responded");
    ctx.require(!cd.compensated, "already compensated");
    ctx.require(ctx.now() - cd.t_generating_claim > st.params.grace_ttl, "not yet expired");

    Amount deposit = st.registry.security_locked.count(pd.ic_id)
                         ? st.registry.security_locked[pd.ic_id]
                         : 0;
    Amount refund = std::min(pd.price, deposit);
    if (refund > 0) {
        st.registry.security_locked[pd.ic_id] = deposit - refund;
        ctx.debit(st.security_vault, refund);
        ctx.credit(ctx.caller(), refund);
    }
    if (deposit < pd.price) registry::deregister_insurer(ctx, pd.ic_id);
    cd.compensated = true;
    ctx.emit("buyer_compensated", {{"c", std::to_string(c_id)},
                                   {"refund", std::to_string(refund)}});
}

}  // namespace medchain::insurance
