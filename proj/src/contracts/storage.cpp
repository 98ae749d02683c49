#include "medchain/contracts/storage.hpp"

namespace medchain::storage {

namespace {

ApplicationForStoring& get_app(TxContext& ctx, EntityId as_id) {
    auto it = ctx.state().storage.applications.find(as_id);
    if (it == ctx.state().storage.applications.end()) throw Revert("unknown application");
    return it->second;
}

}  // namespace

EntityId apply_for_storing(TxContext& ctx, EntityId dbo_id, EntityId ms_id) {
    auto& st = ctx.state();
    auto ms_it = st.treatment.multi_sigs.find(ms_id);
    ctx.require(ms_it != st.treatment.multi_sigs.end(), "unknown commitment");
    const auto& ms = ms_it->second;
    auto p_addr = registry::addr_of(st, EntityKind::Patient, ms.p_id);
    ctx.require(p_addr.has_value() && ctx.caller() == *p_addr, "not file owner");
    auto dbo_addr = registry::addr_of(st, EntityKind::DatabaseOwner, dbo_id);
    ctx.require(dbo_addr.has_value(), "unknown dbo");
    ctx.charge();
    ctx.require(!st.storage.app_by_case_dbo.count({ms_id, dbo_id}), "already applied");

    EntityId as_id = st.storage.next_as_id++;
    ApplicationForStoring as;
    as.as_id = as_id;
    as.p_id = ms.p_id;
    as.p_addr = *p_addr;
    as.dbo_id = dbo_id;
    as.dbo_addr = *dbo_addr;
    as.ms_id = ms_id;
    as.mr_file = ms.mr_med_data;
    as.mr_enc_file = ms.mr_enc_circuit;
    as.t_application = ctx.now();
    as.fee = ctx.attached();
    as.fee_escrow = ctx.lock(ctx.caller(), ctx.attached(), EscrowPurpose::StorageFee);
    st.storage.applications[as_id] = as;
    st.storage.app_by_case_dbo[{ms_id, dbo_id}] = as_id;
    ctx.emit("storing_applied", {{"as", std::to_string(as_id)},
                                 {"ms", std::to_string(ms_id)},
                                 {"dbo", std::to_string(dbo_id)},
                                 {"fee", std::to_string(as.fee)}});
    return as_id;
}

void dbo_verify_roots(TxContext& ctx, EntityId as_id, const Digest& mr_file,
                      const Digest& mr_enc_file) {
    auto& st = ctx.state();
    auto& as = get_app(ctx, as_id);
    ctx.require(ctx.caller() == as.dbo_addr, "caller mismatch");
    ctx.require(as.t_verification_mr == 0, "already verified");
    ctx.require(ctx.now() - as.t_application <= st.params.ttl, "expired");
    ctx.charge(2);
    ctx.require(mr_file == as.mr_file && mr_enc_file == as.mr_enc_file, "root mismatch");

    as.t_verification_mr = ctx.now();
    ctx.emit("storage_roots_verified", {{"as", std::to_string(as_id)}});
}

void storage_key_reveal(TxContext& ctx, EntityId as_id, const SymKey& key) {
    auto& st = ctx.state();
    auto& as = get_app(ctx, as_id);
    ctx.require(ctx.caller() == as.p_addr, "caller mismatch");
    ctx.require(as.t_verification_mr != 0, "not verified");
    ctx.require(!as.key_revealed, "already revealed");
    ctx.require(ctx.now() - as.t_verification_mr <= st.params.ttl, "expired");
    const auto& ms = st.treatment.multi_sigs.at(as.ms_id);
    ctx.charge();
    ctx.require(crypto::commit_key(key) == ms.key_commitment, "key mismatch");

    as.key = key;
    as.key_revealed = true;
    as.t_key_reveal = ctx.now();
    ctx.emit("storage_key_revealed", {{"as", std::to_string(as_id)}});
}

namespace {

void require_resolvable(TxContext& ctx, const ApplicationForStoring& as) {
    ctx.require(ctx.caller() == as.dbo_addr, "caller mismatch");
    ctx.require(as.key_revealed, "key not revealed");
    ctx.require(as.t_approval == 0 && as.t_complain == 0, "already resolved");
    ctx.require(ctx.now() - as.t_key_reveal <= ctx.state().params.ttl, "expired");
}

}  // namespace

void dbo_approve(TxContext& ctx, EntityId as_id) {
    auto& as = get_app(ctx, as_id);
    require_resolvable(ctx, as);

    as.t_approval = ctx.now();
    ctx.release(as.fee_escrow, as.dbo_addr);
    ctx.emit("storage_approved", {{"as", std::to_string(as_id)}});
}

bool dbo_complain(TxContext& ctx, EntityId as_id, const fairswap::Complaint& complaint) {
    auto& st = ctx.state();
    auto& as = get_app(ctx, as_id);
    require_resolvable(ctx, as);
    const auto& ms = st.treatment.multi_sigs.at(as.ms_id);

    std::uint64_t proof_ops = 0;
    for (const auto& p : complaint.proofs) proof_ops += p.steps.size();
    ctx.charge(proof_ops + complaint.encoded_vectors.size() + 1);
    bool valid = fairswap::verify_any_complaint(complaint, as.mr_enc_file, as.key,
                                                as.mr_file, ms.props);
    if (valid) {
        // the seller (patient) delivered an inconsistent encoding
        as.t_complain = ctx.now();
        ctx.release(as.fee_escrow, as.dbo_addr);
        ctx.emit("storage_complaint_upheld", {{"as", std::to_string(as_id)},
                                              {"gate", std::to_string(complaint.gate_index)}});
    } else {
        // a lying database owner forfeits the fee but must honor the storage
        as.t_approval = ctx.now();
        ctx.release(as.fee_escrow, as.p_addr);
        ctx.emit("storage_complaint_rejected", {{"as", std::to_string(as_id)}});
        ctx.emit("storage_approved", {{"as", std::to_string(as_id)}, {"forced", "1"}});
    }
    return valid;
}

void withdraw_storage(TxContext& ctx, EntityId as_id) {
    auto& st = ctx.state();
    auto& as = get_app(ctx, as_id);
    ctx.require(ctx.caller() == as.p_addr || ctx.caller() == as.dbo_addr, "caller mismatch");
    ctx.require(as.t_approval == 0 && as.t_complain == 0, "already resolved");
    ctx.require(as.t_unlocking_by_p == 0 && as.t_unlocking_by_dbo == 0, "already resolved");

    Tick base = 0;
    if (as.t_verification_mr == 0)
        base = as.t_application;
    else if (!as.key_revealed)
        base = as.t_verification_mr;
    else
        base = as.t_key_reveal;
    ctx.require(ctx.now() - base > st.params.ttl, "not yet expired");

    ctx.release(as.fee_escrow, as.p_addr);
    if (ctx.caller() == as.p_addr)
        as.t_unlocking_by_p = ctx.now();
    else
        as.t_unlocking_by_dbo = ctx.now();
    ctx.emit("storage_aborted", {{"as", std::to_string(as_id)}});
}

}  // namespace medchain::storage
