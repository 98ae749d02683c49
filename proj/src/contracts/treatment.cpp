#include "medchain/contracts/treatment.hpp"

namespace medchain::treatment {

namespace {

std::string ms_record_key(EntityId ms_id, const char* field) {
    return "msid/" + std::to_string(ms_id) + "/" + field;
}

EstimatedCheckUpCost& get_case(TxContext& ctx, EntityId eb_id) {
    auto it = ctx.state().treatment.estimates.find(eb_id);
    if (it == ctx.state().treatment.estimates.end()) throw Revert("unknown bill");
    return it->second;
}

FinalCheckUpCost& get_bill(TxContext& ctx, EntityId fb_id) {
    auto it = ctx.state().treatment.final_bills.find(fb_id);
    if (it == ctx.state().treatment.final_bills.end()) throw Revert("unknown final bill");
    return it->second;
}

MultiSigOnMedicalData& get_ms(TxContext& ctx, EntityId ms_id) {
    auto it = ctx.state().treatment.multi_sigs.find(ms_id);
    if (it == ctx.state().treatment.multi_sigs.end()) throw Revert("unknown commitment");
    return it->second;
}

Address patient_addr(TxContext& ctx, const EstimatedCheckUpCost& ec) {
    auto a = registry::addr_of(ctx.state(), EntityKind::Patient, ec.p_id);
    if (!a) throw Revert("unknown patient");
    return *a;
}

Address hospital_addr(TxContext& ctx, const EstimatedCheckUpCost& ec) {
    auto a = registry::addr_of(ctx.state(), EntityKind::Hospital, ec.h_id);
    if (!a) throw Revert("unknown hospital");
    return *a;
}

void require_caller_patient(TxContext& ctx, const EstimatedCheckUpCost& ec) {
    ctx.require(ctx.caller() == patient_addr(ctx, ec), "caller mismatch");
}

void require_caller_hospital(TxContext& ctx, const EstimatedCheckUpCost& ec) {
    ctx.require(ctx.caller() == hospital_addr(ctx, ec), "caller mismatch");
}

void require_fresh(TxContext& ctx, Tick base) {
    ctx.require(ctx.now() - base <= ctx.state().params.ttl, "expired");
}

/// Pays the hospital the billed amount from the patient's stake, refunds the
/// residue, and returns the hospital's own stake.
void settle(TxContext& ctx, EstimatedCheckUpCost& ec, const FinalCheckUpCost& fc) {
    Address p = patient_addr(ctx, ec);
    Address h = hospital_addr(ctx, ec);
    std::vector<std::pair<Address, Amount>> parts;
    if (fc.final_cost > 0) parts.push_back({h, fc.final_cost});
    if (ec.estimated_cost > fc.final_cost)
        parts.push_back({p, ec.estimated_cost - fc.final_cost});
    ctx.release_split(ec.p_escrow, parts);
    ctx.release(ec.ha_escrow, h);
    ec.phase = CasePhase::Settled;
    ctx.emit("case_settled", {{"eb", std::to_string(ec.eb_id)},
                              {"paid", std::to_string(fc.final_cost)},
                              {"residue", std::to_string(ec.estimated_cost - fc.final_cost)}});
}

}  // namespace

EntityId generate_estimated_cost_bill(TxContext& ctx, EntityId p_id, Amount estimated_cost) {
    auto& st = ctx.state();
    EntityId h_id = registry::require_kind(ctx, EntityKind::Hospital);
    ctx.require(registry::addr_of(st, EntityKind::Patient, p_id).has_value(), "unknown patient");
    ctx.require(ctx.attached() == estimated_cost, "wrong value");

    EntityId eb_id = st.treatment.next_eb_id++;
    EstimatedCheckUpCost ec;
    ec.eb_id = eb_id;
    ec.p_id = p_id;
    ec.h_id = h_id;
    ec.estimated_cost = estimated_cost;
    ec.t_estimate = ctx.now();
    ec.t_locking_by_ha = ctx.now();
    ec.ha_escrow = ctx.lock(ctx.caller(), estimated_cost, EscrowPurpose::EstimatedByHA);
    ec.phase = CasePhase::Estimated;
    st.treatment.estimates[eb_id] = ec;
    ctx.emit("estimate_generated", {{"eb", std::to_string(eb_id)},
                                    {"patient", std::to_string(p_id)},
                                    {"hospital", std::to_string(h_id)},
                                    {"cost", std::to_string(estimated_cost)}});
    return eb_id;
}

void lock_estimated_amount(TxContext& ctx, EntityId h_id, EntityId eb_id) {
    auto& ec = get_case(ctx, eb_id);
    require_caller_patient(ctx, ec);
    ctx.require(ec.h_id == h_id, "hospital mismatch");
    ctx.require(ec.phase == CasePhase::Estimated, "wrong phase");
    require_fresh(ctx, ec.t_estimate);
    ctx.require(ctx.attached() == ec.estimated_cost, "wrong value");

    ec.p_escrow = ctx.lock(ctx.caller(), ec.estimated_cost, EscrowPurpose::EstimatedByP);
    ec.t_locking_by_p = ctx.now();
    ec.phase = CasePhase::Locked;
    ctx.emit("estimate_locked", {{"eb", std::to_string(eb_id)}});
}

void start_treatment(TxContext& ctx, EntityId eb_id) {
    auto& ec = get_case(ctx, eb_id);
    require_caller_hospital(ctx, ec);
    ctx.require(ec.phase == CasePhase::Locked, "wrong phase");
    require_fresh(ctx, ec.t_locking_by_p);

    ec.t_checkup_start = ctx.now();
    ec.phase = CasePhase::InTreatment;
    ctx.emit("treatment_started", {{"eb", std::to_string(eb_id)}});
}

Digest concat_hash(EntityId p_id, Tick date, const Digest& m2) {
    ByteWriter w;
    w.u64(p_id);
    w.u64(date);
    w.raw(m2.view());
    return crypto::hash(ByteView(w.bytes().data(), w.bytes().size()));
}

EntityId keep_signed_hash_to_blockchain(TxContext& ctx, EntityId eb_id,
                                        const FileCommitment& c) {
    auto& st = ctx.state();
    auto& ec = get_case(ctx, eb_id);
    require_caller_hospital(ctx, ec);
    ctx.require(ec.phase == CasePhase::InTreatment, "wrong phase");
    ctx.require(ec.ms_id == 0, "already committed");
    // No deadline on this step: treatment duration is unbounded.

    EntityId ms_id = st.treatment.next_ms_id++;
    MultiSigOnMedicalData ms;
    ms.ms_id = ms_id;
    ms.p_id = ec.p_id;
    ms.h_id = ec.h_id;
    ms.eb_id = eb_id;
    ms.mr_med_data = c.m1;
    ms.mr_enc_circuit = c.m2;
    ms.h_x = c.h_x;
    ms.sig_m1 = c.sig_m1;
    ms.sig_hx = c.sig_hx;
    ms.key_commitment = c.key_commitment;
    ms.props = c.props;
    ms.t_signing_by_ha = ctx.now();
    st.treatment.multi_sigs[ms_id] = ms;
    ec.ms_id = ms_id;
    ec.phase = CasePhase::FileCommitted;

    ctx.put_record(ms_record_key(ms_id, "m1"), c.m1.bytes());
    ctx.put_record(ms_record_key(ms_id, "m2"), c.m2.bytes());
    ctx.put_record(ms_record_key(ms_id, "hx"), c.h_x.bytes());
    ctx.put_record(ms_record_key(ms_id, "sig_m1"), c.sig_m1.bytes());
    ctx.put_record(ms_record_key(ms_id, "sig_hx"), c.sig_hx.bytes());
    ctx.put_record(ms_record_key(ms_id, "key_commitment"), c.key_commitment.bytes());
    ctx.emit("file_committed", {{"ms", std::to_string(ms_id)},
                                {"eb", std::to_string(eb_id)},
                                {"m1", c.m1.hex()},
                                {"m2", c.m2.hex()}});
    return ms_id;
}

void verify_and_give_consent(TxContext& ctx, EntityId ms_id, const Digest& h_x_recomputed) {
    auto& ms = get_ms(ctx, ms_id);
    auto& ec = get_case(ctx, ms.eb_id);
    require_caller_patient(ctx, ec);
    ctx.require(ec.phase == CasePhase::FileCommitted, "wrong phase");
    require_fresh(ctx, ms.t_signing_by_ha);

    ctx.charge(2);
    ctx.require(h_x_recomputed == ms.h_x, "hash mismatch");
    Digest expected = concat_hash(ms.p_id, ec.t_checkup_start, ms.mr_enc_circuit);
    ctx.require(expected == ms.h_x, "hash mismatch");

    Address h = hospital_addr(ctx, ec);
    ctx.charge(2);
    ctx.require(crypto::verify_sig(h, ms.mr_med_data.view(), ms.sig_m1), "bad signature");
    ctx.require(crypto::verify_sig(h, ms.h_x.view(), ms.sig_hx), "bad signature");

    ms.t_verification_by_p = ctx.now();
    ec.phase = CasePhase::FileVerified;
    ctx.emit("file_verified", {{"ms", std::to_string(ms_id)}});
}

EntityId discharge_and_generate_final_cost_bill(TxContext& ctx, EntityId eb_id,
                                                Amount final_cost) {
    auto& st = ctx.state();
    auto& ec = get_case(ctx, eb_id);
    require_caller_hospital(ctx, ec);
    ctx.require(ec.phase == CasePhase::FileVerified, "wrong phase");
    require_fresh(ctx, st.treatment.multi_sigs.at(ec.ms_id).t_verification_by_p);
    ctx.require(final_cost <= ec.estimated_cost, "overcharge");

    EntityId fb_id = st.treatment.next_fb_id++;
    FinalCheckUpCost fc;
    fc.fb_id = fb_id;
    fc.p_id = ec.p_id;
    fc.h_id = ec.h_id;
    fc.eb_id = eb_id;
    fc.final_cost = final_cost;
    fc.t_final_billing = ctx.now();
    st.treatment.final_bills[fb_id] = fc;
    ec.fb_id = fb_id;
    ec.phase = CasePhase::FinalBilled;
    ctx.emit("final_bill_generated", {{"fb", std::to_string(fb_id)},
                                      {"eb", std::to_string(eb_id)},
                                      {"cost", std::to_string(final_cost)}});
    return fb_id;
}

void dispute_final_bill(TxContext& ctx, EntityId fb_id) {
    auto& fc = get_bill(ctx, fb_id);
    auto& ec = get_case(ctx, fc.eb_id);
    require_caller_patient(ctx, ec);
    ctx.require(ec.phase == CasePhase::FinalBilled, "wrong phase");
    ctx.require(!fc.disputed, "already disputed");
    require_fresh(ctx, fc.t_final_billing);

    fc.disputed = true;
    fc.t_dispute = ctx.now();
    ec.phase = CasePhase::BillDisputed;
    ctx.emit("bill_disputed", {{"fb", std::to_string(fb_id)}});
}

void revise_final_bill(TxContext& ctx, EntityId fb_id, Amount new_cost) {
    auto& fc = get_bill(ctx, fb_id);
    auto& ec = get_case(ctx, fc.eb_id);
    require_caller_hospital(ctx, ec);
    ctx.require(ec.phase == CasePhase::BillDisputed, "wrong phase");
    require_fresh(ctx, fc.t_dispute);
    ctx.require(new_cost <= fc.final_cost, "overcharge");

    fc.final_cost = new_cost;
    fc.t_revise = ctx.now();
    ec.phase = CasePhase::FinalBilled;
    ctx.emit("bill_revised", {{"fb", std::to_string(fb_id)},
                              {"cost", std::to_string(new_cost)}});
}

void consent_final_bill_patient(TxContext& ctx, EntityId fb_id) {
    auto& fc = get_bill(ctx, fb_id);
    auto& ec = get_case(ctx, fc.eb_id);
    require_caller_patient(ctx, ec);
    ctx.require(ec.phase == CasePhase::FinalBilled, "wrong phase");
    require_fresh(ctx, fc.t_revise != 0 ? fc.t_revise : fc.t_final_billing);

    fc.t_bill_consent = ctx.now();
    ec.phase = CasePhase::BillConsented;
    ctx.emit("bill_consented", {{"fb", std::to_string(fb_id)}});
}

void key_reveal(TxContext& ctx, EntityId eb_id, const SymKey& key) {
    auto& ec = get_case(ctx, eb_id);
    require_caller_hospital(ctx, ec);
    ctx.require(ec.phase == CasePhase::BillConsented, "wrong phase");
    auto& fc = get_bill(ctx, ec.fb_id);
    require_fresh(ctx, fc.t_bill_consent);
    auto& ms = get_ms(ctx, ec.ms_id);
    ctx.charge();
    ctx.require(crypto::commit_key(key) == ms.key_commitment, "key mismatch");

    ms.revealed_key = key;
    ms.key_revealed = true;
    ms.t_key_reveal = ctx.now();
    ec.phase = CasePhase::KeyRevealed;
    ctx.put_record(ms_record_key(ec.ms_id, "key"), Bytes(key.v.begin(), key.v.end()));
    ctx.emit("key_revealed", {{"eb", std::to_string(eb_id)}});
}

void patient_final_consent(TxContext& ctx, EntityId eb_id) {
    auto& ec = get_case(ctx, eb_id);
    require_caller_patient(ctx, ec);
    auto& fc = get_bill(ctx, ec.fb_id);
    ctx.require(fc.t_complaint_by_p == 0, "already complained");
    ctx.require(ec.phase == CasePhase::KeyRevealed, "wrong phase");
    auto& ms = get_ms(ctx, ec.ms_id);
    require_fresh(ctx, ms.t_key_reveal);

    fc.t_final_consent_by_p = ctx.now();
    ctx.emit("final_consent", {{"eb", std::to_string(eb_id)}});
    settle(ctx, ec, fc);
}

bool patient_complain(TxContext& ctx, EntityId eb_id, const fairswap::Complaint& complaint) {
    auto& ec = get_case(ctx, eb_id);
    require_caller_patient(ctx, ec);
    ctx.require(ec.phase == CasePhase::KeyRevealed, "wrong phase");
    auto& fc = get_bill(ctx, ec.fb_id);
    ctx.require(fc.t_final_consent_by_p == 0, "already consented");
    auto& ms = get_ms(ctx, ec.ms_id);
    require_fresh(ctx, ms.t_key_reveal);

    std::uint64_t proof_ops = 0;
    for (const auto& p : complaint.proofs) proof_ops += p.steps.size();
    ctx.charge(proof_ops + complaint.encoded_vectors.size() + 1);
    bool valid = fairswap::verify_any_complaint(complaint, ms.mr_enc_circuit, ms.revealed_key,
                                                ms.mr_med_data, ms.props);
    if (valid) {
        fc.t_complaint_by_p = ctx.now();
        Address p = patient_addr(ctx, ec);
        Address h = hospital_addr(ctx, ec);
        Amount penalty = ec.estimated_cost * ctx.state().params.penalty_percent / 100;
        std::vector<std::pair<Address, Amount>> parts;
        if (penalty > 0) parts.push_back({p, penalty});
        if (ec.estimated_cost > penalty) parts.push_back({h, ec.estimated_cost - penalty});
        ctx.release_split(ec.ha_escrow, parts);
        ctx.release(ec.p_escrow, p);
        ec.phase = CasePhase::Complained;
        ctx.emit("complaint_upheld", {{"eb", std::to_string(eb_id)},
                                      {"gate", std::to_string(complaint.gate_index)},
                                      {"penalty", std::to_string(penalty)}});
    } else {
        ctx.emit("complaint_rejected", {{"eb", std::to_string(eb_id)},
                                        {"gate", std::to_string(complaint.gate_index)}});
        settle(ctx, ec, fc);
    }
    return valid;
}

namespace {

/// Shared timeout exit. The deadline base is the timestamp that opened the
/// current phase; the outcome is fixed by the phase alone.
void withdraw_common(TxContext& ctx, EntityId eb_id, bool caller_is_patient) {
    auto& st = ctx.state();
    auto& ec = get_case(ctx, eb_id);
    if (caller_is_patient)
        require_caller_patient(ctx, ec);
    else
        require_caller_hospital(ctx, ec);

    Tick base = 0;
    bool hospital_takes_both = false;
    switch (ec.phase) {
        case CasePhase::Estimated:
            base = ec.t_estimate;
            break;
        case CasePhase::Locked:
            base = ec.t_locking_by_p;
            break;
        case CasePhase::InTreatment:
            // Unbounded by design; no exit while treatment runs.
            throw Revert("wrong phase");
        case CasePhase::FileCommitted:
            base = st.treatment.multi_sigs.at(ec.ms_id).t_signing_by_ha;
            break;
        case CasePhase::FileVerified:
            base = st.treatment.multi_sigs.at(ec.ms_id).t_verification_by_p;
            break;
        case CasePhase::FinalBilled: {
            const auto& fc = st.treatment.final_bills.at(ec.fb_id);
            base = fc.t_revise != 0 ? fc.t_revise : fc.t_final_billing;
            break;
        }
        case CasePhase::BillDisputed:
            base = st.treatment.final_bills.at(ec.fb_id).t_dispute;
            break;
        case CasePhase::BillConsented:
            base = st.treatment.final_bills.at(ec.fb_id).t_bill_consent;
            break;
        case CasePhase::KeyRevealed:
            base = st.treatment.multi_sigs.at(ec.ms_id).t_key_reveal;
            hospital_takes_both = true;
            break;
        default:
            throw Revert("wrong phase");
    }
    ctx.require(ctx.now() - base > st.params.ttl, "not yet expired");

    Address h = hospital_addr(ctx, ec);
    if (ec.ha_escrow != 0) ctx.release(ec.ha_escrow, h);
    if (ec.p_escrow != 0) {
        Address p = patient_addr(ctx, ec);
        ctx.release(ec.p_escrow, hospital_takes_both ? h : p);
    }
    if (caller_is_patient)
        ec.t_unlocking_by_p = ctx.now();
    else
        ec.t_unlocking_by_ha = ctx.now();
    ec.phase = CasePhase::Aborted;
    ctx.emit("case_aborted", {{"eb", std::to_string(eb_id)},
                              {"by", caller_is_patient ? "patient" : "hospital"}});
}

}  // namespace

void withdraw_by_patient(TxContext& ctx, EntityId eb_id) {
    withdraw_common(ctx, eb_id, true);
}

void withdraw_by_hospital(TxContext& ctx, EntityId eb_id) {
    withdraw_common(ctx, eb_id, false);
}

}  // namespace medchain::treatment
