#include "medchain/state.hpp"

namespace medchain {

namespace {

void put_digest(ByteWriter& w, const Digest& d) { w.raw(d.view()); }
void put_addr(ByteWriter& w, const Address& a) { w.raw(a.view()); }
void put_sig(ByteWriter& w, const Signature& s) { w.raw(ByteView(s.v.data(), s.v.size())); }
void put_key(ByteWriter& w, const SymKey& k) { w.raw(k.view()); }

void put_props(ByteWriter& w, const fairswap::FileProperties& p) {
    Bytes b = p.encode();
    w.raw(ByteView(b.data(), b.size()));
}

}  // namespace

Bytes ChainState::serialize() const {
    ByteWriter w;

    w.u64(params.ttl);
    w.u64(params.grace_ttl);
    w.u32(params.penalty_percent);

    w.u32(static_cast<std::uint32_t>(balances.size()));
    for (const auto& [addr, bal] : balances) {
        put_addr(w, addr);
        w.u64(bal);
    }

    w.u32(static_cast<std::uint32_t>(escrows.size()));
    for (const auto& [id, e] : escrows) {
        w.u64(id);
        w.u8(static_cast<std::uint8_t>(e.holder));
        put_addr(w, e.payer);
        w.u64(e.amount);
        w.u8(static_cast<std::uint8_t>(e.purpose));
        w.u8(e.live ? 1 : 0);
    }
    w.u64(next_escrow_id);

    w.u32(static_cast<std::uint32_t>(records.size()));
    for (const auto& [key, rec] : records) {
        w.str(key);
        w.blob(ByteView(rec.value.data(), rec.value.size()));
        w.u64(rec.written_at);
    }

    put_addr(w, government);
    put_addr(w, security_vault);

    // registry
    w.u32(static_cast<std::uint32_t>(registry.entities.size()));
    for (const auto& [key, e] : registry.entities) {
        w.u8(key.first);
        w.u64(key.second);
        w.u64(e.id);
        put_addr(w, e.addr);
        put_digest(w, e.info_digest);
    }
    w.u32(static_cast<std::uint32_t>(registry.grants.size()));
    for (const auto& [key, active] : registry.grants) {
        w.u64(std::get<0>(key));
        put_addr(w, std::get<1>(key));
        w.u8(std::get<2>(key));
        w.u8(active ? 1 : 0);
    }
    w.u32(static_cast<std::uint32_t>(registry.security_locked.size()));
    for (const auto& [id, amt] : registry.security_locked) {
        w.u64(id);
        w.u64(amt);
    }
    w.u32(static_cast<std::uint32_t>(registry.costliest_policy.size()));
    for (const auto& [id, amt] : registry.costliest_policy) {
        w.u64(id);
        w.u64(amt);
    }
    w.u32(static_cast<std::uint32_t>(registry.deregistered_insurers.size()));
    for (EntityId id : registry.deregistered_insurers) w.u64(id);

    // treatment
    w.u32(static_cast<std::uint32_t>(treatment.estimates.size()));
    for (const auto& [id, ec] : treatment.estimates) {
        w.u64(id);
        w.u64(ec.p_id);
        w.u64(ec.h_id);
        w.u64(ec.estimated_cost);
        w.u64(ec.t_estimate);
        w.u64(ec.t_locking_by_ha);
        w.u64(ec.t_locking_by_p);
        w.u64(ec.t_checkup_start);
        w.u64(ec.t_unlocking_by_ha);
        w.u64(ec.t_unlocking_by_p);
        w.u8(static_cast<std::uint8_t>(ec.phase));
        w.u64(ec.ha_escrow);
        w.u64(ec.p_escrow);
        w.u64(ec.fb_id);
        w.u64(ec.ms_id);
    }
    w.u32(static_cast<std::uint32_t>(treatment.final_bills.size()));
    for (const auto& [id, fc] : treatment.final_bills) {
        w.u64(id);
        w.u64(fc.p_id);
        w.u64(fc.h_id);
        w.u64(fc.eb_id);
        w.u64(fc.final_cost);
        w.u64(fc.t_final_billing);
        w.u64(fc.t_bill_consent);
        w.u64(fc.t_complaint_by_p);
        w.u64(fc.t_unlocking_by_ha);
        w.u64(fc.t_unlocking_by_p);
        w.u64(fc.t_final_consent_by_p);
        w.u64(fc.t_dispute);
        w.u64(fc.t_revise);
        w.u8(fc.disputed ? 1 : 0);
    }
    w.u32(static_cast<std::uint32_t>(treatment.multi_sigs.size()));
    for (const auto& [id, ms] : treatment.multi_sigs) {
        w.u64(id);
        w.u64(ms.p_id);
        w.u64(ms.h_id);
        w.u64(ms.eb_id);
        put_digest(w, ms.mr_med_data);
        put_digest(w, ms.mr_enc_circuit);
        put_digest(w, ms.h_x);
        put_sig(w, ms.sig_m1);
        put_sig(w, ms.sig_hx);
        put_digest(w, ms.key_commitment);
        put_props(w, ms.props);
        w.u64(ms.t_signing_by_ha);
        w.u64(ms.t_verification_by_p);
        w.u8(ms.key_revealed ? 1 : 0);
        if (ms.key_revealed) put_key(w, ms.revealed_key);
        w.u64(ms.t_key_reveal);
    }
    w.u64(treatment.next_eb_id);
    w.u64(treatment.next_fb_id);
    w.u64(treatment.next_ms_id);

    // insurance
    w.u32(static_cast<std::uint32_t>(insurance.pending.size()));
    for (const auto& [key, p] : insurance.pending) {
        put_addr(w, key.first);
        w.u64(key.second);
        w.u64(p.locked_price);
        put_digest(w, p.terms_hash);
        w.u64(p.t1);
        w.u64(p.escrow);
    }
    w.u32(static_cast<std::uint32_t>(insurance.policies.size()));
    for (const auto& [id, pd] : insurance.policies) {
        w.u64(id);
        w.u64(pd.buyer_id);
        w.u64(pd.ic_id);
        w.u64(pd.t_buying_policy);
        put_digest(w, pd.terms_hash);
        w.u64(pd.price);
        w.u32(static_cast<std::uint32_t>(pd.claim_ids.size()));
        for (EntityId c : pd.claim_ids) w.u64(c);
    }
    w.u32(static_cast<std::uint32_t>(insurance.claims.size()));
    for (const auto& [id, cd] : insurance.claims) {
        w.u64(id);
        w.u64(cd.po_id);
        w.u64(cd.eb_id);
        w.u64(cd.as_id);
        w.u64(cd.t_generating_claim);
        w.u64(cd.claimed_amount);
        w.u64(cd.approved_amount);
        put_digest(w, cd.comm_k);
        w.u8(cd.k_revealed ? 1 : 0);
        if (cd.k_revealed) put_key(w, cd.k);
        w.u64(cd.t_reveal_key);
        w.u64(cd.t_locking_by_ic);
        w.u64(cd.t_unlocking_by_ic);
        w.u64(cd.t_approval);
        w.u8(cd.self_approved ? 1 : 0);
        w.u64(cd.lock_escrow);
        put_digest(w, cd.mr_file);
        w.u8(cd.dbo_sig_present ? 1 : 0);
        if (cd.dbo_sig_present) {
            put_sig(w, cd.dbo_sig);
            put_digest(w, cd.enc_data_hash);
        }
        w.u64(cd.t_dbo_sig);
        w.u8(cd.key_expired_at_dbo ? 1 : 0);
        w.u8(cd.compensated ? 1 : 0);
    }
    w.u64(insurance.next_po_id);
    w.u64(insurance.next_c_id);

    // storage
    w.u32(static_cast<std::uint32_t>(storage.applications.size()));
    for (const auto& [id, as] : storage.applications) {
        w.u64(id);
        w.u64(as.p_id);
        put_addr(w, as.p_addr);
        w.u64(as.dbo_id);
        put_addr(w, as.dbo_addr);
        w.u64(as.ms_id);
        put_digest(w, as.mr_file);
        put_digest(w, as.mr_enc_file);
        w.u8(as.key_revealed ? 1 : 0);
        if (as.key_revealed) put_key(w, as.key);
        w.u64(as.t_application);
        w.u64(as.t_verification_mr);
        w.u64(as.t_key_reveal);
        w.u64(as.t_complain);
        w.u64(as.t_approval);
        w.u64(as.t_unlocking_by_p);
        w.u64(as.t_unlocking_by_dbo);
        w.u64(as.fee);
        w.u64(as.fee_escrow);
    }
    w.u64(storage.next_as_id);

    // research
    w.u32(static_cast<std::uint32_t>(research.requests.size()));
    for (const auto& [id, rq] : research.requests) {
        w.u64(id);
        w.u64(rq.dbo_id);
        w.u64(rq.rc_id);
        put_digest(w, rq.hash_query);
        w.u64(rq.t1);
        w.u8(rq.responded ? 1 : 0);
        if (rq.responded) {
            put_digest(w, rq.hash_data);
            put_sig(w, rq.sign);
            w.u64(rq.t2);
        }
    }
    w.u64(research.next_rd_id);

    w.u64(total_endowment);
    return w.take();
}

Digest ChainState::digest() const {
    Bytes s = serialize();
    return crypto::hash(ByteView(s.data(), s.size()));
}

Amount ChainState::circulating_total() const {
    Amount total = 0;
    for (const auto& [addr, bal] : balances) total += bal;
    for (const auto& [id, e] : escrows)
        if (e.live) total += e.amount;
    return total;
}

}  // namespace medchain
