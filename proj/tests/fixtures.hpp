#pragma once

#include "medchain/calls.hpp"

namespace medchain::test {

using crypto::Digest;
using crypto::KeyPair;
using crypto::SymKey;

inline KeyPair kp(const char* tag) {
    return KeyPair::from_seed(crypto::hash(to_bytes(tag)));
}

inline Digest patient_info_digest(std::string_view name, std::string_view age,
                                  std::string_view mob, std::string_view address) {
    ByteWriter w;
    w.str(name);
    w.str(age);
    w.str(mob);
    w.str(address);
    return crypto::hash(ByteView(w.bytes().data(), w.bytes().size()));
}

/// One registered entity of every kind with equal endowments.
struct Cast {
    World w;
    KeyPair gov = kp("government");
    KeyPair patient = kp("patient-1");
    KeyPair hospital = kp("hospital-1");
    KeyPair insurer = kp("insurer-1");
    KeyPair dbo = kp("dbo-1");
    KeyPair rc = kp("rc-1");
    EntityId p_id = 0, h_id = 0, ic_id = 0, dbo_id = 0, rc_id = 0;
};

inline Cast make_cast(Amount endowment = 1000, ProtocolParams params = {}) {
    Cast c;
    c.w.genesis(c.gov.vk,
                {{c.patient.vk, endowment},
                 {c.hospital.vk, endowment},
                 {c.insurer.vk, endowment},
                 {c.dbo.vk, endowment},
                 {c.rc.vk, endowment}},
                params);
    c.p_id = calls::register_entity(c.w, c.patient.vk, EntityKind::Patient, c.patient.vk,
                                    patient_info_digest("ada-lovelace", "36", "5550100999",
                                                        "12 analytical row"))
                 .id;
    c.h_id = calls::register_entity(c.w, c.hospital.vk, EntityKind::Hospital, c.hospital.vk,
                                    crypto::hash(to_bytes("general-hospital")))
                 .id;
    c.ic_id = calls::register_entity(c.w, c.insurer.vk, EntityKind::InsuranceCo, c.insurer.vk,
                                     crypto::hash(to_bytes("acme-insurance")))
                  .id;
    c.dbo_id = calls::register_entity(c.w, c.gov.vk, EntityKind::DatabaseOwner, c.dbo.vk,
                                      crypto::hash(to_bytes("med-repository")))
                   .id;
    c.rc_id = calls::register_entity(c.w, c.gov.vk, EntityKind::ResearchCommunity, c.rc.vk,
                                     crypto::hash(to_bytes("research-lab")))
                  .id;
    return c;
}

/// Hospital-side helper: encode the file and build the on-chain commitment.
struct PreparedFile {
    fairswap::EncodeResult enc;
    treatment::FileCommitment commitment;
    SymKey key;
};

inline PreparedFile prepare_file(const KeyPair& hospital, EntityId p_id, Tick date,
                                 ByteView file, std::uint32_t chunk_size, const SymKey& key) {
    PreparedFile p;
    p.key = key;
    p.enc = fairswap::encode(file, chunk_size, key);
    treatment::FileCommitment c;
    c.m1 = p.enc.m1;
    c.m2 = p.enc.m2;
    c.h_x = treatment::concat_hash(p_id, date, p.enc.m2);
    c.sig_m1 = crypto::sign(hospital, c.m1.view());
    c.sig_hx = crypto::sign(hospital, c.h_x.view());
    c.key_commitment = crypto::commit_key(key);
    c.props = p.enc.props;
    p.commitment = c;
    return p;
}

/// Drives an honest case up to (and including) the given step.
enum class TreatStep {
    Estimated,
    Locked,
    Started,
    Committed,
    Verified,
    Billed,
    BillConsented,
    KeyRevealed,
    Settled,
};

struct TreatRun {
    EntityId eb_id = 0, ms_id = 0, fb_id = 0;
    PreparedFile file;
    Bytes file_bytes;
};

inline TreatRun drive_treatment(Cast& c, TreatStep upto, Amount est = 100, Amount fin = 80,
                                std::uint32_t chunks = 4, std::uint32_t chunk_size = 32) {
    TreatRun t;
    t.file_bytes = crypto::expand_stream(crypto::hash(to_bytes("medical-file")),
                                         std::size_t(chunks) * chunk_size);
    t.eb_id = calls::generate_estimated_cost_bill(c.w, c.hospital.vk, c.p_id, est).id;
    if (upto == TreatStep::Estimated) return t;
    calls::lock_estimated_amount(c.w, c.patient.vk, c.h_id, t.eb_id, est);
    if (upto == TreatStep::Locked) return t;
    calls::start_treatment(c.w, c.hospital.vk, t.eb_id);
    if (upto == TreatStep::Started) return t;

    Tick date = c.w.state().treatment.estimates.at(t.eb_id).t_checkup_start;
    t.file = prepare_file(c.hospital, c.p_id, date,
                          ByteView(t.file_bytes.data(), t.file_bytes.size()), chunk_size,
                          SymKey::from_digest(crypto::hash(to_bytes("case-key"))));
    t.ms_id = calls::keep_signed_hash_to_blockchain(c.w, c.hospital.vk, t.eb_id,
                                                    t.file.commitment)
                  .id;
    if (upto == TreatStep::Committed) return t;
    calls::verify_and_give_consent(c.w, c.patient.vk, t.ms_id, t.file.commitment.h_x);
    if (upto == TreatStep::Verified) return t;
    t.fb_id = calls::discharge_and_generate_final_cost_bill(c.w, c.hospital.vk, t.eb_id, fin).id;
    if (upto == TreatStep::Billed) return t;
    calls::consent_final_bill_patient(c.w, c.patient.vk, t.fb_id);
    if (upto == TreatStep::BillConsented) return t;
    calls::key_reveal(c.w, c.hospital.vk, t.eb_id, t.file.key);
    if (upto == TreatStep::KeyRevealed) return t;
    calls::patient_final_consent(c.w, c.patient.vk, t.eb_id);
    return t;
}

/// Honest storage flow on a settled case; returns the application id.
inline EntityId drive_storage(Cast& c, const TreatRun& t, Amount fee = 10) {
    EntityId as_id = calls::apply_for_storing(c.w, c.patient.vk, c.dbo_id, t.ms_id, fee).id;
    const auto& ms = c.w.state().treatment.multi_sigs.at(t.ms_id);
    calls::dbo_verify_roots(c.w, c.dbo.vk, as_id, ms.mr_med_data, ms.mr_enc_circuit);
    calls::storage_key_reveal(c.w, c.patient.vk, as_id, t.file.key);
    calls::dbo_approve(c.w, c.dbo.vk, as_id);
    return as_id;
}

/// Honest policy sale; returns the policy id.
inline EntityId drive_policy(Cast& c, Amount price = 50, Amount deposit = 100) {
    calls::deposit_security(c.w, c.insurer.vk, deposit);
    calls::note_policy_listed(c.w, c.insurer.vk, price);
    Digest terms = crypto::hash(to_bytes("policy terms and conditions v1"));
    calls::buy_policy_phase_one(c.w, c.patient.vk, c.ic_id, terms, price);
    return calls::buy_policy_phase_two(c.w, c.insurer.vk, c.p_id, price, terms).id;
}

/// Idle ticks so the next submitted transaction executes at exactly
/// base + TTL + 1, the first expired tick (the boundary is strict).
inline void lapse(World& w, Tick base) {
    while (w.now() < base + w.state().params.ttl) w.idle_tick();
}

/// Idle ticks so the next submitted transaction executes at exactly `target`.
inline void idle_until_exec_at(World& w, Tick target) {
    while (w.now() + 1 < target) w.idle_tick();
}

}  // namespace medchain::test
