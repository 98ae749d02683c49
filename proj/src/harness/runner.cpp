#include "medchain/harness/runner.hpp"

#include <algorithm>

#include "medchain/calls.hpp"

namespace medchain::harness {

using crypto::Digest;
using crypto::KeyPair;
using crypto::SymKey;

namespace {

// --- offline payload codecs ----------------------------------------------------

Bytes encode_delivery(EntityId ref_id, const fairswap::EncryptedEncoding& enc) {
    ByteWriter w;
    w.u64(ref_id);
    Bytes props = enc.props.encode();
    w.raw(ByteView(props.data(), props.size()));
    w.u32(static_cast<std::uint32_t>(enc.cipher_elements.size()));
    for (const auto& e : enc.cipher_elements) w.blob(ByteView(e.data(), e.size()));
    return w.take();
}

std::pair<EntityId, fairswap::EncryptedEncoding> decode_delivery(const Bytes& payload) {
    ByteReader r(ByteView(payload.data(), payload.size()));
    EntityId ref = r.u64();
    fairswap::EncryptedEncoding enc;
    enc.props = fairswap::FileProperties::decode(r);
    std::uint32_t n = r.u32();
    enc.cipher_elements.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) enc.cipher_elements.push_back(r.blob());
    return {ref, std::move(enc)};
}

Bytes encode_keyed(EntityId id, ByteView tail) {
    ByteWriter w;
    w.u64(id);
    w.raw(tail);
    return w.take();
}

// Synthetic EHR: a condition line, the patient's identity (the file itself is
// sensitive), then deterministic filler up to the exact target size.
Bytes make_medical_file(const Digest& seed, const std::string& condition,
                        const std::string& patient_name, std::size_t size) {
    std::string header = "condition:" + condition + "\npatient:" + patient_name + "\n";
    Bytes out(header.begin(), header.end());
    if (out.size() > size) {
        out.resize(size);
        return out;
    }
    Bytes filler = crypto::expand_stream(seed, size - out.size());
    out.insert(out.end(), filler.begin(), filler.end());
    return out;
}

std::string extract_condition(const Bytes& file) {
    std::string text(file.begin(), file.end());
    auto pos = text.find("condition:");
    if (pos != 0) return "unknown";
    auto end = text.find('\n');
    if (end == std::string::npos) return "unknown";
    return text.substr(10, end - 10);
}

std::string extract_patient_line(const Bytes& file) {
    std::string text(file.begin(), file.end());
    auto pos = text.find("patient:");
    if (pos == std::string::npos) return "";
    auto end = text.find('\n', pos);
    return text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
}

struct Runner {
    const Scenario& sc;
    const ScenarioParams& P;
    World w;

    KeyPair gov, p_kp, h_kp, ic_kp, dbo_kp, rc_kp;
    EntityId p_id = 0, h_id = 0, ic_id = 0, dbo_id = 0, rc_id = 0;

    PatientStrategy p_strat;
    HospitalStrategy h_strat;
    InsurerStrategy ic_strat;
    DboStrategy dbo_strat;

    Digest seed_digest;
    std::string patient_name = "ada-lovelace";
    std::string patient_mob = "5550100999";
    std::string patient_home = "12 analytical row";
    std::string condition = "flu";
    Digest terms_hash;

    std::vector<OfflineRecord> offline_log;
    std::map<std::string, std::int64_t> flags;
    std::map<std::string, std::string> texts;
    std::vector<Bytes> research_deliveries;

    // hospital state
    bool h_generated = false;
    bool h_overcharge_tried = false;
    EntityId eb_id = 0;
    Bytes h_file;             // the file matching the signed M1
    Bytes h_delivered_file;   // what the delivered encoding actually encodes
    SymKey h_commit_key;      // committed in H(key)
    SymKey h_encrypt_key;     // used for the delivered encoding
    std::optional<fairswap::EncodeResult> h_enc;

    // patient state
    bool p_offline_checked = false;
    bool p_offline_ok = false;
    std::optional<fairswap::EncryptedEncoding> p_delivery;
    Bytes p_received_file;
    bool p_applied = false;
    EntityId as_id = 0;
    bool p_phase_one = false;
    bool p_claimed = false;
    EntityId c_id = 0;
    SymKey p_claim_key;

    // insurer state
    bool ic_deposited = false;
    bool ic_listed = false;
    std::set<EntityId> ic_file_requested;
    std::map<EntityId, Bytes> ic_enc_data;

    // dbo state
    std::map<EntityId, fairswap::EncryptedEncoding> dbo_deliveries;  // ms_id -> encoding
    std::set<EntityId> dbo_dead_applications;
    std::map<EntityId, std::pair<EntityId, Bytes>> dbo_store;  // ms_id -> (p_id, plaintext)
    std::map<EntityId, SymKey> dbo_claim_keys;
    std::set<EntityId> dbo_file_requests;
    std::set<EntityId> dbo_claims_done;
    std::set<EntityId> dbo_research_done;

    // rc state
    bool rc_requested = false;
    bool rc_checked = false;
    EntityId rd_id = 0;
    std::optional<Bytes> rc_dataset;

    explicit Runner(const Scenario& scenario) : sc(scenario), P(scenario.params) {
        auto seed_of = [&](const char* tag) {
            ByteWriter wr;
            wr.u64(sc.seed);
            wr.str(tag);
            return crypto::hash(ByteView(wr.bytes().data(), wr.bytes().size()));
        };
        seed_digest = seed_of("scenario");
        gov = KeyPair::from_seed(seed_of("government"));
        p_kp = KeyPair::from_seed(seed_of("patient"));
        h_kp = KeyPair::from_seed(seed_of("hospital"));
        ic_kp = KeyPair::from_seed(seed_of("insurer"));
        dbo_kp = KeyPair::from_seed(seed_of("dbo"));
        rc_kp = KeyPair::from_seed(seed_of("rc"));
        h_commit_key = SymKey::from_digest(seed_of("commit-key"));
        h_encrypt_key = SymKey::from_digest(seed_of("encrypt-key"));
        p_claim_key = SymKey::from_digest(seed_of("claim-key"));
        terms_hash = crypto::hash(to_bytes("terms-and-conditions:" + std::to_string(sc.seed)));

        p_strat = parse_patient_strategy(sc.patient_strategy);
        h_strat = parse_hospital_strategy(sc.hospital_strategy);
        ic_strat = parse_insurer_strategy(sc.insurer_strategy);
        dbo_strat = parse_dbo_strategy(sc.dbo_strategy);
    }

    bool stage(const char* s) const { return sc.stages.count(s) > 0; }
    Tick now() const { return w.now(); }
    Tick ttl() const { return P.ttl; }
    const ChainState& st() const { return w.state(); }

    void send_offline(const KeyPair& from, const Address& to, const std::string& kind,
                      Bytes payload) {
        OfflineRecord rec;
        rec.sent_at = now();
        rec.from_hex = from.vk.hex();
        rec.to_hex = to.hex();
        rec.kind = kind;
        rec.size = payload.size();
        rec.payload_digest = crypto::hash(payload).hex();
        rec.dropped = sc.drop_offline.count(kind) > 0;
        if (!rec.dropped) rec.id = w.bus.send(now(), from.vk, to, kind, std::move(payload));
        offline_log.push_back(rec);
    }

    void setup() {
        w.genesis(gov.vk,
                  {{p_kp.vk, P.endowment},
                   {h_kp.vk, P.endowment},
                   {ic_kp.vk, P.endowment},
                   {dbo_kp.vk, P.endowment},
                   {rc_kp.vk, P.endowment}},
                  ProtocolParams{P.ttl, P.grace_ttl, P.penalty_percent});

        ByteWriter info;
        info.str(patient_name);
        info.str("36");
        info.str(patient_mob);
        info.str(patient_home);
        Digest info_digest = crypto::hash(ByteView(info.bytes().data(), info.bytes().size()));
        p_id = calls::register_entity(w, p_kp.vk, EntityKind::Patient, p_kp.vk, info_digest).id;
        h_id = calls::register_entity(w, h_kp.vk, EntityKind::Hospital, h_kp.vk,
                                      crypto::hash(to_bytes("city-hospital")))
                   .id;
        ic_id = calls::register_entity(w, ic_kp.vk, EntityKind::InsuranceCo, ic_kp.vk,
                                       crypto::hash(to_bytes("acme-insurance")))
                    .id;
        dbo_id = calls::register_entity(w, gov.vk, EntityKind::DatabaseOwner, dbo_kp.vk,
                                        crypto::hash(to_bytes("med-repository")))
                     .id;
        rc_id = calls::register_entity(w, gov.vk, EntityKind::ResearchCommunity, rc_kp.vk,
                                       crypto::hash(to_bytes("research-lab")))
                    .id;
    }

    // --- hospital ---------------------------------------------------------------

    treatment::FileCommitment build_commitment(const Digest& m1, const Digest& m2,
                                               const fairswap::FileProperties& props,
                                               Tick date) {
        treatment::FileCommitment c;
        c.m1 = m1;
        c.m2 = m2;
        c.h_x = treatment::concat_hash(p_id, date, m2);
        c.sig_m1 = crypto::sign(h_kp, c.m1.view());
        c.sig_hx = crypto::sign(h_kp, c.h_x.view());
        c.key_commitment = crypto::commit_key(h_commit_key);
        c.props = props;
        return c;
    }

    bool hospital_commit_file() {
        const auto& ec = st().treatment.estimates.at(eb_id);
        std::size_t size = std::size_t(P.gates) * P.buffer;
        h_file = make_medical_file(seed_digest, condition, patient_name, size);

        fairswap::EncodeResult enc_a =
            fairswap::encode(ByteView(h_file.data(), h_file.size()), P.buffer, h_commit_key);
        treatment::FileCommitment commitment;

        if (h_strat == HospitalStrategy::WrongFile) {
            // internally consistent encoding of a different file, anchored to
            // the signed M1 of the real one
            Bytes other = make_medical_file(crypto::hash(to_bytes("other-seed")), condition,
                                            patient_name, size);
            fairswap::EncodeResult enc_b =
                fairswap::encode(ByteView(other.data(), other.size()), P.buffer, h_commit_key);
            commitment = build_commitment(enc_a.m1, enc_b.m2, enc_b.props, ec.t_checkup_start);
            h_delivered_file = other;
            h_enc = std::move(enc_b);
        } else if (h_strat == HospitalStrategy::WrongKey) {
            // commits to one key, encrypts with another, reveals the committed one
            fairswap::EncodeResult enc_b =
                fairswap::encode(ByteView(h_file.data(), h_file.size()), P.buffer, h_encrypt_key);
            commitment = build_commitment(enc_b.m1, enc_b.m2, enc_b.props, ec.t_checkup_start);
            h_delivered_file = h_file;
            h_enc = std::move(enc_b);
        } else {
            commitment = build_commitment(enc_a.m1, enc_a.m2, enc_a.props, ec.t_checkup_start);
            h_delivered_file = h_file;
            h_enc = std::move(enc_a);
        }

        calls::keep_signed_hash_to_blockchain(w, h_kp.vk, eb_id, commitment);
        send_offline(h_kp, p_kp.vk, "encoded_file", encode_delivery(eb_id, h_enc->encrypted));
        return true;
    }

    bool step_hospital() {
        if (!stage("treat")) return false;
        if (!h_generated) {
            eb_id = calls::generate_estimated_cost_bill(w, h_kp.vk, p_id, P.estimated_cost).id;
            h_generated = true;
            return true;
        }
        if (eb_id == 0) return false;  // the estimate transaction reverted
        const auto& ec = st().treatment.estimates.at(eb_id);
        switch (ec.phase) {
            case CasePhase::Estimated:
                if (now() > ec.t_estimate + ttl()) {
                    calls::withdraw_by_hospital(w, h_kp.vk, eb_id);
                    return true;
                }
                return false;
            case CasePhase::Locked:
                if (h_strat == HospitalStrategy::NeverStart) return false;
                calls::start_treatment(w, h_kp.vk, eb_id);
                return true;
            case CasePhase::InTreatment:
                return hospital_commit_file();
            case CasePhase::FileCommitted: {
                const auto& ms = st().treatment.multi_sigs.at(ec.ms_id);
                if (now() > ms.t_signing_by_ha + ttl()) {
                    calls::withdraw_by_hospital(w, h_kp.vk, eb_id);
                    return true;
                }
                return false;
            }
            case CasePhase::FileVerified: {
                if (h_strat == HospitalStrategy::SilentAtDischarge) return false;
                if (h_strat == HospitalStrategy::Overcharge) {
                    if (h_overcharge_tried) return false;
                    h_overcharge_tried = true;
                    calls::discharge_and_generate_final_cost_bill(w, h_kp.vk, eb_id,
                                                                  P.estimated_cost + 7);
                    return true;  // reverts; the hospital stays stubborn
                }
                calls::discharge_and_generate_final_cost_bill(w, h_kp.vk, eb_id, P.final_cost);
                return true;
            }
            case CasePhase::FinalBilled: {
                const auto& fc = st().treatment.final_bills.at(ec.fb_id);
                Tick base = fc.t_revise != 0 ? fc.t_revise : fc.t_final_billing;
                if (now() > base + ttl()) {
                    calls::withdraw_by_hospital(w, h_kp.vk, eb_id);
                    return true;
                }
                return false;
            }
            case CasePhase::BillConsented:
                if (h_strat == HospitalStrategy::SilentAtKeyReveal) return false;
                calls::key_reveal(w, h_kp.vk, eb_id, h_commit_key);
                return true;
            case CasePhase::KeyRevealed: {
                const auto& ms = st().treatment.multi_sigs.at(ec.ms_id);
                if (now() > ms.t_key_reveal + ttl()) {
                    calls::withdraw_by_hospital(w, h_kp.vk, eb_id);
                    return true;
                }
                return false;
            }
            default:
                return false;
        }
    }

    // --- patient ----------------------------------------------------------------

    void patient_drain_inbox() {
        for (auto& m : w.bus.receive(p_kp.vk)) {
            if (m.kind == "encoded_file") {
                auto [ref, enc] = decode_delivery(m.payload);
                if (ref == eb_id) p_delivery = std::move(enc);
            }
        }
    }

    /// Offline verification before on-chain consent: the received ciphertexts
    /// must hash to the committed M2 and the signed metadata must check out.
    bool patient_check_delivery(const MultiSigOnMedicalData& ms, const EstimatedCheckUpCost& ec) {
        if (!p_delivery) return false;
        if (p_delivery->cipher_elements.size() != ms.props.element_count()) return false;
        for (std::uint64_t i = 0; i < ms.props.leaf_count(); ++i)
            if (p_delivery->cipher_elements[i].size() != ms.props.chunk_size) return false;
        if (fairswap::merkle_root_of_elements(p_delivery->cipher_elements) != ms.mr_enc_circuit)
            return false;
        Digest expect_hx = treatment::concat_hash(p_id, ec.t_checkup_start, ms.mr_enc_circuit);
        if (expect_hx != ms.h_x) return false;
        if (!crypto::verify_sig(h_kp.vk, ms.mr_med_data.view(), ms.sig_m1)) return false;
        if (!crypto::verify_sig(h_kp.vk, ms.h_x.view(), ms.sig_hx)) return false;
        return true;
    }

    fairswap::Complaint fabricate_complaint(const MultiSigOnMedicalData& ms) {
        crypto::MerkleTree tree = crypto::MerkleTree::build(p_delivery->cipher_elements);
        fairswap::Circuit geom(ms.props);
        fairswap::Complaint c;
        c.kind = fairswap::Complaint::Kind::Gate;
        c.gate_index = ms.props.leaf_count();
        auto [cl, cr] = geom.children(c.gate_index);
        for (std::uint64_t idx : {cl, cr, c.gate_index}) {
            c.encoded_vectors.push_back(p_delivery->cipher_elements[idx]);
            c.proofs.push_back(tree.prove(idx));
        }
        return c;
    }

    bool patient_step_treat() {
        if (!stage("treat") || !h_generated || eb_id == 0) return false;
        const auto& ec = st().treatment.estimates.at(eb_id);
        switch (ec.phase) {
            case CasePhase::Estimated:
                if (p_strat == PatientStrategy::NoPay) return false;
                if (ec.p_escrow == 0) {
                    calls::lock_estimated_amount(w, p_kp.vk, h_id, eb_id, ec.estimated_cost);
                    return true;
                }
                return false;
            case CasePhase::Locked:
                if (now() > ec.t_locking_by_p + ttl()) {
                    calls::withdraw_by_patient(w, p_kp.vk, eb_id);
                    return true;
                }
                return false;
            case CasePhase::FileCommitted: {
                const auto& ms = st().treatment.multi_sigs.at(ec.ms_id);
                if (p_strat != PatientStrategy::SilentAtVerify) {
                    if (p_delivery && !p_offline_checked) {
                        p_offline_ok = patient_check_delivery(ms, ec);
                        p_offline_checked = true;
                    }
                    if (p_offline_checked && p_offline_ok) {
                        calls::verify_and_give_consent(w, p_kp.vk, ec.ms_id, ms.h_x);
                        return true;
                    }
                }
                if (now() > ms.t_signing_by_ha + ttl()) {
                    calls::withdraw_by_patient(w, p_kp.vk, eb_id);
                    return true;
                }
                return false;
            }
            case CasePhase::FileVerified: {
                const auto& ms = st().treatment.multi_sigs.at(ec.ms_id);
                if (now() > ms.t_verification_by_p + ttl()) {
                    calls::withdraw_by_patient(w, p_kp.vk, eb_id);
                    return true;
                }
                return false;
            }
            case CasePhase::FinalBilled:
                if (p_strat == PatientStrategy::SilentAtBillConsent) return false;
                calls::consent_final_bill_patient(w, p_kp.vk, ec.fb_id);
                return true;
            case CasePhase::BillConsented: {
                const auto& fc = st().treatment.final_bills.at(ec.fb_id);
                if (now() > fc.t_bill_consent + ttl()) {
                    calls::withdraw_by_patient(w, p_kp.vk, eb_id);
                    return true;
                }
                return false;
            }
            case CasePhase::KeyRevealed: {
                const auto& ms = st().treatment.multi_sigs.at(ec.ms_id);
                if (p_strat == PatientStrategy::SilentAfterReveal) return false;
                if (p_strat == PatientStrategy::FalseComplaint) {
                    calls::patient_complain(w, p_kp.vk, eb_id, fabricate_complaint(ms));
                    return true;
                }
                if (!p_delivery) return false;
                auto out = fairswap::decode_and_check(*p_delivery, ms.revealed_key,
                                                      ms.mr_med_data);
                if (out.file) {
                    p_received_file = *out.file;
                    calls::patient_final_consent(w, p_kp.vk, eb_id);
                } else if (out.complaint) {
                    calls::patient_complain(w, p_kp.vk, eb_id, *out.complaint);
                } else {
                    return false;
                }
                return true;
            }
            default:
                return false;
        }
    }

    bool patient_step_store() {
        if (!stage("store") || eb_id == 0) return false;
        const auto& ec = st().treatment.estimates.at(eb_id);
        if (ec.phase != CasePhase::Settled || ec.ms_id == 0) return false;
        if (!p_applied) {
            if (!p_delivery) return false;
            as_id = calls::apply_for_storing(w, p_kp.vk, dbo_id, ec.ms_id, P.storage_fee).id;
            fairswap::EncryptedEncoding to_send = *p_delivery;
            if (p_strat == PatientStrategy::TamperStoredFile)
                to_send.cipher_elements[1][0] ^= 0x01;
            send_offline(p_kp, dbo_kp.vk, "stored_file", encode_delivery(ec.ms_id, to_send));
            p_applied = true;
            return true;
        }
        const auto& as = st().storage.applications.at(as_id);
        if (as.t_approval != 0 || as.t_complain != 0) return false;
        if (as.t_unlocking_by_p != 0 || as.t_unlocking_by_dbo != 0) return false;
        if (as.t_verification_mr == 0) {
            if (now() > as.t_application + ttl()) {
                calls::withdraw_storage(w, p_kp.vk, as_id);
                return true;
            }
            return false;
        }
        if (!as.key_revealed) {
            if (p_strat == PatientStrategy::SilentAtStorageReveal) return false;
            const auto& ms = st().treatment.multi_sigs.at(ec.ms_id);
            calls::storage_key_reveal(w, p_kp.vk, as_id, ms.revealed_key);
            return true;
        }
        if (now() > as.t_key_reveal + ttl()) {
            calls::withdraw_storage(w, p_kp.vk, as_id);
            return true;
        }
        return false;
    }

    bool patient_step_policy() {
        if (!stage("policy")) return false;
        if (!p_phase_one) {
            // wait for the insurer's listing so the price is public
            if (!st().registry.costliest_policy.count(ic_id)) return false;
            calls::buy_policy_phase_one(w, p_kp.vk, ic_id, terms_hash, P.policy_price);
            p_phase_one = true;
            return true;
        }
        auto it = st().insurance.pending.find({p_kp.vk, ic_id});
        if (it != st().insurance.pending.end() && now() > it->second.t1 + ttl()) {
            calls::withdraw_locked_policy_buying_money(w, p_kp.vk, ic_id);
            return true;
        }
        return false;
    }

    bool patient_step_claim() {
        if (!stage("claim")) return false;
        if (!p_claimed) {
            if (st().insurance.policies.empty() || as_id == 0) return false;
            const auto& as = st().storage.applications.at(as_id);
            if (as.t_approval == 0) return false;
            EntityId po_id = st().insurance.policies.begin()->first;
            auto r = calls::claim_money(w, p_kp.vk, po_id, eb_id, as_id, P.claim_amount,
                                        crypto::commit_key(p_claim_key));
            if (r.ok()) {
                c_id = r.id;
                ByteWriter key_payload;
                key_payload.u64(c_id);
                key_payload.raw(p_claim_key.view());
                send_offline(p_kp, dbo_kp.vk, "claim_key", key_payload.take());
            }
            p_claimed = true;
            return true;
        }
        if (c_id == 0) return false;
        const auto& cd = st().insurance.claims.at(c_id);
        if (cd.t_locking_by_ic != 0 && !cd.k_revealed && cd.t_unlocking_by_ic == 0) {
            if (p_strat == PatientStrategy::SilentAtClaimReveal) return false;
            if (now() <= cd.t_locking_by_ic + ttl()) {
                calls::reveal_secret_key(w, p_kp.vk, c_id, p_claim_key);
                return true;
            }
            return false;
        }
        if (cd.k_revealed && cd.t_approval == 0 && now() > cd.t_reveal_key + ttl()) {
            calls::self_approve_claim(w, p_kp.vk, c_id);
            return true;
        }
        if (cd.t_locking_by_ic == 0 && !cd.compensated &&
            now() > cd.t_generating_claim + P.grace_ttl) {
            calls::compensate_from_security(w, p_kp.vk, c_id);
            return true;
        }
        return false;
    }

    bool step_patient() {
        patient_drain_inbox();
        if (patient_step_treat()) return true;
        if (patient_step_store()) return true;
        if (patient_step_policy()) return true;
        if (patient_step_claim()) return true;
        return false;
    }

    // --- insurer ----------------------------------------------------------------

    bool step_insurer() {
        for (auto& m : w.bus.receive(ic_kp.vk)) {
            if (m.kind == "enc_data") {
                ByteReader r(ByteView(m.payload.data(), m.payload.size()));
                EntityId id = r.u64();
                ic_enc_data[id] = r.raw(r.remaining());
            }
        }
        if (stage("policy")) {
            if (!ic_deposited) {
                calls::deposit_security(w, ic_kp.vk, P.security_deposit);
                ic_deposited = true;
                return true;
            }
            if (!ic_listed) {
                calls::note_policy_listed(w, ic_kp.vk, P.policy_price);
                ic_listed = true;
                return true;
            }
            auto it = st().insurance.pending.find({p_kp.vk, ic_id});
            if (it != st().insurance.pending.end() &&
                ic_strat != InsurerStrategy::NeverRespond) {
                calls::buy_policy_phase_two(w, ic_kp.vk, p_id, P.policy_price, terms_hash);
                return true;
            }
        }
        if (stage("claim")) {
            for (const auto& [cid, cd] : st().insurance.claims) {
                const auto& pd = st().insurance.policies.at(cd.po_id);
                if (pd.ic_id != ic_id) continue;
                if (ic_strat == InsurerStrategy::GhostAfterSale) continue;
                if (!ic_file_requested.count(cid)) {
                    ic_file_requested.insert(cid);
                    ByteWriter req;
                    req.u64(cid);
                    send_offline(ic_kp, dbo_kp.vk, "file_request", req.take());
                    return true;
                }
                if (ic_strat == InsurerStrategy::StealData) continue;
                if (ic_enc_data.count(cid) && cd.t_locking_by_ic == 0 && !cd.compensated) {
                    // offline checks against the anchored hash and signature
                    const Bytes& enc = ic_enc_data[cid];
                    if (!cd.dbo_sig_present) continue;
                    if (crypto::hash(enc) != cd.enc_data_hash) continue;
                    if (!crypto::verify_sig(dbo_kp.vk, cd.enc_data_hash.view(), cd.dbo_sig))
                        continue;
                    calls::lock_claimed_money(w, ic_kp.vk, cid, cd.claimed_amount);
                    return true;
                }
                if (cd.k_revealed && cd.t_approval == 0) {
                    if (ic_strat == InsurerStrategy::SilentAtApprove) continue;
                    if (now() > cd.t_reveal_key + ttl()) continue;
                    // decrypt and authenticate before paying
                    Bytes plain = crypto::sym_decrypt(cd.k, 0,
                                                      ByteView(ic_enc_data[cid].data(),
                                                               ic_enc_data[cid].size()));
                    std::vector<Bytes> chunks;
                    for (std::size_t off = 0; off < plain.size(); off += P.buffer)
                        chunks.push_back(Bytes(plain.begin() + off,
                                               plain.begin() +
                                                   std::min<std::size_t>(off + P.buffer,
                                                                         plain.size())));
                    bool authentic = !chunks.empty() &&
                                     crypto::MerkleTree::build(chunks).root() == cd.mr_file;
                    Amount amount = authentic ? (ic_strat == InsurerStrategy::PartialApprove
                                                     ? P.approve_amount
                                                     : cd.claimed_amount)
                                              : 0;
                    calls::approve_claim(w, ic_kp.vk, cid, amount);
                    return true;
                }
                if (cd.t_locking_by_ic != 0 && !cd.k_revealed && cd.t_unlocking_by_ic == 0 &&
                    now() > cd.t_locking_by_ic + ttl()) {
                    calls::withdraw_locked_claimed_money(w, ic_kp.vk, cid);
                    return true;
                }
            }
        }
        return false;
    }

    // --- database owner -----------------------------------------------------------

    Bytes dbo_aggregate() {
        if (dbo_strat == DboStrategy::WrongAggregate) {
            // leaky: per-record lines with patient identifiers
            std::string out;
            for (const auto& [ms, rec] : dbo_store) {
                out += "pid:" + std::to_string(rec.first) + " addr:" + p_kp.vk.hex() + " " +
                       extract_patient_line(rec.second) + " condition:" +
                       extract_condition(rec.second) + "\n";
            }
            return Bytes(out.begin(), out.end());
        }
        std::map<std::string, std::uint64_t> counts;
        for (const auto& [ms, rec] : dbo_store) counts[extract_condition(rec.second)]++;
        std::string out;
        for (const auto& [cond, n] : counts) out += cond + " " + std::to_string(n) + "\n";
        return Bytes(out.begin(), out.end());
    }

    bool step_dbo() {
        for (auto& m : w.bus.receive(dbo_kp.vk)) {
            if (m.kind == "stored_file") {
                auto [ref, enc] = decode_delivery(m.payload);
                dbo_deliveries[ref] = std::move(enc);
            } else if (m.kind == "claim_key") {
                ByteReader r(ByteView(m.payload.data(), m.payload.size()));
                EntityId id = r.u64();
                SymKey k;
                Bytes kb = r.raw(32);
                std::copy(kb.begin(), kb.end(), k.v.begin());
                dbo_claim_keys[id] = k;
            } else if (m.kind == "file_request") {
                ByteReader r(ByteView(m.payload.data(), m.payload.size()));
                dbo_file_requests.insert(r.u64());
            }
        }

        if (stage("store")) {
            for (const auto& [aid, as] : st().storage.applications) {
                if (as.dbo_addr != dbo_kp.vk) continue;
                if (dbo_dead_applications.count(aid)) continue;
                if (as.t_approval != 0 || as.t_complain != 0) continue;
                if (as.t_unlocking_by_p != 0 || as.t_unlocking_by_dbo != 0) continue;
                if (as.t_verification_mr == 0) {
                    if (dbo_strat == DboStrategy::SilentAtStorageVerify) continue;
                    if (!dbo_deliveries.count(as.ms_id)) continue;
                    if (now() > as.t_application + ttl()) continue;
                    const auto& enc = dbo_deliveries.at(as.ms_id);
                    Digest computed_m2 = fairswap::merkle_root_of_elements(enc.cipher_elements);
                    const auto& ms = st().treatment.multi_sigs.at(as.ms_id);
                    auto r = calls::dbo_verify_roots(w, dbo_kp.vk, aid, ms.mr_med_data,
                                                     computed_m2);
                    if (!r.ok()) dbo_dead_applications.insert(aid);  // refuse storage
                    return true;
                }
                if (as.key_revealed) {
                    if (dbo_strat == DboStrategy::SilentAtStorageResolve) continue;
                    const auto& enc = dbo_deliveries.at(as.ms_id);
                    auto out = fairswap::decode_and_check(enc, as.key, as.mr_file);
                    if (out.file) {
                        calls::dbo_approve(w, dbo_kp.vk, aid);
                        dbo_store[as.ms_id] = {as.p_id, *out.file};
                    } else if (out.complaint) {
                        calls::dbo_complain(w, dbo_kp.vk, aid, *out.complaint);
                    }
                    return true;
                }
                if (as.t_verification_mr != 0 && !as.key_revealed &&
                    now() > as.t_verification_mr + ttl()) {
                    calls::withdraw_storage(w, dbo_kp.vk, aid);
                    return true;
                }
            }
        }

        if (stage("claim")) {
            for (EntityId cid : dbo_file_requests) {
                if (dbo_claims_done.count(cid)) continue;
                if (!dbo_claim_keys.count(cid)) continue;
                auto it = st().insurance.claims.find(cid);
                if (it == st().insurance.claims.end()) continue;
                const auto& cd = it->second;
                if (cd.dbo_sig_present || cd.key_expired_at_dbo) continue;
                const SymKey& k = dbo_claim_keys.at(cid);
                if (!crypto::check_commitment(k, cd.comm_k)) continue;
                const auto& as = st().storage.applications.at(cd.as_id);
                const auto& pd = st().insurance.policies.at(cd.po_id);
                auto ic_addr = registry::addr_of(st(), EntityKind::InsuranceCo, pd.ic_id);
                if (!ic_addr || !registry::has_access(st(), pd.buyer_id, *ic_addr,
                                                      AccessCategory::MedicalExpenditure))
                    continue;
                if (!dbo_store.count(as.ms_id)) continue;
                const Bytes& file = dbo_store.at(as.ms_id).second;
                Bytes enc_data = crypto::sym_encrypt(k, 0, ByteView(file.data(), file.size()));
                Digest h = crypto::hash(enc_data);
                dbo_claims_done.insert(cid);
                calls::keep_sig_on_hash_of_enc_file(w, dbo_kp.vk, cid, h,
                                                    crypto::sign(dbo_kp, h.view()));
                send_offline(dbo_kp, *ic_addr, "enc_data", encode_keyed(cid, enc_data));
                return true;
            }
        }

        if (stage("research")) {
            for (const auto& [rid, rq] : st().research.requests) {
                if (rq.dbo_id != dbo_id || rq.responded || dbo_research_done.count(rid))
                    continue;
                if (dbo_strat == DboStrategy::SilentAtResearch) continue;
                Bytes dataset = dbo_aggregate();
                Digest h = crypto::hash(dataset);
                dbo_research_done.insert(rid);
                calls::provide_data_for_research(w, dbo_kp.vk, rid, h,
                                                 crypto::sign(dbo_kp, h.view()));
                research_deliveries.push_back(dataset);
                send_offline(dbo_kp, rc_kp.vk, "dataset", encode_keyed(rid, dataset));
                return true;
            }
        }
        return false;
    }

    // --- research community ---------------------------------------------------------

    bool step_rc() {
        for (auto& m : w.bus.receive(rc_kp.vk)) {
            if (m.kind == "dataset") {
                ByteReader r(ByteView(m.payload.data(), m.payload.size()));
                EntityId id = r.u64();
                if (rc_requested && id == rd_id) rc_dataset = r.raw(r.remaining());
            }
        }
        if (!stage("research")) return false;
        if (!rc_requested) {
            if (stage("store")) {
                bool any_stored = false;
                for (const auto& [aid, as] : st().storage.applications)
                    if (as.t_approval != 0) any_stored = true;
                if (!any_stored) return false;
            }
            rd_id = calls::request_data_for_research(w, rc_kp.vk, dbo_id,
                                                     crypto::hash(to_bytes("condition-counts")))
                        .id;
            rc_requested = true;
            return true;
        }
        if (!rc_checked && rc_dataset) {
            const auto& rq = st().research.requests.at(rd_id);
            if (!rq.responded) return false;
            bool ok = research::rc_verify_delivery(st(), rd_id,
                                                   ByteView(rc_dataset->data(),
                                                            rc_dataset->size()));
            flags["rc_verified"] = ok ? 1 : 0;
            rc_checked = true;
            return true;
        }
        return false;
    }

    // --- main loop and report -----------------------------------------------------

    void run_loop() {
        Tick quiet_window = ttl() + P.grace_ttl + 8;
        Tick quiet = 0;
        while (now() < P.max_ticks) {
            bool any = false;
            if (step_hospital()) any = true;
            if (step_patient()) any = true;
            if (step_insurer()) any = true;
            if (step_dbo()) any = true;
            if (step_rc()) any = true;
            if (any) {
                quiet = 0;
                continue;
            }
            w.idle_tick();
            if (++quiet > quiet_window) break;
        }
    }

    void scan_privacy() {
        std::vector<std::string> needles = {patient_name, patient_mob, patient_home};
        auto count_hits = [&](const std::string& hay) {
            std::int64_t hits = 0;
            for (const auto& n : needles)
                if (hay.find(n) != std::string::npos) ++hits;
            return hits;
        };

        std::int64_t chain_hits = 0;
        Bytes blob = st().serialize();
        chain_hits += count_hits(std::string(blob.begin(), blob.end()));
        for (const auto& rec : w.ledger.log()) {
            for (const auto& ev : rec.events) {
                chain_hits += count_hits(ev.name);
                for (const auto& [k, v] : ev.attrs) chain_hits += count_hits(k) + count_hits(v);
            }
        }
        flags["privacy_chain_hits"] = chain_hits;

        std::int64_t delivery_hits = 0;
        std::vector<std::string> delivery_needles = needles;
        delivery_needles.push_back(p_kp.vk.hex());
        delivery_needles.push_back("pid");
        for (const auto& d : research_deliveries) {
            std::string hay(d.begin(), d.end());
            for (const auto& n : delivery_needles)
                if (hay.find(n) != std::string::npos) ++delivery_hits;
        }
        flags["privacy_delivery_hits"] = delivery_hits;
    }

    void collect_flags() {
        flags["file_delivered"] =
            (!p_received_file.empty() && p_received_file == h_file) ? 1 : 0;
        flags["dbo_accepted"] = static_cast<std::int64_t>(dbo_store.size());

        // storage soundness: every accepted file re-hashes to the case's M1
        bool sound = true;
        for (const auto& [ms_id, rec] : dbo_store) {
            const auto& ms = st().treatment.multi_sigs.at(ms_id);
            std::vector<Bytes> chunks;
            const Bytes& f = rec.second;
            for (std::size_t off = 0; off < f.size(); off += P.buffer) {
                Bytes chunk(P.buffer, 0x00);
                std::size_t take = std::min<std::size_t>(P.buffer, f.size() - off);
                std::copy(f.begin() + off, f.begin() + off + take, chunk.begin());
                chunks.push_back(std::move(chunk));
            }
            while (chunks.size() < ms.props.leaf_count()) chunks.push_back(Bytes(P.buffer, 0));
            if (crypto::MerkleTree::build(chunks).root() != ms.mr_med_data) sound = false;
        }
        flags["storage_sound"] = sound ? 1 : 0;

        Amount live = 0;
        for (const auto& [id, e] : st().escrows)
            if (e.live) live += e.amount;
        flags["live_escrows"] = static_cast<std::int64_t>(live);

        if (eb_id != 0) {
            texts["case_phase"] = case_phase_name(st().treatment.estimates.at(eb_id).phase);
        }
        if (c_id != 0) {
            const auto& cd = st().insurance.claims.at(c_id);
            flags["claim_approved_amount"] = static_cast<std::int64_t>(cd.approved_amount);
            flags["claim_self_approved"] = cd.self_approved ? 1 : 0;
        }
        if (eb_id != 0 && !flags.count("file_size") &&
            st().treatment.estimates.at(eb_id).ms_id != 0) {
            const auto& ms =
                st().treatment.multi_sigs.at(st().treatment.estimates.at(eb_id).ms_id);
            flags["file_size"] = static_cast<std::int64_t>(ms.props.file_size);
        }

        // a stealing insurer must hold nothing it can open
        if (ic_strat == InsurerStrategy::StealData && c_id != 0 && ic_enc_data.count(c_id)) {
            const Bytes& enc = ic_enc_data.at(c_id);
            bool opened = false;
            for (const char* guess : {"zero-key", "insurer-key", "public"}) {
                SymKey k = SymKey::from_digest(crypto::hash(to_bytes(guess)));
                Bytes plain = crypto::sym_decrypt(k, 0, ByteView(enc.data(), enc.size()));
                std::vector<Bytes> chunks;
                for (std::size_t off = 0; off < plain.size(); off += P.buffer)
                    chunks.push_back(Bytes(plain.begin() + off,
                                           plain.begin() + std::min<std::size_t>(off + P.buffer,
                                                                                 plain.size())));
                if (!chunks.empty() &&
                    crypto::MerkleTree::build(chunks).root() ==
                        st().insurance.claims.at(c_id).mr_file)
                    opened = true;
            }
            flags["stolen_data_unreadable"] = opened ? 0 : 1;
        }
    }

    Amount wealth(const std::string& role) const {
        auto bal = [&](const Address& a) {
            auto it = st().balances.find(a);
            return it == st().balances.end() ? 0 : it->second;
        };
        if (role == "patient") return bal(p_kp.vk);
        if (role == "hospital") return bal(h_kp.vk);
        if (role == "insurer") {
            Amount security = st().registry.security_locked.count(ic_id)
                                  ? st().registry.security_locked.at(ic_id)
                                  : 0;
            return bal(ic_kp.vk) + security;
        }
        if (role == "dbo") return bal(dbo_kp.vk);
        if (role == "rc") return bal(rc_kp.vk);
        return 0;
    }

    RunReport build_report() {
        RunReport r;
        r.scenario_name = sc.name;
        r.seed = sc.seed;
        r.params = P;
        r.strategies = {{"patient", sc.patient_strategy},
                        {"hospital", sc.hospital_strategy},
                        {"insurer", sc.insurer_strategy},
                        {"dbo", sc.dbo_strategy}};
        r.stages.assign(sc.stages.begin(), sc.stages.end());
        r.endowment_total = st().total_endowment;
        for (const char* role : {"patient", "hospital", "insurer", "dbo", "rc"}) {
            r.initial_wealth[role] = P.endowment;
            r.final_wealth[role] = wealth(role);
        }
        r.final_balances = {{"patient", wealth("patient")},
                            {"hospital", wealth("hospital")},
                            {"insurer", st().balances.count(ic_kp.vk)
                                            ? st().balances.at(ic_kp.vk)
                                            : 0},
                            {"dbo", wealth("dbo")},
                            {"rc", wealth("rc")}};
        r.events = w.ledger.log();
        r.conservation_ok = true;
        for (const auto& rec : r.events) {
            r.conservation_by_tick.push_back(rec.conservation_total);
            if (rec.conservation_total != r.endowment_total) r.conservation_ok = false;
        }
        r.offline = offline_log;
        for (const auto& rec : r.events) {
            auto& stats = r.op_counts[rec.contract + "." + rec.function];
            stats.calls += 1;
            stats.ops += rec.op_count;
        }
        for (const auto& [key, rec] : st().records)
            r.record_digests[key] = crypto::hash(rec.value).hex();
        r.state_digest = w.ledger.state_digest().hex();
        r.flags = flags;
        return r;
    }
};

}  // namespace

RunOutcome run_scenario(const Scenario& sc) {
    auto runner = std::make_unique<Runner>(sc);
    runner->setup();
    runner->run_loop();
    runner->scan_privacy();
    runner->collect_flags();

    RunOutcome out;
    out.report = runner->build_report();
    out.sensitive_strings = {runner->patient_name, runner->patient_mob, runner->patient_home};
    out.research_deliveries = runner->research_deliveries;
    for (const auto& [ms_id, rec] : runner->dbo_store) {
        const auto& ms = runner->st().treatment.multi_sigs.at(ms_id);
        out.dbo_store_export[ms.mr_med_data.hex()] = rec.second;
    }
    out.world = std::make_unique<World>(std::move(runner->w));
    // texts ride along in the report for phase assertions
    for (const auto& [k, v] : runner->texts) out.report.texts[k] = v;
    return out;
}

}  // namespace medchain::harness
