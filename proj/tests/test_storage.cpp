#include "doctest.h"
#include "fixtures.hpp"

using namespace medchain;
using namespace medchain::test;

namespace {

Amount bal(const Cast& c, const Address& a) { return c.w.state().balances.at(a); }

}  // namespace

TEST_CASE("honest store: roots verified, key revealed, fee settles to the dbo") {
    Cast c = make_cast();
    TreatRun t = drive_treatment(c, TreatStep::Settled, 100, 80);
    Amount p0 = bal(c, c.patient.vk);
    Amount d0 = bal(c, c.dbo.vk);

    EntityId as_id = calls::apply_for_storing(c.w, c.patient.vk, c.dbo_id, t.ms_id, 10).id;
    const auto& ms = c.w.state().treatment.multi_sigs.at(t.ms_id);
    CHECK(calls::dbo_verify_roots(c.w, c.dbo.vk, as_id, ms.mr_med_data, ms.mr_enc_circuit).ok());
    CHECK(calls::storage_key_reveal(c.w, c.patient.vk, as_id, t.file.key).ok());

    // the dbo decodes the offline delivery and lands the plaintext
    auto out = fairswap::decode_and_check(t.file.enc.encrypted, t.file.key, ms.mr_med_data);
    REQUIRE(out.file.has_value());
    std::vector<Bytes> chunks;
    for (std::size_t off = 0; off < out.file->size(); off += 32)
        chunks.push_back(Bytes(out.file->begin() + off,
                               out.file->begin() + std::min(off + 32, out.file->size())));
    CHECK(crypto::MerkleTree::build(chunks).root() == ms.mr_med_data);

    CHECK(calls::dbo_approve(c.w, c.dbo.vk, as_id).ok());
    CHECK(bal(c, c.patient.vk) == p0 - 10);
    CHECK(bal(c, c.dbo.vk) == d0 + 10);
    CHECK(c.w.state().storage.applications.at(as_id).t_approval != 0);
}

TEST_CASE("only the file owner can apply, and only once per case and dbo") {
    Cast c = make_cast();
    TreatRun t = drive_treatment(c, TreatStep::Settled);
    auto thief = calls::apply_for_storing(c.w, c.hospital.vk, c.dbo_id, t.ms_id, 10);
    CHECK_FALSE(thief.ok());
    CHECK(thief.reason() == "not file owner");

    CHECK(calls::apply_for_storing(c.w, c.patient.vk, c.dbo_id, t.ms_id, 10).ok());
    auto dup = calls::apply_for_storing(c.w, c.patient.vk, c.dbo_id, t.ms_id, 10);
    CHECK_FALSE(dup.ok());
    CHECK(dup.reason() == "already applied");
}

TEST_CASE("a doctored offline delivery fails the root check and the fee unwinds") {
    Cast c = make_cast();
    TreatRun t = drive_treatment(c, TreatStep::Settled);
    Amount p0 = bal(c, c.patient.vk);
    EntityId as_id = calls::apply_for_storing(c.w, c.patient.vk, c.dbo_id, t.ms_id, 10).id;

    // patient sent a tampered encoding; the dbo recomputes different roots
    auto tampered = t.file.enc.encrypted;
    tampered.cipher_elements[1][0] ^= 0x01;
    Digest recomputed = fairswap::merkle_root_of_elements(tampered.cipher_elements);
    auto r = calls::dbo_verify_roots(c.w, c.dbo.vk, as_id,
                                     c.w.state().treatment.multi_sigs.at(t.ms_id).mr_med_data,
                                     recomputed);
    CHECK_FALSE(r.ok());
    CHECK(r.reason() == "root mismatch");

    // the dbo aborts; after the deadline the patient reclaims the fee
    lapse(c.w, c.w.state().storage.applications.at(as_id).t_application);
    CHECK(calls::withdraw_storage(c.w, c.patient.vk, as_id).ok());
    CHECK(bal(c, c.patient.vk) == p0);
}

TEST_CASE("late verification lets the patient reclaim the fee") {
    Cast c = make_cast();
    TreatRun t = drive_treatment(c, TreatStep::Settled);
    Amount p0 = bal(c, c.patient.vk);
    EntityId as_id = calls::apply_for_storing(c.w, c.patient.vk, c.dbo_id, t.ms_id, 10).id;
    lapse(c.w, c.w.state().storage.applications.at(as_id).t_application);

    const auto& ms = c.w.state().treatment.multi_sigs.at(t.ms_id);
    auto late = calls::dbo_verify_roots(c.w, c.dbo.vk, as_id, ms.mr_med_data, ms.mr_enc_circuit);
    CHECK_FALSE(late.ok());
    CHECK(late.reason() == "expired");

    CHECK(calls::withdraw_storage(c.w, c.patient.vk, as_id).ok());
    CHECK(bal(c, c.patient.vk) == p0);
    auto again = calls::withdraw_storage(c.w, c.patient.vk, as_id);
    CHECK_FALSE(again.ok());
    CHECK(again.reason() == "already resolved");
}

TEST_CASE("storage key reveal must match the case commitment") {
    Cast c = make_cast();
    TreatRun t = drive_treatment(c, TreatStep::Settled);
    EntityId as_id = calls::apply_for_storing(c.w, c.patient.vk, c.dbo_id, t.ms_id, 10).id;
    const auto& ms = c.w.state().treatment.multi_sigs.at(t.ms_id);
    calls::dbo_verify_roots(c.w, c.dbo.vk, as_id, ms.mr_med_data, ms.mr_enc_circuit);
    SymKey wrong = SymKey::from_digest(crypto::hash(to_bytes("wrong")));
    auto r = calls::storage_key_reveal(c.w, c.patient.vk, as_id, wrong);
    CHECK_FALSE(r.ok());
    CHECK(r.reason() == "key mismatch");
}

TEST_CASE("colluding parties storing a garbled encoding lose to the dbo complaint") {
    Cast c = make_cast();
    // hospital commits a tampered set and the patient consents anyway
    EntityId eb = calls::generate_estimated_cost_bill(c.w, c.hospital.vk, c.p_id, 100).id;
    calls::lock_estimated_amount(c.w, c.patient.vk, c.h_id, eb, 100);
    calls::start_treatment(c.w, c.hospital.vk, eb);
    Tick date = c.w.state().treatment.estimates.at(eb).t_checkup_start;

    Bytes file = crypto::expand_stream(crypto::hash(to_bytes("spurious")), 128);
    SymKey key = SymKey::from_digest(crypto::hash(to_bytes("spurious-key")));
    auto enc = fairswap::encode(ByteView(file.data(), file.size()), 32, key);
    enc.encrypted.cipher_elements[4][0] ^= 0x01;
    Digest bad_m2 = fairswap::merkle_root_of_elements(enc.encrypted.cipher_elements);

    treatment::FileCommitment cm;
    cm.m1 = enc.m1;
    cm.m2 = bad_m2;
    cm.h_x = treatment::concat_hash(c.p_id, date, bad_m2);
    cm.sig_m1 = crypto::sign(c.hospital, cm.m1.view());
    cm.sig_hx = crypto::sign(c.hospital, cm.h_x.view());
    cm.key_commitment = crypto::commit_key(key);
    cm.props = enc.props;
    EntityId ms_id = calls::keep_signed_hash_to_blockchain(c.w, c.hospital.vk, eb, cm).id;
    calls::verify_and_give_consent(c.w, c.patient.vk, ms_id, cm.h_x);
    EntityId fb = calls::discharge_and_generate_final_cost_bill(c.w, c.hospital.vk, eb, 80).id;
    calls::consent_final_bill_patient(c.w, c.patient.vk, fb);
    calls::key_reveal(c.w, c.hospital.vk, eb, key);
    calls::patient_final_consent(c.w, c.patient.vk, eb);  // colluding consent

    Amount d0 = bal(c, c.dbo.vk);
    Amount p_before_store = bal(c, c.patient.vk);
    EntityId as_id = calls::apply_for_storing(c.w, c.patient.vk, c.dbo_id, ms_id, 10).id;
    calls::dbo_verify_roots(c.w, c.dbo.vk, as_id, cm.m1, bad_m2);
    calls::storage_key_reveal(c.w, c.patient.vk, as_id, key);

    auto out = fairswap::decode_and_check(enc.encrypted, key, cm.m1);
    REQUIRE(out.complaint.has_value());
    auto verdict = calls::dbo_complain(c.w, c.dbo.vk, as_id, *out.complaint);
    REQUIRE(verdict.ok());
    CHECK(verdict.verdict);
    // the patient forfeited the fee, the file was rejected
    CHECK(bal(c, c.dbo.vk) == d0 + 10);
    CHECK(bal(c, c.patient.vk) == p_before_store - 10);
    CHECK(c.w.state().storage.applications.at(as_id).t_complain != 0);
    CHECK(c.w.state().storage.applications.at(as_id).t_approval == 0);
}

TEST_CASE("a false dbo complaint forfeits the fee and forces approval") {
    Cast c = make_cast();
    TreatRun t = drive_treatment(c, TreatStep::Settled);
    Amount p0 = bal(c, c.patient.vk);
    Amount d0 = bal(c, c.dbo.vk);
    EntityId as_id = calls::apply_for_storing(c.w, c.patient.vk, c.dbo_id, t.ms_id, 10).id;
    const auto& ms = c.w.state().treatment.multi_sigs.at(t.ms_id);
    calls::dbo_verify_roots(c.w, c.dbo.vk, as_id, ms.mr_med_data, ms.mr_enc_circuit);
    calls::storage_key_reveal(c.w, c.patient.vk, as_id, t.file.key);

    crypto::MerkleTree m2_tree = crypto::MerkleTree::build(t.file.enc.encrypted.cipher_elements);
    fairswap::Circuit geom(t.file.enc.props);
    fairswap::Complaint fake;
    fake.kind = fairswap::Complaint::Kind::Gate;
    fake.gate_index = t.file.enc.props.leaf_count() + 1;
    auto [cl, cr] = geom.children(fake.gate_index);
    for (std::uint64_t idx : {cl, cr, fake.gate_index}) {
        fake.encoded_vectors.push_back(t.file.enc.encrypted.cipher_elements[idx]);
        fake.proofs.push_back(m2_tree.prove(idx));
    }
    auto verdict = calls::dbo_complain(c.w, c.dbo.vk, as_id, fake);
    REQUIRE(verdict.ok());
    CHECK_FALSE(verdict.verdict);
    CHECK(bal(c, c.patient.vk) == p0);          // fee denied to the dbo
    CHECK(bal(c, c.dbo.vk) == d0);
    CHECK(c.w.state().storage.applications.at(as_id).t_approval != 0);  // approval forced
}

TEST_CASE("silent dbo after key reveal: patient reclaims the fee") {
    Cast c = make_cast();
    TreatRun t = drive_treatment(c, TreatStep::Settled);
    Amount p0 = bal(c, c.patient.vk);
    EntityId as_id = calls::apply_for_storing(c.w, c.patient.vk, c.dbo_id, t.ms_id, 10).id;
    const auto& ms = c.w.state().treatment.multi_sigs.at(t.ms_id);
    calls::dbo_verify_roots(c.w, c.dbo.vk, as_id, ms.mr_med_data, ms.mr_enc_circuit);
    calls::storage_key_reveal(c.w, c.patient.vk, as_id, t.file.key);

    lapse(c.w, c.w.state().storage.applications.at(as_id).t_key_reveal);
    auto late_approve = calls::dbo_approve(c.w, c.dbo.vk, as_id);
    CHECK_FALSE(late_approve.ok());
    CHECK(late_approve.reason() == "expired");
    CHECK(calls::withdraw_storage(c.w, c.patient.vk, as_id).ok());
    CHECK(bal(c, c.patient.vk) == p0);
}

TEST_CASE("fee settles exactly once per application") {
    Cast c = make_cast();
    TreatRun t = drive_treatment(c, TreatStep::Settled);
    EntityId as_id = drive_storage(c, t);
    auto again = calls::dbo_approve(c.w, c.dbo.vk, as_id);
    CHECK_FALSE(again.ok());
    CHECK(again.reason() == "already resolved");
    auto wd = calls::withdraw_storage(c.w, c.patient.vk, as_id);
    CHECK_FALSE(wd.ok());
    CHECK(wd.reason() == "already resolved");
    CHECK(c.w.ledger.circulating_total() == c.w.state().total_endowment);
}
