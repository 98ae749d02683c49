#include <random>

#include "doctest.h"
#include "fixtures.hpp"

using namespace medchain;
using namespace medchain::test;

namespace {

Amount bal(const Cast& c, const Address& a) { return c.w.state().balances.at(a); }

Digest terms_hash() { return crypto::hash(to_bytes("policy terms and conditions v1")); }

struct ClaimSetup {
    TreatRun treat;
    EntityId as_id = 0;
    EntityId po_id = 0;
    EntityId c_id = 0;
    SymKey k;
};

/// Full pipeline to a generated claim (treatment settled, file stored, policy
/// bought, claim lodged with the key sent to the DBO offline).
ClaimSetup make_claim(Cast& c, Amount claimed = 40, Amount price = 50) {
    ClaimSetup s;
    s.treat = drive_treatment(c, TreatStep::Settled, 100, 80);
    s.as_id = drive_storage(c, s.treat);
    s.po_id = drive_policy(c, price);
    s.k = SymKey::from_digest(crypto::hash(to_bytes("claim-key")));
    s.c_id = calls::claim_money(c.w, c.patient.vk, s.po_id, s.treat.eb_id, s.as_id, claimed,
                                crypto::commit_key(s.k))
                 .id;
    return s;
}

/// DBO-side claim processing: encrypt the stored file under the buyer's key
/// and anchor the signature on chain.
Bytes dbo_process(Cast& c, ClaimSetup& s) {
    Bytes enc_data = crypto::sym_encrypt(s.k, 0,
                                         ByteView(s.treat.file_bytes.data(),
                                                  s.treat.file_bytes.size()));
    Digest h = crypto::hash(enc_data);
    calls::keep_sig_on_hash_of_enc_file(c.w, c.dbo.vk, s.c_id, h,
                                        crypto::sign(c.dbo, h.view()));
    return enc_data;
}

}  // namespace

TEST_CASE("policy sale: matching hashes and price issue a policy and pay the insurer") {
    Cast c = make_cast();
    Amount i0 = bal(c, c.insurer.vk);
    Amount p0 = bal(c, c.patient.vk);
    EntityId po = drive_policy(c, 50, 100);
    CHECK(po == 1);
    // the insurer paid 100 into the security vault and received the 50 price
    CHECK(bal(c, c.insurer.vk) == i0 - 100 + 50);
    CHECK(bal(c, c.patient.vk) == p0 - 50);
    CHECK(c.w.state().insurance.policies.at(po).terms_hash == terms_hash());
    CHECK(c.w.state().insurance.pending.empty());
}

TEST_CASE("second phase-one before resolution is refused") {
    Cast c = make_cast();
    calls::buy_policy_phase_one(c.w, c.patient.vk, c.ic_id, terms_hash(), 50);
    auto r = calls::buy_policy_phase_one(c.w, c.patient.vk, c.ic_id, terms_hash(), 50);
    CHECK_FALSE(r.ok());
    CHECK(r.reason() == "duplicate pending");
}

TEST_CASE("unregistered buyer cannot open a purchase") {
    Cast c = make_cast();
    auto rogue = kp("unregistered");
    c.w.ledger.state().balances[rogue.vk] = 100;
    auto r = calls::buy_policy_phase_one(c.w, rogue.vk, c.ic_id, terms_hash(), 50);
    CHECK_FALSE(r.ok());
}

TEST_CASE("insurer quoting different terms cannot close; buyer withdraws") {
    Cast c = make_cast();
    Amount p0 = bal(c, c.patient.vk);
    calls::deposit_security(c.w, c.insurer.vk, 100);
    calls::buy_policy_phase_one(c.w, c.patient.vk, c.ic_id, terms_hash(), 50);

    auto bad_hash = calls::buy_policy_phase_two(c.w, c.insurer.vk, c.p_id, 50,
                                                crypto::hash(to_bytes("other terms")));
    CHECK_FALSE(bad_hash.ok());
    CHECK(bad_hash.reason() == "hash mismatch");

    auto bad_price = calls::buy_policy_phase_two(c.w, c.insurer.vk, c.p_id, 49, terms_hash());
    CHECK_FALSE(bad_price.ok());
    CHECK(bad_price.reason() == "price mismatch");

    auto early = calls::withdraw_locked_policy_buying_money(c.w, c.patient.vk, c.ic_id);
    CHECK_FALSE(early.ok());
    CHECK(early.reason() == "not yet expired");

    lapse(c.w, c.w.state().insurance.pending.at({c.patient.vk, c.ic_id}).t1);
    auto wd = calls::withdraw_locked_policy_buying_money(c.w, c.patient.vk, c.ic_id);
    CHECK(wd.ok());
    CHECK(bal(c, c.patient.vk) == p0);

    auto again = calls::withdraw_locked_policy_buying_money(c.w, c.patient.vk, c.ic_id);
    CHECK_FALSE(again.ok());
    CHECK(again.reason() == "no pending");
}

TEST_CASE("phase two past the deadline is expired") {
    Cast c = make_cast();
    calls::deposit_security(c.w, c.insurer.vk, 100);
    calls::buy_policy_phase_one(c.w, c.patient.vk, c.ic_id, terms_hash(), 50);
    lapse(c.w, c.w.state().insurance.pending.at({c.patient.vk, c.ic_id}).t1);
    auto r = calls::buy_policy_phase_two(c.w, c.insurer.vk, c.p_id, 50, terms_hash());
    CHECK_FALSE(r.ok());
    CHECK(r.reason() == "expired");
}

TEST_CASE("quoting a price above the security money deregisters the insurer") {
    Cast c = make_cast();
    Amount p0 = bal(c, c.patient.vk);
    calls::deposit_security(c.w, c.insurer.vk, 40);
    calls::buy_policy_phase_one(c.w, c.patient.vk, c.ic_id, terms_hash(), 50);
    auto r = calls::buy_policy_phase_two(c.w, c.insurer.vk, c.p_id, 50, terms_hash());
    CHECK(r.ok());  // the transaction commits: deregistration plus refund
    CHECK(r.id == 0);
    CHECK(registry::is_deregistered(c.w.state(), c.ic_id));
    CHECK(bal(c, c.patient.vk) == p0);

    // a deregistered insurer cannot act any more
    auto blocked = calls::buy_policy_phase_two(c.w, c.insurer.vk, c.p_id, 10, terms_hash());
    CHECK_FALSE(blocked.ok());
    CHECK(blocked.reason() == "insurer deregistered");
    auto blocked2 = calls::deposit_security(c.w, c.insurer.vk, 10);
    CHECK_FALSE(blocked2.ok());
}

TEST_CASE("claim guards: identity, storage, bound, duplicate") {
    Cast c = make_cast();
    ClaimSetup s = make_claim(c, 40);
    CHECK(s.c_id == 1);

    SUBCASE("claim over the final cost is refused") {
        auto r = calls::claim_money(c.w, c.patient.vk, s.po_id, s.treat.eb_id, s.as_id, 81,
                                    crypto::commit_key(s.k));
        CHECK_FALSE(r.ok());
        CHECK(r.reason() == "over claim");
    }
    SUBCASE("claim on the same bill twice is refused") {
        auto r = calls::claim_money(c.w, c.patient.vk, s.po_id, s.treat.eb_id, s.as_id, 80,
                                    crypto::commit_key(s.k));
        CHECK_FALSE(r.ok());
        CHECK(r.reason() == "duplicate claim");
    }
    SUBCASE("someone else cannot claim on the patient's policy") {
        auto r = calls::claim_money(c.w, c.hospital.vk, s.po_id, s.treat.eb_id, s.as_id, 10,
                                    crypto::commit_key(s.k));
        CHECK_FALSE(r.ok());
        CHECK(r.reason() == "identity mismatch");
    }
    SUBCASE("the claim auto-grants expenditure access to the insurer") {
        CHECK(registry::has_access(c.w.state(), c.p_id, c.insurer.vk,
                                   AccessCategory::MedicalExpenditure));
    }
}

TEST_CASE("claim without an approved storage application is refused") {
    Cast c = make_cast();
    TreatRun t = drive_treatment(c, TreatStep::Settled, 100, 80);
    EntityId as_id = calls::apply_for_storing(c.w, c.patient.vk, c.dbo_id, t.ms_id, 10).id;
    EntityId po_id = drive_policy(c);
    SymKey k = SymKey::from_digest(crypto::hash(to_bytes("k")));
    auto r = calls::claim_money(c.w, c.patient.vk, po_id, t.eb_id, as_id, 40,
                                crypto::commit_key(k));
    CHECK_FALSE(r.ok());
    CHECK(r.reason() == "not stored");
}

TEST_CASE("claim at the boundary amount equal to the final cost is accepted") {
    Cast c = make_cast();
    ClaimSetup s;
    s.treat = drive_treatment(c, TreatStep::Settled, 100, 80);
    s.as_id = drive_storage(c, s.treat);
    s.po_id = drive_policy(c);
    s.k = SymKey::from_digest(crypto::hash(to_bytes("ck")));
    auto r = calls::claim_money(c.w, c.patient.vk, s.po_id, s.treat.eb_id, s.as_id, 80,
                                crypto::commit_key(s.k));
    CHECK(r.ok());
}

TEST_CASE("dbo processing requires the grant and anchors its signature") {
    Cast c = make_cast();
    ClaimSetup s = make_claim(c);

    SUBCASE("revoked grant blocks the handoff") {
        calls::revoke_access(c.w, c.patient.vk, c.p_id, c.insurer.vk,
                             AccessCategory::MedicalExpenditure);
        Digest h = crypto::hash(to_bytes("enc"));
        auto r = calls::keep_sig_on_hash_of_enc_file(c.w, c.dbo.vk, s.c_id, h,
                                                     crypto::sign(c.dbo, h.view()));
        CHECK_FALSE(r.ok());
        CHECK(r.reason() == "no grant");
    }
    SUBCASE("honest processing marks the key expired") {
        dbo_process(c, s);
        const auto& cd = c.w.state().insurance.claims.at(s.c_id);
        CHECK(cd.dbo_sig_present);
        CHECK(cd.key_expired_at_dbo);
        Digest h2 = crypto::hash(to_bytes("again"));
        auto again = calls::keep_sig_on_hash_of_enc_file(c.w, c.dbo.vk, s.c_id, h2,
                                                         crypto::sign(c.dbo, h2.view()));
        CHECK_FALSE(again.ok());
        CHECK(again.reason() == "already processed");
    }
    SUBCASE("only the application's dbo can anchor") {
        Digest h = crypto::hash(to_bytes("enc"));
        auto r = calls::keep_sig_on_hash_of_enc_file(c.w, c.insurer.vk, s.c_id, h,
                                                     crypto::sign(c.insurer, h.view()));
        CHECK_FALSE(r.ok());
        CHECK(r.reason() == "caller mismatch");
    }
}

TEST_CASE("lock must match the claimed amount exactly") {
    Cast c = make_cast();
    ClaimSetup s = make_claim(c, 40);
    dbo_process(c, s);
    auto low = calls::lock_claimed_money(c.w, c.insurer.vk, s.c_id, 39);
    CHECK_FALSE(low.ok());
    CHECK(low.reason() == "wrong value");
    auto other = calls::lock_claimed_money(c.w, c.patient.vk, s.c_id, 40);
    CHECK_FALSE(other.ok());
    CHECK(other.reason() == "caller mismatch");
    auto ok = calls::lock_claimed_money(c.w, c.insurer.vk, s.c_id, 40);
    CHECK(ok.ok());
}

TEST_CASE("the buyer must not reveal before the insurer locks") {
    Cast c = make_cast();
    ClaimSetup s = make_claim(c);
    dbo_process(c, s);
    auto r = calls::reveal_secret_key(c.w, c.patient.vk, s.c_id, s.k);
    CHECK_FALSE(r.ok());
    CHECK(r.reason() == "not locked");
}

TEST_CASE("reveal guards key and deadline; insurer recovers on silence") {
    Cast c = make_cast();
    ClaimSetup s = make_claim(c, 40);
    dbo_process(c, s);
    calls::lock_claimed_money(c.w, c.insurer.vk, s.c_id, 40);

    SUBCASE("wrong key") {
        SymKey wrong = SymKey::from_digest(crypto::hash(to_bytes("wrong")));
        auto r = calls::reveal_secret_key(c.w, c.patient.vk, s.c_id, wrong);
        CHECK_FALSE(r.ok());
        CHECK(r.reason() == "key mismatch");
    }
    SUBCASE("silent buyer lets the insurer withdraw, once expired") {
        Amount i0 = bal(c, c.insurer.vk);
        auto early = calls::withdraw_locked_claimed_money(c.w, c.insurer.vk, s.c_id);
        CHECK_FALSE(early.ok());
        CHECK(early.reason() == "not yet expired");
        lapse(c.w, c.w.state().insurance.claims.at(s.c_id).t_locking_by_ic);
        auto wd = calls::withdraw_locked_claimed_money(c.w, c.insurer.vk, s.c_id);
        CHECK(wd.ok());
        CHECK(bal(c, c.insurer.vk) == i0 + 40);
        auto late_reveal = calls::reveal_secret_key(c.w, c.patient.vk, s.c_id, s.k);
        CHECK_FALSE(late_reveal.ok());
        CHECK(late_reveal.reason() == "expired");
    }
    SUBCASE("after reveal the insurer cannot pull the lock back") {
        calls::reveal_secret_key(c.w, c.patient.vk, s.c_id, s.k);
        auto wd = calls::withdraw_locked_claimed_money(c.w, c.insurer.vk, s.c_id);
        CHECK_FALSE(wd.ok());
        CHECK(wd.reason() == "key was revealed");
    }
}

TEST_CASE("claimed 50 approved 30: buyer +30, insurer recovers 20") {
    Cast c = make_cast();
    ClaimSetup s = make_claim(c, 50);
    Bytes enc_data = dbo_process(c, s);
    calls::lock_claimed_money(c.w, c.insurer.vk, s.c_id, 50);
    calls::reveal_secret_key(c.w, c.patient.vk, s.c_id, s.k);

    // the insurer can actually decrypt and authenticate the file now
    const auto& cd = c.w.state().insurance.claims.at(s.c_id);
    Bytes dec = crypto::sym_decrypt(cd.k, 0, ByteView(enc_data.data(), enc_data.size()));
    CHECK(dec == s.treat.file_bytes);
    CHECK(crypto::hash(enc_data) == cd.enc_data_hash);

    Amount p0 = bal(c, c.patient.vk);
    Amount i0 = bal(c, c.insurer.vk);
    auto over = calls::approve_claim(c.w, c.insurer.vk, s.c_id, 51);
    CHECK_FALSE(over.ok());
    CHECK(over.reason() == "over approve");
    auto r = calls::approve_claim(c.w, c.insurer.vk, s.c_id, 30);
    CHECK(r.ok());
    CHECK(bal(c, c.patient.vk) == p0 + 30);
    CHECK(bal(c, c.insurer.vk) == i0 + 20);

    auto again = calls::approve_claim(c.w, c.insurer.vk, s.c_id, 30);
    CHECK_FALSE(again.ok());
    CHECK(again.reason() == "already approved");
}

TEST_CASE("approve 0 returns the full lock to the insurer") {
    Cast c = make_cast();
    ClaimSetup s = make_claim(c, 40);
    dbo_process(c, s);
    calls::lock_claimed_money(c.w, c.insurer.vk, s.c_id, 40);
    calls::reveal_secret_key(c.w, c.patient.vk, s.c_id, s.k);
    Amount i0 = bal(c, c.insurer.vk);
    Amount p0 = bal(c, c.patient.vk);
    auto r = calls::approve_claim(c.w, c.insurer.vk, s.c_id, 0);
    CHECK(r.ok());
    CHECK(bal(c, c.insurer.vk) == i0 + 40);
    CHECK(bal(c, c.patient.vk) == p0);
}

TEST_CASE("ghosting insurer: buyer self-approves the full claim") {
    Cast c = make_cast();
    ClaimSetup s = make_claim(c, 40);
    dbo_process(c, s);
    calls::lock_claimed_money(c.w, c.insurer.vk, s.c_id, 40);
    calls::reveal_secret_key(c.w, c.patient.vk, s.c_id, s.k);

    auto early = calls::self_approve_claim(c.w, c.patient.vk, s.c_id);
    CHECK_FALSE(early.ok());
    CHECK(early.reason() == "not yet expired");

    Amount p0 = bal(c, c.patient.vk);
    lapse(c.w, c.w.state().insurance.claims.at(s.c_id).t_reveal_key);
    auto r = calls::self_approve_claim(c.w, c.patient.vk, s.c_id);
    CHECK(r.ok());
    CHECK(bal(c, c.patient.vk) == p0 + 40);
    CHECK(c.w.state().insurance.claims.at(s.c_id).self_approved);

    auto late_approve = calls::approve_claim(c.w, c.insurer.vk, s.c_id, 40);
    CHECK_FALSE(late_approve.ok());
    CHECK(late_approve.reason() == "already approved");
}

TEST_CASE("insurer approval after its window lapsed is expired") {
    Cast c = make_cast();
    ClaimSetup s = make_claim(c, 40);
    dbo_process(c, s);
    calls::lock_claimed_money(c.w, c.insurer.vk, s.c_id, 40);
    calls::reveal_secret_key(c.w, c.patient.vk, s.c_id, s.k);
    lapse(c.w, c.w.state().insurance.claims.at(s.c_id).t_reveal_key);
    auto r = calls::approve_claim(c.w, c.insurer.vk, s.c_id, 40);
    CHECK_FALSE(r.ok());
    CHECK(r.reason() == "expired");
}

TEST_CASE("split settlement is exact for random amounts") {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 12; ++i) {
        Cast c = make_cast(10000);
        ClaimSetup s;
        s.treat = drive_treatment(c, TreatStep::Settled, 100, 80);
        s.as_id = drive_storage(c, s.treat);
        s.po_id = drive_policy(c);
        s.k = SymKey::from_digest(crypto::hash(to_bytes("rk")));
        Amount claimed = 1 + rng() % 80;
        s.c_id = calls::claim_money(c.w, c.patient.vk, s.po_id, s.treat.eb_id, s.as_id, claimed,
                                    crypto::commit_key(s.k))
                     .id;
        dbo_process(c, s);
        calls::lock_claimed_money(c.w, c.insurer.vk, s.c_id, claimed);
        calls::reveal_secret_key(c.w, c.patient.vk, s.c_id, s.k);
        Amount approved = rng() % (claimed + 1);
        Amount p0 = bal(c, c.patient.vk);
        Amount i0 = bal(c, c.insurer.vk);
        auto r = calls::approve_claim(c.w, c.insurer.vk, s.c_id, approved);
        REQUIRE(r.ok());
        CHECK(bal(c, c.patient.vk) == p0 + approved);
        CHECK(bal(c, c.insurer.vk) == i0 + (claimed - approved));
        CHECK(c.w.ledger.circulating_total() == c.w.state().total_endowment);
    }
}

TEST_CASE("insurer that never responds: security money refunds the policy price") {
    Cast c = make_cast();
    ClaimSetup s = make_claim(c, 40, 50);

    auto early = calls::compensate_from_security(c.w, c.patient.vk, s.c_id);
    CHECK_FALSE(early.ok());
    CHECK(early.reason() == "not yet expired");

    Amount p0 = bal(c, c.patient.vk);
    lapse(c.w, c.w.state().insurance.claims.at(s.c_id).t_generating_claim);
    auto r = calls::compensate_from_security(c.w, c.patient.vk, s.c_id);
    CHECK(r.ok());
    CHECK(bal(c, c.patient.vk) == p0 + 50);
    CHECK(c.w.state().registry.security_locked.at(c.ic_id) == 50);
    CHECK_FALSE(registry::is_deregistered(c.w.state(), c.ic_id));

    auto again = calls::compensate_from_security(c.w, c.patient.vk, s.c_id);
    CHECK_FALSE(again.ok());
    CHECK(again.reason() == "already compensated");
}

TEST_CASE("a deposit too small to refund the price deregisters the insurer") {
    Cast c = make_cast();
    // deposit 100, list and sell at 50, then drain the deposit to 20
    ClaimSetup s = make_claim(c, 40, 50);
    calls::withdraw_security(c.w, c.insurer.vk, 50);
    c.w.state().registry.costliest_policy[c.ic_id] = 0;  // test shortcut: delist
    calls::withdraw_security(c.w, c.insurer.vk, 30);
    CHECK(c.w.state().registry.security_locked.at(c.ic_id) == 20);

    Amount p0 = bal(c, c.patient.vk);
    lapse(c.w, c.w.state().insurance.claims.at(s.c_id).t_generating_claim);
    auto r = calls::compensate_from_security(c.w, c.patient.vk, s.c_id);
    CHECK(r.ok());
    CHECK(bal(c, c.patient.vk) == p0 + 20);  // whatever remained
    CHECK(registry::is_deregistered(c.w.state(), c.ic_id));
    CHECK(c.w.ledger.circulating_total() == c.w.state().total_endowment);
}

TEST_CASE("stealing insurer learns nothing decryptable before the reveal") {
    Cast c = make_cast();
    ClaimSetup s = make_claim(c, 40);
    Bytes enc_data = dbo_process(c, s);
    // the insurer never locks; any key it holds fails to open the delivery
    for (const char* guess : {"zero", "insurer-own-key", "stolen"}) {
        SymKey k = SymKey::from_digest(crypto::hash(to_bytes(guess)));
        Bytes dec = crypto::sym_decrypt(k, 0, ByteView(enc_data.data(), enc_data.size()));
        std::vector<Bytes> chunks;
        for (std::size_t off = 0; off < dec.size(); off += 32)
            chunks.push_back(Bytes(dec.begin() + off,
                                   dec.begin() + std::min(off + 32, dec.size())));
        CHECK(crypto::MerkleTree::build(chunks).root() !=
              c.w.state().insurance.claims.at(s.c_id).mr_file);
    }
}

TEST_CASE("one policy covers claims on two distinct bills") {
    Cast c = make_cast(5000);
    EntityId po_id = drive_policy(c);

    auto one_case = [&](const char* tag, Amount est, Amount fin) {
        TreatRun t;
        t.file_bytes = crypto::expand_stream(crypto::hash(to_bytes(tag)), 128);
        t.eb_id = calls::generate_estimated_cost_bill(c.w, c.hospital.vk, c.p_id, est).id;
        calls::lock_estimated_amount(c.w, c.patient.vk, c.h_id, t.eb_id, est);
        calls::start_treatment(c.w, c.hospital.vk, t.eb_id);
        Tick date = c.w.state().treatment.estimates.at(t.eb_id).t_checkup_start;
        t.file = prepare_file(c.hospital, c.p_id, date,
                              ByteView(t.file_bytes.data(), t.file_bytes.size()), 32,
                              SymKey::from_digest(crypto::hash(to_bytes(tag))));
        t.ms_id = calls::keep_signed_hash_to_blockchain(c.w, c.hospital.vk, t.eb_id,
                                                        t.file.commitment).id;
        calls::verify_and_give_consent(c.w, c.patient.vk, t.ms_id, t.file.commitment.h_x);
        t.fb_id = calls::discharge_and_generate_final_cost_bill(c.w, c.hospital.vk, t.eb_id,
                                                                fin).id;
        calls::consent_final_bill_patient(c.w, c.patient.vk, t.fb_id);
        calls::key_reveal(c.w, c.hospital.vk, t.eb_id, t.file.key);
        calls::patient_final_consent(c.w, c.patient.vk, t.eb_id);
        return t;
    };
    TreatRun t1 = one_case("bill-1", 100, 80);
    TreatRun t2 = one_case("bill-2", 70, 60);
    EntityId as1 = drive_storage(c, t1);
    EntityId as2 = drive_storage(c, t2);

    SymKey k1 = SymKey::from_digest(crypto::hash(to_bytes("k-c1")));
    SymKey k2 = SymKey::from_digest(crypto::hash(to_bytes("k-c2")));
    auto c1 = calls::claim_money(c.w, c.patient.vk, po_id, t1.eb_id, as1, 30,
                                 crypto::commit_key(k1));
    auto c2 = calls::claim_money(c.w, c.patient.vk, po_id, t2.eb_id, as2, 25,
                                 crypto::commit_key(k2));
    CHECK(c1.ok());
    CHECK(c2.ok());
    CHECK(c1.id != c2.id);
    CHECK(c.w.state().insurance.policies.at(po_id).claim_ids.size() == 2);

    // but a second claim on an already-claimed bill still fails
    auto dup = calls::claim_money(c.w, c.patient.vk, po_id, t1.eb_id, as1, 10,
                                  crypto::commit_key(k1));
    CHECK_FALSE(dup.ok());
    CHECK(dup.reason() == "duplicate claim");
}
