#include <random>

#include "doctest.h"
#include "fixtures.hpp"

using namespace medchain;
using namespace medchain::test;

TEST_CASE("ids are dense sequential per kind and the first patient is 1") {
    Cast c = make_cast();
    CHECK(c.p_id == 1);
    CHECK(c.h_id == 1);
    CHECK(c.ic_id == 1);
    CHECK(c.dbo_id == 1);
    CHECK(c.rc_id == 1);

    crypto::KeyPair p2 = kp("patient-2");
    auto r = calls::register_entity(c.w, p2.vk, EntityKind::Patient, p2.vk,
                                    patient_info_digest("grace", "45", "5550111", "3 hopper st"));
    CHECK(r.ok());
    CHECK(r.id == 2);
}

TEST_CASE("the same address cannot register twice for a kind") {
    Cast c = make_cast();
    auto r = calls::register_entity(c.w, c.patient.vk, EntityKind::Patient, c.patient.vk,
                                    patient_info_digest("x", "1", "2", "3"));
    CHECK_FALSE(r.ok());
    CHECK(r.reason() == "already registered");
}

TEST_CASE("only the government can onboard database owners and research groups") {
    Cast c = make_cast();
    crypto::KeyPair rogue = kp("rogue-rc");
    auto r = calls::register_entity(c.w, c.patient.vk, EntityKind::ResearchCommunity, rogue.vk,
                                    crypto::hash(to_bytes("rogue")));
    CHECK_FALSE(r.ok());
    CHECK(r.reason() == "not government");

    auto ok = calls::register_entity(c.w, c.gov.vk, EntityKind::ResearchCommunity, rogue.vk,
                                     crypto::hash(to_bytes("rogue")));
    CHECK(ok.ok());
    CHECK(ok.id == 2);
}

TEST_CASE("grant then check, revoke then check, default deny") {
    Cast c = make_cast();
    CHECK_FALSE(registry::has_access(c.w.state(), c.p_id, c.hospital.vk,
                                     AccessCategory::MedicalTreatment));
    calls::grant_access(c.w, c.patient.vk, c.p_id, c.hospital.vk,
                        AccessCategory::MedicalTreatment);
    CHECK(registry::has_access(c.w.state(), c.p_id, c.hospital.vk,
                               AccessCategory::MedicalTreatment));
    // a different category was never granted
    CHECK_FALSE(registry::has_access(c.w.state(), c.p_id, c.hospital.vk,
                                     AccessCategory::MedicalExpenditure));
    calls::revoke_access(c.w, c.patient.vk, c.p_id, c.hospital.vk,
                         AccessCategory::MedicalTreatment);
    CHECK_FALSE(registry::has_access(c.w.state(), c.p_id, c.hospital.vk,
                                     AccessCategory::MedicalTreatment));
}

TEST_CASE("only the owner mutates their grants") {
    Cast c = make_cast();
    auto r = calls::grant_access(c.w, c.insurer.vk, c.p_id, c.insurer.vk,
                                 AccessCategory::General);
    CHECK_FALSE(r.ok());
    CHECK(r.reason() == "not owner");
}

TEST_CASE("default-deny holds over random grant and revoke sequences") {
    Cast c = make_cast();
    std::mt19937_64 rng(31);
    std::vector<Address> grantees = {c.hospital.vk, c.insurer.vk, c.dbo.vk};
    std::map<std::pair<int, int>, bool> oracle;  // (grantee idx, category) -> active
    for (int i = 0; i < 200; ++i) {
        int g = static_cast<int>(rng() % 3);
        int cat = static_cast<int>(rng() % 3);
        bool grant = rng() % 2 == 0;
        if (grant)
            calls::grant_access(c.w, c.patient.vk, c.p_id, grantees[g],
                                static_cast<AccessCategory>(cat));
        else
            calls::revoke_access(c.w, c.patient.vk, c.p_id, grantees[g],
                                 static_cast<AccessCategory>(cat));
        oracle[{g, cat}] = grant;
        for (int gi = 0; gi < 3; ++gi) {
            for (int ci = 0; ci < 3; ++ci) {
                bool expect = oracle.count({gi, ci}) && oracle[{gi, ci}];
                CHECK(registry::has_access(c.w.state(), c.p_id, grantees[gi],
                                           static_cast<AccessCategory>(ci)) == expect);
            }
        }
    }
}

TEST_CASE("security deposit boundary: withdrawals keep the threshold covered") {
    Cast c = make_cast();
    calls::deposit_security(c.w, c.insurer.vk, 150);
    CHECK(c.w.state().registry.security_locked.at(c.ic_id) == 150);
    calls::note_policy_listed(c.w, c.insurer.vk, 100);

    auto ok = calls::withdraw_security(c.w, c.insurer.vk, 50);
    CHECK(ok.ok());
    CHECK(c.w.state().registry.security_locked.at(c.ic_id) == 100);

    auto bad = calls::withdraw_security(c.w, c.insurer.vk, 1);
    CHECK_FALSE(bad.ok());
    CHECK(bad.reason() == "below threshold");
}

TEST_CASE("deposit with insufficient balance reverts") {
    Cast c = make_cast(100);
    auto r = calls::deposit_security(c.w, c.insurer.vk, 101);
    CHECK_FALSE(r.ok());
    CHECK(r.reason() == "insufficient funds");
}

TEST_CASE("listing a policy above the deposit is refused") {
    Cast c = make_cast();
    calls::deposit_security(c.w, c.insurer.vk, 60);
    auto r = calls::note_policy_listed(c.w, c.insurer.vk, 61);
    CHECK_FALSE(r.ok());
    CHECK(r.reason() == "below threshold");
}

TEST_CASE("registered-id bijection per kind") {
    Cast c = make_cast();
    for (int i = 2; i <= 5; ++i) {
        auto extra = kp(("extra-patient-" + std::to_string(i)).c_str());
        calls::register_entity(c.w, extra.vk, EntityKind::Patient, extra.vk,
                               patient_info_digest("p", "0", "0", "0"));
    }
    const auto& st = c.w.state();
    std::set<std::string> seen;
    for (EntityId id = 1; id <= 5; ++id) {
        auto a = registry::addr_of(st, EntityKind::Patient, id);
        REQUIRE(a.has_value());
        CHECK(registry::id_of(st, EntityKind::Patient, *a) == id);
        seen.insert(a->hex());
    }
    CHECK(seen.size() == 5);
}

TEST_CASE("chain state never contains patient attribute plaintext") {
    Cast c = make_cast();
    Bytes blob = c.w.state().serialize();
    std::string hay(blob.begin(), blob.end());
    for (const char* attr : {"ada-lovelace", "5550100999", "12 analytical row"}) {
        CHECK(hay.find(attr) == std::string::npos);
    }
}
