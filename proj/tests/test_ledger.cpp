#include <random>

#include "doctest.h"
#include "medchain/ledger.hpp"

using namespace medchain;
using crypto::Digest;

namespace {

Address addr(const char* tag) {
    return crypto::KeyPair::from_seed(crypto::hash(to_bytes(tag))).vk;
}

Ledger fresh_ledger(const std::vector<std::pair<Address, Amount>>& endowments) {
    Ledger l;
    l.set_government(addr("gov"));
    for (auto& [a, amt] : endowments) l.create_account(a, amt);
    l.finish_genesis();
    return l;
}

CallSpec spec(const Address& caller, Amount value = 0) {
    return CallSpec{ContractId::System, "test", caller, value};
}

}  // namespace

TEST_CASE("tick advances once per submitted transaction, including reverts") {
    Address a = addr("a");
    Ledger l = fresh_ledger({{a, 100}});
    CHECK(l.state().tick == 0);
    l.submit(spec(a), [](TxContext&) {});
    CHECK(l.state().tick == 1);
    l.submit(spec(a), [](TxContext& ctx) { ctx.revert("nope"); });
    CHECK(l.state().tick == 2);
    for (int i = 0; i < 5; ++i) l.submit(spec(a), [](TxContext&) {});
    CHECK(l.state().tick == 7);
}

TEST_CASE("lock debits the payer and creates a live escrow") {
    Address a = addr("a");
    Ledger l = fresh_ledger({{a, 100}});
    EscrowId e = 0;
    auto r = l.submit(spec(a), [&](TxContext& ctx) {
        e = ctx.lock(a, 40, EscrowPurpose::EstimatedByP);
    });
    CHECK(r.ok);
    CHECK(l.state().balances.at(a) == 60);
    CHECK(l.state().escrows.at(e).live);
    CHECK(l.state().escrows.at(e).amount == 40);
}

TEST_CASE("lock beyond the balance reverts with insufficient funds") {
    Address a = addr("a");
    Ledger l = fresh_ledger({{a, 40}});
    auto r = l.submit(spec(a), [&](TxContext& ctx) {
        ctx.lock(a, 41, EscrowPurpose::EstimatedByP);
    });
    CHECK_FALSE(r.ok);
    CHECK(r.revert_reason == "insufficient funds");
    CHECK(l.state().balances.at(a) == 40);
}

TEST_CASE("two locks leave two live escrows and hand-tracked balances") {
    Address a = addr("a");
    Ledger l = fresh_ledger({{a, 100}});
    EscrowId e1 = 0, e2 = 0;
    l.submit(spec(a), [&](TxContext& ctx) { e1 = ctx.lock(a, 30, EscrowPurpose::PolicyPrice); });
    l.submit(spec(a), [&](TxContext& ctx) { e2 = ctx.lock(a, 30, EscrowPurpose::ClaimLock); });
    CHECK(l.state().balances.at(a) == 40);
    CHECK(l.state().escrows.at(e1).live);
    CHECK(l.state().escrows.at(e2).live);
    CHECK(l.circulating_total() == 100);
}

TEST_CASE("release pays the full amount once and only once") {
    Address a = addr("a");
    Address b = addr("b");
    Ledger l = fresh_ledger({{a, 100}, {b, 0}});
    EscrowId e = 0;
    l.submit(spec(a), [&](TxContext& ctx) { e = ctx.lock(a, 40, EscrowPurpose::ClaimLock); });
    auto r1 = l.submit(spec(a), [&](TxContext& ctx) { ctx.release(e, b); });
    CHECK(r1.ok);
    CHECK(l.state().balances.at(b) == 40);
    auto r2 = l.submit(spec(a), [&](TxContext& ctx) { ctx.release(e, b); });
    CHECK_FALSE(r2.ok);
    CHECK(r2.revert_reason == "escrow already released");
    auto r3 = l.submit(spec(a), [&](TxContext& ctx) { ctx.release(999, b); });
    CHECK(r3.revert_reason == "unknown escrow");
}

TEST_CASE("split release distributes exactly the escrow total") {
    Address a = addr("a");
    Address b = addr("b");
    Ledger l = fresh_ledger({{a, 100}, {b, 0}});
    EscrowId e = 0;
    l.submit(spec(a), [&](TxContext& ctx) { e = ctx.lock(a, 50, EscrowPurpose::ClaimLock); });
    auto bad = l.submit(spec(a), [&](TxContext& ctx) {
        ctx.release_split(e, {{b, 30}, {a, 19}});
    });
    CHECK_FALSE(bad.ok);
    auto good = l.submit(spec(a), [&](TxContext& ctx) {
        ctx.release_split(e, {{b, 30}, {a, 20}});
    });
    CHECK(good.ok);
    CHECK(l.state().balances.at(b) == 30);
    CHECK(l.state().balances.at(a) == 70);
    CHECK(l.circulating_total() == 100);
}

TEST_CASE("a reverted call leaves the state digest untouched") {
    Address a = addr("a");
    Address b = addr("b");
    Ledger l = fresh_ledger({{a, 100}, {b, 5}});
    l.submit(spec(a), [&](TxContext& odd) { odd.lock(a, 10, EscrowPurpose::StorageFee); });
    Digest before = l.state_digest();
    auto r = l.submit(spec(a), [&](TxContext& ctx) {
        ctx.credit(b, 7);
        ctx.lock(a, 20, EscrowPurpose::ClaimLock);
        ctx.put_record("x/1", to_bytes("v"));
        ctx.revert("deliberate");
    });
    CHECK_FALSE(r.ok);
    CHECK(l.state_digest() == before);
}

TEST_CASE("records: read unwritten, write-read round trip, write-once") {
    Address a = addr("a");
    Ledger l = fresh_ledger({{a, 10}});
    l.submit(spec(a), [&](TxContext& ctx) {
        CHECK(ctx.get_record("nope") == nullptr);
        ctx.put_record("k/1", to_bytes("value-1"));
        REQUIRE(ctx.get_record("k/1") != nullptr);
        CHECK(ctx.get_record("k/1")->value == to_bytes("value-1"));
    });
    auto r = l.submit(spec(a), [&](TxContext& ctx) {
        ctx.put_record("k/1", to_bytes("value-2"));
    });
    CHECK_FALSE(r.ok);
    CHECK(l.state().records.at("k/1").value == to_bytes("value-1"));
}

TEST_CASE("records survive a thousand unrelated writes unchanged") {
    Address a = addr("a");
    Ledger l = fresh_ledger({{a, 10}});
    std::mt19937_64 rng(9);
    l.submit(spec(a), [&](TxContext& ctx) { ctx.put_record("pinned", to_bytes("anchor")); });
    Digest pinned = crypto::hash(to_bytes("anchor"));
    for (int i = 0; i < 1000; ++i) {
        std::string key = "noise/" + std::to_string(i);
        Bytes value(8);
        for (auto& v : value) v = static_cast<std::uint8_t>(rng());
        l.submit(spec(a), [&](TxContext& ctx) { ctx.put_record(key, value); });
        const Bytes& cur = l.state().records.at("pinned").value;
        CHECK(crypto::hash(cur) == pinned);
    }
}

TEST_CASE("conservation holds across random lock/release sequences") {
    Address a = addr("a");
    Address b = addr("b");
    Ledger l = fresh_ledger({{a, 500}, {b, 500}});
    std::mt19937_64 rng(10);
    std::vector<EscrowId> live;

    // hand-tracked oracle
    Amount oracle_a = 500, oracle_b = 500, oracle_escrowed = 0;
    std::map<EscrowId, Amount> oracle_amounts;
    std::map<EscrowId, bool> oracle_payer_is_a;

    for (int i = 0; i < 300; ++i) {
        bool do_lock = live.empty() || (rng() % 2 == 0);
        if (do_lock) {
            bool from_a = rng() % 2 == 0;
            Amount amt = rng() % 50;
            Address payer = from_a ? a : b;
            Amount& bal = from_a ? oracle_a : oracle_b;
            EscrowId got = 0;
            auto r = l.submit(spec(payer), [&](TxContext& ctx) {
                got = ctx.lock(payer, amt, EscrowPurpose::ClaimLock);
            });
            if (bal >= amt) {
                CHECK(r.ok);
                bal -= amt;
                oracle_escrowed += amt;
                oracle_amounts[got] = amt;
                oracle_payer_is_a[got] = from_a;
                live.push_back(got);
            } else {
                CHECK_FALSE(r.ok);
            }
        } else {
            std::size_t pick = rng() % live.size();
            EscrowId e = live[pick];
            live.erase(live.begin() + pick);
            bool to_a = rng() % 2 == 0;
            Address to = to_a ? a : b;
            auto r = l.submit(spec(a), [&](TxContext& ctx) { ctx.release(e, to); });
            CHECK(r.ok);
            (to_a ? oracle_a : oracle_b) += oracle_amounts[e];
            oracle_escrowed -= oracle_amounts[e];
        }
        CHECK(l.circulating_total() == 1000);
        CHECK(l.state().balances.at(a) == oracle_a);
        CHECK(l.state().balances.at(b) == oracle_b);
    }
    CHECK(l.log().size() == 300);
    for (const auto& rec : l.log()) CHECK(rec.conservation_total == 1000);
}

TEST_CASE("state digest is identical for identical histories") {
    auto run = [] {
        Address a = addr("a");
        Ledger l = fresh_ledger({{a, 100}});
        l.submit(spec(a), [&](TxContext& ctx) { ctx.lock(a, 10, EscrowPurpose::StorageFee); });
        l.submit(spec(a), [&](TxContext& ctx) { ctx.put_record("k", to_bytes("v")); });
        return l.state_digest();
    };
    CHECK(run() == run());
}

TEST_CASE("test hooks break conservation and immutability on purpose") {
    Address a = addr("a");
    Ledger l = fresh_ledger({{a, 100}});
    l.submit(spec(a), [&](TxContext& ctx) { ctx.put_record("k", to_bytes("v")); });
    l.hook_mint(a, 7);
    CHECK(l.circulating_total() == 107);
    l.hook_tamper_record("k", to_bytes("evil"));
    CHECK(l.state().records.at("k").value == to_bytes("evil"));
}
