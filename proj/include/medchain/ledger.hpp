#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "medchain/state.hpp"

namespace medchain {

/// Contract precondition failure; rolls the transaction back.
struct Revert : std::runtime_error {
    explicit Revert(const std::string& reason) : std::runtime_error(reason) {}
};

struct Event {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attrs;
};

struct CallSpec {
    ContractId contract = ContractId::System;
    std::string function;
    Address caller;
    Amount value = 0;  // funds attached to the call
};

struct TxReceipt {
    bool ok = false;
    std::string revert_reason;
    Tick tick = 0;
    std::uint64_t op_count = 0;
    std::vector<Event> events;
};

/// Immutable record of one submitted transaction, kept outside the snapshot
/// so reverted calls stay visible in the trace.
struct TxRecord {
    Tick tick = 0;
    std::string contract;
    std::string function;
    std::string caller_hex;
    bool ok = false;
    std::string revert_reason;
    std::uint64_t op_count = 0;
    std::vector<Event> events;
    Amount conservation_total = 0;
};

class Ledger;

/// Handle given to contract code for the duration of one transaction. Every
/// state touch goes through here so the op count stays meaningful.
class TxContext {
public:
    TxContext(ChainState& st, const CallSpec& call) : st_(st), call_(call) {}

    ChainState& state() { return st_; }
    const ChainState& state() const { return st_; }
    const CallSpec& call() const { return call_; }
    const Address& caller() const { return call_.caller; }
    Amount attached() const { return call_.value; }
    Tick now() const { return st_.tick; }

    void require(bool cond, const std::string& reason) {
        if (!cond) throw Revert(reason);
    }
    [[noreturn]] void revert(const std::string& reason) { throw Revert(reason); }

    void charge(std::uint64_t ops = 1) { op_count_ += ops; }
    std::uint64_t op_count() const { return op_count_; }

    void emit(std::string name,
              std::vector<std::pair<std::string, std::string>> attrs = {});
    const std::vector<Event>& events() const { return events_; }

    // balances and escrow
    Amount balance(const Address& a) const;
    void credit(const Address& a, Amount amount);
    void debit(const Address& a, Amount amount);  // Revert("insufficient funds")
    EscrowId lock(const Address& payer, Amount amount, EscrowPurpose purpose);
    void release(EscrowId id, const Address& to);
    void release_split(EscrowId id, const std::vector<std::pair<Address, Amount>>& parts);
    const Escrow& escrow(EscrowId id) const;

    // write-once record store
    void put_record(const std::string& key, Bytes value);
    const ChainRecord* get_record(const std::string& key) const;

private:
    ChainState& st_;
    const CallSpec& call_;
    std::uint64_t op_count_ = 0;
    std::vector<Event> events_;
};

/// Deterministic simulated blockchain: one serialized transaction per tick,
/// full-state snapshot for revert atomicity, append-only transaction log.
class Ledger {
public:
    ChainState& state() { return st_; }
    const ChainState& state() const { return st_; }
    const std::vector<TxRecord>& log() const { return log_; }

    // genesis (before any transaction)
    void create_account(const Address& a, Amount endowment);
    void set_government(const Address& a);
    void finish_genesis();

    TxReceipt submit(const CallSpec& call, const std::function<void(TxContext&)>& body);

    /// Driver-only idle tick; lets deadlines lapse without a transaction.
    void advance_time();

    Digest state_digest() const { return st_.digest(); }
    Amount circulating_total() const { return st_.circulating_total(); }

    /// Test hooks for audit negative controls. Both bypass the transaction
    /// path on purpose.
    void hook_mint(const Address& a, Amount amount);
    void hook_tamper_record(const std::string& key, Bytes value);

private:
    ChainState st_;
    std::vector<TxRecord> log_;
};

}  // namespace medchain
