#include "medchain/ledger.hpp"

#include <cassert>

namespace medchain {

void TxContext::emit(std::string name,
                     std::vector<std::pair<std::string, std::string>> attrs) {
    events_.push_back(Event{std::move(name), std::move(attrs)});
}

Amount TxContext::balance(const Address& a) const {
    auto it = st_.balances.find(a);
    return it == st_.balances.end() ? 0 : it->second;
}

void TxContext::credit(const Address& a, Amount amount) {
    charge();
    st_.balances[a] += amount;
}

void TxContext::debit(const Address& a, Amount amount) {
    charge();
    auto it = st_.balances.find(a);
    if (it == st_.balances.end() || it->second < amount) throw Revert("insufficient funds");
    it->second -= amount;
}

EscrowId TxContext::lock(const Address& payer, Amount amount, EscrowPurpose purpose) {
    debit(payer, amount);
    EscrowId id = st_.next_escrow_id++;
    st_.escrows[id] = Escrow{id, call_.contract, payer, amount, purpose, true};
    charge();
    emit("escrow_locked", {{"escrow", std::to_string(id)},
                           {"payer", payer.hex()},
                           {"amount", std::to_string(amount)},
                           {"purpose", escrow_purpose_name(purpose)}});
    return id;
}

const Escrow& TxContext::escrow(EscrowId id) const {
    auto it = st_.escrows.find(id);
    if (it == st_.escrows.end()) throw Revert("unknown escrow");
    return it->second;
}

void TxContext::release(EscrowId id, const Address& to) {
    auto it = st_.escrows.find(id);
    if (it == st_.escrows.end()) throw Revert("unknown escrow");
    if (!it->second.live) throw Revert("escrow already released");
    if (it->second.holder != call_.contract) throw Revert("escrow held by another contract");
    it->second.live = false;
    credit(to, it->second.amount);
    emit("escrow_released", {{"escrow", std::to_string(id)},
                             {"to", to.hex()},
                             {"amount", std::to_string(it->second.amount)}});
}

void TxContext::release_split(EscrowId id,
                              const std::vector<std::pair<Address, Amount>>& parts) {
    auto it = st_.escrows.find(id);
    if (it == st_.escrows.end()) throw Revert("unknown escrow");
    if (!it->second.live) throw Revert("escrow already released");
    if (it->second.holder != call_.contract) throw Revert("escrow held by another contract");
    Amount sum = 0;
    for (const auto& [to, amt] : parts) sum += amt;
    if (sum != it->second.amount) throw Revert("split does not sum to escrow amount");
    it->second.live = false;
    for (const auto& [to, amt] : parts) {
        credit(to, amt);
        emit("escrow_released", {{"escrow", std::to_string(id)},
                                 {"to", to.hex()},
                                 {"amount", std::to_string(amt)}});
    }
}

void TxContext::put_record(const std::string& key, Bytes value) {
    charge();
    if (st_.records.count(key)) throw Revert("record already written: " + key);
    st_.records[key] = ChainRecord{std::move(value), st_.tick};
    emit("record_written",
         {{"key", key},
          {"value_digest", crypto::hash(ByteView(st_.records[key].value.data(),
                                                 st_.records[key].value.size()))
                               .hex()}});
}

const ChainRecord* TxContext::get_record(const std::string& key) const {
    auto it = st_.records.find(key);
    return it == st_.records.end() ? nullptr : &it->second;
}

void Ledger::create_account(const Address& a, Amount endowment) {
    assert(!st_.genesis_done);
    st_.balances[a] += endowment;
}

void Ledger::set_government(const Address& a) {
    assert(!st_.genesis_done);
    st_.government = a;
    if (!st_.balances.count(a)) st_.balances[a] = 0;
    // vault address derived from the government key; holds insurer deposits
    Digest d = crypto::hash(to_bytes("security-vault"));
    std::copy(d.v.begin(), d.v.end(), st_.security_vault.v.begin());
    st_.balances[st_.security_vault] = 0;
}

void Ledger::finish_genesis() {
    st_.total_endowment = st_.circulating_total();
    st_.genesis_done = true;
}

TxReceipt Ledger::submit(const CallSpec& call, const std::function<void(TxContext&)>& body) {
    ChainState snapshot = st_;
    st_.tick += 1;

    TxContext ctx(st_, call);
    TxReceipt receipt;
    receipt.tick = st_.tick;
    try {
        body(ctx);
        receipt.ok = true;
    } catch (const Revert& r) {
        Tick t = st_.tick;
        st_ = std::move(snapshot);
        st_.tick = t;
        receipt.ok = false;
        receipt.revert_reason = r.what();
    }
    receipt.op_count = ctx.op_count();
    if (receipt.ok) receipt.events = ctx.events();

    TxRecord rec;
    rec.tick = receipt.tick;
    rec.contract = contract_name(call.contract);
    rec.function = call.function;
    rec.caller_hex = call.caller.hex();
    rec.ok = receipt.ok;
    rec.revert_reason = receipt.revert_reason;
    rec.op_count = receipt.op_count;
    rec.events = receipt.events;
    rec.conservation_total = st_.circulating_total();
    log_.push_back(std::move(rec));
    return receipt;
}

void Ledger::advance_time() {
    st_.tick += 1;
}

void Ledger::hook_mint(const Address& a, Amount amount) {
    st_.balances[a] += amount;
}

void Ledger::hook_tamper_record(const std::string& key, Bytes value) {
    auto it = st_.records.find(key);
    if (it != st_.records.end()) it->second.value = std::move(value);
}

}  // namespace medchain
