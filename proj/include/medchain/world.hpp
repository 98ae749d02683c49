#pragma once

#include "medchain/ledger.hpp"
#include "medchain/offline_bus.hpp"

namespace medchain {

/// Ledger plus offline bus plus the genesis ceremony. Transactions are only
/// accepted from the government, from registered addresses, or when aimed at
/// the registry.
class World {
public:
    Ledger ledger;
    OfflineBus bus;

    void genesis(const Address& government,
                 const std::vector<std::pair<Address, Amount>>& endowments,
                 const ProtocolParams& params = {});

    TxReceipt call(ContractId contract, const std::string& function, const Address& caller,
                   Amount value, const std::function<void(TxContext&)>& body);

    ChainState& state() { return ledger.state(); }
    const ChainState& state() const { return ledger.state(); }
    Tick now() const { return ledger.state().tick; }
    void idle_tick() { ledger.advance_time(); }
};

}  // namespace medchain
