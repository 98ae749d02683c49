#include "medchain/world.hpp"

#include "medchain/contracts/registry.hpp"

namespace medchain {

void World::genesis(const Address& government,
                    const std::vector<std::pair<Address, Amount>>& endowments,
                    const ProtocolParams& params) {
    ledger.state().params = params;
    ledger.set_government(government);
    for (const auto& [addr, amount] : endowments) ledger.create_account(addr, amount);
    ledger.finish_genesis();
}

TxReceipt World::call(ContractId contract, const std::string& function, const Address& caller,
                      Amount value, const std::function<void(TxContext&)>& body) {
    CallSpec spec{contract, function, caller, value};
    return ledger.submit(spec, [&](TxContext& ctx) {
        bool known = caller == ctx.state().government ||
                     registry::is_registered_any(ctx.state(), caller) ||
                     contract == ContractId::Registry;
        ctx.require(known, "caller unknown");
        body(ctx);
    });
}

}  // namespace medchain
