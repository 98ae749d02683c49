#pragma once

#include "medchain/contracts/registry.hpp"
#include "medchain/ledger.hpp"

namespace medchain::research {

/// Research community asks a database owner for aggregated data by query
/// hash; the owner answers on chain with the data hash and its signature while
/// the dataset itself travels offline.

EntityId request_data_for_research(TxContext& ctx, EntityId dbo_id, const Digest& hash_query);

void provide_data_for_research(TxContext& ctx, EntityId rd_id, const Digest& hash_data,
                               const Signature& sign);

/// Offline check by the research community: dataset hash and signer both match
/// the on-chain response.
bool rc_verify_delivery(const ChainState& st, EntityId rd_id, ByteView dataset);

}  // namespace medchain::research
