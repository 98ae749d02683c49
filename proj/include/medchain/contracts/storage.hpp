#pragma once

#include "medchain/contracts/registry.hpp"
#include "medchain/fairswap.hpp"
#include "medchain/ledger.hpp"

namespace medchain::storage {

/// Patient-to-database-owner storage sale. The patient is the seller here: the
/// storage fee is escrowed by the patient, released to the database owner on
/// approval and forfeited on the patient's proven misbehavior. The exchanged
/// encoding must match the treatment case's on-chain roots.

EntityId apply_for_storing(TxContext& ctx, EntityId dbo_id, EntityId ms_id);

/// The database owner submits the roots it computed from the offline delivery;
/// they must equal the on-chain commitment.
void dbo_verify_roots(TxContext& ctx, EntityId as_id, const Digest& mr_file,
                      const Digest& mr_enc_file);

void storage_key_reveal(TxContext& ctx, EntityId as_id, const SymKey& key);

/// Fee to the database owner; the file enters its plaintext store.
void dbo_approve(TxContext& ctx, EntityId as_id);

/// A valid complaint forfeits the fee to the database owner and rejects the
/// file; an invalid complaint forces approval with the fee refunded to the
/// patient.
bool dbo_complain(TxContext& ctx, EntityId as_id, const fairswap::Complaint& complaint);

/// Timeout exit for either party; the fee always unwinds to the patient.
void withdraw_storage(TxContext& ctx, EntityId as_id);

}  // namespace medchain::storage
