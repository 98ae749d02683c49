#pragma once

#include "medchain/contracts/registry.hpp"
#include "medchain/ledger.hpp"

namespace medchain::insurance {

/// Two-phase policy purchase with hash-anchored terms, commit-reveal claim
/// processing through the database owner, and split settlement. The insurer's
/// security deposit backs buyers against a non-responding insurer.

void buy_policy_phase_one(TxContext& ctx, EntityId ic_id, const Digest& terms_hash);

/// Completes a sale: checks the buyer's locked price and terms hash against
/// the insurer's quote, then releases the price to the insurer. A quote above
/// the insurer's security money deregisters it on the spot (the transaction
/// commits) and refunds the buyer's pending lock. Returns the policy id, 0 on
/// the deregistration path.
EntityId buy_policy_phase_two(TxContext& ctx, EntityId buyer_pid, Amount price,
                              const Digest& terms_hash);

void withdraw_locked_policy_buying_money(TxContext& ctx, EntityId ic_id);

EntityId claim_money(TxContext& ctx, EntityId po_id, EntityId eb_id, EntityId as_id,
                     Amount claimed_amount, const Digest& comm_k);

/// The database owner anchors its signature over the encrypted file hash and
/// the one-time key is marked expired for reuse.
void keep_sig_on_hash_of_enc_file(TxContext& ctx, EntityId c_id, const Digest& enc_data_hash,
                                  const Signature& sig);

void lock_claimed_money(TxContext& ctx, EntityId c_id);

void reveal_secret_key(TxContext& ctx, EntityId c_id, const SymKey& k);

void withdraw_locked_claimed_money(TxContext& ctx, EntityId c_id);

/// approvedAmount to the buyer, the remainder back to the insurer.
void approve_claim(TxContext& ctx, EntityId c_id, Amount approved_amount);

/// Buyer takes the full locked amount once the insurer's approval window
/// lapsed.
void self_approve_claim(TxContext& ctx, EntityId c_id);

/// Refunds the policy price from the insurer's security deposit when the
/// insurer never responded to the claim; deregisters the insurer if the
/// deposit cannot cover the price.
void compensate_from_security(TxContext& ctx, EntityId c_id);

}  // namespace medchain::insurance
