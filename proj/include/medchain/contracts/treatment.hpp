#pragma once

#include "medchain/contracts/registry.hpp"
#include "medchain/fairswap.hpp"
#include "medchain/ledger.hpp"

namespace medchain::treatment {

/// Patient/hospital case state machine: matched estimated-cost stakes, file
/// commitment through the hash-circuit encoding, final billing with a dispute
/// path, key reveal, then consent or proof-of-misbehavior. Deadline boundary
/// is strict: a call at exactly base + TTL is still valid.

EntityId generate_estimated_cost_bill(TxContext& ctx, EntityId p_id, Amount estimated_cost);

void lock_estimated_amount(TxContext& ctx, EntityId h_id, EntityId eb_id);

void start_treatment(TxContext& ctx, EntityId eb_id);

struct FileCommitment {
    Digest m1;               // Merkle root of the plaintext chunks
    Digest m2;               // Merkle root over the encrypted elements
    Digest h_x;              // H(pID || date || M2); date = treatment-start tick
    Signature sig_m1;
    Signature sig_hx;
    Digest key_commitment;   // H(key)
    fairswap::FileProperties props;
};

/// Stores the multi-signature metadata on chain; the encrypted encoding itself
/// travels offline. Not signature-checked here: a bad commitment is caught by
/// the patient at the verification step.
EntityId keep_signed_hash_to_blockchain(TxContext& ctx, EntityId eb_id,
                                        const FileCommitment& commitment);

/// H(pID || date || M2) recomputed by both the patient and the contract from
/// on-chain values.
Digest concat_hash(EntityId p_id, Tick date, const Digest& m2);

void verify_and_give_consent(TxContext& ctx, EntityId ms_id, const Digest& h_x_recomputed);

EntityId discharge_and_generate_final_cost_bill(TxContext& ctx, EntityId eb_id,
                                                Amount final_cost);

void dispute_final_bill(TxContext& ctx, EntityId fb_id);
void revise_final_bill(TxContext& ctx, EntityId fb_id, Amount new_cost);

void consent_final_bill_patient(TxContext& ctx, EntityId fb_id);

void key_reveal(TxContext& ctx, EntityId eb_id, const SymKey& key);

/// Settles: finalCost moves to the hospital, the patient gets the residue and
/// the hospital recovers its stake.
void patient_final_consent(TxContext& ctx, EntityId eb_id);

/// Runs the on-chain complaint check. A valid complaint forfeits the
/// hospital's stake to the patient; an invalid one settles the bill in the
/// hospital's favor.
bool patient_complain(TxContext& ctx, EntityId eb_id, const fairswap::Complaint& complaint);

/// Timeout exits. Enabled once the current phase's deadline lapsed; the
/// outcome depends only on the phase. The post-reveal lapse hands both stakes
/// to the hospital; every other lapse unwinds both escrows.
void withdraw_by_patient(TxContext& ctx, EntityId eb_id);
void withdraw_by_hospital(TxContext& ctx, EntityId eb_id);

}  // namespace medchain::treatment
