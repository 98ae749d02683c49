#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "medchain/fairswap.hpp"
#include "medchain/types.hpp"

namespace medchain {

using crypto::Digest;
using crypto::Signature;
using crypto::SymKey;

struct Escrow {
    EscrowId id = 0;
    ContractId holder = ContractId::System;
    Address payer;
    Amount amount = 0;
    EscrowPurpose purpose = EscrowPurpose::EstimatedByHA;
    bool live = false;
};

/// Write-once on-chain blob; the value never changes after the write.
struct ChainRecord {
    Bytes value;
    Tick written_at = 0;
};

// --- registry ---------------------------------------------------------------

struct EntityRecord {
    EntityKind kind = EntityKind::Patient;
    EntityId id = 0;
    Address addr;
    Digest info_digest;
};

struct RegistryState {
    std::map<std::pair<std::uint8_t, Address>, EntityId> id_by_addr;  // (kind, addr) -> id
    std::map<std::pair<std::uint8_t, EntityId>, EntityRecord> entities;
    std::map<std::uint8_t, EntityId> next_id;  // per kind, starts at 1

    // access-control matrix: (owner pID, grantee addr, category) -> active
    std::map<std::tuple<EntityId, Address, std::uint8_t>, bool> grants;

    std::map<EntityId, Amount> security_locked;       // icID -> locked amount
    std::map<EntityId, Amount> costliest_policy;      // icID -> max listed price
    std::set<EntityId> deregistered_insurers;
};

// --- treatment (patient <-> hospital) ----------------------------------------

struct EstimatedCheckUpCost {
    EntityId eb_id = 0;
    EntityId p_id = 0;
    EntityId h_id = 0;
    Amount estimated_cost = 0;
    Tick t_estimate = 0;
    Tick t_locking_by_ha = 0;
    Tick t_locking_by_p = 0;
    Tick t_checkup_start = 0;
    Tick t_unlocking_by_ha = 0;
    Tick t_unlocking_by_p = 0;

    CasePhase phase = CasePhase::Estimated;
    EscrowId ha_escrow = 0;
    EscrowId p_escrow = 0;
    EntityId fb_id = 0;  // 0 until the final bill exists
    EntityId ms_id = 0;  // 0 until the file commitment exists
};

struct FinalCheckUpCost {
    EntityId fb_id = 0;
    EntityId p_id = 0;
    EntityId h_id = 0;
    EntityId eb_id = 0;
    Amount final_cost = 0;
    Tick t_final_billing = 0;
    Tick t_bill_consent = 0;       // consent on the bill amount
    Tick t_complaint_by_p = 0;
    Tick t_unlocking_by_ha = 0;
    Tick t_unlocking_by_p = 0;
    Tick t_final_consent_by_p = 0;  // consent on the delivered file
    Tick t_dispute = 0;
    Tick t_revise = 0;
    bool disputed = false;
};

struct MultiSigOnMedicalData {
    EntityId ms_id = 0;
    EntityId p_id = 0;
    EntityId h_id = 0;
    EntityId eb_id = 0;
    Digest mr_med_data;       // M1
    Digest mr_enc_circuit;    // M2
    Digest h_x;               // H(pID || date || M2); date = treatment-start tick
    Signature sig_m1;
    Signature sig_hx;
    Digest key_commitment;    // H(key)
    fairswap::FileProperties props;
    Tick t_signing_by_ha = 0;
    Tick t_verification_by_p = 0;
    // key-and-exchange row
    SymKey revealed_key;
    bool key_revealed = false;
    Tick t_key_reveal = 0;
};

struct TreatmentState {
    std::map<EntityId, EstimatedCheckUpCost> estimates;
    std::map<EntityId, FinalCheckUpCost> final_bills;
    std::map<EntityId, MultiSigOnMedicalData> multi_sigs;
    EntityId next_eb_id = 1;
    EntityId next_fb_id = 1;
    EntityId next_ms_id = 1;
};

// --- insurance (patient <-> insurer <-> dbo) ----------------------------------

struct PendingPurchase {
    Address buyer;
    EntityId ic_id = 0;
    Amount locked_price = 0;
    Digest terms_hash;
    Tick t1 = 0;
    EscrowId escrow = 0;
};

struct PolicyDetails {
    EntityId po_id = 0;
    EntityId buyer_id = 0;
    EntityId ic_id = 0;
    Tick t_buying_policy = 0;
    Digest terms_hash;
    Amount price = 0;
    std::vector<EntityId> claim_ids;
};

struct ClaimDetails {
    EntityId c_id = 0;
    EntityId po_id = 0;
    EntityId eb_id = 0;
    EntityId as_id = 0;
    Tick t_generating_claim = 0;
    Amount claimed_amount = 0;
    Amount approved_amount = 0;
    Digest comm_k;
    SymKey k;
    bool k_revealed = false;
    Tick t_reveal_key = 0;
    Tick t_locking_by_ic = 0;
    Tick t_unlocking_by_ic = 0;
    Tick t_approval = 0;
    bool self_approved = false;
    EscrowId lock_escrow = 0;
    Digest mr_file;            // bound from the storage application
    bool dbo_sig_present = false;
    Signature dbo_sig;         // DBO signature over H(enc_data)
    Digest enc_data_hash;
    Tick t_dbo_sig = 0;
    bool key_expired_at_dbo = false;
    bool compensated = false;
};

struct InsuranceState {
    std::map<std::pair<Address, EntityId>, PendingPurchase> pending;  // (buyer, icID)
    std::map<EntityId, PolicyDetails> policies;
    std::map<EntityId, ClaimDetails> claims;
    std::map<EntityId, EntityId> claim_to_policy;
    std::map<std::pair<EntityId, EntityId>, EntityId> claim_by_policy_bill;  // (poID, ebID) -> cID
    EntityId next_po_id = 1;
    EntityId next_c_id = 1;
};

// --- storage (patient <-> dbo) --------------------------------------------------

struct ApplicationForStoring {
    EntityId as_id = 0;
    EntityId p_id = 0;
    Address p_addr;
    EntityId dbo_id = 0;
    Address dbo_addr;
    EntityId ms_id = 0;
    Digest mr_file;
    Digest mr_enc_file;
    SymKey key;
    bool key_revealed = false;
    Tick t_application = 0;
    Tick t_verification_mr = 0;
    Tick t_key_reveal = 0;
    Tick t_complain = 0;
    Tick t_approval = 0;
    Tick t_unlocking_by_p = 0;
    Tick t_unlocking_by_dbo = 0;
    Amount fee = 0;
    EscrowId fee_escrow = 0;
};

struct StorageState {
    std::map<EntityId, ApplicationForStoring> applications;
    std::map<std::pair<EntityId, EntityId>, EntityId> app_by_case_dbo;  // (msID, dboID) -> asID
    EntityId next_as_id = 1;
};

// --- research (rc <-> dbo) -------------------------------------------------------

struct ResearchRequest {
    EntityId rd_id = 0;
    EntityId dbo_id = 0;
    EntityId rc_id = 0;
    Digest hash_query;
    Tick t1 = 0;
    bool responded = false;
    Digest hash_data;
    Signature sign;
    Tick t2 = 0;
};

struct ResearchState {
    std::map<EntityId, ResearchRequest> requests;
    EntityId next_rd_id = 1;
};

// --- aggregate chain state ----------------------------------------------------------

/// Protocol knobs fixed at genesis. Every deadline in the contracts is a tick
/// budget; the penalty applies only to proven misbehavior.
struct ProtocolParams {
    Tick ttl = 10;
    Tick grace_ttl = 10;            // buyer wait before tapping insurer security money
    std::uint32_t penalty_percent = 100;
};

/// The whole mutable on-chain state. Value-copyable: transaction atomicity is
/// a snapshot of this struct restored on revert.
struct ChainState {
    Tick tick = 0;
    ProtocolParams params;
    std::map<Address, Amount> balances;
    std::map<EscrowId, Escrow> escrows;
    std::map<std::string, ChainRecord> records;
    EscrowId next_escrow_id = 1;

    Address government;
    Address security_vault;  // system account holding insurer deposits

    RegistryState registry;
    TreatmentState treatment;
    InsuranceState insurance;
    StorageState storage;
    ResearchState research;

    Amount total_endowment = 0;
    bool genesis_done = false;

    /// Canonical serialization of everything except the tick; input to the
    /// state digest and the privacy scan.
    Bytes serialize() const;
    Digest digest() const;

    /// Sum of balances plus live escrow amounts; conserved after genesis.
    Amount circulating_total() const;
};

}  // namespace medchain
