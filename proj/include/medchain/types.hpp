#pragma once

#include <cstdint>
#include <string>

#include "medchain/crypto.hpp"

namespace medchain {

/// Integer currency units; no fractional amounts.
using Amount = std::uint64_t;

/// One tick per submitted transaction; advanced only by the simulation driver.
using Tick = std::uint64_t;

/// Entity address = Ed25519 verification key.
using Address = crypto::VerifyKey;

using EscrowId = std::uint64_t;
using EntityId = std::uint64_t;

enum class EntityKind : std::uint8_t {
    Patient = 0,
    Hospital = 1,
    InsuranceCo = 2,
    DatabaseOwner = 3,
    ResearchCommunity = 4,
};

const char* entity_kind_name(EntityKind k);

enum class AccessCategory : std::uint8_t {
    General = 0,
    MedicalTreatment = 1,
    MedicalExpenditure = 2,
};

const char* access_category_name(AccessCategory c);

enum class EscrowPurpose : std::uint8_t {
    EstimatedByHA = 0,
    EstimatedByP = 1,
    SecurityDeposit = 2,
    PolicyPrice = 3,
    ClaimLock = 4,
    StorageFee = 5,
};

const char* escrow_purpose_name(EscrowPurpose p);

enum class ContractId : std::uint8_t {
    Registry = 0,
    Treatment = 1,
    Insurance = 2,
    Storage = 3,
    Research = 4,
    System = 5,  // driver-level bookkeeping (genesis, time)
};

const char* contract_name(ContractId c);

/// Phase of a treatment case. Transitions follow the protocol sequence or
/// jump to Aborted through a timeout exit.
enum class CasePhase : std::uint8_t {
    Estimated = 0,
    Locked = 1,
    InTreatment = 2,
    FileCommitted = 3,
    FileVerified = 4,
    FinalBilled = 5,
    BillDisputed = 6,
    BillConsented = 7,
    KeyRevealed = 8,
    Settled = 9,
    Complained = 10,
    Aborted = 11,
};

const char* case_phase_name(CasePhase p);

}  // namespace medchain
