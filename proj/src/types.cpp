#include "medchain/types.hpp"

namespace medchain {

const char* entity_kind_name(EntityKind k) {
    switch (k) {
        case EntityKind::Patient: return "patient";
        case EntityKind::Hospital: return "hospital";
        case EntityKind::InsuranceCo: return "insurer";
        case EntityKind::DatabaseOwner: return "dbo";
        case EntityKind::ResearchCommunity: return "research_community";
    }
    return "?";
}

const char* access_category_name(AccessCategory c) {
    switch (c) {
        case AccessCategory::General: return "general";
        case AccessCategory::MedicalTreatment: return "medical_treatment";
        case AccessCategory::MedicalExpenditure: return "medical_expenditure";
    }
    return "?";
}

const char* escrow_purpose_name(EscrowPurpose p) {
    switch (p) {
        case EscrowPurpose::EstimatedByHA: return "estimated_by_ha";
        case EscrowPurpose::EstimatedByP: return "estimated_by_p";
        case EscrowPurpose::SecurityDeposit: return "security_deposit";
        case EscrowPurpose::PolicyPrice: return "policy_price";
        case EscrowPurpose::ClaimLock: return "claim_lock";
        case EscrowPurpose::StorageFee: return "storage_fee";
    }
    return "?";
}

const char* contract_name(ContractId c) {
    switch (c) {
        case ContractId::Registry: return "registry";
        case ContractId::Treatment: return "treatment";
        case ContractId::Insurance: return "insurance";
        case ContractId::Storage: return "storage";
        case ContractId::Research: return "research";
        case ContractId::System: return "system";
    }
    return "?";
}

const char* case_phase_name(CasePhase p) {
    switch (p) {
        case CasePhase::Estimated: return "estimated";
        case CasePhase::Locked: return "locked";
        case CasePhase::InTreatment: return "in_treatment";
        case CasePhase::FileCommitted: return "file_committed";
        case CasePhase::FileVerified: return "file_verified";
        case CasePhase::FinalBilled: return "final_billed";
        case CasePhase::BillDisputed: return "bill_disputed";
        case CasePhase::BillConsented: return "bill_consented";
        case CasePhase::KeyRevealed: return "key_revealed";
        case CasePhase::Settled: return "settled";
        case CasePhase::Complained: return "complained";
        case CasePhase::Aborted: return "aborted";
    }
    return "?";
}

}  // namespace medchain
