#include "medchain/harness/actors.hpp"

#include "medchain/harness/scenario.hpp"

namespace medchain::harness {

PatientStrategy parse_patient_strategy(const std::string& s) {
    if (s == "honest") return PatientStrategy::Honest;
    if (s == "false_complaint") return PatientStrategy::FalseComplaint;
    if (s == "no_pay") return PatientStrategy::NoPay;
    if (s == "silent_after_reveal") return PatientStrategy::SilentAfterReveal;
    if (s == "tamper_stored_file") return PatientStrategy::TamperStoredFile;
    if (s == "silent_at_verify") return PatientStrategy::SilentAtVerify;
    if (s == "silent_at_bill_consent") return PatientStrategy::SilentAtBillConsent;
    if (s == "silent_at_claim_reveal") return PatientStrategy::SilentAtClaimReveal;
    if (s == "silent_at_storage_reveal") return PatientStrategy::SilentAtStorageReveal;
    throw ScenarioError("unknown patient strategy: " + s);
}

HospitalStrategy parse_hospital_strategy(const std::string& s) {
    if (s == "honest") return HospitalStrategy::Honest;
    if (s == "overcharge") return HospitalStrategy::Overcharge;
    if (s == "wrong_file") return HospitalStrategy::WrongFile;
    if (s == "wrong_key") return HospitalStrategy::WrongKey;
    if (s == "never_start") return HospitalStrategy::NeverStart;
    if (s == "silent_at_discharge") return HospitalStrategy::SilentAtDischarge;
    if (s == "silent_at_key_reveal") return HospitalStrategy::SilentAtKeyReveal;
    throw ScenarioError("unknown hospital strategy: " + s);
}

InsurerStrategy parse_insurer_strategy(const std::string& s) {
    if (s == "honest") return InsurerStrategy::Honest;
    if (s == "ghost_after_sale") return InsurerStrategy::GhostAfterSale;
    if (s == "steal_data") return InsurerStrategy::StealData;
    if (s == "partial_approve") return InsurerStrategy::PartialApprove;
    if (s == "never_respond") return InsurerStrategy::NeverRespond;
    if (s == "silent_at_approve") return InsurerStrategy::SilentAtApprove;
    throw ScenarioError("unknown insurer strategy: " + s);
}

DboStrategy parse_dbo_strategy(const std::string& s) {
    if (s == "honest") return DboStrategy::Honest;
    if (s == "wrong_aggregate") return DboStrategy::WrongAggregate;
    if (s == "silent_at_research") return DboStrategy::SilentAtResearch;
    if (s == "silent_at_storage_verify") return DboStrategy::SilentAtStorageVerify;
    if (s == "silent_at_storage_resolve") return DboStrategy::SilentAtStorageResolve;
    throw ScenarioError("unknown dbo strategy: " + s);
}

const char* to_string(PatientStrategy s) {
    switch (s) {
        case PatientStrategy::Honest: return "honest";
        case PatientStrategy::FalseComplaint: return "false_complaint";
        case PatientStrategy::NoPay: return "no_pay";
        case PatientStrategy::SilentAfterReveal: return "silent_after_reveal";
        case PatientStrategy::TamperStoredFile: return "tamper_stored_file";
        case PatientStrategy::SilentAtVerify: return "silent_at_verify";
        case PatientStrategy::SilentAtBillConsent: return "silent_at_bill_consent";
        case PatientStrategy::SilentAtClaimReveal: return "silent_at_claim_reveal";
        case PatientStrategy::SilentAtStorageReveal: return "silent_at_storage_reveal";
    }
    return "?";
}

const char* to_string(HospitalStrategy s) {
    switch (s) {
        case HospitalStrategy::Honest: return "honest";
        case HospitalStrategy::Overcharge: return "overcharge";
        case HospitalStrategy::WrongFile: return "wrong_file";
        case HospitalStrategy::WrongKey: return "wrong_key";
        case HospitalStrategy::NeverStart: return "never_start";
        case HospitalStrategy::SilentAtDischarge: return "silent_at_discharge";
        case HospitalStrategy::SilentAtKeyReveal: return "silent_at_key_reveal";
    }
    return "?";
}

const char* to_string(InsurerStrategy s) {
    switch (s) {
        case InsurerStrategy::Honest: return "honest";
        case InsurerStrategy::GhostAfterSale: return "ghost_after_sale";
        case InsurerStrategy::StealData: return "steal_data";
        case InsurerStrategy::PartialApprove: return "partial_approve";
        case InsurerStrategy::NeverRespond: return "never_respond";
        case InsurerStrategy::SilentAtApprove: return "silent_at_approve";
    }
    return "?";
}

const char* to_string(DboStrategy s) {
    switch (s) {
        case DboStrategy::Honest: return "honest";
        case DboStrategy::WrongAggregate: return "wrong_aggregate";
        case DboStrategy::SilentAtResearch: return "silent_at_research";
        case DboStrategy::SilentAtStorageVerify: return "silent_at_storage_verify";
        case DboStrategy::SilentAtStorageResolve: return "silent_at_storage_resolve";
    }
    return "?";
}

}  // namespace medchain::harness
