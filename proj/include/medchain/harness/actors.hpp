#pragma once

#include <string>

namespace medchain::harness {

/// Strategy library. Beyond the core adversarial behaviors, the SilentAt*
/// entries drive the timeout-liveness scenarios (one per deadline-guarded
/// transition).
enum class PatientStrategy {
    Honest,
    FalseComplaint,
    NoPay,
    SilentAfterReveal,
    TamperStoredFile,
    SilentAtVerify,
    SilentAtBillConsent,
    SilentAtClaimReveal,
    SilentAtStorageReveal,
};

enum class HospitalStrategy {
    Honest,
    Overcharge,
    WrongFile,
    WrongKey,
    NeverStart,
    SilentAtDischarge,
    SilentAtKeyReveal,
};

enum class InsurerStrategy {
    Honest,
    GhostAfterSale,
    StealData,
    PartialApprove,
    NeverRespond,
    SilentAtApprove,
};

enum class DboStrategy {
    Honest,
    WrongAggregate,
    SilentAtResearch,
    SilentAtStorageVerify,
    SilentAtStorageResolve,
};

PatientStrategy parse_patient_strategy(const std::string& s);
HospitalStrategy parse_hospital_strategy(const std::string& s);
InsurerStrategy parse_insurer_strategy(const std::string& s);
DboStrategy parse_dbo_strategy(const std::string& s);

const char* to_string(PatientStrategy s);
const char* to_string(HospitalStrategy s);
const char* to_string(InsurerStrategy s);
const char* to_string(DboStrategy s);

}  // namespace medchain::harness
