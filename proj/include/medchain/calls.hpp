#pragma once

#include "medchain/contracts/insurance.hpp"
#include "medchain/contracts/registry.hpp"
#include "medchain/contracts/research.hpp"
#include "medchain/contracts/storage.hpp"
#include "medchain/contracts/treatment.hpp"
#include "medchain/world.hpp"

namespace medchain::calls {

/// Receipt plus whatever the operation minted or decided.
struct Result {
    TxReceipt receipt;
    EntityId id = 0;
    bool verdict = false;

    bool ok() const { return receipt.ok; }
    const std::string& reason() const { return receipt.revert_reason; }
};

// --- registry -----------------------------------------------------------------

inline Result register_entity(World& w, const Address& caller, EntityKind kind,
                              const Address& addr, const Digest& info) {
    Result r;
    r.receipt = w.call(ContractId::Registry, "register_entity", caller, 0, [&](TxContext& ctx) {
        r.id = registry::register_entity(ctx, kind, addr, info);
    });
    return r;
}

inline Result grant_access(World& w, const Address& caller, EntityId owner,
                           const Address& grantee, AccessCategory cat) {
    Result r;
    r.receipt = w.call(ContractId::Registry, "grant_access", caller, 0, [&](TxContext& ctx) {
        registry::grant_access(ctx, owner, grantee, cat);
    });
    return r;
}

inline Result revoke_access(World& w, const Address& caller, EntityId owner,
                            const Address& grantee, AccessCategory cat) {
    Result r;
    r.receipt = w.call(ContractId::Registry, "revoke_access", caller, 0, [&](TxContext& ctx) {
        registry::revoke_access(ctx, owner, grantee, cat);
    });
    return r;
}

inline Result deposit_security(World& w, const Address& caller, Amount amount) {
    Result r;
    r.receipt = w.call(ContractId::Registry, "deposit_security", caller, amount,
                       [&](TxContext& ctx) { registry::deposit_security(ctx, amount); });
    return r;
}

inline Result withdraw_security(World& w, const Address& caller, Amount amount) {
    Result r;
    r.receipt = w.call(ContractId::Registry, "withdraw_security", caller, 0,
                       [&](TxContext& ctx) { registry::withdraw_security(ctx, amount); });
    return r;
}

inline Result note_policy_listed(World& w, const Address& caller, Amount price) {
    Result r;
    r.receipt = w.call(ContractId::Registry, "note_policy_listed", caller, 0,
                       [&](TxContext& ctx) { registry::note_policy_listed(ctx, price); });
    return r;
}

// --- treatment -----------------------------------------------------------------

inline Result generate_estimated_cost_bill(World& w, const Address& hospital, EntityId p_id,
                                           Amount estimated_cost) {
    Result r;
    r.receipt = w.call(ContractId::Treatment, "generate_estimated_cost_bill", hospital,
                       estimated_cost, [&](TxContext& ctx) {
                           r.id = treatment::generate_estimated_cost_bill(ctx, p_id,
                                                                          estimated_cost);
                       });
    return r;
}

inline Result lock_estimated_amount(World& w, const Address& patient, EntityId h_id,
                                    EntityId eb_id, Amount value) {
    Result r;
    r.receipt = w.call(ContractId::Treatment, "lock_estimated_amount", patient, value,
                       [&](TxContext& ctx) { treatment::lock_estimated_amount(ctx, h_id, eb_id); });
    return r;
}

inline Result start_treatment(World& w, const Address& hospital, EntityId eb_id) {
    Result r;
    r.receipt = w.call(ContractId::Treatment, "start_treatment", hospital, 0,
                       [&](TxContext& ctx) { treatment::start_treatment(ctx, eb_id); });
    return r;
}

inline Result keep_signed_hash_to_blockchain(World& w, const Address& hospital, EntityId eb_id,
                                             const treatment::FileCommitment& c) {
    Result r;
    r.receipt = w.call(ContractId::Treatment, "keep_signed_hash_to_blockchain", hospital, 0,
                       [&](TxContext& ctx) {
                           r.id = treatment::keep_signed_hash_to_blockchain(ctx, eb_id, c);
                       });
    return r;
}

inline Result verify_and_give_consent(World& w, const Address& patient, EntityId ms_id,
                                      const Digest& h_x) {
    Result r;
    r.receipt = w.call(ContractId::Treatment, "verify_and_give_consent", patient, 0,
                       [&](TxContext& ctx) {
                           treatment::verify_and_give_consent(ctx, ms_id, h_x);
                       });
    return r;
}

inline Result discharge_and_generate_final_cost_bill(World& w, const Address& hospital,
                                                     EntityId eb_id, Amount final_cost) {
    Result r;
    r.receipt = w.call(ContractId::Treatment, "discharge_and_generate_final_cost_bill", hospital,
                       0, [&](TxContext& ctx) {
                           r.id = treatment::discharge_and_generate_final_cost_bill(ctx, eb_id,
                                                                                    final_cost);
                       });
    return r;
}

inline Result dispute_final_bill(World& w, const Address& patient, EntityId fb_id) {
    Result r;
    r.receipt = w.call(ContractId::Treatment, "dispute_final_bill", patient, 0,
                       [&](TxContext& ctx) { treatment::dispute_final_bill(ctx, fb_id); });
    return r;
}

inline Result revise_final_bill(World& w, const Address& hospital, EntityId fb_id,
                                Amount new_cost) {
    Result r;
    r.receipt = w.call(ContractId::Treatment, "revise_final_bill", hospital, 0,
                       [&](TxContext& ctx) { treatment::revise_final_bill(ctx, fb_id, new_cost); });
    return r;
}

inline Result consent_final_bill_patient(World& w, const Address& patient, EntityId fb_id) {
    Result r;
    r.receipt = w.call(ContractId::Treatment, "consent_final_bill_patient", patient, 0,
                       [&](TxContext& ctx) { treatment::consent_final_bill_patient(ctx, fb_id); });
    return r;
}

inline Result key_reveal(World& w, const Address& hospital, EntityId eb_id, const SymKey& key) {
    Result r;
    r.receipt = w.call(ContractId::Treatment, "key_reveal", hospital, 0,
                       [&](TxContext& ctx) { treatment::key_reveal(ctx, eb_id, key); });
    return r;
}

inline Result patient_final_consent(World& w, const Address& patient, EntityId eb_id) {
    Result r;
    r.receipt = w.call(ContractId::Treatment, "patient_final_consent", patient, 0,
                       [&](TxContext& ctx) { treatment::patient_final_consent(ctx, eb_id); });
    return r;
}

inline Result patient_complain(World& w, const Address& patient, EntityId eb_id,
                               const fairswap::Complaint& complaint) {
    Result r;
    r.receipt = w.call(ContractId::Treatment, "patient_complain", patient, 0,
                       [&](TxContext& ctx) {
                           r.verdict = treatment::patient_complain(ctx, eb_id, complaint);
                       });
    return r;
}

inline Result withdraw_by_patient(World& w, const Address& patient, EntityId eb_id) {
    Result r;
    r.receipt = w.call(ContractId::Treatment, "withdraw_by_patient", patient, 0,
                       [&](TxContext& ctx) { treatment::withdraw_by_patient(ctx, eb_id); });
    return r;
}

inline Result withdraw_by_hospital(World& w, const Address& hospital, EntityId eb_id) {
    Result r;
    r.receipt = w.call(ContractId::Treatment, "withdraw_by_hospital", hospital, 0,
                       [&](TxContext& ctx) { treatment::withdraw_by_hospital(ctx, eb_id); });
    return r;
}

// --- insurance -----------------------------------------------------------------

inline Result buy_policy_phase_one(World& w, const Address& buyer, EntityId ic_id,
                                   const Digest& terms_hash, Amount price) {
    Result r;
    r.receipt = w.call(ContractId::Insurance, "buy_policy_phase_one", buyer, price,
                       [&](TxContext& ctx) {
                           insurance::buy_policy_phase_one(ctx, ic_id, terms_hash);
                       });
    return r;
}

inline Result buy_policy_phase_two(World& w, const Address& insurer, EntityId buyer_pid,
                                   Amount price, const Digest& terms_hash) {
    Result r;
    r.receipt = w.call(ContractId::Insurance, "buy_policy_phase_two", insurer, 0,
                       [&](TxContext& ctx) {
                           r.id = insurance::buy_policy_phase_two(ctx, buyer_pid, price,
                                                                  terms_hash);
                       });
    return r;
}

inline Result withdraw_locked_policy_buying_money(World& w, const Address& buyer,
                                                  EntityId ic_id) {
    Result r;
    r.receipt = w.call(ContractId::Insurance, "withdraw_locked_policy_buying_money", buyer, 0,
                       [&](TxContext& ctx) {
                           insurance::withdraw_locked_policy_buying_money(ctx, ic_id);
                       });
    return r;
}

inline Result claim_money(World& w, const Address& buyer, EntityId po_id, EntityId eb_id,
                          EntityId as_id, Amount claimed, const Digest& comm_k) {
    Result r;
    r.receipt = w.call(ContractId::Insurance, "claim_money", buyer, 0, [&](TxContext& ctx) {
        r.id = insurance::claim_money(ctx, po_id, eb_id, as_id, claimed, comm_k);
    });
    return r;
}

inline Result keep_sig_on_hash_of_enc_file(World& w, const Address& dbo, EntityId c_id,
                                           const Digest& enc_hash, const Signature& sig) {
    Result r;
    r.receipt = w.call(ContractId::Insurance, "keep_sig_on_hash_of_enc_file", dbo, 0,
                       [&](TxContext& ctx) {
                           insurance::keep_sig_on_hash_of_enc_file(ctx, c_id, enc_hash, sig);
                       });
    return r;
}

inline Result lock_claimed_money(World& w, const Address& insurer, EntityId c_id, Amount value) {
    Result r;
    r.receipt = w.call(ContractId::Insurance, "lock_claimed_money", insurer, value,
                       [&](TxContext& ctx) { insurance::lock_claimed_money(ctx, c_id); });
    return r;
}

inline Result reveal_secret_key(World& w, const Address& buyer, EntityId c_id, const SymKey& k) {
    Result r;
    r.receipt = w.call(ContractId::Insurance, "reveal_secret_key", buyer, 0,
                       [&](TxContext& ctx) { insurance::reveal_secret_key(ctx, c_id, k); });
    return r;
}

inline Result withdraw_locked_claimed_money(World& w, const Address& insurer, EntityId c_id) {
    Result r;
    r.receipt = w.call(ContractId::Insurance, "withdraw_locked_claimed_money", insurer, 0,
                       [&](TxContext& ctx) {
                           insurance::withdraw_locked_claimed_money(ctx, c_id);
                       });
    return r;
}

inline Result approve_claim(World& w, const Address& insurer, EntityId c_id, Amount approved) {
    Result r;
    r.receipt = w.call(ContractId::Insurance, "approve_claim", insurer, 0,
                       [&](TxContext& ctx) { insurance::approve_claim(ctx, c_id, approved); });
    return r;
}

inline Result self_approve_claim(World& w, const Address& buyer, EntityId c_id) {
    Result r;
    r.receipt = w.call(ContractId::Insurance, "self_approve_claim", buyer, 0,
                       [&](TxContext& ctx) { insurance::self_approve_claim(ctx, c_id); });
    return r;
}

inline Result compensate_from_security(World& w, const Address& buyer, EntityId c_id) {
    Result r;
    r.receipt = w.call(ContractId::Insurance, "compensate_from_security", buyer, 0,
                       [&](TxContext& ctx) { insurance::compensate_from_security(ctx, c_id); });
    return r;
}

// --- storage ----------------------------------------------------------------------

inline Result apply_for_storing(World& w, const Address& patient, EntityId dbo_id,
                                EntityId ms_id, Amount fee) {
    Result r;
    r.receipt = w.call(ContractId::Storage, "apply_for_storing", patient, fee,
                       [&](TxContext& ctx) {
                           r.id = storage::apply_for_storing(ctx, dbo_id, ms_id);
                       });
    return r;
}

inline Result dbo_verify_roots(World& w, const Address& dbo, EntityId as_id,
                               const Digest& mr_file, const Digest& mr_enc) {
    Result r;
    r.receipt = w.call(ContractId::Storage, "dbo_verify_roots", dbo, 0, [&](TxContext& ctx) {
        storage::dbo_verify_roots(ctx, as_id, mr_file, mr_enc);
    });
    return r;
}

inline Result storage_key_reveal(World& w, const Address& patient, EntityId as_id,
                                 const SymKey& key) {
    Result r;
    r.receipt = w.call(ContractId::Storage, "storage_key_reveal", patient, 0,
                       [&](TxContext& ctx) { storage::storage_key_reveal(ctx, as_id, key); });
    return r;
}

inline Result dbo_approve(World& w, const Address& dbo, EntityId as_id) {
    Result r;
    r.receipt = w.call(ContractId::Storage, "dbo_approve", dbo, 0,
                       [&](TxContext& ctx) { storage::dbo_approve(ctx, as_id); });
    return r;
}

inline Result dbo_complain(World& w, const Address& dbo, EntityId as_id,
                           const fairswap::Complaint& complaint) {
    Result r;
    r.receipt = w.call(ContractId::Storage, "dbo_complain", dbo, 0, [&](TxContext& ctx) {
        r.verdict = storage::dbo_complain(ctx, as_id, complaint);
    });
    return r;
}

inline Result withdraw_storage(World& w, const Address& caller, EntityId as_id) {
    Result r;
    r.receipt = w.call(ContractId::Storage, "withdraw_storage", caller, 0,
                       [&](TxContext& ctx) { storage::withdraw_storage(ctx, as_id); });
    return r;
}

// --- research ----------------------------------------------------------------------

inline Result request_data_for_research(World& w, const Address& rc, EntityId dbo_id,
                                        const Digest& hash_query) {
    Result r;
    r.receipt = w.call(ContractId::Research, "request_data_for_research", rc, 0,
                       [&](TxContext& ctx) {
                           r.id = research::request_data_for_research(ctx, dbo_id, hash_query);
                       });
    return r;
}

inline Result provide_data_for_research(World& w, const Address& dbo, EntityId rd_id,
                                        const Digest& hash_data, const Signature& sign) {
    Result r;
    r.receipt = w.call(ContractId::Research, "provide_data_for_research", dbo, 0,
                       [&](TxContext& ctx) {
                           research::provide_data_for_research(ctx, rd_id, hash_data, sign);
                       });
    return r;
}

}  // namespace medchain::calls
