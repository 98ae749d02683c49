#pragma once

#include <optional>

#include "medchain/ledger.hpp"

namespace medchain::registry {

/// Identity issuance for the five entity kinds. Database owners and research
/// communities are onboarded only by the government address; everyone else
/// registers their own key. Returns the minted dense sequential id.
EntityId register_entity(TxContext& ctx, EntityKind kind, const Address& addr,
                         const Digest& info_digest);

void grant_access(TxContext& ctx, EntityId owner_pid, const Address& grantee,
                  AccessCategory category);
void revoke_access(TxContext& ctx, EntityId owner_pid, const Address& grantee,
                   AccessCategory category);

/// Pure read; default-deny.
bool has_access(const ChainState& st, EntityId owner_pid, const Address& grantee,
                AccessCategory category);

/// Insurer collateral. Withdrawals must leave the deposit at or above the
/// costliest listed policy price.
void deposit_security(TxContext& ctx, Amount amount);
void withdraw_security(TxContext& ctx, Amount amount);

/// Called by the insurer when it lists a policy in its local table; keeps the
/// on-chain threshold current and refuses listings the deposit cannot back.
void note_policy_listed(TxContext& ctx, Amount price);

/// Contract-internal: flags the insurer, draining is handled by the caller.
void deregister_insurer(TxContext& ctx, EntityId ic_id);

bool is_deregistered(const ChainState& st, EntityId ic_id);

// lookup helpers (pure)
std::optional<EntityId> id_of(const ChainState& st, EntityKind kind, const Address& addr);
std::optional<Address> addr_of(const ChainState& st, EntityKind kind, EntityId id);

/// Resolves the caller to its id under `kind`, reverting on mismatch.
EntityId require_kind(TxContext& ctx, EntityKind kind);

bool is_registered_any(const ChainState& st, const Address& addr);

}  // namespace medchain::registry
