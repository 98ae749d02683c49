#pragma once

#include <deque>
#include <map>
#include <string>
#include <vector>

#include "medchain/types.hpp"

namespace medchain {

/// Authenticated out-of-band channel, separate from chain state. File and key
/// handoffs travel here so tests can drop or corrupt them independently of
/// the ledger.
struct OfflineMessage {
    std::uint64_t id = 0;
    Tick sent_at = 0;
    Address from;
    Address to;
    std::string kind;  // e.g. "encoded_file", "claim_key", "enc_data", "dataset"
    Bytes payload;
};

class OfflineBus {
public:
    std::uint64_t send(Tick now, const Address& from, const Address& to, std::string kind,
                       Bytes payload);

    /// Drains the recipient's inbox.
    std::vector<OfflineMessage> receive(const Address& to);

    const std::vector<OfflineMessage>& log() const { return log_; }

private:
    std::map<Address, std::deque<OfflineMessage>> inboxes_;
    std::vector<OfflineMessage> log_;
    std::uint64_t next_id_ = 1;
};

}  // namespace medchain
