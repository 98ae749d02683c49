#include "medchain/offline_bus.hpp"

namespace medchain {

std::uint64_t OfflineBus::send(Tick now, const Address& from, const Address& to,
                               std::string kind, Bytes payload) {
    OfflineMessage m;
    m.id = next_id_++;
    m.sent_at = now;
    m.from = from;
    m.to = to;
    m.kind = std::move(kind);
    m.payload = std::move(payload);
    log_.push_back(m);
    inboxes_[to].push_back(std::move(m));
    return log_.back().id;
}

std::vector<OfflineMessage> OfflineBus::receive(const Address& to) {
    auto it = inboxes_.find(to);
    if (it == inboxes_.end()) return {};
    std::vector<OfflineMessage> out(it->second.begin(), it->second.end());
    it->second.clear();
    return out;
}

}  // namespace medchain
