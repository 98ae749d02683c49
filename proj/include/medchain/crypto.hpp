#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "medchain/bytes.hpp"

namespace medchain::crypto {

/// 32-byte message digest. Equality is bitwise.
struct Digest {
    std::array<std::uint8_t, 32> v{};

    auto operator<=>(const Digest&) const = default;
    std::string hex() const { return hex_encode(ByteView(v.data(), v.size())); }
    ByteView view() const { return ByteView(v.data(), v.size()); }
    Bytes bytes() const { return Bytes(v.begin(), v.end()); }
    bool is_zero() const;

    static Digest from_hex(std::string_view hex);
    static Digest from_bytes(ByteView b);
};

/// Incremental SHA-256.
class Sha256 {
public:
    Sha256();
    Sha256& update(ByteView data);
    Digest finish();

private:
    void process_block(const std::uint8_t* block);
    std::array<std::uint32_t, 8> state_;
    std::array<std::uint8_t, 64> buffer_;
    std::uint64_t total_len_ = 0;
    std::size_t buffer_len_ = 0;
};

Digest hash(ByteView data);
Digest hash(const Bytes& data);

// --- signatures (Ed25519) ---------------------------------------------------

struct Signature {
    std::array<std::uint8_t, 64> v{};
    auto operator<=>(const Signature&) const = default;
    std::string hex() const { return hex_encode(ByteView(v.data(), v.size())); }
    Bytes bytes() const { return Bytes(v.begin(), v.end()); }
    static Signature from_bytes(ByteView b);
};

/// Verification key doubles as the entity address on the simulated chain.
struct VerifyKey {
    std::array<std::uint8_t, 32> v{};
    auto operator<=>(const VerifyKey&) const = default;
    std::string hex() const { return hex_encode(ByteView(v.data(), v.size())); }
    ByteView view() const { return ByteView(v.data(), v.size()); }
    static VerifyKey from_hex(std::string_view hex);
};

struct KeyPair {
    VerifyKey vk;
    std::array<std::uint8_t, 64> sk{};

    /// Deterministic key derivation from a 32-byte seed.
    static KeyPair from_seed(const Digest& seed);
};

Signature sign(const KeyPair& kp, ByteView msg);
bool verify_sig(const VerifyKey& vk, ByteView msg, const Signature& sig);

// --- symmetric cipher and commitments ---------------------------------------

/// 32-byte symmetric key. The cipher is an index-bound XOR stream: the pad for
/// element `index` is derived from (key, index, block counter), so equal
/// plaintexts at different positions encrypt differently.
struct SymKey {
    std::array<std::uint8_t, 32> v{};
    auto operator<=>(const SymKey&) const = default;
    std::string hex() const { return hex_encode(ByteView(v.data(), v.size())); }
    ByteView view() const { return ByteView(v.data(), v.size()); }
    static SymKey from_digest(const Digest& d);
};

Bytes sym_encrypt(const SymKey& key, std::uint64_t index, ByteView value);
Bytes sym_decrypt(const SymKey& key, std::uint64_t index, ByteView value);

/// Hash commitment to a symmetric key: comm = H(key).
Digest commit_key(const SymKey& key);
bool check_commitment(const SymKey& key, const Digest& commitment);

/// Deterministic byte stream expanded from a seed; harness-side data generator.
Bytes expand_stream(const Digest& seed, std::size_t len);

// --- Merkle tree -------------------------------------------------------------

/// Leaf encoding is domain-separated from internal nodes: leaf digest is
/// H(0x00 || chunk), parent is H(0x01 || left || right).
Digest leaf_digest(ByteView chunk);
Digest node_digest(const Digest& left, const Digest& right);

struct ProofStep {
    Digest sibling;
    bool sibling_on_right = false;
};

struct MerkleProof {
    std::uint64_t leaf_index = 0;
    std::vector<ProofStep> steps;

    Bytes encode() const;
    static MerkleProof decode(ByteReader& r);
};

class MerkleTree {
public:
    /// Builds over the given chunks. If the count is not a power of two,
    /// all-zero chunks of the first chunk's size are appended; the pad count
    /// is recorded. Throws DecodeError("empty input") on an empty list.
    static MerkleTree build(const std::vector<Bytes>& chunks);

    const Digest& root() const { return levels_.back()[0]; }
    std::size_t leaf_count() const { return levels_[0].size(); }
    std::size_t padded_leaves() const { return pad_count_; }
    std::size_t depth() const { return levels_.size() - 1; }

    MerkleProof prove(std::uint64_t index) const;
    static bool verify(const Digest& root, ByteView leaf, const MerkleProof& proof);

private:
    std::vector<std::vector<Digest>> levels_;  // levels_[0] = leaf digests
    std::size_t pad_count_ = 0;
};

}  // namespace medchain::crypto
