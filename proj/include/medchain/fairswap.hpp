#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "medchain/bytes.hpp"
#include "medchain/crypto.hpp"

namespace medchain::fairswap {

using crypto::Digest;
using crypto::MerkleProof;
using crypto::SymKey;

/// Geometry of a chunked file: the circuit over its chunks is the Merkle tree
/// itself (binary gates), so depth = ceil(log2(chunk count)).
struct FileProperties {
    std::uint64_t file_size = 0;   // original byte length, pre-padding
    std::uint32_t chunk_size = 0;  // buffer size per leaf
    std::uint32_t depth = 0;

    std::uint64_t leaf_count() const { return 1ull << depth; }
    std::uint64_t element_count() const { return 2 * leaf_count() - 1; }
    std::uint64_t root_index() const { return element_count() - 1; }

    bool operator==(const FileProperties&) const = default;

    Bytes encode() const;
    static FileProperties decode(ByteReader& r);
};

/// Flat element numbering: leaves first (0..n-1), then gate levels bottom-up;
/// the root element is last. Gate level 1 sits directly above the leaves.
struct Circuit {
    explicit Circuit(const FileProperties& p) : props(p) {}
    FileProperties props;

    bool is_leaf(std::uint64_t index) const { return index < props.leaf_count(); }
    std::uint32_t level_of(std::uint64_t index) const;
    std::uint64_t level_offset(std::uint32_t level) const;
    /// Children element indices of an internal gate.
    std::pair<std::uint64_t, std::uint64_t> children(std::uint64_t gate) const;
    /// The gate output: level-1 gates lift raw chunks through the leaf
    /// encoding, higher gates concatenate 32-byte child digests.
    Digest gate_output(std::uint32_t gate_level, ByteView left, ByteView right) const;
};

/// All gate outputs of the circuit over the padded chunks. Leaves hold the raw
/// chunks; internal positions hold 32-byte digests. The root element equals
/// the Merkle root of the plaintext chunks (M1).
struct CircuitEncoding {
    FileProperties props;
    std::vector<Bytes> elements;

    Digest root_as_digest() const;
};

struct EncryptedEncoding {
    FileProperties props;
    std::vector<Bytes> cipher_elements;  // cipher_elements[i] = Enc(key, i, elements[i])
};

struct EncodeResult {
    FileProperties props;
    CircuitEncoding circuit;
    EncryptedEncoding encrypted;
    Digest m1;  // Merkle root of the plaintext chunks
    Digest m2;  // Merkle root over the encrypted elements
};

/// Succinct proof of misbehavior. A gate complaint carries the ciphertexts of
/// the disputed gate's two inputs and its output with one inclusion proof each
/// against M2. A root complaint carries only the encrypted root element and
/// disputes its linkage to the published M1.
struct Complaint {
    enum class Kind : std::uint8_t { Gate = 0, Root = 1 };
    Kind kind = Kind::Gate;
    std::uint64_t gate_index = 0;
    std::vector<Bytes> encoded_vectors;
    std::vector<MerkleProof> proofs;

    /// Canonical byte encoding: length-prefixed fields, big-endian integers.
    Bytes encode() const;
    static Complaint decode(ByteView data);
    std::size_t byte_size() const { return encode().size(); }
};

inline constexpr std::uint32_t kMaxLinesToGate = 2;  // binary gates

struct EmptyFileError : std::runtime_error {
    EmptyFileError() : std::runtime_error("empty file") {}
};

/// Chunk, evaluate the hash circuit, encrypt every gate output, and commit via
/// the two Merkle roots. Deterministic given (file, chunk_size, key).
EncodeResult encode(ByteView file, std::uint32_t chunk_size, const SymKey& key);

Digest merkle_root_of_elements(const std::vector<Bytes>& cipher_elements);

struct DecodeOutcome {
    std::optional<Bytes> file;          // set when every check passed
    std::optional<Complaint> complaint; // set when a gate or the root is ill-formed
};

/// Decrypts the delivered encoding and re-runs the circuit gate by gate.
/// Returns the plaintext file when consistent with M1, otherwise a complaint
/// naming the first ill-formed gate (or the root linkage). The caller is
/// responsible for having checked that the delivered elements hash to the
/// on-chain M2 before the key was revealed.
DecodeOutcome decode_and_check(const EncryptedEncoding& delivered, const SymKey& key,
                               const Digest& m1);

/// On-chain gate-complaint check: true iff the proofs bind the ciphertexts to
/// M2, the arity bound holds, and the recomputed gate output differs from the
/// decrypted one. True means the seller misbehaved.
bool verify_complaint(const Complaint& c, const Digest& m2, const SymKey& key,
                      const FileProperties& props);

/// On-chain root-complaint check: true iff the proof binds the encrypted root
/// element to M2 and its decryption does not match the published M1.
bool verify_root_complaint(const Complaint& c, const Digest& m2, const SymKey& key,
                           const Digest& m1, const FileProperties& props);

/// Dispatch on complaint kind; used by the contracts.
bool verify_any_complaint(const Complaint& c, const Digest& m2, const SymKey& key,
                          const Digest& m1, const FileProperties& props);

}  // namespace medchain::fairswap
