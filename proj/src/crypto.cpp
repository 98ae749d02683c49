#include "medchain/crypto.hpp"

#include <sodium.h>

#include <bit>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace medchain::crypto {

bool Digest::is_zero() const {
    for (auto b : v)
        if (b != 0) return false;
    return true;
}

Digest Digest::from_hex(std::string_view hex) {
    Bytes b = hex_decode(hex);
    return from_bytes(b);
}

Digest Digest::from_bytes(ByteView b) {
    if (b.size() != 32) throw DecodeError("digest must be 32 bytes");
    Digest d;
    std::memcpy(d.v.data(), b.data(), 32);
    return d;
}

// --- SHA-256 (FIPS 180-4) -----------------------------------------------------

namespace {

constexpr std::uint32_t kInit[8] = {
    0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
    0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19,
};

constexpr std::uint32_t kRound[64] = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
    0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
    0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
    0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
    0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
    0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
    0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
    0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2,
};

inline std::uint32_t rotr(std::uint32_t x, int n) { return std::rotr(x, n); }

}  // namespace

Sha256::Sha256() {
    std::memcpy(state_.data(), kInit, sizeof(kInit));
}

void Sha256::process_block(const std::uint8_t* block) {
    std::uint32_t w[64];
    for (int i = 0; i < 16; ++i) {
        w[i] = (std::uint32_t(block[i * 4]) << 24) | (std::uint32_t(block[i * 4 + 1]) << 16) |
               (std::uint32_t(block[i * 4 + 2]) << 8) | std::uint32_t(block[i * 4 + 3]);
    }
    for (int i = 16; i < 64; ++i) {
        std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
        std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
        w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    std::uint32_t a = state_[0], b = state_[1], c = state_[2], d = state_[3];
    std::uint32_t e = state_[4], f = state_[5], g = state_[6], h = state_[7];
    for (int i = 0; i < 64; ++i) {
        std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
        std::uint32_t ch = (e & f) ^ (~e & g);
        std::uint32_t t1 = h + s1 + ch + kRound[i] + w[i];
        std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
        std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
        std::uint32_t t2 = s0 + maj;
        h = g;
        g = f;
        f = e;
        e = d + t1;
        d = c;
        c = b;
        b = a;
        a = t1 + t2;
    }
    state_[0] += a;
    state_[1] += b;
    state_[2] += c;
    state_[3] += d;
    state_[4] += e;
    state_[5] += f;
    state_[6] += g;
    state_[7] += h;
}

Sha256& Sha256::update(ByteView data) {
    total_len_ += data.size();
    std::size_t off = 0;
    if (buffer_len_ > 0) {
        std::size_t take = std::min(data.size(), 64 - buffer_len_);
        std::memcpy(buffer_.data() + buffer_len_, data.data(), take);
        buffer_len_ += take;
        off += take;
        if (buffer_len_ == 64) {
            process_block(buffer_.data());
            buffer_len_ = 0;
        }
    }
    while (data.size() - off >= 64) {
        process_block(data.data() + off);
        off += 64;
    }
    if (off < data.size()) {
        std::memcpy(buffer_.data(), data.data() + off, data.size() - off);
        buffer_len_ = data.size() - off;
    }
    return *this;
}

Digest Sha256::finish() {
    std::uint64_t bit_len = total_len_ * 8;
    std::uint8_t pad = 0x80;
    update(ByteView(&pad, 1));
    std::uint8_t zero = 0x00;
    while (buffer_len_ != 56) update(ByteView(&zero, 1));
    std::uint8_t len_bytes[8];
    for (int i = 0; i < 8; ++i) len_bytes[i] = static_cast<std::uint8_t>(bit_len >> (56 - i * 8));
    // bypass total_len_ accounting for the trailer
    std::memcpy(buffer_.data() + 56, len_bytes, 8);
    process_block(buffer_.data());

    Digest d;
    for (int i = 0; i < 8; ++i) {
        d.v[i * 4] = static_cast<std::uint8_t>(state_[i] >> 24);
        d.v[i * 4 + 1] = static_cast<std::uint8_t>(state_[i] >> 16);
        d.v[i * 4 + 2] = static_cast<std::uint8_t>(state_[i] >> 8);
        d.v[i * 4 + 3] = static_cast<std::uint8_t>(state_[i]);
    }
    return d;
}

Digest hash(ByteView data) {
    Sha256 h;
    h.update(data);
    return h.finish();
}

Digest hash(const Bytes& data) {
    return hash(ByteView(data.data(), data.size()));
}

// --- signatures ----------------------------------------------------------------

namespace {
void ensure_sodium() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0) throw std::runtime_error("sodium_init failed");
    });
}
}  // namespace

Signature Signature::from_bytes(ByteView b) {
    if (b.size() != 64) throw DecodeError("signature must be 64 bytes");
    Signature s;
    std::memcpy(s.v.data(), b.data(), 64);
    return s;
}

VerifyKey VerifyKey::from_hex(std::string_view hex) {
    Bytes b = hex_decode(hex);
    if (b.size() != 32) throw DecodeError("verify key must be 32 bytes");
    VerifyKey k;
    std::memcpy(k.v.data(), b.data(), 32);
    return k;
}

KeyPair KeyPair::from_seed(const Digest& seed) {
    ensure_sodium();
    static_assert(crypto_sign_SEEDBYTES == 32);
    KeyPair kp;
    crypto_sign_seed_keypair(kp.vk.v.data(), kp.sk.data(), seed.v.data());
    return kp;
}

Signature sign(const KeyPair& kp, ByteView msg) {
    ensure_sodium();
    Signature sig;
    crypto_sign_detached(sig.v.data(), nullptr, msg.data(), msg.size(), kp.sk.data());
    return sig;
}

bool verify_sig(const VerifyKey& vk, ByteView msg, const Signature& sig) {
    ensure_sodium();
    return crypto_sign_verify_detached(sig.v.data(), msg.data(), msg.size(), vk.v.data()) == 0;
}

// --- symmetric cipher ------------------------------------------------------------

SymKey SymKey::from_digest(const Digest& d) {
    SymKey k;
    k.v = d.v;
    return k;
}

static Bytes xor_stream(const SymKey& key, std::uint64_t index, ByteView value) {
    Bytes out(value.begin(), value.end());
    std::size_t off = 0;
    std::uint64_t block = 0;
    while (off < out.size()) {
        ByteWriter w;
        w.raw(key.view());
        w.u64(index);
        w.u64(block);
        Digest pad = hash(ByteView(w.bytes().data(), w.bytes().size()));
        std::size_t take = std::min<std::size_t>(32, out.size() - off);
        for (std::size_t i = 0; i < take; ++i) out[off + i] ^= pad.v[i];
        off += take;
        ++block;
    }
    return out;
}

Bytes sym_encrypt(const SymKey& key, std::uint64_t index, ByteView value) {
    return xor_stream(key, index, value);
}

Bytes sym_decrypt(const SymKey& key, std::uint64_t index, ByteView value) {
    return xor_stream(key, index, value);
}

Digest commit_key(const SymKey& key) {
    return hash(key.view());
}

bool check_commitment(const SymKey& key, const Digest& commitment) {
    return commit_key(key) == commitment;
}

Bytes expand_stream(const Digest& seed, std::size_t len) {
    Bytes out;
    out.reserve(len);
    std::uint64_t counter = 0;
    while (out.size() < len) {
        ByteWriter w;
        w.raw(seed.view());
        w.u64(counter++);
        Digest block = hash(ByteView(w.bytes().data(), w.bytes().size()));
        std::size_t take = std::min<std::size_t>(32, len - out.size());
        out.insert(out.end(), block.v.begin(), block.v.begin() + take);
    }
    return out;
}

// --- Merkle tree -------------------------------------------------------------------

Digest leaf_digest(ByteView chunk) {
    Sha256 h;
    std::uint8_t tag = 0x00;
    h.update(ByteView(&tag, 1));
    h.update(chunk);
    return h.finish();
}

Digest node_digest(const Digest& left, const Digest& right) {
    Sha256 h;
    std::uint8_t tag = 0x01;
    h.update(ByteView(&tag, 1));
    h.update(left.view());
    h.update(right.view());
    return h.finish();
}

Bytes MerkleProof::encode() const {
    ByteWriter w;
    w.u64(leaf_index);
    w.u32(static_cast<std::uint32_t>(steps.size()));
    for (const auto& s : steps) {
        w.raw(s.sibling.view());
        w.u8(s.sibling_on_right ? 1 : 0);
    }
    return w.take();
}

MerkleProof MerkleProof::decode(ByteReader& r) {
    MerkleProof p;
    p.leaf_index = r.u64();
    std::uint32_t n = r.u32();
    if (n > 64) throw DecodeError("proof too deep");
    p.steps.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        ProofStep s;
        s.sibling = Digest::from_bytes(r.raw(32));
        s.sibling_on_right = r.u8() != 0;
        p.steps.push_back(s);
    }
    return p;
}

MerkleTree MerkleTree::build(const std::vector<Bytes>& chunks) {
    if (chunks.empty()) throw DecodeError("empty input");
    MerkleTree t;
    std::size_t n = 1;
    while (n < chunks.size()) n *= 2;
    t.pad_count_ = n - chunks.size();

    std::vector<Digest> level;
    level.reserve(n);
    for (const auto& c : chunks) level.push_back(leaf_digest(ByteView(c.data(), c.size())));
    if (t.pad_count_ > 0) {
        Bytes pad(chunks.front().size(), 0x00);
        Digest pad_leaf = leaf_digest(ByteView(pad.data(), pad.size()));
        for (std::size_t i = 0; i < t.pad_count_; ++i) level.push_back(pad_leaf);
    }
    t.levels_.push_back(std::move(level));
    while (t.levels_.back().size() > 1) {
        const auto& prev = t.levels_.back();
        std::vector<Digest> next;
        next.reserve(prev.size() / 2);
        for (std::size_t i = 0; i < prev.size(); i += 2)
            next.push_back(node_digest(prev[i], prev[i + 1]));
        t.levels_.push_back(std::move(next));
    }
    return t;
}

MerkleProof MerkleTree::prove(std::uint64_t index) const {
    if (index >= levels_[0].size()) throw DecodeError("leaf index out of range");
    MerkleProof p;
    p.leaf_index = index;
    std::uint64_t pos = index;
    for (std::size_t lvl = 0; lvl + 1 < levels_.size(); ++lvl) {
        std::uint64_t sib = pos ^ 1;
        p.steps.push_back({levels_[lvl][sib], (sib & 1) == 1});
        pos >>= 1;
    }
    return p;
}

bool MerkleTree::verify(const Digest& root, ByteView leaf, const MerkleProof& proof) {
    Digest cur = leaf_digest(leaf);
    std::uint64_t pos = proof.leaf_index;
    for (const auto& step : proof.steps) {
        // The path position must agree with the claimed sibling side.
        bool expect_right = (pos & 1) == 0;
        if (step.sibling_on_right != expect_right) return false;
        cur = expect_right ? node_digest(cur, step.sibling) : node_digest(step.sibling, cur);
        pos >>= 1;
    }
    return pos == 0 && cur == root;
}

}  // namespace medchain::crypto
