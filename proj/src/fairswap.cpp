#include "medchain/fairswap.hpp"

#include <algorithm>
#include <cassert>

namespace medchain::fairswap {

using crypto::MerkleTree;

Bytes FileProperties::encode() const {
    ByteWriter w;
    w.u64(file_size);
    w.u32(chunk_size);
    w.u32(depth);
    return w.take();
}

FileProperties FileProperties::decode(ByteReader& r) {
    FileProperties p;
    p.file_size = r.u64();
    p.chunk_size = r.u32();
    p.depth = r.u32();
    return p;
}

std::uint32_t Circuit::level_of(std::uint64_t index) const {
    std::uint64_t n = props.leaf_count();
    std::uint32_t level = 0;
    std::uint64_t offset = 0;
    std::uint64_t width = n;
    while (index >= offset + width) {
        offset += width;
        width /= 2;
        ++level;
    }
    return level;
}

std::uint64_t Circuit::level_offset(std::uint32_t level) const {
    std::uint64_t n = props.leaf_count();
    std::uint64_t offset = 0;
    std::uint64_t width = n;
    for (std::uint32_t l = 0; l < level; ++l) {
        offset += width;
        width /= 2;
    }
    return offset;
}

std::pair<std::uint64_t, std::uint64_t> Circuit::children(std::uint64_t gate) const {
    std::uint32_t level = level_of(gate);
    if (level == 0) throw DecodeError("leaf has no children");
    std::uint64_t j = gate - level_offset(level);
    std::uint64_t child_base = level_offset(level - 1);
    return {child_base + 2 * j, child_base + 2 * j + 1};
}

Digest Circuit::gate_output(std::uint32_t gate_level, ByteView left, ByteView right) const {
    if (gate_level == 1) {
        return crypto::node_digest(crypto::leaf_digest(left), crypto::leaf_digest(right));
    }
    crypto::Sha256 h;
    std::uint8_t tag = 0x01;
    h.update(ByteView(&tag, 1));
    h.update(left);
    h.update(right);
    return h.finish();
}

Digest CircuitEncoding::root_as_digest() const {
    const Bytes& root = elements.back();
    if (props.depth == 0) return crypto::leaf_digest(ByteView(root.data(), root.size()));
    return Digest::from_bytes(ByteView(root.data(), root.size()));
}

Bytes Complaint::encode() const {
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(kind));
    w.u64(gate_index);
    w.u32(static_cast<std::uint32_t>(encoded_vectors.size()));
    for (const auto& v : encoded_vectors) w.blob(ByteView(v.data(), v.size()));
    w.u32(static_cast<std::uint32_t>(proofs.size()));
    for (const auto& p : proofs) {
        Bytes enc = p.encode();
        w.blob(ByteView(enc.data(), enc.size()));
    }
    return w.take();
}

Complaint Complaint::decode(ByteView data) {
    ByteReader r(data);
    Complaint c;
    std::uint8_t k = r.u8();
    if (k > 1) throw DecodeError("bad complaint kind");
    c.kind = static_cast<Kind>(k);
    c.gate_index = r.u64();
    std::uint32_t nv = r.u32();
    if (nv > kMaxLinesToGate + 1) throw DecodeError("too many complaint vectors");
    for (std::uint32_t i = 0; i < nv; ++i) c.encoded_vectors.push_back(r.blob());
    std::uint32_t np = r.u32();
    if (np > kMaxLinesToGate + 1) throw DecodeError("too many complaint proofs");
    for (std::uint32_t i = 0; i < np; ++i) {
        Bytes enc = r.blob();
        ByteReader pr(ByteView(enc.data(), enc.size()));
        c.proofs.push_back(MerkleProof::decode(pr));
    }
    if (!r.empty()) throw DecodeError("trailing complaint bytes");
    return c;
}

EncodeResult encode(ByteView file, std::uint32_t chunk_size, const SymKey& key) {
    if (file.empty()) throw EmptyFileError();
    if (chunk_size == 0) throw DecodeError("chunk size must be positive");

    std::uint64_t chunk_count = (file.size() + chunk_size - 1) / chunk_size;
    std::uint32_t depth = 0;
    while ((1ull << depth) < chunk_count) ++depth;

    FileProperties props{file.size(), chunk_size, depth};
    std::uint64_t n = props.leaf_count();

    CircuitEncoding circuit;
    circuit.props = props;
    circuit.elements.reserve(props.element_count());
    for (std::uint64_t i = 0; i < n; ++i) {
        Bytes chunk(chunk_size, 0x00);
        std::uint64_t off = i * chunk_size;
        if (off < file.size()) {
            std::size_t take = std::min<std::size_t>(chunk_size, file.size() - off);
            std::copy(file.begin() + off, file.begin() + off + take, chunk.begin());
        }
        circuit.elements.push_back(std::move(chunk));
    }

    Circuit geom(props);
    for (std::uint64_t g = n; g < props.element_count(); ++g) {
        auto [cl, cr] = geom.children(g);
        const Bytes& left = circuit.elements[cl];
        const Bytes& right = circuit.elements[cr];
        Digest out = geom.gate_output(geom.level_of(g), ByteView(left.data(), left.size()),
                                      ByteView(right.data(), right.size()));
        circuit.elements.push_back(out.bytes());
    }

    Digest m1 = circuit.root_as_digest();

    EncryptedEncoding enc;
    enc.props = props;
    enc.cipher_elements.reserve(circuit.elements.size());
    for (std::uint64_t i = 0; i < circuit.elements.size(); ++i) {
        const Bytes& e = circuit.elements[i];
        enc.cipher_elements.push_back(crypto::sym_encrypt(key, i, ByteView(e.data(), e.size())));
    }

    Digest m2 = merkle_root_of_elements(enc.cipher_elements);
    return EncodeResult{props, std::move(circuit), std::move(enc), m1, m2};
}

Digest merkle_root_of_elements(const std::vector<Bytes>& cipher_elements) {
    return MerkleTree::build(cipher_elements).root();
}

DecodeOutcome decode_and_check(const EncryptedEncoding& delivered, const SymKey& key,
                               const Digest& m1) {
    const FileProperties& props = delivered.props;
    Circuit geom(props);
    DecodeOutcome out;

    if (delivered.cipher_elements.size() != props.element_count()) {
        // Structurally unusable delivery; no gate to point at. Treated the
        // same as an offline non-delivery by callers.
        return out;
    }
    // Leaf ciphertexts must carry exactly one chunk each. The stream cipher
    // preserves length, so an off-size leaf was committed that way and no
    // gate equation can dispute it; the delivery is unusable, not provably
    // wrong. Off-size internal elements lose their gate equation instead.
    for (std::uint64_t i = 0; i < props.leaf_count(); ++i) {
        if (delivered.cipher_elements[i].size() != props.chunk_size) return out;
    }

    std::vector<Bytes> elements;
    elements.reserve(delivered.cipher_elements.size());
    for (std::uint64_t i = 0; i < delivered.cipher_elements.size(); ++i) {
        const Bytes& c = delivered.cipher_elements[i];
        elements.push_back(crypto::sym_decrypt(key, i, ByteView(c.data(), c.size())));
    }

    MerkleTree m2_tree = MerkleTree::build(delivered.cipher_elements);

    auto make_complaint = [&](Complaint::Kind kind, std::uint64_t gate) {
        Complaint c;
        c.kind = kind;
        c.gate_index = gate;
        if (kind == Complaint::Kind::Gate) {
            auto [cl, cr] = geom.children(gate);
            for (std::uint64_t idx : {cl, cr, gate}) {
                c.encoded_vectors.push_back(delivered.cipher_elements[idx]);
                c.proofs.push_back(m2_tree.prove(idx));
            }
        } else {
            std::uint64_t root = props.root_index();
            c.encoded_vectors.push_back(delivered.cipher_elements[root]);
            c.proofs.push_back(m2_tree.prove(root));
        }
        return c;
    };

    std::uint64_t n = props.leaf_count();
    for (std::uint64_t g = n; g < props.element_count(); ++g) {
        auto [cl, cr] = geom.children(g);
        const Bytes& left = elements[cl];
        const Bytes& right = elements[cr];
        Digest expected = geom.gate_output(geom.level_of(g), ByteView(left.data(), left.size()),
                                           ByteView(right.data(), right.size()));
        if (elements[g] != expected.bytes()) {
            out.complaint = make_complaint(Complaint::Kind::Gate, g);
            return out;
        }
    }

    // Every gate checked out; the root element must match the published M1.
    Digest root = props.depth == 0
                      ? crypto::leaf_digest(ByteView(elements[0].data(), elements[0].size()))
                      : (elements.back().size() == 32
                             ? Digest::from_bytes(ByteView(elements.back().data(), 32))
                             : Digest{});
    if (props.depth != 0 && elements.back().size() != 32) {
        out.complaint = make_complaint(Complaint::Kind::Root, props.root_index());
        return out;
    }
    if (root != m1) {
        out.complaint = make_complaint(Complaint::Kind::Root, props.root_index());
        return out;
    }

    std::uint64_t full_chunks = props.file_size / props.chunk_size;
    Bytes file;
    file.reserve(props.file_size);
    for (std::uint64_t i = 0; i < full_chunks; ++i)
        file.insert(file.end(), elements[i].begin(), elements[i].end());
    std::uint64_t rest = props.file_size - full_chunks * props.chunk_size;
    if (rest > 0)
        file.insert(file.end(), elements[full_chunks].begin(),
                    elements[full_chunks].begin() + rest);
    out.file = std::move(file);
    return out;
}

bool verify_complaint(const Complaint& c, const Digest& m2, const SymKey& key,
                      const FileProperties& props) {
    if (c.kind != Complaint::Kind::Gate) return false;
    if (c.encoded_vectors.size() != kMaxLinesToGate + 1) return false;
    if (c.proofs.size() != c.encoded_vectors.size()) return false;

    Circuit geom(props);
    std::uint64_t n = props.leaf_count();
    if (c.gate_index < n || c.gate_index >= props.element_count()) return false;

    auto [cl, cr] = geom.children(c.gate_index);
    const std::uint64_t positions[3] = {cl, cr, c.gate_index};
    for (int i = 0; i < 3; ++i) {
        if (c.proofs[i].leaf_index != positions[i]) return false;
        const Bytes& v = c.encoded_vectors[i];
        if (!MerkleTree::verify(m2, ByteView(v.data(), v.size()), c.proofs[i])) return false;
    }

    Bytes left = crypto::sym_decrypt(key, cl, ByteView(c.encoded_vectors[0].data(),
                                                       c.encoded_vectors[0].size()));
    Bytes right = crypto::sym_decrypt(key, cr, ByteView(c.encoded_vectors[1].data(),
                                                        c.encoded_vectors[1].size()));
    Bytes claimed = crypto::sym_decrypt(key, c.gate_index,
                                        ByteView(c.encoded_vectors[2].data(),
                                                 c.encoded_vectors[2].size()));
    Digest expected = geom.gate_output(geom.level_of(c.gate_index),
                                       ByteView(left.data(), left.size()),
                                       ByteView(right.data(), right.size()));
    return claimed != expected.bytes();
}

bool verify_root_complaint(const Complaint& c, const Digest& m2, const SymKey& key,
                           const Digest& m1, const FileProperties& props) {
    if (c.kind != Complaint::Kind::Root) return false;
    if (c.encoded_vectors.size() != 1 || c.proofs.size() != 1) return false;
    std::uint64_t root = props.root_index();
    if (c.gate_index != root || c.proofs[0].leaf_index != root) return false;
    const Bytes& v = c.encoded_vectors[0];
    if (!MerkleTree::verify(m2, ByteView(v.data(), v.size()), c.proofs[0])) return false;

    Bytes plain = crypto::sym_decrypt(key, root, ByteView(v.data(), v.size()));
    if (props.depth == 0)
        return crypto::leaf_digest(ByteView(plain.data(), plain.size())) != m1;
    if (plain.size() != 32) return true;
    return Digest::from_bytes(ByteView(plain.data(), 32)) != m1;
}

bool verify_any_complaint(const Complaint& c, const Digest& m2, const SymKey& key,
                          const Digest& m1, const FileProperties& props) {
    if (c.kind == Complaint::Kind::Gate) return verify_complaint(c, m2, key, props);
    return verify_root_complaint(c, m2, key, m1, props);
}

}  // namespace medchain::fairswap
