#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace medchain {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

std::string hex_encode(ByteView data);
Bytes hex_decode(std::string_view hex);

/// Canonical byte encoder: big-endian integers, u32 length prefixes.
/// Used for wire formats whose hashes must be stable.
class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void raw(ByteView data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
    void blob(ByteView data);              // u32 length prefix + raw
    void str(std::string_view s);          // u32 length prefix + raw

    const Bytes& bytes() const { return buf_; }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

class ByteReader {
public:
    explicit ByteReader(ByteView data) : data_(data) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    Bytes raw(std::size_t n);
    Bytes blob();
    std::string str();

    bool empty() const { return pos_ == data_.size(); }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    void need(std::size_t n) const;
    ByteView data_;
    std::size_t pos_ = 0;
};

struct DecodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace medchain
