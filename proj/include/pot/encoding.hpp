#pragma once

// Big-endian, length-prefixed byte encoding used for every signed or hashed
// protocol message. Integers are 8 bytes, variable-length fields carry a
// 4-byte length prefix, fixed-size fields (digests) are written raw.

#include <cstdint>
#include <string_view>

#include "pot/crypto.hpp"

namespace pot {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void raw(ByteView bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }
  void prefixed(ByteView bytes);
  void prefixed(std::string_view text);
  void digest(const Digest& d) { raw(d.bytes); }

  const Bytes& bytes() const& noexcept { return out_; }
  Bytes bytes() && noexcept { return std::move(out_); }

 private:
  Bytes out_;
};

/// Reads what ByteWriter wrote. Every accessor throws ParseError on truncation.
class ByteReader {
 public:
  explicit ByteReader(ByteView data) : data_(data) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  Bytes raw(std::size_t n);
  Bytes prefixed();
  Digest digest();

  bool done() const noexcept { return pos_ == data_.size(); }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  void expect_done() const;

 private:
  void need(std::size_t n) const;

  ByteView data_;
  std::size_t pos_ = 0;
};

}  // namespace pot
