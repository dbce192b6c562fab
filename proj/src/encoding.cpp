#include "pot/encoding.hpp"

#include <limits>

#include "pot/error.hpp"

namespace pot {

void ByteWriter::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void ByteWriter::prefixed(ByteView bytes) {
  if (bytes.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kInvalidArgument, "field exceeds 4-byte length prefix");
  }
  u32(static_cast<std::uint32_t>(bytes.size()));
  raw(bytes);
}

void ByteWriter::prefixed(std::string_view text) {
  prefixed(ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void ByteReader::need(std::size_t n) const {
  if (remaining() < n) throw Error(ErrorCode::kParseError, "truncated encoding");
}

std::uint8_t ByteReader::u8() {
  need(1);
  return data_[pos_++];
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = v << 8 | data_[pos_++];
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = v << 8 | data_[pos_++];
  return v;
}

Bytes ByteReader::raw(std::size_t n) {
  need(n);
  Bytes out(data_.begin() + pos_, data_.begin() + pos_ + n);
  pos_ += n;
  return out;
}

Bytes ByteReader::prefixed() { return raw(u32()); }

Digest ByteReader::digest() {
  need(kDigestSize);
  Digest d;
  for (auto& b : d.bytes) b = data_[pos_++];
  return d;
}

void ByteReader::expect_done() const {
  if (!done()) throw Error(ErrorCode::kParseError, "trailing bytes after encoding");
}

}  // namespace pot
