#pragma once

// Little-endian byte encoding shared by the file formats.

#include "pidmd/errors.hpp"
#include "pidmd/linalg.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace pidmd {

class ByteWriter {
 public:
  void raw(std::string_view bytes) { buf_.append(bytes); }

  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void doubles(const double* data, Index count) {
    for (Index i = 0; i < count; ++i) f64(data[i]);
  }

  std::string take() && { return std::move(buf_); }

 private:
  std::string buf_;
};

class ByteReader {
 public:
  ByteReader(std::string_view bytes, std::string context)
      : bytes_(bytes), context_(std::move(context)) {}

  void expect(std::string_view token, const std::string& message) {
    if (bytes_.substr(pos_, token.size()) != token) corrupt(message);
    pos_ += token.size();
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return v;
  }
  /// u64 that must fit an Eigen index and the remaining payload.
  Index count() {
    const std::uint64_t v = u64();
    if (v > bytes_.size()) corrupt("implausible size field");
    return static_cast<Index>(v);
  }
  double f64() { return std::bit_cast<double>(u64()); }
  void doubles(double* data, Index count) {
    need(static_cast<std::uint64_t>(count) * 8);
    for (Index i = 0; i < count; ++i) data[i] = f64();
  }
  std::string str(Index length) {
    need(static_cast<std::uint64_t>(length));
    std::string out(bytes_.substr(pos_, static_cast<std::size_t>(length)));
    pos_ += static_cast<std::size_t>(length);
    return out;
  }

  void check_remaining(std::uint64_t expected) {
    if (bytes_.size() - pos_ != expected) {
      corrupt("payload is " + std::to_string(bytes_.size() - pos_) + " bytes, expected " +
              std::to_string(expected));
    }
  }
  void finish() {
    if (pos_ != bytes_.size()) corrupt("trailing bytes");
  }

 private:
  void need(std::uint64_t n) {
    if (bytes_.size() - pos_ < n) corrupt("truncated");
  }
  [[noreturn]] void corrupt(const std::string& message) {
    fail(ErrorKind::InvalidInput, context_ + ": " + message);
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
  std::string context_;
};

}  // namespace pidmd
