// Copyright 2026 The valuedec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Little-endian primitive encoding shared by the binary file formats.

#ifndef VALUEDEC_SRC_BINARY_IO_H_
#define VALUEDEC_SRC_BINARY_IO_H_

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "valuedec/error.h"

namespace valuedec::internal {

class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void bytes(std::string_view b) {
    out_.write(b.data(), static_cast<std::streamsize>(b.size()));
  }
  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) { little_endian(v); }
  void u64(std::uint64_t v) { little_endian(v); }
  void f64(double v) { little_endian(std::bit_cast<std::uint64_t>(v)); }

 private:
  template <typename T>
  void little_endian(T v) {
    std::array<char, sizeof(T)> buf;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    }
    out_.write(buf.data(), buf.size());
  }

  std::ostream& out_;
};

class BinaryReader {
 public:
  BinaryReader(std::istream& in, std::string what)
      : in_(in), what_(std::move(what)) {}

  std::string bytes(std::size_t n) {
    std::string b(n, '\0');
    in_.read(b.data(), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) truncated();
    return b;
  }
  std::uint8_t u8() { return little_endian<std::uint8_t>(); }
  std::uint32_t u32() { return little_endian<std::uint32_t>(); }
  std::uint64_t u64() { return little_endian<std::uint64_t>(); }
  double f64() { return std::bit_cast<double>(little_endian<std::uint64_t>()); }

  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

  [[noreturn]] void fail(const std::string& message) const {
    throw FormatError(what_ + ": " + message);
  }

 private:
  [[noreturn]] void truncated() const { fail("truncated stream"); }

  template <typename T>
  T little_endian() {
    std::array<unsigned char, sizeof(T)> buf;
    in_.read(reinterpret_cast<char*>(buf.data()), buf.size());
    if (static_cast<std::size_t>(in_.gcount()) != buf.size()) truncated();
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(static_cast<T>(buf[i]) << (8 * i));
    }
    return v;
  }

  std::istream& in_;
  std::string what_;
};

}  // namespace valuedec::internal

#endif  // VALUEDEC_SRC_BINARY_IO_H_
