// Copyright 2026 The mcmppi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Little-endian container shared by parameter and dataset files:
//   magic[8] | uint32 version | uint64 payload_bytes | payload

#ifndef MCMPPI_SRC_BINARY_IO_H_
#define MCMPPI_SRC_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "mcmppi/file_format.h"

namespace mcmppi::internal {

static_assert(std::endian::native == std::endian::little,
              "binary files are stored little-endian");

using FormatError = ::mcmppi::FileFormatError;

class BinaryWriter {
 public:
  template <typename T>
  void Put(T value) {
    static_assert(std::is_arithmetic_v<T>);
    const auto* p = reinterpret_cast<const char*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void PutString(const std::string& s) {
    Put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  // Row-major block.
  void PutMatrix(const Eigen::MatrixXd& m) {
    for (int r = 0; r < m.rows(); ++r) {
      for (int c = 0; c < m.cols(); ++c) Put<double>(m(r, c));
    }
  }
  const std::vector<char>& bytes() const { return bytes_; }

 private:
  std::vector<char> bytes_;
};

class BinaryReader {
 public:
  BinaryReader(const char* data, std::size_t size) : data_(data), size_(size) {}

  template <typename T>
  T Get() {
    static_assert(std::is_arithmetic_v<T>);
    Need(sizeof(T));
    T value;
    std::memcpy(&value, data_ + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::string GetString() {
    const std::uint32_t n = Get<std::uint32_t>();
    Need(n);
    std::string s(data_ + pos_, n);
    pos_ += n;
    return s;
  }
  Eigen::MatrixXd GetMatrix(int rows, int cols) {
    Need(sizeof(double) * static_cast<std::size_t>(rows) * cols);
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) m(r, c) = Get<double>();
    }
    return m;
  }
  bool done() const { return pos_ == size_; }

 private:
  void Need(std::size_t n) const {
    if (size_ - pos_ < n) throw FormatError("truncated payload");
  }

  const char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

// Writes magic, version, payload size and payload.
void WriteContainer(const std::string& path, const char magic[8],
                    std::uint32_t version, const std::vector<char>& payload);
// Reads and validates a container; throws FormatError on any mismatch,
// including a file size that differs from the declared payload size.
std::vector<char> ReadContainer(const std::string& path, const char magic[8],
                                std::uint32_t version);

// 64-bit FNV-1a.
std::uint64_t Fnv1a(const char* data, std::size_t size);

}  // namespace mcmppi::internal

#endif  // MCMPPI_SRC_BINARY_IO_H_
