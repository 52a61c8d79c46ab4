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

#include "binary_io.h"

#include <fstream>
#include <iterator>

namespace mcmppi::internal {
namespace {

constexpr std::size_t kHeaderBytes = 8 + sizeof(std::uint32_t) + sizeof(std::uint64_t);

}  // namespace

void WriteContainer(const std::string& path, const char magic[8],
                    std::uint32_t version, const std::vector<char>& payload) {
  BinaryWriter header;
  for (int i = 0; i < 8; ++i) header.Put<char>(magic[i]);
  header.Put<std::uint32_t>(version);
  header.Put<std::uint64_t>(payload.size());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  out.write(header.bytes().data(), header.bytes().size());
  out.write(payload.data(), payload.size());
  if (!out) throw FormatError("failed writing '" + path + "'");
}

std::vector<char> ReadContainer(const std::string& path, const char magic[8],
                                std::uint32_t version) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  if (bytes.size() < kHeaderBytes) throw FormatError("truncated header");
  if (std::memcmp(bytes.data(), magic, 8) != 0) {
    throw FormatError("bad magic in '" + path + "'");
  }
  BinaryReader header(bytes.data() + 8, kHeaderBytes - 8);
  const auto file_version = header.Get<std::uint32_t>();
  if (file_version != version) {
    throw FormatError("unsupported version " + std::to_string(file_version) +
                      " in '" + path + "'");
  }
  const auto payload = header.Get<std::uint64_t>();
  if (payload != bytes.size() - kHeaderBytes) {
    throw FormatError("payload size does not match the header in '" + path + "'");
  }
  return std::vector<char>(bytes.begin() + kHeaderBytes, bytes.end());
}

std::uint64_t Fnv1a(const char* data, std::size_t size) {
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace mcmppi::internal
