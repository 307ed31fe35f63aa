// Copyright 2026 The LAREN Authors. All Rights Reserved.
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

#include "laren/ltsr.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace laren {
namespace {

constexpr std::string_view kMagic = "LTSR1";

void need(std::string_view bytes, std::size_t pos, std::size_t n) {
  require(pos + n <= bytes.size(), ErrorCode::kIoError, "truncated binary data");
}

}  // namespace

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFU));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFU));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(std::string_view bytes, std::size_t& pos) {
  need(bytes, pos, 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  pos += 4;
  return v;
}

std::uint64_t get_u64(std::string_view bytes, std::size_t& pos) {
  need(bytes, pos, 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  pos += 8;
  return v;
}

double get_f64(std::string_view bytes, std::size_t& pos) { return std::bit_cast<double>(get_u64(bytes, pos)); }

std::string encode_ltsr(const Tensor& t) {
  require(!t.empty(), ErrorCode::kDimMismatch, "cannot encode an empty tensor");
  std::string out(kMagic);
  put_u32(out, static_cast<std::uint32_t>(t.rank()));
  for (auto d : t.shape()) put_u32(out, static_cast<std::uint32_t>(d));
  for (double v : t.span()) put_f64(out, v);
  return out;
}

Tensor decode_ltsr(std::string_view bytes, std::size_t* consumed) {
  require(bytes.substr(0, kMagic.size()) == kMagic, ErrorCode::kIoError, "missing LTSR1 magic");
  std::size_t pos = kMagic.size();
  const std::uint32_t rank = get_u32(bytes, pos);
  require(rank >= 1 && rank <= 4, ErrorCode::kIoError, "LTSR rank out of range");
  Shape shape;
  for (std::uint32_t i = 0; i < rank; ++i) shape.push_back(get_u32(bytes, pos));
  Tensor::Vector v(shape_size(shape));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = get_f64(bytes, pos);
  if (consumed) *consumed = pos;
  return Tensor(std::move(shape), std::move(v));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kMissingFile, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorCode::kIoError, "write failed for " + path.string());
}

void write_ltsr(const std::filesystem::path& path, const Tensor& t) { write_file(path, encode_ltsr(t)); }

Tensor read_ltsr(const std::filesystem::path& path) { return decode_ltsr(read_file(path)); }

}  // namespace laren
