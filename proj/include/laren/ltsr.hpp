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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "laren/tensor.hpp"

namespace laren {

/// LTSR tensor encoding: the five bytes "LTSR1", u32 rank, u32 dims[rank],
/// then the f64 payload in row-major order. All integers and floats are
/// little-endian.
std::string encode_ltsr(const Tensor& t);
Tensor decode_ltsr(std::string_view bytes, std::size_t* consumed = nullptr);

void write_ltsr(const std::filesystem::path& path, const Tensor& t);
Tensor read_ltsr(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

// Little-endian primitives shared by the binary formats.
void put_u32(std::string& out, std::uint32_t v);
void put_u64(std::string& out, std::uint64_t v);
void put_f64(std::string& out, double v);
std::uint32_t get_u32(std::string_view bytes, std::size_t& pos);
std::uint64_t get_u64(std::string_view bytes, std::size_t& pos);
double get_f64(std::string_view bytes, std::size_t& pos);

}  // namespace laren
