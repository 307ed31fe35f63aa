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

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "laren/tensor.hpp"

namespace laren {

inline constexpr Eigen::Index kAttributeCount = 6;
inline constexpr std::array<const char*, kAttributeCount> kAttributeNames = {"bg", "x", "y", "size", "hue", "orient"};

/// Background intensity, centre x, centre y, size, hue, orientation; each in [0, 1].
using AttributeVector = std::array<double, kAttributeCount>;

/// Six uniform draws from Rng(seed, kSample + index).
AttributeVector draw_attributes(std::uint64_t seed, std::uint64_t index);

/// 3 x S x S image in [-1, 1]: a rotated rectangle over a flat grey
/// background, 4x4 supersampled.
///   background grey  -0.8 + 1.6 bg
///   centre           ((0.25 + 0.5 x) S, (0.25 + 0.5 y) S)
///   half extents     w = (0.12 + 0.18 size) S, 0.6 w
///   colour           HSV(0.8 hue, 0.9, 1) mapped to [-1, 1]
///   rotation         orient * pi / 2
Tensor render(const AttributeVector& attrs, Eigen::Index size);

/// s x s box average.
Tensor downsample(const Tensor& hr, Eigen::Index s);

struct SamplePair {
  std::uint64_t id = 0;
  AttributeVector attrs{};
  Tensor hr;
  Tensor lr;
};

SamplePair make_sample(std::uint64_t seed, std::uint64_t index, Eigen::Index hr_size, Eigen::Index scale);

struct Dataset {
  Eigen::Index hr_size = 0;
  Eigen::Index scale = 0;
  std::vector<SamplePair> samples;

  Eigen::Index lr_size() const { return hr_size / scale; }
  /// The last floor(n / 5) samples are held out from training.
  std::size_t held_out_count() const { return samples.size() / 5; }
  std::size_t train_count() const { return samples.size() - held_out_count(); }
  /// samples x 6 attribute matrix.
  Tensor attribute_matrix() const;
};

Dataset make_dataset(std::size_t n, Eigen::Index hr_size, Eigen::Index scale, std::uint64_t seed);

/// manifest.csv plus hr_/lr_NNNNN.{ppm,ltsr} per sample.
void write_dataset(const Dataset& data, const std::filesystem::path& dir);
/// Reads manifest.csv and the LTSR copies.
Dataset load_dataset(const std::filesystem::path& dir);

std::string sample_stem(std::uint64_t id);

/// Binary PPM (P6, maxval 255). Values map from [-1, 1] by (x + 1) / 2 * 255,
/// rounded half away from zero and clamped to [0, 255].
std::string encode_ppm(const Tensor& image);
Tensor decode_ppm(const std::string& bytes);
void write_ppm(const std::filesystem::path& path, const Tensor& image);
Tensor read_ppm(const std::filesystem::path& path);

}  // namespace laren
