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

#include "laren/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "laren/error.hpp"
#include "laren/ltsr.hpp"
#include "laren/ops.hpp"
#include "laren/rng.hpp"

namespace laren {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kSupersample = 4;

std::array<double, 3> hsv_to_rgb(double h, double s, double v) {
  const double sector = h * 6.0;
  const int i = static_cast<int>(std::floor(sector)) % 6;
  const double f = sector - std::floor(sector);
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  switch (i) {
    case 0: return {v, t, p};
    case 1: return {q, v, p};
    case 2: return {p, v, t};
    case 3: return {p, q, v};
    case 4: return {t, p, v};
    default: return {v, p, q};
  }
}

std::string format_attr(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

AttributeVector draw_attributes(std::uint64_t seed, std::uint64_t index) {
  Rng rng(seed, streams::kSample + index);
  AttributeVector a{};
  for (double& v : a) v = rng.uniform();
  return a;
}

Tensor render(const AttributeVector& attrs, Eigen::Index size) {
  require(size >= 8, ErrorCode::kBadConfig, "render needs S >= 8");
  for (double v : attrs) require(v >= 0.0 && v <= 1.0, ErrorCode::kBadConfig, "attributes must lie in [0, 1]");
  const double s = static_cast<double>(size);
  const double background = -0.8 + 1.6 * attrs[0];
  const double cx = (0.25 + 0.5 * attrs[1]) * s;
  const double cy = (0.25 + 0.5 * attrs[2]) * s;
  const double half_w = (0.12 + 0.18 * attrs[3]) * s;
  const double half_h = 0.6 * half_w;
  const auto rgb = hsv_to_rgb(0.8 * attrs[4], 0.9, 1.0);
  const double angle = attrs[5] * kPi / 2.0;
  const double ca = std::cos(angle), sa = std::sin(angle);

  Tensor img = Tensor::zeros({3, size, size});
  for (Eigen::Index py = 0; py < size; ++py) {
    for (Eigen::Index px = 0; px < size; ++px) {
      int inside = 0;
      for (int sy = 0; sy < kSupersample; ++sy) {
        for (int sx = 0; sx < kSupersample; ++sx) {
          const double x = static_cast<double>(px) + (sx + 0.5) / kSupersample - cx;
          const double y = static_cast<double>(py) + (sy + 0.5) / kSupersample - cy;
          const double u = ca * x + sa * y;
          const double v = -sa * x + ca * y;
          if (std::abs(u) <= half_w && std::abs(v) <= half_h) ++inside;
        }
      }
      const double cover = static_cast<double>(inside) / (kSupersample * kSupersample);
      for (Eigen::Index c = 0; c < 3; ++c) {
        img(c, py, px) = cover * (2.0 * rgb[static_cast<std::size_t>(c)] - 1.0) + (1.0 - cover) * background;
      }
    }
  }
  return img;
}

Tensor downsample(const Tensor& hr, Eigen::Index s) {
  require(s >= 1 && s <= hr.dim(1), ErrorCode::kDimMismatch, "downsample factor out of range");
  return mean_pool(hr, static_cast<int>(s));
}

SamplePair make_sample(std::uint64_t seed, std::uint64_t index, Eigen::Index hr_size, Eigen::Index scale) {
  require(scale >= 1 && hr_size % scale == 0, ErrorCode::kBadConfig,
          "HR size " + std::to_string(hr_size) + " not divisible by scale " + std::to_string(scale));
  SamplePair p;
  p.id = index;
  p.attrs = draw_attributes(seed, index);
  p.hr = render(p.attrs, hr_size);
  p.lr = downsample(p.hr, scale);
  return p;
}

Tensor Dataset::attribute_matrix() const {
  Tensor out = Tensor::zeros({static_cast<Eigen::Index>(samples.size()), kAttributeCount});
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (Eigen::Index q = 0; q < kAttributeCount; ++q) {
      out(static_cast<Eigen::Index>(i), q) = samples[i].attrs[static_cast<std::size_t>(q)];
    }
  }
  return out;
}

Dataset make_dataset(std::size_t n, Eigen::Index hr_size, Eigen::Index scale, std::uint64_t seed) {
  require(n >= 1, ErrorCode::kBadConfig, "dataset needs at least one sample");
  Dataset d;
  d.hr_size = hr_size;
  d.scale = scale;
  d.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) d.samples.push_back(make_sample(seed, i, hr_size, scale));
  return d;
}

std::string sample_stem(std::uint64_t id) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%05llu", static_cast<unsigned long long>(id));
  return buf;
}

void write_dataset(const Dataset& data, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
  std::string manifest = "id,bg,x,y,size,hue,orient\n";
  for (const auto& s : data.samples) {
    manifest += std::to_string(s.id);
    for (double v : s.attrs) manifest += "," + format_attr(v);
    manifest += "\n";
    const std::string stem = sample_stem(s.id);
    write_ppm(dir / ("hr_" + stem + ".ppm"), s.hr);
    write_ppm(dir / ("lr_" + stem + ".ppm"), s.lr);
    write_ltsr(dir / ("hr_" + stem + ".ltsr"), s.hr);
    write_ltsr(dir / ("lr_" + stem + ".ltsr"), s.lr);
  }
  write_file(dir / "manifest.csv", manifest);
}

Dataset load_dataset(const std::filesystem::path& dir) {
  std::istringstream manifest(read_file(dir / "manifest.csv"));
  std::string line;
  std::getline(manifest, line);
  require(line == "id,bg,x,y,size,hue,orient", ErrorCode::kIoError, "unexpected manifest header in " + dir.string());
  Dataset d;
  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    SamplePair s;
    try {
      std::getline(row, field, ',');
      s.id = std::stoull(field);
      for (double& v : s.attrs) {
        require(static_cast<bool>(std::getline(row, field, ',')), ErrorCode::kIoError, "short manifest row: " + line);
        v = std::stod(field);
      }
    } catch (const std::logic_error&) {
      fail(ErrorCode::kIoError, "malformed manifest row: " + line);
    }
    const std::string stem = sample_stem(s.id);
    s.hr = read_ltsr(dir / ("hr_" + stem + ".ltsr"));
    s.lr = read_ltsr(dir / ("lr_" + stem + ".ltsr"));
    require(s.hr.rank() == 3 && s.lr.rank() == 3 && s.hr.dim(1) % s.lr.dim(1) == 0, ErrorCode::kIoError,
            "sample " + stem + " has inconsistent HR/LR shapes");
    if (d.samples.empty()) {
      d.hr_size = s.hr.dim(1);
      d.scale = s.hr.dim(1) / s.lr.dim(1);
    }
    require(s.hr.dim(1) == d.hr_size && s.lr.dim(1) * d.scale == d.hr_size, ErrorCode::kIoError,
            "sample " + stem + " differs in size from the first sample");
    d.samples.push_back(std::move(s));
  }
  require(!d.samples.empty(), ErrorCode::kIoError, "empty dataset in " + dir.string());
  return d;
}

std::string encode_ppm(const Tensor& image) {
  require(image.rank() == 3 && image.dim(0) == 3, ErrorCode::kDimMismatch,
          "PPM needs a 3 x H x W image, got " + shape_string(image.shape()));
  const Eigen::Index h = image.dim(1), w = image.dim(2);
  std::string out = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(3 * h * w));
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      for (Eigen::Index c = 0; c < 3; ++c) {
        const double q = std::clamp(std::round((image(c, y, x) + 1.0) / 2.0 * 255.0), 0.0, 255.0);
        out.push_back(static_cast<char>(static_cast<unsigned char>(q)));
      }
    }
  }
  return out;
}

Tensor decode_ppm(const std::string& bytes) {
  std::size_t pos = 0;
  auto next_token = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  require(next_token() == "P6", ErrorCode::kIoError, "not a binary PPM");
  long w = 0, h = 0, maxval = 0;
  try {
    w = std::stol(next_token());
    h = std::stol(next_token());
    maxval = std::stol(next_token());
  } catch (const std::logic_error&) {
    fail(ErrorCode::kIoError, "malformed PPM header");
  }
  require(w > 0 && h > 0 && maxval == 255, ErrorCode::kIoError, "unsupported PPM geometry or maxval");
  ++pos;  // single whitespace after maxval
  require(bytes.size() >= pos + static_cast<std::size_t>(3 * w * h), ErrorCode::kIoError, "truncated PPM payload");
  Tensor img = Tensor::zeros({3, h, w});
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      for (long c = 0; c < 3; ++c) {
        const auto v = static_cast<unsigned char>(bytes[pos++]);
        img(c, y, x) = static_cast<double>(v) / 255.0 * 2.0 - 1.0;
      }
    }
  }
  return img;
}

void write_ppm(const std::filesystem::path& path, const Tensor& image) { write_file(path, encode_ppm(image)); }

Tensor read_ppm(const std::filesystem::path& path) { return decode_ppm(read_file(path)); }

}  // namespace laren
