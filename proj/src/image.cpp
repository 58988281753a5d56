// Copyright 2026 The stim Authors.
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

#include "stim/image.hpp"

#include <fstream>
#include <iterator>
#include <string>

#include "stim/error.hpp"

namespace stim {
namespace {

class HeaderReader {
 public:
  HeaderReader(std::span<const std::uint8_t> bytes, std::size_t pos) : bytes_(bytes), pos_(pos) {}

  std::size_t pos() const { return pos_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos_;
      } else {
        return;
      }
    }
  }

  std::size_t number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    std::size_t v = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > (1u << 24)) throw DecodeError(start, std::string(what) + " too large");
      ++pos_;
    }
    if (pos_ == start) {
      if (pos_ >= bytes_.size()) throw DecodeError(pos_, std::string("truncated header before ") + what);
      throw DecodeError(pos_, std::string("expected ") + what);
    }
    return v;
  }

  void single_whitespace() {
    if (pos_ >= bytes_.size()) throw DecodeError(pos_, "truncated header");
    const auto c = bytes_[pos_];
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r')
      throw DecodeError(pos_, "expected whitespace after maxval");
    ++pos_;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<std::uint8_t> header(const char* magic, std::size_t w, std::size_t h) {
  const std::string s = std::string(magic) + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  return {s.begin(), s.end()};
}

}  // namespace

Tensor quantize(const Tensor& x) {
  Tensor out = x;
  for (auto& v : out.data()) v = byte_to_unit(unit_to_byte(v));
  return out;
}

Tensor decode_ppm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2) throw DecodeError(bytes.size(), "truncated magic");
  if (bytes[0] != 'P' || bytes[1] != '6') throw DecodeError(0, "unsupported format (expected P6)");
  HeaderReader r(bytes, 2);
  const std::size_t w = r.number("width");
  const std::size_t h = r.number("height");
  r.skip_space_and_comments();
  const std::size_t maxval_at = r.pos();
  const std::size_t maxval = r.number("maxval");
  if (w == 0 || h == 0) throw DecodeError(maxval_at, "zero image extent");
  if (maxval != 255) throw DecodeError(maxval_at, "maxval " + std::to_string(maxval) + " unsupported");
  r.single_whitespace();
  const std::size_t start = r.pos(), n = w * h;
  if (bytes.size() - start < 3 * n)
    throw DecodeError(bytes.size(), "truncated pixel data, expected " + std::to_string(3 * n) + " bytes");
  Tensor out({3, h, w});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < 3; ++c) out[c * n + i] = byte_to_unit(bytes[start + 3 * i + c]);
  return out;
}

Tensor decode_image(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  return decode_ppm(bytes);
}

std::vector<std::uint8_t> encode_ppm(const Tensor& image) {
  if (image.rank() != 3 || image.channels() != 3)
    throw InvalidArgument("encode_ppm: expects 3 x H x W, got " + to_string(image.dims()));
  const std::size_t h = image.height(), w = image.width(), n = h * w;
  std::vector<std::uint8_t> out = header("P6", w, h);
  out.reserve(out.size() + 3 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < 3; ++c) out.push_back(unit_to_byte(image[c * n + i]));
  return out;
}

void write_ppm(const Tensor& image, const std::filesystem::path& path) {
  write_file(encode_ppm(image), path);
}

std::vector<std::uint8_t> encode_pgm(const Tensor& map) {
  if (map.rank() < 2 || map.planes() != 1)
    throw InvalidArgument("encode_pgm: expects a single plane, got " + to_string(map.dims()));
  std::vector<std::uint8_t> out = header("P5", map.width(), map.height());
  for (const float v : map.data()) {
    const double b = std::round(std::clamp(static_cast<double>(v), 0.0, 1.0) * 255.0);
    out.push_back(static_cast<std::uint8_t>(b));
  }
  return out;
}

void write_pgm(const Tensor& map, const std::filesystem::path& path) {
  write_file(encode_pgm(map), path);
}

}  // namespace stim
