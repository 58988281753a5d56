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

#include "stim/ops.hpp"

#include <algorithm>
#include <string>

#include "stim/error.hpp"
#include "stim/simd.hpp"

namespace stim {

std::string_view to_string(PadMode mode) {
  switch (mode) {
    case PadMode::zero: return "zero";
    case PadMode::reflection: return "reflection";
    case PadMode::circular: return "circular";
  }
  return "?";
}

PadMode parse_pad_mode(std::string_view name) {
  if (name == "zero") return PadMode::zero;
  if (name == "reflection") return PadMode::reflection;
  if (name == "circular") return PadMode::circular;
  throw InvalidArgument("unknown padding mode '" + std::string(name) + "'");
}

namespace {

void require_spatial(const Tensor& x, const char* op) {
  if (x.rank() < 2) throw InvalidArgument(std::string(op) + ": input needs two spatial axes");
}

Dims with_spatial(const Dims& dims, std::size_t h, std::size_t w) {
  Dims out = dims;
  out[out.size() - 2] = h;
  out[out.size() - 1] = w;
  return out;
}

long wrap(long i, long n) {
  long r = i % n;
  return r < 0 ? r + n : r;
}

// Maps a padded coordinate back into [0, n); -1 marks zero fill.
long source_index(long i, long n, PadMode mode) {
  if (i >= 0 && i < n) return i;
  switch (mode) {
    case PadMode::zero: return -1;
    case PadMode::circular: return wrap(i, n);
    case PadMode::reflection: {
      if (n == 1) return 0;
      const long period = 2 * (n - 1);
      long r = wrap(i, period);
      return r < n ? r : period - r;
    }
  }
  return -1;
}

// Plane rows split by column phase so that in(y, s*j + ph) == row(y, ph)[j].
// Any strided window walk becomes a contiguous run over j.
class PhasedPlane {
 public:
  PhasedPlane(const float* plane, std::size_t h, std::size_t w, std::size_t stride)
      : stride_(stride) {
    if (stride == 1) {
      base_ = plane;
      row_stride_ = w;
      phase_stride_ = 0;
      return;
    }
    const std::size_t wq = (w + stride - 1) / stride;
    storage_.assign(h * stride * wq, 0.0f);
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x)
        storage_[(y * stride + x % stride) * wq + x / stride] = plane[y * w + x];
    base_ = storage_.data();
    row_stride_ = stride * wq;
    phase_stride_ = wq;
  }

  // Start of the run for kernel column offset kx on input row y.
  const float* run(std::size_t y, std::size_t kx) const {
    return base_ + y * row_stride_ + (kx % stride_) * phase_stride_ + kx / stride_;
  }

 private:
  std::size_t stride_;
  const float* base_ = nullptr;
  std::size_t row_stride_ = 0;
  std::size_t phase_stride_ = 0;
  std::vector<float> storage_;
};

}  // namespace

std::size_t pooled_extent(std::size_t extent, std::size_t window, std::size_t stride) {
  if (window == 0 || stride == 0) throw InvalidArgument("window and stride must be >= 1");
  if (window > extent)
    throw InvalidArgument("window " + std::to_string(window) + " exceeds extent " +
                          std::to_string(extent));
  return (extent - window) / stride + 1;
}

Tensor pad(const Tensor& x, const PaddingSpec& spec) {
  require_spatial(x, "pad");
  const std::size_t h = x.height(), w = x.width();
  if (spec.mode == PadMode::reflection &&
      (spec.top >= h || spec.bottom >= h || spec.left >= w || spec.right >= w))
    throw InvalidArgument("reflection padding must be smaller than the padded extent (" +
                          std::to_string(h) + "x" + std::to_string(w) + ")");
  if (spec.is_none()) return x;
  const std::size_t ho = h + spec.top + spec.bottom, wo = w + spec.left + spec.right;
  Tensor out(with_spatial(x.dims(), ho, wo));
  std::vector<long> cols(wo);
  for (std::size_t j = 0; j < wo; ++j)
    cols[j] = source_index(static_cast<long>(j) - static_cast<long>(spec.left),
                           static_cast<long>(w), spec.mode);
  for (std::size_t p = 0; p < x.planes(); ++p) {
    auto src = x.plane(p);
    auto dst = out.plane(p);
    for (std::size_t i = 0; i < ho; ++i) {
      const long r = source_index(static_cast<long>(i) - static_cast<long>(spec.top),
                                  static_cast<long>(h), spec.mode);
      if (r < 0) continue;
      for (std::size_t j = 0; j < wo; ++j)
        if (cols[j] >= 0) dst[i * wo + j] = src[static_cast<std::size_t>(r) * w + cols[j]];
    }
  }
  return out;
}

Tensor crop(const Tensor& x, std::size_t top, std::size_t left, std::size_t h, std::size_t w) {
  require_spatial(x, "crop");
  if (h == 0 || w == 0 || top + h > x.height() || left + w > x.width())
    throw InvalidArgument("crop window out of range");
  Tensor out(with_spatial(x.dims(), h, w));
  const std::size_t sw = x.width();
  for (std::size_t p = 0; p < x.planes(); ++p) {
    auto src = x.plane(p);
    auto dst = out.plane(p);
    for (std::size_t i = 0; i < h; ++i)
      std::copy_n(src.begin() + (top + i) * sw + left, w, dst.begin() + i * w);
  }
  return out;
}

Tensor conv2d(const Tensor& x, const ConvSpec& spec) {
  if (x.rank() == 4) {
    const std::size_t n = x.dim(0);
    const Dims item{x.dim(1), x.dim(2), x.dim(3)};
    std::vector<Tensor> outs;
    for (std::size_t b = 0; b < n; ++b) {
      auto plane = x.data().subspan(b * element_count(item), element_count(item));
      outs.push_back(conv2d(Tensor(item, {plane.begin(), plane.end()}), spec));
    }
    Dims od{n};
    od.insert(od.end(), outs[0].dims().begin(), outs[0].dims().end());
    std::vector<float> data;
    for (auto& o : outs) data.insert(data.end(), o.data().begin(), o.data().end());
    return Tensor(od, std::move(data));
  }
  if (x.rank() != 3) throw InvalidArgument("conv2d: input must be C x H x W");
  const Tensor& k = spec.kernel;
  if (k.rank() != 4) throw InvalidArgument("conv2d: kernel must be out x in x kH x kW");
  const std::size_t oc_n = k.dim(0), ic_n = k.dim(1), kh = k.dim(2), kw = k.dim(3);
  if (ic_n != x.channels())
    throw InvalidArgument("conv2d: kernel expects " + std::to_string(ic_n) +
                          " input channels, got " + std::to_string(x.channels()));
  if (!spec.bias.empty() && spec.bias.size() != oc_n)
    throw InvalidArgument("conv2d: bias length does not match output channels");
  if (spec.stride == 0) throw InvalidArgument("conv2d: stride must be >= 1");

  const Tensor xp = pad(x, spec.padding);
  const std::size_t hp = xp.height(), wp = xp.width(), s = spec.stride;
  const std::size_t ho = pooled_extent(hp, kh, s), wo = pooled_extent(wp, kw, s);

  std::vector<PhasedPlane> phased;
  phased.reserve(ic_n);
  for (std::size_t c = 0; c < ic_n; ++c) phased.emplace_back(xp.plane(c).data(), hp, wp, s);

  const auto& kt = simd::active_kernels();
  Tensor out({oc_n, ho, wo});
  std::vector<double> acc(wo);
  const float* kd = k.raw();
  for (std::size_t oc = 0; oc < oc_n; ++oc) {
    const double b = spec.bias.empty() ? 0.0 : spec.bias[oc];
    for (std::size_t oy = 0; oy < ho; ++oy) {
      std::fill(acc.begin(), acc.end(), b);
      for (std::size_t ic = 0; ic < ic_n; ++ic) {
        const float* wk = kd + (oc * ic_n + ic) * kh * kw;
        for (std::size_t ky = 0; ky < kh; ++ky)
          for (std::size_t kx = 0; kx < kw; ++kx)
            kt.axpy_widen(acc.data(), phased[ic].run(oy * s + ky, kx), wk[ky * kw + kx], wo);
      }
      kt.narrow(out.raw() + (oc * ho + oy) * wo, acc.data(), wo);
    }
  }
  return out;
}

Tensor depthwise_conv2d(const Tensor& x, const std::vector<double>& kernel, std::size_t kh,
                        std::size_t kw, std::size_t stride, const PaddingSpec& padding) {
  require_spatial(x, "depthwise_conv2d");
  if (kernel.size() != kh * kw) throw InvalidArgument("depthwise kernel size mismatch");
  if (stride == 0) throw InvalidArgument("depthwise_conv2d: stride must be >= 1");
  const Tensor xp = pad(x, padding);
  const std::size_t hp = xp.height(), wp = xp.width();
  const std::size_t ho = pooled_extent(hp, kh, stride), wo = pooled_extent(wp, kw, stride);
  const auto& kt = simd::active_kernels();
  Tensor out(with_spatial(x.dims(), ho, wo));
  std::vector<double> acc(wo);
  for (std::size_t p = 0; p < xp.planes(); ++p) {
    PhasedPlane src(xp.plane(p).data(), hp, wp, stride);
    float* dst = out.plane(p).data();
    for (std::size_t oy = 0; oy < ho; ++oy) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t ky = 0; ky < kh; ++ky)
        for (std::size_t kx = 0; kx < kw; ++kx)
          kt.axpy_widen(acc.data(), src.run(oy * stride + ky, kx), kernel[ky * kw + kx], wo);
      kt.narrow(dst + oy * wo, acc.data(), wo);
    }
  }
  return out;
}

Tensor maxpool(const Tensor& x, std::size_t window, std::size_t stride) {
  require_spatial(x, "maxpool");
  const std::size_t h = x.height(), w = x.width();
  const std::size_t ho = pooled_extent(h, window, stride), wo = pooled_extent(w, window, stride);
  const auto& kt = simd::active_kernels();
  Tensor out(with_spatial(x.dims(), ho, wo));
  for (std::size_t p = 0; p < x.planes(); ++p) {
    PhasedPlane src(x.plane(p).data(), h, w, stride);
    float* dst = out.plane(p).data();
    for (std::size_t oy = 0; oy < ho; ++oy) {
      float* row = dst + oy * wo;
      std::copy_n(src.run(oy * stride, 0), wo, row);
      for (std::size_t ky = 0; ky < window; ++ky)
        for (std::size_t kx = 0; kx < window; ++kx)
          if (ky || kx) kt.max_inplace(row, src.run(oy * stride + ky, kx), wo);
    }
  }
  return out;
}

Tensor avgpool(const Tensor& x, std::size_t window, std::size_t stride) {
  require_spatial(x, "avgpool");
  const std::size_t h = x.height(), w = x.width();
  const std::size_t ho = pooled_extent(h, window, stride), wo = pooled_extent(w, window, stride);
  const auto& kt = simd::active_kernels();
  const double inv = 1.0 / static_cast<double>(window * window);
  Tensor out(with_spatial(x.dims(), ho, wo));
  std::vector<double> acc(wo);
  for (std::size_t p = 0; p < x.planes(); ++p) {
    PhasedPlane src(x.plane(p).data(), h, w, stride);
    float* dst = out.plane(p).data();
    for (std::size_t oy = 0; oy < ho; ++oy) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t ky = 0; ky < window; ++ky)
        for (std::size_t kx = 0; kx < window; ++kx)
          kt.axpy_widen(acc.data(), src.run(oy * stride + ky, kx), 1.0, wo);
      for (auto& a : acc) a *= inv;
      kt.narrow(dst + oy * wo, acc.data(), wo);
    }
  }
  return out;
}

Tensor downsample(const Tensor& x, std::size_t factor) {
  require_spatial(x, "downsample");
  if (factor == 0) throw InvalidArgument("downsample: factor must be >= 1");
  if (factor == 1) return x;
  const std::size_t h = x.height(), w = x.width();
  const std::size_t ho = (h + factor - 1) / factor, wo = (w + factor - 1) / factor;
  Tensor out(with_spatial(x.dims(), ho, wo));
  for (std::size_t p = 0; p < x.planes(); ++p) {
    auto src = x.plane(p);
    auto dst = out.plane(p);
    for (std::size_t i = 0; i < ho; ++i)
      for (std::size_t j = 0; j < wo; ++j) dst[i * wo + j] = src[i * factor * w + j * factor];
  }
  return out;
}

Tensor shift_circular(const Tensor& x, long dy, long dx) {
  require_spatial(x, "shift_circular");
  const long h = static_cast<long>(x.height()), w = static_cast<long>(x.width());
  Tensor out(x.dims());
  for (std::size_t p = 0; p < x.planes(); ++p) {
    auto src = x.plane(p);
    auto dst = out.plane(p);
    for (long i = 0; i < h; ++i) {
      const long si = wrap(i - dy, h);
      for (long j = 0; j < w; ++j) dst[i * w + j] = src[si * w + wrap(j - dx, w)];
    }
  }
  return out;
}

Tensor relu(const Tensor& x) {
  Tensor out = x;
  for (auto& v : out.data()) v = v > 0.0f ? v : 0.0f;
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.dims() != b.dims())
    throw InvalidArgument("add: shape mismatch " + to_string(a.dims()) + " vs " +
                          to_string(b.dims()));
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

Tensor scale(const Tensor& x, float factor) {
  Tensor out = x;
  for (auto& v : out.data()) v *= factor;
  return out;
}

}  // namespace stim
