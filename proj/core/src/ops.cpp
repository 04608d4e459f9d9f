// Copyright 2026 The cascadet Authors. All Rights Reserved.
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

#include "cascadet/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cascadet/error.hpp"

namespace cascadet::ops {
namespace {

std::string where(std::string_view layer) {
  return layer.empty() ? std::string("operator") : "layer '" + std::string(layer) + "'";
}

void require_rank4(const Tensor& t, std::string_view what, std::string_view layer) {
  if (t.shape().rank() != 4) {
    throw ShapeError(where(layer) + ": " + std::string(what) + " must be rank 4, got " +
                     t.shape().str());
  }
}

void require_vector(std::span<const float> v, int expected, std::string_view what,
                    std::string_view layer) {
  if (static_cast<int>(v.size()) != expected) {
    throw ShapeError(where(layer) + ": " + std::string(what) + " has " + std::to_string(v.size()) +
                     " values, expected " + std::to_string(expected));
  }
}

void require_bias(std::span<const float> bias, int channels, std::string_view layer) {
  if (!bias.empty()) require_vector(bias, channels, "bias", layer);
}

struct Geometry {
  int out_h;
  int out_w;
};

Geometry conv_geometry(const Tensor& input, int kh, int kw, int stride, int padding,
                       std::string_view layer) {
  if (stride < 1) throw ArgumentError(where(layer) + ": stride must be positive");
  if (padding < 0) throw ArgumentError(where(layer) + ": padding must be non-negative");
  const int ph = input.shape().h() + 2 * padding;
  const int pw = input.shape().w() + 2 * padding;
  if (ph < kh || pw < kw) {
    throw ShapeError(where(layer) + ": padded input " + std::to_string(ph) + "x" +
                     std::to_string(pw) + " smaller than kernel " + std::to_string(kh) + "x" +
                     std::to_string(kw));
  }
  return {window_extent(input.shape().h(), kh, stride, padding),
          window_extent(input.shape().w(), kw, stride, padding)};
}

// Accumulates weight * input-plane into acc for one kernel tap. Out-of-range
// taps fall on zero padding and contribute nothing.
void accumulate_tap(float* acc, const float* in, int in_h, int in_w, int out_h, int out_w,
                    int stride, int padding, int ky, int kx, float weight) {
  for (int oy = 0; oy < out_h; ++oy) {
    const int iy = oy * stride - padding + ky;
    if (iy < 0 || iy >= in_h) continue;
    const float* row = in + static_cast<std::size_t>(iy) * in_w;
    float* out_row = acc + static_cast<std::size_t>(oy) * out_w;
    if (stride == 1) {
      const int x_lo = std::max(0, padding - kx);
      const int x_hi = std::min(out_w, in_w + padding - kx);
      const float* src = row - padding + kx;
      for (int ox = x_lo; ox < x_hi; ++ox) out_row[ox] += weight * src[ox];
    } else {
      for (int ox = 0; ox < out_w; ++ox) {
        const int ix = ox * stride - padding + kx;
        if (ix < 0 || ix >= in_w) continue;
        out_row[ox] += weight * row[ix];
      }
    }
  }
}

void add_bias(float* plane, std::size_t count, std::span<const float> bias, int channel) {
  if (bias.empty()) return;
  const float b = bias[channel];
  for (std::size_t i = 0; i < count; ++i) plane[i] += b;
}

}  // namespace

int window_extent(int in, int kernel, int stride, int padding) {
  return (in + 2 * padding - kernel) / stride + 1;
}

Tensor conv2d(const Tensor& input, const Tensor& weight, std::span<const float> bias, int stride,
              int padding, std::string_view layer) {
  require_rank4(input, "input", layer);
  require_rank4(weight, "weight", layer);
  const Shape& is = input.shape();
  const Shape& ws = weight.shape();
  if (ws.c() != is.c()) {
    throw ShapeError(where(layer) + ": input has " + std::to_string(is.c()) +
                     " channels, weight expects " + std::to_string(ws.c()));
  }
  require_bias(bias, ws.n(), layer);
  const auto [out_h, out_w] = conv_geometry(input, ws.h(), ws.w(), stride, padding, layer);

  Tensor out = Tensor::nchw(is.n(), ws.n(), out_h, out_w);
  const int batch = is.n(), in_c = is.c(), in_h = is.h(), in_w = is.w();
  const int out_c = ws.n(), kh = ws.h(), kw = ws.w();
  const std::size_t plane = static_cast<std::size_t>(out_h) * out_w;
  const float* w = weight.data().data();
  const bool pointwise = kh == 1 && kw == 1 && stride == 1 && padding == 0;
  for (int n = 0; n < batch; ++n) {
    for (int oc = 0; oc < out_c; ++oc) {
      float* acc = out.plane(n, oc);
      const float* w_oc = w + static_cast<std::size_t>(oc) * in_c * kh * kw;
      if (pointwise) {
        // Same summation order as the tap loop below.
        for (int ic = 0; ic < in_c; ++ic) {
          const float wv = w_oc[ic];
          const float* in = input.plane(n, ic);
          for (std::size_t i = 0; i < plane; ++i) acc[i] += wv * in[i];
        }
        add_bias(acc, plane, bias, oc);
        continue;
      }
      for (int ic = 0; ic < in_c; ++ic) {
        const float* in = input.plane(n, ic);
        const float* w_ic = w_oc + static_cast<std::size_t>(ic) * kh * kw;
        for (int ky = 0; ky < kh; ++ky) {
          for (int kx = 0; kx < kw; ++kx) {
            accumulate_tap(acc, in, in_h, in_w, out_h, out_w, stride, padding, ky, kx,
                           w_ic[ky * kw + kx]);
          }
        }
      }
      add_bias(acc, plane, bias, oc);
    }
  }
  return out;
}

Tensor depthwise_conv2d(const Tensor& input, const Tensor& weight, std::span<const float> bias,
                        int stride, int padding, std::string_view layer) {
  require_rank4(input, "input", layer);
  require_rank4(weight, "weight", layer);
  const Shape& is = input.shape();
  const Shape& ws = weight.shape();
  if (ws.n() != is.c() || ws.c() != 1) {
    throw ShapeError(where(layer) + ": depthwise weight " + ws.str() + " incompatible with " +
                     std::to_string(is.c()) + " input channels");
  }
  require_bias(bias, is.c(), layer);
  const auto [out_h, out_w] = conv_geometry(input, ws.h(), ws.w(), stride, padding, layer);

  Tensor out = Tensor::nchw(is.n(), is.c(), out_h, out_w);
  const std::size_t plane = static_cast<std::size_t>(out_h) * out_w;
  for (int n = 0; n < is.n(); ++n) {
    for (int c = 0; c < is.c(); ++c) {
      float* acc = out.plane(n, c);
      const float* in = input.plane(n, c);
      for (int ky = 0; ky < ws.h(); ++ky) {
        for (int kx = 0; kx < ws.w(); ++kx) {
          accumulate_tap(acc, in, is.h(), is.w(), out_h, out_w, stride, padding, ky, kx,
                         weight.at(c, 0, ky, kx));
        }
      }
      add_bias(acc, plane, bias, c);
    }
  }
  return out;
}

Tensor pointwise_conv2d(const Tensor& input, const Tensor& weight, std::span<const float> bias,
                        std::string_view layer) {
  require_rank4(weight, "weight", layer);
  if (weight.shape().h() != 1 || weight.shape().w() != 1) {
    throw ShapeError(where(layer) + ": pointwise weight must be 1x1, got " + weight.shape().str());
  }
  return conv2d(input, weight, bias, 1, 0, layer);
}

Tensor batch_norm(const Tensor& input, std::span<const float> gamma, std::span<const float> beta,
                  std::span<const float> mean, std::span<const float> variance, float epsilon,
                  std::string_view layer) {
  require_rank4(input, "input", layer);
  const int channels = input.shape().c();
  require_vector(gamma, channels, "gamma", layer);
  require_vector(beta, channels, "beta", layer);
  require_vector(mean, channels, "mean", layer);
  require_vector(variance, channels, "variance", layer);
  if (!(epsilon >= 0.0f)) throw ArgumentError(where(layer) + ": epsilon must be non-negative");
  for (int c = 0; c < channels; ++c) {
    if (!(variance[c] >= 0.0f)) {
      throw ArgumentError(where(layer) + ": negative variance in channel " + std::to_string(c));
    }
    if (variance[c] + epsilon <= 0.0f) {
      throw ArgumentError(where(layer) + ": zero variance with zero epsilon in channel " +
                          std::to_string(c));
    }
  }

  Tensor out = input;
  const std::size_t plane = static_cast<std::size_t>(input.shape().h()) * input.shape().w();
  for (int n = 0; n < input.shape().n(); ++n) {
    for (int c = 0; c < channels; ++c) {
      const float g = gamma[c];
      const float b = beta[c];
      const float m = mean[c];
      const float sd = std::sqrt(variance[c] + epsilon);
      float* p = out.plane(n, c);
      for (std::size_t i = 0; i < plane; ++i) p[i] = g * (p[i] - m) / sd + b;
    }
  }
  return out;
}

Tensor relu(const Tensor& input) {
  Tensor out = input;
  for (float& v : out.data()) v = std::max(v, 0.0f);
  return out;
}

Tensor relu6(const Tensor& input) {
  Tensor out = input;
  for (float& v : out.data()) v = std::min(std::max(v, 0.0f), 6.0f);
  return out;
}

Tensor prelu(const Tensor& input, std::span<const float> alpha, std::string_view layer) {
  require_rank4(input, "input", layer);
  require_vector(alpha, input.shape().c(), "alpha", layer);
  Tensor out = input;
  const std::size_t plane = static_cast<std::size_t>(input.shape().h()) * input.shape().w();
  for (int n = 0; n < input.shape().n(); ++n) {
    for (int c = 0; c < input.shape().c(); ++c) {
      float* p = out.plane(n, c);
      for (std::size_t i = 0; i < plane; ++i) {
        if (!(p[i] > 0.0f)) p[i] = alpha[c] * p[i];
      }
    }
  }
  return out;
}

Tensor max_pool2d(const Tensor& input, int kernel, int stride, std::string_view layer) {
  require_rank4(input, "input", layer);
  if (kernel < 1 || stride < 1) {
    throw ArgumentError(where(layer) + ": pool kernel and stride must be positive");
  }
  const Shape& is = input.shape();
  if (is.h() < kernel || is.w() < kernel) {
    throw ShapeError(where(layer) + ": input " + is.str() + " smaller than pool kernel " +
                     std::to_string(kernel));
  }
  const int out_h = window_extent(is.h(), kernel, stride, 0);
  const int out_w = window_extent(is.w(), kernel, stride, 0);
  Tensor out = Tensor::nchw(is.n(), is.c(), out_h, out_w);
  for (int n = 0; n < is.n(); ++n) {
    for (int c = 0; c < is.c(); ++c) {
      const float* in = input.plane(n, c);
      float* o = out.plane(n, c);
      for (int oy = 0; oy < out_h; ++oy) {
        for (int ox = 0; ox < out_w; ++ox) {
          float best = in[static_cast<std::size_t>(oy * stride) * is.w() + ox * stride];
          for (int ky = 0; ky < kernel; ++ky) {
            const float* row = in + static_cast<std::size_t>(oy * stride + ky) * is.w();
            for (int kx = 0; kx < kernel; ++kx) best = std::max(best, row[ox * stride + kx]);
          }
          o[static_cast<std::size_t>(oy) * out_w + ox] = best;
        }
      }
    }
  }
  return out;
}

Tensor global_avg_pool(const Tensor& input) {
  require_rank4(input, "input", {});
  const Shape& is = input.shape();
  const std::size_t count = static_cast<std::size_t>(is.h()) * is.w();
  Tensor out = Tensor::nchw(is.n(), is.c(), 1, 1);
  for (int n = 0; n < is.n(); ++n) {
    for (int c = 0; c < is.c(); ++c) {
      const float* p = input.plane(n, c);
      float sum = 0.0f;
      for (std::size_t i = 0; i < count; ++i) sum += p[i];
      out.at(n, c, 0, 0) = sum / static_cast<float>(count);
    }
  }
  return out;
}

std::vector<float> dense(std::span<const float> input, const Tensor& weight,
                         std::span<const float> bias, std::string_view layer) {
  if (weight.shape().rank() != 2) {
    throw ShapeError(where(layer) + ": dense weight must be rank 2, got " + weight.shape().str());
  }
  const int m = weight.shape()[0];
  const int n = weight.shape()[1];
  require_vector(input, n, "dense input", layer);
  require_bias(bias, m, layer);
  std::vector<float> out(static_cast<std::size_t>(m));
  const float* w = weight.data().data();
  for (int i = 0; i < m; ++i) {
    const float* row = w + static_cast<std::size_t>(i) * n;
    float sum = 0.0f;
    for (int j = 0; j < n; ++j) sum += row[j] * input[j];
    out[i] = bias.empty() ? sum : sum + bias[i];
  }
  return out;
}

Tensor dense(const Tensor& input, const Tensor& weight, std::span<const float> bias,
             std::string_view layer) {
  const int batch = input.shape().rank() == 4 ? input.shape().n() : 1;
  const std::size_t per_item = input.size() / static_cast<std::size_t>(batch);
  if (weight.shape().rank() != 2) {
    throw ShapeError(where(layer) + ": dense weight must be rank 2, got " + weight.shape().str());
  }
  const int m = weight.shape()[0];
  Tensor out = Tensor::nchw(batch, m, 1, 1);
  for (int b = 0; b < batch; ++b) {
    const auto row = dense(input.data().subspan(b * per_item, per_item), weight, bias, layer);
    std::copy(row.begin(), row.end(), out.plane(b, 0));
  }
  return out;
}

std::vector<float> softmax(std::span<const float> logits) {
  std::vector<float> out(logits.size());
  if (logits.empty()) return out;
  const float peak = *std::max_element(logits.begin(), logits.end());
  float total = 0.0f;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  for (float& v : out) v /= total;
  return out;
}

Tensor softmax_channels(const Tensor& input) {
  require_rank4(input, "input", {});
  const Shape& s = input.shape();
  Tensor out(s);
  std::vector<float> logits(static_cast<std::size_t>(s.c()));
  for (int n = 0; n < s.n(); ++n) {
    for (int y = 0; y < s.h(); ++y) {
      for (int x = 0; x < s.w(); ++x) {
        for (int c = 0; c < s.c(); ++c) logits[c] = input.at(n, c, y, x);
        const auto probs = softmax(logits);
        for (int c = 0; c < s.c(); ++c) out.at(n, c, y, x) = probs[c];
      }
    }
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b, std::string_view layer) {
  if (!(a.shape() == b.shape())) {
    throw ShapeError(where(layer) + ": cannot add " + a.shape().str() + " and " + b.shape().str());
  }
  Tensor out = a;
  auto o = out.data();
  auto r = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += r[i];
  return out;
}

namespace {

Tensor apply_bn(const Tensor& x, const BatchNormParams& bn, std::string_view layer) {
  return batch_norm(x, bn.gamma.data(), bn.beta.data(), bn.mean.data(), bn.variance.data(),
                    bn.epsilon, layer);
}

}  // namespace

Tensor bottleneck_block(const Tensor& input, const BottleneckParams& params, int expansion,
                        int stride, bool residual, std::string_view layer) {
  require_rank4(input, "input", layer);
  if (expansion < 1) throw ArgumentError(where(layer) + ": expansion must be positive");
  if (stride != 1 && stride != 2) throw ArgumentError(where(layer) + ": stride must be 1 or 2");
  const int in_c = input.shape().c();
  if (params.expand_weight.shape().rank() != 4 ||
      params.expand_weight.shape().n() != in_c * expansion) {
    throw ShapeError(where(layer) + ": expansion weight " + params.expand_weight.shape().str() +
                     " does not expand " + std::to_string(in_c) + " channels by " +
                     std::to_string(expansion));
  }
  const int kernel = params.depthwise_weight.shape().rank() == 4 ? params.depthwise_weight.shape().h() : 3;

  Tensor x = pointwise_conv2d(input, params.expand_weight, {}, layer);
  x = relu6(apply_bn(x, params.expand_bn, layer));
  x = depthwise_conv2d(x, params.depthwise_weight, {}, stride, kernel / 2, layer);
  x = relu6(apply_bn(x, params.depthwise_bn, layer));
  x = pointwise_conv2d(x, params.project_weight, {}, layer);
  x = apply_bn(x, params.project_bn, layer);
  if (residual) {
    if (stride != 1 || !(x.shape() == input.shape())) {
      throw ShapeError(where(layer) + ": residual connection needs stride 1 and matching shapes");
    }
    x = add(x, input, layer);
  }
  return x;
}

}  // namespace cascadet::ops
