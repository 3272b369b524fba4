/* Copyright 2026 The taxocodec Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef TAXOCODEC_NN_OPS_HPP_
#define TAXOCODEC_NN_OPS_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "taxocodec/nn/tensor.hpp"
#include "taxocodec/rng.hpp"

// Forward ops build the autodiff graph; every backward closure accumulates
// into parent grads in a fixed order, so gradients are deterministic.
namespace txc::nn {

inline constexpr double kPmfFloor = 1.0 / 65536.0;  // 2^-16, shared with the coder tables

namespace detail {

template <typename T>
TensorPtr<T> node(Shape shape, const char* op, std::vector<TensorPtr<T>> parents) {
  bool req = false;
  for (const auto& p : parents) req = req || p->requires_grad;
  auto out = make_tensor<T>(std::move(shape), req);
  out->op = op;
  out->parents = std::move(parents);
  return out;
}

template <typename T>
void check_same_shape(const TensorPtr<T>& a, const TensorPtr<T>& b, const char* op) {
  require(a->shape == b->shape, "SHAPE_MISMATCH",
          std::string(op) + ": " + shape_str(a->shape) + " vs " + shape_str(b->shape));
}

struct ResizeTap {
  int lo, hi;
  double frac;
};

inline std::vector<ResizeTap> resize_taps(int in, int out) {
  std::vector<ResizeTap> taps(static_cast<size_t>(out));
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  for (int o = 0; o < out; ++o) {
    double src = (o + 0.5) * scale - 0.5;
    if (src < 0) src = 0;
    if (src > in - 1) src = in - 1;
    int lo = static_cast<int>(std::floor(src));
    int hi = lo + 1 < in ? lo + 1 : in - 1;
    taps[static_cast<size_t>(o)] = {lo, hi, src - lo};
  }
  return taps;
}

}  // namespace detail

template <typename T>
TensorPtr<T> add(const TensorPtr<T>& a, const TensorPtr<T>& b) {
  detail::check_same_shape(a, b, "add");
  auto out = detail::node<T>(a->shape, "add", {a, b});
  for (int64_t i = 0; i < out->size(); ++i) out->data[i] = a->data[i] + b->data[i];
  if (out->requires_grad) {
    Tensor<T>* o = out.get();
    Tensor<T>* pa = a.get();
    Tensor<T>* pb = b.get();
    out->backward_fn = [o, pa, pb] {
      for (Tensor<T>* p : {pa, pb}) {
        if (!p->requires_grad) continue;
        p->ensure_grad();
        for (int64_t i = 0; i < o->size(); ++i) p->grad[i] += o->grad[i];
      }
    };
  }
  return out;
}

template <typename T>
TensorPtr<T> mul(const TensorPtr<T>& a, const TensorPtr<T>& b) {
  detail::check_same_shape(a, b, "mul");
  auto out = detail::node<T>(a->shape, "mul", {a, b});
  for (int64_t i = 0; i < out->size(); ++i) out->data[i] = a->data[i] * b->data[i];
  if (out->requires_grad) {
    Tensor<T>* o = out.get();
    Tensor<T>* pa = a.get();
    Tensor<T>* pb = b.get();
    out->backward_fn = [o, pa, pb] {
      if (pa->requires_grad) {
        pa->ensure_grad();
        for (int64_t i = 0; i < o->size(); ++i) pa->grad[i] += o->grad[i] * pb->data[i];
      }
      if (pb->requires_grad) {
        pb->ensure_grad();
        for (int64_t i = 0; i < o->size(); ++i) pb->grad[i] += o->grad[i] * pa->data[i];
      }
    };
  }
  return out;
}

template <typename T>
TensorPtr<T> scale(const TensorPtr<T>& a, T c) {
  auto out = detail::node<T>(a->shape, "scale", {a});
  for (int64_t i = 0; i < out->size(); ++i) out->data[i] = a->data[i] * c;
  if (out->requires_grad) {
    Tensor<T>* o = out.get();
    Tensor<T>* pa = a.get();
    out->backward_fn = [o, pa, c] {
      pa->ensure_grad();
      for (int64_t i = 0; i < o->size(); ++i) pa->grad[i] += o->grad[i] * c;
    };
  }
  return out;
}

template <typename T>
TensorPtr<T> add_scalar(const TensorPtr<T>& a, T c) {
  auto out = detail::node<T>(a->shape, "add_scalar", {a});
  for (int64_t i = 0; i < out->size(); ++i) out->data[i] = a->data[i] + c;
  if (out->requires_grad) {
    Tensor<T>* o = out.get();
    Tensor<T>* pa = a.get();
    out->backward_fn = [o, pa] {
      pa->ensure_grad();
      for (int64_t i = 0; i < o->size(); ++i) pa->grad[i] += o->grad[i];
    };
  }
  return out;
}

template <typename T>
TensorPtr<T> relu(const TensorPtr<T>& a) {
  auto out = detail::node<T>(a->shape, "relu", {a});
  for (int64_t i = 0; i < out->size(); ++i) out->data[i] = a->data[i] > T(0) ? a->data[i] : T(0);
  if (out->requires_grad) {
    Tensor<T>* o = out.get();
    Tensor<T>* pa = a.get();
    out->backward_fn = [o, pa] {
      pa->ensure_grad();
      for (int64_t i = 0; i < o->size(); ++i)
        if (pa->data[i] > T(0)) pa->grad[i] += o->grad[i];
    };
  }
  return out;
}

template <typename T>
TensorPtr<T> softplus(const TensorPtr<T>& a) {
  auto out = detail::node<T>(a->shape, "softplus", {a});
  for (int64_t i = 0; i < out->size(); ++i) {
    double x = static_cast<double>(a->data[i]);
    out->data[i] = static_cast<T>(x > 30.0 ? x : std::log1p(std::exp(x)));
  }
  if (out->requires_grad) {
    Tensor<T>* o = out.get();
    Tensor<T>* pa = a.get();
    out->backward_fn = [o, pa] {
      pa->ensure_grad();
      for (int64_t i = 0; i < o->size(); ++i) {
        double x = static_cast<double>(pa->data[i]);
        pa->grad[i] += o->grad[i] * static_cast<T>(1.0 / (1.0 + std::exp(-x)));
      }
    };
  }
  return out;
}

template <typename T>
TensorPtr<T> reshape(const TensorPtr<T>& a, Shape new_shape) {
  require(numel(new_shape) == a->size(), "SHAPE_MISMATCH",
          "reshape: " + shape_str(a->shape) + " to " + shape_str(new_shape));
  auto out = detail::node<T>(std::move(new_shape), "reshape", {a});
  out->data = a->data;
  if (out->requires_grad) {
    Tensor<T>* o = out.get();
    Tensor<T>* pa = a.get();
    out->backward_fn = [o, pa] {
      pa->ensure_grad();
      for (int64_t i = 0; i < o->size(); ++i) pa->grad[i] += o->grad[i];
    };
  }
  return out;
}

// Tiles a length-C vector into N identical rows.
template <typename T>
TensorPtr<T> broadcast_rows(const TensorPtr<T>& v, int rows) {
  require(v->shape.size() == 1, "SHAPE_MISMATCH", "broadcast_rows expects a vector, got " + shape_str(v->shape));
  const int c = v->dim(0);
  auto out = detail::node<T>({rows, c}, "broadcast_rows", {v});
  for (int n = 0; n < rows; ++n)
    for (int i = 0; i < c; ++i) out->data[static_cast<size_t>(n) * c + i] = v->data[i];
  if (out->requires_grad) {
    Tensor<T>* o = out.get();
    Tensor<T>* pv = v.get();
    out->backward_fn = [o, pv, rows, c] {
      pv->ensure_grad();
      for (int n = 0; n < rows; ++n)
        for (int i = 0; i < c; ++i) pv->grad[i] += o->grad[static_cast<size_t>(n) * c + i];
    };
  }
  return out;
}

template <typename T>
TensorPtr<T> concat_channels(const std::vector<TensorPtr<T>>& xs) {
  require(!xs.empty(), "SHAPE_MISMATCH", "concat_channels: empty input list");
  const int n = xs[0]->dim(0), h = xs[0]->dim(2), w = xs[0]->dim(3);
  int total_c = 0;
  for (const auto& x : xs) {
    require(x->shape.size() == 4 && x->dim(0) == n && x->dim(2) == h && x->dim(3) == w, "SHAPE_MISMATCH",
            "concat_channels: " + shape_str(x->shape) + " vs " + shape_str(xs[0]->shape));
    total_c += x->dim(1);
  }
  auto out = detail::node<T>({n, total_c, h, w}, "concat_channels", xs);
  const int64_t plane = static_cast<int64_t>(h) * w;
  int64_t c_off = 0;
  for (const auto& x : xs) {
    const int xc = x->dim(1);
    for (int b = 0; b < n; ++b)
      std::copy_n(x->data.data() + b * xc * plane, xc * plane,
                  out->data.data() + (b * total_c + c_off) * plane);
    c_off += xc;
  }
  if (out->requires_grad) {
    Tensor<T>* o = out.get();
    std::vector<Tensor<T>*> ps;
    for (const auto& x : xs) ps.push_back(x.get());
    out->backward_fn = [o, ps, n, total_c, plane] {
      int64_t off = 0;
      for (Tensor<T>* p : ps) {
        const int xc = p->dim(1);
        if (p->requires_grad) {
          p->ensure_grad();
          for (int b = 0; b < n; ++b) {
            const T* g = o->grad.data() + (b * total_c + off) * plane;
            T* dst = p->grad.data() + b * xc * plane;
            for (int64_t i = 0; i < xc * plane; ++i) dst[i] += g[i];
          }
        }
        off += xc;
      }
    };
  }
  return out;
}

template <typename T>
TensorPtr<T> slice_channels(const TensorPtr<T>& x, int c0, int c1) {
  require(x->shape.size() == 4 && 0 <= c0 && c0 < c1 && c1 <= x->dim(1), "SHAPE_MISMATCH",
          "slice_channels [" + std::to_string(c0) + "," + std::to_string(c1) + ") of " + shape_str(x->shape));
  const int n = x->dim(0), c = x->dim(1), h = x->dim(2), w = x->dim(3), oc = c1 - c0;
  auto out = detail::node<T>({n, oc, h, w}, "slice_channels", {x});
  const int64_t plane = static_cast<int64_t>(h) * w;
  for (int b = 0; b < n; ++b)
    std::copy_n(x->data.data() + (b * c + c0) * plane, oc * plane, out->data.data() + b * oc * plane);
  if (out->requires_grad) {
    Tensor<T>* o = out.get();
    Tensor<T>* px = x.get();
    out->backward_fn = [o, px, n, c, c0, oc, plane] {
      px->ensure_grad();
      for (int b = 0; b < n; ++b) {
        const T* g = o->grad.data() + b * oc * plane;
        T* dst = px->grad.data() + (b * c + c0) * plane;
        for (int64_t i = 0; i < oc * plane; ++i) dst[i] += g[i];
      }
    };
  }
  return out;
}

// Cross-correlation over NCHW input with OIHW weights.
// Output extent: floor((in + 2*pad - k) / stride) + 1.
template <typename T>
TensorPtr<T> conv2d(const TensorPtr<T>& x, const TensorPtr<T>& w, const TensorPtr<T>& b, int stride, int pad) {
  require(x->shape.size() == 4, "SHAPE_MISMATCH", "conv2d input must be NCHW, got " + shape_str(x->shape));
  require(w->shape.size() == 4, "SHAPE_MISMATCH", "conv2d weight must be OIHW, got " + shape_str(w->shape));
  require(stride >= 1, "BAD_ARGUMENT", "conv2d stride must be >= 1, got " + std::to_string(stride));
  require(pad >= 0, "BAD_ARGUMENT", "conv2d pad must be >= 0");
  require(w->dim(1) == x->dim(1), "SHAPE_MISMATCH",
          "conv2d weight " + shape_str(w->shape) + " incompatible with input " + shape_str(x->shape));
  const int n = x->dim(0), ic = x->dim(1), ih = x->dim(2), iw = x->dim(3);
  const int oc = w->dim(0), kh = w->dim(2), kw = w->dim(3);
  if (b) {
    require(b->shape.size() == 1 && b->dim(0) == oc, "SHAPE_MISMATCH",
            "conv2d bias " + shape_str(b->shape) + " incompatible with weight " + shape_str(w->shape));
  }
  const int oh = (ih + 2 * pad - kh) / stride + 1;
  const int ow = (iw + 2 * pad - kw) / stride + 1;
  require(ih + 2 * pad >= kh && iw + 2 * pad >= kw, "SHAPE_MISMATCH",
          "conv2d kernel " + shape_str(w->shape) + " larger than padded input " + shape_str(x->shape));

  std::vector<TensorPtr<T>> parents = {x, w};
  if (b) parents.push_back(b);
  auto out = detail::node<T>({n, oc, oh, ow}, "conv2d", std::move(parents));

  const auto x_at = [&](int bi, int ci) { return x->data.data() + (static_cast<int64_t>(bi) * ic + ci) * ih * iw; };
  const auto w_at = [&](int oi, int ci) { return w->data.data() + (static_cast<int64_t>(oi) * ic + ci) * kh * kw; };

  for (int bi = 0; bi < n; ++bi) {
    for (int oi = 0; oi < oc; ++oi) {
      T* op = out->data.data() + (static_cast<int64_t>(bi) * oc + oi) * oh * ow;
      if (b) {
        const T bv = b->data[static_cast<size_t>(oi)];
        for (int64_t i = 0; i < static_cast<int64_t>(oh) * ow; ++i) op[i] = bv;
      }
      for (int ci = 0; ci < ic; ++ci) {
        const T* xp = x_at(bi, ci);
        const T* wp = w_at(oi, ci);
        for (int ky = 0; ky < kh; ++ky) {
          for (int kx = 0; kx < kw; ++kx) {
            const T wv = wp[ky * kw + kx];
            if (wv == T(0)) continue;
            for (int oy = 0; oy < oh; ++oy) {
              const int iy = oy * stride - pad + ky;
              if (iy < 0 || iy >= ih) continue;
              const T* xrow = xp + static_cast<int64_t>(iy) * iw;
              T* orow = op + static_cast<int64_t>(oy) * ow;
              int ox0 = 0;
              while (ox0 < ow && ox0 * stride - pad + kx < 0) ++ox0;
              int ox1 = ow;
              while (ox1 > ox0 && (ox1 - 1) * stride - pad + kx >= iw) --ox1;
              const int base = ox0 * stride - pad + kx;
              for (int ox = ox0; ox < ox1; ++ox) orow[ox] += wv * xrow[base + (ox - ox0) * stride];
            }
          }
        }
      }
    }
  }

  if (out->requires_grad) {
    Tensor<T>* o = out.get();
    Tensor<T>* px = x.get();
    Tensor<T>* pw = w.get();
    Tensor<T>* pb = b ? b.get() : nullptr;
    out->backward_fn = [o, px, pw, pb, n, ic, ih, iw, oc, oh, ow, kh, kw, stride, pad] {
      if (pb && pb->requires_grad) {
        pb->ensure_grad();
        for (int bi = 0; bi < n; ++bi)
          for (int oi = 0; oi < oc; ++oi) {
            const T* g = o->grad.data() + (static_cast<int64_t>(bi) * oc + oi) * oh * ow;
            T acc = T(0);
            for (int64_t i = 0; i < static_cast<int64_t>(oh) * ow; ++i) acc += g[i];
            pb->grad[static_cast<size_t>(oi)] += acc;
          }
      }
      const bool need_x = px->requires_grad;
      const bool need_w = pw->requires_grad;
      if (!need_x && !need_w) return;
      if (need_x) px->ensure_grad();
      if (need_w) pw->ensure_grad();
      for (int bi = 0; bi < n; ++bi) {
        for (int oi = 0; oi < oc; ++oi) {
          const T* g = o->grad.data() + (static_cast<int64_t>(bi) * oc + oi) * oh * ow;
          for (int ci = 0; ci < ic; ++ci) {
            const T* xp = px->data.data() + (static_cast<int64_t>(bi) * ic + ci) * ih * iw;
            const T* wp = pw->data.data() + (static_cast<int64_t>(oi) * ic + ci) * kh * kw;
            T* gx = need_x ? px->grad.data() + (static_cast<int64_t>(bi) * ic + ci) * ih * iw : nullptr;
            T* gw = need_w ? pw->grad.data() + (static_cast<int64_t>(oi) * ic + ci) * kh * kw : nullptr;
            for (int ky = 0; ky < kh; ++ky) {
              for (int kx = 0; kx < kw; ++kx) {
                const T wv = wp[ky * kw + kx];
                T acc_w = T(0);
                for (int oy = 0; oy < oh; ++oy) {
                  const int iy = oy * stride - pad + ky;
                  if (iy < 0 || iy >= ih) continue;
                  const T* grow = g + static_cast<int64_t>(oy) * ow;
                  const T* xrow = xp + static_cast<int64_t>(iy) * iw;
                  T* gxrow = need_x ? gx + static_cast<int64_t>(iy) * iw : nullptr;
                  int ox0 = 0;
                  while (ox0 < ow && ox0 * stride - pad + kx < 0) ++ox0;
                  int ox1 = ow;
                  while (ox1 > ox0 && (ox1 - 1) * stride - pad + kx >= iw) --ox1;
                  const int base = ox0 * stride - pad + kx;
                  for (int ox = ox0; ox < ox1; ++ox) {
                    const int ix = base + (ox - ox0) * stride;
                    acc_w += grow[ox] * xrow[ix];
                    if (need_x) gxrow[ix] += wv * grow[ox];
                  }
                }
                if (need_w) gw[ky * kw + kx] += acc_w;
              }
            }
          }
        }
      }
    };
  }
  return out;
}

// Fully connected: x (N,F) x weight (O,F) + bias (O) -> (N,O).
template <typename T>
TensorPtr<T> linear(const TensorPtr<T>& x, const TensorPtr<T>& w, const TensorPtr<T>& b) {
  require(x->shape.size() == 2 && w->shape.size() == 2 && x->dim(1) == w->dim(1), "SHAPE_MISMATCH",
          "linear input " + shape_str(x->shape) + " vs weight " + shape_str(w->shape));
  const int n = x->dim(0), f = x->dim(1), o = w->dim(0);
  if (b)
    require(b->shape.size() == 1 && b->dim(0) == o, "SHAPE_MISMATCH",
            "linear bias " + shape_str(b->shape) + " vs weight " + shape_str(w->shape));
  std::vector<TensorPtr<T>> parents = {x, w};
  if (b) parents.push_back(b);
  auto out = detail::node<T>({n, o}, "linear", std::move(parents));
  for (int bi = 0; bi < n; ++bi) {
    const T* xr = x->data.data() + static_cast<int64_t>(bi) * f;
    T* orow = out->data.data() + static_cast<int64_t>(bi) * o;
    for (int oi = 0; oi < o; ++oi) {
      const T* wr = w->data.data() + static_cast<int64_t>(oi) * f;
      T acc = b ? b->data[static_cast<size_t>(oi)] : T(0);
      for (int fi = 0; fi < f; ++fi) acc += xr[fi] * wr[fi];
      orow[oi] = acc;
    }
  }
  if (out->requires_grad) {
    Tensor<T>* on = out.get();
    Tensor<T>* px = x.get();
    Tensor<T>* pw = w.get();
    Tensor<T>* pb = b ? b.get() : nullptr;
    out->backward_fn = [on, px, pw, pb, n, f, o] {
      if (pb && pb->requires_grad) {
        pb->ensure_grad();
        for (int bi = 0; bi < n; ++bi)
          for (int oi = 0; oi < o; ++oi) pb->grad[static_cast<size_t>(oi)] += on->grad[static_cast<int64_t>(bi) * o + oi];
      }
      if (px->requires_grad) {
        px->ensure_grad();
        for (int bi = 0; bi < n; ++bi)
          for (int oi = 0; oi < o; ++oi) {
            const T g = on->grad[static_cast<int64_t>(bi) * o + oi];
            const T* wr = pw->data.data() + static_cast<int64_t>(oi) * f;
            T* gx = px->grad.data() + static_cast<int64_t>(bi) * f;
            for (int fi = 0; fi < f; ++fi) gx[fi] += g * wr[fi];
          }
      }
      if (pw->requires_grad) {
        pw->ensure_grad();
        for (int bi = 0; bi < n; ++bi)
          for (int oi = 0; oi < o; ++oi) {
            const T g = on->grad[static_cast<int64_t>(bi) * o + oi];
            const T* xr = px->data.data() + static_cast<int64_t>(bi) * f;
            T* gw = pw->grad.data() + static_cast<int64_t>(oi) * f;
            for (int fi = 0; fi < f; ++fi) gw[fi] += g * xr[fi];
          }
      }
    };
  }
  return out;
}

// Bilinear interpolation with half-pixel centers; resizing to the input
// resolution is an exact identity.
template <typename T>
TensorPtr<T> bilinear_resize(const TensorPtr<T>& x, int out_h, int out_w) {
  require(x->shape.size() == 4, "SHAPE_MISMATCH", "bilinear_resize expects NCHW, got " + shape_str(x->shape));
  require(out_h >= 1 && out_w >= 1, "BAD_ARGUMENT",
          "bilinear_resize target " + std::to_string(out_h) + "x" + std::to_string(out_w));
  const int n = x->dim(0), c = x->dim(1), ih = x->dim(2), iw = x->dim(3);
  auto ty = detail::resize_taps(ih, out_h);
  auto tx = detail::resize_taps(iw, out_w);
  auto out = detail::node<T>({n, c, out_h, out_w}, "bilinear_resize", {x});
  for (int b = 0; b < n; ++b) {
    for (int ci = 0; ci < c; ++ci) {
      const T* xp = x->data.data() + (static_cast<int64_t>(b) * c + ci) * ih * iw;
      T* op = out->data.data() + (static_cast<int64_t>(b) * c + ci) * out_h * out_w;
      for (int oy = 0; oy < out_h; ++oy) {
        const auto& t0 = ty[static_cast<size_t>(oy)];
        for (int ox = 0; ox < out_w; ++ox) {
          const auto& t1 = tx[static_cast<size_t>(ox)];
          const double v00 = xp[t0.lo * iw + t1.lo], v01 = xp[t0.lo * iw + t1.hi];
          const double v10 = xp[t0.hi * iw + t1.lo], v11 = xp[t0.hi * iw + t1.hi];
          const double top = v00 + (v01 - v00) * t1.frac;
          const double bot = v10 + (v11 - v10) * t1.frac;
          op[oy * out_w + ox] = static_cast<T>(top + (bot - top) * t0.frac);
        }
      }
    }
  }
  if (out->requires_grad) {
    Tensor<T>* o = out.get();
    Tensor<T>* px = x.get();
    out->backward_fn = [o, px, ty, tx, n, c, ih, iw, out_h, out_w] {
      px->ensure_grad();
      for (int b = 0; b < n; ++b) {
        for (int ci = 0; ci < c; ++ci) {
          T* gx = px->grad.data() + (static_cast<int64_t>(b) * c + ci) * ih * iw;
          const T* g = o->grad.data() + (static_cast<int64_t>(b) * c + ci) * out_h * out_w;
          for (int oy = 0; oy < out_h; ++oy) {
            const auto& t0 = ty[static_cast<size_t>(oy)];
            for (int ox = 0; ox < out_w; ++ox) {
              const auto& t1 = tx[static_cast<size_t>(ox)];
              const double gv = g[oy * out_w + ox];
              gx[t0.lo * iw + t1.lo] += static_cast<T>(gv * (1 - t0.frac) * (1 - t1.frac));
              gx[t0.lo * iw + t1.hi] += static_cast<T>(gv * (1 - t0.frac) * t1.frac);
              gx[t0.hi * iw + t1.lo] += static_cast<T>(gv * t0.frac * (1 - t1.frac));
              gx[t0.hi * iw + t1.hi] += static_cast<T>(gv * t0.frac * t1.frac);
            }
          }
        }
      }
    };
  }
  return out;
}

// Mean over H and W: (N,C,H,W) -> (N,C).
template <typename T>
TensorPtr<T> global_mean_pool(const TensorPtr<T>& x) {
  require(x->shape.size() == 4, "SHAPE_MISMATCH", "global_mean_pool expects NCHW, got " + shape_str(x->shape));
  const int n = x->dim(0), c = x->dim(1), h = x->dim(2), w = x->dim(3);
  require(h > 0 && w > 0, "EMPTY_SPATIAL", "global_mean_pool on zero-sized spatial extent " + shape_str(x->shape));
  auto out = detail::node<T>({n, c}, "global_mean_pool", {x});
  const int64_t plane = static_cast<int64_t>(h) * w;
  const T inv = T(1) / static_cast<T>(plane);
  for (int b = 0; b < n; ++b)
    for (int ci = 0; ci < c; ++ci) {
      const T* xp = x->data.data() + (static_cast<int64_t>(b) * c + ci) * plane;
      T acc = T(0);
      for (int64_t i = 0; i < plane; ++i) acc += xp[i];
      out->data[static_cast<int64_t>(b) * c + ci] = acc * inv;
    }
  if (out->requires_grad) {
    Tensor<T>* o = out.get();
    Tensor<T>* px = x.get();
    out->backward_fn = [o, px, n, c, plane, inv] {
      px->ensure_grad();
      for (int b = 0; b < n; ++b)
        for (int ci = 0; ci < c; ++ci) {
          const T g = o->grad[static_cast<int64_t>(b) * c + ci] * inv;
          T* gx = px->grad.data() + (static_cast<int64_t>(b) * c + ci) * plane;
          for (int64_t i = 0; i < plane; ++i) gx[i] += g;
        }
    };
  }
  return out;
}

template <typename T>
TensorPtr<T> sum(const TensorPtr<T>& x) {
  auto out = detail::node<T>({1}, "sum", {x});
  T acc = T(0);
  for (int64_t i = 0; i < x->size(); ++i) acc += x->data[i];
  out->data[0] = acc;
  if (out->requires_grad) {
    Tensor<T>* o = out.get();
    Tensor<T>* px = x.get();
    out->backward_fn = [o, px] {
      px->ensure_grad();
      for (int64_t i = 0; i < px->size(); ++i) px->grad[i] += o->grad[0];
    };
  }
  return out;
}

template <typename T>
TensorPtr<T> mean(const TensorPtr<T>& x) {
  return scale(sum(x), T(1) / static_cast<T>(x->size()));
}

// Mean absolute difference against a target tensor (usually a constant).
template <typename T>
TensorPtr<T> l1_loss(const TensorPtr<T>& pred, const TensorPtr<T>& target) {
  detail::check_same_shape(pred, target, "l1_loss");
  auto out = detail::node<T>({1}, "l1_loss", {pred, target});
  double acc = 0;
  for (int64_t i = 0; i < pred->size(); ++i) acc += std::abs(static_cast<double>(pred->data[i] - target->data[i]));
  const T inv = T(1) / static_cast<T>(pred->size());
  out->data[0] = static_cast<T>(acc) * inv;
  if (out->requires_grad) {
    Tensor<T>* o = out.get();
    Tensor<T>* pp = pred.get();
    Tensor<T>* pt = target.get();
    out->backward_fn = [o, pp, pt, inv] {
      const T g = o->grad[0] * inv;
      if (pp->requires_grad) pp->ensure_grad();
      if (pt->requires_grad) pt->ensure_grad();
      for (int64_t i = 0; i < pp->size(); ++i) {
        const T d = pp->data[i] - pt->data[i];
        const T s = d > T(0) ? g : (d < T(0) ? -g : T(0));
        if (pp->requires_grad) pp->grad[i] += s;
        if (pt->requires_grad) pt->grad[i] -= s;
      }
    };
  }
  return out;
}

// Softmax cross-entropy averaged over positions. Logits are (N,K) with one
// label per row, or (N,K,H,W) with one label per pixel in (n,y,x) order.
template <typename T>
TensorPtr<T> softmax_cross_entropy(const TensorPtr<T>& logits, const std::vector<int>& labels) {
  require(logits->shape.size() == 2 || logits->shape.size() == 4, "SHAPE_MISMATCH",
          "softmax_cross_entropy expects (N,K) or (N,K,H,W), got " + shape_str(logits->shape));
  const int n = logits->dim(0);
  const int k = logits->dim(1);
  const bool dense = logits->shape.size() == 4;
  const int64_t plane = dense ? static_cast<int64_t>(logits->dim(2)) * logits->dim(3) : 1;
  const int64_t positions = static_cast<int64_t>(n) * plane;
  require(static_cast<int64_t>(labels.size()) == positions, "SHAPE_MISMATCH",
          "softmax_cross_entropy: " + std::to_string(labels.size()) + " labels for " + std::to_string(positions) +
              " positions");
  auto out = detail::node<T>({1}, "softmax_cross_entropy", {logits});

  double total = 0;
  for (int64_t pos = 0; pos < positions; ++pos) {
    const int64_t b = pos / plane, p = pos % plane;
    const int label = labels[static_cast<size_t>(pos)];
    require(0 <= label && label < k, "BAD_ARGUMENT", "class label " + std::to_string(label) + " outside [0," +
                                                          std::to_string(k) + ")");
    const T* base = logits->data.data() + (b * k) * plane + p;
    double mx = base[0];
    for (int c = 1; c < k; ++c) mx = std::max(mx, static_cast<double>(base[c * plane]));
    double lse = 0;
    for (int c = 0; c < k; ++c) lse += std::exp(static_cast<double>(base[c * plane]) - mx);
    lse = mx + std::log(lse);
    total += lse - static_cast<double>(base[label * plane]);
  }
  out->data[0] = static_cast<T>(total / static_cast<double>(positions));

  if (out->requires_grad) {
    Tensor<T>* o = out.get();
    Tensor<T>* pl = logits.get();
    out->backward_fn = [o, pl, labels, k, plane, positions] {
      pl->ensure_grad();
      const double g = static_cast<double>(o->grad[0]) / static_cast<double>(positions);
      for (int64_t pos = 0; pos < positions; ++pos) {
        const int64_t b = pos / plane, p = pos % plane;
        const T* base = pl->data.data() + (b * k) * plane + p;
        T* gbase = pl->grad.data() + (b * k) * plane + p;
        double mx = base[0];
        for (int c = 1; c < k; ++c) mx = std::max(mx, static_cast<double>(base[c * plane]));
        double lse = 0;
        for (int c = 0; c < k; ++c) lse += std::exp(static_cast<double>(base[c * plane]) - mx);
        for (int c = 0; c < k; ++c) {
          const double soft = std::exp(static_cast<double>(base[c * plane]) - mx) / lse;
          const double onehot = (c == labels[static_cast<size_t>(pos)]) ? 1.0 : 0.0;
          gbase[c * plane] += static_cast<T>(g * (soft - onehot));
        }
      }
    };
  }
  return out;
}

// Training-time quantization proxy: adds i.i.d. uniform noise on (-0.5, 0.5)
// drawn once at construction; the gradient passes through unchanged.
template <typename T>
TensorPtr<T> add_uniform_noise(const TensorPtr<T>& x, Rng& rng) {
  auto out = detail::node<T>(x->shape, "add_uniform_noise", {x});
  for (int64_t i = 0; i < x->size(); ++i) out->data[i] = x->data[i] + static_cast<T>(rng.next_unit() - 0.5);
  if (out->requires_grad) {
    Tensor<T>* o = out.get();
    Tensor<T>* px = x.get();
    out->backward_fn = [o, px] {
      px->ensure_grad();
      for (int64_t i = 0; i < o->size(); ++i) px->grad[i] += o->grad[i];
    };
  }
  return out;
}

// Per-element coding cost in bits of the interval integral
//   q = Phi((x - mu + 0.5)/sigma) - Phi((x - mu - 0.5)/sigma)
// floored at 2^-16. This is the differentiable counterpart of the discretized
// Gaussian PMF used by the coder.
template <typename T>
TensorPtr<T> interval_nll_bits(const TensorPtr<T>& x, const TensorPtr<T>& mu, const TensorPtr<T>& sigma) {
  detail::check_same_shape(x, mu, "interval_nll_bits");
  detail::check_same_shape(x, sigma, "interval_nll_bits");
  auto out = detail::node<T>(x->shape, "interval_nll_bits", {x, mu, sigma});
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  constexpr double kInvLn2 = 1.4426950408889634074;
  for (int64_t i = 0; i < x->size(); ++i) {
    const double s = static_cast<double>(sigma->data[i]);
    require(s > 0, "BAD_ARGUMENT", "interval_nll_bits: sigma must be positive");
    const double d = static_cast<double>(x->data[i]) - static_cast<double>(mu->data[i]);
    const double a = (d + 0.5) / s, b = (d - 0.5) / s;
    double q = 0.5 * (std::erfc(-a * kInvSqrt2) - std::erfc(-b * kInvSqrt2));
    q = std::min(std::max(q, kPmfFloor), 1.0);
    out->data[i] = static_cast<T>(-std::log2(q));
  }
  if (out->requires_grad) {
    Tensor<T>* o = out.get();
    Tensor<T>* px = x.get();
    Tensor<T>* pm = mu.get();
    Tensor<T>* ps = sigma.get();
    out->backward_fn = [o, px, pm, ps, kInvSqrt2, kInvLn2] {
      constexpr double kInvSqrt2Pi = 0.39894228040143267794;
      if (px->requires_grad) px->ensure_grad();
      if (pm->requires_grad) pm->ensure_grad();
      if (ps->requires_grad) ps->ensure_grad();
      for (int64_t i = 0; i < o->size(); ++i) {
        const double s = static_cast<double>(ps->data[i]);
        const double d = static_cast<double>(px->data[i]) - static_cast<double>(pm->data[i]);
        const double a = (d + 0.5) / s, b = (d - 0.5) / s;
        double q = 0.5 * (std::erfc(-a * kInvSqrt2) - std::erfc(-b * kInvSqrt2));
        if (q <= kPmfFloor || q >= 1.0) continue;  // clamped: zero gradient
        const double pa = kInvSqrt2Pi * std::exp(-0.5 * a * a);
        const double pb = kInvSqrt2Pi * std::exp(-0.5 * b * b);
        const double dbits_dq = -kInvLn2 / q;
        const double gq = static_cast<double>(o->grad[i]) * dbits_dq;
        if (px->requires_grad) px->grad[i] += static_cast<T>(gq * (pa - pb) / s);
        if (pm->requires_grad) pm->grad[i] += static_cast<T>(-gq * (pa - pb) / s);
        if (ps->requires_grad) ps->grad[i] += static_cast<T>(-gq * (a * pa - b * pb) / s);
      }
    };
  }
  return out;
}

// Linear combination of resized codebook bases:
//   prior[b,l] = sum_j coeffs[b, l*tau + j] * bases[j]
// with coeffs (N, n*tau) and bases (1, tau, H, W).
template <typename T>
TensorPtr<T> codebook_combine(const TensorPtr<T>& coeffs, const TensorPtr<T>& bases, int n_channels, int tau) {
  require(coeffs->shape.size() == 2 && coeffs->dim(1) == n_channels * tau, "SHAPE_MISMATCH",
          "codebook_combine coefficients " + shape_str(coeffs->shape) + " vs n*tau = " +
              std::to_string(n_channels * tau));
  require(bases->shape.size() == 4 && bases->dim(0) == 1 && bases->dim(1) == tau, "SHAPE_MISMATCH",
          "codebook_combine bases " + shape_str(bases->shape) + " vs tau = " + std::to_string(tau));
  const int n = coeffs->dim(0), h = bases->dim(2), w = bases->dim(3);
  const int64_t plane = static_cast<int64_t>(h) * w;
  auto out = detail::node<T>({n, n_channels, h, w}, "codebook_combine", {coeffs, bases});
  for (int b = 0; b < n; ++b) {
    const T* cf = coeffs->data.data() + static_cast<int64_t>(b) * n_channels * tau;
    for (int l = 0; l < n_channels; ++l) {
      T* op = out->data.data() + (static_cast<int64_t>(b) * n_channels + l) * plane;
      for (int j = 0; j < tau; ++j) {
        const T a = cf[l * tau + j];
        const T* cb = bases->data.data() + static_cast<int64_t>(j) * plane;
        for (int64_t i = 0; i < plane; ++i) op[i] += a * cb[i];
      }
    }
  }
  if (out->requires_grad) {
    Tensor<T>* o = out.get();
    Tensor<T>* pc = coeffs.get();
    Tensor<T>* pbs = bases.get();
    out->backward_fn = [o, pc, pbs, n, n_channels, tau, plane] {
      if (pc->requires_grad) pc->ensure_grad();
      if (pbs->requires_grad) pbs->ensure_grad();
      for (int b = 0; b < n; ++b) {
        for (int l = 0; l < n_channels; ++l) {
          const T* g = o->grad.data() + (static_cast<int64_t>(b) * n_channels + l) * plane;
          for (int j = 0; j < tau; ++j) {
            const T* cb = pbs->data.data() + static_cast<int64_t>(j) * plane;
            const T a = pc->data[static_cast<int64_t>(b) * n_channels * tau + l * tau + j];
            if (pc->requires_grad) {
              T acc = T(0);
              for (int64_t i = 0; i < plane; ++i) acc += g[i] * cb[i];
              pc->grad[static_cast<int64_t>(b) * n_channels * tau + l * tau + j] += acc;
            }
            if (pbs->requires_grad) {
              T* gb = pbs->grad.data() + static_cast<int64_t>(j) * plane;
              for (int64_t i = 0; i < plane; ++i) gb[i] += a * g[i];
            }
          }
        }
      }
    };
  }
  return out;
}

}  // namespace txc::nn

#endif  // TAXOCODEC_NN_OPS_HPP_
