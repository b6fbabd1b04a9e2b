// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#include "uaai/learnkit/ops.hpp"

#include <Eigen/Core>
#include <cmath>

#include "uaai/error.hpp"

namespace uaai::learnkit::ops {
namespace {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using MapM = Eigen::Map<Mat<S>>;
template <typename S>
using CMapM = Eigen::Map<const Mat<S>>;

struct ImageDims {
  std::size_t n, c, h, w;
};

template <typename S>
ImageDims image_dims(const BasicArray<S>& x, const char* op) {
  if (x.rank() != 4) throw ShapeError(std::string(op) + ": expected [N,C,H,W], got " + numkit::shape_string(x.shape()));
  return {x.dim(0), x.dim(1), x.dim(2), x.dim(3)};
}

// col is [C*k*k, H*W] for a single image.
template <typename S>
void im2col(const S* img, std::size_t c, std::size_t h, std::size_t w, std::size_t k, std::size_t pad, S* col) {
  const std::ptrdiff_t ip = static_cast<std::ptrdiff_t>(pad);
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t ki = 0; ki < k; ++ki) {
      for (std::size_t kj = 0; kj < k; ++kj) {
        S* row = col + ((ch * k + ki) * k + kj) * h * w;
        for (std::size_t y = 0; y < h; ++y) {
          const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y + ki) - ip;
          S* dst = row + y * w;
          if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(h)) {
            std::fill(dst, dst + w, S{0});
            continue;
          }
          const S* src = img + (ch * h + static_cast<std::size_t>(sy)) * w;
          for (std::size_t x = 0; x < w; ++x) {
            const std::ptrdiff_t sx = static_cast<std::ptrdiff_t>(x + kj) - ip;
            dst[x] = (sx < 0 || sx >= static_cast<std::ptrdiff_t>(w)) ? S{0} : src[sx];
          }
        }
      }
    }
  }
}

template <typename S>
void col2im_add(const S* col, std::size_t c, std::size_t h, std::size_t w, std::size_t k, std::size_t pad, S* img) {
  const std::ptrdiff_t ip = static_cast<std::ptrdiff_t>(pad);
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t ki = 0; ki < k; ++ki) {
      for (std::size_t kj = 0; kj < k; ++kj) {
        const S* row = col + ((ch * k + ki) * k + kj) * h * w;
        for (std::size_t y = 0; y < h; ++y) {
          const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y + ki) - ip;
          if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(h)) continue;
          S* dst = img + (ch * h + static_cast<std::size_t>(sy)) * w;
          const S* src = row + y * w;
          for (std::size_t x = 0; x < w; ++x) {
            const std::ptrdiff_t sx = static_cast<std::ptrdiff_t>(x + kj) - ip;
            if (sx >= 0 && sx < static_cast<std::ptrdiff_t>(w)) dst[sx] += src[x];
          }
        }
      }
    }
  }
}

}  // namespace

template <typename S>
BasicArray<S> linear_forward(const BasicArray<S>& x, const BasicArray<S>& w, const BasicArray<S>& b) {
  const std::size_t out = w.dim(0), in = w.dim(1);
  if (x.rank() < 1 || x.dim(0) == 0 || x.size() != x.dim(0) * in) {
    throw ShapeError("linear: input " + numkit::shape_string(x.shape()) + " does not have " + std::to_string(in) +
                     " features per row");
  }
  const std::size_t n = x.dim(0);
  BasicArray<S> y({n, out});
  MapM<S> ym(y.data(), n, out);
  ym.noalias() = CMapM<S>(x.data(), n, in) * CMapM<S>(w.data(), out, in).transpose();
  ym.rowwise() += Eigen::Map<const Eigen::Matrix<S, 1, Eigen::Dynamic>>(b.data(), out);
  return y;
}

template <typename S>
BasicArray<S> linear_backward(const BasicArray<S>& x, const BasicArray<S>& w, const BasicArray<S>& dy,
                              BasicArray<S>& dw, BasicArray<S>& db) {
  const std::size_t out = w.dim(0), in = w.dim(1), n = x.dim(0);
  if (dy.size() != n * out) throw ShapeError("linear backward: upstream gradient shape mismatch");
  CMapM<S> dym(dy.data(), n, out);
  CMapM<S> xm(x.data(), n, in);
  MapM<S>(dw.data(), out, in).noalias() += dym.transpose() * xm;
  Eigen::Map<Eigen::Matrix<S, 1, Eigen::Dynamic>>(db.data(), out) += dym.colwise().sum();
  BasicArray<S> dx(x.shape());
  MapM<S>(dx.data(), n, in).noalias() = dym * CMapM<S>(w.data(), out, in);
  return dx;
}

template <typename S>
BasicArray<S> conv2d_forward(const BasicArray<S>& x, const BasicArray<S>& w, const BasicArray<S>& b,
                             std::size_t padding) {
  const auto d = image_dims(x, "conv2d");
  const std::size_t cout = w.dim(0), cin = w.dim(1), k = w.dim(2);
  if (d.c != cin) {
    throw ShapeError("conv2d: input has " + std::to_string(d.c) + " channels, kernel expects " + std::to_string(cin));
  }
  const std::size_t hw = d.h * d.w, ckk = cin * k * k;
  BasicArray<S> y({d.n, cout, d.h, d.w});
  typename BasicArray<S>::Storage col(ckk * hw);
  CMapM<S> wm(w.data(), cout, ckk);
  for (std::size_t n = 0; n < d.n; ++n) {
    im2col(x.data() + n * cin * hw, cin, d.h, d.w, k, padding, col.data());
    MapM<S> ym(y.data() + n * cout * hw, cout, hw);
    ym.noalias() = wm * CMapM<S>(col.data(), ckk, hw);
    for (std::size_t o = 0; o < cout; ++o) ym.row(o).array() += b[o];
  }
  return y;
}

template <typename S>
BasicArray<S> conv2d_backward(const BasicArray<S>& x, const BasicArray<S>& w, const BasicArray<S>& dy,
                              std::size_t padding, BasicArray<S>& dw, BasicArray<S>& db) {
  const auto d = image_dims(x, "conv2d backward");
  const std::size_t cout = w.dim(0), cin = w.dim(1), k = w.dim(2);
  const std::size_t hw = d.h * d.w, ckk = cin * k * k;
  if (dy.size() != d.n * cout * hw) throw ShapeError("conv2d backward: upstream gradient shape mismatch");
  BasicArray<S> dx(x.shape());
  typename BasicArray<S>::Storage col(ckk * hw);
  typename BasicArray<S>::Storage dcol(ckk * hw);
  CMapM<S> wm(w.data(), cout, ckk);
  MapM<S> dwm(dw.data(), cout, ckk);
  for (std::size_t n = 0; n < d.n; ++n) {
    im2col(x.data() + n * cin * hw, cin, d.h, d.w, k, padding, col.data());
    CMapM<S> dym(dy.data() + n * cout * hw, cout, hw);
    dwm.noalias() += dym * CMapM<S>(col.data(), ckk, hw).transpose();
    for (std::size_t o = 0; o < cout; ++o) db[o] += dym.row(o).sum();
    MapM<S>(dcol.data(), ckk, hw).noalias() = wm.transpose() * dym;
    col2im_add(dcol.data(), cin, d.h, d.w, k, padding, dx.data() + n * cin * hw);
  }
  return dx;
}

template <typename S>
BasicArray<S> channel_avg_pool_forward(const BasicArray<S>& x) {
  const auto d = image_dims(x, "channel_avg_pool");
  const std::size_t hw = d.h * d.w;
  BasicArray<S> y({d.n, 1, d.h, d.w});
  const S inv = S{1} / static_cast<S>(d.c);
  for (std::size_t n = 0; n < d.n; ++n) {
    S* dst = y.data() + n * hw;
    for (std::size_t c = 0; c < d.c; ++c) {
      const S* src = x.data() + (n * d.c + c) * hw;
      for (std::size_t i = 0; i < hw; ++i) dst[i] += src[i];
    }
    for (std::size_t i = 0; i < hw; ++i) dst[i] *= inv;
  }
  return y;
}

template <typename S>
BasicArray<S> channel_avg_pool_backward(const Shape& input_shape, const BasicArray<S>& dy) {
  const std::size_t n_img = input_shape[0], c = input_shape[1], hw = input_shape[2] * input_shape[3];
  BasicArray<S> dx(input_shape);
  const S inv = S{1} / static_cast<S>(c);
  for (std::size_t n = 0; n < n_img; ++n) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      S* dst = dx.data() + (n * c + ch) * hw;
      const S* src = dy.data() + n * hw;
      for (std::size_t i = 0; i < hw; ++i) dst[i] = src[i] * inv;
    }
  }
  return dx;
}

template <typename S>
BasicArray<S> channel_max_pool_forward(const BasicArray<S>& x, std::vector<std::uint32_t>* winners) {
  const auto d = image_dims(x, "channel_max_pool");
  const std::size_t hw = d.h * d.w;
  BasicArray<S> y({d.n, 1, d.h, d.w});
  if (winners) winners->assign(d.n * hw, 0);
  for (std::size_t n = 0; n < d.n; ++n) {
    for (std::size_t i = 0; i < hw; ++i) {
      S best = x[(n * d.c) * hw + i];
      std::uint32_t arg = 0;
      for (std::size_t c = 1; c < d.c; ++c) {
        const S v = x[(n * d.c + c) * hw + i];
        if (v > best) {
          best = v;
          arg = static_cast<std::uint32_t>(c);
        }
      }
      y[n * hw + i] = best;
      if (winners) (*winners)[n * hw + i] = arg;
    }
  }
  return y;
}

template <typename S>
BasicArray<S> channel_max_pool_backward(const Shape& input_shape, const std::vector<std::uint32_t>& winners,
                                        const BasicArray<S>& dy) {
  const std::size_t n_img = input_shape[0], c = input_shape[1], hw = input_shape[2] * input_shape[3];
  BasicArray<S> dx(input_shape);
  for (std::size_t n = 0; n < n_img; ++n) {
    for (std::size_t i = 0; i < hw; ++i) dx[(n * c + winners[n * hw + i]) * hw + i] = dy[n * hw + i];
  }
  return dx;
}

template <typename S>
BasicArray<S> concat_channels(const BasicArray<S>& a, const BasicArray<S>& b) {
  const auto da = image_dims(a, "concat_channels");
  const auto db = image_dims(b, "concat_channels");
  if (da.n != db.n || da.h != db.h || da.w != db.w) throw ShapeError("concat_channels: incompatible inputs");
  const std::size_t hw = da.h * da.w;
  BasicArray<S> y({da.n, da.c + db.c, da.h, da.w});
  for (std::size_t n = 0; n < da.n; ++n) {
    std::copy_n(a.data() + n * da.c * hw, da.c * hw, y.data() + n * (da.c + db.c) * hw);
    std::copy_n(b.data() + n * db.c * hw, db.c * hw, y.data() + (n * (da.c + db.c) + da.c) * hw);
  }
  return y;
}

template <typename S>
std::pair<BasicArray<S>, BasicArray<S>> split_channels(const BasicArray<S>& x, std::size_t first) {
  const auto d = image_dims(x, "split_channels");
  if (first > d.c) throw ShapeError("split_channels: split point beyond channel count");
  const std::size_t hw = d.h * d.w, rest = d.c - first;
  BasicArray<S> a({d.n, first, d.h, d.w});
  BasicArray<S> b({d.n, rest, d.h, d.w});
  for (std::size_t n = 0; n < d.n; ++n) {
    std::copy_n(x.data() + n * d.c * hw, first * hw, a.data() + n * first * hw);
    std::copy_n(x.data() + (n * d.c + first) * hw, rest * hw, b.data() + n * rest * hw);
  }
  return {std::move(a), std::move(b)};
}

template <typename S>
void relu_forward(BasicArray<S>& x) {
  for (S& v : x.values()) v = v > S{0} ? v : S{0};
}

template <typename S>
void relu_backward(const BasicArray<S>& y, BasicArray<S>& dy) {
  for (std::size_t i = 0; i < dy.size(); ++i) {
    if (!(y[i] > S{0})) dy[i] = S{0};
  }
}

template <typename S>
void sigmoid_forward(BasicArray<S>& x) {
  for (S& v : x.values()) v = S{1} / (S{1} + std::exp(-v));
}

template <typename S>
void sigmoid_backward(const BasicArray<S>& y, BasicArray<S>& dy) {
  for (std::size_t i = 0; i < dy.size(); ++i) dy[i] *= y[i] * (S{1} - y[i]);
}

#define UAAI_INSTANTIATE_OPS(S)                                                                                   \
  template BasicArray<S> linear_forward(const BasicArray<S>&, const BasicArray<S>&, const BasicArray<S>&);       \
  template BasicArray<S> linear_backward(const BasicArray<S>&, const BasicArray<S>&, const BasicArray<S>&,       \
                                         BasicArray<S>&, BasicArray<S>&);                                        \
  template BasicArray<S> conv2d_forward(const BasicArray<S>&, const BasicArray<S>&, const BasicArray<S>&,        \
                                        std::size_t);                                                            \
  template BasicArray<S> conv2d_backward(const BasicArray<S>&, const BasicArray<S>&, const BasicArray<S>&,       \
                                         std::size_t, BasicArray<S>&, BasicArray<S>&);                           \
  template BasicArray<S> channel_avg_pool_forward(const BasicArray<S>&);                                         \
  template BasicArray<S> channel_avg_pool_backward(const Shape&, const BasicArray<S>&);                          \
  template BasicArray<S> channel_max_pool_forward(const BasicArray<S>&, std::vector<std::uint32_t>*);           \
  template BasicArray<S> channel_max_pool_backward(const Shape&, const std::vector<std::uint32_t>&,              \
                                                   const BasicArray<S>&);                                        \
  template BasicArray<S> concat_channels(const BasicArray<S>&, const BasicArray<S>&);                            \
  template std::pair<BasicArray<S>, BasicArray<S>> split_channels(const BasicArray<S>&, std::size_t);            \
  template void relu_forward(BasicArray<S>&);                                                                    \
  template void relu_backward(const BasicArray<S>&, BasicArray<S>&);                                             \
  template void sigmoid_forward(BasicArray<S>&);                                                                 \
  template void sigmoid_backward(const BasicArray<S>&, BasicArray<S>&);

UAAI_INSTANTIATE_OPS(float)
UAAI_INSTANTIATE_OPS(double)

#undef UAAI_INSTANTIATE_OPS

}  // namespace uaai::learnkit::ops
