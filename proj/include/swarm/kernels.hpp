#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

// Row-level numeric kernels shared by every forward path: the batched
// inference forward, the tape-recorded training forward, and the per-agent
// decentralized forward. Keeping exactly one (noinline) instantiation per
// scalar type means all paths produce bit-identical values: summation order
// is fixed per output element and the compiler cannot specialize per call
// site.

#define SWARM_NOINLINE [[gnu::noinline]]

namespace swarm::kern {

template <class S>
SWARM_NOINLINE S dot(const S* a, const S* b, int n) {
  S acc = S(0);
  for (int i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

template <class S>
inline void axpy(S* y, const S* x, S a, int n) {
  for (int i = 0; i < n; ++i) y[i] += a * x[i];
}

// 4-row x 4-column micro update: y_r[o] accumulates its four contributions
// left to right, so each element's summation order is the plain loop order.
// Blocking over rows only amortizes the w loads; it never reorders a sum.
template <class S>
inline void axpy4x4(S* __restrict ya, S* __restrict yb, S* __restrict yc, S* __restrict yd,
                    const S* __restrict w0, const S* __restrict w1, const S* __restrict w2,
                    const S* __restrict w3, const S* xa, const S* xb, const S* xc, const S* xd,
                    int n) {
  for (int o = 0; o < n; ++o) {
    const S v0 = w0[o], v1 = w1[o], v2 = w2[o], v3 = w3[o];
    ya[o] = (((ya[o] + xa[0] * v0) + xa[1] * v1) + xa[2] * v2) + xa[3] * v3;
    yb[o] = (((yb[o] + xb[0] * v0) + xb[1] * v1) + xb[2] * v2) + xb[3] * v3;
    yc[o] = (((yc[o] + xc[0] * v0) + xc[1] * v1) + xc[2] * v2) + xc[3] * v3;
    yd[o] = (((yd[o] + xd[0] * v0) + xd[1] * v1) + xd[2] * v2) + xd[3] * v3;
  }
}

template <class S>
inline void axpy1x4(S* __restrict ya, S* __restrict yb, S* __restrict yc, S* __restrict yd,
                    const S* __restrict w0, S a, S b, S c, S d, int n) {
  for (int o = 0; o < n; ++o) {
    const S v = w0[o];
    ya[o] += a * v;
    yb[o] += b * v;
    yc[o] += c * v;
    yd[o] += d * v;
  }
}

// y[r,:] = b + x[r,:] * W, with W stored row-major (in x out).
// Accumulation runs over i in increasing order for every output element.
// Rows are processed in blocks of four through one micro-kernel; a partial
// final block is padded with scratch rows so every real row takes the same
// instruction path regardless of the batch size.
template <class S>
SWARM_NOINLINE void affine_rows(const S* x, int rows, int in, const S* w, const S* b,
                                S* y, int out) {
  std::vector<S> pad;
  const S* xp[4];
  S* yp[4];
  for (int r = 0; r < rows; r += 4) {
    const int live = rows - r < 4 ? rows - r : 4;
    if (live < 4 && pad.empty()) pad.assign(static_cast<size_t>(3) * (in + out), S(0));
    for (int k = 0; k < 4; ++k) {
      xp[k] = k < live ? x + static_cast<int64_t>(r + k) * in : pad.data() + (k - live) * in;
      yp[k] = k < live ? y + static_cast<int64_t>(r + k) * out
                       : pad.data() + 3 * in + static_cast<int64_t>(k - live) * out;
    }
    for (int k = 0; k < 4; ++k)
      for (int o = 0; o < out; ++o) yp[k][o] = b ? b[o] : S(0);
    int i = 0;
    for (; i + 4 <= in; i += 4) {
      const S* wi = w + static_cast<int64_t>(i) * out;
      axpy4x4(yp[0], yp[1], yp[2], yp[3], wi, wi + out, wi + 2 * out, wi + 3 * out, xp[0] + i,
              xp[1] + i, xp[2] + i, xp[3] + i, out);
    }
    for (; i < in; ++i)
      axpy1x4(yp[0], yp[1], yp[2], yp[3], w + static_cast<int64_t>(i) * out, xp[0][i], xp[1][i],
              xp[2][i], xp[3][i], out);
  }
}

// y[r,:] += x[r,:] * W (no bias, no initialization); same blocking and
// per-element order as affine_rows.
template <class S>
SWARM_NOINLINE void matmul_acc_rows(const S* x, int rows, int in, const S* w, S* y, int out) {
  std::vector<S> pad;
  const S* xp[4];
  S* yp[4];
  for (int r = 0; r < rows; r += 4) {
    const int live = rows - r < 4 ? rows - r : 4;
    if (live < 4 && pad.empty()) pad.assign(static_cast<size_t>(3) * (in + out), S(0));
    for (int k = 0; k < 4; ++k) {
      xp[k] = k < live ? x + static_cast<int64_t>(r + k) * in : pad.data() + (k - live) * in;
      yp[k] = k < live ? y + static_cast<int64_t>(r + k) * out
                       : pad.data() + 3 * in + static_cast<int64_t>(k - live) * out;
    }
    int i = 0;
    for (; i + 4 <= in; i += 4) {
      const S* wi = w + static_cast<int64_t>(i) * out;
      axpy4x4(yp[0], yp[1], yp[2], yp[3], wi, wi + out, wi + 2 * out, wi + 3 * out, xp[0] + i,
              xp[1] + i, xp[2] + i, xp[3] + i, out);
    }
    for (; i < in; ++i)
      axpy1x4(yp[0], yp[1], yp[2], yp[3], w + static_cast<int64_t>(i) * out, xp[0][i], xp[1][i],
              xp[2][i], xp[3][i], out);
  }
}

template <class S>
SWARM_NOINLINE void relu_rows(const S* x, S* y, int64_t n) {
  for (int64_t i = 0; i < n; ++i) y[i] = x[i] > S(0) ? x[i] : S(0);
}

// In-place softmax over s[0..n). Max-shifted for stability.
template <class S>
SWARM_NOINLINE void softmax_inplace(S* s, int n) {
  S m = s[0];
  for (int i = 1; i < n; ++i)
    if (s[i] > m) m = s[i];
  S sum = S(0);
  for (int i = 0; i < n; ++i) {
    s[i] = std::exp(s[i] - m);
    sum += s[i];
  }
  for (int i = 0; i < n; ++i) s[i] /= sum;
}

// out[i] = z[i] - logsumexp(z).
template <class S>
SWARM_NOINLINE void log_softmax_row(const S* z, int n, S* out) {
  S m = z[0];
  for (int i = 1; i < n; ++i)
    if (z[i] > m) m = z[i];
  S sum = S(0);
  for (int i = 0; i < n; ++i) sum += std::exp(z[i] - m);
  const S lse = m + std::log(sum);
  for (int i = 0; i < n; ++i) out[i] = z[i] - lse;
}

// Multi-head scaled dot-product attention for one receiving agent.
// kptr/vptr are the neighbors' key/value rows in sender-index order; the
// receiving agent itself is one of them. Writes the aggregated message
// (dim d) to out and, optionally, the per-head weights to w_out
// (heads x nn, row-major).
template <class S>
SWARM_NOINLINE void mha_attend_row(const S* q, const S* const* kptr, const S* const* vptr,
                                   int nn, int d, int heads, S* out, S* scratch,
                                   S* w_out = nullptr) {
  const int dh = d / heads;
  const S scale = S(1) / std::sqrt(static_cast<S>(dh));
  for (int h = 0; h < heads; ++h) {
    const int off = h * dh;
    S* s = scratch;
    for (int j = 0; j < nn; ++j) s[j] = dot(q + off, kptr[j] + off, dh) * scale;
    softmax_inplace(s, nn);
    if (w_out)
      for (int j = 0; j < nn; ++j) w_out[h * nn + j] = s[j];
    for (int o = 0; o < dh; ++o) out[off + o] = S(0);
    for (int j = 0; j < nn; ++j) axpy(out + off, vptr[j] + off, s[j], dh);
  }
}

// Exponential-kernel attention: scalar keys, weight exp(-(k_m - k_n)^2)
// normalized over neighbors.
template <class S>
SWARM_NOINLINE void exp_attend_row(S k_self, const S* const* kptr, const S* const* vptr,
                                   int nn, int d, S* out, S* scratch,
                                   S* w_out = nullptr) {
  S* s = scratch;
  for (int j = 0; j < nn; ++j) {
    const S diff = k_self - kptr[j][0];
    s[j] = -(diff * diff);
  }
  softmax_inplace(s, nn);
  if (w_out)
    for (int j = 0; j < nn; ++j) w_out[j] = s[j];
  for (int o = 0; o < d; ++o) out[o] = S(0);
  for (int j = 0; j < nn; ++j) axpy(out, vptr[j], s[j], d);
}

// Uniform attention: every neighbor weighted 1/nn.
template <class S>
SWARM_NOINLINE void uniform_attend_row(const S* const* vptr, int nn, int d, S* out,
                                       S* w_out = nullptr) {
  const S w = S(1) / static_cast<S>(nn);
  if (w_out)
    for (int j = 0; j < nn; ++j) w_out[j] = w;
  for (int o = 0; o < d; ++o) out[o] = S(0);
  for (int j = 0; j < nn; ++j) axpy(out, vptr[j], w, d);
}

// Single-head cross attention of one agent query against its L entity
// keys/values (contiguous, stride d). Scale 1/sqrt(d).
template <class S>
SWARM_NOINLINE void entity_attend_row(const S* q, const S* k, const S* v, int L, int d,
                                      S* out, S* scratch) {
  const S scale = S(1) / std::sqrt(static_cast<S>(d));
  S* s = scratch;
  for (int l = 0; l < L; ++l) s[l] = dot(q, k + static_cast<int64_t>(l) * d, d) * scale;
  softmax_inplace(s, L);
  for (int o = 0; o < d; ++o) out[o] = S(0);
  for (int l = 0; l < L; ++l) axpy(out, v + static_cast<int64_t>(l) * d, s[l], d);
}

// Categorical sample from logits given u ~ U[0,1). Walks the CDF of the
// softmax distribution; deterministic in (logits, u).
template <class S>
SWARM_NOINLINE int sample_categorical(const S* logits, int n, double u, S* scratch) {
  for (int i = 0; i < n; ++i) scratch[i] = logits[i];
  softmax_inplace(scratch, n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += static_cast<double>(scratch[i]);
    if (u < acc) return i;
  }
  return n - 1;
}

// Argmax with lowest-index tie-break.
template <class S>
inline int argmax_row(const S* x, int n) {
  int best = 0;
  for (int i = 1; i < n; ++i)
    if (x[i] > x[best]) best = i;
  return best;
}

}  // namespace swarm::kern
