#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarm/rng.hpp"
#include "swarm/tape.hpp"
#include "swarm/tensor.hpp"

namespace swarm {

// Adam with bias correction. Moments are kept per parameter, aligned by
// index with the ParamSet; t counts completed updates.
template <class S>
struct AdamStateT {
  std::vector<TensorT<S>> m;
  std::vector<TensorT<S>> v;
  int64_t t = 0;

  static AdamStateT for_params(const ParamSetT<S>& params) {
    AdamStateT st;
    st.m.reserve(params.size());
    st.v.reserve(params.size());
    for (size_t i = 0; i < params.size(); ++i) {
      st.m.push_back(TensorT<S>::zeros(params.at(i).value.shape));
      st.v.push_back(TensorT<S>::zeros(params.at(i).value.shape));
    }
    return st;
  }
};

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <class S>
void adam_step(ParamSetT<S>& params, AdamStateT<S>& state, const AdamConfig& cfg) {
  if (state.m.size() != params.size()) throw std::invalid_argument("adam: state/param count mismatch");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (size_t i = 0; i < params.size(); ++i) {
    auto& p = params.at(i);
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (int64_t j = 0; j < p.value.numel(); ++j) {
      const double g = static_cast<double>(p.grad.data[j]);
      if (!std::isfinite(g))
        throw std::runtime_error("adam: non-finite gradient in parameter '" + p.name +
                                 "' at index " + std::to_string(j));
      const double mj = cfg.beta1 * static_cast<double>(m.data[j]) + (1.0 - cfg.beta1) * g;
      const double vj = cfg.beta2 * static_cast<double>(v.data[j]) + (1.0 - cfg.beta2) * g * g;
      m.data[j] = static_cast<S>(mj);
      v.data[j] = static_cast<S>(vj);
      const double mhat = mj / bc1;
      const double vhat = vj / bc2;
      p.value.data[j] -= static_cast<S>(cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps));
    }
  }
}

// Scales all gradients by max_norm/g when the global L2 norm g exceeds
// max_norm. Returns the pre-clip norm.
template <class S>
double clip_global_norm(ParamSetT<S>& params, double max_norm) {
  if (max_norm <= 0) throw std::invalid_argument("clip_global_norm: max_norm must be > 0");
  double sumsq = 0.0;
  for (size_t i = 0; i < params.size(); ++i)
    for (S g : params.at(i).grad.data) sumsq += static_cast<double>(g) * static_cast<double>(g);
  const double norm = std::sqrt(sumsq);
  if (norm > max_norm) {
    const S s = static_cast<S>(max_norm / norm);
    for (size_t i = 0; i < params.size(); ++i)
      for (S& g : params.at(i).grad.data) g *= s;
  }
  return norm;
}

// Orthogonal initialization (gain 1): Gram-Schmidt over the longer dimension
// of a Gaussian draw, so the smaller-dimension Gram matrix is the identity.
// All arithmetic in double regardless of S; deterministic given the rng.
template <class S>
TensorT<S> orthogonal_init(int rows, int cols, Rng& rng) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("orthogonal_init: dims must be >= 1");
  const bool tall = rows >= cols;
  const int n = tall ? rows : cols;  // vector length
  const int k = tall ? cols : rows;  // number of orthonormal vectors
  std::vector<std::vector<double>> q(k, std::vector<double>(n));
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) q[j][i] = rng.normal();
  for (int j = 0; j < k; ++j) {
    for (int pass = 0; pass < 2; ++pass) {  // one re-orthogonalization pass
      for (int p = 0; p < j; ++p) {
        double r = 0.0;
        for (int i = 0; i < n; ++i) r += q[p][i] * q[j][i];
        for (int i = 0; i < n; ++i) q[j][i] -= r * q[p][i];
      }
    }
    double nrm = 0.0;
    for (int i = 0; i < n; ++i) nrm += q[j][i] * q[j][i];
    nrm = std::sqrt(nrm);
    if (nrm < 1e-12) throw std::runtime_error("orthogonal_init: degenerate draw");
    for (int i = 0; i < n; ++i) q[j][i] /= nrm;
  }
  TensorT<S> out = TensorT<S>::zeros({rows, cols});
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      out.at(r, c) = static_cast<S>(tall ? q[c][r] : q[r][c]);
  return out;
}

using AdamState = AdamStateT<float>;

}  // namespace swarm
