#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "swarm/kernels.hpp"
#include "swarm/mask.hpp"
#include "swarm/tensor.hpp"

namespace swarm {

template <class S>
struct ParameterT {
  std::string name;
  TensorT<S> value;
  TensorT<S> grad;  // same shape as value, additive across backward calls

  ParameterT(std::string n, TensorT<S> v)
      : name(std::move(n)), value(std::move(v)), grad(TensorT<S>::zeros(value.shape)) {}
};

// Named parameter collection. Names are unique and stable; they form the
// checkpoint contract. Addresses are stable after add() so tapes may bind
// raw pointers within a training step.
template <class S>
class ParamSetT {
 public:
  ParameterT<S>& add(const std::string& name, TensorT<S> value) {
    if (index_.count(name)) throw std::invalid_argument("duplicate parameter name: " + name);
    items_.push_back(std::make_unique<ParameterT<S>>(name, std::move(value)));
    index_[name] = static_cast<int>(items_.size()) - 1;
    return *items_.back();
  }

  ParameterT<S>* find(const std::string& name) {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : items_[it->second].get();
  }
  const ParameterT<S>* find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : items_[it->second].get();
  }

  size_t size() const { return items_.size(); }
  ParameterT<S>& at(size_t i) { return *items_[i]; }
  const ParameterT<S>& at(size_t i) const { return *items_[i]; }

  void zero_grad() {
    for (auto& p : items_)
      std::fill(p->grad.data.begin(), p->grad.data.end(), S(0));
  }

  int64_t total_values() const {
    int64_t n = 0;
    for (auto& p : items_) n += p->value.numel();
    return n;
  }

 private:
  std::vector<std::unique_ptr<ParameterT<S>>> items_;
  std::unordered_map<std::string, int> index_;
};

// Reverse-mode tape. Operations append nodes in construction order, so the
// node list is already topologically sorted: backward() is a single reverse
// sweep over the ancestors of the loss, visiting each node once. Gradients
// of bound parameters accumulate (+=) into Parameter::grad.
template <class S>
class TapeT {
 public:
  using Id = int;

  struct Node {
    TensorT<S> val;
    TensorT<S> grad;
    std::vector<Id> parents;
    std::function<void(TapeT&, Node&)> back;  // empty for leaves
    ParameterT<S>* bound = nullptr;
  };

  // ---- leaves ----

  Id constant(TensorT<S> v) { return push(std::move(v), {}, nullptr); }

  Id param(ParameterT<S>& p) {
    Id id = push(p.value, {}, nullptr);
    nodes_[id].bound = &p;
    return id;
  }

  // ---- elementwise / structural ops ----

  Id affine(Id x, Id w, Id b) {
    const auto& xv = val(x);
    const auto& wv = val(w);
    const auto& bv = val(b);
    const int rows = xv.rows(), in = xv.cols(), out = wv.cols();
    if (wv.rows() != in) throw std::invalid_argument("affine: inner dims disagree " + xv.shape_str() + " vs " + wv.shape_str());
    if (bv.numel() != out) throw std::invalid_argument("affine: bias size mismatch");
    TensorT<S> y = TensorT<S>::zeros({rows, out});
    kern::affine_rows(xv.data.data(), rows, in, wv.data.data(), bv.data.data(), y.data.data(), out);
    return push(std::move(y), {x, w, b}, [rows, in, out](TapeT& t, Node& n) {
      const auto& xv2 = t.val(n.parents[0]);
      const auto& wv2 = t.val(n.parents[1]);
      t.affine_backward(n, xv2, wv2, rows, in, out, true);
    });
  }

  Id linear(Id x, Id w) {
    const auto& xv = val(x);
    const auto& wv = val(w);
    const int rows = xv.rows(), in = xv.cols(), out = wv.cols();
    if (wv.rows() != in) throw std::invalid_argument("linear: inner dims disagree " + xv.shape_str() + " vs " + wv.shape_str());
    TensorT<S> y = TensorT<S>::zeros({rows, out});
    kern::affine_rows(xv.data.data(), rows, in, wv.data.data(), static_cast<const S*>(nullptr), y.data.data(), out);
    return push(std::move(y), {x, w}, [rows, in, out](TapeT& t, Node& n) {
      const auto& xv2 = t.val(n.parents[0]);
      const auto& wv2 = t.val(n.parents[1]);
      t.affine_backward(n, xv2, wv2, rows, in, out, false);
    });
  }

  Id relu(Id x) {
    const auto& xv = val(x);
    TensorT<S> y = TensorT<S>::zeros(xv.shape);
    kern::relu_rows(xv.data.data(), y.data.data(), xv.numel());
    return push(std::move(y), {x}, [](TapeT& t, Node& n) {
      const auto& xv2 = t.val(n.parents[0]);
      auto& dx = t.grad(n.parents[0]);
      for (int64_t i = 0; i < xv2.numel(); ++i)
        if (xv2.data[i] > S(0)) dx.data[i] += n.grad.data[i];
    });
  }

  Id concat_cols(const std::vector<Id>& xs) {
    if (xs.empty()) throw std::invalid_argument("concat: no inputs");
    const int rows = val(xs[0]).rows();
    int total = 0;
    for (Id x : xs) {
      if (val(x).rows() != rows) throw std::invalid_argument("concat: leading dims differ");
      total += val(x).cols();
    }
    TensorT<S> y = TensorT<S>::zeros({rows, total});
    int off = 0;
    for (Id x : xs) {
      const auto& xv = val(x);
      const int c = xv.cols();
      for (int r = 0; r < rows; ++r)
        std::copy(xv.row_ptr(r), xv.row_ptr(r) + c, y.row_ptr(r) + off);
      off += c;
    }
    return push(std::move(y), xs, [rows](TapeT& t, Node& n) {
      int off2 = 0;
      for (Id p : n.parents) {
        auto& dx = t.grad(p);
        const int c = dx.cols();
        for (int r = 0; r < rows; ++r) {
          const S* g = n.grad.row_ptr(r) + off2;
          S* d = dx.row_ptr(r);
          for (int i = 0; i < c; ++i) d[i] += g[i];
        }
        off2 += c;
      }
    });
  }

  // Row-wise softmax over unmasked entries; masked entries are exactly zero
  // with no gradient flow. Every row must have at least one unmasked entry.
  Id masked_softmax(Id logits, std::vector<uint8_t> mask) {
    const auto& zv = val(logits);
    const int rows = zv.rows(), cols = zv.cols();
    if (static_cast<int64_t>(mask.size()) != zv.numel())
      throw std::invalid_argument("masked_softmax: mask size mismatch");
    TensorT<S> y = TensorT<S>::zeros({rows, cols});
    std::vector<S> scratch(cols);
    std::vector<int> idx(cols);
    for (int r = 0; r < rows; ++r) {
      int nn = 0;
      for (int c = 0; c < cols; ++c)
        if (mask[static_cast<size_t>(r) * cols + c]) idx[nn++] = c;
      if (nn == 0) throw std::invalid_argument("masked_softmax: fully masked row " + std::to_string(r));
      for (int j = 0; j < nn; ++j) scratch[j] = zv.at(r, idx[j]);
      kern::softmax_inplace(scratch.data(), nn);
      for (int j = 0; j < nn; ++j) y.at(r, idx[j]) = scratch[j];
    }
    return push(std::move(y), {logits}, [rows, cols, mask = std::move(mask)](TapeT& t, Node& n) {
      auto& dz = t.grad(n.parents[0]);
      for (int r = 0; r < rows; ++r) {
        S dotwp = S(0);
        for (int c = 0; c < cols; ++c)
          if (mask[static_cast<size_t>(r) * cols + c]) dotwp += n.val.at(r, c) * n.grad.at(r, c);
        for (int c = 0; c < cols; ++c)
          if (mask[static_cast<size_t>(r) * cols + c])
            dz.at(r, c) += n.val.at(r, c) * (n.grad.at(r, c) - dotwp);
      }
    });
  }

  // ---- attention ops ----

  // Cross-attention of each agent row against its own L entity rows:
  // q: (R x D), k,v: (R*L x D), entity block of row r is rows [r*L, (r+1)*L).
  Id entity_attention(Id q, Id k, Id v, int L) {
    const auto& qv = val(q);
    const auto& kv = val(k);
    const int R = qv.rows(), D = qv.cols();
    if (L < 1) throw std::invalid_argument("entity_attention: L must be >= 1");
    if (kv.rows() != R * L || val(v).rows() != R * L)
      throw std::invalid_argument("entity_attention: key/value rows != R*L");
    TensorT<S> y = TensorT<S>::zeros({R, D});
    auto weights = std::make_shared<TensorT<S>>(TensorT<S>::zeros({R, L}));
    const auto& vv = val(v);
    const S scale = S(1) / std::sqrt(static_cast<S>(D));
    std::vector<S> scratch(L);
    for (int r = 0; r < R; ++r) {
      const S* qr = qv.row_ptr(r);
      const S* kb = kv.row_ptr(r * L);
      const S* vb = vv.row_ptr(r * L);
      kern::entity_attend_row(qr, kb, vb, L, D, y.row_ptr(r), scratch.data());
      // recover the weights for backward (same arithmetic as the kernel)
      for (int l = 0; l < L; ++l)
        scratch[l] = kern::dot(qr, kb + static_cast<int64_t>(l) * D, D) * scale;
      kern::softmax_inplace(scratch.data(), L);
      std::copy(scratch.begin(), scratch.end(), weights->row_ptr(r));
    }
    return push(std::move(y), {q, k, v}, [R, D, L, scale, weights](TapeT& t, Node& n) {
      const auto& qv2 = t.val(n.parents[0]);
      const auto& kv2 = t.val(n.parents[1]);
      const auto& vv2 = t.val(n.parents[2]);
      auto& dq = t.grad(n.parents[0]);
      auto& dk = t.grad(n.parents[1]);
      auto& dv = t.grad(n.parents[2]);
      std::vector<S> ds(L), dw(L);
      for (int r = 0; r < R; ++r) {
        const S* go = n.grad.row_ptr(r);
        const S* w = weights->row_ptr(r);
        S sum = S(0);
        for (int l = 0; l < L; ++l) {
          const S* vl = vv2.row_ptr(r * L + l);
          dw[l] = kern::dot(go, vl, D);
          kern::axpy(dv.row_ptr(r * L + l), go, w[l], D);
          sum += w[l] * dw[l];
        }
        for (int l = 0; l < L; ++l) ds[l] = w[l] * (dw[l] - sum);
        for (int l = 0; l < L; ++l) {
          kern::axpy(dq.row_ptr(r), kv2.row_ptr(r * L + l), ds[l] * scale, D);
          kern::axpy(dk.row_ptr(r * L + l), qv2.row_ptr(r), ds[l] * scale, D);
        }
      }
    });
  }

  // Masked multi-head self-attention over agent blocks. q,k,v: (B*M x D)
  // where block b occupies rows [b*M, (b+1)*M) and attends under blocks[b].
  // weights_export, when given, receives the head-averaged (R x M) weights.
  Id attn_mha(Id q, Id k, Id v, std::vector<AdjacencyMask> blocks, int heads,
              TensorT<S>* weights_export = nullptr) {
    const auto& qv = val(q);
    const int R = qv.rows(), D = qv.cols();
    if (heads < 1 || D % heads != 0) throw std::invalid_argument("attn_mha: heads must divide D");
    const int M = blocks.empty() ? 0 : blocks[0].size();
    check_blocks(blocks, R, M);
    const auto& kv = val(k);
    const auto& vv = val(v);
    TensorT<S> y = TensorT<S>::zeros({R, D});
    auto weights = std::make_shared<TensorT<S>>(TensorT<S>::zeros({R, heads * M}));
    std::vector<const S*> kp(M), vp(M);
    std::vector<S> scratch(M), wrow(static_cast<size_t>(heads) * M);
    std::vector<int> nbr(M);
    const int B = static_cast<int>(blocks.size());
    for (int b = 0; b < B; ++b) {
      const int base = b * M;
      for (int m = 0; m < M; ++m) {
        const int nn = gather(blocks[b], m, base, kv, vv, nbr, kp, vp);
        kern::mha_attend_row(qv.row_ptr(base + m), kp.data(), vp.data(), nn, D, heads,
                             y.row_ptr(base + m), scratch.data(), wrow.data());
        S* wdst = weights->row_ptr(base + m);
        for (int h = 0; h < heads; ++h)
          for (int j = 0; j < nn; ++j) wdst[h * M + nbr[j]] = wrow[h * nn + j];
      }
    }
    if (weights_export) {
      *weights_export = TensorT<S>::zeros({R, M});
      for (int r = 0; r < R; ++r)
        for (int j = 0; j < M; ++j) {
          S acc = S(0);
          for (int h = 0; h < heads; ++h) acc += weights->at(r, h * M + j);
          weights_export->at(r, j) = acc / static_cast<S>(heads);
        }
    }
    const int dh = D / heads;
    const S scale = S(1) / std::sqrt(static_cast<S>(dh));
    return push(std::move(y), {q, k, v},
                [R, D, M, heads, dh, scale, blocks = std::move(blocks), weights](TapeT& t, Node& n) {
      const auto& qv2 = t.val(n.parents[0]);
      const auto& kv2 = t.val(n.parents[1]);
      auto& dq = t.grad(n.parents[0]);
      auto& dk = t.grad(n.parents[1]);
      auto& dv = t.grad(n.parents[2]);
      const auto& vv2 = t.val(n.parents[2]);
      std::vector<S> dw(M), ds(M);
      const int B2 = static_cast<int>(blocks.size());
      for (int b = 0; b < B2; ++b) {
        const int base = b * M;
        for (int m = 0; m < M; ++m) {
          const S* go = n.grad.row_ptr(base + m);
          const S* w = weights->row_ptr(base + m);
          for (int h = 0; h < heads; ++h) {
            const int off = h * dh;
            S sum = S(0);
            for (int j = 0; j < M; ++j) {
              if (!blocks[b].at(m, j)) continue;
              dw[j] = kern::dot(go + off, vv2.row_ptr(base + j) + off, dh);
              kern::axpy(dv.row_ptr(base + j) + off, go + off, w[h * M + j], dh);
              sum += w[h * M + j] * dw[j];
            }
            for (int j = 0; j < M; ++j) {
              if (!blocks[b].at(m, j)) continue;
              ds[j] = w[h * M + j] * (dw[j] - sum);
              kern::axpy(dq.row_ptr(base + m) + off, kv2.row_ptr(base + j) + off, ds[j] * scale, dh);
              kern::axpy(dk.row_ptr(base + j) + off, qv2.row_ptr(base + m) + off, ds[j] * scale, dh);
            }
          }
        }
      }
    });
  }

  // Exponential-kernel attention: scalar keys (B*M x 1), weights
  // softmax(-(k_m - k_n)^2) over connected n.
  Id attn_exp(Id kscalar, Id v, std::vector<AdjacencyMask> blocks,
              TensorT<S>* weights_export = nullptr) {
    const auto& kv = val(kscalar);
    const auto& vv = val(v);
    const int R = vv.rows(), D = vv.cols();
    if (kv.rows() != R || kv.cols() != 1) throw std::invalid_argument("attn_exp: keys must be (R x 1)");
    const int M = blocks.empty() ? 0 : blocks[0].size();
    check_blocks(blocks, R, M);
    TensorT<S> y = TensorT<S>::zeros({R, D});
    auto weights = std::make_shared<TensorT<S>>(TensorT<S>::zeros({R, M}));
    std::vector<const S*> kp(M), vp(M);
    std::vector<S> scratch(M), wrow(M);
    std::vector<int> nbr(M);
    const int B = static_cast<int>(blocks.size());
    for (int b = 0; b < B; ++b) {
      const int base = b * M;
      for (int m = 0; m < M; ++m) {
        const int nn = gather(blocks[b], m, base, kv, vv, nbr, kp, vp);
        kern::exp_attend_row(kv.at(base + m, 0), kp.data(), vp.data(), nn, D,
                             y.row_ptr(base + m), scratch.data(), wrow.data());
        S* wdst = weights->row_ptr(base + m);
        for (int j = 0; j < nn; ++j) wdst[nbr[j]] = wrow[j];
      }
    }
    if (weights_export) *weights_export = *weights;
    return push(std::move(y), {kscalar, v},
                [R, D, M, blocks = std::move(blocks), weights](TapeT& t, Node& n) {
      const auto& kv2 = t.val(n.parents[0]);
      const auto& vv2 = t.val(n.parents[1]);
      auto& dk = t.grad(n.parents[0]);
      auto& dv = t.grad(n.parents[1]);
      std::vector<S> dw(M), ds(M);
      const int B2 = static_cast<int>(blocks.size());
      for (int b = 0; b < B2; ++b) {
        const int base = b * M;
        for (int m = 0; m < M; ++m) {
          const S* go = n.grad.row_ptr(base + m);
          const S* w = weights->row_ptr(base + m);
          S sum = S(0);
          for (int j = 0; j < M; ++j) {
            if (!blocks[b].at(m, j)) continue;
            dw[j] = kern::dot(go, vv2.row_ptr(base + j), D);
            kern::axpy(dv.row_ptr(base + j), go, w[j], D);
            sum += w[j] * dw[j];
          }
          const S km = kv2.at(base + m, 0);
          for (int j = 0; j < M; ++j) {
            if (!blocks[b].at(m, j)) continue;
            ds[j] = w[j] * (dw[j] - sum);
            const S diff = km - kv2.at(base + j, 0);
            dk.at(base + m, 0) += ds[j] * (S(-2) * diff);
            dk.at(base + j, 0) += ds[j] * (S(2) * diff);
          }
        }
      }
    });
  }

  // Uniform attention: mean of connected neighbors' values.
  Id attn_uniform(Id v, std::vector<AdjacencyMask> blocks, TensorT<S>* weights_export = nullptr) {
    const auto& vv = val(v);
    const int R = vv.rows(), D = vv.cols();
    const int M = blocks.empty() ? 0 : blocks[0].size();
    check_blocks(blocks, R, M);
    TensorT<S> y = TensorT<S>::zeros({R, D});
    if (weights_export) *weights_export = TensorT<S>::zeros({R, M});
    std::vector<const S*> kp(M), vp(M);
    std::vector<int> nbr(M);
    const int B = static_cast<int>(blocks.size());
    for (int b = 0; b < B; ++b) {
      const int base = b * M;
      for (int m = 0; m < M; ++m) {
        const int nn = gather(blocks[b], m, base, vv, vv, nbr, kp, vp);
        kern::uniform_attend_row(vp.data(), nn, D, y.row_ptr(base + m));
        if (weights_export)
          for (int j = 0; j < nn; ++j)
            weights_export->at(base + m, nbr[j]) = S(1) / static_cast<S>(nn);
      }
    }
    return push(std::move(y), {v}, [R, D, M, blocks = std::move(blocks)](TapeT& t, Node& n) {
      auto& dv = t.grad(n.parents[0]);
      const int B2 = static_cast<int>(blocks.size());
      for (int b = 0; b < B2; ++b) {
        const int base = b * M;
        for (int m = 0; m < M; ++m) {
          const S w = S(1) / static_cast<S>(blocks[b].degree(m));
          const S* go = n.grad.row_ptr(base + m);
          for (int j = 0; j < M; ++j)
            if (blocks[b].at(m, j)) kern::axpy(dv.row_ptr(base + j), go, w, D);
        }
      }
    });
  }

  // ---- categorical heads ----

  // log pi(a_r | logits_r) per row.
  Id action_log_prob(Id logits, std::vector<int> actions) {
    const auto& zv = val(logits);
    const int R = zv.rows(), A = zv.cols();
    if (static_cast<int>(actions.size()) != R) throw std::invalid_argument("action_log_prob: action count mismatch");
    TensorT<S> y = TensorT<S>::zeros({R});
    std::vector<S> lp(A);
    for (int r = 0; r < R; ++r) {
      if (actions[r] < 0 || actions[r] >= A) throw std::invalid_argument("action_log_prob: action out of range");
      kern::log_softmax_row(zv.row_ptr(r), A, lp.data());
      y.data[r] = lp[actions[r]];
    }
    return push(std::move(y), {logits}, [R, A, actions = std::move(actions)](TapeT& t, Node& n) {
      const auto& zv2 = t.val(n.parents[0]);
      auto& dz = t.grad(n.parents[0]);
      std::vector<S> lp(A);
      for (int r = 0; r < R; ++r) {
        kern::log_softmax_row(zv2.row_ptr(r), A, lp.data());
        const S g = n.grad.data[r];
        S* d = dz.row_ptr(r);
        for (int j = 0; j < A; ++j) d[j] += g * ((j == actions[r] ? S(1) : S(0)) - std::exp(lp[j]));
      }
    });
  }

  // Shannon entropy of the categorical distribution per row.
  Id entropy_rows(Id logits) {
    const auto& zv = val(logits);
    const int R = zv.rows(), A = zv.cols();
    TensorT<S> y = TensorT<S>::zeros({R});
    std::vector<S> lp(A);
    for (int r = 0; r < R; ++r) {
      kern::log_softmax_row(zv.row_ptr(r), A, lp.data());
      S h = S(0);
      for (int j = 0; j < A; ++j) h -= std::exp(lp[j]) * lp[j];
      y.data[r] = h;
    }
    return push(std::move(y), {logits}, [R, A](TapeT& t, Node& n) {
      const auto& zv2 = t.val(n.parents[0]);
      auto& dz = t.grad(n.parents[0]);
      std::vector<S> lp(A);
      for (int r = 0; r < R; ++r) {
        kern::log_softmax_row(zv2.row_ptr(r), A, lp.data());
        const S h = n.val.data[r];
        const S g = n.grad.data[r];
        S* d = dz.row_ptr(r);
        for (int j = 0; j < A; ++j) d[j] += g * (-std::exp(lp[j]) * (lp[j] + h));
      }
    });
  }

  // ---- scalar/elementwise tail ops for the loss ----

  Id exp_of(Id x) {
    TensorT<S> y = val(x);
    for (auto& e : y.data) e = std::exp(e);
    return push(std::move(y), {x}, [](TapeT& t, Node& n) {
      auto& dx = t.grad(n.parents[0]);
      for (int64_t i = 0; i < n.val.numel(); ++i) dx.data[i] += n.grad.data[i] * n.val.data[i];
    });
  }

  Id sub_const(Id x, TensorT<S> c) {
    const auto& xv = val(x);
    if (!xv.same_shape(c) && xv.numel() != c.numel())
      throw std::invalid_argument("sub_const: shape mismatch");
    TensorT<S> y = xv;
    for (int64_t i = 0; i < y.numel(); ++i) y.data[i] -= c.data[i];
    return push(std::move(y), {x}, [](TapeT& t, Node& n) {
      auto& dx = t.grad(n.parents[0]);
      for (int64_t i = 0; i < n.val.numel(); ++i) dx.data[i] += n.grad.data[i];
    });
  }

  Id mul_const(Id x, TensorT<S> c) {
    const auto& xv = val(x);
    if (xv.numel() != c.numel()) throw std::invalid_argument("mul_const: shape mismatch");
    TensorT<S> y = xv;
    for (int64_t i = 0; i < y.numel(); ++i) y.data[i] *= c.data[i];
    auto cc = std::make_shared<TensorT<S>>(std::move(c));
    return push(std::move(y), {x}, [cc](TapeT& t, Node& n) {
      auto& dx = t.grad(n.parents[0]);
      for (int64_t i = 0; i < n.val.numel(); ++i) dx.data[i] += n.grad.data[i] * cc->data[i];
    });
  }

  // Clamp to [lo, hi]; gradient passes only strictly inside the interval.
  Id clip(Id x, S lo, S hi) {
    const auto& xv = val(x);
    TensorT<S> y = xv;
    for (auto& e : y.data) e = e < lo ? lo : (e > hi ? hi : e);
    return push(std::move(y), {x}, [lo, hi](TapeT& t, Node& n) {
      const auto& xv2 = t.val(n.parents[0]);
      auto& dx = t.grad(n.parents[0]);
      for (int64_t i = 0; i < xv2.numel(); ++i)
        if (xv2.data[i] > lo && xv2.data[i] < hi) dx.data[i] += n.grad.data[i];
    });
  }

  // Elementwise min; ties route the gradient to the first argument.
  Id min2(Id a, Id b) {
    const auto& av = val(a);
    const auto& bv = val(b);
    if (av.numel() != bv.numel()) throw std::invalid_argument("min2: shape mismatch");
    TensorT<S> y = av;
    for (int64_t i = 0; i < y.numel(); ++i) y.data[i] = std::min(av.data[i], bv.data[i]);
    return push(std::move(y), {a, b}, [](TapeT& t, Node& n) {
      const auto& av2 = t.val(n.parents[0]);
      const auto& bv2 = t.val(n.parents[1]);
      auto& da = t.grad(n.parents[0]);
      auto& db = t.grad(n.parents[1]);
      for (int64_t i = 0; i < av2.numel(); ++i) {
        if (av2.data[i] <= bv2.data[i])
          da.data[i] += n.grad.data[i];
        else
          db.data[i] += n.grad.data[i];
      }
    });
  }

  Id square(Id x) {
    const auto& xv = val(x);
    TensorT<S> y = xv;
    for (auto& e : y.data) e = e * e;
    return push(std::move(y), {x}, [](TapeT& t, Node& n) {
      const auto& xv2 = t.val(n.parents[0]);
      auto& dx = t.grad(n.parents[0]);
      for (int64_t i = 0; i < xv2.numel(); ++i) dx.data[i] += S(2) * xv2.data[i] * n.grad.data[i];
    });
  }

  Id add(Id a, Id b) {
    const auto& av = val(a);
    const auto& bv = val(b);
    if (av.numel() != bv.numel()) throw std::invalid_argument("add: shape mismatch");
    TensorT<S> y = av;
    for (int64_t i = 0; i < y.numel(); ++i) y.data[i] += bv.data[i];
    return push(std::move(y), {a, b}, [](TapeT& t, Node& n) {
      auto& da = t.grad(n.parents[0]);
      auto& db = t.grad(n.parents[1]);
      for (int64_t i = 0; i < n.val.numel(); ++i) {
        da.data[i] += n.grad.data[i];
        db.data[i] += n.grad.data[i];
      }
    });
  }

  Id scale(Id x, S s) {
    TensorT<S> y = val(x);
    for (auto& e : y.data) e *= s;
    return push(std::move(y), {x}, [s](TapeT& t, Node& n) {
      auto& dx = t.grad(n.parents[0]);
      for (int64_t i = 0; i < n.val.numel(); ++i) dx.data[i] += s * n.grad.data[i];
    });
  }

  Id mean_all(Id x) {
    const auto& xv = val(x);
    const int64_t n = xv.numel();
    S acc = S(0);
    for (S e : xv.data) acc += e;
    TensorT<S> y = TensorT<S>::scalar(acc / static_cast<S>(n));
    return push(std::move(y), {x}, [n](TapeT& t, Node& nd) {
      auto& dx = t.grad(nd.parents[0]);
      const S g = nd.grad.data[0] / static_cast<S>(n);
      for (int64_t i = 0; i < n; ++i) dx.data[i] += g;
    });
  }

  // ---- access / backward ----

  const TensorT<S>& val(Id id) const { return nodes_[id].val; }
  TensorT<S>& grad(Id id) { return nodes_[id].grad; }
  size_t size() const { return nodes_.size(); }

  // Seeds dLoss/dLoss = 1 and sweeps the tape once in reverse, touching only
  // the ancestors of the loss. Bound parameters receive their gradient
  // additively, so repeated backward calls without zero_grad stack up.
  void backward(Id loss) {
    if (val(loss).numel() != 1) throw std::invalid_argument("backward: loss must be scalar");
    std::vector<uint8_t> need(nodes_.size(), 0);
    need[loss] = 1;
    for (int i = loss; i >= 0; --i) {
      if (!need[i]) continue;
      for (Id p : nodes_[i].parents) need[p] = 1;
    }
    for (int i = 0; i <= loss; ++i)
      if (need[i]) nodes_[i].grad = TensorT<S>::zeros(nodes_[i].val.shape);
    nodes_[loss].grad.data[0] = S(1);
    for (int i = loss; i >= 0; --i) {
      if (!need[i]) continue;
      if (nodes_[i].back) nodes_[i].back(*this, nodes_[i]);
    }
    for (int i = 0; i <= loss; ++i) {
      if (!need[i] || !nodes_[i].bound) continue;
      auto& g = nodes_[i].bound->grad;
      for (int64_t j = 0; j < g.numel(); ++j) g.data[j] += nodes_[i].grad.data[j];
    }
  }

  void reset() { nodes_.clear(); }

 private:
  Id push(TensorT<S> v, std::vector<Id> parents, std::function<void(TapeT&, Node&)> back) {
    Node n;
    n.val = std::move(v);
    n.parents = std::move(parents);
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return static_cast<Id>(nodes_.size()) - 1;
  }

  static void check_blocks(const std::vector<AdjacencyMask>& blocks, int R, int M) {
    if (blocks.empty() || M == 0) throw std::invalid_argument("attention: no mask blocks");
    for (const auto& b : blocks)
      if (b.size() != M) throw std::invalid_argument("attention: mask size varies across blocks");
    if (static_cast<int>(blocks.size()) * M != R)
      throw std::invalid_argument("attention: rows != blocks * M");
  }

  // Collects neighbor row pointers of agent m within its block, in sender
  // index order. Returns the neighbor count.
  static int gather(const AdjacencyMask& mask, int m, int base, const TensorT<S>& k,
                    const TensorT<S>& v, std::vector<int>& nbr, std::vector<const S*>& kp,
                    std::vector<const S*>& vp) {
    int nn = 0;
    const int M = mask.size();
    for (int j = 0; j < M; ++j) {
      if (!mask.at(m, j)) continue;
      nbr[nn] = j;
      kp[nn] = k.row_ptr(base + j);
      vp[nn] = v.row_ptr(base + j);
      ++nn;
    }
    return nn;
  }

  // Shared backward for affine/linear. dx += dy * W^T via a transposed copy
  // so the inner loops stay contiguous; both accumulations are 4-way
  // unrolled with a fixed left-to-right summation order.
  void affine_backward(Node& n, const TensorT<S>& xv, const TensorT<S>& wv, int rows, int in,
                       int out, bool has_bias) {
    auto& dx = grad(n.parents[0]);
    auto& dw = grad(n.parents[1]);
    std::vector<S> wt(static_cast<size_t>(in) * out);
    for (int i = 0; i < in; ++i)
      for (int o = 0; o < out; ++o) wt[static_cast<size_t>(o) * in + i] = wv.data[static_cast<size_t>(i) * out + o];
    kern::matmul_acc_rows(n.grad.data.data(), rows, out, wt.data(), dx.data.data(), in);

    // dw[i,:] += sum_r x[r,i] * gy[r,:], four dw rows against four gy rows
    // per micro step; r ascends within and across blocks.
    const int rblocks = rows / 4 * 4;
    for (int r = 0; r < rblocks; r += 4) {
      const S* g0 = n.grad.row_ptr(r);
      const S* g1 = n.grad.row_ptr(r + 1);
      const S* g2 = n.grad.row_ptr(r + 2);
      const S* g3 = n.grad.row_ptr(r + 3);
      int i = 0;
      for (; i + 4 <= in; i += 4) {
        S sa[4], sb[4], sc[4], sd[4];
        for (int k = 0; k < 4; ++k) {
          sa[k] = xv.at(r + k, i);
          sb[k] = xv.at(r + k, i + 1);
          sc[k] = xv.at(r + k, i + 2);
          sd[k] = xv.at(r + k, i + 3);
        }
        kern::axpy4x4(dw.row_ptr(i), dw.row_ptr(i + 1), dw.row_ptr(i + 2), dw.row_ptr(i + 3),
                      g0, g1, g2, g3, sa, sb, sc, sd, out);
      }
      for (; i < in; ++i) {
        kern::axpy(dw.row_ptr(i), g0, xv.at(r, i), out);
        kern::axpy(dw.row_ptr(i), g1, xv.at(r + 1, i), out);
        kern::axpy(dw.row_ptr(i), g2, xv.at(r + 2, i), out);
        kern::axpy(dw.row_ptr(i), g3, xv.at(r + 3, i), out);
      }
    }
    for (int r = rblocks; r < rows; ++r) {
      const S* gy = n.grad.row_ptr(r);
      const S* xr = xv.row_ptr(r);
      for (int i = 0; i < in; ++i) kern::axpy(dw.row_ptr(i), gy, xr[i], out);
    }
    if (has_bias) {
      auto& db = grad(n.parents[2]);
      for (int rr = 0; rr < rows; ++rr) {
        const S* gy = n.grad.row_ptr(rr);
        for (int o = 0; o < out; ++o) db.data[o] += gy[o];
      }
    }
  }

  std::vector<Node> nodes_;
};

using Tape = TapeT<float>;
using ParamSet = ParamSetT<float>;
using Parameter = ParameterT<float>;

}  // namespace swarm
