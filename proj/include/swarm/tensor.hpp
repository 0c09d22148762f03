#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace swarm {

// Dense row-major tensor. Rank is kept generic (shape is a dim list with
// product(shape) == data.size()) but everything the policy network needs is
// rank 1 or 2, so the 2-D accessors below are the workhorses.
template <class S>
struct TensorT {
  std::vector<int> shape;
  std::vector<S> data;

  TensorT() = default;
  TensorT(std::vector<int> sh, std::vector<S> d) : shape(std::move(sh)), data(std::move(d)) {
    if (numel_of(shape) != static_cast<int64_t>(data.size()))
      throw std::invalid_argument("tensor: shape/data size mismatch");
  }

  static TensorT zeros(std::vector<int> sh) {
    TensorT t;
    t.shape = std::move(sh);
    t.data.assign(static_cast<size_t>(numel_of(t.shape)), S(0));
    return t;
  }

  static TensorT scalar(S v) { return TensorT({1}, {v}); }

  static int64_t numel_of(const std::vector<int>& sh) {
    int64_t n = 1;
    for (int d : sh) {
      if (d < 0) throw std::invalid_argument("tensor: negative dimension");
      n *= d;
    }
    return n;
  }

  int64_t numel() const { return static_cast<int64_t>(data.size()); }

  int rows() const { return shape.empty() ? 1 : shape[0]; }
  int cols() const {
    if (shape.size() <= 1) return shape.empty() ? 1 : 1;
    int64_t c = 1;
    for (size_t i = 1; i < shape.size(); ++i) c *= shape[i];
    return static_cast<int>(c);
  }

  S& at(int r, int c) { return data[static_cast<size_t>(r) * cols() + c]; }
  S at(int r, int c) const { return data[static_cast<size_t>(r) * cols() + c]; }

  S* row_ptr(int r) { return data.data() + static_cast<size_t>(r) * cols(); }
  const S* row_ptr(int r) const { return data.data() + static_cast<size_t>(r) * cols(); }

  bool same_shape(const TensorT& o) const { return shape == o.shape; }

  bool all_finite() const {
    for (S v : data)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }

  std::string shape_str() const {
    std::ostringstream os;
    os << '(';
    for (size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
    os << ')';
    return os.str();
  }
};

using Tensor = TensorT<float>;
using Tensor64 = TensorT<double>;

}  // namespace swarm
