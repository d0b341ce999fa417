#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "dcrnet/rng.hpp"

namespace dcrnet {

class GradStore;
class GradRecord;

namespace detail {

// One node of the differentiable operation record. Interior nodes carry a
// backprop closure that scatters d(loss)/d(node) into the parents' buffers.
struct TensorData {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<double> values;      // row-major
  bool requires_grad = false;      // leaf parameter
  bool needs_grad = false;         // some reachable leaf requires grad
  std::vector<std::shared_ptr<TensorData>> parents;
  std::function<void(const std::vector<double>& out_grad, GradStore& store)>
      backprop;

  std::int64_t size() const { return rows * cols; }
};

}  // namespace detail

// Dense matrix of 64-bit reals, row-major, participating in a differentiable
// operation record. Tensors are cheap value-semantic handles: copies alias
// the same node. Scalars are 1x1.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::int64_t rows, std::int64_t cols,
                      bool requires_grad = false);
  static Tensor full(std::int64_t rows, std::int64_t cols, double value,
                     bool requires_grad = false);
  static Tensor of(std::int64_t rows, std::int64_t cols,
                   std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double value);
  // Entries drawn i.i.d. uniform on [lo, hi).
  static Tensor uniform(std::int64_t rows, std::int64_t cols, double lo,
                        double hi, Rng& rng, bool requires_grad = false);

  bool defined() const { return data_ != nullptr; }
  std::int64_t rows() const { return data_->rows; }
  std::int64_t cols() const { return data_->cols; }
  std::int64_t size() const { return data_->size(); }
  std::vector<std::int64_t> shape() const { return {rows(), cols()}; }
  bool requires_grad() const { return data_->requires_grad; }

  double at(std::int64_t r, std::int64_t c) const {
    return data_->values[r * data_->cols + c];
  }
  const std::vector<double>& values() const { return data_->values; }

  // Mutable access for initialization and optimizer updates. Only safe
  // between graph constructions: nodes built from the old values keep
  // reading this storage during backward.
  std::vector<double>& values_mut() { return data_->values; }

  // Value of a 1x1 tensor.
  double item() const;

  // Stable identity of the underlying node; key for gradient lookups.
  const void* id() const { return data_.get(); }

  // Raw node handle for backprop plumbing (GradStore keys, needs_grad test).
  detail::TensorData* node() const { return data_.get(); }

  std::string shape_str() const;

 private:
  friend class GradStore;
  friend class GradRecord;
  friend GradRecord backward(const Tensor& loss);
  friend Tensor make_op(std::int64_t rows, std::int64_t cols,
                        std::vector<double> values, std::vector<Tensor> parents,
                        std::function<void(const std::vector<double>&,
                                           GradStore&)> backprop);

  explicit Tensor(std::shared_ptr<detail::TensorData> data)
      : data_(std::move(data)) {}

  std::shared_ptr<detail::TensorData> data_;
};

// Per-backward-pass gradient buffers, keyed by node. Only nodes on a path
// from a requires_grad leaf to the loss get a buffer.
class GradStore {
 public:
  // Buffer for a node, zero-initialized on first access.
  std::vector<double>& buffer(const detail::TensorData* node);
  bool has(const detail::TensorData* node) const;

 private:
  std::unordered_map<const detail::TensorData*, std::vector<double>> buffers_;
};

// Accumulated gradients of one scalar loss with respect to every
// requires_grad tensor reachable from it. Unreachable parameters report a
// zero gradient of matching shape.
class GradRecord {
 public:
  Tensor grad(const Tensor& parameter) const;
  bool reached(const Tensor& parameter) const;

 private:
  friend GradRecord backward(const Tensor& loss);
  std::unordered_map<const void*, Tensor> grads_;
};

// ---- operations ----

// Standard matrix product, a[m x k] * b[k x n].
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

// Row-wise softmax, stabilized by per-row max subtraction. Every output row
// sums to 1 and lies in (0, 1).
Tensor softmax_rows(const Tensor& x);

// Column-wise concatenation of two matrices with equal row counts.
Tensor concat_cols(const Tensor& a, const Tensor& b);
// Row-wise concatenation; all parts share a column count.
Tensor concat_rows(const std::vector<Tensor>& parts);

Tensor slice_rows(const Tensor& x, std::int64_t start, std::int64_t count);
Tensor slice_cols(const Tensor& x, std::int64_t start, std::int64_t count);

// Elementwise ops. add/mul broadcast only scalar (1x1) with tensor; any
// other shape mismatch is rejected.
Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor tanh(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor relu(const Tensor& x);
Tensor scale(const Tensor& x, double c);

// x[m x n] + row[1 x n] added to every row.
Tensor add_rowvec(const Tensor& x, const Tensor& row);

// Inverted dropout: in training mode each element is zeroed independently
// with probability p and survivors are scaled by 1/(1-p); in eval mode the
// input is returned unchanged. p must be in [0, 1).
Tensor dropout(const Tensor& x, double p, bool training, Rng& rng);

// -log(probs[gold] + eps) for a 1xC distribution row; eps = 1e-12.
Tensor cross_entropy(const Tensor& probs, std::int64_t gold);

// Sum of all entries, as a scalar.
Tensor sum_all(const Tensor& x);

// Gathers rows of `table` at `ids`; gradients flow back only into the
// gathered rows.
Tensor embed_rows(const Tensor& table, const std::vector<std::int64_t>& ids);

// Reverse-mode pass from a scalar loss over the recorded operations.
GradRecord backward(const Tensor& loss);

}  // namespace dcrnet
