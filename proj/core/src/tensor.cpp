#include "dcrnet/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace dcrnet {

namespace {

using detail::TensorData;
using NodePtr = std::shared_ptr<TensorData>;

constexpr double kCrossEntropyEps = 1e-12;

NodePtr new_node(std::int64_t rows, std::int64_t cols) {
  auto node = std::make_shared<TensorData>();
  node->rows = rows;
  node->cols = cols;
  node->values.assign(static_cast<std::size_t>(rows * cols), 0.0);
  return node;
}

std::string dims(std::int64_t r, std::int64_t c) {
  std::ostringstream os;
  os << r << "x" << c;
  return os.str();
}

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

}  // namespace

Tensor make_op(std::int64_t rows, std::int64_t cols, std::vector<double> values,
               std::vector<Tensor> parents,
               std::function<void(const std::vector<double>&, GradStore&)>
                   backprop) {
  auto node = std::make_shared<TensorData>();
  node->rows = rows;
  node->cols = cols;
  node->values = std::move(values);
  for (const Tensor& p : parents) {
    node->needs_grad = node->needs_grad || p.node()->needs_grad;
    node->parents.push_back(p.data_);
  }
  if (node->needs_grad) {
    node->backprop = std::move(backprop);
  }
  return Tensor(std::move(node));
}

// ---- Tensor ----

Tensor Tensor::zeros(std::int64_t rows, std::int64_t cols,
                     bool requires_grad) {
  if (rows <= 0 || cols <= 0) fail("tensor dimensions must be positive");
  auto node = new_node(rows, cols);
  node->requires_grad = requires_grad;
  node->needs_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::full(std::int64_t rows, std::int64_t cols, double value,
                    bool requires_grad) {
  Tensor t = zeros(rows, cols, requires_grad);
  std::fill(t.data_->values.begin(), t.data_->values.end(), value);
  return t;
}

Tensor Tensor::of(std::int64_t rows, std::int64_t cols,
                  std::vector<double> values, bool requires_grad) {
  if (rows <= 0 || cols <= 0) fail("tensor dimensions must be positive");
  if (static_cast<std::int64_t>(values.size()) != rows * cols) {
    fail("tensor value count " + std::to_string(values.size()) +
         " does not match shape " + dims(rows, cols));
  }
  Tensor t = zeros(rows, cols, requires_grad);
  t.data_->values = std::move(values);
  return t;
}

Tensor Tensor::scalar(double value) { return of(1, 1, {value}); }

Tensor Tensor::uniform(std::int64_t rows, std::int64_t cols, double lo,
                       double hi, Rng& rng, bool requires_grad) {
  Tensor t = zeros(rows, cols, requires_grad);
  for (double& v : t.data_->values) v = rng.uniform(lo, hi);
  return t;
}

double Tensor::item() const {
  if (rows() != 1 || cols() != 1) {
    fail("item() requires a 1x1 tensor, got " + shape_str());
  }
  return data_->values[0];
}

std::string Tensor::shape_str() const { return dims(rows(), cols()); }

// ---- GradStore / GradRecord ----

std::vector<double>& GradStore::buffer(const TensorData* node) {
  auto it = buffers_.find(node);
  if (it == buffers_.end()) {
    it = buffers_
             .emplace(node, std::vector<double>(
                                static_cast<std::size_t>(node->size()), 0.0))
             .first;
  }
  return it->second;
}

bool GradStore::has(const TensorData* node) const {
  return buffers_.count(node) > 0;
}

Tensor GradRecord::grad(const Tensor& parameter) const {
  auto it = grads_.find(parameter.id());
  if (it != grads_.end()) return it->second;
  return Tensor::zeros(parameter.rows(), parameter.cols());
}

bool GradRecord::reached(const Tensor& parameter) const {
  return grads_.count(parameter.id()) > 0;
}

// ---- operations ----

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    fail("matmul: inner dimensions disagree, " + a.shape_str() + " vs " +
         b.shape_str());
  }
  const std::int64_t m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<double> out(static_cast<std::size_t>(m * n), 0.0);
  const double* av = a.values().data();
  const double* bv = b.values().data();
  for (std::int64_t i = 0; i < m; ++i) {
    for (std::int64_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = bv + p * n;
      double* orow = out.data() + i * n;
      for (std::int64_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  auto an = a;  // keep handles alive in the closure
  auto bn = b;
  return make_op(
      m, n, std::move(out), {a, b},
      [an, bn, m, k, n](const std::vector<double>& g, GradStore& store) {
        const double* av = an.values().data();
        const double* bv = bn.values().data();
        if (an.node()->needs_grad) {
          std::vector<double>& da = store.buffer(an.node());
          // dA = G * B^T
          for (std::int64_t i = 0; i < m; ++i) {
            for (std::int64_t p = 0; p < k; ++p) {
              double acc = 0.0;
              const double* grow = g.data() + i * n;
              const double* brow = bv + p * n;
              for (std::int64_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
              da[i * k + p] += acc;
            }
          }
        }
        if (bn.node()->needs_grad) {
          std::vector<double>& db = store.buffer(bn.node());
          // dB = A^T * G
          for (std::int64_t i = 0; i < m; ++i) {
            const double* grow = g.data() + i * n;
            for (std::int64_t p = 0; p < k; ++p) {
              const double aip = av[i * k + p];
              if (aip == 0.0) continue;
              double* dbrow = db.data() + p * n;
              for (std::int64_t j = 0; j < n; ++j) dbrow[j] += aip * grow[j];
            }
          }
        }
      });
}

Tensor transpose(const Tensor& a) {
  const std::int64_t m = a.rows(), n = a.cols();
  std::vector<double> out(static_cast<std::size_t>(m * n));
  for (std::int64_t i = 0; i < m; ++i)
    for (std::int64_t j = 0; j < n; ++j)
      out[j * m + i] = a.values()[i * n + j];
  auto an = a;
  return make_op(n, m, std::move(out), {a},
                 [an, m, n](const std::vector<double>& g, GradStore& store) {
                   if (!an.node()->needs_grad) return;
                   std::vector<double>& da = store.buffer(an.node());
                   for (std::int64_t i = 0; i < m; ++i)
                     for (std::int64_t j = 0; j < n; ++j)
                       da[i * n + j] += g[j * m + i];
                 });
}

Tensor softmax_rows(const Tensor& x) {
  const std::int64_t m = x.rows(), n = x.cols();
  std::vector<double> out(static_cast<std::size_t>(m * n));
  for (std::int64_t i = 0; i < m; ++i) {
    const double* row = x.values().data() + i * n;
    double mx = row[0];
    for (std::int64_t j = 1; j < n; ++j) mx = std::max(mx, row[j]);
    double sum = 0.0;
    for (std::int64_t j = 0; j < n; ++j) {
      const double e = std::exp(row[j] - mx);
      out[i * n + j] = e;
      sum += e;
    }
    for (std::int64_t j = 0; j < n; ++j) out[i * n + j] /= sum;
  }
  auto xn = x;
  // dx_ij = y_ij * (g_ij - sum_k g_ik y_ik), per row
  return make_op(m, n, out, {x},
                 [xn, out, m, n](const std::vector<double>& g,
                                 GradStore& store) {
                   if (!xn.node()->needs_grad) return;
                   std::vector<double>& dx = store.buffer(xn.node());
                   for (std::int64_t i = 0; i < m; ++i) {
                     double dot = 0.0;
                     for (std::int64_t j = 0; j < n; ++j)
                       dot += g[i * n + j] * out[i * n + j];
                     for (std::int64_t j = 0; j < n; ++j)
                       dx[i * n + j] += out[i * n + j] * (g[i * n + j] - dot);
                   }
                 });
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows()) {
    fail("concat_cols: row counts disagree, " + a.shape_str() + " vs " +
         b.shape_str());
  }
  const std::int64_t m = a.rows(), p = a.cols(), q = b.cols();
  std::vector<double> out(static_cast<std::size_t>(m * (p + q)));
  for (std::int64_t i = 0; i < m; ++i) {
    std::copy_n(a.values().data() + i * p, p, out.data() + i * (p + q));
    std::copy_n(b.values().data() + i * q, q, out.data() + i * (p + q) + p);
  }
  auto an = a;
  auto bn = b;
  return make_op(m, p + q, std::move(out), {a, b},
                 [an, bn, m, p, q](const std::vector<double>& g,
                                   GradStore& store) {
                   if (an.node()->needs_grad) {
                     std::vector<double>& da = store.buffer(an.node());
                     for (std::int64_t i = 0; i < m; ++i)
                       for (std::int64_t j = 0; j < p; ++j)
                         da[i * p + j] += g[i * (p + q) + j];
                   }
                   if (bn.node()->needs_grad) {
                     std::vector<double>& db = store.buffer(bn.node());
                     for (std::int64_t i = 0; i < m; ++i)
                       for (std::int64_t j = 0; j < q; ++j)
                         db[i * q + j] += g[i * (p + q) + p + j];
                   }
                 });
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) fail("concat_rows: no parts");
  const std::int64_t n = parts[0].cols();
  std::int64_t m = 0;
  for (const Tensor& t : parts) {
    if (t.cols() != n) {
      fail("concat_rows: column counts disagree, " + parts[0].shape_str() +
           " vs " + t.shape_str());
    }
    m += t.rows();
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m * n));
  for (const Tensor& t : parts) {
    out.insert(out.end(), t.values().begin(), t.values().end());
  }
  auto copies = parts;
  return make_op(m, n, std::move(out), parts,
                 [copies](const std::vector<double>& g, GradStore& store) {
                   std::size_t offset = 0;
                   for (const Tensor& t : copies) {
                     const std::size_t len = t.values().size();
                     if (t.node()->needs_grad) {
                       std::vector<double>& dt = store.buffer(t.node());
                       for (std::size_t i = 0; i < len; ++i)
                         dt[i] += g[offset + i];
                     }
                     offset += len;
                   }
                 });
}

Tensor slice_rows(const Tensor& x, std::int64_t start, std::int64_t count) {
  if (start < 0 || count <= 0 || start + count > x.rows()) {
    fail("slice_rows: range [" + std::to_string(start) + ", " +
         std::to_string(start + count) + ") out of bounds for " +
         x.shape_str());
  }
  const std::int64_t n = x.cols();
  std::vector<double> out(x.values().begin() + start * n,
                          x.values().begin() + (start + count) * n);
  auto xn = x;
  return make_op(count, n, std::move(out), {x},
                 [xn, start, count, n](const std::vector<double>& g,
                                       GradStore& store) {
                   if (!xn.node()->needs_grad) return;
                   std::vector<double>& dx = store.buffer(xn.node());
                   for (std::int64_t i = 0; i < count * n; ++i)
                     dx[start * n + i] += g[i];
                 });
}

Tensor slice_cols(const Tensor& x, std::int64_t start, std::int64_t count) {
  if (start < 0 || count <= 0 || start + count > x.cols()) {
    fail("slice_cols: range [" + std::to_string(start) + ", " +
         std::to_string(start + count) + ") out of bounds for " +
         x.shape_str());
  }
  const std::int64_t m = x.rows(), n = x.cols();
  std::vector<double> out(static_cast<std::size_t>(m * count));
  for (std::int64_t i = 0; i < m; ++i)
    std::copy_n(x.values().data() + i * n + start, count,
                out.data() + i * count);
  auto xn = x;
  return make_op(m, count, std::move(out), {x},
                 [xn, start, count, m, n](const std::vector<double>& g,
                                          GradStore& store) {
                   if (!xn.node()->needs_grad) return;
                   std::vector<double>& dx = store.buffer(xn.node());
                   for (std::int64_t i = 0; i < m; ++i)
                     for (std::int64_t j = 0; j < count; ++j)
                       dx[i * n + start + j] += g[i * count + j];
                 });
}

namespace {

enum class Broadcast { kNone, kLeftScalar, kRightScalar };

Broadcast binary_broadcast(const Tensor& a, const Tensor& b,
                           const char* op_name) {
  if (a.rows() == b.rows() && a.cols() == b.cols()) return Broadcast::kNone;
  if (a.size() == 1) return Broadcast::kLeftScalar;
  if (b.size() == 1) return Broadcast::kRightScalar;
  fail(std::string(op_name) + ": shapes " + a.shape_str() + " and " +
       b.shape_str() + " do not match (only scalar broadcast is supported)");
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  const Broadcast bc = binary_broadcast(a, b, "add");
  const Tensor& big = (bc == Broadcast::kLeftScalar) ? b : a;
  std::vector<double> out(big.values());
  if (bc == Broadcast::kNone) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.values()[i];
  } else {
    const double s = (bc == Broadcast::kLeftScalar) ? a.values()[0]
                                                    : b.values()[0];
    for (double& v : out) v += s;
  }
  auto an = a;
  auto bn = b;
  return make_op(big.rows(), big.cols(), std::move(out), {a, b},
                 [an, bn, bc](const std::vector<double>& g, GradStore& store) {
                   auto scatter = [&](const Tensor& t, bool is_scalar) {
                     if (!t.node()->needs_grad) return;
                     std::vector<double>& dt = store.buffer(t.node());
                     if (is_scalar && t.size() == 1 && g.size() > 1) {
                       double acc = 0.0;
                       for (double gv : g) acc += gv;
                       dt[0] += acc;
                     } else {
                       for (std::size_t i = 0; i < g.size(); ++i)
                         dt[i] += g[i];
                     }
                   };
                   scatter(an, bc == Broadcast::kLeftScalar);
                   scatter(bn, bc == Broadcast::kRightScalar);
                 });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  const Broadcast bc = binary_broadcast(a, b, "mul");
  const Tensor& big = (bc == Broadcast::kLeftScalar) ? b : a;
  const Tensor& other = (bc == Broadcast::kLeftScalar) ? a : b;
  std::vector<double> out(big.values());
  if (bc == Broadcast::kNone) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.values()[i];
  } else {
    const double s = other.values()[0];
    for (double& v : out) v *= s;
  }
  auto an = a;
  auto bn = b;
  return make_op(
      big.rows(), big.cols(), std::move(out), {a, b},
      [an, bn, bc](const std::vector<double>& g, GradStore& store) {
        const bool a_scalar = (bc == Broadcast::kLeftScalar);
        const bool b_scalar = (bc == Broadcast::kRightScalar);
        if (an.node()->needs_grad) {
          std::vector<double>& da = store.buffer(an.node());
          if (a_scalar) {
            double acc = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i)
              acc += g[i] * bn.values()[i];
            da[0] += acc;
          } else if (b_scalar) {
            const double s = bn.values()[0];
            for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] * s;
          } else {
            for (std::size_t i = 0; i < g.size(); ++i)
              da[i] += g[i] * bn.values()[i];
          }
        }
        if (bn.node()->needs_grad) {
          std::vector<double>& db = store.buffer(bn.node());
          if (b_scalar) {
            double acc = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i)
              acc += g[i] * an.values()[i];
            db[0] += acc;
          } else if (a_scalar) {
            const double s = an.values()[0];
            for (std::size_t i = 0; i < g.size(); ++i) db[i] += g[i] * s;
          } else {
            for (std::size_t i = 0; i < g.size(); ++i)
              db[i] += g[i] * an.values()[i];
          }
        }
      });
}

Tensor tanh(const Tensor& x) {
  std::vector<double> out(x.values());
  for (double& v : out) v = std::tanh(v);
  auto xn = x;
  return make_op(x.rows(), x.cols(), out, {x},
                 [xn, out](const std::vector<double>& g, GradStore& store) {
                   if (!xn.node()->needs_grad) return;
                   std::vector<double>& dx = store.buffer(xn.node());
                   for (std::size_t i = 0; i < g.size(); ++i)
                     dx[i] += g[i] * (1.0 - out[i] * out[i]);
                 });
}

Tensor sigmoid(const Tensor& x) {
  std::vector<double> out(x.values());
  for (double& v : out) v = 1.0 / (1.0 + std::exp(-v));
  auto xn = x;
  return make_op(x.rows(), x.cols(), out, {x},
                 [xn, out](const std::vector<double>& g, GradStore& store) {
                   if (!xn.node()->needs_grad) return;
                   std::vector<double>& dx = store.buffer(xn.node());
                   for (std::size_t i = 0; i < g.size(); ++i)
                     dx[i] += g[i] * out[i] * (1.0 - out[i]);
                 });
}

Tensor relu(const Tensor& x) {
  std::vector<double> out(x.values());
  for (double& v : out) v = v > 0.0 ? v : 0.0;
  auto xn = x;
  return make_op(x.rows(), x.cols(), std::move(out), {x},
                 [xn](const std::vector<double>& g, GradStore& store) {
                   if (!xn.node()->needs_grad) return;
                   std::vector<double>& dx = store.buffer(xn.node());
                   const std::vector<double>& xv = xn.values();
                   for (std::size_t i = 0; i < g.size(); ++i)
                     if (xv[i] > 0.0) dx[i] += g[i];
                 });
}

Tensor scale(const Tensor& x, double c) {
  std::vector<double> out(x.values());
  for (double& v : out) v *= c;
  auto xn = x;
  return make_op(x.rows(), x.cols(), std::move(out), {x},
                 [xn, c](const std::vector<double>& g, GradStore& store) {
                   if (!xn.node()->needs_grad) return;
                   std::vector<double>& dx = store.buffer(xn.node());
                   for (std::size_t i = 0; i < g.size(); ++i)
                     dx[i] += g[i] * c;
                 });
}

Tensor add_rowvec(const Tensor& x, const Tensor& row) {
  if (row.rows() != 1 || row.cols() != x.cols()) {
    fail("add_rowvec: expected a 1x" + std::to_string(x.cols()) +
         " row vector, got " + row.shape_str());
  }
  const std::int64_t m = x.rows(), n = x.cols();
  std::vector<double> out(x.values());
  for (std::int64_t i = 0; i < m; ++i)
    for (std::int64_t j = 0; j < n; ++j) out[i * n + j] += row.values()[j];
  auto xn = x;
  auto rn = row;
  return make_op(m, n, std::move(out), {x, row},
                 [xn, rn, m, n](const std::vector<double>& g,
                                GradStore& store) {
                   if (xn.node()->needs_grad) {
                     std::vector<double>& dx = store.buffer(xn.node());
                     for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i];
                   }
                   if (rn.node()->needs_grad) {
                     std::vector<double>& dr = store.buffer(rn.node());
                     for (std::int64_t i = 0; i < m; ++i)
                       for (std::int64_t j = 0; j < n; ++j)
                         dr[j] += g[i * n + j];
                   }
                 });
}

Tensor dropout(const Tensor& x, double p, bool training, Rng& rng) {
  if (p < 0.0 || p >= 1.0) {
    fail("dropout: p must be in [0, 1), got " + std::to_string(p));
  }
  if (!training || p == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - p);
  std::vector<double> mask(x.values().size());
  std::vector<double> out(x.values());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const bool keep = rng.uniform() >= p;
    mask[i] = keep ? keep_scale : 0.0;
    out[i] *= mask[i];
  }
  auto xn = x;
  return make_op(x.rows(), x.cols(), std::move(out), {x},
                 [xn, mask](const std::vector<double>& g, GradStore& store) {
                   if (!xn.node()->needs_grad) return;
                   std::vector<double>& dx = store.buffer(xn.node());
                   for (std::size_t i = 0; i < g.size(); ++i)
                     dx[i] += g[i] * mask[i];
                 });
}

Tensor cross_entropy(const Tensor& probs, std::int64_t gold) {
  if (probs.rows() != 1) {
    fail("cross_entropy: expected a 1xC distribution row, got " +
         probs.shape_str());
  }
  if (gold < 0 || gold >= probs.cols()) {
    throw std::out_of_range("cross_entropy: gold label " +
                            std::to_string(gold) + " out of range for " +
                            std::to_string(probs.cols()) + " classes");
  }
  const double p = probs.values()[static_cast<std::size_t>(gold)];
  auto pn = probs;
  return make_op(1, 1, {-std::log(p + kCrossEntropyEps)}, {probs},
                 [pn, gold, p](const std::vector<double>& g,
                               GradStore& store) {
                   if (!pn.node()->needs_grad) return;
                   std::vector<double>& dp = store.buffer(pn.node());
                   dp[static_cast<std::size_t>(gold)] -=
                       g[0] / (p + kCrossEntropyEps);
                 });
}

Tensor sum_all(const Tensor& x) {
  double acc = 0.0;
  for (double v : x.values()) acc += v;
  auto xn = x;
  return make_op(1, 1, {acc}, {x},
                 [xn](const std::vector<double>& g, GradStore& store) {
                   if (!xn.node()->needs_grad) return;
                   std::vector<double>& dx = store.buffer(xn.node());
                   for (double& v : dx) v += g[0];
                 });
}

Tensor embed_rows(const Tensor& table, const std::vector<std::int64_t>& ids) {
  if (ids.empty()) fail("embed_rows: empty id list");
  const std::int64_t n = table.cols();
  std::vector<double> out;
  out.reserve(ids.size() * static_cast<std::size_t>(n));
  for (std::int64_t id : ids) {
    if (id < 0 || id >= table.rows()) {
      throw std::out_of_range("embed_rows: row index " + std::to_string(id) +
                              " out of range for table with " +
                              std::to_string(table.rows()) + " rows");
    }
    out.insert(out.end(), table.values().begin() + id * n,
               table.values().begin() + (id + 1) * n);
  }
  auto tn = table;
  return make_op(static_cast<std::int64_t>(ids.size()), n, std::move(out),
                 {table},
                 [tn, ids, n](const std::vector<double>& g, GradStore& store) {
                   if (!tn.node()->needs_grad) return;
                   std::vector<double>& dt = store.buffer(tn.node());
                   for (std::size_t k = 0; k < ids.size(); ++k)
                     for (std::int64_t j = 0; j < n; ++j)
                       dt[ids[k] * n + j] += g[k * n + j];
                 });
}

GradRecord backward(const Tensor& loss) {
  if (!loss.defined() || loss.rows() != 1 || loss.cols() != 1) {
    fail("backward: loss must be a 1x1 scalar" +
         (loss.defined() ? ", got " + loss.shape_str() : std::string()));
  }
  GradRecord record;
  detail::TensorData* root = loss.data_.get();
  if (!root->needs_grad) return record;

  // Post-order DFS over the needs_grad subgraph; reversing the order visits
  // every consumer before its producers.
  std::vector<detail::TensorData*> order;
  std::unordered_set<detail::TensorData*> seen;
  std::vector<std::pair<detail::TensorData*, std::size_t>> stack;
  stack.emplace_back(root, 0);
  seen.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    bool descended = false;
    while (next < node->parents.size()) {
      detail::TensorData* parent = node->parents[next++].get();
      if (parent->needs_grad && seen.insert(parent).second) {
        stack.emplace_back(parent, 0);
        descended = true;
        break;
      }
    }
    if (!descended) {
      order.push_back(stack.back().first);
      stack.pop_back();
    }
  }

  GradStore store;
  store.buffer(root)[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::TensorData* node = *it;
    if (!store.has(node)) continue;
    if (node->backprop) node->backprop(store.buffer(node), store);
  }

  for (detail::TensorData* node : order) {
    if (node->requires_grad && store.has(node)) {
      record.grads_.emplace(node,
                            Tensor::of(node->rows, node->cols,
                                       std::move(store.buffer(node))));
    }
  }
  return record;
}

}  // namespace dcrnet
