#ifndef DEPKIT_AUTOGRAD_HPP
#define DEPKIT_AUTOGRAD_HPP

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "depkit/error.hpp"
#include "depkit/rng.hpp"

namespace depkit::nn {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

// -inf surrogate used for masking logits; large enough to zero the softmax,
// small enough to stay finite in 32-bit.
template <typename S>
constexpr S neg_inf() {
  return S(-1e9);
}

// A persistent trainable tensor. Gradients accumulate across graphs until
// zero_grad().
template <typename S>
struct Parameter {
  std::string name;
  Mat<S> value;
  Mat<S> grad;

  Parameter() = default;
  Parameter(std::string n, int rows, int cols)
      : name(std::move(n)),
        value(Mat<S>::Zero(rows, cols)),
        grad(Mat<S>::Zero(rows, cols)) {}

  void zero_grad() { grad.setZero(); }
  long size() const { return value.size(); }
};

// Tape-based computation graph. Nodes are created in topological order; a
// single backward() call walks the tape in reverse. One graph per loss
// evaluation; parameters live outside and persist.
template <typename S>
class Graph {
 public:
  struct Expr {
    int i = -1;
    bool valid() const { return i >= 0; }
  };

  const Mat<S>& value(Expr e) const {
    const Node& nd = nodes_[e.i];
    return nd.pvalue ? *nd.pvalue : nd.value;
  }

  int rows(Expr e) const { return static_cast<int>(value(e).rows()); }
  int cols(Expr e) const { return static_cast<int>(value(e).cols()); }

  // ---- leaves ----

  Expr input(Mat<S> v) {
    Node nd;
    nd.value = std::move(v);
    return push(std::move(nd));
  }

  Expr param(Parameter<S>& p) {
    Node nd;
    nd.pvalue = &p.value;
    nd.needs_grad = true;
    nd.backward = [&p](Graph& g, const Node& self) { p.grad += self.grad; };
    return push(std::move(nd));
  }

  // Embedding lookup: selected rows of a parameter table. Backward scatters
  // straight into the parameter gradient, skipping a table-sized buffer.
  Expr rows_of_param(Parameter<S>& p, std::vector<int> ids) {
    Node nd;
    nd.value.resize(ids.size(), p.value.cols());
    for (std::size_t k = 0; k < ids.size(); ++k)
      nd.value.row(k) = p.value.row(ids[k]);
    nd.needs_grad = true;
    nd.backward = [&p, ids = std::move(ids)](Graph& g, const Node& self) {
      for (std::size_t k = 0; k < ids.size(); ++k)
        p.grad.row(ids[k]) += self.grad.row(k);
    };
    return push(std::move(nd));
  }

  // ---- arithmetic ----

  Expr matmul(Expr a, Expr b) {
    if (cols(a) != rows(b)) throw Error("matmul: inner dimensions differ");
    Node nd;
    nd.value = value(a) * value(b);
    nd.inputs = {a.i, b.i};
    nd.backward = [a, b](Graph& g, const Node& self) {
      if (g.wants(a)) g.grad(a).noalias() += self.grad * g.value(b).transpose();
      if (g.wants(b)) g.grad(b).noalias() += g.value(a).transpose() * self.grad;
    };
    return push_op(std::move(nd));
  }

  Expr transpose(Expr a) {
    Node nd;
    nd.value = value(a).transpose();
    nd.inputs = {a.i};
    nd.backward = [a](Graph& g, const Node& self) {
      g.grad(a) += self.grad.transpose();
    };
    return push_op(std::move(nd));
  }

  Expr add(Expr a, Expr b) {
    if (rows(a) != rows(b) || cols(a) != cols(b))
      throw Error("add: shape mismatch");
    Node nd;
    nd.value = value(a) + value(b);
    nd.inputs = {a.i, b.i};
    nd.backward = [a, b](Graph& g, const Node& self) {
      if (g.wants(a)) g.grad(a) += self.grad;
      if (g.wants(b)) g.grad(b) += self.grad;
    };
    return push_op(std::move(nd));
  }

  // a + row vector broadcast over rows (bias add).
  Expr add_rowvec(Expr a, Expr v) {
    if (rows(v) != 1 || cols(a) != cols(v))
      throw Error("add_rowvec: v must be 1 x cols(a)");
    Node nd;
    nd.value = value(a).rowwise() + value(v).row(0);
    nd.inputs = {a.i, v.i};
    nd.backward = [a, v](Graph& g, const Node& self) {
      if (g.wants(a)) g.grad(a) += self.grad;
      if (g.wants(v)) g.grad(v).row(0) += self.grad.colwise().sum();
    };
    return push_op(std::move(nd));
  }

  // a + column vector broadcast over columns.
  Expr add_colvec(Expr a, Expr v) {
    if (cols(v) != 1 || rows(a) != rows(v))
      throw Error("add_colvec: v must be rows(a) x 1");
    Node nd;
    nd.value = value(a).colwise() + value(v).col(0);
    nd.inputs = {a.i, v.i};
    nd.backward = [a, v](Graph& g, const Node& self) {
      if (g.wants(a)) g.grad(a) += self.grad;
      if (g.wants(v)) g.grad(v).col(0) += self.grad.rowwise().sum();
    };
    return push_op(std::move(nd));
  }

  Expr scale(Expr a, double c) {
    Node nd;
    nd.value = value(a) * S(c);
    nd.inputs = {a.i};
    nd.backward = [a, c](Graph& g, const Node& self) {
      g.grad(a) += self.grad * S(c);
    };
    return push_op(std::move(nd));
  }

  Expr cmult(Expr a, Expr b) {
    if (rows(a) != rows(b) || cols(a) != cols(b))
      throw Error("cmult: shape mismatch");
    Node nd;
    nd.value = value(a).cwiseProduct(value(b));
    nd.inputs = {a.i, b.i};
    nd.backward = [a, b](Graph& g, const Node& self) {
      if (g.wants(a)) g.grad(a) += self.grad.cwiseProduct(g.value(b));
      if (g.wants(b)) g.grad(b) += self.grad.cwiseProduct(g.value(a));
    };
    return push_op(std::move(nd));
  }

  // ---- nonlinearities ----

  Expr sigmoid(Expr a) {
    Node nd;
    nd.value = value(a).unaryExpr(
        [](S x) { return S(1) / (S(1) + std::exp(-x)); });
    nd.inputs = {a.i};
    Expr self_e;  // filled after push
    nd.backward = [a](Graph& g, const Node& self) {
      g.grad(a) += self.grad.cwiseProduct(
          self.value.cwiseProduct(Mat<S>::Ones(self.value.rows(),
                                               self.value.cols()) -
                                  self.value));
    };
    Expr e = push_op(std::move(nd));
    (void)self_e;
    return e;
  }

  Expr tanh_(Expr a) {
    Node nd;
    nd.value = value(a).array().tanh().matrix();
    nd.inputs = {a.i};
    nd.backward = [a](Graph& g, const Node& self) {
      g.grad(a) += self.grad.cwiseProduct(
          (S(1) - self.value.array().square()).matrix());
    };
    return push_op(std::move(nd));
  }

  // ---- shape ops ----

  Expr concat_rows(const std::vector<Expr>& parts) {
    if (parts.empty()) throw Error("concat_rows: empty");
    int c = cols(parts[0]), r = 0;
    for (Expr p : parts) {
      if (cols(p) != c) throw Error("concat_rows: column mismatch");
      r += rows(p);
    }
    Node nd;
    nd.value.resize(r, c);
    int at = 0;
    std::vector<int> offs;
    for (Expr p : parts) {
      offs.push_back(at);
      nd.value.middleRows(at, rows(p)) = value(p);
      nd.inputs.push_back(p.i);
      at += rows(p);
    }
    nd.backward = [parts, offs](Graph& g, const Node& self) {
      for (std::size_t k = 0; k < parts.size(); ++k)
        if (g.wants(parts[k]))
          g.grad(parts[k]) +=
              self.grad.middleRows(offs[k], g.rows(parts[k]));
    };
    return push_op(std::move(nd));
  }

  Expr concat_cols(const std::vector<Expr>& parts) {
    if (parts.empty()) throw Error("concat_cols: empty");
    int r = rows(parts[0]), c = 0;
    for (Expr p : parts) {
      if (rows(p) != r) throw Error("concat_cols: row mismatch");
      c += cols(p);
    }
    Node nd;
    nd.value.resize(r, c);
    int at = 0;
    std::vector<int> offs;
    for (Expr p : parts) {
      offs.push_back(at);
      nd.value.middleCols(at, cols(p)) = value(p);
      nd.inputs.push_back(p.i);
      at += cols(p);
    }
    nd.backward = [parts, offs](Graph& g, const Node& self) {
      for (std::size_t k = 0; k < parts.size(); ++k)
        if (g.wants(parts[k]))
          g.grad(parts[k]) +=
              self.grad.middleCols(offs[k], g.cols(parts[k]));
    };
    return push_op(std::move(nd));
  }

  Expr slice_rows(Expr a, int r0, int h) {
    if (r0 < 0 || h < 1 || r0 + h > rows(a)) throw Error("slice_rows: range");
    Node nd;
    nd.value = value(a).middleRows(r0, h);
    nd.inputs = {a.i};
    nd.backward = [a, r0, h](Graph& g, const Node& self) {
      g.grad(a).middleRows(r0, h) += self.grad;
    };
    return push_op(std::move(nd));
  }

  Expr slice_cols(Expr a, int c0, int w) {
    if (c0 < 0 || w < 1 || c0 + w > cols(a)) throw Error("slice_cols: range");
    Node nd;
    nd.value = value(a).middleCols(c0, w);
    nd.inputs = {a.i};
    nd.backward = [a, c0, w](Graph& g, const Node& self) {
      g.grad(a).middleCols(c0, w) += self.grad;
    };
    return push_op(std::move(nd));
  }

  // Row gather with duplicates allowed; backward scatter-adds.
  Expr gather_rows(Expr a, std::vector<int> ids) {
    Node nd;
    nd.value.resize(ids.size(), cols(a));
    const Mat<S>& av = value(a);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (ids[k] < 0 || ids[k] >= av.rows())
        throw Error("gather_rows: index out of range");
      nd.value.row(k) = av.row(ids[k]);
    }
    nd.inputs = {a.i};
    nd.backward = [a, ids = std::move(ids)](Graph& g, const Node& self) {
      for (std::size_t k = 0; k < ids.size(); ++k)
        g.grad(a).row(ids[k]) += self.grad.row(k);
    };
    return push_op(std::move(nd));
  }

  // ---- reductions / losses ----

  Expr rowwise_sum(Expr a) {
    Node nd;
    nd.value = value(a).rowwise().sum();
    nd.inputs = {a.i};
    nd.backward = [a](Graph& g, const Node& self) {
      g.grad(a).colwise() += self.grad.col(0);
    };
    return push_op(std::move(nd));
  }

  Expr sum_all(Expr a) {
    Node nd;
    nd.value = Mat<S>::Constant(1, 1, value(a).sum());
    nd.inputs = {a.i};
    nd.backward = [a](Graph& g, const Node& self) {
      g.grad(a).array() += self.grad(0, 0);
    };
    return push_op(std::move(nd));
  }

  // Mean over rows of the cross-entropy between row-softmax(a) and the given
  // target column per row. Stable under neg_inf masking.
  Expr xent_rows_mean(Expr a, std::vector<int> targets) {
    if (static_cast<int>(targets.size()) != rows(a))
      throw Error("xent_rows_mean: one target per row required");
    const Mat<S>& av = value(a);
    const int r = static_cast<int>(av.rows());
    const int c = static_cast<int>(av.cols());
    Mat<S> probs(r, c);
    S total = 0;
    for (int i = 0; i < r; ++i) {
      if (targets[i] < 0 || targets[i] >= c)
        throw Error("xent_rows_mean: target out of range");
      S mx = av.row(i).maxCoeff();
      Eigen::Array<S, 1, Eigen::Dynamic> ex = (av.row(i).array() - mx).exp();
      S z = ex.sum();
      probs.row(i) = (ex / z).matrix();
      total += -(av(i, targets[i]) - mx - std::log(z));
    }
    Node nd;
    nd.value = Mat<S>::Constant(1, 1, total / S(r));
    nd.inputs = {a.i};
    nd.backward = [a, targets = std::move(targets),
                   probs = std::move(probs)](Graph& g, const Node& self) {
      const S go = self.grad(0, 0) / S(probs.rows());
      Mat<S> d = probs;
      for (int i = 0; i < d.rows(); ++i) d(i, targets[i]) -= S(1);
      g.grad(a) += go * d;
    };
    return push_op(std::move(nd));
  }

  // Inverted dropout; identity when keep = 1. Mask drawn from rng.
  Expr dropout(Expr a, double rate, RngStream& rng) {
    if (rate <= 0.0) return a;
    if (rate >= 1.0) throw Error("dropout: rate must be < 1");
    Mat<S> mask(rows(a), cols(a));
    const S keep_inv = S(1.0 / (1.0 - rate));
    for (int i = 0; i < mask.rows(); ++i)
      for (int j = 0; j < mask.cols(); ++j)
        mask(i, j) = rng.bernoulli(rate) ? S(0) : keep_inv;
    return cmult(a, input(std::move(mask)));
  }

  // ---- backward ----

  void backward(Expr root) {
    Node& rn = nodes_[root.i];
    if (rn.value.size() != 1 && !(rn.pvalue && rn.pvalue->size() == 1))
      throw Error("backward: root must be a scalar");
    ensure_grad(root.i);
    nodes_[root.i].grad(0, 0) = S(1);
    for (int i = root.i; i >= 0; --i) {
      Node& nd = nodes_[i];
      if (!nd.needs_grad || !nd.grad_ready || !nd.backward) continue;
      for (int in : nd.inputs)
        if (nodes_[in].needs_grad) ensure_grad(in);
      nd.backward(*this, nd);
    }
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Mat<S> value;
    const Mat<S>* pvalue = nullptr;  // external storage (parameters)
    Mat<S> grad;
    bool grad_ready = false;
    bool needs_grad = false;
    std::vector<int> inputs;
    std::function<void(Graph&, const Node&)> backward;
  };

  bool wants(Expr e) const { return nodes_[e.i].needs_grad; }

  Mat<S>& grad(Expr e) { return nodes_[e.i].grad; }

  void ensure_grad(int i) {
    Node& nd = nodes_[i];
    if (!nd.grad_ready) {
      const Mat<S>& v = nd.pvalue ? *nd.pvalue : nd.value;
      nd.grad = Mat<S>::Zero(v.rows(), v.cols());
      nd.grad_ready = true;
    }
  }

  Expr push(Node nd) {
    nodes_.push_back(std::move(nd));
    return {static_cast<int>(nodes_.size()) - 1};
  }

  // Like push, but inherits needs_grad from the inputs.
  Expr push_op(Node nd) {
    for (int in : nd.inputs)
      if (nodes_[in].needs_grad) {
        nd.needs_grad = true;
        break;
      }
    if (!nd.needs_grad) nd.backward = nullptr;
    return push(std::move(nd));
  }

  std::vector<Node> nodes_;
};

template <typename S>
using Expr = typename Graph<S>::Expr;

}  // namespace depkit::nn

#endif
