#include "ptnet/tape.hpp"

#include <algorithm>
#include <cmath>

#include "ptnet/kernels.hpp"

namespace ptnet::ad {

int Var::size() const { return tape->value_of(*this).size(); }

double Var::value(int i) const { return tape->value_of(*this)[i]; }

const char* Tape::op_name(Op op) {
  switch (op) {
    case Op::Const: return "const";
    case Op::Param: return "param";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Neg: return "neg";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tanh: return "tanh";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    case Op::Abs: return "abs";
    case Op::Relu: return "relu";
    case Op::MinConst: return "min_const";
    case Op::MaxConst: return "max_const";
    case Op::MatVec: return "matvec";
    case Op::Softmax: return "softmax";
    case Op::MeanReduce: return "mean_reduce";
    case Op::MeanVecs: return "mean_vecs";
    case Op::Index: return "index";
    case Op::Concat: return "concat";
  }
  return "?";
}

void Tape::check_same_tape(Var v) const {
  if (v.tape != this || v.idx < 0 || v.idx >= size())
    throw ShapeError("var does not belong to this tape");
}

Var Tape::push(Op op, int a, int b, int rows, int cols, double c) {
  Node n;
  n.op = op;
  n.a = a;
  n.b = b;
  n.c = c;
  n.rows = rows;
  n.cols = cols;
  n.val_ofs = values_.size();
  values_.resize(values_.size() + static_cast<size_t>(rows) * cols, 0.0);
  nodes_.push_back(n);
  return Var{this, size() - 1};
}

void Tape::check_finite(int node, const char* name) {
  const Node& n = nodes_[node];
  const double* v = val(node);
  for (int i = 0; i < len(n); ++i)
    if (!std::isfinite(v[i]))
      throw NumericError(std::string("non-finite value produced by op '") +
                         name + "'");
}

Var Tape::constant(double v) {
  Var r = push(Op::Const, -1, -1, 1, 1);
  values_[nodes_[r.idx].val_ofs] = v;
  check_finite(r.idx, "const");
  return r;
}

Var Tape::constant(std::span<const double> v) {
  Var r = push(Op::Const, -1, -1, static_cast<int>(v.size()), 1);
  std::copy(v.begin(), v.end(), values_.begin() + nodes_[r.idx].val_ofs);
  check_finite(r.idx, "const");
  return r;
}

Var Tape::constant_filled(int n, double v) {
  Var r = push(Op::Const, -1, -1, n, 1);
  std::fill_n(values_.begin() + nodes_[r.idx].val_ofs, n, v);
  check_finite(r.idx, "const");
  return r;
}

Var Tape::param(Parameter& p) {
  Var r = push(Op::Param, -1, -1, p.rows, p.cols);
  std::copy(p.value.begin(), p.value.end(),
            values_.begin() + nodes_[r.idx].val_ofs);
  nodes_[r.idx].p = &p;
  param_leaves_.push_back(r.idx);
  check_finite(r.idx, "param");
  return r;
}

Var Tape::unary_elementwise(Op op, Var a, const char* name) {
  check_same_tape(a);
  // push() may reallocate nodes_/values_; never hold node refs across it.
  const int rows = nodes_[a.idx].rows;
  const int cols = nodes_[a.idx].cols;
  Var r = push(op, a.idx, -1, rows, cols);
  const double* x = val(a.idx);
  double* out = values_.data() + nodes_[r.idx].val_ofs;
  const int n = rows * cols;
  switch (op) {
    case Op::Neg:
      for (int i = 0; i < n; ++i) out[i] = -x[i];
      break;
    case Op::Sin:
      for (int i = 0; i < n; ++i) out[i] = std::sin(x[i]);
      break;
    case Op::Cos:
      for (int i = 0; i < n; ++i) out[i] = std::cos(x[i]);
      break;
    case Op::Tanh:
      for (int i = 0; i < n; ++i) out[i] = std::tanh(x[i]);
      break;
    case Op::Exp:
      for (int i = 0; i < n; ++i) out[i] = std::exp(x[i]);
      break;
    case Op::Log:
      for (int i = 0; i < n; ++i) out[i] = std::log(x[i]);
      break;
    case Op::Sqrt:
      for (int i = 0; i < n; ++i) out[i] = std::sqrt(x[i]);
      break;
    case Op::Abs:
      for (int i = 0; i < n; ++i) out[i] = std::abs(x[i]);
      break;
    case Op::Relu:
      kernels::relu(x, out, static_cast<size_t>(n));
      break;
    default:
      throw ShapeError("bad unary op");
  }
  check_finite(r.idx, name);
  return r;
}

Var Tape::binary_elementwise(Op op, Var a, Var b, const char* name) {
  check_same_tape(a);
  check_same_tape(b);
  const int rows = nodes_[a.idx].rows;
  const int cols = nodes_[a.idx].cols;
  if (rows != nodes_[b.idx].rows || cols != nodes_[b.idx].cols)
    throw ShapeError(std::string("shape mismatch in op '") + name + "'");
  Var r = push(op, a.idx, b.idx, rows, cols);
  const double* x = val(a.idx);
  const double* y = val(b.idx);
  double* out = values_.data() + nodes_[r.idx].val_ofs;
  const size_t n = static_cast<size_t>(rows) * cols;
  switch (op) {
    case Op::Add: kernels::add(x, y, out, n); break;
    case Op::Sub: kernels::sub(x, y, out, n); break;
    case Op::Mul: kernels::mul(x, y, out, n); break;
    case Op::Div:
      for (size_t i = 0; i < n; ++i) out[i] = x[i] / y[i];
      break;
    default:
      throw ShapeError("bad binary op");
  }
  check_finite(r.idx, name);
  return r;
}

Var Tape::add(Var a, Var b) { return binary_elementwise(Op::Add, a, b, "add"); }
Var Tape::sub(Var a, Var b) { return binary_elementwise(Op::Sub, a, b, "sub"); }
Var Tape::mul(Var a, Var b) { return binary_elementwise(Op::Mul, a, b, "mul"); }
Var Tape::div(Var a, Var b) { return binary_elementwise(Op::Div, a, b, "div"); }
Var Tape::neg(Var a) { return unary_elementwise(Op::Neg, a, "neg"); }
Var Tape::sin(Var a) { return unary_elementwise(Op::Sin, a, "sin"); }
Var Tape::cos(Var a) { return unary_elementwise(Op::Cos, a, "cos"); }
Var Tape::tanh(Var a) { return unary_elementwise(Op::Tanh, a, "tanh"); }
Var Tape::exp(Var a) { return unary_elementwise(Op::Exp, a, "exp"); }
Var Tape::log(Var a) { return unary_elementwise(Op::Log, a, "log"); }
Var Tape::sqrt(Var a) { return unary_elementwise(Op::Sqrt, a, "sqrt"); }
Var Tape::abs(Var a) { return unary_elementwise(Op::Abs, a, "abs"); }
Var Tape::relu(Var a) { return unary_elementwise(Op::Relu, a, "relu"); }

Var Tape::min_const(Var a, double c) {
  check_same_tape(a);
  const int rows = nodes_[a.idx].rows;
  const int cols = nodes_[a.idx].cols;
  Var r = push(Op::MinConst, a.idx, -1, rows, cols, c);
  const double* x = val(a.idx);
  double* out = values_.data() + nodes_[r.idx].val_ofs;
  for (int i = 0; i < rows * cols; ++i) out[i] = std::min(x[i], c);
  check_finite(r.idx, "min_const");
  return r;
}

Var Tape::max_const(Var a, double c) {
  check_same_tape(a);
  const int rows = nodes_[a.idx].rows;
  const int cols = nodes_[a.idx].cols;
  Var r = push(Op::MaxConst, a.idx, -1, rows, cols, c);
  const double* x = val(a.idx);
  double* out = values_.data() + nodes_[r.idx].val_ofs;
  for (int i = 0; i < rows * cols; ++i) out[i] = std::max(x[i], c);
  check_finite(r.idx, "max_const");
  return r;
}

Var Tape::matvec(Var w, Var x) {
  check_same_tape(w);
  check_same_tape(x);
  const int w_rows = nodes_[w.idx].rows;
  const int w_cols = nodes_[w.idx].cols;
  if (nodes_[x.idx].cols != 1 || w_cols != nodes_[x.idx].rows)
    throw ShapeError("matvec shape mismatch");
  Var r = push(Op::MatVec, w.idx, x.idx, w_rows, 1);
  kernels::matvec(val(w.idx), static_cast<size_t>(w_rows),
                  static_cast<size_t>(w_cols), val(x.idx),
                  values_.data() + nodes_[r.idx].val_ofs);
  check_finite(r.idx, "matvec");
  return r;
}

Var Tape::softmax(Var a) {
  check_same_tape(a);
  if (nodes_[a.idx].cols != 1) throw ShapeError("softmax expects a vector");
  const int n = nodes_[a.idx].rows;
  Var r = push(Op::Softmax, a.idx, -1, n, 1);
  const double* x = val(a.idx);
  double* out = values_.data() + nodes_[r.idx].val_ofs;
  double m = x[0];
  for (int i = 1; i < n; ++i) m = std::max(m, x[i]);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    out[i] = std::exp(x[i] - m);
    z += out[i];
  }
  kernels::scale(1.0 / z, out, static_cast<size_t>(n));
  check_finite(r.idx, "softmax");
  return r;
}

Var Tape::mean_reduce(Var a) {
  check_same_tape(a);
  const int n = len(nodes_[a.idx]);
  Var r = push(Op::MeanReduce, a.idx, -1, 1, 1);
  values_[nodes_[r.idx].val_ofs] =
      kernels::sum(val(a.idx), static_cast<size_t>(n)) / n;
  check_finite(r.idx, "mean_reduce");
  return r;
}

Var Tape::mean_vecs(std::span<const Var> vars) {
  if (vars.empty()) throw ShapeError("mean_vecs needs >= 1 input");
  for (Var v : vars) check_same_tape(v);
  const int n = nodes_[vars[0].idx].rows;
  for (Var v : vars)
    if (nodes_[v.idx].rows != n || nodes_[v.idx].cols != 1)
      throw ShapeError("mean_vecs inputs must be same-length vectors");
  Var r = push(Op::MeanVecs, -1, -1, n, 1);
  {
    Node& nr = nodes_[r.idx];
    nr.extra_ofs = static_cast<int>(extra_parents_.size());
    nr.extra_len = static_cast<int>(vars.size());
  }
  for (Var v : vars) extra_parents_.push_back(v.idx);
  // Per-dimension sorted summation: the result depends only on the multiset
  // of addends, so permuting the inputs is bit-exactly invariant.
  const int m = static_cast<int>(vars.size());
  std::vector<double> addends(static_cast<size_t>(m));
  double* out = values_.data() + nodes_[r.idx].val_ofs;
  for (int d = 0; d < n; ++d) {
    for (int j = 0; j < m; ++j) addends[j] = val(vars[j].idx)[d];
    std::sort(addends.begin(), addends.end());
    double acc = 0.0;
    for (double x : addends) acc += x;
    out[d] = acc / m;
  }
  check_finite(r.idx, "mean_vecs");
  return r;
}

Var Tape::index(Var a, int i) {
  check_same_tape(a);
  const Node& na = nodes_[a.idx];
  if (i < 0 || i >= len(na)) throw ShapeError("index out of range");
  Var r = push(Op::Index, a.idx, -1, 1, 1, static_cast<double>(i));
  values_[nodes_[r.idx].val_ofs] = val(a.idx)[i];
  check_finite(r.idx, "index");
  return r;
}

Var Tape::concat(std::span<const Var> vars) {
  if (vars.empty()) throw ShapeError("concat needs >= 1 input");
  int total = 0;
  for (Var v : vars) {
    check_same_tape(v);
    if (nodes_[v.idx].cols != 1) throw ShapeError("concat expects vectors");
    total += nodes_[v.idx].rows;
  }
  Var r = push(Op::Concat, -1, -1, total, 1);
  {
    Node& nr = nodes_[r.idx];
    nr.extra_ofs = static_cast<int>(extra_parents_.size());
    nr.extra_len = static_cast<int>(vars.size());
  }
  double* out = values_.data() + nodes_[r.idx].val_ofs;
  for (Var v : vars) {
    extra_parents_.push_back(v.idx);
    const int n = len(nodes_[v.idx]);
    std::copy_n(val(v.idx), n, out);
    out += n;
  }
  check_finite(r.idx, "concat");
  return r;
}

std::span<const double> Tape::value_of(Var v) const {
  if (v.tape != this) throw ShapeError("var does not belong to this tape");
  const Node& n = nodes_[v.idx];
  return {values_.data() + n.val_ofs, static_cast<size_t>(len(n))};
}

std::span<const double> Tape::adjoint(Var v) const {
  if (v.tape != this) throw ShapeError("var does not belong to this tape");
  if (adjoints_.empty()) throw ShapeError("backward has not run");
  const Node& n = nodes_[v.idx];
  return {adjoints_.data() + n.val_ofs, static_cast<size_t>(len(n))};
}

void Tape::backward(Var output) {
  check_same_tape(output);
  if (backward_done_) throw ShapeError("backward already ran on this tape");
  const Node& no = nodes_[output.idx];
  if (len(no) != 1) throw ShapeError("backward requires a scalar output");
  backward_done_ = true;
  adjoints_.assign(values_.size(), 0.0);
  adjoints_[no.val_ofs] = 1.0;

  for (int i = output.idx; i >= 0; --i) {
    const Node& n = nodes_[i];
    const double* g = adjoints_.data() + n.val_ofs;
    const int nn = len(n);
    bool all_zero = true;
    for (int k = 0; k < nn; ++k)
      if (g[k] != 0.0) { all_zero = false; break; }
    if (all_zero) continue;

    switch (n.op) {
      case Op::Const:
      case Op::Param:
        break;
      case Op::Add:
        kernels::axpy(1.0, g, adj(n.a), nn);
        kernels::axpy(1.0, g, adj(n.b), nn);
        break;
      case Op::Sub:
        kernels::axpy(1.0, g, adj(n.a), nn);
        kernels::axpy(-1.0, g, adj(n.b), nn);
        break;
      case Op::Mul: {
        const double* xa = val(n.a);
        const double* xb = val(n.b);
        double* da = adj(n.a);
        double* db = adj(n.b);
        for (int k = 0; k < nn; ++k) {
          da[k] += g[k] * xb[k];
          db[k] += g[k] * xa[k];
        }
        break;
      }
      case Op::Div: {
        const double* xa = val(n.a);
        const double* xb = val(n.b);
        double* da = adj(n.a);
        double* db = adj(n.b);
        for (int k = 0; k < nn; ++k) {
          da[k] += g[k] / xb[k];
          db[k] -= g[k] * xa[k] / (xb[k] * xb[k]);
        }
        break;
      }
      case Op::Neg:
        kernels::axpy(-1.0, g, adj(n.a), nn);
        break;
      case Op::Sin: {
        const double* xa = val(n.a);
        double* da = adj(n.a);
        for (int k = 0; k < nn; ++k) da[k] += g[k] * std::cos(xa[k]);
        break;
      }
      case Op::Cos: {
        const double* xa = val(n.a);
        double* da = adj(n.a);
        for (int k = 0; k < nn; ++k) da[k] -= g[k] * std::sin(xa[k]);
        break;
      }
      case Op::Tanh: {
        const double* y = val(i);
        double* da = adj(n.a);
        for (int k = 0; k < nn; ++k) da[k] += g[k] * (1.0 - y[k] * y[k]);
        break;
      }
      case Op::Exp: {
        const double* y = val(i);
        double* da = adj(n.a);
        for (int k = 0; k < nn; ++k) da[k] += g[k] * y[k];
        break;
      }
      case Op::Log: {
        const double* xa = val(n.a);
        double* da = adj(n.a);
        for (int k = 0; k < nn; ++k) da[k] += g[k] / xa[k];
        break;
      }
      case Op::Sqrt: {
        const double* y = val(i);
        double* da = adj(n.a);
        for (int k = 0; k < nn; ++k) da[k] += g[k] * 0.5 / y[k];
        break;
      }
      case Op::Abs: {
        const double* xa = val(n.a);
        double* da = adj(n.a);
        for (int k = 0; k < nn; ++k)
          da[k] += (xa[k] >= 0.0) ? g[k] : -g[k];
        break;
      }
      case Op::Relu:
        kernels::relu_grad_accum(val(n.a), g, adj(n.a), nn);
        break;
      case Op::MinConst: {
        const double* xa = val(n.a);
        double* da = adj(n.a);
        for (int k = 0; k < nn; ++k)
          if (xa[k] <= n.c) da[k] += g[k];
        break;
      }
      case Op::MaxConst: {
        const double* xa = val(n.a);
        double* da = adj(n.a);
        for (int k = 0; k < nn; ++k)
          if (xa[k] >= n.c) da[k] += g[k];
        break;
      }
      case Op::MatVec: {
        const Node& nw = nodes_[n.a];
        kernels::outer_accum(g, val(n.b), adj(n.a),
                             static_cast<size_t>(nw.rows),
                             static_cast<size_t>(nw.cols));
        kernels::matvec_t_accum(val(n.a), static_cast<size_t>(nw.rows),
                                static_cast<size_t>(nw.cols), g, adj(n.b));
        break;
      }
      case Op::Softmax: {
        const double* y = val(i);
        double* da = adj(n.a);
        const double gy = kernels::dot(g, y, static_cast<size_t>(nn));
        for (int k = 0; k < nn; ++k) da[k] += y[k] * (g[k] - gy);
        break;
      }
      case Op::MeanReduce: {
        const Node& na = nodes_[n.a];
        const double s = g[0] / len(na);
        double* da = adj(n.a);
        for (int k = 0; k < len(na); ++k) da[k] += s;
        break;
      }
      case Op::MeanVecs: {
        const double inv = 1.0 / n.extra_len;
        for (int j = 0; j < n.extra_len; ++j) {
          double* da = adj(extra_parents_[n.extra_ofs + j]);
          kernels::axpy(inv, g, da, nn);
        }
        break;
      }
      case Op::Index:
        adj(n.a)[static_cast<int>(n.c)] += g[0];
        break;
      case Op::Concat: {
        const double* gp = g;
        for (int j = 0; j < n.extra_len; ++j) {
          const int pidx = extra_parents_[n.extra_ofs + j];
          const int pn = len(nodes_[pidx]);
          kernels::axpy(1.0, gp, adj(pidx), pn);
          gp += pn;
        }
        break;
      }
    }
  }
}

void Tape::accumulate_param_grads() {
  if (adjoints_.empty()) throw ShapeError("backward has not run");
  for (int i : param_leaves_) {
    Parameter* p = nodes_[i].p;
    kernels::axpy(1.0, adjoints_.data() + nodes_[i].val_ofs, p->grad.data(),
                  static_cast<size_t>(p->size()));
  }
}

}  // namespace ptnet::ad
