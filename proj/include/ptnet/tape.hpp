#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ptnet/types.hpp"

namespace ptnet::ad {

/// A named trainable tensor. rows x cols, row-major; vectors use cols = 1.
struct Parameter {
  std::string name;
  int rows = 0;
  int cols = 1;
  std::vector<double> value;
  std::vector<double> grad;

  Parameter() = default;
  Parameter(std::string n, int r, int c)
      : name(std::move(n)), rows(r), cols(c),
        value(static_cast<size_t>(r) * c, 0.0),
        grad(static_cast<size_t>(r) * c, 0.0) {}

  int size() const { return rows * cols; }
  void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
};

class Tape;

/// Lightweight handle to a tape node. Valid only while its tape is alive.
struct Var {
  Tape* tape = nullptr;
  int idx = -1;

  bool valid() const { return tape != nullptr && idx >= 0; }
  int size() const;
  double value(int i = 0) const;
};

/// Reverse-mode tape over scalars and dense vectors. Nodes are appended in
/// topological order during the forward pass; backward() runs one reverse
/// sweep and accumulates adjoints. Every primitive checks its outputs for
/// non-finite values and throws NumericError naming the op. A tape is
/// single-use: record, backward once, then discard.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaves.
  Var constant(double v);
  Var constant(std::span<const double> v);
  Var constant_filled(int n, double v);
  Var param(Parameter& p);

  // Elementwise (operands must have identical shapes).
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var div(Var a, Var b);
  Var neg(Var a);
  Var sin(Var a);
  Var cos(Var a);
  Var tanh(Var a);
  Var exp(Var a);
  Var log(Var a);
  Var sqrt(Var a);
  Var abs(Var a);
  Var relu(Var a);
  // Clamps against a constant. Subgradient is 1 on the interior branch and 0
  // on the clamped branch; exactly at the boundary the interior branch wins.
  Var min_const(Var a, double c);
  Var max_const(Var a, double c);

  // Linear algebra / shape ops.
  Var matvec(Var w, Var x);  // w is a matrix leaf (rows x cols), x len cols
  Var vecadd(Var a, Var b) { return add(a, b); }
  Var softmax(Var a);
  Var mean_reduce(Var a);                    // vector -> scalar mean
  Var mean_vecs(std::span<const Var> vars);  // elementwise mean of n vectors
  Var index(Var a, int i);                   // extract one scalar
  Var concat(std::span<const Var> vars);

  /// Reverse sweep from a scalar output. May be called once per tape.
  void backward(Var output);

  /// Adjoint of any node after backward().
  std::span<const double> adjoint(Var v) const;
  std::span<const double> value_of(Var v) const;

  /// Adds the adjoints of every Parameter leaf into Parameter::grad, in leaf
  /// creation order (deterministic reduction).
  void accumulate_param_grads();

  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  enum class Op : std::uint8_t {
    Const, Param, Add, Sub, Mul, Div, Neg, Sin, Cos, Tanh, Exp, Log, Sqrt,
    Abs, Relu, MinConst, MaxConst, MatVec, Softmax, MeanReduce, MeanVecs,
    Index, Concat,
  };

  struct Node {
    Op op;
    int a = -1;
    int b = -1;
    double c = 0.0;       // clamp constant / index
    int rows = 1;         // value length (rows * cols)
    int cols = 1;         // > 1 only for matrix leaves
    std::size_t val_ofs = 0;
    int extra_ofs = -1;   // into extra_parents_ for variadic ops
    int extra_len = 0;
    Parameter* p = nullptr;
  };

  int len(const Node& n) const { return n.rows * n.cols; }
  const double* val(int i) const { return values_.data() + nodes_[i].val_ofs; }
  double* adj(int i) { return adjoints_.data() + nodes_[i].val_ofs; }

  Var push(Op op, int a, int b, int rows, int cols, double c = 0.0);
  Var unary_elementwise(Op op, Var a, const char* name);
  Var binary_elementwise(Op op, Var a, Var b, const char* name);
  void check_finite(int node, const char* name);
  void check_same_tape(Var v) const;

  static const char* op_name(Op op);

  std::vector<Node> nodes_;
  std::vector<double> values_;
  std::vector<double> adjoints_;
  std::vector<int> extra_parents_;
  std::vector<int> param_leaves_;
  bool backward_done_ = false;
};

// Operator sugar for scalar-heavy code (the rollout math).
inline Var operator+(Var a, Var b) { return a.tape->add(a, b); }
inline Var operator-(Var a, Var b) { return a.tape->sub(a, b); }
inline Var operator*(Var a, Var b) { return a.tape->mul(a, b); }
inline Var operator/(Var a, Var b) { return a.tape->div(a, b); }
inline Var operator-(Var a) { return a.tape->neg(a); }
inline Var operator+(Var a, double b) { return a + a.tape->constant(b); }
inline Var operator-(Var a, double b) { return a - a.tape->constant(b); }
inline Var operator*(Var a, double b) { return a * a.tape->constant(b); }
inline Var operator+(double a, Var b) { return b.tape->constant(a) + b; }
inline Var operator-(double a, Var b) { return b.tape->constant(a) - b; }
inline Var operator*(double a, Var b) { return b.tape->constant(a) * b; }

}  // namespace ptnet::ad
