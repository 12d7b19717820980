#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace gas {

// Scalar-graph reverse-mode tape. Nodes are appended in evaluation order, so
// node ids are topologically ordered (operands always precede results) and a
// single reverse sweep visits each node exactly once.
//
// This is the exact-gradient workhorse for small graphs: test oracles,
// closed-form cross-checks and the nested-derivative oracle used by the
// sampler tests. The training path records the same jet propagation at layer
// granularity (see batch_eval.hpp) for throughput; both must agree.
class Tape {
 public:
  enum class Op : std::uint8_t { Input, Const, Add, Sub, Mul, Div, Neg, Tanh, Exp };

  struct Node {
    Op op;
    std::int32_t a = -1;
    std::int32_t b = -1;
    double val = 0.0;
  };

  int add_input(double v) {
    nodes_.push_back({Op::Input, -1, -1, v});
    input_ids_.push_back(static_cast<int>(nodes_.size()) - 1);
    return static_cast<int>(nodes_.size()) - 1;
  }

  int add_const(double v) {
    nodes_.push_back({Op::Const, -1, -1, v});
    return static_cast<int>(nodes_.size()) - 1;
  }

  int emit(Op op, int a, int b = -1) {
    double v = 0.0;
    const double va = nodes_[static_cast<std::size_t>(a)].val;
    const double vb = b >= 0 ? nodes_[static_cast<std::size_t>(b)].val : 0.0;
    switch (op) {
      case Op::Add: v = va + vb; break;
      case Op::Sub: v = va - vb; break;
      case Op::Mul: v = va * vb; break;
      case Op::Div: v = va / vb; break;
      case Op::Neg: v = -va; break;
      case Op::Tanh: v = std::tanh(va); break;
      case Op::Exp: v = std::exp(va); break;
      case Op::Input:
      case Op::Const: throw std::logic_error("tape: leaf emitted as op");
    }
    nodes_.push_back({op, static_cast<std::int32_t>(a), static_cast<std::int32_t>(b), v});
    return static_cast<int>(nodes_.size()) - 1;
  }

  double value(int id) const { return nodes_[static_cast<std::size_t>(id)].val; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<int>& input_ids() const { return input_ids_; }

  // d(output)/d(input_i) for every registered input, one reverse sweep
  std::vector<double> gradient(int output_id) const {
    std::vector<double> bar(nodes_.size(), 0.0);
    bar[static_cast<std::size_t>(output_id)] = 1.0;
    for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
      const Node& n = nodes_[static_cast<std::size_t>(i)];
      const double g = bar[static_cast<std::size_t>(i)];
      if (g == 0.0) continue;
      switch (n.op) {
        case Op::Input:
        case Op::Const: break;
        case Op::Add:
          bar[static_cast<std::size_t>(n.a)] += g;
          bar[static_cast<std::size_t>(n.b)] += g;
          break;
        case Op::Sub:
          bar[static_cast<std::size_t>(n.a)] += g;
          bar[static_cast<std::size_t>(n.b)] -= g;
          break;
        case Op::Mul:
          bar[static_cast<std::size_t>(n.a)] += g * nodes_[static_cast<std::size_t>(n.b)].val;
          bar[static_cast<std::size_t>(n.b)] += g * nodes_[static_cast<std::size_t>(n.a)].val;
          break;
        case Op::Div: {
          const double vb = nodes_[static_cast<std::size_t>(n.b)].val;
          bar[static_cast<std::size_t>(n.a)] += g / vb;
          bar[static_cast<std::size_t>(n.b)] -=
              g * n.val / vb;  // val = a/b, so d/db = -a/b^2 = -val/b
          break;
        }
        case Op::Neg: bar[static_cast<std::size_t>(n.a)] -= g; break;
        case Op::Tanh: bar[static_cast<std::size_t>(n.a)] += g * (1.0 - n.val * n.val); break;
        case Op::Exp: bar[static_cast<std::size_t>(n.a)] += g * n.val; break;
      }
    }
    std::vector<double> grad(input_ids_.size());
    for (std::size_t i = 0; i < input_ids_.size(); ++i)
      grad[i] = bar[static_cast<std::size_t>(input_ids_[i])];
    return grad;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<int> input_ids_;
};

// Value handle; overloads let generic code (jets, layer loops) record onto
// the tape transparently.
class Var {
 public:
  Var() = default;
  Var(Tape& t, int id) : tape_(&t), id_(id) {}

  static Var input(Tape& t, double v) { return {t, t.add_input(v)}; }
  static Var constant(Tape& t, double v) { return {t, t.add_const(v)}; }

  double value() const { return tape_->value(id_); }
  int id() const { return id_; }
  Tape& tape() const { return *tape_; }

 private:
  Tape* tape_ = nullptr;
  int id_ = -1;
};

inline Var operator+(const Var& a, const Var& b) {
  return {a.tape(), a.tape().emit(Tape::Op::Add, a.id(), b.id())};
}
inline Var operator-(const Var& a, const Var& b) {
  return {a.tape(), a.tape().emit(Tape::Op::Sub, a.id(), b.id())};
}
inline Var operator*(const Var& a, const Var& b) {
  return {a.tape(), a.tape().emit(Tape::Op::Mul, a.id(), b.id())};
}
inline Var operator/(const Var& a, const Var& b) {
  return {a.tape(), a.tape().emit(Tape::Op::Div, a.id(), b.id())};
}
inline Var operator-(const Var& a) { return {a.tape(), a.tape().emit(Tape::Op::Neg, a.id())}; }
inline Var tanh(const Var& a) { return {a.tape(), a.tape().emit(Tape::Op::Tanh, a.id())}; }
inline Var exp(const Var& a) { return {a.tape(), a.tape().emit(Tape::Op::Exp, a.id())}; }

inline Var operator+(double c, const Var& a) { return Var::constant(a.tape(), c) + a; }
inline Var operator+(const Var& a, double c) { return a + Var::constant(a.tape(), c); }
inline Var operator-(double c, const Var& a) { return Var::constant(a.tape(), c) - a; }
inline Var operator-(const Var& a, double c) { return a - Var::constant(a.tape(), c); }
inline Var operator*(double c, const Var& a) { return Var::constant(a.tape(), c) * a; }
inline Var operator*(const Var& a, double c) { return a * Var::constant(a.tape(), c); }
inline Var operator/(const Var& a, double c) { return a / Var::constant(a.tape(), c); }

}  // namespace gas
