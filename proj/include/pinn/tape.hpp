#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pinn/common.hpp"
#include "pinn/dual.hpp"

namespace pinn {

/// The registered elementary-op set. Every network activation and PDE
/// residual in this library composes from these ten ops (plus leaf nodes and
/// constant-folded variants of add/sub/mul/div/pow, which share the same
/// derivative rules).
enum class Op : std::uint8_t {
  kLeaf,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kPow,       // variable ^ variable
  kExp,
  kLog,
  kSin,
  kCos,
  kTanh,
  kSoftplus,
  kAddConst,  // x + c
  kConstSub,  // c - x
  kMulConst,  // x * c
  kConstDiv,  // c / x
  kPowConst,  // x ^ c
};

inline const char* op_name(Op op) {
  switch (op) {
    case Op::kLeaf: return "leaf";
    case Op::kAdd: case Op::kAddConst: return "add";
    case Op::kSub: case Op::kConstSub: return "sub";
    case Op::kMul: case Op::kMulConst: return "mul";
    case Op::kDiv: case Op::kConstDiv: return "div";
    case Op::kPow: case Op::kPowConst: return "pow";
    case Op::kExp: return "exp";
    case Op::kLog: return "ln";
    case Op::kSin: return "sin";
    case Op::kCos: return "cos";
    case Op::kTanh: return "tanh";
    case Op::kSoftplus: return "softplus";
  }
  return "?";
}

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0xffffffffu;

/// Adjoints of the registered input variables, in registration order.
template <class S>
struct GradientT {
  std::vector<S> adjoints;
};
using Gradient = GradientT<double>;

// ---------------------------------------------------------------------------
// Tape<S>: append-only computational graph over scalar type S.
//
// S is double for plain gradients, Dual<double> for forward-over-reverse
// second derivatives, Dual<Dual<double>> for third-order seeds. A tape is
// single-threaded; distinct tapes are fully independent.
// ---------------------------------------------------------------------------

template <class S = double>
class Tape {
 public:
  struct Node {
    S val;       ///< primal value (in S arithmetic)
    S pa, pb;    ///< local partials w.r.t. parents a, b
    NodeId a = kNoNode, b = kNoNode;
    Op op = Op::kLeaf;
    double c = 0.0;  ///< inline constant for the *Const variants
  };

  /// Register an input variable (participates in Gradient extraction).
  NodeId var(S value) {
    inputs_.push_back(next_id());
    return push(Op::kLeaf, value);
  }

  /// A leaf that is not a differentiation target; its adjoint is discarded.
  NodeId constant(S value) { return push(Op::kLeaf, value); }

  std::size_t size() const { return nodes_.size(); }
  std::size_t num_inputs() const { return inputs_.size(); }
  const std::vector<NodeId>& inputs() const { return inputs_; }
  const Node& node(NodeId id) const { return nodes_[id]; }

  const S& value(NodeId id) const {
    check_id(id);
    return nodes_[id].val;
  }

  /// Drops every node recorded after the first `n`, keeping leaves that
  /// should survive into the next evaluation (e.g. parameters).
  void truncate(std::size_t n) {
    nodes_.resize(n);
    while (!inputs_.empty() && inputs_.back() >= n) inputs_.pop_back();
  }

  void clear() {
    nodes_.clear();
    inputs_.clear();
  }

  NodeId add(NodeId x, NodeId y) { return binary(Op::kAdd, x, y, val(x) + val(y), S(1), S(1)); }
  NodeId sub(NodeId x, NodeId y) { return binary(Op::kSub, x, y, val(x) - val(y), S(1), S(-1.0)); }
  NodeId mul(NodeId x, NodeId y) {
    return binary(Op::kMul, x, y, val(x) * val(y), val(y), val(x));
  }
  NodeId div(NodeId x, NodeId y) {
    const S& b = val(y);
    if (primal(b) == 0.0) throw domain_error(Op::kDiv, "zero denominator");
    S q = val(x) / b;
    return binary(Op::kDiv, x, y, q, S(1) / b, S(0) - q / b);
  }
  NodeId pow_(NodeId x, NodeId y) {
    const S& a = val(x);
    if (primal(a) <= 0.0) throw domain_error(Op::kPow, "non-positive base");
    const S& b = val(y);
    S p = exp(b * log(a));
    return binary(Op::kPow, x, y, p, b * p / a, p * log(a));
  }
  NodeId exp_(NodeId x) {
    S e = exp(val(x));
    return unary(Op::kExp, x, e, e);
  }
  NodeId log_(NodeId x) {
    const S& a = val(x);
    if (primal(a) <= 0.0) throw domain_error(Op::kLog, "non-positive argument");
    return unary(Op::kLog, x, log(a), S(1) / a);
  }
  NodeId sin_(NodeId x) { return unary(Op::kSin, x, sin(val(x)), cos(val(x))); }
  NodeId cos_(NodeId x) { return unary(Op::kCos, x, cos(val(x)), S(0) - sin(val(x))); }
  NodeId tanh_(NodeId x) {
    S t = tanh(val(x));
    return unary(Op::kTanh, x, t, S(1) - t * t);
  }
  NodeId softplus_(NodeId x) {
    S sp = softplus(val(x));
    S g = softplus_grad(val(x));
    return unary(Op::kSoftplus, x, sp, g);
  }

  NodeId add_const(NodeId x, double c) { return unary(Op::kAddConst, x, val(x) + c, S(1), c); }
  NodeId const_sub(double c, NodeId x) { return unary(Op::kConstSub, x, c - val(x), S(-1.0), c); }
  NodeId mul_const(NodeId x, double c) { return unary(Op::kMulConst, x, val(x) * c, S(c), c); }
  NodeId const_div(double c, NodeId x) {
    const S& b = val(x);
    if (primal(b) == 0.0) throw domain_error(Op::kConstDiv, "zero denominator");
    S q = c / b;
    return unary(Op::kConstDiv, x, q, S(0) - q / b, c);
  }
  NodeId pow_const(NodeId x, double c) {
    S p = pow(val(x), c);
    return unary(Op::kPowConst, x, p, c * pow(val(x), c - 1.0), c);
  }

  /// One reverse sweep from `output`; cost is proportional to tape length.
  /// Returns the adjoints of the registered input variables.
  GradientT<S> reverse(NodeId output) const {
    check_id(output);
    adj_.assign(nodes_.size(), S(0));
    adj_[output] = S(1);
    for (NodeId i = output; i != kNoNode; --i) {
      const Node& n = nodes_[i];
      if (n.op == Op::kLeaf) {
        if (i == 0) break;
        continue;
      }
      const S& a = adj_[i];
      adj_[n.a] += n.pa * a;
      if (n.b != kNoNode) adj_[n.b] += n.pb * a;
      if (i == 0) break;
    }
    GradientT<S> g;
    g.adjoints.reserve(inputs_.size());
    for (NodeId id : inputs_) g.adjoints.push_back(adj_[id]);
    return g;
  }

  /// Recomputes every non-leaf primal from its parents, in order. Returns
  /// true iff all recomputed values are bit-identical to the stored ones.
  bool replay_matches() const {
    for (const Node& n : nodes_) {
      S v;
      switch (n.op) {
        case Op::kLeaf: continue;
        case Op::kAdd: v = nodes_[n.a].val + nodes_[n.b].val; break;
        case Op::kSub: v = nodes_[n.a].val - nodes_[n.b].val; break;
        case Op::kMul: v = nodes_[n.a].val * nodes_[n.b].val; break;
        case Op::kDiv: v = nodes_[n.a].val / nodes_[n.b].val; break;
        case Op::kPow: v = exp(nodes_[n.b].val * log(nodes_[n.a].val)); break;
        case Op::kExp: v = exp(nodes_[n.a].val); break;
        case Op::kLog: v = log(nodes_[n.a].val); break;
        case Op::kSin: v = sin(nodes_[n.a].val); break;
        case Op::kCos: v = cos(nodes_[n.a].val); break;
        case Op::kTanh: v = tanh(nodes_[n.a].val); break;
        case Op::kSoftplus: v = softplus(nodes_[n.a].val); break;
        case Op::kAddConst: v = nodes_[n.a].val + n.c; break;
        case Op::kConstSub: v = n.c - nodes_[n.a].val; break;
        case Op::kMulConst: v = nodes_[n.a].val * n.c; break;
        case Op::kConstDiv: v = n.c / nodes_[n.a].val; break;
        case Op::kPowConst: v = pow(nodes_[n.a].val, n.c); break;
      }
      if (!bitwise_equal(v, n.val)) return false;
    }
    return true;
  }

 private:
  S softplus_grad(const S& x) {
    // logistic(x) through the op set, branch chosen for overflow safety
    if (primal(x) >= 0.0) return S(1) / (S(1) + exp(S(0) - x));
    S e = exp(x);
    return e / (S(1) + e);
  }

  static bool bitwise_equal(double a, double b) {
    return a == b || (a != a && b != b);  // NaN-tolerant exact compare
  }
  template <class T>
  static bool bitwise_equal(const Dual<T>& a, const Dual<T>& b) {
    return bitwise_equal(a.v, b.v) && bitwise_equal(a.d, b.d);
  }

  const S& val(NodeId id) const {
    check_id(id);
    return nodes_[id].val;
  }

  void check_id(NodeId id) const {
    if (id >= nodes_.size())
      throw StructuralError("node id " + std::to_string(id) + " out of range (tape has " +
                            std::to_string(nodes_.size()) + " nodes)");
  }

  DomainError domain_error(Op op, const char* what) const {
    return DomainError(std::string(op_name(op)) + ": " + what + " at node " +
                       std::to_string(nodes_.size()));
  }

  NodeId next_id() const { return static_cast<NodeId>(nodes_.size()); }

  NodeId push(Op op, S v) {
    Node n;
    n.val = v;
    n.op = op;
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  NodeId unary(Op op, NodeId a, S v, S pa, double c = 0.0) {
    check_id(a);
    Node n;
    n.val = v;
    n.pa = pa;
    n.a = a;
    n.op = op;
    n.c = c;
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  NodeId binary(Op op, NodeId a, NodeId b, S v, S pa, S pb) {
    check_id(a);
    check_id(b);
    Node n;
    n.val = v;
    n.pa = pa;
    n.pb = pb;
    n.a = a;
    n.b = b;
    n.op = op;
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  std::vector<Node> nodes_;
  std::vector<NodeId> inputs_;
  mutable std::vector<S> adj_;
};

// ---------------------------------------------------------------------------
// TVar<S>: expression-building handle so that the same templated math code
// (network forward, residuals, series) can record onto a tape.
// ---------------------------------------------------------------------------

template <class S = double>
struct TVar {
  Tape<S>* tape = nullptr;
  NodeId id = kNoNode;

  TVar() = default;
  TVar(Tape<S>* t, NodeId i) : tape(t), id(i) {}

  const S& value() const { return tape->value(id); }
};

template <class S>
TVar<S> operator+(TVar<S> x, TVar<S> y) {
  return {x.tape, x.tape->add(x.id, y.id)};
}
template <class S>
TVar<S> operator-(TVar<S> x, TVar<S> y) {
  return {x.tape, x.tape->sub(x.id, y.id)};
}
template <class S>
TVar<S> operator*(TVar<S> x, TVar<S> y) {
  return {x.tape, x.tape->mul(x.id, y.id)};
}
template <class S>
TVar<S> operator/(TVar<S> x, TVar<S> y) {
  return {x.tape, x.tape->div(x.id, y.id)};
}
template <class S>
TVar<S> operator-(TVar<S> x) {
  return {x.tape, x.tape->mul_const(x.id, -1.0)};
}
template <class S>
TVar<S> operator+(TVar<S> x, double c) {
  return {x.tape, x.tape->add_const(x.id, c)};
}
template <class S>
TVar<S> operator+(double c, TVar<S> x) {
  return x + c;
}
template <class S>
TVar<S> operator-(TVar<S> x, double c) {
  return {x.tape, x.tape->add_const(x.id, -c)};
}
template <class S>
TVar<S> operator-(double c, TVar<S> x) {
  return {x.tape, x.tape->const_sub(c, x.id)};
}
template <class S>
TVar<S> operator*(TVar<S> x, double c) {
  return {x.tape, x.tape->mul_const(x.id, c)};
}
template <class S>
TVar<S> operator*(double c, TVar<S> x) {
  return x * c;
}
template <class S>
TVar<S> operator/(TVar<S> x, double c) {
  return {x.tape, x.tape->mul_const(x.id, 1.0 / c)};
}
template <class S>
TVar<S> operator/(double c, TVar<S> x) {
  return {x.tape, x.tape->const_div(c, x.id)};
}

template <class S>
TVar<S> exp(TVar<S> x) {
  return {x.tape, x.tape->exp_(x.id)};
}
template <class S>
TVar<S> log(TVar<S> x) {
  return {x.tape, x.tape->log_(x.id)};
}
template <class S>
TVar<S> sin(TVar<S> x) {
  return {x.tape, x.tape->sin_(x.id)};
}
template <class S>
TVar<S> cos(TVar<S> x) {
  return {x.tape, x.tape->cos_(x.id)};
}
template <class S>
TVar<S> tanh(TVar<S> x) {
  return {x.tape, x.tape->tanh_(x.id)};
}
template <class S>
TVar<S> softplus(TVar<S> x) {
  return {x.tape, x.tape->softplus_(x.id)};
}
template <class S>
TVar<S> pow(TVar<S> x, double c) {
  return {x.tape, x.tape->pow_const(x.id, c)};
}
template <class S>
TVar<S> pow(TVar<S> x, TVar<S> y) {
  return {x.tape, x.tape->pow_(x.id, y.id)};
}

}  // namespace pinn
