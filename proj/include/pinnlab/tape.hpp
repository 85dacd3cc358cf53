#ifndef PINNLAB_TAPE_HPP
#define PINNLAB_TAPE_HPP

#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

#include "pinnlab/dual.hpp"

namespace pinnlab::ad {

// Reverse-mode tape recorded over dual values. The forward sweep happens at
// record time; backward() propagates adjoints for every channel of the dual,
// so expressions that already contain input-tangents (e.g. a PDE residual
// built from tangent slots) are differentiated with respect to the recorded
// leaves. The value-channel adjoint of a leaf is d(output)/d(leaf value).
//
// A tape is confined to one thread for its lifetime.
template <int W>
class Tape {
 public:
  using Value = DualT<W>;
  struct Var {
    std::uint32_t i = 0;
  };

  enum class Op : std::uint8_t {
    kLeaf,
    kConst,
    kAdd,
    kSub,
    kMul,
    kDiv,
    kTanh,
    kSin,
    kSquare,
    kSum,
    kMean,
    kTangent,  // extracts one tangent slot as a plain value
  };

  void reserve(std::size_t n) {
    kind_.reserve(n);
    a_.reserve(n);
    b_.reserve(n);
    val_.reserve(n);
  }

  void clear() {
    kind_.clear();
    a_.clear();
    b_.clear();
    val_.clear();
    pool_.clear();
    pool_mark_ = 0;
    accum_mark_ = 0;
  }

  std::size_t size() const { return kind_.size(); }

  Var leaf(const Value& v) { return push(Op::kLeaf, 0, 0, v); }

  Var constant(double c) { return push(Op::kConst, 0, 0, Value::constant(c)); }

  Var add(Var a, Var b) { return push(Op::kAdd, a.i, b.i, val_[a.i] + val_[b.i]); }
  Var sub(Var a, Var b) { return push(Op::kSub, a.i, b.i, val_[a.i] - val_[b.i]); }
  Var mul(Var a, Var b) { return push(Op::kMul, a.i, b.i, val_[a.i] * val_[b.i]); }
  Var div(Var a, Var b) { return push(Op::kDiv, a.i, b.i, val_[a.i] / val_[b.i]); }

  Var tanh(Var a) { return push(Op::kTanh, a.i, 0, ad::tanh(val_[a.i])); }
  Var sin(Var a) { return push(Op::kSin, a.i, 0, ad::sin(val_[a.i])); }
  Var square(Var a) { return push(Op::kSquare, a.i, 0, ad::square(val_[a.i])); }

  Var sum(const Var* xs, std::uint32_t n) { return reduce(Op::kSum, xs, n); }
  Var mean(const Var* xs, std::uint32_t n) { return reduce(Op::kMean, xs, n); }

  Var tangent(Var a, int slot) {
    Value v{};
    v.value = val_[a.i].tangent[slot];
    return push(Op::kTangent, a.i, static_cast<std::uint32_t>(slot), v);
  }

  const Value& val(Var v) const { return val_[v.i]; }
  const Value& adjoint(Var v) const { return adj_[v.i]; }

  // Full reverse sweep from `out`, seeding d(out.value) = 1.
  void backward(Var out) {
    adj_.assign(val_.size(), Value{});
    adj_[out.i].value = 1.0;
    sweep(out.i, 0);
  }

  // --- accumulation mode -------------------------------------------------
  // Record the leaves (parameters, constants) once, begin_accumulation(),
  // then per term: rewind(), record the term's subgraph, and
  // backward_accumulate(out, w). Leaf adjoints below the accumulation mark
  // sum across terms weighted by w. Everything below the mark must be kLeaf
  // or kConst; rewind() drops everything above it while keeping leaf values
  // and accumulated leaf adjoints intact.

  void begin_accumulation() {
    accum_mark_ = kind_.size();
    pool_mark_ = pool_.size();
    adj_.assign(val_.size(), Value{});
  }

  void rewind() {
    kind_.resize(accum_mark_);
    a_.resize(accum_mark_);
    b_.resize(accum_mark_);
    val_.resize(accum_mark_);
    pool_.resize(pool_mark_);
  }

  void backward_accumulate(Var out, double seed) {
    const std::size_t n = val_.size();
    if (adj_.size() < n) adj_.resize(n);
    for (std::size_t i = accum_mark_; i < n; ++i) adj_[i] = Value{};
    adj_[out.i].value = seed;
    sweep(out.i, static_cast<std::uint32_t>(accum_mark_));
  }

 private:
  Var push(Op op, std::uint32_t a, std::uint32_t b, const Value& v) {
    kind_.push_back(static_cast<std::uint8_t>(op));
    a_.push_back(a);
    b_.push_back(b);
    val_.push_back(v);
    return Var{static_cast<std::uint32_t>(kind_.size() - 1)};
  }

  Var reduce(Op op, const Var* xs, std::uint32_t n) {
    assert(n > 0);
    const auto off = static_cast<std::uint32_t>(pool_.size());
    Value acc = val_[xs[0].i];
    pool_.push_back(xs[0].i);
    for (std::uint32_t j = 1; j < n; ++j) {
      acc = acc + val_[xs[j].i];
      pool_.push_back(xs[j].i);
    }
    if (op == Op::kMean) {
      const double inv = 1.0 / static_cast<double>(n);
      acc = inv * acc;
    }
    return push(op, off, n, acc);
  }

  // Reverse sweep over nodes (stop, out]; nodes below `stop` only receive
  // adjoint contributions.
  void sweep(std::uint32_t out, std::uint32_t stop) {
    for (std::uint32_t i = out + 1; i-- > stop;) {
      const Value ca = adj_[i];
      switch (static_cast<Op>(kind_[i])) {
        case Op::kLeaf:
        case Op::kConst:
          break;
        case Op::kAdd: {
          accumulate(a_[i], ca);
          accumulate(b_[i], ca);
          break;
        }
        case Op::kSub: {
          accumulate(a_[i], ca);
          Value neg = ca;
          neg.value = -neg.value;
          for (int k = 0; k < W; ++k) neg.tangent[k] = -neg.tangent[k];
          accumulate(b_[i], neg);
          break;
        }
        case Op::kMul: {
          const Value& av = val_[a_[i]];
          const Value& bv = val_[b_[i]];
          Value& aa = adj_[a_[i]];
          Value& ba = adj_[b_[i]];
          double sa = ca.value * bv.value;
          double sb = ca.value * av.value;
          for (int k = 0; k < W; ++k) {
            sa += ca.tangent[k] * bv.tangent[k];
            sb += ca.tangent[k] * av.tangent[k];
            aa.tangent[k] += ca.tangent[k] * bv.value;
            ba.tangent[k] += ca.tangent[k] * av.value;
          }
          aa.value += sa;
          ba.value += sb;
          break;
        }
        case Op::kDiv: {
          const Value& av = val_[a_[i]];
          const Value& bv = val_[b_[i]];
          const Value& cv = val_[i];
          Value& aa = adj_[a_[i]];
          Value& ba = adj_[b_[i]];
          const double inv = 1.0 / bv.value;
          const double inv2 = inv * inv;
          double sa = ca.value * inv;
          double sb = -ca.value * cv.value * inv;
          for (int k = 0; k < W; ++k) {
            sa -= ca.tangent[k] * bv.tangent[k] * inv2;
            sb += ca.tangent[k] * inv2 *
                  (2.0 * cv.value * bv.tangent[k] - av.tangent[k]);
            aa.tangent[k] += ca.tangent[k] * inv;
            ba.tangent[k] -= ca.tangent[k] * cv.value * inv;
          }
          aa.value += sa;
          ba.value += sb;
          break;
        }
        case Op::kTanh: {
          const Value& av = val_[a_[i]];
          const double cv = val_[i].value;
          const double s = 1.0 - cv * cv;
          Value& aa = adj_[a_[i]];
          double mixed = 0.0;
          for (int k = 0; k < W; ++k) {
            mixed += ca.tangent[k] * av.tangent[k];
            aa.tangent[k] += ca.tangent[k] * s;
          }
          aa.value += ca.value * s - 2.0 * cv * s * mixed;
          break;
        }
        case Op::kSin: {
          const Value& av = val_[a_[i]];
          const double cv = val_[i].value;
          const double c = std::cos(av.value);
          Value& aa = adj_[a_[i]];
          double mixed = 0.0;
          for (int k = 0; k < W; ++k) {
            mixed += ca.tangent[k] * av.tangent[k];
            aa.tangent[k] += ca.tangent[k] * c;
          }
          aa.value += ca.value * c - cv * mixed;
          break;
        }
        case Op::kSquare: {
          const Value& av = val_[a_[i]];
          Value& aa = adj_[a_[i]];
          double mixed = 0.0;
          for (int k = 0; k < W; ++k) {
            mixed += ca.tangent[k] * av.tangent[k];
            aa.tangent[k] += ca.tangent[k] * 2.0 * av.value;
          }
          aa.value += 2.0 * (ca.value * av.value + mixed);
          break;
        }
        case Op::kSum: {
          const std::uint32_t off = a_[i];
          const std::uint32_t n = b_[i];
          for (std::uint32_t j = 0; j < n; ++j) accumulate(pool_[off + j], ca);
          break;
        }
        case Op::kMean: {
          const std::uint32_t off = a_[i];
          const std::uint32_t n = b_[i];
          const double inv = 1.0 / static_cast<double>(n);
          Value scaled = ca;
          scaled.value *= inv;
          for (int k = 0; k < W; ++k) scaled.tangent[k] *= inv;
          for (std::uint32_t j = 0; j < n; ++j)
            accumulate(pool_[off + j], scaled);
          break;
        }
        case Op::kTangent: {
          adj_[a_[i]].tangent[b_[i]] += ca.value;
          break;
        }
      }
    }
  }

  void accumulate(std::uint32_t idx, const Value& v) {
    Value& a = adj_[idx];
    a.value += v.value;
    for (int k = 0; k < W; ++k) a.tangent[k] += v.tangent[k];
  }

  std::vector<std::uint8_t> kind_;
  std::vector<std::uint32_t> a_;
  std::vector<std::uint32_t> b_;
  std::vector<Value> val_;
  std::vector<Value> adj_;
  std::vector<std::uint32_t> pool_;
  std::size_t pool_mark_ = 0;
  std::size_t accum_mark_ = 0;
};

using Tape1 = Tape<1>;
using Tape2 = Tape<2>;

}  // namespace pinnlab::ad

#endif
