#include "cure/autodiff.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "cure/error.h"

namespace cure {

Tensor Tensor::Vector(std::vector<double> values) {
  Tensor t;
  t.rows = static_cast<int>(values.size());
  t.cols = 1;
  t.data = std::move(values);
  return t;
}

void FillUniform(Tensor &t, double range, std::mt19937_64 &rng) {
  // 53 random mantissa bits, so the draw sequence is the same on every
  // standard library.
  for (double &v : t.data) {
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v = -range + 2.0 * range * unit;
  }
}

const Tensor &Var::value() const { return tape->value(id); }
const Tensor &Var::grad() const { return tape->grad(id); }

namespace {

bool AllFinite(const Tensor &t) {
  return std::all_of(t.data.begin(), t.data.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string Shape(const Tensor &t) {
  return std::to_string(t.rows) + "x" + std::to_string(t.cols);
}

void RequireShape(bool ok, const char *op, const Tensor &a, const Tensor &b) {
  if (!ok) {
    throw ValidationError(std::string(op) + ": shape mismatch " + Shape(a) +
                          " vs " + Shape(b));
  }
}

void RequireVector(const char *op, const Tensor &a) {
  if (a.cols != 1) {
    throw ValidationError(std::string(op) + ": expected a column vector, got " +
                          Shape(a));
  }
}

double SigmoidValue(double x) {
  // Split on sign so exp never overflows.
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Var Tape::Leaf(Tensor value, Tensor *grad_sink) {
  if (grad_sink != nullptr && !grad_sink->SameShape(value)) {
    throw ValidationError("leaf gradient sink has shape " + Shape(*grad_sink) +
                          ", value " + Shape(value));
  }
  Var v = Push("leaf", std::move(value), {}, nullptr);
  nodes_[v.id].sink = grad_sink;
  return v;
}

Var Tape::Constant(Tensor value) {
  return Push("constant", std::move(value), {}, nullptr);
}

Var Tape::Push(const char *op, Tensor value, std::vector<int> parents,
               BackwardFn backward) {
  const int id = static_cast<int>(nodes_.size());
  if (!AllFinite(value)) {
    throw NumericError(std::string("non-finite value at node #") +
                       std::to_string(id) + " (" + op + ")");
  }
  nodes_.push_back(
      Node{op, std::move(value), Tensor(), std::move(parents), std::move(backward)});
  return Var{this, id};
}

void Tape::Backward(Var loss) {
  if (loss.tape != this) throw ValidationError("loss belongs to another tape");
  if (value(loss.id).size() != 1) {
    throw ValidationError("backward needs a scalar loss, got " +
                          Shape(value(loss.id)));
  }
  for (Node &n : nodes_) n.grad = Tensor(n.value.rows, n.value.cols);
  nodes_[loss.id].grad.data[0] = 1.0;

  for (int id = loss.id; id >= 0; --id) {
    Node &n = nodes_[id];
    if (!AllFinite(n.grad)) {
      throw NumericError(std::string("non-finite gradient at node #") +
                         std::to_string(id) + " (" + n.op + ")");
    }
    if (n.backward) n.backward(*this, id);
  }
  for (Node &n : nodes_) {
    if (n.sink == nullptr) continue;
    for (size_t i = 0; i < n.grad.data.size(); ++i) {
      n.sink->data[i] += n.grad.data[i];
    }
  }
}

Var MatVec(Var w, Var x) {
  Tape &t = *w.tape;
  const Tensor &W = w.value();
  const Tensor &X = x.value();
  RequireVector("matvec", X);
  RequireShape(W.cols == X.rows, "matvec", W, X);
  Tensor out(W.rows, 1);
  for (int r = 0; r < W.rows; ++r) {
    double s = 0.0;
    const double *row = &W.data[static_cast<size_t>(r) * W.cols];
    for (int c = 0; c < W.cols; ++c) s += row[c] * X.data[c];
    out.data[r] = s;
  }
  const int wi = w.id, xi = x.id;
  return t.Push("matvec", std::move(out), {wi, xi}, [wi, xi](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    const Tensor &W = t.value(wi);
    const Tensor &X = t.value(xi);
    Tensor &gw = t.grad(wi);
    Tensor &gx = t.grad(xi);
    for (int r = 0; r < W.rows; ++r) {
      const double gr = g.data[r];
      if (gr == 0.0) continue;
      const size_t base = static_cast<size_t>(r) * W.cols;
      for (int c = 0; c < W.cols; ++c) {
        gw.data[base + c] += gr * X.data[c];
        gx.data[c] += gr * W.data[base + c];
      }
    }
  });
}

Var Add(Var a, Var b) {
  const Tensor &A = a.value(), &B = b.value();
  RequireShape(A.SameShape(B), "add", A, B);
  Tensor out = A;
  for (int i = 0; i < out.size(); ++i) out.data[i] += B.data[i];
  const int ai = a.id, bi = b.id;
  return a.tape->Push("add", std::move(out), {ai, bi},
                      [ai, bi](Tape &t, int self) {
                        const Tensor &g = t.grad(self);
                        Tensor &ga = t.grad(ai);
                        for (int i = 0; i < g.size(); ++i) ga.data[i] += g.data[i];
                        Tensor &gb = t.grad(bi);
                        for (int i = 0; i < g.size(); ++i) gb.data[i] += g.data[i];
                      });
}

Var Mul(Var a, Var b) {
  const Tensor &A = a.value(), &B = b.value();
  RequireShape(A.SameShape(B), "mul", A, B);
  Tensor out = A;
  for (int i = 0; i < out.size(); ++i) out.data[i] *= B.data[i];
  const int ai = a.id, bi = b.id;
  return a.tape->Push("mul", std::move(out), {ai, bi},
                      [ai, bi](Tape &t, int self) {
                        const Tensor &g = t.grad(self);
                        const Tensor &A = t.value(ai);
                        const Tensor &B = t.value(bi);
                        Tensor &ga = t.grad(ai);
                        for (int i = 0; i < g.size(); ++i) {
                          ga.data[i] += g.data[i] * B.data[i];
                        }
                        Tensor &gb = t.grad(bi);
                        for (int i = 0; i < g.size(); ++i) {
                          gb.data[i] += g.data[i] * A.data[i];
                        }
                      });
}

Var OneMinus(Var a) {
  Tensor out = a.value();
  for (double &v : out.data) v = 1.0 - v;
  const int ai = a.id;
  return a.tape->Push("one_minus", std::move(out), {ai},
                      [ai](Tape &t, int self) {
                        const Tensor &g = t.grad(self);
                        Tensor &ga = t.grad(ai);
                        for (int i = 0; i < g.size(); ++i) ga.data[i] -= g.data[i];
                      });
}

Var Scale(Var a, double factor) {
  Tensor out = a.value();
  for (double &v : out.data) v *= factor;
  const int ai = a.id;
  return a.tape->Push("scale", std::move(out), {ai},
                      [ai, factor](Tape &t, int self) {
                        const Tensor &g = t.grad(self);
                        Tensor &ga = t.grad(ai);
                        for (int i = 0; i < g.size(); ++i) {
                          ga.data[i] += factor * g.data[i];
                        }
                      });
}

Var Sigmoid(Var a) {
  Tensor out = a.value();
  for (double &v : out.data) v = SigmoidValue(v);
  const int ai = a.id;
  return a.tape->Push("sigmoid", std::move(out), {ai}, [ai](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    const Tensor &y = t.value(self);
    Tensor &ga = t.grad(ai);
    for (int i = 0; i < g.size(); ++i) {
      ga.data[i] += g.data[i] * y.data[i] * (1.0 - y.data[i]);
    }
  });
}

Var Tanh(Var a) {
  Tensor out = a.value();
  for (double &v : out.data) v = std::tanh(v);
  const int ai = a.id;
  return a.tape->Push("tanh", std::move(out), {ai}, [ai](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    const Tensor &y = t.value(self);
    Tensor &ga = t.grad(ai);
    for (int i = 0; i < g.size(); ++i) {
      ga.data[i] += g.data[i] * (1.0 - y.data[i] * y.data[i]);
    }
  });
}

Var Concat(std::span<const Var> parts) {
  if (parts.empty()) throw ValidationError("concat: no inputs");
  Tape &tape = *parts[0].tape;
  std::vector<int> ids;
  std::vector<double> data;
  for (const Var &p : parts) {
    RequireVector("concat", p.value());
    ids.push_back(p.id);
    const auto &d = p.value().data;
    data.insert(data.end(), d.begin(), d.end());
  }
  return tape.Push("concat", Tensor::Vector(std::move(data)), ids,
                   [ids](Tape &t, int self) {
                     const Tensor &g = t.grad(self);
                     int offset = 0;
                     for (int id : ids) {
                       Tensor &gp = t.grad(id);
                       for (int i = 0; i < gp.size(); ++i) {
                         gp.data[i] += g.data[offset + i];
                       }
                       offset += gp.size();
                     }
                   });
}

Var Slice(Var a, int offset, int length) {
  const Tensor &A = a.value();
  RequireVector("slice", A);
  if (offset < 0 || length < 0 || offset + length > A.rows) {
    throw ValidationError("slice: range out of bounds for " + Shape(A));
  }
  std::vector<double> data(A.data.begin() + offset,
                           A.data.begin() + offset + length);
  const int ai = a.id;
  return a.tape->Push("slice", Tensor::Vector(std::move(data)), {ai},
                      [ai, offset](Tape &t, int self) {
                        const Tensor &g = t.grad(self);
                        Tensor &ga = t.grad(ai);
                        for (int i = 0; i < g.size(); ++i) {
                          ga.data[offset + i] += g.data[i];
                        }
                      });
}

Var Sum(Var a) {
  double s = 0.0;
  for (double v : a.value().data) s += v;
  const int ai = a.id;
  return a.tape->Push("sum", Tensor(1, 1, s), {ai}, [ai](Tape &t, int self) {
    const double g = t.grad(self).data[0];
    for (double &v : t.grad(ai).data) v += g;
  });
}

Var Row(Var table, int row) {
  const Tensor &T = table.value();
  if (row < 0 || row >= T.rows) {
    throw ValidationError("row: index " + std::to_string(row) +
                          " out of range for " + Shape(T));
  }
  std::vector<double> data(T.data.begin() + static_cast<size_t>(row) * T.cols,
                           T.data.begin() + static_cast<size_t>(row + 1) * T.cols);
  const int ti = table.id;
  return table.tape->Push(
      "row", Tensor::Vector(std::move(data)), {ti}, [ti, row](Tape &t, int self) {
        const Tensor &g = t.grad(self);
        Tensor &gt = t.grad(ti);
        const size_t base = static_cast<size_t>(row) * gt.cols;
        for (int i = 0; i < g.size(); ++i) gt.data[base + i] += g.data[i];
      });
}

Var Softmax(Var a) {
  const Tensor &A = a.value();
  RequireVector("softmax", A);
  const double mx = *std::max_element(A.data.begin(), A.data.end());
  Tensor out = A;
  double z = 0.0;
  for (double &v : out.data) {
    v = std::exp(v - mx);
    z += v;
  }
  for (double &v : out.data) v /= z;
  const int ai = a.id;
  return a.tape->Push("softmax", std::move(out), {ai}, [ai](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    const Tensor &y = t.value(self);
    double dot = 0.0;
    for (int i = 0; i < g.size(); ++i) dot += g.data[i] * y.data[i];
    Tensor &ga = t.grad(ai);
    for (int i = 0; i < g.size(); ++i) {
      ga.data[i] += y.data[i] * (g.data[i] - dot);
    }
  });
}

Var WeightedBlockSum(Var weights, Var flat) {
  const Tensor &Wt = weights.value();
  const Tensor &F = flat.value();
  RequireVector("weighted_block_sum", Wt);
  RequireVector("weighted_block_sum", F);
  const int blocks = Wt.rows;
  if (blocks == 0 || F.rows % blocks != 0) {
    throw ValidationError("weighted_block_sum: " + Shape(F) +
                          " does not split into " + std::to_string(blocks) +
                          " blocks");
  }
  const int width = F.rows / blocks;
  Tensor out(width, 1);
  for (int k = 0; k < blocks; ++k) {
    for (int j = 0; j < width; ++j) {
      out.data[j] += Wt.data[k] * F.data[static_cast<size_t>(k) * width + j];
    }
  }
  const int wi = weights.id, fi = flat.id;
  return weights.tape->Push(
      "weighted_block_sum", std::move(out), {wi, fi},
      [wi, fi, blocks, width](Tape &t, int self) {
        const Tensor &g = t.grad(self);
        const Tensor &Wt = t.value(wi);
        const Tensor &F = t.value(fi);
        Tensor &gw = t.grad(wi);
        Tensor &gf = t.grad(fi);
        for (int k = 0; k < blocks; ++k) {
          const size_t base = static_cast<size_t>(k) * width;
          double dot = 0.0;
          for (int j = 0; j < width; ++j) {
            dot += g.data[j] * F.data[base + j];
            gf.data[base + j] += Wt.data[k] * g.data[j];
          }
          gw.data[k] += dot;
        }
      });
}

double SoftmaxCrossEntropyValue(std::span<const double> logits, int target) {
  if (target < 0 || target >= static_cast<int>(logits.size())) {
    throw ValidationError("softmax_xent: target " + std::to_string(target) +
                          " out of range");
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double v : logits) z += std::exp(v - mx);
  return -(logits[target] - mx - std::log(z));
}

Var SoftmaxCrossEntropy(Var logits, int target) {
  const Tensor &L = logits.value();
  RequireVector("softmax_xent", L);
  const double loss = SoftmaxCrossEntropyValue(L.data, target);
  const int li = logits.id;
  return logits.tape->Push(
      "softmax_xent", Tensor(1, 1, loss), {li}, [li, target](Tape &t, int self) {
        const double g = t.grad(self).data[0];
        const Tensor &L = t.value(li);
        const double mx = *std::max_element(L.data.begin(), L.data.end());
        double z = 0.0;
        for (double v : L.data) z += std::exp(v - mx);
        Tensor &gl = t.grad(li);
        for (int i = 0; i < L.size(); ++i) {
          const double p = std::exp(L.data[i] - mx) / z;
          gl.data[i] += g * (p - (i == target ? 1.0 : 0.0));
        }
      });
}

namespace {

Var Affine(Var w, Var h, Var u, Var x, Var b) {
  return Add(Add(MatVec(w, h), MatVec(u, x)), b);
}

}  // namespace

LstmState LstmStep(Var x, const LstmState &prev, const LstmParams &p) {
  Var o = Sigmoid(Affine(p.w_o, prev.h, p.u_o, x, p.b_o));
  Var f = Sigmoid(Affine(p.w_f, prev.h, p.u_f, x, p.b_f));
  Var i = Sigmoid(Affine(p.w_i, prev.h, p.u_i, x, p.b_i));
  Var candidate = Tanh(Affine(p.w_c, prev.h, p.u_c, x, p.b_c));
  Var c = Add(Mul(f, prev.c), Mul(i, candidate));
  Var h = Mul(o, Tanh(c));
  return LstmState{h, c};
}

Var GruStep(Var x, Var prev_h, const GruParams &p) {
  Var z = Sigmoid(Affine(p.w_z, x, p.u_z, prev_h, p.b_z));
  Var r = Sigmoid(Affine(p.w_r, x, p.u_r, prev_h, p.b_r));
  Var candidate = Tanh(Affine(p.w_h, x, p.u_h, Mul(r, prev_h), p.b_h));
  return Add(Mul(z, prev_h), Mul(OneMinus(z), candidate));
}

Tensor &ParameterSet::Add(const std::string &name, int rows, int cols) {
  if (index_.count(name)) throw ValidationError("duplicate parameter " + name);
  index_[name] = static_cast<int>(names_.size());
  names_.push_back(name);
  values_.emplace_back(rows, cols);
  grads_.emplace_back(rows, cols);
  return values_.back();
}

Tensor &ParameterSet::Get(const std::string &name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw ValidationError("unknown parameter " + name);
  return values_[it->second];
}

const Tensor &ParameterSet::Get(const std::string &name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ValidationError("unknown parameter " + name);
  return values_[it->second];
}

Tensor &ParameterSet::Grad(const std::string &name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw ValidationError("unknown parameter " + name);
  return grads_[it->second];
}

void ParameterSet::ZeroGrads() {
  for (Tensor &g : grads_) std::fill(g.data.begin(), g.data.end(), 0.0);
}

double ParameterSet::GradNorm() const {
  double s = 0.0;
  for (const Tensor &g : grads_) {
    for (double v : g.data) s += v * v;
  }
  return std::sqrt(s);
}

double ParameterSet::ClipGrads(double max_norm) {
  const double norm = GradNorm();
  if (norm > max_norm && norm > 0.0) {
    const double factor = max_norm / norm;
    for (Tensor &g : grads_) {
      for (double &v : g.data) v *= factor;
    }
  }
  return norm;
}

void ParameterSet::SgdStep(double learning_rate) {
  for (size_t k = 0; k < values_.size(); ++k) {
    auto &v = values_[k].data;
    const auto &g = grads_[k].data;
    for (size_t i = 0; i < v.size(); ++i) v[i] -= learning_rate * g[i];
  }
}

std::string FormatDouble(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void ParameterSet::WriteBlocks(std::ostream &out) const {
  for (size_t k = 0; k < names_.size(); ++k) {
    const Tensor &t = values_[k];
    out << names_[k] << ' ' << t.rows << ' ' << t.cols << '\n';
    for (int r = 0; r < t.rows; ++r) {
      for (int c = 0; c < t.cols; ++c) {
        if (c) out << ' ';
        out << FormatDouble(t.at(r, c));
      }
      out << '\n';
    }
  }
}

void ParameterSet::ReadBlock(std::istream &in, const std::string &header,
                             std::string *name, Tensor *value) {
  std::istringstream hs(header);
  int rows = -1, cols = -1;
  if (!(hs >> *name >> rows >> cols) || rows < 0 || cols < 0) {
    throw ValidationError("bad parameter header '" + header + "'");
  }
  *value = Tensor(rows, cols);
  for (int r = 0; r < rows; ++r) {
    std::string line;
    if (!std::getline(in, line)) {
      throw ValidationError("truncated parameter " + *name);
    }
    std::istringstream ls(line);
    for (int c = 0; c < cols; ++c) {
      std::string field;
      if (!(ls >> field)) {
        throw ValidationError("short row in parameter " + *name);
      }
      double v;
      auto [ptr, ec] =
          std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size() ||
          !std::isfinite(v)) {
        throw ValidationError("bad value '" + field + "' in parameter " + *name);
      }
      value->at(r, c) = v;
    }
  }
}

}  // namespace cure
