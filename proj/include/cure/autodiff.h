#ifndef CURE_AUTODIFF_H_
#define CURE_AUTODIFF_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace cure {

// Dense row-major matrix of doubles. Column vectors have cols == 1.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  static Tensor Vector(std::vector<double> values);

  int size() const { return static_cast<int>(data.size()); }
  double &at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const {
    return data[static_cast<size_t>(r) * cols + c];
  }
  double &operator[](int i) { return data[i]; }
  double operator[](int i) const { return data[i]; }

  bool SameShape(const Tensor &o) const {
    return rows == o.rows && cols == o.cols;
  }
  bool operator==(const Tensor &) const = default;
};

// Fills with independent uniform draws from [-range, range].
void FillUniform(Tensor &t, double range, std::mt19937_64 &rng);

class Tape;

// Handle to a node on a Tape.
struct Var {
  Tape *tape = nullptr;
  int id = -1;

  const Tensor &value() const;
  const Tensor &grad() const;
  int rows() const { return value().rows; }
  int size() const { return value().size(); }
};

// Append-only computation graph. Nodes are created by the free functions
// below; creation order is a valid topological order, so Backward walks the
// node list in reverse.
//
// Leaves may carry a gradient sink. Backward clears every node gradient,
// propagates from the loss, and then adds each leaf's gradient into its
// sink. Sinks are never cleared by the tape, so calling Backward twice
// doubles them.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape &, int self)>;

  Tape() = default;
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  Var Leaf(Tensor value, Tensor *grad_sink = nullptr);
  Var Constant(Tensor value);

  // Registers an op result. Throws NumericError if `value` is not finite.
  Var Push(const char *op, Tensor value, std::vector<int> parents,
           BackwardFn backward);

  // `loss` must be 1x1. Throws NumericError naming the node if a gradient
  // turns non-finite.
  void Backward(Var loss);

  const Tensor &value(int id) const { return nodes_[id].value; }
  Tensor &grad(int id) { return nodes_[id].grad; }
  const Tensor &grad(int id) const { return nodes_[id].grad; }
  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Node {
    const char *op;
    Tensor value;
    Tensor grad;
    std::vector<int> parents;
    BackwardFn backward;
    Tensor *sink = nullptr;
  };
  std::vector<Node> nodes_;
};

// W (r x c) times column vector x (c) -> r.
Var MatVec(Var w, Var x);
Var Add(Var a, Var b);
Var Mul(Var a, Var b);  // Hadamard product
Var OneMinus(Var a);    // 1 - a, elementwise
Var Scale(Var a, double factor);
Var Sigmoid(Var a);
Var Tanh(Var a);
Var Concat(std::span<const Var> parts);
Var Slice(Var a, int offset, int length);
Var Sum(Var a);  // -> 1x1
// Row `row` of matrix `table`, as a column vector.
Var Row(Var table, int row);
Var Softmax(Var a);
// `flat` holds weights.size() consecutive blocks; returns sum_k w_k * block_k.
Var WeightedBlockSum(Var weights, Var flat);
// -log softmax(logits)[target], computed with max subtraction.
Var SoftmaxCrossEntropy(Var logits, int target);

// Gate parameters for one LSTM direction: recurrent W*, input U*, bias b*.
struct LstmParams {
  Var w_o, u_o, b_o;
  Var w_f, u_f, b_f;
  Var w_i, u_i, b_i;
  Var w_c, u_c, b_c;
};

struct LstmState {
  Var h;
  Var c;
};

// o, f, i gates = sigmoid(W h_prev + U x + b); candidate = tanh(W_c h_prev +
// U_c x + b_c); c = f*c_prev + i*candidate; h = o*tanh(c).
LstmState LstmStep(Var x, const LstmState &prev, const LstmParams &p);

struct GruParams {
  Var w_z, u_z, b_z;
  Var w_r, u_r, b_r;
  Var w_h, u_h, b_h;
};

// z = sigmoid(W_z x + U_z h + b_z); r = sigmoid(W_r x + U_r h + b_r);
// h' = z*h + (1-z)*tanh(W_h x + U_h (r*h) + b_h).
Var GruStep(Var x, Var prev_h, const GruParams &p);

// Plain value versions of the loss, for callers without a tape.
double SoftmaxCrossEntropyValue(std::span<const double> logits, int target);

// Named tensors in a fixed order, with matching gradient buffers.
class ParameterSet {
 public:
  Tensor &Add(const std::string &name, int rows, int cols);
  Tensor &Get(const std::string &name);
  const Tensor &Get(const std::string &name) const;
  Tensor &Grad(const std::string &name);
  bool Has(const std::string &name) const { return index_.count(name) != 0; }

  const std::vector<std::string> &names() const { return names_; }
  std::vector<Tensor> &values() { return values_; }
  const std::vector<Tensor> &values() const { return values_; }
  std::vector<Tensor> &grads() { return grads_; }

  void ZeroGrads();
  double GradNorm() const;
  // Rescales gradients so their global L2 norm is at most max_norm.
  // Returns the norm before clipping.
  double ClipGrads(double max_norm);
  void SgdStep(double learning_rate);

  // "name rows cols" then one line per row, shortest round-trip decimals.
  void WriteBlocks(std::ostream &out) const;
  // Parses the block whose header line has already been read.
  // Throws ValidationError on malformed input.
  static void ReadBlock(std::istream &in, const std::string &header,
                        std::string *name, Tensor *value);

  bool operator==(const ParameterSet &o) const {
    return names_ == o.names_ && values_ == o.values_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> values_;
  std::vector<Tensor> grads_;
  std::map<std::string, int> index_;
};

// Shortest decimal that reads back to the same double.
std::string FormatDouble(double v);

}  // namespace cure

#endif  // CURE_AUTODIFF_H_
