#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpfold/encoding.hpp"
#include "hpfold/rng.hpp"
#include "hpfold/types.hpp"

namespace hpfold {

enum class Arch { Lstm2x256 = 0, Lstm3x512 = 1, FcnControl = 2 };

inline std::string archName(Arch a) {
  switch (a) {
    case Arch::Lstm2x256: return "lstm2x256";
    case Arch::Lstm3x512: return "lstm3x512";
    case Arch::FcnControl: return "fcn";
  }
  return "?";
}

inline Arch archFromName(const std::string& name) {
  if (name == "lstm2x256") return Arch::Lstm2x256;
  if (name == "lstm3x512") return Arch::Lstm3x512;
  if (name == "fcn") return Arch::FcnControl;
  throw std::invalid_argument("unknown architecture '" + name +
                              "' (expected lstm2x256, lstm3x512 or fcn)");
}

// Two stacked 256-unit layers carry sequences up to length 36; the long
// benchmark sequences use three 512-unit layers.
inline Arch defaultArchFor(int n) { return n <= 36 ? Arch::Lstm2x256 : Arch::Lstm3x512; }

inline constexpr int kInputFeatures = 6;
inline constexpr int kNumActions = 3;

// One LSTM layer. The four gates are packed as block rows of w/u/b in the
// order input, forget, cell, output.
template <typename Scalar>
struct LstmLayer {
  Mat<Scalar> w;  // 4H x in
  Mat<Scalar> u;  // 4H x H
  Mat<Scalar> b;  // 4H x 1

  Eigen::Index hidden() const { return u.cols(); }
  Eigen::Index inputSize() const { return w.cols(); }

  auto wInput() const { return w.topRows(hidden()); }
  auto wForget() const { return w.middleRows(hidden(), hidden()); }
  auto wCell() const { return w.middleRows(2 * hidden(), hidden()); }
  auto wOutput() const { return w.bottomRows(hidden()); }
  auto uInput() const { return u.topRows(hidden()); }
  auto uForget() const { return u.middleRows(hidden(), hidden()); }
  auto uCell() const { return u.middleRows(2 * hidden(), hidden()); }
  auto uOutput() const { return u.bottomRows(hidden()); }
  auto biasForget() { return b.block(hidden(), 0, hidden(), 1); }
};

template <typename Scalar>
struct DenseLayer {
  Mat<Scalar> w;
  Mat<Scalar> b;  // column
};

// Trainable parameters of 4h(in + h + 1) per layer plus the 3-way head.
inline std::int64_t lstmParamCount(int hidden, int layers) {
  std::int64_t total = 0;
  std::int64_t in = kInputFeatures;
  for (int l = 0; l < layers; ++l) {
    total += 4ll * hidden * (in + hidden + 1);
    in = hidden;
  }
  return total + 3ll * hidden + 3;
}

// All learnable parameters of a Q-network. Plain value type: copying gives
// an independent deep clone (target-network syncs are plain assignments).
// The same container shape doubles as the gradient accumulator.
template <typename Scalar>
struct QNetwork {
  Arch arch = Arch::Lstm2x256;
  int n = 0;       // sequence length the network was built for
  int hidden = 0;  // width of the recurrent (or dense) layers
  std::vector<LstmLayer<Scalar>> lstm;
  std::vector<DenseLayer<Scalar>> fcn;
  Mat<Scalar> head_w;  // 3 x hidden
  Mat<Scalar> head_b;  // 3 x 1

  bool recurrent() const { return arch != Arch::FcnControl; }

  template <typename Fn>
  void forEachTensor(Fn&& fn) {
    for (auto& layer : lstm) {
      fn(layer.w);
      fn(layer.u);
      fn(layer.b);
    }
    for (auto& layer : fcn) {
      fn(layer.w);
      fn(layer.b);
    }
    fn(head_w);
    fn(head_b);
  }

  template <typename Fn>
  void forEachTensor(Fn&& fn) const {
    for (const auto& layer : lstm) {
      fn(layer.w);
      fn(layer.u);
      fn(layer.b);
    }
    for (const auto& layer : fcn) {
      fn(layer.w);
      fn(layer.b);
    }
    fn(head_w);
    fn(head_b);
  }

  std::int64_t parameterCount() const {
    std::int64_t total = 0;
    forEachTensor([&](const Mat<Scalar>& t) { total += t.size(); });
    return total;
  }

  void setZero() {
    forEachTensor([](Mat<Scalar>& t) { t.setZero(); });
  }

  // Zeroed same-shape copy, for gradients and optimizer moments.
  QNetwork zeroLike() const {
    QNetwork z = *this;
    z.setZero();
    return z;
  }

  std::vector<Mat<Scalar>*> tensors() {
    std::vector<Mat<Scalar>*> out;
    forEachTensor([&](Mat<Scalar>& t) { out.push_back(&t); });
    return out;
  }

  std::vector<const Mat<Scalar>*> tensors() const {
    std::vector<const Mat<Scalar>*> out;
    forEachTensor([&](const Mat<Scalar>& t) { out.push_back(&t); });
    return out;
  }

  void accumulate(const QNetwork& other) {
    auto mine = tensors();
    auto theirs = other.tensors();
    for (std::size_t i = 0; i < mine.size(); ++i) *mine[i] += *theirs[i];
  }
};

// Deep value copy; mutations of either side never reach the other.
template <typename Scalar>
QNetwork<Scalar> cloneParams(const QNetwork<Scalar>& src) {
  return src;
}

// Width of the fully connected control so its parameter count lands next to
// the recurrent architecture it stands in for.
inline int fcnHiddenFor(int n, int layers, std::int64_t target_params) {
  const double a = static_cast<double>(layers - 1);
  const double beta = 6.0 * n + 4.0 + a;
  const double root =
      (-beta + std::sqrt(beta * beta + 4.0 * a * (static_cast<double>(target_params) - 3.0))) /
      (2.0 * a);
  auto countFor = [&](std::int64_t h) {
    return static_cast<std::int64_t>(a) * h * h + static_cast<std::int64_t>(beta) * h + 3;
  };
  const std::int64_t lo = static_cast<std::int64_t>(std::floor(root));
  const std::int64_t hi = lo + 1;
  return static_cast<int>(std::abs(countFor(lo) - target_params) <=
                                  std::abs(countFor(hi) - target_params)
                              ? lo
                              : hi);
}

namespace detail {

template <typename Scalar>
void fillUniform(Mat<Scalar>& m, double bound, Rng& rng) {
  Scalar* data = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    data[i] = static_cast<Scalar>((uniformReal01(rng) * 2.0 - 1.0) * bound);
  }
}

template <typename Scalar>
void buildInputColumns(std::span<const EncodedState* const> xs, int t, Mat<Scalar>& out) {
  out.setZero();
  for (int j = 0; j < static_cast<int>(xs.size()); ++j) {
    const EncodedState& s = *xs[static_cast<std::size_t>(j)];
    out(s.movement[static_cast<std::size_t>(t)], j) = Scalar(1);
    out(4 + s.monomer[static_cast<std::size_t>(t)], j) = Scalar(1);
  }
}

template <typename Scalar>
void buildFlatInput(std::span<const EncodedState* const> xs, Mat<Scalar>& out) {
  out.setZero();
  for (int j = 0; j < static_cast<int>(xs.size()); ++j) {
    const EncodedState& s = *xs[static_cast<std::size_t>(j)];
    for (int t = 0; t < s.rows(); ++t) {
      out(6 * t + s.movement[static_cast<std::size_t>(t)], j) = Scalar(1);
      out(6 * t + 4 + s.monomer[static_cast<std::size_t>(t)], j) = Scalar(1);
    }
  }
}

}  // namespace detail

// Builds and initializes a network: weights uniform on +-1/sqrt(fan-in of
// the recurrent layer), biases zero except the forget gate at 1. The FCN
// control widens its layers until its parameter count matches the recurrent
// architecture it is paired with.
template <typename Scalar>
QNetwork<Scalar> makeNetwork(Arch arch, int n, Rng& weight_init) {
  if (n < 3) throw std::invalid_argument("makeNetwork: sequence length must be >= 3");
  QNetwork<Scalar> net;
  net.arch = arch;
  net.n = n;

  if (arch == Arch::FcnControl) {
    const int layers = defaultArchFor(n) == Arch::Lstm2x256 ? 2 : 3;
    const int paired_hidden = defaultArchFor(n) == Arch::Lstm2x256 ? 256 : 512;
    const int h = fcnHiddenFor(n, layers, lstmParamCount(paired_hidden, layers));
    net.hidden = h;
    int in = kInputFeatures * n;
    for (int l = 0; l < layers; ++l) {
      DenseLayer<Scalar> layer;
      layer.w.resize(h, in);
      detail::fillUniform(layer.w, 1.0 / std::sqrt(static_cast<double>(in)), weight_init);
      layer.b = Mat<Scalar>::Zero(h, 1);
      net.fcn.push_back(std::move(layer));
      in = h;
    }
  } else {
    const int h = arch == Arch::Lstm2x256 ? 256 : 512;
    const int layers = arch == Arch::Lstm2x256 ? 2 : 3;
    net.hidden = h;
    const double bound = 1.0 / std::sqrt(static_cast<double>(h));
    int in = kInputFeatures;
    for (int l = 0; l < layers; ++l) {
      LstmLayer<Scalar> layer;
      layer.w.resize(4 * h, in);
      detail::fillUniform(layer.w, bound, weight_init);
      layer.u.resize(4 * h, h);
      detail::fillUniform(layer.u, bound, weight_init);
      layer.b = Mat<Scalar>::Zero(4 * h, 1);
      layer.biasForget().setOnes();
      net.lstm.push_back(std::move(layer));
      in = h;
    }
  }

  net.head_w.resize(kNumActions, net.hidden);
  detail::fillUniform(net.head_w, 1.0 / std::sqrt(static_cast<double>(net.hidden)), weight_init);
  net.head_b = Mat<Scalar>::Zero(kNumActions, 1);
  return net;
}

// Activations recorded by a batched forward pass, consumed by the backward
// pass. Reused across calls so the big matrices are allocated only once.
template <typename Scalar>
struct ForwardTrace {
  int batch = 0;
  std::vector<Mat<Scalar>> input;                   // [t]: 6 x B, layer-0 inputs
  std::vector<std::vector<Mat<Scalar>>> gates;      // [layer][t]: 4H x B, post-activation
  std::vector<std::vector<Mat<Scalar>>> cell;       // [layer][t]: H x B
  std::vector<std::vector<Mat<Scalar>>> cell_tanh;  // [layer][t]: H x B
  std::vector<std::vector<Mat<Scalar>>> hidden;     // [layer][t]: H x B
  Mat<Scalar> flat_input;                           // 6N x B (fcn)
  std::vector<Mat<Scalar>> fcn_act;                 // [layer]: H x B, post-relu
  // backward scratch
  std::vector<Mat<Scalar>> d_incoming, d_outgoing;  // [t]: H x B
};

// Batched forward pass: Q-values for a set of states as a 3 x B matrix,
// row order L, F, R. The trace is filled for backwardBatch.
template <typename Scalar>
void forwardBatch(const QNetwork<Scalar>& net, std::span<const EncodedState* const> xs,
                  ForwardTrace<Scalar>& trace, Mat<Scalar>& q_out) {
  const int batch = static_cast<int>(xs.size());
  if (batch == 0) throw std::invalid_argument("forwardBatch: empty batch");
  for (const EncodedState* x : xs) {
    if (x->rows() != net.n) {
      throw std::invalid_argument("forwardBatch: state has " + std::to_string(x->rows()) +
                                  " rows, network expects " + std::to_string(net.n));
    }
  }
  trace.batch = batch;

  if (!net.recurrent()) {
    trace.flat_input.resize(kInputFeatures * net.n, batch);
    detail::buildFlatInput(xs, trace.flat_input);
    trace.fcn_act.resize(net.fcn.size());
    const Mat<Scalar>* below = &trace.flat_input;
    for (std::size_t l = 0; l < net.fcn.size(); ++l) {
      Mat<Scalar>& act = trace.fcn_act[l];
      act.resize(net.fcn[l].w.rows(), batch);
      act.noalias() = net.fcn[l].w * (*below);
      act.colwise() += net.fcn[l].b.col(0);
      act = act.cwiseMax(Scalar(0));
      below = &act;
    }
    q_out.resize(kNumActions, batch);
    q_out.noalias() = net.head_w * (*below);
    q_out.colwise() += net.head_b.col(0);
    return;
  }

  const std::size_t layers = net.lstm.size();
  const std::size_t n = static_cast<std::size_t>(net.n);
  trace.input.resize(n);
  trace.gates.resize(layers);
  trace.cell.resize(layers);
  trace.cell_tanh.resize(layers);
  trace.hidden.resize(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    trace.gates[l].resize(n);
    trace.cell[l].resize(n);
    trace.cell_tanh[l].resize(n);
    trace.hidden[l].resize(n);
  }

  for (std::size_t t = 0; t < n; ++t) {
    trace.input[t].resize(kInputFeatures, batch);
    detail::buildInputColumns(xs, static_cast<int>(t), trace.input[t]);
    const Mat<Scalar>* x_t = &trace.input[t];
    for (std::size_t l = 0; l < layers; ++l) {
      const LstmLayer<Scalar>& layer = net.lstm[l];
      const Eigen::Index h = layer.hidden();
      Mat<Scalar>& gates = trace.gates[l][t];
      gates.resize(4 * h, batch);
      gates.noalias() = layer.w * (*x_t);
      if (t > 0) gates.noalias() += layer.u * trace.hidden[l][t - 1];
      gates.colwise() += layer.b.col(0);

      auto gi = gates.topRows(h);
      auto gf = gates.middleRows(h, h);
      auto gg = gates.middleRows(2 * h, h);
      auto go = gates.bottomRows(h);
      gi.array() = ((gi.array() * Scalar(0.5)).tanh() + Scalar(1)) * Scalar(0.5);
      gf.array() = ((gf.array() * Scalar(0.5)).tanh() + Scalar(1)) * Scalar(0.5);
      gg.array() = gg.array().tanh();
      go.array() = ((go.array() * Scalar(0.5)).tanh() + Scalar(1)) * Scalar(0.5);

      Mat<Scalar>& c = trace.cell[l][t];
      c.resize(h, batch);
      if (t > 0) {
        c.array() = gf.array() * trace.cell[l][t - 1].array() + gi.array() * gg.array();
      } else {
        c.array() = gi.array() * gg.array();
      }
      Mat<Scalar>& ct = trace.cell_tanh[l][t];
      ct.resize(h, batch);
      ct.array() = c.array().tanh();
      Mat<Scalar>& hid = trace.hidden[l][t];
      hid.resize(h, batch);
      hid.array() = go.array() * ct.array();
      x_t = &hid;
    }
  }

  q_out.resize(kNumActions, batch);
  q_out.noalias() = net.head_w * trace.hidden[layers - 1][n - 1];
  q_out.colwise() += net.head_b.col(0);
}

// Rolling buffers for a batched forward pass that keeps no history (target
// network evaluation: values only, never differentiated).
template <typename Scalar>
struct BatchRolling {
  std::vector<Mat<Scalar>> h, c;
  Mat<Scalar> gates, x;
};

template <typename Scalar>
void forwardBatchNoTrace(const QNetwork<Scalar>& net, std::span<const EncodedState* const> xs,
                         BatchRolling<Scalar>& work, Mat<Scalar>& q_out) {
  const int batch = static_cast<int>(xs.size());
  if (batch == 0) throw std::invalid_argument("forwardBatchNoTrace: empty batch");
  for (const EncodedState* x : xs) {
    if (x->rows() != net.n) {
      throw std::invalid_argument("forwardBatchNoTrace: state has " + std::to_string(x->rows()) +
                                  " rows, network expects " + std::to_string(net.n));
    }
  }
  if (!net.recurrent()) {
    ForwardTrace<Scalar> trace;  // dense control is cheap; reuse the traced path
    forwardBatch(net, xs, trace, q_out);
    return;
  }

  const std::size_t layers = net.lstm.size();
  work.h.resize(layers);
  work.c.resize(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    work.h[l].setZero(net.lstm[l].hidden(), batch);
    work.c[l].setZero(net.lstm[l].hidden(), batch);
  }
  work.x.resize(kInputFeatures, batch);

  for (int t = 0; t < net.n; ++t) {
    detail::buildInputColumns(xs, t, work.x);
    const Mat<Scalar>* x_t = &work.x;
    for (std::size_t l = 0; l < layers; ++l) {
      const LstmLayer<Scalar>& layer = net.lstm[l];
      const Eigen::Index h = layer.hidden();
      work.gates.resize(4 * h, batch);
      work.gates.noalias() = layer.w * (*x_t);
      if (t > 0) work.gates.noalias() += layer.u * work.h[l];
      work.gates.colwise() += layer.b.col(0);
      auto gi = work.gates.topRows(h);
      auto gf = work.gates.middleRows(h, h);
      auto gg = work.gates.middleRows(2 * h, h);
      auto go = work.gates.bottomRows(h);
      gi.array() = ((gi.array() * Scalar(0.5)).tanh() + Scalar(1)) * Scalar(0.5);
      gf.array() = ((gf.array() * Scalar(0.5)).tanh() + Scalar(1)) * Scalar(0.5);
      gg.array() = gg.array().tanh();
      go.array() = ((go.array() * Scalar(0.5)).tanh() + Scalar(1)) * Scalar(0.5);
      if (t > 0) {
        work.c[l].array() = gf.array() * work.c[l].array() + gi.array() * gg.array();
      } else {
        work.c[l].array() = gi.array() * gg.array();
      }
      work.h[l].array() = go.array() * work.c[l].array().tanh();
      x_t = &work.h[l];
    }
  }
  q_out.resize(kNumActions, batch);
  q_out.noalias() = net.head_w * work.h[layers - 1];
  q_out.colwise() += net.head_b.col(0);
}

// Single-state Q-values. Keeps only the rolling recurrent state; written as
// an independent route from the batched pass so the two can cross-check.
template <typename Scalar>
Vec3<Scalar> forward(const QNetwork<Scalar>& net, const EncodedState& x) {
  if (x.rows() != net.n) {
    throw std::invalid_argument("forward: state has " + std::to_string(x.rows()) +
                                " rows, network expects " + std::to_string(net.n));
  }
  if (!net.recurrent()) {
    const EncodedState* ptr = &x;
    Mat<Scalar> act(kInputFeatures * net.n, 1);
    detail::buildFlatInput(std::span<const EncodedState* const>(&ptr, 1), act);
    for (const DenseLayer<Scalar>& layer : net.fcn) {
      act = ((layer.w * act + layer.b).cwiseMax(Scalar(0))).eval();
    }
    return net.head_w * act.col(0) + net.head_b.col(0);
  }

  const std::size_t layers = net.lstm.size();
  std::vector<Vec<Scalar>> h(layers), c(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    h[l] = Vec<Scalar>::Zero(net.lstm[l].hidden());
    c[l] = Vec<Scalar>::Zero(net.lstm[l].hidden());
  }
  Vec<Scalar> input(kInputFeatures);
  std::vector<Vec<Scalar>> gates(layers);
  for (std::size_t l = 0; l < layers; ++l) gates[l].resize(4 * net.lstm[l].hidden());

  for (int t = 0; t < net.n; ++t) {
    input.setZero();
    input(x.movement[static_cast<std::size_t>(t)]) = Scalar(1);
    input(4 + x.monomer[static_cast<std::size_t>(t)]) = Scalar(1);
    const Vec<Scalar>* x_t = &input;
    for (std::size_t l = 0; l < layers; ++l) {
      const LstmLayer<Scalar>& layer = net.lstm[l];
      const Eigen::Index hd = layer.hidden();
      Vec<Scalar>& z = gates[l];
      z.noalias() = layer.w * (*x_t);
      if (t > 0) z.noalias() += layer.u * h[l];
      z += layer.b.col(0);
      auto gi = z.head(hd);
      auto gf = z.segment(hd, hd);
      auto gg = z.segment(2 * hd, hd);
      auto go = z.tail(hd);
      gi.array() = ((gi.array() * Scalar(0.5)).tanh() + Scalar(1)) * Scalar(0.5);
      gf.array() = ((gf.array() * Scalar(0.5)).tanh() + Scalar(1)) * Scalar(0.5);
      gg.array() = gg.array().tanh();
      go.array() = ((go.array() * Scalar(0.5)).tanh() + Scalar(1)) * Scalar(0.5);
      if (t > 0) {
        c[l].array() = gf.array() * c[l].array() + gi.array() * gg.array();
      } else {
        c[l].array() = gi.array() * gg.array();
      }
      h[l].array() = go.array() * c[l].array().tanh();
      x_t = &h[l];
    }
  }
  return net.head_w * h[layers - 1] + net.head_b.col(0);
}

// Gradients of <upstream, Q> w.r.t. every parameter, accumulated into
// `grads` (not zeroed here), via backpropagation through time over all
// steps and layers. Requires the trace of a matching forwardBatch.
template <typename Scalar>
void backwardBatch(const QNetwork<Scalar>& net, const ForwardTrace<Scalar>& trace,
                   const Mat<Scalar>& upstream, QNetwork<Scalar>& grads,
                   ForwardTrace<Scalar>& scratch) {
  const int batch = trace.batch;
  if (upstream.rows() != kNumActions || upstream.cols() != batch) {
    throw std::invalid_argument("backwardBatch: upstream must be 3 x batch");
  }

  if (!net.recurrent()) {
    const Mat<Scalar>& top = trace.fcn_act.empty() ? trace.flat_input : trace.fcn_act.back();
    grads.head_w.noalias() += upstream * top.transpose();
    grads.head_b.col(0).noalias() += upstream.rowwise().sum();
    Mat<Scalar> d = net.head_w.transpose() * upstream;
    for (int l = static_cast<int>(net.fcn.size()) - 1; l >= 0; --l) {
      const std::size_t lu = static_cast<std::size_t>(l);
      const Mat<Scalar>& act = trace.fcn_act[lu];
      d.array() *= (act.array() > Scalar(0)).template cast<Scalar>();
      const Mat<Scalar>& below = l == 0 ? trace.flat_input : trace.fcn_act[lu - 1];
      grads.fcn[lu].w.noalias() += d * below.transpose();
      grads.fcn[lu].b.col(0).noalias() += d.rowwise().sum();
      if (l > 0) d = (net.fcn[lu].w.transpose() * d).eval();
    }
    return;
  }

  const std::size_t layers = net.lstm.size();
  const std::size_t n = static_cast<std::size_t>(net.n);

  grads.head_w.noalias() += upstream * trace.hidden[layers - 1][n - 1].transpose();
  grads.head_b.col(0).noalias() += upstream.rowwise().sum();

  // d_incoming[t]: gradient flowing into this layer's hidden output at step
  // t from everything above it.
  auto& incoming = scratch.d_incoming;
  auto& outgoing = scratch.d_outgoing;
  incoming.resize(n);
  outgoing.resize(n);
  for (std::size_t t = 0; t < n; ++t) incoming[t].setZero(net.hidden, batch);
  incoming[n - 1].noalias() = net.head_w.transpose() * upstream;

  Mat<Scalar> dh, dc, dz;
  for (int l = static_cast<int>(layers) - 1; l >= 0; --l) {
    const std::size_t lu = static_cast<std::size_t>(l);
    const LstmLayer<Scalar>& layer = net.lstm[lu];
    LstmLayer<Scalar>& g = grads.lstm[lu];
    const Eigen::Index h = layer.hidden();

    dh.setZero(h, batch);
    dc.setZero(h, batch);
    dz.resize(4 * h, batch);
    for (int t = static_cast<int>(n) - 1; t >= 0; --t) {
      const std::size_t tu = static_cast<std::size_t>(t);
      const Mat<Scalar>& gates = trace.gates[lu][tu];
      const auto gi = gates.topRows(h);
      const auto gf = gates.middleRows(h, h);
      const auto gg = gates.middleRows(2 * h, h);
      const auto go = gates.bottomRows(h);
      const Mat<Scalar>& ct = trace.cell_tanh[lu][tu];

      dh += incoming[tu];
      dc.array() += dh.array() * go.array() * (Scalar(1) - ct.array().square());

      dz.topRows(h).array() = dc.array() * gg.array() * gi.array() * (Scalar(1) - gi.array());
      if (t > 0) {
        dz.middleRows(h, h).array() =
            dc.array() * trace.cell[lu][tu - 1].array() * gf.array() * (Scalar(1) - gf.array());
      } else {
        dz.middleRows(h, h).setZero();
      }
      dz.middleRows(2 * h, h).array() = dc.array() * gi.array() * (Scalar(1) - gg.array().square());
      dz.bottomRows(h).array() = dh.array() * ct.array() * go.array() * (Scalar(1) - go.array());

      const Mat<Scalar>& below = l == 0 ? trace.input[tu] : trace.hidden[lu - 1][tu];
      g.w.noalias() += dz * below.transpose();
      if (t > 0) g.u.noalias() += dz * trace.hidden[lu][tu - 1].transpose();
      g.b.col(0).noalias() += dz.rowwise().sum();

      if (l > 0) {
        Mat<Scalar>& og = outgoing[tu];
        og.resize(layer.inputSize(), batch);
        og.noalias() = layer.w.transpose() * dz;
      }
      dh.noalias() = layer.u.transpose() * dz;
      dc.array() *= gf.array();
    }
    std::swap(incoming, outgoing);
  }
}

// Convenience single-state wrapper: gradients of <upstream, Q(x)>.
template <typename Scalar>
QNetwork<Scalar> backward(const QNetwork<Scalar>& net, const EncodedState& x,
                          const Vec3<Scalar>& upstream) {
  ForwardTrace<Scalar> trace, scratch;
  Mat<Scalar> q;
  const EncodedState* ptr = &x;
  forwardBatch(net, std::span<const EncodedState* const>(&ptr, 1), trace, q);
  QNetwork<Scalar> grads = net.zeroLike();
  Mat<Scalar> up = upstream;
  backwardBatch(net, trace, up, grads, scratch);
  return grads;
}

}  // namespace hpfold
