#pragma once

#include <cstdint>
#include <stdexcept>

#include "hpfold/network.hpp"

namespace hpfold {

// Adam optimizer state: first/second-moment accumulators mirroring every
// parameter tensor, plus the step counter and hyper-parameters.
template <typename Scalar>
struct AdamState {
  QNetwork<Scalar> m;
  QNetwork<Scalar> v;
  std::int64_t step = 0;
  double learning_rate = 0.0005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename Scalar>
AdamState<Scalar> makeAdamState(const QNetwork<Scalar>& params, double learning_rate = 0.0005) {
  AdamState<Scalar> st;
  st.m = params.zeroLike();
  st.v = params.zeroLike();
  st.learning_rate = learning_rate;
  return st;
}

// One bias-corrected Adam update in place.
template <typename Scalar>
void adamStep(QNetwork<Scalar>& params, const QNetwork<Scalar>& grads, AdamState<Scalar>& st) {
  auto p = params.tensors();
  auto g = grads.tensors();
  auto m = st.m.tensors();
  auto v = st.v.tensors();
  if (p.size() != g.size()) throw std::invalid_argument("adamStep: parameter/gradient mismatch");

  ++st.step;
  const Scalar b1 = static_cast<Scalar>(st.beta1);
  const Scalar b2 = static_cast<Scalar>(st.beta2);
  const Scalar eps = static_cast<Scalar>(st.epsilon);
  const Scalar corr1 = static_cast<Scalar>(1.0 - std::pow(st.beta1, static_cast<double>(st.step)));
  const Scalar corr2 = static_cast<Scalar>(1.0 - std::pow(st.beta2, static_cast<double>(st.step)));
  const Scalar lr = static_cast<Scalar>(st.learning_rate);

  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i]->rows() != g[i]->rows() || p[i]->cols() != g[i]->cols()) {
      throw std::invalid_argument("adamStep: tensor shape mismatch");
    }
    m[i]->array() = b1 * m[i]->array() + (Scalar(1) - b1) * g[i]->array();
    v[i]->array() = b2 * v[i]->array() + (Scalar(1) - b2) * g[i]->array().square();
    p[i]->array() -=
        lr * (m[i]->array() / corr1) / ((v[i]->array() / corr2).sqrt() + eps);
  }
}

}  // namespace hpfold
