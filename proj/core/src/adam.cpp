#include "dcrnet/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dcrnet {

AdamState AdamState::init(const std::vector<Tensor>& params) {
  AdamState state;
  state.m.reserve(params.size());
  state.v.reserve(params.size());
  for (const Tensor& p : params) {
    state.m.push_back(Tensor::zeros(p.rows(), p.cols()));
    state.v.push_back(Tensor::zeros(p.rows(), p.cols()));
  }
  return state;
}

void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads,
               AdamState& state, const AdamConfig& config) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw std::invalid_argument(
        "adam_step: parameter/gradient/state counts disagree (" +
        std::to_string(params.size()) + ", " + std::to_string(grads.size()) +
        ", " + std::to_string(state.m.size()) + ")");
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params[i];
    const Tensor& g = grads[i];
    if (g.rows() != p.rows() || g.cols() != p.cols()) {
      throw std::invalid_argument("adam_step: gradient shape " +
                                  g.shape_str() + " does not match parameter " +
                                  p.shape_str());
    }
    std::vector<double>& pv = p.values_mut();
    std::vector<double>& mv = state.m[i].values_mut();
    std::vector<double>& vv = state.v[i].values_mut();
    const std::vector<double>& gv = g.values();
    for (std::size_t j = 0; j < pv.size(); ++j) {
      mv[j] = config.beta1 * mv[j] + (1.0 - config.beta1) * gv[j];
      vv[j] = config.beta2 * vv[j] + (1.0 - config.beta2) * gv[j] * gv[j];
      const double m_hat = mv[j] / bc1;
      const double v_hat = vv[j] / bc2;
      pv[j] -= config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
    }
  }
}

}  // namespace dcrnet
