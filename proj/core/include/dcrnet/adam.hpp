#pragma once

#include <cstdint>
#include <vector>

#include "dcrnet/tensor.hpp"

namespace dcrnet {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment buffers for one parameter set, plus the shared step
// counter. Moments are plain tensors so checkpoints can serialize them.
struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::int64_t step = 0;

  static AdamState init(const std::vector<Tensor>& params);
};

// One update over all parameters. grads[i] pairs with params[i]; both lists
// must line up with the state. Applies bias correction.
void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads,
               AdamState& state, const AdamConfig& config);

}  // namespace dcrnet
