#pragma once

#include <vector>

#include "cbert/nn.hpp"

namespace cbert {

struct AdamConfig {
  double learning_rate = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First/second-moment state for one parameter set, addressed by ParamView
// name. step() applies the bias-corrected update
//   m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g^2
//   theta -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
class AdamState {
 public:
  AdamState() = default;
  explicit AdamState(const std::vector<ParamView>& params);

  void step(const std::vector<ParamView>& params, const std::vector<ParamView>& grads,
            const AdamConfig& cfg);
  long step_count() const { return t_; }

 private:
  std::vector<std::string> names_;
  std::vector<Vector> m_, v_;
  long t_ = 0;
};

}  // namespace cbert
