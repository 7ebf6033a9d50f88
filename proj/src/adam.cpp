#include "cbert/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace cbert {

AdamState::AdamState(const std::vector<ParamView>& params) {
  names_.reserve(params.size());
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const auto& p : params) {
    names_.push_back(p.name);
    m_.push_back(Vector::Zero(p.size()));
    v_.push_back(Vector::Zero(p.size()));
  }
}

void AdamState::step(const std::vector<ParamView>& params,
                     const std::vector<ParamView>& grads, const AdamConfig& cfg) {
  if (params.size() != names_.size() || grads.size() != names_.size())
    throw std::invalid_argument("adam step: parameter set does not match optimizer state");
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < names_.size(); ++i) {
    const auto& p = params[i];
    const auto& g = grads[i];
    if (p.name != names_[i] || p.size() != m_[i].size() || g.size() != p.size())
      throw std::invalid_argument("adam step: tensor '" + p.name +
                                  "' does not match optimizer state");
    Vector& m = m_[i];
    Vector& v = v_[i];
    for (Eigen::Index j = 0; j < p.size(); ++j) {
      const double gj = g.data[j];
      m(j) = cfg.beta1 * m(j) + (1.0 - cfg.beta1) * gj;
      v(j) = cfg.beta2 * v(j) + (1.0 - cfg.beta2) * gj * gj;
      const double mhat = m(j) / bc1;
      const double vhat = v(j) / bc2;
      p.data[j] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
    }
  }
}

}  // namespace cbert
