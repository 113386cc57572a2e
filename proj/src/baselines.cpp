#include "expectigrad/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace expectigrad {

const char* baseline_name(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::SGD: return "sgd";
    case BaselineKind::SGDMomentum: return "sgd-momentum";
    case BaselineKind::AdaGrad: return "adagrad";
    case BaselineKind::RMSProp: return "rmsprop";
    case BaselineKind::AdaDelta: return "adadelta";
    case BaselineKind::Adam: return "adam";
    case BaselineKind::AMSGrad: return "amsgrad";
    case BaselineKind::Yogi: return "yogi";
  }
  return "?";
}

void BaselineHyperParams::validate(BaselineKind kind) const {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("alpha must be positive and finite");
  switch (kind) {
    case BaselineKind::SGD:
      break;
    case BaselineKind::SGDMomentum:
      if (!(mu >= 0.0 && mu < 1.0)) throw std::invalid_argument("mu must lie in [0, 1)");
      break;
    case BaselineKind::AdaGrad:
    case BaselineKind::RMSProp:
      if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
      if (kind == BaselineKind::RMSProp && !(beta2 >= 0.0 && beta2 < 1.0))
        throw std::invalid_argument("beta2 must lie in [0, 1)");
      break;
    case BaselineKind::AdaDelta:
      if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in [0, 1)");
      if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
      break;
    case BaselineKind::Adam:
    case BaselineKind::AMSGrad:
    case BaselineKind::Yogi:
      if (!(beta1 >= 0.0 && beta1 < 1.0))
        throw std::invalid_argument("beta1 must lie in [0, 1)");
      if (!(beta2 >= 0.0 && beta2 < 1.0))
        throw std::invalid_argument("beta2 must lie in [0, 1)");
      if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
      break;
  }
}

BaselineHyperParams baseline_defaults(BaselineKind kind) {
  BaselineHyperParams hp;  // alpha 1e-3, beta1 0.9, beta2 0.999, eps 1e-8, rho 0.95, mu 0.9
  switch (kind) {
    case BaselineKind::RMSProp:
      hp.beta2 = 0.9;  // the customary decay for the squared-gradient average
      break;
    case BaselineKind::AdaDelta:
      hp.alpha = 1.0;  // the original update has no learning rate
      hp.epsilon = 1e-6;
      break;
    case BaselineKind::Yogi:
      hp.alpha = 1e-2;
      hp.epsilon = 1e-3;
      break;
    default:
      break;
  }
  return hp;
}

std::size_t BaselineState::dim() const {
  return std::max(first_moment.size(), second_moment.size());
}

BaselineState baseline_init(BaselineKind kind, std::size_t dim,
                            const BaselineHyperParams& hp) {
  hp.validate(kind);
  BaselineState st;
  st.kind = kind;
  switch (kind) {
    case BaselineKind::SGD:
      st.first_moment.assign(dim, 0.0);  // unused but sizes the state
      break;
    case BaselineKind::SGDMomentum:
      st.first_moment.assign(dim, 0.0);
      break;
    case BaselineKind::AdaGrad:
    case BaselineKind::RMSProp:
      st.second_moment.assign(dim, 0.0);
      break;
    case BaselineKind::AdaDelta:
      st.second_moment.assign(dim, 0.0);
      st.accum_delta.assign(dim, 0.0);
      break;
    case BaselineKind::Adam:
      st.first_moment.assign(dim, 0.0);
      st.second_moment.assign(dim, 0.0);
      break;
    case BaselineKind::AMSGrad:
      st.first_moment.assign(dim, 0.0);
      st.second_moment.assign(dim, 0.0);
      st.max_second_moment.assign(dim, 0.0);
      break;
    case BaselineKind::Yogi:
      st.first_moment.assign(dim, 0.0);
      st.second_moment.assign(dim, 0.0);
      break;
  }
  return st;
}

static double sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Update rules, written next to their implementations:
//   SGD           delta = -alpha * g
//   SGD-momentum  b = mu*b + g;                        delta = -alpha * b
//   AdaGrad       r += g^2;                            delta = -alpha * g / (eps + sqrt(r))
//   RMSProp       v = d*v + (1-d)*g^2  (d = beta2);    delta = -alpha * g / (eps + sqrt(v))
//   ADADELTA      v = rho*v + (1-rho)*g^2
//                 raw = -sqrt((u+eps)/(v+eps)) * g;  u = rho*u + (1-rho)*raw^2
//                 delta = alpha * raw    (alpha multiplies the parameter-free update;
//                                         u tracks the unscaled raw step)
//   Adam          m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g^2
//                 mhat = m/(1-b1^t);    vhat = v/(1-b2^t)
//                 delta = -alpha * mhat / (sqrt(vhat) + eps)
//   AMSGrad       as Adam, plus vmax = max(vmax, vhat) taken over the
//                 bias-corrected vhat; delta = -alpha * mhat / (sqrt(vmax) + eps).
//                 Correcting before the max means an early large gradient pins
//                 the denominator at its full (uncorrected-by-decay) scale
//                 forever, which is what makes the method provably
//                 non-divergent on adversarial schedules -- and an order of
//                 magnitude slower on them.
//   Yogi          m as Adam;  v = v - (1-b2)*sign(v - g^2)*g^2  (sign(0) = 0)
//                 delta = -alpha * m / (sqrt(v) + eps), no bias correction.
void baseline_step_inplace(BaselineState& st, std::span<const double> g,
                           const BaselineHyperParams& hp, std::span<double> delta) {
  hp.validate(st.kind);
  const std::size_t n = st.dim();
  if (g.size() != n)
    throw std::invalid_argument("gradient length " + std::to_string(g.size()) +
                                " does not match state dimension " + std::to_string(n));
  if (delta.size() != n)
    throw std::invalid_argument("delta length does not match state dimension");
  for (double gj : g)
    if (!std::isfinite(gj))
      throw std::invalid_argument("gradient contains a non-finite component");

  st.step += 1;
  st.beta1_pow *= hp.beta1;
  st.beta2_pow *= hp.beta2;

  switch (st.kind) {
    case BaselineKind::SGD:
      for (std::size_t j = 0; j < n; ++j) delta[j] = -(hp.alpha * g[j]);
      break;

    case BaselineKind::SGDMomentum:
      for (std::size_t j = 0; j < n; ++j) {
        st.first_moment[j] = hp.mu * st.first_moment[j] + g[j];
        delta[j] = -(hp.alpha * st.first_moment[j]);
      }
      break;

    case BaselineKind::AdaGrad:
      for (std::size_t j = 0; j < n; ++j) {
        st.second_moment[j] += g[j] * g[j];
        delta[j] = -(hp.alpha * g[j] / (hp.epsilon + std::sqrt(st.second_moment[j])));
      }
      break;

    case BaselineKind::RMSProp:
      for (std::size_t j = 0; j < n; ++j) {
        st.second_moment[j] = hp.beta2 * st.second_moment[j] + (1.0 - hp.beta2) * g[j] * g[j];
        delta[j] = -(hp.alpha * g[j] / (hp.epsilon + std::sqrt(st.second_moment[j])));
      }
      break;

    case BaselineKind::AdaDelta:
      for (std::size_t j = 0; j < n; ++j) {
        st.second_moment[j] = hp.rho * st.second_moment[j] + (1.0 - hp.rho) * g[j] * g[j];
        const double raw = -std::sqrt((st.accum_delta[j] + hp.epsilon) /
                                      (st.second_moment[j] + hp.epsilon)) * g[j];
        st.accum_delta[j] = hp.rho * st.accum_delta[j] + (1.0 - hp.rho) * raw * raw;
        delta[j] = hp.alpha * raw;
      }
      break;

    case BaselineKind::Adam:
      for (std::size_t j = 0; j < n; ++j) {
        st.first_moment[j] = hp.beta1 * st.first_moment[j] + (1.0 - hp.beta1) * g[j];
        st.second_moment[j] =
            hp.beta2 * st.second_moment[j] + (1.0 - hp.beta2) * g[j] * g[j];
        const double mhat = st.first_moment[j] / (1.0 - st.beta1_pow);
        const double vhat = st.second_moment[j] / (1.0 - st.beta2_pow);
        delta[j] = -(hp.alpha * mhat / (std::sqrt(vhat) + hp.epsilon));
      }
      break;

    case BaselineKind::AMSGrad:
      for (std::size_t j = 0; j < n; ++j) {
        st.first_moment[j] = hp.beta1 * st.first_moment[j] + (1.0 - hp.beta1) * g[j];
        st.second_moment[j] =
            hp.beta2 * st.second_moment[j] + (1.0 - hp.beta2) * g[j] * g[j];
        const double mhat = st.first_moment[j] / (1.0 - st.beta1_pow);
        const double vhat = st.second_moment[j] / (1.0 - st.beta2_pow);
        st.max_second_moment[j] = std::max(st.max_second_moment[j], vhat);
        delta[j] = -(hp.alpha * mhat / (std::sqrt(st.max_second_moment[j]) + hp.epsilon));
      }
      break;

    case BaselineKind::Yogi:
      for (std::size_t j = 0; j < n; ++j) {
        const double gsq = g[j] * g[j];
        st.first_moment[j] = hp.beta1 * st.first_moment[j] + (1.0 - hp.beta1) * g[j];
        st.second_moment[j] -= (1.0 - hp.beta2) * sign_of(st.second_moment[j] - gsq) * gsq;
        delta[j] = -(hp.alpha * st.first_moment[j] /
                     (std::sqrt(st.second_moment[j]) + hp.epsilon));
      }
      break;
  }
}

BaselineStepResult baseline_step(const BaselineState& state, std::span<const double> g,
                                 const BaselineHyperParams& hp) {
  BaselineStepResult result{std::vector<double>(state.dim()), state};
  baseline_step_inplace(result.state, g, hp, result.delta);
  return result;
}

}  // namespace expectigrad
