#include "expectigrad/optimizer.hpp"

#include <stdexcept>

namespace expectigrad {

namespace {

double pick(double configured, double fallback) {
  return OptimizerConfig::is_set(configured) ? configured : fallback;
}

class MainOptimizer final : public Optimizer {
 public:
  MainOptimizer(std::string id, MomentumVariant variant, const OptimizerConfig& cfg,
                std::size_t dim)
      : id_(std::move(id)), variant_(variant) {
    hp_.alpha = pick(cfg.alpha, hp_.alpha);
    // --beta names the momentum directly; --beta1 is accepted as an alias so
    // sweeps can drive every method's first-moment decay with one flag.
    hp_.beta = pick(cfg.beta, pick(cfg.beta1, hp_.beta));
    hp_.epsilon = pick(cfg.epsilon, hp_.epsilon);
    state_ = expectigrad_init(dim, hp_);
  }

  void step(std::span<const double> g, std::span<double> delta) override {
    momentum_variant_step_inplace(state_, g, hp_, variant_, delta);
  }

  std::size_t dim() const override { return state_.dim(); }
  const std::string& id() const override { return id_; }
  const ExpectigradState& state() const { return state_; }

 private:
  std::string id_;
  MomentumVariant variant_;
  HyperParams hp_;
  ExpectigradState state_;
};

class BaselineOptimizer final : public Optimizer {
 public:
  BaselineOptimizer(BaselineKind kind, const OptimizerConfig& cfg, std::size_t dim)
      : id_(baseline_name(kind)) {
    hp_ = baseline_defaults(kind);
    hp_.alpha = pick(cfg.alpha, hp_.alpha);
    hp_.beta1 = pick(cfg.beta1, hp_.beta1);
    hp_.beta2 = pick(cfg.beta2, hp_.beta2);
    hp_.epsilon = pick(cfg.epsilon, hp_.epsilon);
    hp_.rho = pick(cfg.rho, hp_.rho);
    hp_.mu = pick(cfg.mu, pick(cfg.beta1, hp_.mu));
    state_ = baseline_init(kind, dim, hp_);
  }

  void step(std::span<const double> g, std::span<double> delta) override {
    baseline_step_inplace(state_, g, hp_, delta);
  }

  std::size_t dim() const override { return state_.dim(); }
  const std::string& id() const override { return id_; }

 private:
  std::string id_;
  BaselineHyperParams hp_;
  BaselineState state_;
};

}  // namespace

const std::vector<std::string>& optimizer_ids() {
  static const std::vector<std::string> ids = {
      "expectigrad", "expectigrad-inner", "expectigrad-bc-inner",
      "sgd",         "sgd-momentum",      "adagrad",
      "rmsprop",     "adadelta",          "adam",
      "amsgrad",     "yogi"};
  return ids;
}

std::unique_ptr<Optimizer> make_optimizer(const OptimizerConfig& cfg, std::size_t dim) {
  const std::string& id = cfg.id;
  if (id == "expectigrad")
    return std::make_unique<MainOptimizer>(id, MomentumVariant::BiasCorrectedOuter, cfg, dim);
  if (id == "expectigrad-inner")
    return std::make_unique<MainOptimizer>(id, MomentumVariant::Inner, cfg, dim);
  if (id == "expectigrad-bc-inner")
    return std::make_unique<MainOptimizer>(id, MomentumVariant::BiasCorrectedInner, cfg, dim);
  if (id == "sgd") return std::make_unique<BaselineOptimizer>(BaselineKind::SGD, cfg, dim);
  if (id == "sgd-momentum")
    return std::make_unique<BaselineOptimizer>(BaselineKind::SGDMomentum, cfg, dim);
  if (id == "adagrad")
    return std::make_unique<BaselineOptimizer>(BaselineKind::AdaGrad, cfg, dim);
  if (id == "rmsprop")
    return std::make_unique<BaselineOptimizer>(BaselineKind::RMSProp, cfg, dim);
  if (id == "adadelta")
    return std::make_unique<BaselineOptimizer>(BaselineKind::AdaDelta, cfg, dim);
  if (id == "adam") return std::make_unique<BaselineOptimizer>(BaselineKind::Adam, cfg, dim);
  if (id == "amsgrad")
    return std::make_unique<BaselineOptimizer>(BaselineKind::AMSGrad, cfg, dim);
  if (id == "yogi") return std::make_unique<BaselineOptimizer>(BaselineKind::Yogi, cfg, dim);
  throw std::invalid_argument("unknown optimizer id '" + id + "'");
}

}  // namespace expectigrad
