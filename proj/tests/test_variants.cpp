#include "doctest.h"

#include <cmath>
#include <vector>

#include "expectigrad/expectigrad.hpp"
#include "expectigrad/rng.hpp"

using namespace expectigrad;

namespace {

double mixed_grad(SplitMix64& rng) {
  const double u = rng.next_double();
  if (u < 0.25) return 0.0;
  return rng.next_uniform(-5.0, 5.0);
}

}  // namespace

TEST_CASE("bias-corrected outer is bit-identical to the main step") {
  const HyperParams hp;
  SplitMix64 rng(101);
  ExpectigradState a = expectigrad_init(3, hp);
  ExpectigradState b = expectigrad_init(3, hp);
  std::vector<double> g(3), da(3), db(3);
  for (int t = 1; t <= 50; ++t) {
    for (double& gj : g) gj = mixed_grad(rng);
    expectigrad_step_inplace(a, g, hp, da);
    momentum_variant_step_inplace(b, g, hp, MomentumVariant::BiasCorrectedOuter, db);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(da[j] == db[j]);
      CHECK(a.sum_sq[j] == b.sum_sq[j]);
      CHECK(a.momentum[j] == b.momentum[j]);
      CHECK(a.nonzero_count[j] == b.nonzero_count[j]);
    }
    CHECK(a.beta_pow == b.beta_pow);
  }
}

TEST_CASE("all variants collapse to the same update at beta=0") {
  HyperParams hp;
  hp.beta = 0.0;
  SplitMix64 rng(103);
  ExpectigradState inner = expectigrad_init(2, hp);
  ExpectigradState bc_inner = expectigrad_init(2, hp);
  ExpectigradState bc_outer = expectigrad_init(2, hp);
  std::vector<double> g(2), d1(2), d2(2), d3(2);
  for (int t = 1; t <= 80; ++t) {
    for (double& gj : g) gj = mixed_grad(rng);
    momentum_variant_step_inplace(inner, g, hp, MomentumVariant::Inner, d1);
    momentum_variant_step_inplace(bc_inner, g, hp, MomentumVariant::BiasCorrectedInner, d2);
    momentum_variant_step_inplace(bc_outer, g, hp, MomentumVariant::BiasCorrectedOuter, d3);
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(d1[j] == d2[j]);
      CHECK(d1[j] == d3[j]);
    }
  }
}

TEST_CASE("inner and bias-corrected inner differ exactly by the correction factor") {
  const HyperParams hp;  // beta 0.9
  ExpectigradState inner = expectigrad_init(1, hp);
  ExpectigradState bc = expectigrad_init(1, hp);
  std::vector<double> d1(1), d2(1);
  const std::vector<double> g = {2.0};
  for (int t = 1; t <= 20; ++t) {
    momentum_variant_step_inplace(inner, g, hp, MomentumVariant::Inner, d1);
    momentum_variant_step_inplace(bc, g, hp, MomentumVariant::BiasCorrectedInner, d2);
    const double factor = 1.0 / (1.0 - std::pow(0.9, static_cast<double>(t)));
    CHECK(std::fabs(d2[0] / d1[0] - factor) / factor <= 1e-14);
  }
}

TEST_CASE("all variants maintain identical s, n, t trajectories") {
  const HyperParams hp;
  SplitMix64 rng(107);
  ExpectigradState inner = expectigrad_init(2, hp);
  ExpectigradState bc_inner = expectigrad_init(2, hp);
  std::vector<double> g(2), d(2);
  for (int t = 1; t <= 60; ++t) {
    for (double& gj : g) gj = mixed_grad(rng);
    momentum_variant_step_inplace(inner, g, hp, MomentumVariant::Inner, d);
    momentum_variant_step_inplace(bc_inner, g, hp, MomentumVariant::BiasCorrectedInner, d);
    CHECK(inner.sum_sq == bc_inner.sum_sq);
    CHECK(inner.nonzero_count == bc_inner.nonzero_count);
    CHECK(inner.step == bc_inner.step);
    CHECK(inner.beta_pow == bc_inner.beta_pow);
    // the raw momentum recursion is also shared between the inner forms
    CHECK(inner.momentum == bc_inner.momentum);
  }
}

TEST_CASE("pure variant step matches in-place bitwise") {
  const HyperParams hp;
  for (MomentumVariant v : {MomentumVariant::Inner, MomentumVariant::BiasCorrectedInner,
                            MomentumVariant::BiasCorrectedOuter}) {
    SplitMix64 rng(109);
    ExpectigradState pure_state = expectigrad_init(2, hp);
    ExpectigradState inplace_state = expectigrad_init(2, hp);
    std::vector<double> g(2), delta(2);
    for (int t = 1; t <= 40; ++t) {
      for (double& gj : g) gj = mixed_grad(rng);
      const StepResult res = momentum_variant_step(pure_state, g, hp, v);
      pure_state = res.state;
      momentum_variant_step_inplace(inplace_state, g, hp, v, delta);
      for (std::size_t j = 0; j < 2; ++j) CHECK(delta[j] == res.delta[j]);
      CHECK(inplace_state.momentum == pure_state.momentum);
      CHECK(inplace_state.sum_sq == pure_state.sum_sq);
    }
  }
}
