// Checks every optimizer against the reference recurrences in
// oracle_reference.hpp.  The deltas the oracle produces on the fixed gradient
// sequence are frozen below; the test recomputes the oracle at run time and
// checks it still matches the frozen table bitwise, then checks the library
// against the table.  Set EXPECTIGRAD_PRINT_ORACLE=1 to print a fresh table
// for re-freezing after an intentional change.
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "expectigrad/optimizer.hpp"
#include "oracle_reference.hpp"

using namespace expectigrad;
using oracle_ref::Deltas;
using oracle_ref::kGrads;
using oracle_ref::oracle_for;

namespace {

struct FrozenRow {
  const char* id;
  double deltas[5];
};

// Frozen output of oracle_for() on kGrads at each rule's default parameters.
const FrozenRow kFrozen[] = {
    {"expectigrad",
     {-0.00099999999000000006, 0.00019205845529860619, -0.00039125837072680414,
      -0.00027748739930290057, -0.00060075035591440347}},
    {"expectigrad-inner",
     {-9.9999998999999995e-05, 6.9570108083704326e-05, -9.3044919596427109e-05,
      -8.3740427636784417e-05, -0.00021226908256729446}},
    {"expectigrad-bc-inner",
     {-0.00099999999000000006, 0.00036615846359844392, -0.00034333918670268317,
      -0.00024350226122938184, -0.00051834895989669237}},
    {"sgd", {-0.001, 0.002, -0.0030000000000000001, -0.0, -0.0050000000000000001}},
    {"sgd-momentum",
     {-0.001, 0.0011000000000000001, -0.0020099999999999996, -0.0018090000000000001,
      -0.0066280999999999996}},
    {"adagrad",
     {-0.00099999999000000028, 0.00089442718699991593, -0.00080178372359441608,
      -0.0, -0.00080064076774338442}},
    {"rmsprop",
     {-0.0031622775601683833, 0.0028571428163265311, -0.0025906387783828349, -0.0,
      -0.0026402931162668821}},
    {"adadelta",
     {-0.0044720912343108364, 0.0056853125244166417, -0.0068443782455128895, -0.0,
      -0.0086107513880846077}},
    {"adam",
     {-0.00099999999000000028, 0.00036610352472074841, -0.0003432410787034501,
      -0.00028116220590292785, -0.00057920484142426386}},
    {"amsgrad",
     {-0.00099999999000000028, 0.00036610352472074841, -0.0003432410787034501,
      -0.00024343268129040842, -0.00057920484142426386}},
    {"yogi",
     {-0.03065343003171549, 0.015339417069517941, -0.016845232322351911,
      -0.015160709090116721, -0.033393593958783892}},
};

}  // namespace

TEST_CASE("frozen table matches a fresh oracle run bitwise") {
  const bool print = std::getenv("EXPECTIGRAD_PRINT_ORACLE") != nullptr;
  for (const FrozenRow& row : kFrozen) {
    const Deltas fresh = oracle_for(row.id);
    REQUIRE(fresh.size() == 5);
    if (print) {
      std::printf("    {\"%s\",\n     {", row.id);
      for (std::size_t i = 0; i < fresh.size(); ++i)
        std::printf("%.17g%s", fresh[i], i + 1 < fresh.size() ? ", " : "}},\n");
    }
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      INFO(row.id << " step " << i + 1);
      CHECK(fresh[i] == row.deltas[i]);
    }
  }
}

TEST_CASE("library updates match the frozen oracle table") {
  for (const FrozenRow& row : kFrozen) {
    OptimizerConfig cfg;
    cfg.id = row.id;
    auto opt = make_optimizer(cfg, 1);
    std::vector<double> g(1), delta(1);
    for (std::size_t t = 0; t < kGrads.size(); ++t) {
      g[0] = kGrads[t];
      opt->step(g, delta);
      const double expected = row.deltas[t];
      const double scale = std::max(std::fabs(expected), 1e-30);
      INFO(row.id << " step " << t + 1 << " got " << delta[0] << " want " << expected);
      CHECK(std::fabs(delta[0] - expected) / scale <= 1e-12);
    }
  }
}

TEST_CASE("every registered optimizer id has an oracle") {
  for (const std::string& id : optimizer_ids()) {
    bool found = false;
    for (const FrozenRow& row : kFrozen)
      if (id == row.id) found = true;
    INFO(id);
    CHECK(found);
  }
}
