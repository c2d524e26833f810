// Trains FANS and raw-feature PLR on one draw of the mixture design and
// prints both test errors.

#include <cstdio>

#include "fans/baselines.hpp"
#include "fans/fans.hpp"
#include "fans/simgen.hpp"

int main() {
  fans::sim::SimSpec spec;
  spec.example = fans::sim::Example::kEx3;
  spec.p = 50;
  spec.n_per_class = 100;
  spec.n_test_per_class = 200;
  spec.seed = 7;
  const auto data = fans::sim::generate(spec);

  fans::FansConfig config;
  config.splits = 4;
  config.seed = 11;
  const auto model = fans::train(data.train, config);
  const auto fans_pred = fans::predict(model, data.test.features);

  const auto plr = fans::baselines::fit_plr_raw(data.train, config.path_options(), {}, 11);
  const auto plr_pred = fans::baselines::predict_plr(plr, data.test.features);

  const auto& truth = *data.test.labels;
  std::printf("FANS test error: %.1f%%\n", 100.0 * fans::error_rate(fans_pred, truth));
  std::printf("PLR  test error: %.1f%%\n", 100.0 * fans::error_rate(plr_pred, truth));
}
