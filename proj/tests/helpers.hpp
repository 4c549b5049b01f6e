#pragma once

#include <random>
#include <string>
#include <vector>

#include "ladder/synth.hpp"
#include "ladder/types.hpp"

namespace ladder::testing {

// Standard 16-model grid: 4 sizes x multipliers {1, 2, 5, 10}.
inline LadderSpec grid_ladder() {
  LadderSpec spec;
  const std::int64_t sizes[] = {190354176, 371262464, 758220288, 1279395840};
  const char* names[] = {"190M", "370M", "760M", "1.3B"};
  for (int i = 0; i < 4; ++i)
    for (double mult : {1.0, 2.0, 5.0, 10.0})
      spec.entries.push_back({std::string(names[i]) + "-" +
                                  std::to_string(static_cast<int>(mult)) + "xC",
                              sizes[i], mult});
  return spec;
}

inline GeneratorSpec grid_generator(std::uint64_t seed, double loss_sigma,
                                    double acc_sigma) {
  GeneratorSpec g;
  g.truth_step1 = PowerLawParams{38.07, 100.09, 0.23, 0.24, 0.45};
  g.truth_step2 = SigmoidParams{-0.74, 1.00, 4.83, 0.62};
  g.ladder = grid_ladder();
  g.checkpoints_per_run = 25;
  g.steps_per_run = 20000;
  g.noise = {loss_sigma, acc_sigma};
  g.seed = seed;
  return g;
}

// Random but reproducible ground truth with exponents in [0.1, 0.8] and
// power-law terms of order 1 at the small end of the grid.
inline PowerLawParams random_power_law(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> expo(0.1, 0.8);
  std::uniform_real_distribution<double> term(0.5, 2.0);
  std::uniform_real_distribution<double> intercept(0.3, 1.0);
  PowerLawParams p;
  p.alpha = expo(rng);
  p.beta = expo(rng);
  p.A = term(rng) * std::pow(190354176.0, p.alpha);
  p.B = term(rng) * std::pow(3807083520.0, p.beta);
  p.E = intercept(rng);
  return p;
}

} // namespace ladder::testing
