#include "psrkit/model.hpp"

#include <algorithm>

#include "psrkit/errors.hpp"
#include "psrkit/random.hpp"

namespace psr {

double Model::predict(const Test& t) const {
  return std::clamp(predict_raw(t), 0.0, 1.0);
}

double Model::replay(const History& h) {
  double p = 1.0;
  for (const Step& s : h) p *= update(s);
  return p;
}

ActionSource ActionSource::fixed(std::vector<int> actions) {
  if (actions.empty()) throw Error("fixed action source needs at least one action");
  ActionSource src;
  src.fixed_ = std::move(actions);
  return src;
}

ActionSource ActionSource::uniform() { return ActionSource{}; }

int ActionSource::next(int step_index, int num_actions, std::mt19937_64& rng) const {
  if (!fixed_.empty()) return fixed_[step_index % fixed_.size()];
  return uniform_index(rng, num_actions);
}

std::vector<Step> simulate(Model& model, const ActionSource& actions, int steps,
                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Alphabet& alphabet = model.alphabet();
  std::vector<Step> trajectory;
  trajectory.reserve(steps);
  for (int i = 0; i < steps; ++i) {
    int a = actions.next(i, alphabet.num_actions(), rng);
    double u = canonical_uniform(rng);
    // CDF walk over the one-step distribution; float shortfall at the top
    // end lands on the last possible observation.
    double cum = 0.0;
    int chosen = -1;
    for (int o = 0; o < alphabet.num_observations(); ++o) {
      double p = model.predict(Test({{a, o}}));
      if (p <= 0.0) continue;
      cum += p;
      chosen = o;
      if (u < cum) break;
    }
    if (chosen < 0) throw Error("one-step distribution vanished during simulation");
    model.update({a, chosen});
    trajectory.push_back({a, chosen});
  }
  return trajectory;
}

}  // namespace psr
