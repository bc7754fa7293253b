#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "psrkit/sequence.hpp"

namespace psr {

// A discrete dynamical system: reset to a declared initial state, advance
// one action-observation step at a time, predict test probabilities from
// the current history. Predictions never mutate state.
class Model {
 public:
  virtual ~Model() = default;

  virtual const Alphabet& alphabet() const = 0;

  // "pomdp", "markov", or "psr"; keys the file format.
  virtual std::string type_name() const = 0;

  virtual void reset() = 0;

  // Advances by one step and returns the one-step probability p(ao | h)
  // that was consumed. Throws ImpossibleObservation (leaving the state
  // untouched) when that probability is at or below kZeroCutoff.
  virtual double update(Step s) = 0;

  // p(t | h) from the current state, unclamped. The empty test yields 1.
  // Small excursions outside [0, 1] are the caller's signal of numerical
  // drift; predict() below clamps them away.
  virtual double predict_raw(const Test& t) const = 0;

  double predict(const Test& t) const;

  virtual std::unique_ptr<Model> clone() const = 0;

  // Applies every step of h in order; returns the product of the one-step
  // probabilities, i.e. p(h) from the state replay started in.
  double replay(const History& h);
};

// Supplies one action per step: a fixed sequence (cycled past its end) or
// a uniform draw.
class ActionSource {
 public:
  static ActionSource fixed(std::vector<int> actions);
  static ActionSource uniform();

  int next(int step_index, int num_actions, std::mt19937_64& rng) const;

 private:
  ActionSource() = default;
  std::vector<int> fixed_;  // empty means uniform
};

// Rolls the model forward `steps` steps, choosing actions from `actions`
// and sampling each observation from the model's own one-step distribution.
// Returns the realized trajectory; the model ends in the resulting state.
// Identical seeds give identical trajectories on every platform.
std::vector<Step> simulate(Model& model, const ActionSource& actions, int steps,
                           std::uint64_t seed);

}  // namespace psr
