#pragma once

#include <vector>

#include <Eigen/Dense>

#include "psrkit/model.hpp"

namespace psr {

// Belief-state model over k hidden states. Observation matrices are
// diagonal and indexed by the state being left: one step with (a, o) scales
// the belief by the per-state emission probabilities first, then pushes it
// through the transition matrix, then renormalizes.
class PomdpModel final : public Model {
 public:
  // transitions: one k-by-k row-stochastic matrix per action, declaration
  // order. observation_diags: one k-vector per (action, observation) pair,
  // action-major; for each action the vectors sum entrywise to one.
  PomdpModel(Alphabet alphabet, std::vector<Eigen::MatrixXd> transitions,
             std::vector<Eigen::VectorXd> observation_diags,
             Eigen::VectorXd initial_belief);

  int num_states() const { return static_cast<int>(initial_belief_.size()); }
  const Eigen::MatrixXd& transition(int action) const { return transitions_[action]; }
  const Eigen::VectorXd& observation_diag(int action, int observation) const {
    return observation_diags_[alphabet_.pair_index(action, observation)];
  }
  const Eigen::VectorXd& initial_belief() const { return initial_belief_; }

  const Eigen::VectorXd& belief() const { return belief_; }

  // Replaces the current belief; must be a probability vector. Useful for
  // interrogating a model from a chosen nominal state.
  void set_belief(Eigen::VectorXd belief);

  const Alphabet& alphabet() const override { return alphabet_; }
  std::string type_name() const override { return "pomdp"; }
  void reset() override { belief_ = initial_belief_; }
  double update(Step s) override;
  double predict_raw(const Test& t) const override;
  std::unique_ptr<Model> clone() const override;

 private:
  Alphabet alphabet_;
  std::vector<Eigen::MatrixXd> transitions_;
  std::vector<Eigen::VectorXd> observation_diags_;
  Eigen::VectorXd initial_belief_;
  Eigen::VectorXd belief_;
};

}  // namespace psr
