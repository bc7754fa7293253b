#pragma once

#include <vector>

#include <Eigen/Dense>

#include "psrkit/model.hpp"

namespace psr {

// Order-n history-window model: the observation distribution depends only
// on the chosen action and the last n action-observation pairs. The window
// digits range over the pair alphabet plus one placeholder value marking
// the not-yet-seen steps before the start, so each per-action observation
// matrix has (|A||O| + 1)^n rows and the model is well defined from the
// first step.
class MarkovModel final : public Model {
 public:
  // observation_rows: one matrix per action, (|A||O|+1)^n by |O|, rows
  // indexed by the window with the oldest digit most significant.
  MarkovModel(Alphabet alphabet, int order,
              std::vector<Eigen::MatrixXd> observation_rows);

  int order() const { return order_; }
  int num_window_states() const { return static_cast<int>(observation_rows_[0].rows()); }
  const Eigen::MatrixXd& observation_rows(int action) const {
    return observation_rows_[action];
  }

  // The digit value standing for "before the start".
  int placeholder_digit() const { return alphabet_.num_pairs(); }

  // Row index of the current window.
  int window_index() const;

  const Alphabet& alphabet() const override { return alphabet_; }
  std::string type_name() const override { return "markov"; }
  void reset() override;
  double update(Step s) override;
  double predict_raw(const Test& t) const override;
  std::unique_ptr<Model> clone() const override;

 private:
  Alphabet alphabet_;
  int order_;
  std::vector<Eigen::MatrixXd> observation_rows_;
  std::vector<int> window_;  // oldest first, digits in [0, placeholder]
};

}  // namespace psr
