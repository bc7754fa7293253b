#pragma once

#include <vector>

#include <Eigen/Dense>

#include "psrkit/model.hpp"

namespace psr {

// Linear predictive-state model. The state is the vector of predictions of
// k core tests from the current history; any test's probability and every
// one-step update are linear functions of that vector.
class LinearPsrModel final : public Model {
 public:
  // one_step_weights: m_ao per action-observation pair (action-major), so
  // p(ao | h) = state . m_ao. extension_matrices: M_ao per pair with
  // column j the weight vector of the extended core test ao q_j.
  LinearPsrModel(Alphabet alphabet, std::vector<Test> core_tests,
                 Eigen::VectorXd initial_prediction,
                 std::vector<Eigen::VectorXd> one_step_weights,
                 std::vector<Eigen::MatrixXd> extension_matrices);

  int num_core_tests() const { return static_cast<int>(core_tests_.size()); }
  const std::vector<Test>& core_tests() const { return core_tests_; }
  const Eigen::VectorXd& initial_prediction() const { return initial_prediction_; }
  const Eigen::VectorXd& one_step_weight(int action, int observation) const {
    return one_step_weights_[alphabet_.pair_index(action, observation)];
  }
  const Eigen::MatrixXd& extension_matrix(int action, int observation) const {
    return extension_matrices_[alphabet_.pair_index(action, observation)];
  }

  // Current prediction vector p(Q | h). Kept a probability only up to
  // accumulated float error; callers monitoring health check the band.
  const Eigen::VectorXd& state() const { return state_; }

  // Composed weight vector m_t of a non-empty test, so that
  // predict_raw(t) == state . test_weight(t).
  Eigen::VectorXd test_weight(const Test& t) const;

  const Alphabet& alphabet() const override { return alphabet_; }
  std::string type_name() const override { return "psr"; }
  void reset() override { state_ = initial_prediction_; }
  double update(Step s) override;
  double predict_raw(const Test& t) const override;
  std::unique_ptr<Model> clone() const override;

 private:
  Alphabet alphabet_;
  std::vector<Test> core_tests_;
  Eigen::VectorXd initial_prediction_;
  std::vector<Eigen::VectorXd> one_step_weights_;
  std::vector<Eigen::MatrixXd> extension_matrices_;
  Eigen::VectorXd state_;
};

}  // namespace psr
