#include "psrkit/psr_model.hpp"

#include <string>

#include "psrkit/errors.hpp"
#include "psrkit/tolerances.hpp"

namespace psr {

LinearPsrModel::LinearPsrModel(Alphabet alphabet, std::vector<Test> core_tests,
                               Eigen::VectorXd initial_prediction,
                               std::vector<Eigen::VectorXd> one_step_weights,
                               std::vector<Eigen::MatrixXd> extension_matrices)
    : alphabet_(std::move(alphabet)),
      core_tests_(std::move(core_tests)),
      initial_prediction_(std::move(initial_prediction)),
      one_step_weights_(std::move(one_step_weights)),
      extension_matrices_(std::move(extension_matrices)) {
  const Eigen::Index k = static_cast<Eigen::Index>(core_tests_.size());
  if (k < 1) throw SchemaError("core_tests: at least one core test required");
  for (std::size_t i = 0; i < core_tests_.size(); ++i) {
    if (core_tests_[i].empty()) {
      throw SchemaError("core_tests[" + std::to_string(i) + "]: the empty test is not allowed");
    }
    for (const Step& s : core_tests_[i]) {
      if (s.action < 0 || s.action >= alphabet_.num_actions() || s.observation < 0 ||
          s.observation >= alphabet_.num_observations()) {
        throw SchemaError("core_tests[" + std::to_string(i) + "]: step out of alphabet");
      }
    }
  }
  if (initial_prediction_.size() != k) {
    throw SchemaError("p0: expected " + std::to_string(k) + " entries");
  }
  if (static_cast<int>(one_step_weights_.size()) != alphabet_.num_pairs()) {
    throw SchemaError("m: expected one vector per action-observation pair");
  }
  if (static_cast<int>(extension_matrices_.size()) != alphabet_.num_pairs()) {
    throw SchemaError("M: expected one matrix per action-observation pair");
  }
  for (int a = 0; a < alphabet_.num_actions(); ++a) {
    for (int o = 0; o < alphabet_.num_observations(); ++o) {
      const int pair = alphabet_.pair_index(a, o);
      const std::string token = alphabet_.action_name(a) + alphabet_.observation_name(o);
      if (one_step_weights_[pair].size() != k) {
        throw SchemaError("m." + token + ": expected " + std::to_string(k) + " entries");
      }
      if (extension_matrices_[pair].rows() != k || extension_matrices_[pair].cols() != k) {
        throw SchemaError("M." + token + ": expected " + std::to_string(k) + "x" +
                          std::to_string(k));
      }
    }
  }
  state_ = initial_prediction_;
}

Eigen::VectorXd LinearPsrModel::test_weight(const Test& t) const {
  if (t.empty()) throw Error("test_weight: empty test has no weight vector");
  const Step last = t.back();
  Eigen::VectorXd w = one_step_weights_[alphabet_.pair_index(last.action, last.observation)];
  for (int i = t.length() - 2; i >= 0; --i) {
    w = extension_matrices_[alphabet_.pair_index(t[i].action, t[i].observation)] * w;
  }
  return w;
}

double LinearPsrModel::update(Step s) {
  const int pair = alphabet_.pair_index(s.action, s.observation);
  const double p = state_.dot(one_step_weights_[pair]);
  if (p <= kZeroCutoff) {
    throw ImpossibleObservation("p(" + alphabet_.action_name(s.action) +
                                alphabet_.observation_name(s.observation) +
                                " | h) = " + std::to_string(p));
  }
  state_ = (extension_matrices_[pair].transpose() * state_) / p;
  return p;
}

double LinearPsrModel::predict_raw(const Test& t) const {
  if (t.empty()) return 1.0;
  return state_.dot(test_weight(t));
}

std::unique_ptr<Model> LinearPsrModel::clone() const {
  return std::make_unique<LinearPsrModel>(*this);
}

}  // namespace psr
