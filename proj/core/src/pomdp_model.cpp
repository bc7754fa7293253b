#include "psrkit/pomdp_model.hpp"

#include <cmath>
#include <string>

#include "psrkit/errors.hpp"
#include "psrkit/tolerances.hpp"

namespace psr {
namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kBeliefSumTol = 1e-9;

void check_probability_vector(const Eigen::VectorXd& v, double sum_tol,
                              const std::string& where) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0)) {
      throw SchemaError(where + ": entry " + std::to_string(i) + " is negative");
    }
  }
  if (std::abs(v.sum() - 1.0) > sum_tol) {
    throw SchemaError(where + ": entries sum to " + std::to_string(v.sum()) +
                      ", expected 1");
  }
}

}  // namespace

PomdpModel::PomdpModel(Alphabet alphabet, std::vector<Eigen::MatrixXd> transitions,
                       std::vector<Eigen::VectorXd> observation_diags,
                       Eigen::VectorXd initial_belief)
    : alphabet_(std::move(alphabet)),
      transitions_(std::move(transitions)),
      observation_diags_(std::move(observation_diags)),
      initial_belief_(std::move(initial_belief)) {
  const Eigen::Index k = initial_belief_.size();
  if (k < 1) throw SchemaError("b0: at least one state required");
  if (static_cast<int>(transitions_.size()) != alphabet_.num_actions()) {
    throw SchemaError("T: expected one matrix per action");
  }
  if (static_cast<int>(observation_diags_.size()) != alphabet_.num_pairs()) {
    throw SchemaError("O: expected one diagonal per action-observation pair");
  }
  for (int a = 0; a < alphabet_.num_actions(); ++a) {
    const auto& t = transitions_[a];
    const std::string where = "T." + alphabet_.action_name(a);
    if (t.rows() != k || t.cols() != k) {
      throw SchemaError(where + ": expected " + std::to_string(k) + "x" +
                        std::to_string(k));
    }
    for (Eigen::Index i = 0; i < k; ++i) {
      check_probability_vector(t.row(i).transpose(), kRowSumTol,
                               where + ": row " + std::to_string(i));
    }
  }
  for (int a = 0; a < alphabet_.num_actions(); ++a) {
    Eigen::VectorXd column_sums = Eigen::VectorXd::Zero(k);
    for (int o = 0; o < alphabet_.num_observations(); ++o) {
      const auto& d = observation_diags_[alphabet_.pair_index(a, o)];
      const std::string where =
          "O." + alphabet_.action_name(a) + "." + alphabet_.observation_name(o);
      if (d.size() != k) {
        throw SchemaError(where + ": expected " + std::to_string(k) + " entries");
      }
      for (Eigen::Index i = 0; i < k; ++i) {
        if (!(d[i] >= 0.0)) {
          throw SchemaError(where + ": entry " + std::to_string(i) + " is negative");
        }
      }
      column_sums += d;
    }
    for (Eigen::Index i = 0; i < k; ++i) {
      if (std::abs(column_sums[i] - 1.0) > kRowSumTol) {
        throw SchemaError("O." + alphabet_.action_name(a) + ": state " +
                          std::to_string(i) + " emission probabilities sum to " +
                          std::to_string(column_sums[i]) + ", expected 1");
      }
    }
  }
  check_probability_vector(initial_belief_, kBeliefSumTol, "b0");
  belief_ = initial_belief_;
}

void PomdpModel::set_belief(Eigen::VectorXd belief) {
  if (belief.size() != initial_belief_.size()) {
    throw Error("belief: wrong dimension");
  }
  check_probability_vector(belief, kBeliefSumTol, "belief");
  belief_ = std::move(belief);
}

double PomdpModel::update(Step s) {
  const Eigen::VectorXd& diag = observation_diags_[alphabet_.pair_index(s.action, s.observation)];
  Eigen::VectorXd next = transitions_[s.action].transpose() * diag.cwiseProduct(belief_);
  double p = next.sum();
  if (p <= kZeroCutoff) {
    throw ImpossibleObservation("p(" + alphabet_.action_name(s.action) +
                                alphabet_.observation_name(s.observation) +
                                " | h) = " + std::to_string(p));
  }
  belief_ = next / p;
  return p;
}

double PomdpModel::predict_raw(const Test& t) const {
  Eigen::VectorXd v = belief_;
  for (const Step& s : t) {
    const Eigen::VectorXd& diag =
        observation_diags_[alphabet_.pair_index(s.action, s.observation)];
    v = transitions_[s.action].transpose() * diag.cwiseProduct(v);
  }
  return v.sum();
}

std::unique_ptr<Model> PomdpModel::clone() const {
  return std::make_unique<PomdpModel>(*this);
}

}  // namespace psr
