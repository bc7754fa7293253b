#include "psrkit/markov_model.hpp"

#include <cmath>
#include <string>

#include "psrkit/errors.hpp"
#include "psrkit/tolerances.hpp"

namespace psr {
namespace {

constexpr double kRowSumTol = 1e-12;

long long window_count(int digits, int order) {
  long long n = 1;
  for (int i = 0; i < order; ++i) {
    n *= digits;
    if (n > 100'000'000) throw SchemaError("order: window space too large");
  }
  return n;
}

}  // namespace

MarkovModel::MarkovModel(Alphabet alphabet, int order,
                         std::vector<Eigen::MatrixXd> observation_rows)
    : alphabet_(std::move(alphabet)),
      order_(order),
      observation_rows_(std::move(observation_rows)) {
  if (order_ < 1) throw SchemaError("order: must be at least 1");
  const long long rows = window_count(alphabet_.num_pairs() + 1, order_);
  if (static_cast<int>(observation_rows_.size()) != alphabet_.num_actions()) {
    throw SchemaError("obs: expected one matrix per action");
  }
  for (int a = 0; a < alphabet_.num_actions(); ++a) {
    const auto& m = observation_rows_[a];
    const std::string where = "obs." + alphabet_.action_name(a);
    if (m.rows() != rows || m.cols() != alphabet_.num_observations()) {
      throw SchemaError(where + ": expected " + std::to_string(rows) + "x" +
                        std::to_string(alphabet_.num_observations()));
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      double sum = 0.0;
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (!(m(i, j) >= 0.0)) {
          throw SchemaError(where + ": row " + std::to_string(i) + " entry " +
                            std::to_string(j) + " is negative");
        }
        sum += m(i, j);
      }
      if (std::abs(sum - 1.0) > kRowSumTol) {
        throw SchemaError(where + ": row " + std::to_string(i) + " sums to " +
                          std::to_string(sum) + ", expected 1");
      }
    }
  }
  reset();
}

void MarkovModel::reset() {
  window_.assign(order_, placeholder_digit());
}

int MarkovModel::window_index() const {
  const int base = placeholder_digit() + 1;
  int idx = 0;
  for (int digit : window_) idx = idx * base + digit;
  return idx;
}

double MarkovModel::update(Step s) {
  const double p = observation_rows_[s.action](window_index(), s.observation);
  if (p <= kZeroCutoff) {
    throw ImpossibleObservation("p(" + alphabet_.action_name(s.action) +
                                alphabet_.observation_name(s.observation) +
                                " | window) = " + std::to_string(p));
  }
  window_.erase(window_.begin());
  window_.push_back(alphabet_.pair_index(s.action, s.observation));
  return p;
}

double MarkovModel::predict_raw(const Test& t) const {
  const int base = placeholder_digit() + 1;
  std::vector<int> window = window_;
  double p = 1.0;
  for (const Step& s : t) {
    int idx = 0;
    for (int digit : window) idx = idx * base + digit;
    p *= observation_rows_[s.action](idx, s.observation);
    if (p == 0.0) return 0.0;
    window.erase(window.begin());
    window.push_back(alphabet_.pair_index(s.action, s.observation));
  }
  return p;
}

std::unique_ptr<Model> MarkovModel::clone() const {
  return std::make_unique<MarkovModel>(*this);
}

}  // namespace psr
