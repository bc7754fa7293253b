#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "psrkit/pomdp_model.hpp"
#include "psrkit/psr_model.hpp"
#include "psrkit/sysdyn.hpp"
#include "psrkit/tolerances.hpp"

namespace psr {

// Per-state success probabilities of a test: entry i is the probability the
// test succeeds when started from hidden state i. Built right to left from
// the all-ones vector of the empty test; memoized per sequence.
class OutcomeVectorTable {
 public:
  explicit OutcomeVectorTable(const PomdpModel& pomdp);

  const Eigen::VectorXd& operator()(const Test& t);

  int num_states() const { return num_states_; }
  const Alphabet& alphabet() const { return alphabet_; }

 private:
  Alphabet alphabet_;
  int num_states_;
  std::vector<Eigen::MatrixXd> transitions_;        // per action
  std::vector<Eigen::VectorXd> observation_diags_;  // per pair
  std::map<Test, Eigen::VectorXd, LengthLexLess> cache_;
};

Eigen::VectorXd outcome_vector(const PomdpModel& pomdp, const Test& t);

// Searches breadth-first from the empty test, extending the frontier by
// prepending one step; a candidate is kept exactly when it raises the rank
// of the stacked outcome vectors. Returns the tests kept, in discovery
// (length-lex) order; their outcome vectors are independent and span the
// space of all tests' outcome vectors.
std::vector<Test> find_core_tests(const PomdpModel& pomdp, double tol = kDefaultRankTol);

// Least-squares weights m_t against the core tests' outcome vectors.
// Throws SpanViolation when the residual exceeds 1e-8 * (1 + |u(t)|).
Eigen::VectorXd solve_weights(OutcomeVectorTable& table,
                              const std::vector<Test>& core_tests, const Test& t);

struct DerivationReport {
  std::vector<std::string> core_tests;  // rendered
  int rank = 0;                         // dimension of the outcome/column span
  double max_residual = 0.0;
  double wall_seconds = 0.0;
  nlohmann::json to_json() const;
};

struct Derivation {
  LinearPsrModel model;
  DerivationReport report;
};

// Exact predictive-state model of a belief-state model. A caller-supplied
// core set replaces the searched one after validation (independent outcome
// vectors spanning the same space); InvalidOverride otherwise.
Derivation pomdp_to_psr(const PomdpModel& pomdp,
                        const std::optional<std::vector<Test>>& core_override = std::nullopt,
                        double tol = kDefaultRankTol);

// Model-free variant working purely from matrix columns: core tests are the
// first columns (length-lex) that raise the column rank; weights are
// least-squares against those columns with residual tolerance 1e-6 * rows;
// the initial prediction is read off the empty-history row. Throws
// DepthInsufficient when a needed extension column lies beyond test_depth.
Derivation matrix_to_psr(const SysDynMatrix& m, double tol = kDefaultRankTol);

}  // namespace psr
