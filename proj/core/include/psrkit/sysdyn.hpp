#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "psrkit/model.hpp"
#include "psrkit/tolerances.hpp"

namespace psr {

// A truncated system-dynamics matrix. Rows are the realizable histories up
// to hist_depth (empty history first, then length-lex, histories whose
// probability falls at or below kZeroCutoff omitted); columns are all tests
// of length 1..test_depth in length-lex order; entries are the raw
// history-conditional test predictions.
struct SysDynMatrix {
  Alphabet alphabet{{"a"}, {"o"}};
  int hist_depth = 0;
  int test_depth = 0;
  std::vector<History> row_histories;
  std::vector<Test> col_tests;
  Eigen::VectorXd history_probs;  // p(h) for each row
  Eigen::MatrixXd entries;

  // Column of a test under the canonical layout, by arithmetic on pair
  // digits; -1 when t is empty or longer than test_depth.
  int column_index(const Test& t) const;
};

// Builds the matrix by cloning the model down a breadth-first tree of
// realizable histories, then predicting every column from each leaf state.
SysDynMatrix build_matrix(const Model& model, int hist_depth, int test_depth);

// Numerical rank by column-pivoted QR: pivots count while their magnitude
// exceeds tol times the largest pivot magnitude.
int numerical_rank(const Eigen::MatrixXd& m, double tol = kDefaultRankTol);
int numerical_rank(const SysDynMatrix& m, double tol = kDefaultRankTol);

struct ValidityViolation {
  std::string history;
  std::string subject;   // test or action sequence involved
  std::string property;  // "range" | "action-sum" | "extension-sum"
  double value = 0.0;
  double expected = 0.0;
};

struct ValidityReport {
  std::vector<ValidityViolation> violations;
  bool pass() const { return violations.empty(); }
  nlohmann::json to_json() const;
};

// Checks, per row: every entry in [-1e-9, 1+1e-9]; for each action sequence
// the predictions of its full-length observation completions sum to 1
// within 1e-8; and each column of length < test_depth equals the sum of its
// one-step extensions under every action within 1e-8.
ValidityReport check_validity(const SysDynMatrix& m);

// An unordered set of distinct same-length tests, predicted as the sum of
// its members (their outcomes are mutually exclusive events).
class UnionTest {
 public:
  explicit UnionTest(std::vector<Test> members, bool require_common_actions = false);
  const std::vector<Test>& members() const { return members_; }

 private:
  std::vector<Test> members_;
};

double union_prediction(const Model& model, const UnionTest& u);

struct PlateauResult {
  SysDynMatrix matrix;      // last matrix actually built
  int rank = 0;             // its rank
  bool plateau_met = false;
  std::vector<int> depths;  // square depths evaluated, in order
  std::vector<int> ranks;   // rank at each evaluated depth
};

// Evaluates rank at square depths start_depth, start_depth+1, ... until two
// consecutive evaluations agree. Before building each matrix the history
// level is enumerated and the projected rows*cols checked against
// entry_budget; exceeding it stops the search with plateau_met == false.
PlateauResult rank_plateau(const Model& model, int start_depth = 4,
                           std::size_t entry_budget = kDefaultEntryBudget,
                           double tol = kDefaultRankTol);

// CSV round trip. Header: history,p(h),<rendered tests...>; numbers with 12
// significant digits. The reader reconstructs the alphabet from the
// length-one test headers and rejects files where that factorization is
// missing or ambiguous.
void write_csv(const SysDynMatrix& m, std::ostream& out);
std::string to_csv(const SysDynMatrix& m);
SysDynMatrix read_csv(std::istream& in);

}  // namespace psr
