#include "psrkit/derive.hpp"

#include <chrono>
#include <cmath>
#include <string>
#include <utility>

#include "psrkit/errors.hpp"

namespace psr {
namespace {

struct LeastSquares {
  Eigen::VectorXd solution;
  double residual = 0.0;
};

LeastSquares solve_ls(const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr,
                      const Eigen::MatrixXd& basis, const Eigen::VectorXd& rhs) {
  Eigen::VectorXd x = qr.solve(rhs);
  const double residual = (basis * x - rhs).norm();
  return {std::move(x), residual};
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

OutcomeVectorTable::OutcomeVectorTable(const PomdpModel& pomdp)
    : alphabet_(pomdp.alphabet()), num_states_(pomdp.num_states()) {
  for (int a = 0; a < alphabet_.num_actions(); ++a) {
    transitions_.push_back(pomdp.transition(a));
  }
  for (int a = 0; a < alphabet_.num_actions(); ++a) {
    for (int o = 0; o < alphabet_.num_observations(); ++o) {
      observation_diags_.push_back(pomdp.observation_diag(a, o));
    }
  }
  cache_.emplace(Test{}, Eigen::VectorXd::Ones(num_states_));
}

const Eigen::VectorXd& OutcomeVectorTable::operator()(const Test& t) {
  auto it = cache_.find(t);
  if (it != cache_.end()) return it->second;
  // u(t) = diag(O_first) T_first u(rest), built by recursing on the tail.
  Test tail(std::vector<Step>(t.begin() + 1, t.end()));
  const Eigen::VectorXd& rest = (*this)(tail);
  const Step first = t[0];
  Eigen::VectorXd u = observation_diags_[alphabet_.pair_index(first.action, first.observation)]
                          .cwiseProduct(transitions_[first.action] * rest);
  return cache_.emplace(t, std::move(u)).first->second;
}

Eigen::VectorXd outcome_vector(const PomdpModel& pomdp, const Test& t) {
  OutcomeVectorTable table(pomdp);
  return table(t);
}

std::vector<Test> find_core_tests(const PomdpModel& pomdp, double tol) {
  const Alphabet& alphabet = pomdp.alphabet();
  const int k = pomdp.num_states();
  OutcomeVectorTable table(pomdp);

  std::vector<Test> core;
  Eigen::MatrixXd stacked(k, 0);
  int rank = 0;
  std::vector<Test> frontier{Test{}};
  while (!frontier.empty() && rank < k) {
    std::vector<Test> admitted;
    for (const Test& t : frontier) {
      for (int a = 0; a < alphabet.num_actions() && rank < k; ++a) {
        for (int o = 0; o < alphabet.num_observations() && rank < k; ++o) {
          Test candidate = t.prepend({a, o});
          Eigen::MatrixXd trial(k, rank + 1);
          trial.leftCols(rank) = stacked;
          trial.col(rank) = table(candidate);
          if (numerical_rank(trial, tol) > rank) {
            stacked = std::move(trial);
            ++rank;
            core.push_back(candidate);
            admitted.push_back(std::move(candidate));
          }
        }
      }
    }
    frontier = std::move(admitted);
  }
  return core;
}

Eigen::VectorXd solve_weights(OutcomeVectorTable& table, const std::vector<Test>& core_tests,
                              const Test& t) {
  const int k = table.num_states();
  Eigen::MatrixXd basis(k, static_cast<Eigen::Index>(core_tests.size()));
  for (std::size_t j = 0; j < core_tests.size(); ++j) basis.col(j) = table(core_tests[j]);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
  const Eigen::VectorXd& rhs = table(t);
  LeastSquares ls = solve_ls(qr, basis, rhs);
  if (ls.residual > 1e-8 * (1.0 + rhs.norm())) {
    throw SpanViolation("test " + t.render(table.alphabet()) +
                        ": outcome vector falls outside the core span (residual " +
                        std::to_string(ls.residual) + ")");
  }
  return ls.solution;
}

nlohmann::json DerivationReport::to_json() const {
  nlohmann::json j;
  j["core_tests"] = core_tests;
  j["rank"] = rank;
  j["max_residual"] = max_residual;
  j["wall_seconds"] = wall_seconds;
  return j;
}

Derivation pomdp_to_psr(const PomdpModel& pomdp,
                        const std::optional<std::vector<Test>>& core_override, double tol) {
  const auto start = std::chrono::steady_clock::now();
  const Alphabet& alphabet = pomdp.alphabet();
  const int k = pomdp.num_states();
  OutcomeVectorTable table(pomdp);
  const std::vector<Test> discovered = find_core_tests(pomdp, tol);

  std::vector<Test> core = discovered;
  if (core_override) {
    const std::vector<Test>& offered = *core_override;
    if (offered.empty()) throw InvalidOverride("override: empty core-test set");
    for (const Test& t : offered) {
      if (t.empty()) throw InvalidOverride("override: the empty test is not allowed");
    }
    Eigen::MatrixXd over(k, static_cast<Eigen::Index>(offered.size()));
    for (std::size_t j = 0; j < offered.size(); ++j) over.col(j) = table(offered[j]);
    if (numerical_rank(over, tol) != static_cast<int>(offered.size())) {
      throw InvalidOverride("override: outcome vectors are linearly dependent");
    }
    Eigen::MatrixXd joint(k, static_cast<Eigen::Index>(offered.size() + discovered.size()));
    joint.leftCols(static_cast<Eigen::Index>(offered.size())) = over;
    for (std::size_t j = 0; j < discovered.size(); ++j) {
      joint.col(static_cast<Eigen::Index>(offered.size() + j)) = table(discovered[j]);
    }
    if (numerical_rank(joint, tol) != static_cast<int>(offered.size())) {
      throw InvalidOverride("override: does not span the searched outcome space");
    }
    core = offered;
  }

  const Eigen::Index q = static_cast<Eigen::Index>(core.size());
  Eigen::MatrixXd basis(k, q);
  for (Eigen::Index j = 0; j < q; ++j) basis.col(j) = table(core[j]);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
  double max_residual = 0.0;
  auto weights_for = [&](const Test& t) {
    const Eigen::VectorXd& rhs = table(t);
    LeastSquares ls = solve_ls(qr, basis, rhs);
    if (ls.residual > 1e-8 * (1.0 + rhs.norm())) {
      throw SpanViolation("test " + t.render(alphabet) +
                          ": outcome vector falls outside the core span (residual " +
                          std::to_string(ls.residual) + ")");
    }
    max_residual = std::max(max_residual, ls.residual);
    return ls.solution;
  };

  std::vector<Eigen::VectorXd> one_step;
  std::vector<Eigen::MatrixXd> extensions;
  for (int a = 0; a < alphabet.num_actions(); ++a) {
    for (int o = 0; o < alphabet.num_observations(); ++o) {
      one_step.push_back(weights_for(Test({{a, o}})));
    }
  }
  for (int a = 0; a < alphabet.num_actions(); ++a) {
    for (int o = 0; o < alphabet.num_observations(); ++o) {
      Eigen::MatrixXd ext(q, q);
      for (Eigen::Index j = 0; j < q; ++j) {
        ext.col(j) = weights_for(core[j].prepend({a, o}));
      }
      extensions.push_back(std::move(ext));
    }
  }
  Eigen::VectorXd p0(q);
  for (Eigen::Index j = 0; j < q; ++j) p0[j] = pomdp.initial_belief().dot(table(core[j]));

  DerivationReport report;
  for (const Test& t : core) report.core_tests.push_back(t.render(alphabet));
  report.rank = static_cast<int>(discovered.size());
  report.max_residual = max_residual;
  LinearPsrModel model(alphabet, core, std::move(p0), std::move(one_step),
                       std::move(extensions));
  report.wall_seconds = seconds_since(start);
  return {std::move(model), std::move(report)};
}

Derivation matrix_to_psr(const SysDynMatrix& m, double tol) {
  const auto start = std::chrono::steady_clock::now();
  const Alphabet& alphabet = m.alphabet;
  const Eigen::Index rows = m.entries.rows();
  const int full_rank = numerical_rank(m, tol);
  if (full_rank < 1) throw Error("matrix_to_psr: matrix has rank zero");

  // First columns (length-lex) that raise the column rank.
  std::vector<Eigen::Index> chosen;
  Eigen::MatrixXd selected(rows, 0);
  for (Eigen::Index c = 0;
       c < m.entries.cols() && static_cast<int>(chosen.size()) < full_rank; ++c) {
    const Eigen::Index n = static_cast<Eigen::Index>(chosen.size());
    Eigen::MatrixXd trial(rows, n + 1);
    trial.leftCols(n) = selected;
    trial.col(n) = m.entries.col(c);
    if (numerical_rank(trial, tol) > static_cast<int>(n)) {
      selected = std::move(trial);
      chosen.push_back(c);
    }
  }
  std::vector<Test> core;
  core.reserve(chosen.size());
  for (Eigen::Index c : chosen) core.push_back(m.col_tests[c]);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(selected);
  const double residual_tol = 1e-6 * static_cast<double>(rows);
  double max_residual = 0.0;
  auto weights_for = [&](const Test& t) {
    const int c = m.column_index(t);
    if (c < 0) {
      throw DepthInsufficient("test " + t.render(alphabet) + " needs test depth " +
                              std::to_string(t.length()) + ", matrix carries " +
                              std::to_string(m.test_depth));
    }
    Eigen::VectorXd rhs = m.entries.col(c);
    LeastSquares ls = solve_ls(qr, selected, rhs);
    if (ls.residual > residual_tol) {
      throw SpanViolation("test " + t.render(alphabet) +
                          ": column falls outside the core column span (residual " +
                          std::to_string(ls.residual) + ")");
    }
    max_residual = std::max(max_residual, ls.residual);
    return ls.solution;
  };

  const Eigen::Index q = static_cast<Eigen::Index>(core.size());
  std::vector<Eigen::VectorXd> one_step;
  std::vector<Eigen::MatrixXd> extensions;
  for (int a = 0; a < alphabet.num_actions(); ++a) {
    for (int o = 0; o < alphabet.num_observations(); ++o) {
      one_step.push_back(weights_for(Test({{a, o}})));
    }
  }
  for (int a = 0; a < alphabet.num_actions(); ++a) {
    for (int o = 0; o < alphabet.num_observations(); ++o) {
      Eigen::MatrixXd ext(q, q);
      for (Eigen::Index j = 0; j < q; ++j) {
        ext.col(j) = weights_for(core[j].prepend({a, o}));
      }
      extensions.push_back(std::move(ext));
    }
  }
  Eigen::VectorXd p0(q);
  for (Eigen::Index j = 0; j < q; ++j) p0[j] = m.entries(0, chosen[j]);

  DerivationReport report;
  for (const Test& t : core) report.core_tests.push_back(t.render(alphabet));
  report.rank = full_rank;
  report.max_residual = max_residual;
  LinearPsrModel model(alphabet, std::move(core), std::move(p0), std::move(one_step),
                       std::move(extensions));
  report.wall_seconds = seconds_since(start);
  return {std::move(model), std::move(report)};
}

}  // namespace psr
