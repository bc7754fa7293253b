#include "psrkit/sysdyn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "psrkit/errors.hpp"

namespace psr {
namespace {

struct HistoryNode {
  History history;
  std::unique_ptr<Model> state;
  double prob = 1.0;
};

// Breadth-first tree of realizable histories: children in pair order, so
// the flattened list is empty-history-first length-lex. Each node keeps the
// model state after its history, so no replay from scratch is needed.
std::vector<HistoryNode> enumerate_histories(const Model& model, int hist_depth) {
  std::vector<HistoryNode> nodes;
  auto root = model.clone();
  root->reset();
  nodes.push_back({History{}, std::move(root), 1.0});
  const Alphabet& alphabet = model.alphabet();
  std::size_t level_begin = 0;
  for (int depth = 0; depth < hist_depth; ++depth) {
    const std::size_t level_end = nodes.size();
    for (std::size_t i = level_begin; i < level_end; ++i) {
      for (int a = 0; a < alphabet.num_actions(); ++a) {
        for (int o = 0; o < alphabet.num_observations(); ++o) {
          auto child = nodes[i].state->clone();
          double step_prob;
          try {
            step_prob = child->update({a, o});
          } catch (const ImpossibleObservation&) {
            continue;
          }
          const double prob = nodes[i].prob * step_prob;
          if (prob <= kZeroCutoff) continue;
          nodes.push_back({nodes[i].history.append({a, o}), std::move(child), prob});
        }
      }
    }
    level_begin = level_end;
  }
  return nodes;
}

SysDynMatrix materialize(const Alphabet& alphabet, std::vector<HistoryNode> nodes,
                         int hist_depth, int test_depth) {
  SysDynMatrix m;
  m.alphabet = alphabet;
  m.hist_depth = hist_depth;
  m.test_depth = test_depth;
  m.col_tests = enumerate_sequences(alphabet, test_depth, false);
  const Eigen::Index rows = static_cast<Eigen::Index>(nodes.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(m.col_tests.size());
  m.row_histories.reserve(nodes.size());
  m.history_probs.resize(rows);
  m.entries.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    m.row_histories.push_back(std::move(nodes[r].history));
    m.history_probs[r] = nodes[r].prob;
    for (Eigen::Index c = 0; c < cols; ++c) {
      m.entries(r, c) = nodes[r].state->predict_raw(m.col_tests[c]);
    }
  }
  return m;
}

// Count of non-empty tests up to depth, saturated well past any budget.
long double test_column_count(int num_pairs, int depth) {
  long double total = 0.0L;
  long double level = 1.0L;
  for (int l = 1; l <= depth; ++l) {
    level *= num_pairs;
    total += level;
    if (total > 1e18L) break;
  }
  return total;
}

std::string render_actions(const std::vector<int>& actions, const Alphabet& alphabet) {
  if (actions.empty()) return "eps";
  std::string out;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (i > 0) out += '.';
    out += alphabet.action_name(actions[i]);
  }
  return out;
}

std::string format12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

double parse_number(const std::string& text, const std::string& where) {
  std::size_t consumed = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &consumed);
  } catch (const std::exception&) {
    throw SchemaError(where + ": \"" + text + "\" is not a number");
  }
  if (consumed != text.size()) {
    throw SchemaError(where + ": \"" + text + "\" is not a number");
  }
  return v;
}

// Reconstructs the alphabet from the single-step header tokens: they come
// action-major, so they split into |A| groups of |O| sharing an action
// prefix with one common observation suffix list. Every consistent
// (group size, first split) is tried; exactly one surviving alphabet is
// required.
Alphabet infer_alphabet(const std::vector<std::string>& test_tokens) {
  std::size_t n1 = 0;
  while (n1 < test_tokens.size() && test_tokens[n1].find('.') == std::string::npos) ++n1;
  if (n1 == 0) throw SchemaError("csv: no single-step test columns");
  const std::vector<std::string> single(test_tokens.begin(), test_tokens.begin() + n1);
  const int n = static_cast<int>(single.size());

  std::vector<Alphabet> candidates;
  auto consider = [&](int num_obs, std::size_t first_split) {
    const int num_actions = n / num_obs;
    std::vector<std::string> actions;
    std::vector<std::string> observations;
    const std::string& first = single[0];
    if (first_split == 0 || first_split >= first.size()) return;
    const std::string action0 = first.substr(0, first_split);
    for (int o = 0; o < num_obs; ++o) {
      const std::string& token = single[o];
      if (token.size() <= action0.size() || token.compare(0, action0.size(), action0) != 0) {
        return;
      }
      observations.push_back(token.substr(action0.size()));
    }
    actions.push_back(action0);
    for (int a = 1; a < num_actions; ++a) {
      const std::string& lead = single[a * num_obs];
      const std::string& obs0 = observations[0];
      if (lead.size() <= obs0.size() ||
          lead.compare(lead.size() - obs0.size(), obs0.size(), obs0) != 0) {
        return;
      }
      const std::string action = lead.substr(0, lead.size() - obs0.size());
      for (int o = 0; o < num_obs; ++o) {
        if (single[a * num_obs + o] != action + observations[o]) return;
      }
      actions.push_back(action);
    }
    try {
      Alphabet alphabet(std::move(actions), std::move(observations));
      // Every header, including multi-step ones, must parse back.
      for (const std::string& token : test_tokens) {
        (void)Sequence::parse(token, alphabet);
      }
      if (std::find(candidates.begin(), candidates.end(), alphabet) == candidates.end()) {
        candidates.push_back(std::move(alphabet));
      }
    } catch (const SchemaError&) {
      return;
    } catch (const ParseError&) {
      return;
    }
  };

  for (int num_obs = 1; num_obs <= n; ++num_obs) {
    if (n % num_obs != 0) continue;
    for (std::size_t split = 1; split < single[0].size(); ++split) {
      consider(num_obs, split);
    }
  }
  if (candidates.empty()) {
    throw SchemaError("csv: cannot reconstruct an alphabet from the test headers");
  }
  if (candidates.size() > 1) {
    throw SchemaError("csv: test headers admit more than one alphabet");
  }
  return candidates.front();
}

}  // namespace

int SysDynMatrix::column_index(const Test& t) const {
  if (t.empty() || t.length() > test_depth) return -1;
  const long long pairs = alphabet.num_pairs();
  long long offset = 0;
  long long level = 1;
  for (int l = 1; l < t.length(); ++l) {
    level *= pairs;
    offset += level;
  }
  long long index = 0;
  for (const Step& s : t) {
    index = index * pairs + alphabet.pair_index(s.action, s.observation);
  }
  return static_cast<int>(offset + index);
}

SysDynMatrix build_matrix(const Model& model, int hist_depth, int test_depth) {
  if (hist_depth < 1 || test_depth < 1) {
    throw Error("build_matrix: depths must be at least 1");
  }
  return materialize(model.alphabet(), enumerate_histories(model, hist_depth), hist_depth,
                     test_depth);
}

int numerical_rank(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  const Eigen::Index n = std::min(m.rows(), m.cols());
  const Eigen::VectorXd pivots = qr.matrixQR().diagonal().head(n).cwiseAbs();
  const double largest = pivots.maxCoeff();
  if (largest <= 0.0) return 0;
  int rank = 0;
  // Pivot magnitudes are non-increasing under column pivoting.
  for (Eigen::Index i = 0; i < n; ++i) {
    if (pivots[i] > tol * largest) {
      ++rank;
    } else {
      break;
    }
  }
  return rank;
}

int numerical_rank(const SysDynMatrix& m, double tol) {
  return numerical_rank(m.entries, tol);
}

nlohmann::json ValidityReport::to_json() const {
  nlohmann::json j;
  j["pass"] = pass();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : violations) {
    arr.push_back({{"history", v.history},
                   {"subject", v.subject},
                   {"property", v.property},
                   {"value", v.value},
                   {"expected", v.expected}});
  }
  j["violations"] = std::move(arr);
  return j;
}

ValidityReport check_validity(const SysDynMatrix& m) {
  constexpr double kRangeSlack = 1e-9;
  constexpr double kSumTol = 1e-8;
  ValidityReport report;
  const Eigen::Index rows = m.entries.rows();
  const Eigen::Index cols = m.entries.cols();

  std::map<std::vector<int>, std::vector<Eigen::Index>> by_actions;
  for (Eigen::Index c = 0; c < cols; ++c) {
    by_actions[m.col_tests[c].action_sequence()].push_back(c);
  }

  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::string history = m.row_histories[r].render(m.alphabet);
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double v = m.entries(r, c);
      if (v < -kRangeSlack || v > 1.0 + kRangeSlack) {
        report.violations.push_back(
            {history, m.col_tests[c].render(m.alphabet), "range", v,
             std::clamp(v, 0.0, 1.0)});
      }
    }
    for (const auto& [actions, columns] : by_actions) {
      double sum = 0.0;
      for (Eigen::Index c : columns) sum += m.entries(r, c);
      if (std::abs(sum - 1.0) > kSumTol) {
        report.violations.push_back(
            {history, render_actions(actions, m.alphabet), "action-sum", sum, 1.0});
      }
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Test& t = m.col_tests[c];
      if (t.length() >= m.test_depth) continue;
      for (int a = 0; a < m.alphabet.num_actions(); ++a) {
        double sum = 0.0;
        for (int o = 0; o < m.alphabet.num_observations(); ++o) {
          sum += m.entries(r, m.column_index(t.append({a, o})));
        }
        if (std::abs(sum - m.entries(r, c)) > kSumTol) {
          report.violations.push_back({history,
                                       t.render(m.alphabet) + " extended by " +
                                           m.alphabet.action_name(a),
                                       "extension-sum", sum, m.entries(r, c)});
        }
      }
    }
  }
  return report;
}

UnionTest::UnionTest(std::vector<Test> members, bool require_common_actions)
    : members_(std::move(members)) {
  if (members_.empty()) throw Error("union test: at least one member required");
  const int len = members_[0].length();
  for (const Test& t : members_) {
    if (t.length() != len) throw Error("union test: members must share one length");
  }
  for (std::size_t i = 0; i < members_.size(); ++i) {
    for (std::size_t j = i + 1; j < members_.size(); ++j) {
      if (members_[i] == members_[j]) throw Error("union test: duplicate member");
    }
  }
  if (require_common_actions) {
    const std::vector<int> actions = members_[0].action_sequence();
    for (const Test& t : members_) {
      if (t.action_sequence() != actions) {
        throw Error("union test: members must share the action sequence");
      }
    }
  }
}

double union_prediction(const Model& model, const UnionTest& u) {
  double sum = 0.0;
  for (const Test& t : u.members()) sum += model.predict(t);
  return sum;
}

PlateauResult rank_plateau(const Model& model, int start_depth, std::size_t entry_budget,
                           double tol) {
  if (start_depth < 1) throw Error("rank_plateau: start depth must be at least 1");
  PlateauResult result;
  for (int depth = start_depth;; ++depth) {
    auto nodes = enumerate_histories(model, depth);
    const long double projected =
        test_column_count(model.alphabet().num_pairs(), depth) *
        static_cast<long double>(nodes.size());
    if (projected > static_cast<long double>(entry_budget)) {
      result.plateau_met = false;
      return result;
    }
    SysDynMatrix m = materialize(model.alphabet(), std::move(nodes), depth, depth);
    const int rank = numerical_rank(m, tol);
    result.matrix = std::move(m);
    result.rank = rank;
    result.depths.push_back(depth);
    result.ranks.push_back(rank);
    const std::size_t n = result.ranks.size();
    if (n >= 2 && result.ranks[n - 1] == result.ranks[n - 2]) {
      result.plateau_met = true;
      return result;
    }
  }
}

void write_csv(const SysDynMatrix& m, std::ostream& out) {
  out << "history,p(h)";
  for (const Test& t : m.col_tests) out << ',' << t.render(m.alphabet);
  out << '\n';
  for (Eigen::Index r = 0; r < m.entries.rows(); ++r) {
    out << m.row_histories[r].render(m.alphabet) << ',' << format12(m.history_probs[r]);
    for (Eigen::Index c = 0; c < m.entries.cols(); ++c) {
      out << ',' << format12(m.entries(r, c));
    }
    out << '\n';
  }
}

std::string to_csv(const SysDynMatrix& m) {
  std::ostringstream out;
  write_csv(m, out);
  return out.str();
}

SysDynMatrix read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "history" || header[1] != "p(h)") {
    throw SchemaError("csv: header must start with history,p(h) and carry test columns");
  }
  const std::vector<std::string> test_tokens(header.begin() + 2, header.end());
  Alphabet alphabet = infer_alphabet(test_tokens);

  SysDynMatrix m;
  m.alphabet = alphabet;
  int test_depth = 0;
  for (const std::string& token : test_tokens) {
    Test t = Test::parse(token, alphabet);
    if (t.empty()) throw SchemaError("csv: eps is not a valid test column");
    test_depth = std::max(test_depth, t.length());
    m.col_tests.push_back(std::move(t));
  }
  m.test_depth = test_depth;
  const std::vector<Sequence> canonical = enumerate_sequences(alphabet, test_depth, false);
  if (m.col_tests != canonical) {
    throw SchemaError("csv: test columns are not the canonical enumeration");
  }

  std::vector<double> probs;
  std::vector<std::vector<double>> rows;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = "csv: line " + std::to_string(line_number);
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw SchemaError(where + ": expected " + std::to_string(header.size()) +
                        " fields, got " + std::to_string(fields.size()));
    }
    History h;
    try {
      h = History::parse(fields[0], alphabet);
    } catch (const ParseError& e) {
      throw SchemaError(where + ": " + e.what());
    }
    m.hist_depth = std::max(m.hist_depth, h.length());
    m.row_histories.push_back(std::move(h));
    probs.push_back(parse_number(fields[1], where));
    std::vector<double> row;
    row.reserve(test_tokens.size());
    for (std::size_t c = 2; c < fields.size(); ++c) {
      row.push_back(parse_number(fields[c], where));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw SchemaError("csv: no data rows");
  if (!m.row_histories.front().empty()) {
    throw SchemaError("csv: first row must be the empty history");
  }
  m.history_probs = Eigen::Map<Eigen::VectorXd>(probs.data(), static_cast<Eigen::Index>(probs.size()));
  m.entries.resize(static_cast<Eigen::Index>(rows.size()),
                   static_cast<Eigen::Index>(m.col_tests.size()));
  for (Eigen::Index r = 0; r < m.entries.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.entries.cols(); ++c) {
      m.entries(r, c) = rows[r][c];
    }
  }
  return m;
}

}  // namespace psr
