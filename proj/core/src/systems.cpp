#include "psrkit/systems.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "psrkit/errors.hpp"
#include "psrkit/random.hpp"
#include "psrkit/tolerances.hpp"

namespace psr {
namespace {

constexpr double kExactTol = 1e-12;
constexpr double kWitnessTol = 1e-6;

Eigen::VectorXd basis(int k, int i) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(k);
  v[i] = 1.0;
  return v;
}

}  // namespace

PomdpModel float_reset() {
  Alphabet alphabet({"f", "r"}, {"0", "1"});
  const int k = 5;
  Eigen::MatrixXd drift = Eigen::MatrixXd::Zero(k, k);
  for (int s = 0; s < k; ++s) {
    // Blocked moves stay put, so the end states hold with probability 1/2.
    drift(s, std::max(s - 1, 0)) += 0.5;
    drift(s, std::min(s + 1, k - 1)) += 0.5;
  }
  Eigen::MatrixXd jump = Eigen::MatrixXd::Zero(k, k);
  jump.col(k - 1).setOnes();

  std::vector<Eigen::VectorXd> diags;
  diags.push_back(Eigen::VectorXd::Ones(k));            // f emits 0
  diags.push_back(Eigen::VectorXd::Zero(k));            // f never emits 1
  Eigen::VectorXd at_end = basis(k, k - 1);
  diags.push_back(Eigen::VectorXd::Ones(k) - at_end);   // r emits 0 off the end state
  diags.push_back(at_end);                              // r emits 1 from the end state

  return PomdpModel(std::move(alphabet), {std::move(drift), std::move(jump)},
                    std::move(diags), basis(k, k - 1));
}

PomdpModel rotate_register(int k) {
  if (k < 1 || k > 10) throw Error("rotate_register: k must be in [1, 10]");
  Alphabet alphabet({"rotL", "rotR", "flip"}, {"0", "1"});
  const int n = 1 << k;
  const int mask = n - 1;
  auto rot_left = [&](int s) { return ((s << 1) & mask) | (s >> (k - 1)); };
  auto rot_right = [&](int s) { return (s >> 1) | ((s & 1) << (k - 1)); };
  auto flip = [&](int s) { return s ^ (1 << (k - 1)); };

  std::vector<Eigen::MatrixXd> transitions;
  std::vector<Eigen::VectorXd> diags;
  for (int action = 0; action < 3; ++action) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd top = Eigen::VectorXd::Zero(n);
    for (int s = 0; s < n; ++s) {
      const int next = action == 0 ? rot_left(s) : action == 1 ? rot_right(s) : flip(s);
      t(s, next) = 1.0;
      top[s] = static_cast<double>((next >> (k - 1)) & 1);
    }
    transitions.push_back(std::move(t));
    diags.push_back(Eigen::VectorXd::Ones(n) - top);  // emits 0
    diags.push_back(std::move(top));                  // emits 1
  }
  return PomdpModel(std::move(alphabet), std::move(transitions), std::move(diags),
                    basis(n, 0));
}

PomdpModel fig6_system() {
  Alphabet alphabet({"a", "b"}, {"o0", "o1", "o2", "o3", "o4"});
  const int k = 6;  // [hub>s1, hub>s2, hub>s3, s1, s2, s3]
  Eigen::MatrixXd move = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < 3; ++i) {
    move(i, 3 + i) = 1.0;  // committed hub exits
    move(3 + i, 0) = move(3 + i, 1) = move(3 + i, 2) = 1.0 / 3.0;
  }

  // Leaving a hub variant announces the destination; leaving a spoke emits
  // o4 or o0 depending on the action and the spoke.
  auto diag_for = [&](int action, int obs) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(k);
    for (int i = 0; i < 3; ++i) {
      if (obs == i + 1) d[i] = 1.0;
    }
    const int o4_spoke = action == 0 ? 3 : 4;  // a: s1, b: s2
    for (int spoke = 3; spoke < 6; ++spoke) {
      const int emitted = spoke == o4_spoke ? 4 : 0;
      if (obs == emitted) d[spoke] = 1.0;
    }
    return d;
  };
  std::vector<Eigen::VectorXd> diags;
  for (int a = 0; a < 2; ++a) {
    for (int o = 0; o < 5; ++o) diags.push_back(diag_for(a, o));
  }
  Eigen::VectorXd hub = Eigen::VectorXd::Zero(k);
  hub.head(3).setConstant(1.0 / 3.0);
  return PomdpModel(std::move(alphabet), {move, move}, std::move(diags), std::move(hub));
}

int fig6_state_index(std::string_view name) {
  if (name == "s1") return 3;
  if (name == "s2") return 4;
  if (name == "s3") return 5;
  throw Error("fig6_state_index: unknown state \"" + std::string(name) + "\"");
}

nlohmann::json ConfoundReport::to_json() const {
  nlohmann::json j;
  j["pass"] = pass;
  j["max_len"] = max_len;
  j["first_step_failures"] = first_step_failures;
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : confounded) {
    pairs.push_back({{"action_sequence", p.action_sequence},
                     {"states", {p.state_a, p.state_b}},
                     {"witness_test", p.witness_test},
                     {"mismatch", p.mismatch}});
  }
  j["confounded"] = std::move(pairs);
  j["unconfounded_action_sequences"] = unconfounded_action_sequences;
  return j;
}

ConfoundReport fig6_confound_check(int max_len) {
  if (max_len < 1 || max_len > 4) {
    throw Error("fig6_confound_check: max_len must be in [1, 4]");
  }
  ConfoundReport report;
  report.max_len = max_len;
  const PomdpModel system = fig6_system();
  const Alphabet& alphabet = system.alphabet();
  const std::vector<Test> tests = enumerate_sequences(alphabet, max_len, false);

  const char* spoke_names[3] = {"s1", "s2", "s3"};
  Eigen::MatrixXd pred(3, static_cast<Eigen::Index>(tests.size()));
  for (int i = 0; i < 3; ++i) {
    auto probe = system;
    probe.set_belief(basis(6, fig6_state_index(spoke_names[i])));
    for (std::size_t j = 0; j < tests.size(); ++j) {
      pred(i, static_cast<Eigen::Index>(j)) = probe.predict_raw(tests[j]);
    }
  }

  // Leaving a spoke must follow the committed-exit emission pattern.
  for (std::size_t j = 0; j < tests.size(); ++j) {
    if (tests[j].length() != 1) continue;
    const Step s = tests[j][0];
    for (int i = 0; i < 3; ++i) {
      const int o4_spoke = s.action == 0 ? 0 : 1;  // spoke list position of the o4 emitter
      const int emitted = i == o4_spoke ? 4 : 0;
      const double expected = s.observation == emitted ? 1.0 : 0.0;
      if (std::abs(pred(i, static_cast<Eigen::Index>(j)) - expected) > kExactTol) {
        report.first_step_failures.push_back(std::string(spoke_names[i]) + " on " +
                                             tests[j].render(alphabet));
      }
    }
  }

  // Every action sequence must leave some spoke pair indistinguishable on
  // its completions yet distinguishable elsewhere.
  for (int len = 1; len <= max_len; ++len) {
    std::vector<int> actions(len, 0);
    while (true) {
      std::string rendered;
      for (int i = 0; i < len; ++i) {
        if (i > 0) rendered += '.';
        rendered += alphabet.action_name(actions[i]);
      }
      bool found = false;
      for (int x = 0; x < 3 && !found; ++x) {
        for (int y = x + 1; y < 3 && !found; ++y) {
          bool agree = true;
          for (std::size_t j = 0; j < tests.size() && agree; ++j) {
            if (tests[j].action_sequence() != actions) continue;
            agree = std::abs(pred(x, static_cast<Eigen::Index>(j)) -
                             pred(y, static_cast<Eigen::Index>(j))) <= kExactTol;
          }
          if (!agree) continue;
          for (std::size_t j = 0; j < tests.size(); ++j) {
            if (tests[j].action_sequence() == actions) continue;
            const double gap = std::abs(pred(x, static_cast<Eigen::Index>(j)) -
                                        pred(y, static_cast<Eigen::Index>(j)));
            if (gap > kWitnessTol) {
              report.confounded.push_back({rendered, spoke_names[x], spoke_names[y],
                                           tests[j].render(alphabet), gap});
              found = true;
              break;
            }
          }
        }
      }
      if (!found) report.unconfounded_action_sequences.push_back(rendered);

      int digit = len - 1;
      while (digit >= 0 && actions[digit] == alphabet.num_actions() - 1) {
        actions[digit--] = 0;
      }
      if (digit < 0) break;
      ++actions[digit];
    }
  }
  report.pass =
      report.first_step_failures.empty() && report.unconfounded_action_sequences.empty();
  return report;
}

nlohmann::json SeriesReport::to_json() const {
  nlohmann::json j;
  j["pass"] = pass;
  j["reset_now"] = reset_now;
  j["reset_after"] = reset_after;
  j["pairs_match"] = pairs_match;
  j["pairs_decrease"] = pairs_decrease;
  j["pairs_distinct"] = pairs_distinct;
  return j;
}

SeriesReport float_reset_series_check(int steps) {
  if (steps < 6) throw Error("float_reset_series_check: needs at least 6 steps");
  SeriesReport report;
  PomdpModel model = float_reset();
  const Alphabet& alphabet = model.alphabet();
  const Test reset_now = Test::parse("r1", alphabet);
  const Test reset_after = Test::parse("f0.r1", alphabet);
  const Step drift{alphabet.action_index("f"), alphabet.observation_index("0")};
  for (int i = 0; i <= steps; ++i) {
    report.reset_now.push_back(model.predict(reset_now));
    report.reset_after.push_back(model.predict(reset_after));
    if (i < steps) model.update(drift);
  }

  const std::vector<double>& v = report.reset_now;
  report.pairs_match = true;
  for (std::size_t i = 1; i + 1 < v.size(); i += 2) {
    // The drift predictions repeat in exact pairs: dyadic values, no noise.
    if (v[i] != v[i + 1]) report.pairs_match = false;
  }
  report.pairs_decrease = true;
  for (std::size_t i = 1; i + 2 < v.size(); i += 2) {
    if (!(v[i] > v[i + 2])) report.pairs_decrease = false;
  }
  report.pairs_distinct = true;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (v[i] == v[j] && report.reset_after[i] == report.reset_after[j]) {
        report.pairs_distinct = false;
      }
    }
  }
  report.pass = report.pairs_match && report.pairs_decrease && report.pairs_distinct;
  return report;
}

PomdpModel random_pomdp(int num_states, int num_actions, int num_observations,
                        std::uint64_t seed) {
  if (num_states < 1 || num_states > 12) {
    throw Error("random_pomdp: num_states must be in [1, 12]");
  }
  if (num_actions < 1 || num_observations < 1 || num_actions * num_observations > 9) {
    throw Error("random_pomdp: need num_actions * num_observations in [1, 9]");
  }
  std::vector<std::string> actions;
  std::vector<std::string> observations;
  for (int a = 0; a < num_actions; ++a) actions.push_back(std::string(1, "abcdefghi"[a]));
  for (int o = 0; o < num_observations; ++o) observations.push_back(std::to_string(o));
  Alphabet alphabet(std::move(actions), std::move(observations));

  std::mt19937_64 rng(seed);
  std::vector<Eigen::MatrixXd> transitions;
  for (int a = 0; a < num_actions; ++a) {
    Eigen::MatrixXd t(num_states, num_states);
    for (int s = 0; s < num_states; ++s) t.row(s) = dirichlet_flat(rng, num_states).transpose();
    transitions.push_back(std::move(t));
  }
  std::vector<Eigen::VectorXd> diags(
      static_cast<std::size_t>(num_actions * num_observations),
      Eigen::VectorXd::Zero(num_states));
  for (int a = 0; a < num_actions; ++a) {
    for (int s = 0; s < num_states; ++s) {
      Eigen::VectorXd w = dirichlet_flat(rng, num_observations);
      for (int o = 0; o < num_observations; ++o) {
        diags[static_cast<std::size_t>(a * num_observations + o)][s] = w[o];
      }
    }
  }
  Eigen::VectorXd b0 = dirichlet_flat(rng, num_states);
  return PomdpModel(std::move(alphabet), std::move(transitions), std::move(diags),
                    std::move(b0));
}

MarkovModel random_markov(int order, int num_actions, int num_observations,
                          std::uint64_t seed) {
  if (order < 1 || order > 2) throw Error("random_markov: order must be 1 or 2");
  if (num_actions < 1 || num_observations < 1 || num_actions * num_observations > 9) {
    throw Error("random_markov: need num_actions * num_observations in [1, 9]");
  }
  std::vector<std::string> actions;
  std::vector<std::string> observations;
  for (int a = 0; a < num_actions; ++a) actions.push_back(std::string(1, "abcdefghi"[a]));
  for (int o = 0; o < num_observations; ++o) observations.push_back(std::to_string(o));
  Alphabet alphabet(std::move(actions), std::move(observations));

  const int pairs = num_actions * num_observations;
  const int base = pairs + 1;
  int rows = 1;
  for (int i = 0; i < order; ++i) rows *= base;

  auto digits_of = [&](int index) {
    std::vector<int> digits(order);
    for (int i = order - 1; i >= 0; --i) {
      digits[i] = index % base;
      index /= base;
    }
    return digits;  // oldest first
  };
  auto index_of = [&](const std::vector<int>& digits) {
    int index = 0;
    for (int d : digits) index = index * base + d;
    return index;
  };

  std::mt19937_64 rng(seed);
  std::vector<Eigen::MatrixXd> obs(static_cast<std::size_t>(num_actions),
                                   Eigen::MatrixXd::Zero(rows, num_observations));
  for (int a = 0; a < num_actions; ++a) {
    for (int r = 0; r < rows; ++r) {
      const std::vector<int> digits = digits_of(r);
      bool real = true;
      for (int d : digits) real = real && d < pairs;
      if (real) obs[a].row(r) = dirichlet_flat(rng, num_observations).transpose();
    }
  }
  // The placeholder window behaves as if the process had started `order`
  // steps earlier with this randomly chosen designated window.
  std::vector<int> designated(order);
  for (int i = 0; i < order; ++i) designated[i] = uniform_index(rng, pairs);

  for (int r = 0; r < rows; ++r) {
    const std::vector<int> digits = digits_of(r);
    int placeholders = 0;
    while (placeholders < order && digits[placeholders] == pairs) ++placeholders;
    bool rest_real = true;
    for (int i = placeholders; i < order; ++i) rest_real = rest_real && digits[i] < pairs;
    if (placeholders == 0 && rest_real) continue;  // fully real, already drawn
    for (int a = 0; a < num_actions; ++a) {
      if (!rest_real) {
        // Placeholder after a real digit: unreachable, any distribution.
        obs[a].row(r).setConstant(1.0 / num_observations);
        continue;
      }
      std::vector<int> effective(digits.begin() + placeholders, digits.end());
      effective.insert(effective.begin(), designated.end() - placeholders, designated.end());
      obs[a].row(r) = obs[a].row(index_of(effective));
    }
  }
  return MarkovModel(std::move(alphabet), order, std::move(obs));
}

}  // namespace psr
