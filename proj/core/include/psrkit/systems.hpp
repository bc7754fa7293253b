#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "psrkit/markov_model.hpp"
#include "psrkit/pomdp_model.hpp"

namespace psr {

// Five-state chain on actions {f, r} and observations {0, 1}. f drifts one
// state left or right with probability 1/2 (reflecting at the ends) and
// always emits 0; r jumps to the rightmost state, emitting 1 exactly when
// the jump starts there and 0 otherwise. Starts at the rightmost state.
PomdpModel float_reset();

// k-bit register on actions {rotL, rotR, flip} and observations {0, 1}.
// rotL/rotR rotate the bits, flip toggles the leftmost bit; the leftmost
// bit after the action is emitted. 2^k deterministic states, all zeros
// initially. k in [1, 10].
PomdpModel rotate_register(int k);

// Hub-and-spokes round-trip system on actions {a, b} and observations
// {o0, o1, o2, o3, o4}. From the hub, either action moves to one of three
// spoke states uniformly, announcing the destination (o1/o2/o3); from a
// spoke, the action leads back to the hub and the emission depends only on
// the spoke being left: a emits o4 from s1 and o0 from s2, s3; b emits o4
// from s2 and o0 from s1, s3. So under any action sequence two spokes are
// indistinguishable, yet every spoke pair differs on some test. The hub is
// represented by three exit-committed states so emissions stay diagonal per
// (action, obs); the belief starts uniform over them, which is exactly "at
// the hub".
PomdpModel fig6_system();

// Index of a spoke state in fig6_system's hidden-state order
// [hub>s1, hub>s2, hub>s3, s1, s2, s3]; accepts "s1", "s2", "s3".
int fig6_state_index(std::string_view name);

struct ConfoundPair {
  std::string action_sequence;  // rendered, actions joined by '.'
  std::string state_a;
  std::string state_b;
  std::string witness_test;     // rendered test the pair disagrees on
  double mismatch = 0.0;        // |difference| at the witness
};

struct ConfoundReport {
  bool pass = false;
  int max_len = 0;
  // Tests whose first-step emission breaks the committed-exit pattern.
  std::vector<std::string> first_step_failures;
  // For every action sequence up to max_len: a pair of spoke states agreeing
  // on all its completions yet distinguished elsewhere.
  std::vector<ConfoundPair> confounded;
  std::vector<std::string> unconfounded_action_sequences;
  nlohmann::json to_json() const;
};

// Verifies the structural signature of fig6_system over all tests of length
// up to max_len (<= 4): length-one predictions from the spokes match the
// committed-exit pattern exactly, and every action sequence admits a
// confounded-but-distinguishable spoke pair.
ConfoundReport fig6_confound_check(int max_len);

struct SeriesReport {
  bool pass = false;
  std::vector<double> reset_now;    // p(r emits 1 | h) after i floats
  std::vector<double> reset_after;  // p(f emits 0 then r emits 1 | h)
  bool pairs_match = false;     // values repeat in adjacent pairs past the start
  bool pairs_decrease = false;  // each pair strictly below the previous
  bool pairs_distinct = false;  // (reset_now, reset_after) never repeats
  nlohmann::json to_json() const;
};

// Tracks the two reset predictions along a pure-float trajectory of
// float_reset (steps >= 6): the series pairs up, strictly decreases across
// pairs, and the prediction pair distinguishes every prefix.
SeriesReport float_reset_series_check(int steps);

// Random k-state belief model: transition rows and per-state observation
// distributions (and the initial belief) drawn from flat Dirichlets.
// k <= 12, num_actions * num_observations <= 9.
PomdpModel random_pomdp(int num_states, int num_actions, int num_observations,
                        std::uint64_t seed);

// Random order-n window model, n in {1, 2}: each reachable window row is a
// flat-Dirichlet draw; placeholder windows defer to a randomly chosen
// designated initial window, as if the process had started n steps earlier.
MarkovModel random_markov(int order, int num_actions, int num_observations,
                          std::uint64_t seed);

}  // namespace psr
