#include <doctest.h>

#include <cmath>
#include <memory>

#include "psrkit/errors.hpp"
#include "psrkit/markov_model.hpp"
#include "psrkit/pomdp_model.hpp"
#include "psrkit/psr_model.hpp"
#include "psrkit/systems.hpp"

#include "oracles.hpp"

using psr::Alphabet;
using psr::Step;
using psr::Test;

namespace {

// Two-state chain with asymmetric emissions; numbers chosen so the first
// belief update is checkable by hand.
psr::PomdpModel two_state() {
  Alphabet alphabet({"go"}, {"x", "y"});
  Eigen::MatrixXd t(2, 2);
  t << 0.7, 0.3, 0.2, 0.8;
  Eigen::VectorXd ox(2), oy(2), b0(2);
  ox << 0.9, 0.4;
  oy << 0.1, 0.6;
  b0 << 0.5, 0.5;
  return psr::PomdpModel(alphabet, {t}, {ox, oy}, b0);
}

// Order-1 window model over one action and two observations.
psr::MarkovModel window_model() {
  Alphabet alphabet({"u"}, {"0", "1"});
  Eigen::MatrixXd rows(3, 2);  // windows: [u0], [u1], [before start]
  rows << 0.9, 0.1, 0.25, 0.75, 0.5, 0.5;
  return psr::MarkovModel(alphabet, 1, {rows});
}

// One-core-test model of an iid coin with p(heads) = 0.3.
psr::LinearPsrModel coin_psr() {
  Alphabet alphabet({"c"}, {"h", "t"});
  Eigen::VectorXd p0(1), mh(1), mt(1);
  p0 << 0.3;
  mh << 1.0;
  mt << 7.0 / 3.0;
  Eigen::MatrixXd Mh(1, 1), Mt(1, 1);
  Mh << 0.3;
  Mt << 0.7;
  return psr::LinearPsrModel(alphabet, {Test({{0, 0}})}, p0, {mh, mt}, {Mh, Mt});
}

}  // namespace

TEST_SUITE_BEGIN("models");

TEST_CASE("pomdp constructor rejects broken stochastic structure") {
  Alphabet alphabet({"go"}, {"x", "y"});
  Eigen::MatrixXd t(2, 2);
  t << 0.7, 0.3, 0.2, 0.8;
  Eigen::VectorXd ox(2), oy(2), b0(2);
  ox << 0.9, 0.4;
  oy << 0.1, 0.6;
  b0 << 0.5, 0.5;

  Eigen::MatrixXd bad_rows = t;
  bad_rows(0, 0) = 0.6;  // row sums to 0.9
  CHECK_THROWS_AS(psr::PomdpModel(alphabet, {bad_rows}, {ox, oy}, b0), psr::SchemaError);

  Eigen::MatrixXd negative = t;
  negative(0, 0) = -0.1;
  negative(0, 1) = 1.1;
  CHECK_THROWS_AS(psr::PomdpModel(alphabet, {negative}, {ox, oy}, b0), psr::SchemaError);

  Eigen::VectorXd bad_emit = ox;
  bad_emit[0] = 0.8;  // x+y emissions from state 0 sum to 0.9
  CHECK_THROWS_AS(psr::PomdpModel(alphabet, {t}, {bad_emit, oy}, b0), psr::SchemaError);

  Eigen::VectorXd bad_b0(2);
  bad_b0 << 0.7, 0.7;
  CHECK_THROWS_AS(psr::PomdpModel(alphabet, {t}, {ox, oy}, bad_b0), psr::SchemaError);

  CHECK_THROWS_AS(psr::PomdpModel(alphabet, {t, t}, {ox, oy}, b0), psr::SchemaError);
}

TEST_CASE("pomdp one-step update conditions on the departing state") {
  psr::PomdpModel m = two_state();
  CHECK(m.predict(Test({{0, 0}})) == doctest::Approx(0.65).epsilon(1e-12));
  const double p = m.update({0, 0});
  CHECK(p == doctest::Approx(0.65).epsilon(1e-12));
  // T^T (O_x .* b) = (0.355, 0.295), normalized by 0.65.
  CHECK(m.belief()[0] == doctest::Approx(0.355 / 0.65).epsilon(1e-12));
  CHECK(m.belief()[1] == doctest::Approx(0.295 / 0.65).epsilon(1e-12));
}

TEST_CASE("pomdp predictions agree with explicit path enumeration") {
  psr::PomdpModel m = two_state();
  for (const auto& t : psr::enumerate_sequences(m.alphabet(), 4, true)) {
    CHECK(m.predict_raw(t) ==
          doctest::Approx(oracle::path_probability(m, t, m.initial_belief())).epsilon(1e-12));
  }
  // And conditionally, after a concrete history.
  const psr::History h({{0, 0}, {0, 1}});
  psr::PomdpModel after = two_state();
  after.replay(h);
  for (const auto& t : psr::enumerate_sequences(m.alphabet(), 3, false)) {
    CHECK(after.predict_raw(t) ==
          doctest::Approx(oracle::conditional_path_probability(m, h, t)).epsilon(1e-10));
  }
}

TEST_CASE("impossible steps are refused and leave the state untouched") {
  psr::PomdpModel m = psr::float_reset();
  CHECK(m.predict(Test::parse("r1", m.alphabet())) == doctest::Approx(1.0));
  CHECK_THROWS_AS(m.update({0, 1}), psr::ImpossibleObservation);  // f never emits 1
  CHECK(m.predict(Test::parse("r1", m.alphabet())) == doctest::Approx(1.0));
}

TEST_CASE("replay returns the history probability") {
  psr::PomdpModel m = psr::float_reset();
  const psr::History h = psr::History::parse("f0.f0.r1", m.alphabet());
  const double p = m.replay(h);
  psr::PomdpModel fresh = psr::float_reset();
  CHECK(p == doctest::Approx(oracle::path_probability(fresh, h, fresh.initial_belief()))
                 .epsilon(1e-12));
}

TEST_CASE("window model starts from the placeholder row") {
  psr::MarkovModel m = window_model();
  CHECK(m.order() == 1);
  CHECK(m.num_window_states() == 3);
  CHECK(m.window_index() == 2);
  CHECK(m.predict(Test({{0, 0}})) == doctest::Approx(0.5));
  CHECK(m.update({0, 0}) == doctest::Approx(0.5));
  CHECK(m.window_index() == 0);
  CHECK(m.predict(Test({{0, 0}})) == doctest::Approx(0.9));
  // Two-step products from the reset state.
  m.reset();
  CHECK(m.predict(Test({{0, 0}, {0, 0}})) == doctest::Approx(0.5 * 0.9));
  CHECK(m.predict(Test({{0, 1}, {0, 1}})) == doctest::Approx(0.5 * 0.75));
  CHECK(m.window_index() == 2);  // prediction did not move the window
}

TEST_CASE("window model rejects badly shaped or non-stochastic rows") {
  Alphabet alphabet({"u"}, {"0", "1"});
  Eigen::MatrixXd rows(3, 2);
  rows << 0.9, 0.1, 0.25, 0.75, 0.5, 0.5;
  CHECK_THROWS_AS(psr::MarkovModel(alphabet, 0, {rows}), psr::SchemaError);
  CHECK_THROWS_AS(psr::MarkovModel(alphabet, 2, {rows}), psr::SchemaError);
  Eigen::MatrixXd bad = rows;
  bad(1, 0) = 0.3;
  CHECK_THROWS_AS(psr::MarkovModel(alphabet, 1, {bad}), psr::SchemaError);
}

TEST_CASE("second-order window shifts oldest-first") {
  Alphabet alphabet({"u"}, {"0", "1"});
  const int base = 3;  // two pairs plus the placeholder
  Eigen::MatrixXd rows(base * base, 2);
  for (int i = 0; i < base * base; ++i) {
    const double p = (i + 1.0) / (base * base + 1.0);
    rows.row(i) << p, 1.0 - p;
  }
  psr::MarkovModel m(alphabet, 2, {rows});
  CHECK(m.window_index() == 2 * base + 2);
  CHECK(m.predict(Test({{0, 1}})) == doctest::Approx(rows(2 * base + 2, 1)));
  m.update({0, 1});
  CHECK(m.window_index() == 2 * base + 1);  // [placeholder, u1]
  m.update({0, 0});
  CHECK(m.window_index() == 1 * base + 0);  // [u1, u0]
}

TEST_CASE("predictive-state model predicts and updates linearly") {
  psr::LinearPsrModel m = coin_psr();
  CHECK(m.predict(Test::parse("ch", m.alphabet())) == doctest::Approx(0.3));
  CHECK(m.predict(Test::parse("ct", m.alphabet())) == doctest::Approx(0.7));
  CHECK(m.predict(Test::parse("ch.ch", m.alphabet())) == doctest::Approx(0.09));
  CHECK(m.predict(Test::parse("ct.ch", m.alphabet())) == doctest::Approx(0.21));
  CHECK(m.update({0, 1}) == doctest::Approx(0.7));
  CHECK(m.state()[0] == doctest::Approx(0.3));  // iid: the state is invariant
  const Eigen::VectorXd w = m.test_weight(Test::parse("ch.ct", m.alphabet()));
  CHECK(w[0] == doctest::Approx(0.3 * 7.0 / 3.0));
}

TEST_CASE("predictions clamp while raw values stay exposed") {
  Alphabet alphabet({"c"}, {"h", "t"});
  Eigen::VectorXd p0(1), mh(1), mt(1);
  p0 << 0.6;
  mh << 2.0;
  mt << -1.0 / 3.0;
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(1, 1);
  psr::LinearPsrModel m(alphabet, {Test({{0, 0}})}, p0, {mh, mt}, {M, M});
  CHECK(m.predict_raw(Test({{0, 0}})) == doctest::Approx(1.2));
  CHECK(m.predict(Test({{0, 0}})) == doctest::Approx(1.0));
  CHECK(m.predict_raw(Test({{0, 1}})) == doctest::Approx(-0.2));
  CHECK(m.predict(Test({{0, 1}})) == doctest::Approx(0.0));
  CHECK(m.predict(Test{}) == doctest::Approx(1.0));
}

TEST_CASE("psr constructor rejects inconsistent shapes") {
  Alphabet alphabet({"c"}, {"h", "t"});
  Eigen::VectorXd p0(1), m1(1);
  p0 << 0.3;
  m1 << 1.0;
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(1, 1);
  CHECK_THROWS_AS(psr::LinearPsrModel(alphabet, {}, p0, {m1, m1}, {M, M}), psr::SchemaError);
  CHECK_THROWS_AS(psr::LinearPsrModel(alphabet, {Test{}}, p0, {m1, m1}, {M, M}),
                  psr::SchemaError);
  CHECK_THROWS_AS(psr::LinearPsrModel(alphabet, {Test({{0, 0}})}, p0, {m1}, {M, M}),
                  psr::SchemaError);
  Eigen::MatrixXd wide(1, 2);
  wide << 1.0, 0.0;
  CHECK_THROWS_AS(psr::LinearPsrModel(alphabet, {Test({{0, 0}})}, p0, {m1, m1}, {M, wide}),
                  psr::SchemaError);
}

TEST_CASE("simulation is deterministic per seed and tracks the model") {
  psr::PomdpModel a = psr::float_reset();
  psr::PomdpModel b = psr::float_reset();
  const auto t1 = psr::simulate(a, psr::ActionSource::uniform(), 50, 42);
  const auto t2 = psr::simulate(b, psr::ActionSource::uniform(), 50, 42);
  CHECK(t1 == t2);
  psr::PomdpModel c = psr::float_reset();
  const auto t3 = psr::simulate(c, psr::ActionSource::uniform(), 50, 43);
  CHECK(t1 != t3);

  // A pure reset policy pins the register to the end state: always observe 1.
  psr::PomdpModel d = psr::float_reset();
  const auto resets = psr::simulate(d, psr::ActionSource::fixed({1}), 10, 7);
  for (const Step& s : resets) {
    CHECK(s.action == 1);
    CHECK(s.observation == 1);
  }

  // Fixed sources cycle their sequence.
  psr::PomdpModel e = psr::float_reset();
  const auto cycled = psr::simulate(e, psr::ActionSource::fixed({0, 1}), 6, 7);
  for (int i = 0; i < 6; ++i) CHECK(cycled[i].action == i % 2);
}

TEST_CASE("simulated observation frequencies track the distribution") {
  psr::LinearPsrModel m = coin_psr();
  const auto trajectory = psr::simulate(m, psr::ActionSource::fixed({0}), 20000, 11);
  int heads = 0;
  for (const Step& s : trajectory) heads += s.observation == 0 ? 1 : 0;
  CHECK(std::abs(heads / 20000.0 - 0.3) < 0.02);
}

TEST_SUITE_END();
