#include <doctest.h>

#include <string>
#include <vector>

#include "psrkit/model_io.hpp"
#include "psrkit/sysdyn.hpp"
#include "psrkit/systems.hpp"

using psr::Test;

TEST_SUITE_BEGIN("systems");

TEST_CASE("float register starts at the top and drifts by halves") {
  psr::PomdpModel m = psr::float_reset();
  const auto& a = m.alphabet();
  CHECK(m.num_states() == 5);
  CHECK(a.action_index("f") == 0);
  CHECK(a.action_index("r") == 1);
  CHECK(m.predict(Test::parse("r1", a)) == doctest::Approx(1.0));
  CHECK(m.predict(Test::parse("f1", a)) == doctest::Approx(0.0));
  m.update({0, 0});
  CHECK(m.belief()[3] == doctest::Approx(0.5));
  CHECK(m.belief()[4] == doctest::Approx(0.5));
  m.update({1, 1});  // reset observed from the top cell
  CHECK(m.belief()[4] == doctest::Approx(1.0));
}

TEST_CASE("float register reset series pairs up and decreases") {
  const psr::SeriesReport r = psr::float_reset_series_check(12);
  CHECK(r.pass);
  CHECK(r.pairs_match);
  CHECK(r.pairs_decrease);
  CHECK(r.pairs_distinct);
  REQUIRE(r.reset_now.size() == 13);  // prefix of every length up to 12 floats
  const std::vector<double> head = {1, 0.5, 0.5, 0.375, 0.375, 0.3125, 0.3125,
                                    0.2734375, 0.2734375};
  for (std::size_t i = 0; i < head.size(); ++i) {
    CHECK(r.reset_now[i] == doctest::Approx(head[i]).epsilon(1e-12));
  }
  // One float ahead: predicting the reset after a drift equals the next
  // reset-now value, since the drift itself is silent but certain.
  for (std::size_t i = 0; i + 1 < r.reset_now.size(); ++i) {
    CHECK(r.reset_after[i] == doctest::Approx(r.reset_now[i + 1]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(psr::float_reset_series_check(5), psr::Error);
}

TEST_CASE("rotate register is deterministic and fully observable in k steps") {
  psr::PomdpModel m = psr::rotate_register(2);
  const auto& a = m.alphabet();
  CHECK(m.num_states() == 4);
  // flip raises the top bit; rotations move it.
  CHECK(m.predict(Test::parse("flip1", a)) == doctest::Approx(1.0));
  CHECK(m.predict(Test::parse("flip1.rotL0", a)) == doctest::Approx(1.0));
  CHECK(m.predict(Test::parse("flip1.rotL0.rotL1", a)) == doctest::Approx(1.0));
  CHECK(m.predict(Test::parse("rotL0", a)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(m.update({2, 0}), psr::ImpossibleObservation);  // flip must show 1

  // Every one-step prediction is 0 or 1 along any history: the system is
  // deterministic.
  m.reset();
  m.update({2, 1});
  m.update({0, 0});
  for (int action = 0; action < 3; ++action) {
    for (int obs = 0; obs < 2; ++obs) {
      const double p = m.predict(Test({{action, obs}}));
      CHECK((p == doctest::Approx(0.0) || p == doctest::Approx(1.0)));
    }
  }

  CHECK(psr::numerical_rank(psr::build_matrix(psr::rotate_register(2), 4, 4)) == 4);
  CHECK_THROWS_AS(psr::rotate_register(0), psr::Error);
  CHECK_THROWS_AS(psr::rotate_register(11), psr::Error);
}

TEST_CASE("hub system exposes the committed-exit emission pattern") {
  psr::PomdpModel m = psr::fig6_system();
  const auto& a = m.alphabet();
  CHECK(m.num_states() == 6);
  CHECK(m.predict(Test::parse("ao1", a)) == doctest::Approx(1.0 / 3.0));
  CHECK(m.predict(Test::parse("bo2", a)) == doctest::Approx(1.0 / 3.0));
  CHECK(m.predict(Test::parse("ao4", a)) == doctest::Approx(0.0));

  auto from_spoke = [&](const char* name) {
    psr::PomdpModel probe = psr::fig6_system();
    Eigen::VectorXd basis = Eigen::VectorXd::Zero(6);
    basis[psr::fig6_state_index(name)] = 1.0;
    probe.set_belief(basis);
    return probe;
  };
  CHECK(from_spoke("s1").predict(Test::parse("ao4", a)) == doctest::Approx(1.0));
  CHECK(from_spoke("s2").predict(Test::parse("ao4", a)) == doctest::Approx(0.0));
  CHECK(from_spoke("s2").predict(Test::parse("bo4", a)) == doctest::Approx(1.0));
  CHECK(from_spoke("s3").predict(Test::parse("ao0", a)) == doctest::Approx(1.0));
  CHECK(from_spoke("s3").predict(Test::parse("bo0", a)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(psr::fig6_state_index("hub"), psr::Error);
}

TEST_CASE("every action sequence confounds some spoke pair that a test splits") {
  const psr::ConfoundReport r = psr::fig6_confound_check(3);
  CHECK(r.pass);
  CHECK(r.first_step_failures.empty());
  CHECK(r.unconfounded_action_sequences.empty());
  REQUIRE(r.confounded.size() == 2 + 4 + 8);

  // Single actions pin the confounded pair and its witness by hand: under a,
  // s2 and s3 both answer o0, but b separates them.
  bool saw_a = false, saw_b = false;
  for (const auto& pair : r.confounded) {
    CHECK(pair.mismatch > 1e-6);
    if (pair.action_sequence == "a") {
      saw_a = true;
      CHECK(pair.state_a == "s2");
      CHECK(pair.state_b == "s3");
      CHECK(pair.witness_test == "bo0");
    }
    if (pair.action_sequence == "b") {
      saw_b = true;
      CHECK(pair.state_a == "s1");
      CHECK(pair.state_b == "s3");
      CHECK(pair.witness_test == "ao0");
    }
  }
  CHECK(saw_a);
  CHECK(saw_b);

  const nlohmann::json j = r.to_json();
  CHECK(j["pass"] == true);
  CHECK(j["confounded"].size() == r.confounded.size());

  // Yet the overall system has a small linear dimension.
  CHECK(psr::numerical_rank(psr::build_matrix(psr::fig6_system(), 3, 3)) == 4);
  CHECK_THROWS_AS(psr::fig6_confound_check(0), psr::Error);
  CHECK_THROWS_AS(psr::fig6_confound_check(5), psr::Error);
}

TEST_CASE("random belief models are reproducible and well formed") {
  const psr::PomdpModel a = psr::random_pomdp(5, 2, 2, 17);
  const psr::PomdpModel b = psr::random_pomdp(5, 2, 2, 17);
  CHECK(psr::model_to_json(a).dump() == psr::model_to_json(b).dump());
  const psr::PomdpModel c = psr::random_pomdp(5, 2, 2, 18);
  CHECK(psr::model_to_json(a).dump() != psr::model_to_json(c).dump());

  CHECK(a.alphabet().num_actions() == 2);
  CHECK(a.alphabet().num_observations() == 2);
  CHECK(psr::check_validity(psr::build_matrix(a, 3, 3)).pass());

  CHECK_THROWS_AS(psr::random_pomdp(13, 2, 2, 1), psr::Error);
  CHECK_THROWS_AS(psr::random_pomdp(4, 5, 2, 1), psr::Error);
}

TEST_CASE("random window models are reproducible and well formed") {
  const psr::MarkovModel a = psr::random_markov(2, 2, 2, 23);
  const psr::MarkovModel b = psr::random_markov(2, 2, 2, 23);
  CHECK(psr::model_to_json(a).dump() == psr::model_to_json(b).dump());
  CHECK(a.order() == 2);
  CHECK(a.num_window_states() == 25);

  CHECK(psr::check_validity(psr::build_matrix(a, 3, 3)).pass());
  // Window models of order n live inside a bounded linear dimension.
  CHECK(psr::numerical_rank(psr::build_matrix(psr::random_markov(1, 2, 2, 3), 3, 3)) <= 4);

  CHECK_THROWS_AS(psr::random_markov(3, 2, 2, 1), psr::Error);
  CHECK_THROWS_AS(psr::random_markov(1, 4, 3, 1), psr::Error);
}

TEST_SUITE_END();
