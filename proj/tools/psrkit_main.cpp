#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "psrkit/derive.hpp"
#include "psrkit/errors.hpp"
#include "psrkit/model_io.hpp"
#include "psrkit/random.hpp"
#include "psrkit/sysdyn.hpp"
#include "psrkit/systems.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;
constexpr int kExitSpan = 4;
constexpr int kExitCheckFailed = 5;

struct CommonOptions {
  int hist_depth = 4;
  int test_depth = 4;
  std::string format = "text";
  std::string out;
};

double rank_tolerance() {
  const char* env = std::getenv("PSRKIT_TOL");
  if (env == nullptr) return psr::kDefaultRankTol;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(v > 0.0)) {
    throw psr::Error(std::string("PSRKIT_TOL: invalid tolerance \"") + env + "\"");
  }
  return v;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw psr::Error(out_path + ": cannot open for writing");
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

void emit_report(const json& j, const std::string& text, const CommonOptions& opt) {
  emit(opt.format == "json" ? j.dump(2) : text, opt.out);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::unique_ptr<psr::Model> load_named_model(const std::string& path) {
  return psr::load_model(path);
}

psr::SysDynMatrix load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw psr::SchemaError(path + ": cannot open");
  return psr::read_csv(in);
}

std::vector<psr::Test> parse_core_list(const std::string& list, const psr::Alphabet& alphabet) {
  std::vector<psr::Test> tests;
  std::stringstream ss(list);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) throw psr::ParseError("core-tests: empty entry in list");
    tests.push_back(psr::Test::parse(token, alphabet));
  }
  if (tests.empty()) throw psr::ParseError("core-tests: empty list");
  return tests;
}

int cmd_rank(const std::string& model_path, const CommonOptions& opt, bool plateau) {
  const double tol = rank_tolerance();
  auto model = load_named_model(model_path);
  json j;
  j["model"] = model_path;
  j["tol"] = tol;
  std::ostringstream text;
  if (plateau) {
    psr::PlateauResult result =
        psr::rank_plateau(*model, opt.hist_depth, psr::kDefaultEntryBudget, tol);
    j["plateau"] = {{"met", result.plateau_met},
                    {"depths", result.depths},
                    {"ranks", result.ranks},
                    {"entry_budget", psr::kDefaultEntryBudget}};
    j["rank"] = result.rank;
    text << "model: " << model_path << "\n";
    for (std::size_t i = 0; i < result.depths.size(); ++i) {
      text << "depth " << result.depths[i] << "x" << result.depths[i] << ": rank "
           << result.ranks[i] << "\n";
    }
    if (result.plateau_met) {
      text << "rank: " << result.rank << " (plateaued)";
    } else {
      text << "rank: not settled, entry budget " << psr::kDefaultEntryBudget << " exhausted";
    }
    emit_report(j, text.str(), opt);
    return result.plateau_met ? kExitOk : kExitBudget;
  }
  psr::SysDynMatrix m = psr::build_matrix(*model, opt.hist_depth, opt.test_depth);
  const int rank = psr::numerical_rank(m, tol);
  j["hist_depth"] = opt.hist_depth;
  j["test_depth"] = opt.test_depth;
  j["rows"] = static_cast<long long>(m.entries.rows());
  j["cols"] = static_cast<long long>(m.entries.cols());
  j["rank"] = rank;
  text << "model: " << model_path << "\n"
       << "depths: " << opt.hist_depth << "x" << opt.test_depth << "\n"
       << "rows: " << m.entries.rows() << "\n"
       << "cols: " << m.entries.cols() << "\n"
       << "rank: " << rank;
  emit_report(j, text.str(), opt);
  return kExitOk;
}

int cmd_derive(const std::string& input_path, const CommonOptions& opt,
               const std::string& core_list) {
  const double tol = rank_tolerance();
  std::optional<psr::Derivation> derivation;
  if (ends_with(input_path, ".csv")) {
    if (!core_list.empty()) {
      throw psr::Error("core-tests: overrides apply to belief models, not csv matrices");
    }
    derivation = psr::matrix_to_psr(load_matrix_csv(input_path), tol);
  } else {
    auto model = load_named_model(input_path);
    const auto* pomdp = dynamic_cast<const psr::PomdpModel*>(model.get());
    if (pomdp == nullptr) {
      throw psr::Error(input_path + ": derive needs a pomdp model or a csv matrix");
    }
    std::optional<std::vector<psr::Test>> override_tests;
    if (!core_list.empty()) {
      override_tests = parse_core_list(core_list, pomdp->alphabet());
    }
    derivation = psr::pomdp_to_psr(*pomdp, override_tests, tol);
  }

  const json model_json = psr::model_to_json(derivation->model);
  const json report_json = derivation->report.to_json();
  if (opt.out.empty()) {
    json j;
    j["model"] = model_json;
    j["report"] = report_json;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }
  emit(model_json.dump(2), opt.out);
  std::string report_path = opt.out;
  const std::size_t dot = report_path.find_last_of('.');
  const std::size_t slash = report_path.find_last_of('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
    report_path.resize(dot);
  }
  report_path += ".report.json";
  emit(report_json.dump(2), report_path);
  std::cout << "model: " << opt.out << "\n" << "report: " << report_path << "\n";
  return kExitOk;
}

int cmd_compare(const std::string& path_a, const std::string& path_b,
                const CommonOptions& opt, int samples, std::uint64_t seed) {
  auto model_a = load_named_model(path_a);
  auto model_b = load_named_model(path_b);
  if (!(model_a->alphabet() == model_b->alphabet())) {
    throw psr::Error("compare: the two models use different alphabets");
  }
  const psr::Alphabet& alphabet = model_a->alphabet();
  std::mt19937_64 rng(seed);
  double max_diff = 0.0;
  std::string argmax_history = "eps";
  std::string argmax_test;
  for (int i = 0; i < samples; ++i) {
    model_a->reset();
    model_b->reset();
    psr::History h;
    const int hist_len = psr::uniform_index(rng, opt.hist_depth + 1);
    bool dead = false;
    for (int s = 0; s < hist_len && !dead; ++s) {
      // Walk a realizable history of model A, checking each one-step
      // prediction on both sides before advancing.
      const int a = psr::uniform_index(rng, alphabet.num_actions());
      const double u = psr::canonical_uniform(rng);
      double cum = 0.0;
      int chosen = -1;
      for (int o = 0; o < alphabet.num_observations(); ++o) {
        const double p = model_a->predict(psr::Test({{a, o}}));
        if (p <= 0.0) continue;
        cum += p;
        chosen = o;
        if (u < cum) break;
      }
      if (chosen < 0) break;
      const psr::Test step({{a, chosen}});
      const double pa = model_a->predict_raw(step);
      const double pb = model_b->predict_raw(step);
      if (std::abs(pa - pb) > max_diff) {
        max_diff = std::abs(pa - pb);
        argmax_history = h.render(alphabet);
        argmax_test = step.render(alphabet);
      }
      model_a->update({a, chosen});
      try {
        model_b->update({a, chosen});
      } catch (const psr::ImpossibleObservation&) {
        dead = true;  // the step was possible for A only; already recorded
      }
      h = h.append({a, chosen});
    }
    if (dead) continue;
    const int test_len = 1 + psr::uniform_index(rng, opt.test_depth);
    std::vector<psr::Step> steps;
    for (int s = 0; s < test_len; ++s) {
      steps.push_back({psr::uniform_index(rng, alphabet.num_actions()),
                       psr::uniform_index(rng, alphabet.num_observations())});
    }
    const psr::Test t(std::move(steps));
    const double pa = model_a->predict_raw(t);
    const double pb = model_b->predict_raw(t);
    if (std::abs(pa - pb) > max_diff) {
      max_diff = std::abs(pa - pb);
      argmax_history = h.render(alphabet);
      argmax_test = t.render(alphabet);
    }
  }
  constexpr double kVerdictTol = 1e-7;
  const bool equivalent = max_diff <= kVerdictTol;
  json j;
  j["model_a"] = path_a;
  j["model_b"] = path_b;
  j["samples"] = samples;
  j["seed"] = seed;
  j["max_abs_diff"] = max_diff;
  j["worst_history"] = argmax_history;
  j["worst_test"] = argmax_test;
  j["verdict"] = equivalent ? "equivalent" : "different";
  std::ostringstream text;
  text << "compared " << path_a << " and " << path_b << " on " << samples << " samples\n"
       << "max |difference|: " << max_diff << "\n"
       << "worst at history " << argmax_history << ", test "
       << (argmax_test.empty() ? "(none)" : argmax_test) << "\n"
       << "verdict: " << (equivalent ? "equivalent" : "different");
  emit_report(j, text.str(), opt);
  return equivalent ? kExitOk : kExitCheckFailed;
}

int cmd_validate(const std::string& model_path, const CommonOptions& opt) {
  auto model = load_named_model(model_path);
  psr::SysDynMatrix m = psr::build_matrix(*model, opt.hist_depth, opt.test_depth);
  psr::ValidityReport report = psr::check_validity(m);
  json j;
  j["model"] = model_path;
  j["hist_depth"] = opt.hist_depth;
  j["test_depth"] = opt.test_depth;
  j["report"] = report.to_json();
  std::ostringstream text;
  text << "model: " << model_path << "\n"
       << "depths: " << opt.hist_depth << "x" << opt.test_depth << "\n"
       << "violations: " << report.violations.size();
  for (std::size_t i = 0; i < report.violations.size() && i < 20; ++i) {
    const auto& v = report.violations[i];
    text << "\n  [" << v.property << "] history " << v.history << ", " << v.subject
         << ": " << v.value << " (expected " << v.expected << ")";
  }
  text << "\nresult: " << (report.pass() ? "pass" : "fail");
  emit_report(j, text.str(), opt);
  return report.pass() ? kExitOk : kExitCheckFailed;
}

int cmd_export_matrix(const std::string& model_path, const CommonOptions& opt) {
  auto model = load_named_model(model_path);
  psr::SysDynMatrix m = psr::build_matrix(*model, opt.hist_depth, opt.test_depth);
  emit(psr::to_csv(m), opt.out);
  return kExitOk;
}

int demo_float_reset(json& j, std::ostringstream& text, double tol) {
  psr::PomdpModel model = psr::float_reset();
  const psr::Alphabet& alphabet = model.alphabet();
  std::vector<psr::Test> canonical;
  for (const char* rendered :
       {"r1", "f0.r1", "f0.f0.r1", "f0.f0.f0.r1", "f0.f0.f0.f0.r1"}) {
    canonical.push_back(psr::Test::parse(rendered, alphabet));
  }
  psr::Derivation d = psr::pomdp_to_psr(model, canonical, tol);
  j["core_tests"] = d.report.core_tests;
  json p0 = json::array();
  text << "core tests:";
  for (const auto& t : d.report.core_tests) text << " " << t;
  text << "\ninitial prediction:";
  const Eigen::VectorXd expected = (Eigen::VectorXd(5) << 1, 0.5, 0.5, 0.375, 0.375).finished();
  double pin_error = 0.0;
  for (Eigen::Index i = 0; i < d.model.initial_prediction().size(); ++i) {
    const double v = d.model.initial_prediction()[i];
    p0.push_back(v);
    text << " " << v;
    pin_error = std::max(pin_error, std::abs(v - expected[i]));
  }
  j["initial_prediction"] = p0;
  j["initial_prediction_error"] = pin_error;

  double max_diff = 0.0;
  psr::LinearPsrModel derived = d.model;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    model.reset();
    derived.reset();
    auto trajectory = psr::simulate(model, psr::ActionSource::uniform(), 6, seed);
    for (const psr::Step& s : trajectory) derived.update(s);
    for (const psr::Test& t : psr::enumerate_sequences(alphabet, 4, false)) {
      max_diff = std::max(max_diff, std::abs(model.predict_raw(t) - derived.predict_raw(t)));
    }
  }
  j["max_abs_diff"] = max_diff;
  text << "\nmax |belief vs derived| over sampled histories: " << max_diff;

  psr::SeriesReport series = psr::float_reset_series_check(12);
  j["series"] = series.to_json();
  text << "\ndrift series prefix:";
  for (std::size_t i = 0; i < series.reset_now.size() && i < 5; ++i) {
    text << " " << series.reset_now[i];
  }
  text << "\ndrift series pairs match: " << (series.pairs_match ? "yes" : "no")
       << ", decrease: " << (series.pairs_decrease ? "yes" : "no")
       << ", distinct: " << (series.pairs_distinct ? "yes" : "no");
  const bool pass = pin_error <= 1e-12 && max_diff <= 1e-8 && series.pass;
  j["pass"] = pass;
  text << "\nresult: " << (pass ? "pass" : "fail");
  return pass ? kExitOk : kExitCheckFailed;
}

int demo_rotate_register(json& j, std::ostringstream& text, double tol) {
  bool pass = true;
  for (const int k : {2, 3}) {
    const int depth = k == 2 ? 4 : 5;
    psr::PomdpModel model = psr::rotate_register(k);
    psr::SysDynMatrix m = psr::build_matrix(model, depth, depth);
    const int rank = psr::numerical_rank(m, tol);
    const int expected = 1 << k;
    j["k" + std::to_string(k)] = {{"depth", depth},
                                  {"rows", static_cast<long long>(m.entries.rows())},
                                  {"cols", static_cast<long long>(m.entries.cols())},
                                  {"rank", rank},
                                  {"expected", expected}};
    text << "k=" << k << ": rank " << rank << " at depths " << depth << "x" << depth
         << " (states: " << expected << ")\n";
    pass = pass && rank == expected;
  }
  j["pass"] = pass;
  text << "result: " << (pass ? "pass" : "fail");
  return pass ? kExitOk : kExitCheckFailed;
}

int demo_fig6(json& j, std::ostringstream& text, double tol) {
  psr::ConfoundReport report = psr::fig6_confound_check(3);
  psr::SysDynMatrix m = psr::build_matrix(psr::fig6_system(), 4, 4);
  const int rank = psr::numerical_rank(m, tol);
  j["confound"] = report.to_json();
  j["rank"] = rank;
  const bool pass = report.pass && rank == 4;
  j["pass"] = pass;
  text << "rank at depths 4x4: " << rank << "\n"
       << "confounded pairs found for all action sequences up to length " << report.max_len
       << ": " << (report.unconfounded_action_sequences.empty() ? "yes" : "no") << "\n";
  for (std::size_t i = 0; i < report.confounded.size() && i < 6; ++i) {
    const auto& p = report.confounded[i];
    text << "  " << p.action_sequence << ": " << p.state_a << " ~ " << p.state_b
         << ", split by " << p.witness_test << "\n";
  }
  text << "result: " << (pass ? "pass" : "fail");
  return pass ? kExitOk : kExitCheckFailed;
}

int demo_theorem1(json& j, std::ostringstream& text, double tol) {
  bool pass = true;
  json rows = json::array();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int order = 1 + static_cast<int>(seed % 2);
    psr::MarkovModel model = psr::random_markov(order, 2, 2, seed);
    const int rank = psr::numerical_rank(psr::build_matrix(model, 4, 4), tol);
    const int bound = order == 1 ? 4 : 16;
    rows.push_back({{"seed", seed}, {"order", order}, {"rank", rank}, {"bound", bound}});
    text << "seed " << seed << ": order " << order << ", rank " << rank << " (bound "
         << bound << ")\n";
    pass = pass && rank <= bound;
  }
  j["models"] = std::move(rows);
  j["pass"] = pass;
  text << "rank never exceeds (|A||O|)^order: " << (pass ? "yes" : "no") << "\n";
  text << "result: " << (pass ? "pass" : "fail");
  return pass ? kExitOk : kExitCheckFailed;
}

int demo_theorem2(json& j, std::ostringstream& text, double tol) {
  bool pass = true;
  json rows = json::array();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int k = 2 + static_cast<int>(seed % 5);
    psr::PomdpModel model = psr::random_pomdp(k, 2, 2, seed);
    const int rank = psr::numerical_rank(psr::build_matrix(model, 4, 4), tol);
    rows.push_back({{"seed", seed}, {"states", k}, {"rank", rank}});
    text << "seed " << seed << ": " << k << " states, rank " << rank << "\n";
    pass = pass && rank <= k;
  }
  j["models"] = std::move(rows);
  j["pass"] = pass;
  text << "rank never exceeds the hidden state count: " << (pass ? "yes" : "no") << "\n";
  text << "result: " << (pass ? "pass" : "fail");
  return pass ? kExitOk : kExitCheckFailed;
}

int cmd_demo(const std::string& name, const CommonOptions& opt) {
  const double tol = rank_tolerance();
  json j;
  j["demo"] = name;
  std::ostringstream text;
  int code = kExitUsage;
  if (name == "float-reset") {
    code = demo_float_reset(j, text, tol);
  } else if (name == "rotate-register") {
    code = demo_rotate_register(j, text, tol);
  } else if (name == "fig6") {
    code = demo_fig6(j, text, tol);
  } else if (name == "theorem1") {
    code = demo_theorem1(j, text, tol);
  } else if (name == "theorem2") {
    code = demo_theorem2(j, text, tol);
  } else {
    throw psr::Error("demo: unknown demo \"" + name + "\"");
  }
  emit_report(j, text.str(), opt);
  return code;
}

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_depths = true) {
  if (with_depths) {
    cmd->add_option("--hist-depth", opt.hist_depth, "History depth")
        ->check(CLI::Range(1, 12))
        ->capture_default_str();
    cmd->add_option("--test-depth", opt.test_depth, "Test depth")
        ->check(CLI::Range(1, 12))
        ->capture_default_str();
  }
  cmd->add_option("--format", opt.format, "Report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  cmd->add_option("--out", opt.out, "Write the primary output to this file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "psrkit: system-dynamics matrices, linear dimension, and predictive-state models"};
  app.require_subcommand(1);

  std::string model_path, model_path_b, core_list, demo_name;
  bool plateau = false;
  int samples = 1000;
  std::uint64_t seed = 0;

  CommonOptions rank_opt;
  auto* rank = app.add_subcommand("rank", "Rank of the truncated system-dynamics matrix");
  rank->add_option("model", model_path, "Model file (json)")->required();
  rank->add_flag("--plateau", plateau,
                 "Escalate square depths from --hist-depth until the rank settles");
  add_common(rank, rank_opt);

  CommonOptions derive_opt;
  auto* derive = app.add_subcommand("derive", "Derive a predictive-state model");
  derive->add_option("input", model_path, "Belief model (json) or matrix (csv)")->required();
  derive->add_option("--core-tests", core_list,
                     "Comma-separated rendered tests overriding the searched core set");
  add_common(derive, derive_opt, false);

  CommonOptions compare_opt;
  auto* compare = app.add_subcommand("compare", "Compare two models on sampled predictions");
  compare->add_option("model_a", model_path, "First model (json)")->required();
  compare->add_option("model_b", model_path_b, "Second model (json)")->required();
  compare->add_option("--samples", samples, "Sampled history/test pairs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  compare->add_option("--seed", seed, "Sampling seed")->capture_default_str();
  add_common(compare, compare_opt);

  CommonOptions demo_opt;
  auto* demo = app.add_subcommand("demo", "Run a bundled example system end to end");
  demo->add_option("name", demo_name, "One of: float-reset, rotate-register, fig6, theorem1, theorem2")
      ->required();
  add_common(demo, demo_opt, false);

  CommonOptions validate_opt;
  auto* validate = app.add_subcommand("validate", "Probability-structure checks on a model");
  validate->add_option("model", model_path, "Model file (json)")->required();
  add_common(validate, validate_opt);

  CommonOptions export_opt;
  auto* export_matrix =
      app.add_subcommand("export-matrix", "Write the truncated matrix as csv");
  export_matrix->add_option("model", model_path, "Model file (json)")->required();
  add_common(export_matrix, export_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (rank->parsed()) return cmd_rank(model_path, rank_opt, plateau);
    if (derive->parsed()) return cmd_derive(model_path, derive_opt, core_list);
    if (compare->parsed()) {
      return cmd_compare(model_path, model_path_b, compare_opt, samples, seed);
    }
    if (demo->parsed()) return cmd_demo(demo_name, demo_opt);
    if (validate->parsed()) return cmd_validate(model_path, validate_opt);
    if (export_matrix->parsed()) return cmd_export_matrix(model_path, export_opt);
  } catch (const psr::SpanViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSpan;
  } catch (const psr::InvalidOverride& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSpan;
  } catch (const psr::DepthInsufficient& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSpan;
  } catch (const psr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
