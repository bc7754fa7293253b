#include "psrkit/model_io.hpp"

#include <fstream>
#include <vector>

#include "psrkit/errors.hpp"

namespace psr {
namespace {

using nlohmann::json;

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path.empty() ? key + ": missing" : path + "." + key + ": missing");
  return *it;
}

std::string field(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::vector<std::string> string_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw SchemaError(path + ": expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::vector<double> number_list(const json& j, const std::string& path,
                                Eigen::Index expected) {
  if (!j.is_array()) throw SchemaError(path + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number()) throw SchemaError(path + ": expected an array of numbers");
    out.push_back(e.get<double>());
  }
  if (expected >= 0 && static_cast<Eigen::Index>(out.size()) != expected) {
    throw SchemaError(path + ": expected " + std::to_string(expected) + " numbers, got " +
                      std::to_string(out.size()));
  }
  return out;
}

Eigen::MatrixXd matrix_from_flat(const json& j, Eigen::Index rows, Eigen::Index cols,
                                 const std::string& path) {
  std::vector<double> flat = number_list(j, path, rows * cols);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat[r * cols + c];
  }
  return m;
}

Eigen::VectorXd vector_from_flat(const json& j, Eigen::Index n, const std::string& path) {
  std::vector<double> flat = number_list(j, path, n);
  return Eigen::Map<Eigen::VectorXd>(flat.data(), n);
}

json flat(const Eigen::MatrixXd& m) {
  json arr = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
  }
  return arr;
}

json flat(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Alphabet alphabet_from_json(const json& j) {
  return Alphabet(string_list(require(j, "actions", ""), "actions"),
                  string_list(require(j, "observations", ""), "observations"));
}

json alphabet_to_json(const Alphabet& a, json& j) {
  j["actions"] = a.actions();
  j["observations"] = a.observations();
  return j;
}

std::unique_ptr<Model> pomdp_from_json(const json& j) {
  Alphabet alphabet = alphabet_from_json(j);
  Eigen::VectorXd b0;
  {
    const json& jb = require(j, "b0", "");
    if (!jb.is_array() || jb.empty()) throw SchemaError("b0: expected a non-empty array");
    b0 = vector_from_flat(jb, static_cast<Eigen::Index>(jb.size()), "b0");
  }
  const Eigen::Index k = b0.size();
  const json& jt = require(j, "T", "");
  std::vector<Eigen::MatrixXd> transitions;
  for (const auto& name : alphabet.actions()) {
    transitions.push_back(matrix_from_flat(require(jt, name, "T"), k, k, field("T", name)));
  }
  const json& jo = require(j, "O", "");
  std::vector<Eigen::VectorXd> diags;
  for (const auto& aname : alphabet.actions()) {
    const json& per_action = require(jo, aname, "O");
    for (const auto& oname : alphabet.observations()) {
      diags.push_back(vector_from_flat(require(per_action, oname, field("O", aname)), k,
                                       field(field("O", aname), oname)));
    }
  }
  return std::make_unique<PomdpModel>(std::move(alphabet), std::move(transitions),
                                      std::move(diags), std::move(b0));
}

std::unique_ptr<Model> markov_from_json(const json& j) {
  Alphabet alphabet = alphabet_from_json(j);
  const json& jorder = require(j, "order", "");
  if (!jorder.is_number_integer() || jorder.get<long long>() < 1) {
    throw SchemaError("order: expected a positive integer");
  }
  const int order = jorder.get<int>();
  Eigen::Index rows = 1;
  for (int i = 0; i < order; ++i) rows *= alphabet.num_pairs() + 1;
  const json& jobs = require(j, "obs", "");
  std::vector<Eigen::MatrixXd> obs;
  for (const auto& name : alphabet.actions()) {
    obs.push_back(matrix_from_flat(require(jobs, name, "obs"), rows,
                                   alphabet.num_observations(), field("obs", name)));
  }
  return std::make_unique<MarkovModel>(std::move(alphabet), order, std::move(obs));
}

std::unique_ptr<Model> psr_from_json(const json& j) {
  Alphabet alphabet = alphabet_from_json(j);
  std::vector<Test> core;
  for (const auto& text : string_list(require(j, "core_tests", ""), "core_tests")) {
    try {
      core.push_back(Test::parse(text, alphabet));
    } catch (const ParseError& e) {
      throw SchemaError(std::string("core_tests: ") + e.what());
    }
  }
  const Eigen::Index k = static_cast<Eigen::Index>(core.size());
  if (k < 1) throw SchemaError("core_tests: expected a non-empty array");
  Eigen::VectorXd p0 = vector_from_flat(require(j, "p0", ""), k, "p0");
  const json& jm = require(j, "m", "");
  const json& jM = require(j, "M", "");
  std::vector<Eigen::VectorXd> weights;
  std::vector<Eigen::MatrixXd> extensions;
  for (const auto& aname : alphabet.actions()) {
    for (const auto& oname : alphabet.observations()) {
      const std::string token = aname + oname;
      weights.push_back(vector_from_flat(require(jm, token, "m"), k, field("m", token)));
      extensions.push_back(matrix_from_flat(require(jM, token, "M"), k, k, field("M", token)));
    }
  }
  return std::make_unique<LinearPsrModel>(std::move(alphabet), std::move(core), std::move(p0),
                                          std::move(weights), std::move(extensions));
}

json pomdp_to_json(const PomdpModel& m) {
  json j;
  j["type"] = "pomdp";
  alphabet_to_json(m.alphabet(), j);
  json jt = json::object();
  for (int a = 0; a < m.alphabet().num_actions(); ++a) {
    jt[m.alphabet().action_name(a)] = flat(m.transition(a));
  }
  j["T"] = std::move(jt);
  json jo = json::object();
  for (int a = 0; a < m.alphabet().num_actions(); ++a) {
    json per_action = json::object();
    for (int o = 0; o < m.alphabet().num_observations(); ++o) {
      per_action[m.alphabet().observation_name(o)] = flat(m.observation_diag(a, o));
    }
    jo[m.alphabet().action_name(a)] = std::move(per_action);
  }
  j["O"] = std::move(jo);
  j["b0"] = flat(m.initial_belief());
  return j;
}

json markov_to_json(const MarkovModel& m) {
  json j;
  j["type"] = "markov";
  alphabet_to_json(m.alphabet(), j);
  j["order"] = m.order();
  json jobs = json::object();
  for (int a = 0; a < m.alphabet().num_actions(); ++a) {
    jobs[m.alphabet().action_name(a)] = flat(m.observation_rows(a));
  }
  j["obs"] = std::move(jobs);
  return j;
}

json psr_to_json(const LinearPsrModel& m) {
  json j;
  j["type"] = "psr";
  alphabet_to_json(m.alphabet(), j);
  json core = json::array();
  for (const Test& t : m.core_tests()) core.push_back(t.render(m.alphabet()));
  j["core_tests"] = std::move(core);
  j["p0"] = flat(m.initial_prediction());
  json jm = json::object();
  json jM = json::object();
  for (int a = 0; a < m.alphabet().num_actions(); ++a) {
    for (int o = 0; o < m.alphabet().num_observations(); ++o) {
      const std::string token =
          m.alphabet().action_name(a) + m.alphabet().observation_name(o);
      jm[token] = flat(m.one_step_weight(a, o));
      jM[token] = flat(m.extension_matrix(a, o));
    }
  }
  j["m"] = std::move(jm);
  j["M"] = std::move(jM);
  return j;
}

}  // namespace

json model_to_json(const Model& model) {
  if (const auto* p = dynamic_cast<const PomdpModel*>(&model)) return pomdp_to_json(*p);
  if (const auto* m = dynamic_cast<const MarkovModel*>(&model)) return markov_to_json(*m);
  if (const auto* s = dynamic_cast<const LinearPsrModel*>(&model)) return psr_to_json(*s);
  throw Error("model_to_json: unknown model class");
}

std::unique_ptr<Model> model_from_json(const json& j) {
  const json& jt = require(j, "type", "");
  if (!jt.is_string()) throw SchemaError("type: expected a string");
  const std::string type = jt.get<std::string>();
  if (type == "pomdp") return pomdp_from_json(j);
  if (type == "markov") return markov_from_json(j);
  if (type == "psr") return psr_from_json(j);
  throw SchemaError("type: unknown model type \"" + type + "\"");
}

std::unique_ptr<Model> load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path + ": cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
  return model_from_json(j);
}

void save_model(const Model& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(path + ": cannot open for writing");
  out << model_to_json(model).dump(2) << "\n";
}

}  // namespace psr
