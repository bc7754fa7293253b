#include "psrkit/sequence.hpp"

#include <algorithm>

#include "psrkit/errors.hpp"

namespace psr {

Sequence Sequence::concat(const Sequence& tail) const {
  std::vector<Step> steps = steps_;
  steps.insert(steps.end(), tail.steps_.begin(), tail.steps_.end());
  return Sequence(std::move(steps));
}

Sequence Sequence::append(Step s) const {
  std::vector<Step> steps = steps_;
  steps.push_back(s);
  return Sequence(std::move(steps));
}

Sequence Sequence::prepend(Step s) const {
  std::vector<Step> steps;
  steps.reserve(steps_.size() + 1);
  steps.push_back(s);
  steps.insert(steps.end(), steps_.begin(), steps_.end());
  return Sequence(std::move(steps));
}

std::vector<int> Sequence::action_sequence() const {
  std::vector<int> actions;
  actions.reserve(steps_.size());
  for (const Step& s : steps_) actions.push_back(s.action);
  return actions;
}

std::string Sequence::render(const Alphabet& alphabet) const {
  if (steps_.empty()) return "eps";
  std::string out;
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (i > 0) out += '.';
    out += alphabet.action_name(steps_[i].action);
    out += alphabet.observation_name(steps_[i].observation);
  }
  return out;
}

Sequence Sequence::parse(std::string_view text, const Alphabet& alphabet) {
  if (text == "eps") return Sequence{};
  if (text.empty()) throw ParseError("empty sequence text (use \"eps\")");
  std::vector<Step> steps;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t dot = text.find('.', pos);
    std::string_view token = text.substr(pos, dot == std::string_view::npos ? dot : dot - pos);
    if (token.empty()) throw ParseError("empty step token in \"" + std::string(text) + "\"");
    int match_a = -1, match_o = -1, matches = 0;
    for (int a = 0; a < alphabet.num_actions(); ++a) {
      const std::string& an = alphabet.action_name(a);
      if (token.size() <= an.size() || token.substr(0, an.size()) != an) continue;
      int o = alphabet.observation_index(token.substr(an.size()));
      if (o < 0) continue;
      ++matches;
      match_a = a;
      match_o = o;
    }
    if (matches == 0) {
      throw ParseError("step token \"" + std::string(token) +
                       "\" does not split into a declared action and observation");
    }
    if (matches > 1) {
      throw ParseError("step token \"" + std::string(token) + "\" is ambiguous");
    }
    steps.push_back({match_a, match_o});
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
    if (pos == text.size()) throw ParseError("trailing '.' in \"" + std::string(text) + "\"");
  }
  return Sequence(std::move(steps));
}

bool length_lex_less(const Sequence& lhs, const Sequence& rhs) {
  if (lhs.length() != rhs.length()) return lhs.length() < rhs.length();
  return std::lexicographical_compare(lhs.begin(), lhs.end(), rhs.begin(), rhs.end(),
                                      [](const Step& a, const Step& b) { return a < b; });
}

std::vector<Sequence> enumerate_sequences(const Alphabet& alphabet, int max_len,
                                          bool include_empty) {
  std::vector<Sequence> out;
  if (include_empty) out.push_back(Sequence{});
  std::vector<Sequence> level{Sequence{}};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<Sequence> next;
    next.reserve(level.size() * alphabet.num_pairs());
    for (const Sequence& s : level) {
      for (int a = 0; a < alphabet.num_actions(); ++a) {
        for (int o = 0; o < alphabet.num_observations(); ++o) {
          next.push_back(s.append({a, o}));
        }
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return out;
}

}  // namespace psr
