#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "psrkit/alphabet.hpp"

namespace psr {

// One action-observation step, as indices into an Alphabet.
struct Step {
  int action = 0;
  int observation = 0;

  friend auto operator<=>(const Step&, const Step&) = default;
};

// An ordered run of steps. Tests (futures) and histories (pasts) share this
// representation; the aliases below only mark intent at call sites.
class Sequence {
 public:
  Sequence() = default;
  explicit Sequence(std::vector<Step> steps) : steps_(std::move(steps)) {}

  int length() const { return static_cast<int>(steps_.size()); }
  bool empty() const { return steps_.empty(); }
  const Step& operator[](int i) const { return steps_[i]; }
  const Step& back() const { return steps_.back(); }
  const std::vector<Step>& steps() const { return steps_; }

  auto begin() const { return steps_.begin(); }
  auto end() const { return steps_.end(); }

  Sequence concat(const Sequence& tail) const;
  Sequence append(Step s) const;
  Sequence prepend(Step s) const;

  // Action indices in order, observations dropped.
  std::vector<int> action_sequence() const;

  // Steps joined by '.', each step the action symbol immediately followed
  // by the observation symbol; the empty sequence renders as "eps".
  std::string render(const Alphabet& alphabet) const;

  // Inverse of render; throws ParseError on unknown or ambiguous tokens.
  static Sequence parse(std::string_view text, const Alphabet& alphabet);

  friend bool operator==(const Sequence&, const Sequence&) = default;

 private:
  std::vector<Step> steps_;
};

using Test = Sequence;
using History = Sequence;

// Shorter first, equal lengths lexicographic by (action, observation). This
// is the canonical order everywhere sequences are enumerated.
bool length_lex_less(const Sequence& lhs, const Sequence& rhs);

struct LengthLexLess {
  bool operator()(const Sequence& lhs, const Sequence& rhs) const {
    return length_lex_less(lhs, rhs);
  }
};

// All sequences up to max_len in length-lex order under the alphabet's
// declared symbol order; the empty sequence leads when included.
std::vector<Sequence> enumerate_sequences(const Alphabet& alphabet, int max_len,
                                          bool include_empty);

}  // namespace psr
