#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "psrkit/errors.hpp"

namespace psr {

// Fixed, ordered action and observation vocabularies. Declaration order is
// load-bearing: it fixes pair indices, canonical sequence enumeration, and
// every column layout derived from them.
class Alphabet {
 public:
  // Symbols must be non-empty, unique within their list, and free of '.',
  // ',', '"', and whitespace so rendered sequences and CSV stay parseable.
  Alphabet(std::vector<std::string> actions, std::vector<std::string> observations);

  int num_actions() const { return static_cast<int>(actions_.size()); }
  int num_observations() const { return static_cast<int>(observations_.size()); }
  int num_pairs() const { return num_actions() * num_observations(); }

  const std::string& action_name(int a) const { return actions_[a]; }
  const std::string& observation_name(int o) const { return observations_[o]; }
  const std::vector<std::string>& actions() const { return actions_; }
  const std::vector<std::string>& observations() const { return observations_; }

  // -1 when the symbol is not declared.
  int action_index(std::string_view name) const;
  int observation_index(std::string_view name) const;

  // Action-major index of an (action, observation) pair.
  int pair_index(int a, int o) const { return a * num_observations() + o; }

  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<std::string> actions_;
  std::vector<std::string> observations_;
};

}  // namespace psr
