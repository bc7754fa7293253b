#include "psrkit/alphabet.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "psrkit/errors.hpp"

namespace psr {
namespace {

void validate_symbols(const std::vector<std::string>& symbols, const char* what) {
  if (symbols.empty()) throw SchemaError(std::string(what) + ": empty symbol list");
  std::unordered_set<std::string> seen;
  for (const auto& s : symbols) {
    if (s.empty()) throw SchemaError(std::string(what) + ": empty symbol");
    for (unsigned char c : s) {
      if (c == '.' || c == ',' || c == '"' || std::isspace(c)) {
        throw SchemaError(std::string(what) + ": symbol \"" + s +
                          "\" contains a reserved character");
      }
    }
    if (!seen.insert(s).second) {
      throw SchemaError(std::string(what) + ": duplicate symbol \"" + s + "\"");
    }
  }
}

}  // namespace

Alphabet::Alphabet(std::vector<std::string> actions, std::vector<std::string> observations)
    : actions_(std::move(actions)), observations_(std::move(observations)) {
  validate_symbols(actions_, "actions");
  validate_symbols(observations_, "observations");
}

int Alphabet::action_index(std::string_view name) const {
  auto it = std::find(actions_.begin(), actions_.end(), name);
  return it == actions_.end() ? -1 : static_cast<int>(it - actions_.begin());
}

int Alphabet::observation_index(std::string_view name) const {
  auto it = std::find(observations_.begin(), observations_.end(), name);
  return it == observations_.end() ? -1 : static_cast<int>(it - observations_.begin());
}

}  // namespace psr
