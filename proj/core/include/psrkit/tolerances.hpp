#pragma once

#include <cstddef>

namespace psr {

// Probabilities at or below this are treated as impossible when
// conditioning and when pruning unrealizable histories.
inline constexpr double kZeroCutoff = 1e-12;

// Relative pivot threshold for numerical rank decisions.
inline constexpr double kDefaultRankTol = 1e-8;

// Default cap on rows*cols for matrices built during a rank plateau search.
inline constexpr std::size_t kDefaultEntryBudget = 200000;

}  // namespace psr
