#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace webagent {

/// Text size limit. Token budgets are converted with a fixed characters-per-
/// token ratio instead of a tokenizer.
struct TextBudget {
  enum class Unit { tokens, chars };

  std::size_t max_units = 3840;
  Unit unit = Unit::tokens;
  double chars_per_token = 4.0;

  static TextBudget tokens(std::size_t n) { return {n, Unit::tokens, 4.0}; }
  static TextBudget chars(std::size_t n) { return {n, Unit::chars, 4.0}; }

  std::size_t max_chars() const {
    if (max_units == 0) throw std::invalid_argument("TextBudget: max_units must be positive");
    if (unit == Unit::chars) return max_units;
    return static_cast<std::size_t>(std::floor(static_cast<double>(max_units) * chars_per_token));
  }
};

/// 3840 tokens / 15360 characters: the default observation budget.
inline TextBudget default_observation_budget() { return TextBudget::tokens(3840); }
/// 640 tokens: the budget for short-context backends.
inline TextBudget short_context_observation_budget() { return TextBudget::tokens(640); }

}  // namespace webagent
