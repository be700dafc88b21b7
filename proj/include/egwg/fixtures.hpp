#pragma once

// Built-in datasets.

#include <optional>
#include <string_view>
#include <vector>

namespace egwg::fixtures {

/// Lifetimes of 50 devices (Aarset 1987), the classic bathtub-hazard sample.
inline const std::vector<double>& aarset() {
  static const std::vector<double> values{
      0.1, 0.2, 1,  1,  1,  1,  1,  2,  3,  6,  7,  11, 12, 18, 18, 18, 18, 18, 21, 32, 36, 40, 45, 46, 47,
      50,  55,  60, 63, 63, 67, 67, 67, 67, 72, 75, 79, 82, 82, 83, 84, 84, 84, 85, 85, 85, 85, 85, 86, 86};
  return values;
}

/// Looks a fixture up by name.
inline std::optional<std::vector<double>> find(std::string_view name) {
  if (name == "aarset") return aarset();
  return std::nullopt;
}

}  // namespace egwg::fixtures
