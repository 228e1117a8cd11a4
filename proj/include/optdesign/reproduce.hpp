#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace optdesign {

inline constexpr std::uint64_t kDefaultSeed = 20240101;

struct ReproCheck {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tol = 0.0;
  bool passed = false;
};

struct ReproReport {
  std::string target;
  std::vector<ReproCheck> checks;
  std::string csv;
  std::vector<std::string> notes;

  bool passed() const;
  /// One line per check, failures marked, followed by the notes.
  std::string summary() const;
};

/// Classifies a grid over (-1, 5]^2, certifies every minimally supported design
/// and compares its determinant with the numerical optimum on a subgrid.
ReproReport reproduce_table1(int grid = 200);
/// Locally IMSE-optimal vertex weights for six reference rows at beta = (1, b, b).
ReproReport reproduce_table2();
/// Closed forms against the numerical optimizer at random parameters.
ReproReport reproduce_prop1(std::uint64_t seed = kDefaultSeed, int count = 200);
/// (gamma2, w*) for beta_1 = 0 on [-0.45, 10], closed form and numerical.
ReproReport reproduce_fig3(int count = 50);
/// D-efficiency curves of the maximin invariant design and the uniform design.
ReproReport reproduce_fig4(int points = 420);

/// Dispatch by name: table1, table2, prop1, fig3, fig4.
ReproReport reproduce(const std::string& target, std::uint64_t seed = kDefaultSeed);

}  // namespace optdesign
