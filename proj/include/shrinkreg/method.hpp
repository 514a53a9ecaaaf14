#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shrinkreg {

/// Regressor used in the downstream OLS. The first five are feasible
/// shrinkage estimators; Oracle (true θ) and SemiOracle (true Var(θ) with
/// estimated noise variances) exist only inside simulations.
enum class Method { FE, HO, HE, CW_BC, CW_IV, Oracle, SemiOracle };

std::string_view to_string(Method m) noexcept;

/// Accepts the lower-case names used on the command line and in configs:
/// fe, ho, he, cw_bc (alias cw), cw_iv, oracle, semi_oracle.
std::optional<Method> parse_method(std::string_view name);

/// Parses a comma-separated list; throws std::invalid_argument on unknown
/// names. Duplicates are dropped, first occurrence wins.
std::vector<Method> parse_method_list(std::string_view list);

constexpr bool is_feasible(Method m) noexcept {
  return m != Method::Oracle && m != Method::SemiOracle;
}

}  // namespace shrinkreg
