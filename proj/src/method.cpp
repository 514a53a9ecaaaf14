#include "shrinkreg/method.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

namespace shrinkreg {

namespace {

struct MethodName {
  Method method;
  std::string_view name;
};

constexpr std::array<MethodName, 8> kNames{{
    {Method::FE, "fe"},
    {Method::HO, "ho"},
    {Method::HE, "he"},
    {Method::CW_BC, "cw_bc"},
    {Method::CW_BC, "cw"},
    {Method::CW_IV, "cw_iv"},
    {Method::Oracle, "oracle"},
    {Method::SemiOracle, "semi_oracle"},
}};

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::FE: return "FE";
    case Method::HO: return "HO";
    case Method::HE: return "HE";
    case Method::CW_BC: return "CW_BC";
    case Method::CW_IV: return "CW_IV";
    case Method::Oracle: return "ORACLE";
    case Method::SemiOracle: return "SEMI_ORACLE";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const auto& entry : kNames) {
    if (entry.name == lower) return entry.method;
  }
  return std::nullopt;
}

std::vector<Method> parse_method_list(std::string_view list) {
  std::vector<Method> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t comma = std::min(list.find(',', pos), list.size());
    std::string_view token = list.substr(pos, comma - pos);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (!token.empty()) {
      auto m = parse_method(token);
      if (!m) throw std::invalid_argument("unknown method '" + std::string(token) + "'");
      if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
    }
    pos = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty method list");
  return out;
}

}  // namespace shrinkreg
