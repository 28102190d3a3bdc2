#pragma once

// Case descriptors of the form family:key=value,... e.g. "aiii:k=2,n=4",
// "ci:n=3", "diii:n=4", "bdi:m=7".

#include <charconv>
#include <map>
#include <string>
#include <string_view>

#include "pnspec/errors.hpp"
#include "pnspec/hermsym.hpp"

namespace pnspec {

inline CaseParams parse_case(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw UsageError("case string needs 'family:key=value': " + std::string(text));
  const std::string family(text.substr(0, colon));
  std::map<std::string, std::size_t> kv;
  std::string_view rest = text.substr(colon + 1);
  if (!rest.empty() && rest.back() == ',') throw UsageError("trailing comma in case string: " + std::string(text));
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw UsageError("case parameter needs key=value: " + std::string(item));
    const std::string key(item.substr(0, eq));
    const std::string_view val = item.substr(eq + 1);
    std::size_t parsed = 0;
    const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), parsed);
    if (ec != std::errc{} || ptr != val.data() + val.size()) {
      throw UsageError("case parameter '" + key + "' is not a non-negative integer");
    }
    if (!kv.emplace(key, parsed).second) throw UsageError("duplicate case parameter '" + key + "'");
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  auto take = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw UsageError("case '" + family + "' needs parameter '" + key + "'");
    const std::size_t v = it->second;
    kv.erase(it);
    return v;
  };
  CaseParams p;
  if (family == "aiii") {
    p.family = CaseFamily::AIII;
    p.k = take("k");
    p.n = take("n");
  } else if (family == "ci") {
    p.family = CaseFamily::CI;
    p.n = take("n");
  } else if (family == "diii") {
    p.family = CaseFamily::DIII;
    p.n = take("n");
  } else if (family == "bdi") {
    p.family = CaseFamily::BDI;
    const std::size_t m = take("m");
    if (m < 4) throw UsageError("bdi needs ambient size m >= 4");
    p.n = m - 2;
  } else {
    throw UsageError("unknown case family '" + family + "'");
  }
  if (!kv.empty()) throw UsageError("unexpected case parameter '" + kv.begin()->first + "'");
  detail::validate_params(p);
  return p;
}

}  // namespace pnspec
