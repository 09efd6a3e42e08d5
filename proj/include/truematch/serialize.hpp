#pragma once

// JSON views of the library types. Numbers are rounded to 6 significant
// digits so that serialized output is stable across runs and platforms.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <json.hpp>  // vendored nlohmann/json

#include "truematch/agreement.hpp"
#include "truematch/crosstab.hpp"
#include "truematch/matching.hpp"
#include "truematch/mmcc.hpp"
#include "truematch/simulate.hpp"

namespace truematch::json {

using json = nlohmann::ordered_json;

inline double sig6(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;  // no negative zero
}

inline json number(double v) {
  if (std::isnan(v)) return nullptr;
  return sig6(v);
}

template <class T>
json matrix(const Matrix<T>& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if constexpr (std::is_floating_point_v<T>)
        row.push_back(number(m(r, c)));
      else
        row.push_back(m(r, c));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json table(const MatchingTable& t) {
  const auto r = residuals(t);
  return {{"counts", matrix(t.counts())},
          {"expected", matrix(r.expected)},
          {"signed", matrix(r.signed_dev)},
          {"chi2", number(r.chi2)}};
}

// Permutations are written 1-based, like labels.
inline json permutation(const Permutation& p) {
  json a = json::array();
  for (auto v : p.map()) a.push_back(v + 1);
  return a;
}

inline json match_result(const MatchResult& m, const MatchingTable& before, std::uint64_t seed) {
  const auto r = residuals(before);
  json pairs = json::array();
  for (const auto& p : m.pairs)
    pairs.push_back({{"row", p.row + 1}, {"col", p.col + 1}, {"s", number(p.s)}, {"n", p.n}});
  return {{"method", std::string(to_string(m.method))},
          {"seed", seed},
          {"perm", permutation(m.perm)},
          {"pairs", std::move(pairs)},
          {"table_before", matrix(before.counts())},
          {"table_after", matrix(m.matched_table.counts())},
          {"table_presented", matrix(m.presented_table.counts())},
          {"orientation", m.trace.orientation == Orientation::rename_columns ? "columns" : "rows"},
          {"signed_residuals", matrix(r.signed_dev)},
          {"chi2", number(r.chi2)}};
}

inline json agreement(const MatchingTable& t) {
  const auto s = truematch::agreement(t);
  return {{"diagonal", number(s.diagonal)}, {"kappa", number(s.kappa)}, {"rand", number(s.rand)},
          {"crand", number(s.crand)},       {"N", t.total()},           {"K", t.k()}};
}

inline json cic(const CicStats& s) {
  return {{"H", number(s.H)}, {"RMC", number(s.RMC)}, {"I", number(s.I)}, {"CIC", number(s.CIC)}};
}

inline json outlier(const OutlierSummary& s, Method method, std::uint64_t seed) {
  return {{"scenario", "outlier"},
          {"method", std::string(to_string(method))},
          {"seed", seed},
          {"runs", s.runs},
          {"expected_table", matrix(s.expected_table)},
          {"diagonal", number(s.mean_stats.diagonal)},
          {"kappa", number(s.mean_stats.kappa)},
          {"rand", number(s.mean_stats.rand)},
          {"crand", number(s.mean_stats.crand)},
          {"random_match_rate", number(s.random_match_rate)}};
}

}  // namespace truematch::json
