#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "truematch/assignment.hpp"
#include "truematch/crosstab.hpp"
#include "truematch/permutation.hpp"
#include "truematch/random.hpp"

namespace truematch {

enum class Method { tracemax, truematch, truematch_heuristic };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::tracemax: return "tracemax";
    case Method::truematch: return "truematch";
    case Method::truematch_heuristic: return "truematch-heuristic";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
  if (s == "tracemax") return Method::tracemax;
  if (s == "truematch") return Method::truematch;
  if (s == "truematch-heuristic" || s == "heuristic") return Method::truematch_heuristic;
  return std::nullopt;
}

// A matched row/column pair with its signed residual and count.
struct MatchedPair {
  std::size_t row = 0;
  std::size_t col = 0;
  double s = 0.0;
  Count n = 0;
};

// Which solution's labels name the matched clusters when the table is
// presented. A match is a bijection between the two label sets, so either
// side may be renamed; the choice is a fair coin.
enum class Orientation { rename_columns, rename_rows };

struct MatchTrace {
  std::vector<std::size_t> row_shuffle;  // empty when no shuffle was drawn
  std::vector<std::size_t> col_shuffle;
  std::vector<double> pair_keys;         // tie-break key per row, used for pair ordering
  Orientation orientation = Orientation::rename_columns;
  std::size_t residuals_computed = 0;
};

struct MatchResult {
  Method method = Method::truematch;
  // Relabels the second (column) solution onto the first: label l -> perm[l].
  Permutation perm;
  // Row k is matched to column assignment[k]; the inverse of perm.
  Permutation assignment;
  // Descending by s, equal s ordered by the recorded random key.
  std::vector<MatchedPair> pairs;
  // crosstab(a, apply_permutation(b, perm))
  MatchingTable matched_table;
  // matched_table, or the row-renamed equivalent, depending on trace.orientation
  MatchingTable presented_table;
  MatchTrace trace;
};

namespace detail {

inline MatchResult finish_match(const MatchingTable& t, Method method, Permutation assignment,
                                MatchTrace trace, Rng& rng) {
  const auto k = t.k();
  const auto res = residuals(t);

  trace.pair_keys.resize(k);
  for (auto& key : trace.pair_keys) key = uniform01(rng);
  trace.orientation = bernoulli(rng, 0.5) ? Orientation::rename_rows : Orientation::rename_columns;

  std::vector<MatchedPair> pairs;
  pairs.reserve(k);
  for (std::size_t r = 0; r < k; ++r)
    pairs.push_back({r, assignment[r], res.signed_dev(r, assignment[r]), t(r, assignment[r])});
  std::sort(pairs.begin(), pairs.end(), [&](const MatchedPair& x, const MatchedPair& y) {
    if (x.s != y.s) return x.s > y.s;
    return trace.pair_keys[x.row] > trace.pair_keys[y.row];
  });

  const auto identity = Permutation::identity(k);
  Permutation perm = assignment.inverse();
  MatchingTable matched = t.reordered(identity.map(), assignment.map());
  MatchingTable presented = trace.orientation == Orientation::rename_columns
                                ? matched
                                : t.reordered(perm.map(), identity.map());
  return MatchResult{method,        std::move(perm),     std::move(assignment), std::move(pairs),
                     std::move(matched), std::move(presented), std::move(trace)};
}

inline MatchResult trivial_match(const MatchingTable& t, Method method) {
  const auto id = Permutation::identity(1);
  MatchTrace trace;
  trace.pair_keys = {0.0};
  const double s = t.total() > 0 ? residuals(t).signed_dev(0, 0) : 0.0;
  return MatchResult{method, id, id, {{0, 0, s, t(0, 0)}}, t, t, std::move(trace)};
}

// Maximizes the trace of score after a random row and column shuffle. The
// solver is deterministic; the shuffle spreads co-optimal choices uniformly.
inline Permutation shuffled_trace_max(const MatchingTable& t, bool use_residuals, MatchTrace& trace,
                                      Rng& rng) {
  const auto k = t.k();
  trace.row_shuffle = random_permutation(k, rng);
  trace.col_shuffle = random_permutation(k, rng);
  const MatchingTable shuffled = t.reordered(trace.row_shuffle, trace.col_shuffle);

  Matrix<double> score(k, k);
  if (use_residuals) {
    score = residuals(shuffled).signed_dev;
    trace.residuals_computed = k * k;
  } else {
    score = shuffled.counts().cast<double>();
  }
  const Permutation inner = solve_assignment(score, Sense::maximize);

  std::vector<std::size_t> assignment(k);
  for (std::size_t i = 0; i < k; ++i) assignment[trace.row_shuffle[i]] = trace.col_shuffle[inner[i]];
  return Permutation(std::move(assignment));
}

inline void require_square(const MatchingTable& t) {
  if (t.k() == 0) throw std::invalid_argument("matching: empty table");
}

}  // namespace detail

// Classic matching: permutation maximizing the trace of raw counts.
inline MatchResult match_tracemax(const MatchingTable& t, Rng& rng) {
  detail::require_square(t);
  if (t.k() == 1) return detail::trivial_match(t, Method::tracemax);
  MatchTrace trace;
  auto assignment = detail::shuffled_trace_max(t, false, trace, rng);
  return detail::finish_match(t, Method::tracemax, std::move(assignment), std::move(trace), rng);
}

// Random row/column shuffle, signed chi-square residuals, Hungarian
// maximization of their trace, pairs ordered by residual.
inline MatchResult match_truematch(const MatchingTable& t, Rng& rng) {
  detail::require_square(t);
  if (t.k() == 1) return detail::trivial_match(t, Method::truematch);
  MatchTrace trace;
  auto assignment = detail::shuffled_trace_max(t, true, trace, rng);
  return detail::finish_match(t, Method::truematch, std::move(assignment), std::move(trace), rng);
}

// Greedy variant: repeatedly recompute residuals on the remaining subtable,
// match the cell that is largest by (s, n, random key), drop its row and
// column. The last row/column pair is matched directly.
inline MatchResult match_truematch_heuristic(const MatchingTable& t, Rng& rng) {
  detail::require_square(t);
  const auto k = t.k();
  if (k == 1) return detail::trivial_match(t, Method::truematch_heuristic);

  std::vector<std::size_t> rows(k), cols(k);
  for (std::size_t i = 0; i < k; ++i) rows[i] = cols[i] = i;
  std::vector<std::size_t> assignment(k);
  MatchTrace trace;

  std::vector<Count> row_sums, col_sums;
  while (rows.size() >= 2) {
    const auto m = rows.size();
    row_sums.assign(m, 0);
    col_sums.assign(m, 0);
    Count total = 0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        const Count n = t(rows[i], cols[j]);
        row_sums[i] += n;
        col_sums[j] += n;
        total += n;
      }

    std::size_t best_i = 0, best_j = 0;
    double best_s = 0.0, best_key = -1.0;
    Count best_n = 0;
    bool have_best = false;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        const Count n = t(rows[i], cols[j]);
        const double s =
            total > 0 ? detail::signed_deviation(n, row_sums[i], col_sums[j], total) : 0.0;
        ++trace.residuals_computed;
        const double key = uniform01(rng);
        const bool better = !have_best || s > best_s || (s == best_s && n > best_n) ||
                            (s == best_s && n == best_n && key > best_key);
        if (better) {
          have_best = true;
          best_i = i;
          best_j = j;
          best_s = s;
          best_n = n;
          best_key = key;
        }
      }
    assignment[rows[best_i]] = cols[best_j];
    rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(best_i));
    cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(best_j));
  }
  assignment[rows.front()] = cols.front();

  return detail::finish_match(t, Method::truematch_heuristic, Permutation(std::move(assignment)),
                              std::move(trace), rng);
}

inline MatchResult match(const MatchingTable& t, Method method, Rng& rng) {
  switch (method) {
    case Method::tracemax: return match_tracemax(t, rng);
    case Method::truematch: return match_truematch(t, rng);
    case Method::truematch_heuristic: return match_truematch_heuristic(t, rng);
  }
  throw std::invalid_argument("unknown matching method");
}

// K^2 + (K-1)^2 + ... + 2^2
constexpr std::size_t heuristic_residual_count(std::size_t k) {
  return k * (k + 1) * (2 * k + 1) / 6 - 1;
}

}  // namespace truematch
