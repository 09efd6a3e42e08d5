#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "truematch/permutation.hpp"

namespace truematch {

using Label = int;

// Input that could not be parsed; line is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Crisp assignment of N cases to labels 1..k. k may exceed the number of
// labels actually used (a clusterer asked for k clusters may leave some empty).
class LabelVector {
 public:
  LabelVector() = default;

  LabelVector(std::vector<Label> labels, int k) : labels_(std::move(labels)), k_(k) {
    if (labels_.empty()) throw std::invalid_argument("label vector must not be empty");
    if (k_ < 1) throw std::invalid_argument("label vector needs k >= 1");
    for (auto l : labels_)
      if (l < 1 || l > k_)
        throw std::invalid_argument("label " + std::to_string(l) + " outside 1.." +
                                    std::to_string(k_));
  }

  explicit LabelVector(std::vector<Label> labels)
      : LabelVector(labels, labels.empty() ? 1 : *std::max_element(labels.begin(), labels.end())) {}

  std::size_t size() const noexcept { return labels_.size(); }
  int k() const noexcept { return k_; }
  Label operator[](std::size_t i) const { return labels_.at(i); }
  const std::vector<Label>& labels() const noexcept { return labels_; }
  auto begin() const noexcept { return labels_.begin(); }
  auto end() const noexcept { return labels_.end(); }

  // counts()[l-1] = number of cases with label l
  std::vector<std::size_t> counts() const {
    std::vector<std::size_t> c(static_cast<std::size_t>(k_), 0);
    for (auto l : labels_) ++c[static_cast<std::size_t>(l - 1)];
    return c;
  }

  int distinct() const {
    auto c = counts();
    return static_cast<int>(std::count_if(c.begin(), c.end(), [](auto n) { return n > 0; }));
  }

  friend bool operator==(const LabelVector&, const LabelVector&) = default;

 private:
  std::vector<Label> labels_;
  int k_ = 0;
};

struct ParsedLabels {
  LabelVector labels;
  // categories[l-1] is the original token that became label l
  std::vector<std::string> categories;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\v\f";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

}  // namespace detail

// One token per line, optional header line "label". Tokens become labels
// 1..K in order of first appearance. Trailing blank lines are ignored; a
// blank line followed by more tokens is an error.
inline ParsedLabels parse_labels(std::istream& in) {
  std::vector<Label> labels;
  std::vector<std::string> categories;
  std::unordered_map<std::string, Label> index;

  std::string line;
  std::size_t lineno = 0;
  std::size_t blank_at = 0;
  bool seen_token = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto token = detail::trim(line);
    if (token.empty()) {
      if (!blank_at) blank_at = lineno;
      continue;
    }
    if (blank_at) throw ParseError("blank line inside label stream", blank_at);
    if (!seen_token && token == "label") {
      seen_token = true;
      continue;
    }
    seen_token = true;
    auto [it, inserted] = index.try_emplace(std::string(token), static_cast<Label>(categories.size() + 1));
    if (inserted) categories.emplace_back(token);
    labels.push_back(it->second);
  }
  if (lineno == 0) throw ParseError("empty label input", 0);
  if (labels.empty()) throw ParseError("no labels found", lineno);
  const int k = static_cast<int>(categories.size());
  return {LabelVector(std::move(labels), k), std::move(categories)};
}

inline void write_labels(std::ostream& out, const LabelVector& v) {
  out << "label\n";
  for (auto l : v) out << l << '\n';
}

// Two-column CSV original,canonical
inline void write_label_mapping(std::ostream& out, const ParsedLabels& parsed) {
  out << "original,canonical\n";
  for (std::size_t i = 0; i < parsed.categories.size(); ++i) {
    const auto& cat = parsed.categories[i];
    if (cat.find_first_of(",\"") != std::string::npos) {
      out << '"';
      for (char ch : cat) {
        if (ch == '"') out << '"';
        out << ch;
      }
      out << '"';
    } else {
      out << cat;
    }
    out << ',' << (i + 1) << '\n';
  }
}

struct CanonicalPair {
  LabelVector a;
  LabelVector b;
  int k = 0;
};

namespace detail {

// Relabels used values onto 1..d preserving their numeric order.
inline std::vector<Label> compact(const LabelVector& v, int& used) {
  std::map<Label, Label> rank;
  for (auto l : v) rank.emplace(l, 0);
  Label next = 0;
  for (auto& [from, to] : rank) to = ++next;
  used = next;
  std::vector<Label> out;
  out.reserve(v.size());
  for (auto l : v) out.push_back(rank[l]);
  return out;
}

}  // namespace detail

// Relabels both vectors onto 1..K with K the larger of the two label counts.
// Labels keep their relative order, so already-contiguous vectors are unchanged.
inline CanonicalPair canonical_pair(const LabelVector& a, const LabelVector& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("label vectors differ in length (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
  int ka = 0, kb = 0;
  auto ca = detail::compact(a, ka);
  auto cb = detail::compact(b, kb);
  const int k = std::max(ka, kb);
  return {LabelVector(std::move(ca), k), LabelVector(std::move(cb), k), k};
}

// Replaces every label l by perm(l). The result has k = perm.size().
inline LabelVector apply_permutation(const LabelVector& v, const Permutation& perm) {
  if (static_cast<std::size_t>(v.k()) > perm.size())
    throw std::invalid_argument("permutation smaller than label range");
  std::vector<Label> out;
  out.reserve(v.size());
  for (auto l : v) out.push_back(static_cast<Label>(perm[static_cast<std::size_t>(l - 1)] + 1));
  return LabelVector(std::move(out), static_cast<int>(perm.size()));
}

}  // namespace truematch
