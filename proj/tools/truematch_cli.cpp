// truematch command-line front end: match, agree, mmcc, simulate.
//
// Exit codes: 0 success, 2 input error, 3 internal invariant violation.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "truematch/serialize.hpp"
#include "truematch/truematch.hpp"

namespace {

using namespace truematch;
namespace ser = truematch::json;

constexpr int kExitInput = 2;
constexpr int kExitInvariant = 3;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvariantError : std::logic_error {
  using std::logic_error::logic_error;
};

ParsedLabels read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open");
  try {
    return parse_labels(in);
  } catch (const ParseError& e) {
    throw InputError(path + ": " + e.what());
  }
}

// Writes to path, or standard output for "" and "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw InputError(path + ": cannot open for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", ser::sig6(v));
  return buf;
}

Method method_from(const std::string& name) {
  if (auto m = parse_method(name)) return *m;
  throw InputError("unknown method '" + name + "' (tracemax, truematch, truematch-heuristic)");
}

// Matrix<double> from a CSV of numeric columns; a non-numeric first line is a header.
Matrix<double> read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open");
  std::vector<double> values;
  std::size_t cols = 0, rows = 0, lineno = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    bool numeric = true;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto first = cell.find_first_not_of(" \t");
      const auto last = cell.find_last_not_of(" \t");
      const std::string tok = first == std::string::npos ? "" : cell.substr(first, last - first + 1);
      double v = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows == 0 && cols == 0) {
        cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
        continue;  // header
      }
      throw InputError(path + ": non-numeric value (line " + std::to_string(lineno) + ")");
    }
    if (cols == 0) cols = row.size();
    if (row.size() != cols)
      throw InputError(path + ": expected " + std::to_string(cols) + " columns (line " +
                       std::to_string(lineno) + ")");
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw InputError(path + ": no data rows");
  Matrix<double> m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = values[r * cols + c];
  return m;
}

// "0.5,0.7", "lo:hi:step", or "full" (the given default grid).
std::vector<double> parse_grid(const std::string& text, const std::vector<double>& full) {
  if (text == "full") return full;
  std::vector<double> out;
  auto to_double = [&](const std::string& s) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
      throw InputError("bad grid value '" + s + "' in '" + text + "'");
    return v;
  };
  if (std::count(text.begin(), text.end(), ':') == 2) {
    const auto a = text.find(':'), b = text.rfind(':');
    const double lo = to_double(text.substr(0, a));
    const double hi = to_double(text.substr(a + 1, b - a - 1));
    const double step = to_double(text.substr(b + 1));
    if (!(step > 0) || hi < lo) throw InputError("bad grid range '" + text + "'");
    const auto count = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(ser::sig6(lo + static_cast<double>(i) * step));
    return out;
  }
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(to_double(tok));
  if (out.empty()) throw InputError("empty grid");
  return out;
}

std::vector<double> full_p_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 99; ++i) g.push_back(i / 100.0);
  return g;
}

std::vector<double> full_kappa_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 100; ++i) g.push_back(i / 100.0);
  return g;
}

// ---------------------------------------------------------------- match

struct MatchArgs {
  std::string a, b, method = "truematch", out;
  std::uint64_t seed = kDefaultSeed;
};

void run_match(const MatchArgs& args) {
  const Method method = method_from(args.method);
  const auto pa = read_labels(args.a);
  const auto pb = read_labels(args.b);
  if (pa.labels.size() != pb.labels.size())
    throw InputError(args.b + ": has " + std::to_string(pb.labels.size()) + " labels, " + args.a + " has " +
                     std::to_string(pa.labels.size()));
  const auto pair = canonical_pair(pa.labels, pb.labels);
  const auto before = crosstab(pair.a, pair.b, pair.k);
  Rng rng = make_rng(args.seed);
  const auto result = match(before, method, rng);
  if (!(result.matched_table == crosstab(pair.a, apply_permutation(pair.b, result.perm), pair.k)))
    throw InvariantError("matched table disagrees with relabeled crosstab");

  Output out(args.out);
  out.stream() << ser::match_result(result, before, args.seed).dump(2) << '\n';
}

// ---------------------------------------------------------------- agree

struct AgreeArgs {
  std::string a, b, out;
};

void run_agree(const AgreeArgs& args) {
  const auto pa = read_labels(args.a);
  const auto pb = read_labels(args.b);
  if (pa.labels.size() != pb.labels.size())
    throw InputError(args.b + ": has " + std::to_string(pb.labels.size()) + " labels, " + args.a + " has " +
                     std::to_string(pa.labels.size()));
  if (pa.labels.size() < 2) throw InputError("agreement indices need at least 2 cases");
  const auto pair = canonical_pair(pa.labels, pb.labels);
  Output out(args.out);
  out.stream() << ser::agreement(crosstab(pair.a, pair.b, pair.k)).dump(2) << '\n';
}

// ---------------------------------------------------------------- mmcc

struct MmccArgs {
  std::string data, matcher = "truematch", probs_out, stats_out;
  int k = 2;
  std::size_t rounds = 1000, iterations = 100;
  std::uint64_t seed = kDefaultSeed;
  bool early_stop = false;
};

void run_mmcc(const MmccArgs& args) {
  const auto data = read_numeric_csv(args.data);
  if (args.k < 1) throw InputError("--k must be at least 1");
  if (data.rows() < static_cast<std::size_t>(args.k)) throw InputError(args.data + ": fewer rows than --k");
  if (args.rounds < 2) throw InputError("--rounds must be at least 2");

  MmccOptions opt;
  opt.rounds = args.rounds;
  opt.matcher = method_from(args.matcher);
  opt.early_stop = args.early_stop;
  Rng rng = make_rng(args.seed);
  MmccResult result;
  try {
    result = mmcc_run(data, args.k, LloydClusterer(args.iterations), opt, rng);
  } catch (const std::invalid_argument& e) {
    throw InputError(args.data + ": " + e.what());
  }
  const auto stats = cic_stats(result.probs);

  {
    Output out(args.probs_out);
    auto& os = out.stream();
    for (int c = 1; c <= args.k; ++c) os << (c > 1 ? "," : "") << 'p' << c;
    os << '\n';
    const auto& p = result.probs.probs;
    for (std::size_t i = 0; i < p.rows(); ++i) {
      for (std::size_t c = 0; c < p.cols(); ++c) os << (c ? "," : "") << fmt6(p(i, c));
      os << '\n';
    }
  }
  auto j = ser::cic(stats);
  j["N"] = data.rows();
  j["K"] = args.k;
  j["matcher"] = std::string(to_string(opt.matcher));
  j["rounds"] = result.rounds_run;
  j["seed"] = args.seed;
  Output out(args.stats_out);
  out.stream() << j.dump(2) << '\n';
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string scenario = "grid", matcher = "truematch", p_grid = "0.5,0.7,0.9", kappa_grid = "0,0.5,1", out,
              heatmap, heatmap_metric = "H";
  std::size_t runs = 10000, rounds = 1000, n = 100;
  unsigned threads = 0;
  bool fixed = false;
  std::uint64_t seed = kDefaultSeed;
};

void write_heatmap(const std::string& path, const std::string& metric, const std::vector<CellResult>& cells,
                   std::size_t rows, std::size_t cols) {
  auto value = [&](const CellResult& c) { return metric == "I" ? c.I : metric == "CIC" ? c.CIC : c.H; };
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& c : cells)
    if (!c.degenerate) {
      lo = std::min(lo, value(c));
      hi = std::max(hi, value(c));
    }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError(path + ": cannot open for writing");
  // plain PGM: rows are p values, columns kappa values; degenerate cells white
  f << "P2\n" << cols << ' ' << rows << "\n255\n";
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto& cell = cells[r * cols + c];
      int gray = 255;
      if (!cell.degenerate) {
        const double t = hi > lo ? (value(cell) - lo) / (hi - lo) : 0.5;
        gray = static_cast<int>(std::lround(220.0 * t));
      }
      f << (c ? " " : "") << gray;
    }
    f << '\n';
  }
}

void run_simulate(const SimulateArgs& args) {
  const Method method = method_from(args.matcher);
  if (args.scenario == "outlier") {
    if (args.runs < 1) throw InputError("--runs must be at least 1");
    Rng rng = make_rng(args.seed);
    const auto summary = outlier_scenario(args.runs, method, rng, args.n);
    Output out(args.out);
    out.stream() << ser::outlier(summary, method, args.seed).dump(2) << '\n';
    return;
  }
  if (args.scenario != "grid") throw InputError("unknown scenario '" + args.scenario + "' (outlier, grid)");

  const auto ps = parse_grid(args.p_grid, full_p_grid());
  const auto kappas = parse_grid(args.kappa_grid, full_kappa_grid());
  SimulationConfig defaults;
  defaults.n = args.n;
  defaults.rounds = args.rounds;
  defaults.fixed = args.fixed;
  defaults.matcher = method;
  defaults.seed = args.seed;
  const unsigned threads = args.threads ? args.threads : std::max(1u, std::thread::hardware_concurrency());

  Output out(args.out);
  auto& os = out.stream();
  os << "p,kappa,H,I,CIC,degenerate,fixed,matcher,seed\n";
  const std::size_t total = ps.size() * kappas.size();
  std::size_t done = 0;
  std::vector<CellResult> cells;
  try {
    cells = grid_sweep(ps, kappas, defaults, threads, [&](const CellResult& c) {
      os << fmt6(c.p) << ',' << fmt6(c.kappa) << ',' << fmt6(c.H) << ',' << fmt6(c.I) << ',' << fmt6(c.CIC) << ','
         << (c.degenerate ? 1 : 0) << ',' << (args.fixed ? 1 : 0) << ',' << to_string(method) << ',' << c.seed
         << '\n';
      os.flush();
      if (++done % 100 == 0 && total > 100) std::cerr << "simulate: " << done << '/' << total << " cells\n";
    });
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  if (!args.heatmap.empty()) write_heatmap(args.heatmap, args.heatmap_metric, cells, ps.size(), kappas.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"truematch: cluster label matching, agreement, MMCC and simulations"};
  app.require_subcommand(1);

  MatchArgs match_args;
  auto* match_cmd = app.add_subcommand("match", "Match the labels of B to A; JSON result");
  match_cmd->add_option("a", match_args.a, "Reference label file")->required();
  match_cmd->add_option("b", match_args.b, "Label file to relabel")->required();
  match_cmd->add_option("--method", match_args.method, "tracemax | truematch | truematch-heuristic")
      ->capture_default_str();
  match_cmd->add_option("--seed", match_args.seed, "Random seed")->capture_default_str();
  match_cmd->add_option("-o,--out", match_args.out, "Output file (default stdout)");

  AgreeArgs agree_args;
  auto* agree_cmd = app.add_subcommand("agree", "Agreement indices of two label files; JSON result");
  agree_cmd->add_option("a", agree_args.a, "First label file")->required();
  agree_cmd->add_option("b", agree_args.b, "Second label file")->required();
  agree_cmd->add_option("-o,--out", agree_args.out, "Output file (default stdout)");

  MmccArgs mmcc_args;
  auto* mmcc_cmd = app.add_subcommand("mmcc", "Bagged k-means with vote aggregation; P CSV and stats JSON");
  mmcc_cmd->add_option("data", mmcc_args.data, "CSV of numeric feature columns")->required();
  mmcc_cmd->add_option("--k", mmcc_args.k, "Number of clusters")->capture_default_str();
  mmcc_cmd->add_option("--rounds", mmcc_args.rounds, "Resampling rounds")->capture_default_str();
  mmcc_cmd->add_option("--matcher", mmcc_args.matcher, "tracemax | truematch | truematch-heuristic")
      ->capture_default_str();
  mmcc_cmd->add_option("--seed", mmcc_args.seed, "Random seed")->capture_default_str();
  mmcc_cmd->add_option("--iterations", mmcc_args.iterations, "Lloyd iterations per fit")->capture_default_str();
  mmcc_cmd->add_flag("--early-stop", mmcc_args.early_stop, "Stop once P settles (window 50, tol 1e-3)");
  mmcc_cmd->add_option("--probs-out", mmcc_args.probs_out, "P CSV file (default stdout)");
  mmcc_cmd->add_option("--stats-out", mmcc_args.stats_out, "Stats JSON file (default stdout)");

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Outlier scenario or (p, kappa) grid sweep");
  sim_cmd->add_option("--scenario", sim_args.scenario, "outlier | grid")->capture_default_str();
  sim_cmd->add_option("--matcher", sim_args.matcher, "tracemax | truematch | truematch-heuristic")
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim_args.seed, "Random seed")->capture_default_str();
  sim_cmd->add_option("--runs", sim_args.runs, "Outlier scenario repetitions")->capture_default_str();
  sim_cmd->add_option("--p-grid", sim_args.p_grid, "p values: list, lo:hi:step, or full")->capture_default_str();
  sim_cmd->add_option("--kappa-grid", sim_args.kappa_grid, "kappa values: list, lo:hi:step, or full")
      ->capture_default_str();
  sim_cmd->add_option("--rounds", sim_args.rounds, "Bootstrap rounds per cell")->capture_default_str();
  sim_cmd->add_option("--n", sim_args.n, "Sample size")->capture_default_str();
  sim_cmd->add_flag("--fixed", sim_args.fixed, "Enforce exact cluster sizes");
  sim_cmd->add_option("--threads", sim_args.threads, "Worker threads (0 = all cores)");
  sim_cmd->add_option("-o,--out", sim_args.out, "Output file (default stdout)");
  sim_cmd->add_option("--heatmap", sim_args.heatmap, "Also write a grayscale PGM of the grid");
  sim_cmd->add_option("--heatmap-metric", sim_args.heatmap_metric, "H | I | CIC")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*match_cmd) run_match(match_args);
    if (*agree_cmd) run_agree(agree_args);
    if (*mmcc_cmd) run_mmcc(mmcc_args);
    if (*sim_cmd) run_simulate(sim_args);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InvariantError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInvariant;
  }
  return 0;
}
