// Two random "outlier detectors" on 100 cases, matched by trace
// maximization and by truematch. Prints the expected matched tables.

#include <cstdio>

#include "truematch/truematch.hpp"

int main() {
  using namespace truematch;
  for (auto method : {Method::tracemax, Method::truematch, Method::truematch_heuristic}) {
    Rng rng = make_rng(kDefaultSeed);
    const auto s = outlier_scenario(10000, method, rng);
    std::printf("%-20s expected table %%: [[%6.2f %6.2f] [%6.2f %6.2f]]  diagonal %.3f\n",
                std::string(to_string(method)).c_str(), 100 * s.expected_table(0, 0),
                100 * s.expected_table(0, 1), 100 * s.expected_table(1, 0), 100 * s.expected_table(1, 1),
                s.mean_stats.diagonal);
  }
}
