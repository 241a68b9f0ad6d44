#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "validation.hpp"

// Full-scale acceptance suite: one line per criterion, nonzero exit on any
// unexpected failure. Optional arguments: --quick, --report file.json and
// --only 3,7 to run a subset.
int main(int argc, char** argv) {
  using namespace wigner1d::validation;
  Options opt;
  std::string report;
  std::set<int> only;
  for (int k = 1; k < argc; ++k) {
    const std::string arg = argv[k];
    if (arg == "--quick") {
      opt.quick = true;
    } else if (arg == "--report" && k + 1 < argc) {
      report = argv[++k];
    } else if (arg == "--only" && k + 1 < argc) {
      std::istringstream list(argv[++k]);
      for (std::string item; std::getline(list, item, ',');) only.insert(std::stoi(item));
    } else {
      std::cerr << "usage: acceptance [--quick] [--report file.json] [--only 1,2,...]\n";
      return 2;
    }
  }
  std::vector<Check> checks;
  for (const auto& c : all_checks())
    if (only.empty() || only.count(c.criterion)) checks.push_back(c);
  const auto results = run(checks, opt, &std::cout);
  if (!report.empty()) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : results) j.push_back(to_json(r));
    std::ofstream(report) << j.dump(2) << '\n';
  }
  int failed = 0, expected = 0;
  for (const auto& r : results) {
    failed += !r.passed && !r.expected_failure;
    expected += !r.passed && r.expected_failure;
  }
  std::cout << results.size() - static_cast<std::size_t>(failed + expected) << " passed, " << failed
            << " failed, " << expected << " expected failures\n";
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
