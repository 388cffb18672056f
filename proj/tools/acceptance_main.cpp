#include <iostream>

#include "CLI11.hpp"
#include "mahler/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Runs the numbered acceptance checks and prints one PASS/FAIL line each."};
  std::vector<int> only;
  mahler::AcceptanceOptions opt;
  app.add_option("--only", only, "criterion ids to run")->check(CLI::Range(1, mahler::kCriterionCount));
  app.add_option("--seed", opt.seed, "base sample seed");
  app.add_option("--workers", opt.workers, "threads across samples (0: automatic)");
  CLI11_PARSE(app, argc, argv);
  if (only.empty())
    for (int id = 1; id <= mahler::kCriterionCount; ++id) only.push_back(id);
  int failed = 0;
  for (int id : only) {
    auto r = mahler::run_criterion(id, opt);
    std::cout << mahler::format_result(r) << std::endl;
    failed += r.pass ? 0 : 1;
  }
  std::cout << (only.size() - failed) << "/" << only.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
