#include "acceptance.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const auto results = acceptance::run(only, [](const acceptance::CriterionResult& r) {
    std::cout << acceptance::format(r) << std::endl;
  });
  int failed = 0;
  for (const auto& r : results) failed += !r.passed;
  std::cout << (results.size() - static_cast<std::size_t>(failed)) << "/" << results.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
