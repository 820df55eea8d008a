// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <string>

#include "isac/acceptance.hpp"

int main(int argc, char** argv) {
  const std::string suite = argc > 1 ? argv[1] : "all";
  int failed = 0;
  isac::run_suite(suite, [&](const isac::CriterionResult& r) {
    failed += !r.pass;
    std::printf("%s\n", isac::format_result(r).c_str());
    std::fflush(stdout);
  });
  std::printf("%s: %d failed\n", suite.c_str(), failed);
  return failed ? 1 : 0;
}
