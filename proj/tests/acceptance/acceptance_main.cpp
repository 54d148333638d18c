#include <cstdio>
#include <cstdlib>

#include "jmsdp/acceptance.hpp"

int main(int argc, char** argv) {
  jmsdp::acceptance::Options opts;
  for (int i = 1; i < argc; ++i) opts.only.insert(std::atoi(argv[i]));
  const auto results = jmsdp::acceptance::run(opts);
  int failed = 0;
  for (const auto& r : results) {
    std::printf("%s\n", jmsdp::acceptance::format_line(r).c_str());
    failed += r.pass ? 0 : 1;
  }
  std::printf("%zu criteria, %d failed\n", results.size(), failed);
  return failed == 0 ? 0 : 1;
}
