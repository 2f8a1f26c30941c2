// Runs the acceptance criteria AC1..AC11 and prints one line per criterion:
//   AC<k> PASS|FAIL <title>  checks=<n> worst=<check name> value=<v> tol=<t> time=<s>
// Failing checks are listed below their criterion. Exit status 1 if any fails.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>

#include "holotrace/verify.hpp"

int main(int argc, char** argv) {
  int threads = static_cast<int>(std::max(1u, std::min(4u, std::thread::hardware_concurrency())));
  if (argc > 1) threads = std::max(1, std::atoi(argv[1]));
  auto suite = holotrace::verify::core_suite(threads);
  int failed = 0;
  for (auto& c : suite) {
    bool ok = c.pass();
    failed += ok ? 0 : 1;
    std::printf("%-4s %s %-36s checks=%zu", c.id.c_str(), ok ? "PASS" : "FAIL", c.title.c_str(), c.checks.size());
    if (const auto* w = c.worst())
      std::printf(" worst=\"%s\" value=%.3e %s %.1e", w->name.c_str(), w->value, w->relation.c_str(), w->tolerance);
    std::printf(" time=%.2fs\n", c.seconds);
    if (!c.error.empty()) std::printf("     error: %s\n", c.error.c_str());
    for (auto& k : c.checks)
      if (!k.pass) std::printf("     failed: %s value=%.3e %s %.1e\n", k.name.c_str(), k.value, k.relation.c_str(), k.tolerance);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(suite.size()) - failed, suite.size());
  return failed == 0 ? 0 : 1;
}
