// Runs every acceptance criterion and prints one line per criterion.
// Exit status is 0 only when all criteria pass.

#include <cstdio>
#include <string>
#include <vector>

#include "sl2lab/suite.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> ids;
  for (int i = 1; i < argc; ++i) ids.emplace_back(argv[i]);
  if (ids.empty()) ids = sl2lab::criterion_ids();
  int failed = 0;
  for (const auto& id : ids) {
    const sl2lab::CriterionReport r = sl2lab::run_criterion(id);
    std::printf("%s (%.1fs)\n", sl2lab::summary_line(r).c_str(), r.runtime_seconds);
    if (!r.note.empty()) std::printf("    note: %s\n", r.note.c_str());
    std::fflush(stdout);
    if (!r.pass()) ++failed;
  }
  std::printf("%d of %zu criteria failed\n", failed, ids.size());
  return failed == 0 ? 0 : 1;
}
