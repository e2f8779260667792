// Acceptance gate: one PASS/FAIL line per pinned criterion, details for any
// row that misses its tolerance, nonzero exit if anything fails.

#include <cstdio>

#include <brue/brue.hpp>

int main() {
  const std::vector<brue::CheckGroup> groups = brue::acceptance_checks();
  bool all = true;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const brue::CheckGroup& g = groups[i];
    const bool ok = g.passed();
    all = all && ok;
    std::printf("[%zu/%zu] %s — %s\n", i + 1, groups.size(), ok ? "PASS" : "FAIL",
                g.name.c_str());
    for (const brue::CheckRow& r : g.rows) {
      if (r.pass) continue;
      const char* rel = r.kind == brue::CheckRow::Kind::near
                            ? "expected"
                            : (r.kind == brue::CheckRow::Kind::at_most ? "at most" : "at least");
      std::printf("       %s: observed %.12g, %s %.12g (tol %.3g)\n", r.name.c_str(), r.observed,
                  rel, r.expected, r.tol);
    }
  }
  std::printf("%s\n", all ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL");
  return all ? 0 : 1;
}
