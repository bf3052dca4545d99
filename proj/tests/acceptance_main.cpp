#include <cstdio>
#include <cstdlib>

#include "noiselab/harness/acceptance.hpp"

// Runs the full gate (both passes, byte comparison, wall budget) and prints one
// verdict line per criterion. Exit 3 on any failure so CI treats it as a hard stop.
int main() {
  const noiselab::AcceptanceReport rep = noiselab::run_acceptance("acceptance_out", 1, false);
  std::fputs(noiselab::acceptance_table(rep).c_str(), stdout);
  if (!rep.all_pass()) {
    std::fputs("[FAIL] acceptance gate\n", stdout);
    return 3;
  }
  std::fputs("[PASS] acceptance gate\n", stdout);
  return 0;
}
