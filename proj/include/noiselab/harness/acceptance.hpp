#pragma once

#include <string>
#include <vector>

namespace noiselab {

struct CheckOutcome {
  bool pass = false;
  std::string detail;
};

// One library fact with an independent oracle (closed form, brute-force scan,
// refinement study); the gate requires every registered check to come back green.
struct DerivedCheck {
  std::string name;
  CheckOutcome (*run)();
};

const std::vector<DerivedCheck>& derived_check_registry();

struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  double total_seconds = 0.0;
  bool all_pass() const;
};

// Runs the whole gate twice (out_dir/pass1, out_dir/pass2) with pinned seeds,
// byte-compares every CSV between the passes, and enforces the wall budget.
// quiet suppresses per-criterion progress lines on stdout.
AcceptanceReport run_acceptance(const std::string& out_dir, int workers, bool quiet);

std::string acceptance_table(const AcceptanceReport& rep);

}  // namespace noiselab
