#pragma once

namespace ftpit {

/// Abstract cost model of a PFASST run with one fault. Costs are in
/// arbitrary time units per sweep.
struct CostModel {
  double P = 1;
  double K = 0;
  double K_fault = 0;
  double K_add = 0;
  double n_c = 1;
  double n_f = 1;
  double gamma_c = 0;
  double gamma_f = 1;
  double n_rec = 0;
  double gamma_rec = 0;

  /// n_c Γ_c / (n_f Γ_f)
  double alpha() const;
  void validate() const;
};

double t_no_fault(const CostModel& m);
double overhead_restart(const CostModel& m);
/// Time of a run restarted after the fault: the aborted part plus a full run.
double t_restart(const CostModel& m);
double overhead_recovery(const CostModel& m);

struct EfficiencyReport {
  double ratio = 0;
  bool infinite = false;        // zero recovery overhead
  bool k_add_ok = false;        // K_add <= K_fault
  bool n_rec_ok = false;        // n_rec <= n_c P
  bool gamma_rec_ok = false;    // Γ_rec < 0.1 n_f Γ_f
  bool all_criteria() const { return k_add_ok && n_rec_ok && gamma_rec_ok; }
};

/// Restart overhead over recovery overhead, written in terms of α.
EfficiencyReport efficiency_ratio(const CostModel& m);

}  // namespace ftpit
