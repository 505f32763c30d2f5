#include "ftpit/overhead.hpp"

#include <cmath>
#include <limits>

#include "ftpit/errors.hpp"

namespace ftpit {

double CostModel::alpha() const { return n_c * gamma_c / (n_f * gamma_f); }

void CostModel::validate() const {
  if (!(gamma_f > 0)) throw ConfigError("cost model needs gamma_f > 0");
  if (!(n_f > 0)) throw ConfigError("cost model needs n_f > 0");
  if (P < 0 || K < 0 || K_fault < 0 || n_c < 0 || gamma_c < 0 || n_rec < 0 || gamma_rec < 0) {
    throw ConfigError("cost model counts and costs must be non-negative (K_add excepted)");
  }
}

double t_no_fault(const CostModel& m) {
  return (m.P + m.K) * m.n_c * m.gamma_c + m.K * m.n_f * m.gamma_f;
}

double overhead_restart(const CostModel& m) {
  return (m.P + m.K_fault) * m.n_c * m.gamma_c + m.K_fault * m.n_f * m.gamma_f;
}

double t_restart(const CostModel& m) {
  return (2 * m.P + m.K + m.K_fault) * m.n_c * m.gamma_c + (m.K + m.K_fault) * m.n_f * m.gamma_f;
}

double overhead_recovery(const CostModel& m) {
  return (m.K_add * m.n_c + m.n_rec) * m.gamma_c + m.K_add * m.n_f * m.gamma_f + m.gamma_rec;
}

EfficiencyReport efficiency_ratio(const CostModel& m) {
  m.validate();
  EfficiencyReport r;
  const double a = m.alpha();
  const double num = (1 + a) * m.K_fault + a * m.P;
  const double rec_term = m.n_c > 0 ? a * m.n_rec / m.n_c : m.n_rec * m.gamma_c / (m.n_f * m.gamma_f);
  const double den = (1 + a) * m.K_add + rec_term + m.gamma_rec / (m.n_f * m.gamma_f);
  if (den == 0) {
    r.infinite = true;
    r.ratio = std::numeric_limits<double>::infinity();
  } else {
    r.ratio = num / den;
  }
  r.k_add_ok = m.K_add <= m.K_fault;
  r.n_rec_ok = m.n_rec <= m.n_c * m.P;
  r.gamma_rec_ok = m.gamma_rec < 0.1 * m.n_f * m.gamma_f;
  return r;
}

}  // namespace ftpit
