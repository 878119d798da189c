#include <cmath>
#include <istream>
#include <ostream>

#include "rselab/attack_plan.hpp"
#include "rselab/csv.hpp"
#include "rselab/error.hpp"

namespace rselab {

Vector AttackPlan::at(long t) const {
  if (t < start_time || t >= end_time()) return Vector::Zero(values.rows());
  return values.col(t - start_time);
}

void AttackPlan::write_csv(std::ostream& os) const {
  os << 't';
  for (int i = 1; i <= p(); ++i) os << ",a_" << i;
  os << '\n';
  for (long k = 0; k < length(); ++k) {
    os << start_time + k;
    for (int i = 0; i < p(); ++i) os << ',' << csv::format(values(i, k));
    os << '\n';
  }
}

AttackPlan AttackPlan::read_csv(std::istream& is, int p) {
  const auto rows = csv::read_numeric(is);
  AttackPlan plan;
  plan.compromised = SensorSet::none(p);
  plan.method = "file";
  if (rows.empty()) {
    plan.values.resize(p, 0);
    return plan;
  }
  long lo = 0, hi = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (static_cast<int>(row.size()) != p + 1) {
      throw Error(ErrorCode::Io, "attack CSV row " + std::to_string(r + 1) + " needs t and " + std::to_string(p) +
                                     " sensor columns");
    }
    const double t = row[0];
    if (t != std::floor(t) || t < 0) throw Error(ErrorCode::Io, "attack CSV time must be a nonnegative integer");
    const long ti = static_cast<long>(t);
    if (r == 0 || ti < lo) lo = ti;
    if (r == 0 || ti > hi) hi = ti;
  }
  plan.start_time = lo;
  plan.values = Matrix::Zero(p, hi - lo + 1);
  std::vector<int> touched;
  for (const auto& row : rows) {
    const long ti = static_cast<long>(row[0]);
    for (int i = 0; i < p; ++i) {
      plan.values(i, ti - lo) = row[static_cast<std::size_t>(i + 1)];
      if (row[static_cast<std::size_t>(i + 1)] != 0.0) touched.push_back(i);
    }
  }
  plan.compromised = SensorSet::from_unsorted(p, touched);
  return plan;
}

}  // namespace rselab
