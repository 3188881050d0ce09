#pragma once

#include <vector>

namespace sgqa {

enum class LpStatus { Optimal, Infeasible, Unbounded, Numerical };

struct LpSolution {
  LpStatus status = LpStatus::Numerical;
  std::vector<double> values;  // one entry per structural variable
  double objective = 0.0;
  long iterations = 0;
};

}  // namespace sgqa
