#pragma once

// Bounded-variable primal simplex over a dense tableau, two-phase with
// artificials. Entering rule is Dantzig pricing with a permanent switch to
// Bland's rule after a degeneracy streak, which guarantees termination.
// Every answer is re-verified against the original rows before it is
// reported optimal; anything that fails verification comes back as a
// Numerical status rather than a wrong optimum.

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "sgqa/ilp.hpp"
#include "sgqa/lp_types.hpp"
#include "sgqa/revised_simplex.hpp"

namespace sgqa {

class DenseSimplex {
 public:
  explicit DenseSimplex(const IlpProblem& p) : problem_(&p) {
    n_ = p.variable_count();
    m_ = p.constraint_count();
    rows_.reserve(m_);
    for (const auto& c : p.constraints())
      rows_.push_back({c.terms, c.sense, c.rhs});
  }

  // Solves max c'x subject to the problem rows and lo <= x <= hi.
  LpSolution solve(const std::vector<double>& lo,
                   const std::vector<double>& hi) {
    LpSolution result;
    const double INF = std::numeric_limits<double>::infinity();

    // initial nonbasic values: structural variables at their lower bound
    std::vector<double> beta(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      double v = rows_[i].rhs;
      for (const auto& [j, a] : rows_[i].terms) v -= a * lo[j];
      beta[i] = v;
    }

    // slack bounds by sense; EQ slacks are pinned at zero
    std::vector<double> slo(m_), shi(m_);
    int n_art = 0;
    std::vector<int> art_row;
    for (int i = 0; i < m_; ++i) {
      switch (rows_[i].sense) {
        case Sense::LE: slo[i] = 0.0; shi[i] = INF; break;
        case Sense::GE: slo[i] = -INF; shi[i] = 0.0; break;
        default: slo[i] = 0.0; shi[i] = 0.0; break;
      }
      if (beta[i] < slo[i] - kFeasTol || beta[i] > shi[i] + kFeasTol) {
        art_row.push_back(i);
        ++n_art;
      }
    }

    width_ = n_ + m_ + n_art;
    lo_.assign(width_, 0.0);
    hi_.assign(width_, 0.0);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = lo[j];
      hi_[j] = hi[j];
    }
    for (int i = 0; i < m_; ++i) {
      lo_[n_ + i] = slo[i];
      hi_[n_ + i] = shi[i];
    }

    tableau_.assign(static_cast<size_t>(m_) * width_, 0.0);
    for (int i = 0; i < m_; ++i) {
      double* row = &tableau_[static_cast<size_t>(i) * width_];
      for (const auto& [j, a] : rows_[i].terms) row[j] += a;
      row[n_ + i] = 1.0;
    }

    basis_.resize(m_);
    in_basis_.assign(width_, 0);
    at_upper_.assign(width_, 0);
    xb_.assign(m_, 0.0);

    int next_art = n_ + m_;
    std::vector<int> art_of_row(m_, -1);
    for (int i = 0; i < m_; ++i) {
      const bool violated =
          beta[i] < slo[i] - kFeasTol || beta[i] > shi[i] + kFeasTol;
      if (!violated) {
        basis_[i] = n_ + i;
        in_basis_[n_ + i] = 1;
        xb_[i] = beta[i];
        continue;
      }
      // slack parked at its nearest bound, artificial takes up the slack
      double sval;
      if (beta[i] > shi[i]) {
        sval = shi[i];
        at_upper_[n_ + i] = 1;
      } else {
        sval = slo[i];
      }
      const double resid = beta[i] - sval;
      const int aj = next_art++;
      art_of_row[i] = aj;
      lo_[aj] = 0.0;
      hi_[aj] = INF;
      double* row = &tableau_[static_cast<size_t>(i) * width_];
      if (resid < 0) {
        // keep the basic (artificial) column at +1: scale the row
        for (int j = 0; j < width_; ++j) row[j] = -row[j];
      }
      row[aj] = 1.0;
      basis_[i] = aj;
      in_basis_[aj] = 1;
      xb_[i] = std::abs(resid);
    }
    first_art_ = n_ + m_;
    iterations_ = 0;
    degenerate_streak_ = 0;
    use_bland_ = false;

    if (n_art > 0) {
      std::vector<double> phase1_cost(width_, 0.0);
      for (int j = first_art_; j < width_; ++j) phase1_cost[j] = -1.0;
      set_costs(phase1_cost);
      const RunStatus rs = run();
      if (rs != RunStatus::OptimalReached) {
        result.status = LpStatus::Numerical;
        result.iterations = iterations_;
        return result;
      }
      double infeas = 0.0;
      for (int i = 0; i < m_; ++i)
        if (basis_[i] >= first_art_) infeas += xb_[i];
      if (infeas > kFeasTol * 10) {
        result.status = LpStatus::Infeasible;
        result.iterations = iterations_;
        return result;
      }
      // clear lingering artificials from the basis where a pivot exists
      for (int i = 0; i < m_; ++i) {
        if (basis_[i] < first_art_) continue;
        const double* row = &tableau_[static_cast<size_t>(i) * width_];
        int piv = -1;
        for (int j = 0; j < first_art_; ++j) {
          if (!in_basis_[j] && std::abs(row[j]) > 1e-7) {
            piv = j;
            break;
          }
        }
        if (piv >= 0)
          pivot(i, piv, basis_value_target(piv));
        else
          hi_[basis_[i]] = 0.0;  // redundant row; pin the artificial
      }
      for (int j = first_art_; j < width_; ++j) hi_[j] = 0.0;
    }

    std::vector<double> cost(width_, 0.0);
    for (int j = 0; j < n_; ++j) cost[j] = problem_->variable(j).coeff;
    set_costs(cost);
    const RunStatus rs = run();
    result.iterations = iterations_;
    if (rs == RunStatus::UnboundedDetected) {
      result.status = LpStatus::Unbounded;
      return result;
    }
    if (rs != RunStatus::OptimalReached) {
      result.status = LpStatus::Numerical;
      return result;
    }

    result.values.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j)
      result.values[j] = at_upper_[j] ? hi_[j] : lo_[j];
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) result.values[basis_[i]] = xb_[i];

    // independent verification on the original rows
    for (int j = 0; j < n_; ++j) {
      if (result.values[j] < lo[j] - kVerifyTol ||
          result.values[j] > hi[j] + kVerifyTol) {
        result.status = LpStatus::Numerical;
        return result;
      }
    }
    for (const auto& r : rows_) {
      double v = 0.0;
      double scale = std::abs(r.rhs);
      for (const auto& [j, a] : r.terms) {
        v += a * result.values[j];
        scale = std::max(scale, std::abs(a));
      }
      const double tol = kVerifyTol * std::max(1.0, scale);
      const bool ok = r.sense == Sense::LE   ? v <= r.rhs + tol
                      : r.sense == Sense::GE ? v >= r.rhs - tol
                                             : std::abs(v - r.rhs) <= tol;
      if (!ok) {
        result.status = LpStatus::Numerical;
        return result;
      }
    }

    result.objective = problem_->objective_of(result.values);
    result.status = LpStatus::Optimal;
    return result;
  }

 private:
  struct Row {
    std::vector<std::pair<int, double>> terms;
    Sense sense;
    double rhs;
  };

  enum class RunStatus { OptimalReached, UnboundedDetected, IterationLimit };

  static constexpr double kPivTol = 1e-9;
  static constexpr double kCostTol = 1e-9;
  static constexpr double kFeasTol = 1e-9;
  static constexpr double kVerifyTol = 1e-7;

  void set_costs(const std::vector<double>& cost) {
    cost_ = cost;
    obj_row_.assign(width_, 0.0);
    for (int j = 0; j < width_; ++j) obj_row_[j] = cost_[j];
    for (int i = 0; i < m_; ++i) {
      const double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &tableau_[static_cast<size_t>(i) * width_];
      for (int j = 0; j < width_; ++j) obj_row_[j] -= cb * row[j];
    }
  }

  double basis_value_target(int var) const {
    return at_upper_[var] ? hi_[var] : lo_[var];
  }

  bool fixed(int j) const { return hi_[j] - lo_[j] < 1e-12; }

  // Gauss-Jordan pivot making column q basic in row r; entering value given.
  void pivot(int r, int q, double entering_value) {
    double* prow = &tableau_[static_cast<size_t>(r) * width_];
    const double piv = prow[q];
    const double inv = 1.0 / piv;
    for (int j = 0; j < width_; ++j) prow[j] *= inv;
    prow[q] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &tableau_[static_cast<size_t>(i) * width_];
      const double f = row[q];
      if (std::abs(f) < 1e-13) continue;
      for (int j = 0; j < width_; ++j) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
    const double fobj = obj_row_[q];
    if (std::abs(fobj) > 0.0) {
      for (int j = 0; j < width_; ++j) obj_row_[j] -= fobj * prow[j];
      obj_row_[q] = 0.0;
    }
    in_basis_[basis_[r]] = 0;
    in_basis_[q] = 1;
    basis_[r] = q;
    xb_[r] = entering_value;
  }

  RunStatus run() {
    const long iter_cap = 20000L + 200L * (static_cast<long>(m_) + width_);
    const long bland_after = 1000L + 20L * (static_cast<long>(m_) + n_);
    const double INF = std::numeric_limits<double>::infinity();

    while (true) {
      if (iterations_ > iter_cap) return RunStatus::IterationLimit;

      // entering variable
      int q = -1;
      double best = kCostTol;
      for (int j = 0; j < width_; ++j) {
        if (in_basis_[j] || fixed(j)) continue;
        const double d = obj_row_[j];
        const double gain = at_upper_[j] ? -d : d;
        if (gain > best) {
          q = j;
          best = gain;
          if (use_bland_) break;  // first improving index
        }
      }
      if (q < 0) return RunStatus::OptimalReached;

      ++iterations_;
      const int dir = at_upper_[q] ? -1 : 1;

      // ratio test over the basic variables, then the entering bound range
      double t = INF;
      int leave_row = -1;
      bool leave_at_upper = false;
      for (int i = 0; i < m_; ++i) {
        const double y = tableau_[static_cast<size_t>(i) * width_ + q];
        const double delta = dir * y;
        if (delta > kPivTol) {
          const double lim = (xb_[i] - lo_[basis_[i]]) / delta;
          if (lim < t - 1e-12 ||
              (lim < t + 1e-12 &&
               (leave_row < 0 || basis_[i] < basis_[leave_row]))) {
            t = std::max(lim, 0.0);
            leave_row = i;
            leave_at_upper = false;
          }
        } else if (delta < -kPivTol) {
          const double lim = (hi_[basis_[i]] - xb_[i]) / (-delta);
          if (lim < t - 1e-12 ||
              (lim < t + 1e-12 &&
               (leave_row < 0 || basis_[i] < basis_[leave_row]))) {
            t = std::max(lim, 0.0);
            leave_row = i;
            leave_at_upper = true;
          }
        }
      }
      const double range = hi_[q] - lo_[q];
      bool bound_flip = false;
      if (range < t) {
        t = range;
        bound_flip = true;
      }
      if (t == INF) return RunStatus::UnboundedDetected;

      if (t < 1e-12) {
        if (++degenerate_streak_ > bland_after) use_bland_ = true;
      } else {
        degenerate_streak_ = 0;
      }

      if (bound_flip) {
        for (int i = 0; i < m_; ++i) {
          const double y = tableau_[static_cast<size_t>(i) * width_ + q];
          if (y != 0.0) xb_[i] -= t * dir * y;
        }
        at_upper_[q] = !at_upper_[q];
        continue;
      }

      const double entering_value = basis_value_target(q) + dir * t;
      for (int i = 0; i < m_; ++i) {
        if (i == leave_row) continue;
        const double y = tableau_[static_cast<size_t>(i) * width_ + q];
        if (y != 0.0) xb_[i] -= t * dir * y;
      }
      at_upper_[basis_[leave_row]] = leave_at_upper;
      pivot(leave_row, q, entering_value);
    }
  }

  const IlpProblem* problem_;
  int n_ = 0, m_ = 0, width_ = 0, first_art_ = 0;
  std::vector<Row> rows_;
  std::vector<double> tableau_;
  std::vector<double> obj_row_;
  std::vector<double> cost_;
  std::vector<double> xb_;
  std::vector<double> lo_, hi_;
  std::vector<int> basis_;
  std::vector<uint8_t> in_basis_;
  std::vector<uint8_t> at_upper_;
  long iterations_ = 0;
  long degenerate_streak_ = 0;
  bool use_bland_ = false;
};

// Engine facade: a dense tableau for small problems, the revised sparse
// engine once the tableau would stop fitting comfortably in cache, and a
// dense fallback whenever the sparse path reports numerical trouble.
class SimplexSolver {
 public:
  enum class Engine { Auto, Dense, Sparse };

  explicit SimplexSolver(const IlpProblem& p, Engine engine = Engine::Auto)
      : problem_(&p) {
    const size_t m = static_cast<size_t>(p.constraint_count());
    const size_t n = static_cast<size_t>(p.variable_count());
    const bool big = m * (m + n) > 2'000'000;
    use_sparse_ = engine == Engine::Sparse || (engine == Engine::Auto && big);
  }

  LpSolution solve(const std::vector<double>& lo,
                   const std::vector<double>& hi) {
    if (use_sparse_) {
      if (!sparse_) sparse_ = std::make_unique<RevisedSimplex>(*problem_);
      LpSolution r = sparse_->solve(lo, hi);
      if (r.status != LpStatus::Numerical) return r;
    }
    if (!dense_) dense_ = std::make_unique<DenseSimplex>(*problem_);
    return dense_->solve(lo, hi);
  }

 private:
  const IlpProblem* problem_;
  bool use_sparse_ = false;
  std::unique_ptr<RevisedSimplex> sparse_;
  std::unique_ptr<DenseSimplex> dense_;
};

// Solves the [0,1] relaxation of a binary problem.
inline LpSolution solve_lp(const IlpProblem& p) {
  SimplexSolver solver(p);
  return solver.solve(std::vector<double>(p.variable_count(), 0.0),
                      std::vector<double>(p.variable_count(), 1.0));
}

}  // namespace sgqa
