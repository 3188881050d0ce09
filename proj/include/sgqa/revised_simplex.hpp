#pragma once

// Revised primal simplex for large sparse instances. Same contract and
// pivoting rules as the dense tableau engine, but the basis is kept as a
// sparse LU factorization (refreshed periodically) with product-form eta
// updates in between, so per-iteration cost scales with the basis fill-in
// rather than with rows x columns.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "sgqa/ilp.hpp"
#include "sgqa/lp_types.hpp"

namespace sgqa {

class RevisedSimplex {
 public:
  explicit RevisedSimplex(const IlpProblem& p) : problem_(&p) {
    n_ = p.variable_count();
    m_ = p.constraint_count();
    cols_.assign(n_, {});
    rhs_.resize(m_);
    sense_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      const auto& c = p.constraints()[i];
      rhs_[i] = c.rhs;
      sense_[i] = c.sense;
      for (const auto& [j, a] : c.terms)
        if (a != 0.0) cols_[j].emplace_back(i, a);
    }
  }

  LpSolution solve(const std::vector<double>& lo,
                   const std::vector<double>& hi) {
    LpSolution result;
    const double INF = std::numeric_limits<double>::infinity();

    // initial point: structural variables at their lower bound
    std::vector<double> beta = rhs_;
    for (int j = 0; j < n_; ++j) {
      if (lo[j] == 0.0) continue;
      for (const auto& [i, a] : cols_[j]) beta[i] -= a * lo[j];
    }

    std::vector<double> slo(m_), shi(m_);
    art_cols_.clear();
    std::vector<int> art_rows;
    for (int i = 0; i < m_; ++i) {
      switch (sense_[i]) {
        case Sense::LE: slo[i] = 0.0; shi[i] = INF; break;
        case Sense::GE: slo[i] = -INF; shi[i] = 0.0; break;
        default: slo[i] = 0.0; shi[i] = 0.0; break;
      }
      if (beta[i] < slo[i] - kVerifyTol || beta[i] > shi[i] + kVerifyTol)
        art_rows.push_back(i);
    }
    n_art_ = static_cast<int>(art_rows.size());

    lob_.assign(total_vars(), 0.0);
    hib_.assign(total_vars(), 0.0);
    for (int j = 0; j < n_; ++j) {
      lob_[j] = lo[j];
      hib_[j] = hi[j];
    }
    for (int i = 0; i < m_; ++i) {
      lob_[n_ + i] = slo[i];
      hib_[n_ + i] = shi[i];
    }
    basis_.assign(m_, -1);
    state_.assign(total_vars(), kAtLower);
    xb_.assign(m_, 0.0);
    iterations_ = 0;
    degenerate_streak_ = 0;
    use_bland_ = false;
    etas_.clear();

    int next_art = n_ + m_;
    for (int i = 0; i < m_; ++i) {
      const bool violated =
          beta[i] < slo[i] - kVerifyTol || beta[i] > shi[i] + kVerifyTol;
      if (!violated) {
        basis_[i] = n_ + i;
        state_[n_ + i] = kBasic;
        xb_[i] = beta[i];
        continue;
      }
      double sval;
      if (beta[i] > shi[i]) {
        sval = shi[i];
        state_[n_ + i] = kAtUpper;
      } else {
        sval = slo[i];
        state_[n_ + i] = kAtLower;
      }
      const double resid = beta[i] - sval;
      const int aj = next_art++;
      art_cols_.emplace_back(i, resid >= 0 ? 1.0 : -1.0);
      lob_[aj] = 0.0;
      hib_[aj] = INF;
      basis_[i] = aj;
      state_[aj] = kBasic;
      xb_[i] = std::abs(resid);
    }
    cur_lo_ = &lob_;
    cur_hi_ = &hib_;
    if (!refactorize()) {
      result.status = LpStatus::Numerical;
      return result;
    }

    if (n_art_ > 0) {
      std::vector<double> phase1(total_vars(), 0.0);
      for (int j = n_ + m_; j < total_vars(); ++j) phase1[j] = -1.0;
      const RunResult rs = run(phase1, lob_, hib_);
      if (rs != RunResult::Optimal) {
        result.status = LpStatus::Numerical;
        result.iterations = iterations_;
        return result;
      }
      double infeas = 0.0;
      for (int i = 0; i < m_; ++i)
        if (basis_[i] >= n_ + m_) infeas += xb_[i];
      if (infeas > 1e-8) {
        result.status = LpStatus::Infeasible;
        result.iterations = iterations_;
        return result;
      }
      // pin the artificials at zero; basic ones stay parked there
      for (int j = n_ + m_; j < total_vars(); ++j) hib_[j] = 0.0;
    }

    std::vector<double> cost(total_vars(), 0.0);
    for (int j = 0; j < n_; ++j) cost[j] = problem_->variable(j).coeff;
    const RunResult rs = run(cost, lob_, hib_);
    result.iterations = iterations_;
    if (rs == RunResult::Unbounded) {
      result.status = LpStatus::Unbounded;
      return result;
    }
    if (rs != RunResult::Optimal) {
      result.status = LpStatus::Numerical;
      return result;
    }

    result.values.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j)
      result.values[j] = state_[j] == kAtUpper ? hi[j] : lo[j];
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) result.values[basis_[i]] = xb_[i];

    for (int j = 0; j < n_; ++j) {
      if (result.values[j] < lo[j] - kVerifyTol ||
          result.values[j] > hi[j] + kVerifyTol) {
        result.status = LpStatus::Numerical;
        return result;
      }
    }
    for (int i = 0; i < m_; ++i) {
      const auto& c = problem_->constraints()[i];
      double v = 0.0;
      double scale = std::abs(c.rhs);
      for (const auto& [j, a] : c.terms) {
        v += a * result.values[j];
        scale = std::max(scale, std::abs(a));
      }
      const double tol = kVerifyTol * std::max(1.0, scale);
      const bool ok = c.sense == Sense::LE   ? v <= c.rhs + tol
                      : c.sense == Sense::GE ? v >= c.rhs - tol
                                             : std::abs(v - c.rhs) <= tol;
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
  static constexpr double kPivTol = 1e-9;
  static constexpr double kCostTol = 1e-9;
  static constexpr double kZeroTol = 1e-11;
  static constexpr double kVerifyTol = 1e-7;
  static constexpr int kRefactorEvery = 64;

  struct Eta {
    int row;
    std::vector<std::pair<int, double>> entries;  // sparse B^-1 a_q
    double pivot;
  };

  int total_vars() const { return n_ + m_ + n_art_; }

  // column of the full constraint matrix for variable j
  void scatter_column(int j, std::vector<double>& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    if (j < n_) {
      for (const auto& [i, a] : cols_[j]) out[i] = a;
    } else if (j < n_ + m_) {
      out[j - n_] = 1.0;
    } else {
      const auto& [row, sign] = art_cols_[j - n_ - m_];
      out[row] = sign;
    }
  }

  double column_dot(int j, const std::vector<double>& y) const {
    if (j < n_) {
      double s = 0.0;
      for (const auto& [i, a] : cols_[j]) s += a * y[i];
      return s;
    }
    if (j < n_ + m_) return y[j - n_];
    const auto& [row, sign] = art_cols_[j - n_ - m_];
    return sign * y[row];
  }

  bool refactorize() {
    using Triplet = Eigen::Triplet<double>;
    std::vector<Triplet> trips;
    std::vector<double> col(m_);
    for (int i = 0; i < m_; ++i) {
      const int j = basis_[i];
      if (j < n_) {
        for (const auto& [row, a] : cols_[j]) trips.emplace_back(row, i, a);
      } else if (j < n_ + m_) {
        trips.emplace_back(j - n_, i, 1.0);
      } else {
        const auto& [row, sign] = art_cols_[j - n_ - m_];
        trips.emplace_back(row, i, sign);
      }
    }
    Eigen::SparseMatrix<double> B(m_, m_);
    B.setFromTriplets(trips.begin(), trips.end());
    B.makeCompressed();
    lu_.compute(B);
    if (lu_.info() != Eigen::Success) return false;
    etas_.clear();
    return true;
  }

  // x := B^-1 x
  void ftran(std::vector<double>& x) {
    Eigen::Map<Eigen::VectorXd> v(const_cast<double*>(x.data()), m_);
    Eigen::VectorXd solved = lu_.solve(v);
    std::copy(solved.data(), solved.data() + m_, x.begin());
    for (const auto& eta : etas_) {
      const double t = x[eta.row] / eta.pivot;
      if (std::abs(t) < kZeroTol) {
        x[eta.row] = 0.0;
        continue;
      }
      for (const auto& [i, d] : eta.entries) x[i] -= d * t;
      x[eta.row] = t;
    }
  }

  // y := B^-T y
  void btran(std::vector<double>& y) {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = y[it->row];
      for (const auto& [i, d] : it->entries) s -= d * y[i];
      y[it->row] = s / it->pivot;
    }
    Eigen::Map<Eigen::VectorXd> v(y.data(), m_);
    Eigen::VectorXd solved = lu_.adjoint().solve(v);
    std::copy(solved.data(), solved.data() + m_, y.begin());
  }

  void recompute_basics(const std::vector<double>& lo,
                        const std::vector<double>& hi) {
    std::vector<double> r = rhs_;
    for (int j = 0; j < total_vars(); ++j) {
      if (state_[j] == kBasic) continue;
      const double v = state_[j] == kAtUpper ? hi[j] : lo[j];
      if (v == 0.0) continue;
      if (j < n_) {
        for (const auto& [i, a] : cols_[j]) r[i] -= a * v;
      } else if (j < n_ + m_) {
        r[j - n_] -= v;
      } else {
        const auto& [row, sign] = art_cols_[j - n_ - m_];
        r[row] -= sign * v;
      }
    }
    ftran(r);
    xb_ = std::move(r);
  }

  enum State : uint8_t { kAtLower = 0, kAtUpper = 1, kBasic = 2 };

  enum class RunResult { Optimal, Unbounded, Stalled };

  RunResult run(const std::vector<double>& cost, const std::vector<double>& lo,
                const std::vector<double>& hi) {
    const int N = total_vars();
    const long iter_cap = 20000L + 200L * (static_cast<long>(m_) + N);
    const long bland_after = 2000L + 20L * (static_cast<long>(m_) + n_);
    const double INF = std::numeric_limits<double>::infinity();
    std::vector<double> y(m_), w(m_);

    while (true) {
      if (iterations_ > iter_cap) return RunResult::Stalled;

      // reduced costs via BTRAN
      std::fill(y.begin(), y.end(), 0.0);
      for (int i = 0; i < m_; ++i) y[i] = cost[basis_[i]];
      btran(y);

      int q = -1;
      double best = kCostTol;
      for (int j = 0; j < N; ++j) {
        if (state_[j] == kBasic || hi[j] - lo[j] < 1e-12) continue;
        const double d = cost[j] - column_dot(j, y);
        const double gain = state_[j] == kAtUpper ? -d : d;
        if (gain > best) {
          q = j;
          best = gain;
          if (use_bland_) break;
        }
      }
      if (q < 0) return RunResult::Optimal;

      ++iterations_;
      const int dir = state_[q] == kAtUpper ? -1 : 1;
      scatter_column(q, w);
      ftran(w);

      double t = INF;
      int leave_row = -1;
      bool leave_at_upper = false;
      for (int i = 0; i < m_; ++i) {
        const double delta = dir * w[i];
        const int bv = basis_[i];
        if (delta > kPivTol) {
          const double lim = (xb_[i] - lo[bv]) / delta;
          if (lim < t - 1e-12 ||
              (lim < t + 1e-12 &&
               (leave_row < 0 || bv < basis_[leave_row]))) {
            t = std::max(lim, 0.0);
            leave_row = i;
            leave_at_upper = false;
          }
        } else if (delta < -kPivTol) {
          const double lim = (hi[bv] - xb_[i]) / (-delta);
          if (lim < t - 1e-12 ||
              (lim < t + 1e-12 &&
               (leave_row < 0 || bv < basis_[leave_row]))) {
            t = std::max(lim, 0.0);
            leave_row = i;
            leave_at_upper = true;
          }
        }
      }
      const double range = hi[q] - lo[q];
      bool bound_flip = false;
      if (range < t) {
        t = range;
        bound_flip = true;
      }
      if (t == INF) return RunResult::Unbounded;

      if (t < 1e-12) {
        if (++degenerate_streak_ > bland_after) use_bland_ = true;
      } else {
        degenerate_streak_ = 0;
      }

      if (bound_flip) {
        if (t != 0.0)
          for (int i = 0; i < m_; ++i)
            if (w[i] != 0.0) xb_[i] -= t * dir * w[i];
        state_[q] = state_[q] == kAtUpper ? kAtLower : kAtUpper;
        continue;
      }

      const double entering_value =
          (state_[q] == kAtUpper ? hi[q] : lo[q]) + dir * t;
      for (int i = 0; i < m_; ++i)
        if (i != leave_row && w[i] != 0.0) xb_[i] -= t * dir * w[i];

      const int leaving = basis_[leave_row];
      state_[leaving] = leave_at_upper ? kAtUpper : kAtLower;
      state_[q] = kBasic;
      basis_[leave_row] = q;
      xb_[leave_row] = entering_value;

      Eta eta;
      eta.row = leave_row;
      eta.pivot = w[leave_row];
      for (int i = 0; i < m_; ++i)
        if (i != leave_row && std::abs(w[i]) > kZeroTol)
          eta.entries.emplace_back(i, w[i]);
      etas_.push_back(std::move(eta));

      if (static_cast<int>(etas_.size()) >= kRefactorEvery) {
        if (!refactorize()) return RunResult::Stalled;
        recompute_basics(*cur_lo_, *cur_hi_);
      }
    }
  }

  const IlpProblem* problem_;
  int n_ = 0, m_ = 0, n_art_ = 0;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> rhs_;
  std::vector<Sense> sense_;
  std::vector<std::pair<int, double>> art_cols_;  // (row, sign)

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  std::vector<Eta> etas_;
  std::vector<int> basis_;
  std::vector<uint8_t> state_;
  std::vector<double> xb_;
  std::vector<double> lob_, hib_;
  const std::vector<double>* cur_lo_ = nullptr;
  const std::vector<double>* cur_hi_ = nullptr;
  long iterations_ = 0;
  long degenerate_streak_ = 0;
  bool use_bland_ = false;
};

}  // namespace sgqa
