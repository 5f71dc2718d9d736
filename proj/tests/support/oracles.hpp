#pragma once

// Independent reference computations for the evaluation toolkit: Eigen for
// least squares, Boost for distribution tails, explicit loops for sums of
// squares.

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "elvis/paradise.hpp"
#include "elvis/rng.hpp"

namespace elvis::test {

struct OlsOracle {
  std::vector<double> weights;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> std_errors;
};

inline OlsOracle ols_oracle(const std::vector<std::vector<double>>& columns, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(y.size());
  const auto k = static_cast<Eigen::Index>(columns.size());
  Eigen::MatrixXd x(n, k + 1);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < k; ++j) x(i, j + 1) = columns[j][i];
    v(i) = y[i];
  }
  const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(v);
  const Eigen::VectorXd resid = v - x * beta;
  const double sse = resid.squaredNorm();
  const double sst = (v.array() - v.mean()).square().sum();
  const double sigma2 = sse / static_cast<double>(n - k - 1);
  const Eigen::MatrixXd cov = sigma2 * (x.transpose() * x).inverse();
  OlsOracle o;
  o.intercept = beta(0);
  for (Eigen::Index j = 0; j < k; ++j) {
    o.weights.push_back(beta(j + 1));
    o.std_errors.push_back(std::sqrt(cov(j + 1, j + 1)));
  }
  o.r_squared = 1.0 - sse / sst;
  return o;
}

inline double f_tail_oracle(double f, double d1, double d2) {
  if (f <= 0.0) return 1.0;
  return boost::math::ibeta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

inline double t_tail_oracle(double t, double df) { return boost::math::ibeta(df / 2.0, 0.5, df / (df + t * t)); }

struct AnovaOracle {
  double ss_strategy = 0.0;
  double ss_task = 0.0;
  double ss_subject = 0.0;
  double ss_residual = 0.0;
  int df_strategy = 0;
  int df_task = 0;
  int df_subject = 0;
  int df_residual = 0;
  double f(double ss, int df) const { return (ss / df) / (ss_residual / df_residual); }
};

/// Balanced strategy x task design with subjects nested in strategy.
inline AnovaOracle anova_oracle(const std::vector<AnovaObservation>& obs) {
  auto mean_where = [&](auto pred) {
    double s = 0.0;
    int n = 0;
    for (const auto& o : obs) {
      if (pred(o)) {
        s += o.value;
        ++n;
      }
    }
    return s / n;
  };
  const double grand = mean_where([](const AnovaObservation&) { return true; });
  std::set<std::string> strategies;
  std::set<int> tasks;
  std::map<std::string, std::string> subjects;
  for (const auto& o : obs) {
    strategies.insert(o.strategy);
    tasks.insert(o.task);
    subjects[o.subject] = o.strategy;
  }
  AnovaOracle a;
  double ss_total = 0.0;
  for (const auto& o : obs) {
    const double ms = mean_where([&](const AnovaObservation& p) { return p.strategy == o.strategy; });
    const double mt = mean_where([&](const AnovaObservation& p) { return p.task == o.task; });
    const double mj = mean_where([&](const AnovaObservation& p) { return p.subject == o.subject; });
    a.ss_strategy += (ms - grand) * (ms - grand);
    a.ss_task += (mt - grand) * (mt - grand);
    a.ss_subject += (mj - ms) * (mj - ms);
    ss_total += (o.value - grand) * (o.value - grand);
  }
  a.ss_residual = ss_total - a.ss_strategy - a.ss_task - a.ss_subject;
  a.df_strategy = static_cast<int>(strategies.size()) - 1;
  a.df_task = static_cast<int>(tasks.size()) - 1;
  a.df_subject = static_cast<int>(subjects.size() - strategies.size());
  a.df_residual = static_cast<int>(obs.size()) - 1 - a.df_strategy - a.df_task - a.df_subject;
  return a;
}

/// Random balanced design of at most 30 rows with real residual freedom.
inline std::vector<AnovaObservation> random_design(Rng& rng) {
  for (;;) {
    const int strategies = 2 + static_cast<int>(rng.index(2));
    const int subjects = 2 + static_cast<int>(rng.index(3));
    const int tasks = 2 + static_cast<int>(rng.index(3));
    const int reps = 1 + static_cast<int>(rng.index(2));
    if (strategies * subjects * tasks * reps > 30) continue;
    std::vector<AnovaObservation> obs;
    std::vector<double> effect(static_cast<std::size_t>(tasks));
    for (auto& e : effect) e = rng.normal(0.0, 1.0);
    for (int s = 0; s < strategies; ++s) {
      const double shift = rng.normal(0.0, 2.0);
      for (int j = 0; j < subjects; ++j) {
        const double subj = rng.normal(0.0, 0.5);
        const std::string id = "S" + std::to_string(s) + "-" + std::to_string(j);
        for (int t = 1; t <= tasks; ++t) {
          for (int r = 0; r < reps; ++r) {
            obs.push_back({"G" + std::to_string(s), t, id,
                           shift + subj + effect[static_cast<std::size_t>(t - 1)] + rng.normal(0.0, 1.0)});
          }
        }
      }
    }
    const auto a = anova_oracle(obs);
    if (a.df_residual > 0) return obs;
  }
}

}  // namespace elvis::test
