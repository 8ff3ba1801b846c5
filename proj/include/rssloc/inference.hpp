#pragma once

#include <utility>
#include <vector>

#include "rssloc/model.hpp"

namespace rssloc {

/// Fisher information of the source position, evaluated at a chosen point.
/// Benchmarks evaluate it at the true source only.
struct FisherSummary {
  Eigen::MatrixXd fisher;            // m x m
  double crlb = 0.0;                 // tr(F^{-1}), m^2
  double rcrlb = 0.0;                // sqrt(crlb), m
  Eigen::MatrixXd normalized_info;   // M_n = (1/n) sum grad f_i grad f_i^T
  Point eval_point;
  int n = 0;                         // every round of every site counts
};

/// F = (100 alpha^2 / sigma^2) sum_i (e - p_i)(e - p_i)^T / (|p_i - e|^4 ln^2 10),
/// summed over all scenario.rounds repetitions of each site.
/// Throws InfiniteInformation at sigma = 0, DegenerateGeometry when F is singular.
FisherSummary fisher_information(const Scenario& scenario, const Point& eval_point);

/// Same bound for an explicit per-reading sensor list (one row per reading).
FisherSummary fisher_information(const PointSet& readings, double alpha, double sigma_db,
                                 const Point& eval_point);

/// Closed-form inverse of a 2x2 or 3x3 matrix.
Eigen::MatrixXd small_inverse(const Eigen::MatrixXd& a);

enum class SweepKind { Rounds, Sigma };

/// (x, rcrlb) pairs at the true source, one per sweep value.
std::vector<std::pair<double, double>> rcrlb_curve(const Scenario& scenario, SweepKind kind,
                                                   const std::vector<double>& values);

}  // namespace rssloc
