#ifndef PSIDO_DIAGNOSTICS_HPP
#define PSIDO_DIAGNOSTICS_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "psido/grid.hpp"
#include "psido/operators.hpp"
#include "psido/scalar_function.hpp"
#include "psido/symbol.hpp"

namespace psido {

/// c·profile with c chosen so that max_{|α|<=M} sup |∂^α (c·profile)| = 1
/// on the verification grid (2^12 samples per dimension over [-1, 1]^d).
struct BumpFunction {
  std::string profile_id;
  Function profile;
  int order = 0;
  double normalization = 1.0;

  int dimension() const { return profile->dimension(); }
  double value(const Point& p) const { return normalization * profile->value(p); }
  double derivative(const Point& p, const MultiIndex& a) const { return normalization * profile->derivative(p, a); }
  /// max_{|α|<=M} of the sampled sup norms of the normalized bump.
  double verified_sup() const;
};

inline constexpr int kBumpVerificationPoints = 1 << 12;

/// Built-in profiles: "standard" (exp(-1/(1-|x|^2))) and "odd"
/// (x_0 times the standard profile).
BumpFunction make_bump(int M, const std::string& profile_id, int dim = 1);

/// φ((x - x0)/R) on the grid; requires |x0| + R <= L/2.
GridFunction translate_dilate(const BumpFunction& phi, const Point& x0, double R, const Grid& grid);

/// R^{-d} |⟨T φ1^{x0+x1,R}, φ2^{x0+x2,R}⟩|
double weak_compactness_stat(const GridOperator& op, const BumpFunction& phi1, const BumpFunction& phi2,
                             const Point& x1, const Point& x2, const Point& x0, double R);
/// weak_compactness_stat at x0 = 0.
double weak_boundedness_stat(const GridOperator& op, const BumpFunction& phi1, const BumpFunction& phi2,
                             const Point& x1, const Point& x2, double R);
/// R^{-d/2} ‖T φ^{x0,R}‖_{L^2}
double l2_condition_stat(const GridOperator& op, const BumpFunction& phi, const Point& x0, double R);

/// Commutator statistic split with ã = a - a(x0 + x1):
///   A = R^{-d}|⟨T(ã φ1), φ2⟩|, B = R^{-d}|⟨ã T(φ1), φ2⟩|, statistic <= A + B.
struct CommutatorTerms {
  double statistic = 0.0;
  double a_term = 0.0;
  double b_term = 0.0;
};
CommutatorTerms commutator_terms(const GridOperator& op, const ScalarFunction& a, const BumpFunction& phi1,
                                 const BumpFunction& phi2, const Point& x1, const Point& x2, const Point& x0,
                                 double R);

struct T1Trace {
  GridFunction applied;  // apply(σ, 1)
  GridFunction direct;   // σ(x_m, 0)
  /// max_m |applied - direct|
  double discrepancy() const;
};
T1Trace t1_trace(const Symbol& sym, const Grid& grid);

struct SpectrumReport {
  std::vector<double> singular_values;  // non-increasing
  std::vector<int> k_list;
  std::vector<double> tail_ratios;      // tail_ratio(k) for k in k_list

  /// s_k / s_1 with 1-based k; 0 when s_1 = 0.
  double tail_ratio(int k) const;
  /// #{k : s_k > ε s_1}
  int effective_rank(double epsilon) const;
  double largest() const { return singular_values.empty() ? 0.0 : singular_values.front(); }
};
SpectrumReport svd_tail(const Eigen::MatrixXcd& m, const std::vector<int>& k_list = {});
inline SpectrumReport svd_tail(const OperatorMatrix& m, const std::vector<int>& k_list = {}) {
  return svd_tail(m.entries, k_list);
}
double spectral_norm(const Eigen::MatrixXcd& m);

/// ‖M(T_σ)^T - M(T_{σ*_N})‖_op on the full torus and on the block of
/// samples with |x| <= interior_radius.
struct TransposeResidual {
  double full = 0.0;
  double interior = 0.0;
  double interior_radius = 0.0;
};
/// interior_radius <= 0 selects L/2.
TransposeResidual transpose_residual(const Symbol& sym, int N, const Grid& grid, double interior_radius = 0.0,
                                     int size_cap = kDefaultSizeCap);
/// Variant against an explicitly given transpose symbol.
TransposeResidual transpose_residual_against(const Symbol& sym, const Symbol& transpose_symbol, const Grid& grid,
                                             double interior_radius = 0.0, int size_cap = kDefaultSizeCap);

enum class SweepArm { translate, dilate_up, dilate_down };
std::string to_string(SweepArm arm);

enum class StatisticKind { weak_compactness, l2_condition, a_term, b_term };
std::string to_string(StatisticKind kind);

struct SweepPoint {
  SweepArm arm = SweepArm::translate;
  Point x0{};
  double R = 1.0;
  double statistic = 0.0;
  StatisticKind kind = StatisticKind::weak_compactness;
};

struct SchedulePoint {
  Point x0{};
  double R = 1.0;
};

/// Geometric schedule along one arm: translate moves x0 = start·ratio^i
/// along the first axis at fixed R; dilate arms vary R = start·ratio^i at
/// x0 = 0 (ratio > 1 for dilate_up, < 1 for dilate_down).
std::vector<SchedulePoint> sweep_schedule(SweepArm arm, double start, double ratio, int count, double fixed_R = 1.0);

/// Throws SupportEscapesTorus unless every ball B(x0 + offset, R) of the
/// schedule satisfies |x0 + offset| + R <= L/2.
void check_torus_safety(const std::vector<SchedulePoint>& schedule, double max_offset, const Grid& grid);

std::vector<SweepPoint> weak_compactness_sweep(const GridOperator& op, const BumpFunction& phi1,
                                               const BumpFunction& phi2, const Point& x1, const Point& x2,
                                               SweepArm arm, const std::vector<SchedulePoint>& schedule);
std::vector<SweepPoint> l2_condition_sweep(const GridOperator& op, const BumpFunction& phi, SweepArm arm,
                                           const std::vector<SchedulePoint>& schedule);

/// last <= last_fraction·first and no consecutive increase above step_limit×.
struct TrendCheck {
  bool passed = false;
  double last_over_first = 0.0;
  double max_step_ratio = 0.0;
};
inline constexpr double kTrendLastFraction = 0.25;
inline constexpr double kTrendStepLimit = 1.1;
TrendCheck trend_check(const std::vector<double>& values, double last_fraction = kTrendLastFraction,
                       double step_limit = kTrendStepLimit);

/// CMO proxy: sup |σ(x, 0)| over shells r_i <= |x| < r_{i+1}, sampled on
/// `samples` deterministic points per shell.
std::vector<double> cmo_proxy(const Symbol& sym, const std::vector<double>& shell_radii, int samples = 256);

}  // namespace psido

#endif  // PSIDO_DIAGNOSTICS_HPP
