#include "psido/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "psido/calculus.hpp"
#include "psido/errors.hpp"
#include "psido/parallel.hpp"

namespace psido {

namespace {

Function profile_for(const std::string& id, int dim) {
  if (id == "standard") return functions::bump(dim, 1.0);
  if (id == "odd") return functions::odd_bump(dim, 1.0);
  throw std::invalid_argument("unknown bump profile '" + id + "' (expected standard or odd)");
}

double verification_coordinate(int i) { return -1.0 + 2.0 * i / (kBumpVerificationPoints - 1); }

/// max_{|α|<=M} sup |∂^α f| over the verification grid inside the unit ball.
double sampled_derivative_sup(const ScalarFunction& f, int M) {
  const int dim = f.dimension();
  const std::vector<MultiIndex> indices = multi_indices_below(dim, M + 1);
  const int n = kBumpVerificationPoints;
  const std::size_t total = dim == 1 ? n : static_cast<std::size_t>(n) * n;
  const int jobs = std::max(1, default_jobs());
  const std::size_t chunk = (total + jobs - 1) / jobs;
  std::vector<double> partial(jobs, 0.0);
  parallel_for(static_cast<std::size_t>(jobs), [&](std::size_t w) {
    double best = 0.0;
    const std::size_t end = std::min(total, (w + 1) * chunk);
    for (std::size_t q = w * chunk; q < end; ++q) {
      Point p{};
      if (dim == 1) {
        p[0] = verification_coordinate(static_cast<int>(q));
      } else {
        p[0] = verification_coordinate(static_cast<int>(q / n));
        p[1] = verification_coordinate(static_cast<int>(q % n));
      }
      if (norm(p) >= 1.0) continue;
      const Taylor t = f.jet(p, M);
      for (const auto& a : indices) best = std::max(best, std::abs(t.derivative(a)));
    }
    partial[w] = best;
  });
  return *std::max_element(partial.begin(), partial.end());
}

Point shifted(const Point& a, const Point& b) { return a + b; }

}  // namespace

double BumpFunction::verified_sup() const {
  return normalization * sampled_derivative_sup(*profile, order);
}

BumpFunction make_bump(int M, const std::string& profile_id, int dim) {
  if (M < 0) throw std::invalid_argument("bump order M must be >= 0");
  if (M > ScalarFunction::kMaxJetOrder) throw OrderExceeded("bump order above the jet limit");
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("bump dimension must be 1 or 2");
  Function profile = profile_for(profile_id, dim);

  static std::mutex cache_mutex;
  static std::map<std::tuple<std::string, int, int>, double> cache;
  const auto key = std::make_tuple(profile_id, M, dim);
  double sup = 0.0;
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) sup = it->second;
  }
  if (sup == 0.0) {
    sup = sampled_derivative_sup(*profile, M);
    std::lock_guard<std::mutex> lock(cache_mutex);
    cache[key] = sup;
  }
  return BumpFunction{profile_id, profile, M, 1.0 / sup};
}

GridFunction translate_dilate(const BumpFunction& phi, const Point& x0, double R, const Grid& grid) {
  if (!(R > 0.0)) throw std::invalid_argument("bump scale R must be positive");
  if (phi.dimension() != grid.dimension()) throw GridMismatch("bump dimension does not match grid");
  const double limit = 0.5 * grid.half_length();
  if (norm(x0) + R > limit)
    throw SupportEscapesTorus("ball of radius " + std::to_string(R) + " at distance " + std::to_string(norm(x0)) +
                              " leaves the safe region |x| <= " + std::to_string(limit));
  const double inv = 1.0 / R;
  return GridFunction::sample(grid, [&](const Point& x) -> Complex { return phi.value(scaled(x - x0, inv)); });
}

double weak_compactness_stat(const GridOperator& op, const BumpFunction& phi1, const BumpFunction& phi2,
                             const Point& x1, const Point& x2, const Point& x0, double R) {
  const Grid& grid = op.grid();
  const GridFunction f = translate_dilate(phi1, shifted(x0, x1), R, grid);
  const GridFunction g = translate_dilate(phi2, shifted(x0, x2), R, grid);
  return std::abs(bilinear_pair(op(f), g)) / std::pow(R, grid.dimension());
}

double weak_boundedness_stat(const GridOperator& op, const BumpFunction& phi1, const BumpFunction& phi2,
                             const Point& x1, const Point& x2, double R) {
  return weak_compactness_stat(op, phi1, phi2, x1, x2, Point{}, R);
}

double l2_condition_stat(const GridOperator& op, const BumpFunction& phi, const Point& x0, double R) {
  const Grid& grid = op.grid();
  const GridFunction f = translate_dilate(phi, x0, R, grid);
  return op(f).l2_norm() / std::pow(R, 0.5 * grid.dimension());
}

CommutatorTerms commutator_terms(const GridOperator& op, const ScalarFunction& a, const BumpFunction& phi1,
                                 const BumpFunction& phi2, const Point& x1, const Point& x2, const Point& x0,
                                 double R) {
  const Grid& grid = op.grid();
  if (a.dimension() != grid.dimension()) throw GridMismatch("function dimension does not match grid");
  const GridFunction f = translate_dilate(phi1, shifted(x0, x1), R, grid);
  const GridFunction g = translate_dilate(phi2, shifted(x0, x2), R, grid);
  const double anchor = a.value(shifted(x0, x1));
  const GridFunction at = GridFunction::sample(grid, [&](const Point& x) -> Complex { return a.value(x) - anchor; });

  const GridFunction t_af(grid, op(GridFunction(grid, at.values().cwiseProduct(f.values()))).values());
  const GridFunction a_tf(grid, at.values().cwiseProduct(op(f).values()));
  const double w = 1.0 / std::pow(R, grid.dimension());
  CommutatorTerms out;
  out.a_term = w * std::abs(bilinear_pair(t_af, g));
  out.b_term = w * std::abs(bilinear_pair(a_tf, g));
  out.statistic = w * std::abs(bilinear_pair(GridFunction(grid, t_af.values() - a_tf.values()), g));
  return out;
}

double T1Trace::discrepancy() const { return (applied.values() - direct.values()).cwiseAbs().maxCoeff(); }

T1Trace t1_trace(const Symbol& sym, const Grid& grid) {
  const GridFunction one = GridFunction::sample(grid, [](const Point&) -> Complex { return 1.0; });
  GridFunction applied = apply(sym, one);
  GridFunction direct = GridFunction::sample(grid, [&](const Point& x) { return sym.eval(x, Point{}); });
  return T1Trace{std::move(applied), std::move(direct)};
}

double SpectrumReport::tail_ratio(int k) const {
  if (k < 1 || k > static_cast<int>(singular_values.size()))
    throw std::out_of_range("tail_ratio index " + std::to_string(k) + " outside 1.." +
                            std::to_string(singular_values.size()));
  const double s1 = singular_values.front();
  return s1 == 0.0 ? 0.0 : singular_values[k - 1] / s1;
}

int SpectrumReport::effective_rank(double epsilon) const {
  if (singular_values.empty()) return 0;
  const double cut = epsilon * singular_values.front();
  return static_cast<int>(std::count_if(singular_values.begin(), singular_values.end(),
                                        [cut](double s) { return s > cut; }));
}

SpectrumReport svd_tail(const Eigen::MatrixXcd& m, const std::vector<int>& k_list) {
  SpectrumReport out;
  if (m.size() == 0) return out;
  if (!m.allFinite()) throw SvdFailure("matrix has non-finite entries");
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  if (svd.info() != Eigen::Success) throw SvdFailure("singular value decomposition did not converge");
  const Eigen::VectorXd& s = svd.singularValues();
  out.singular_values.assign(s.data(), s.data() + s.size());
  std::sort(out.singular_values.begin(), out.singular_values.end(), std::greater<>());
  out.k_list = k_list;
  for (int k : k_list) out.tail_ratios.push_back(out.tail_ratio(k));
  return out;
}

double spectral_norm(const Eigen::MatrixXcd& m) { return svd_tail(m).largest(); }

TransposeResidual transpose_residual_against(const Symbol& sym, const Symbol& transpose_symbol, const Grid& grid,
                                             double interior_radius, int size_cap) {
  const OperatorMatrix forward = assemble(sym, grid, size_cap);
  const OperatorMatrix candidate = assemble(transpose_symbol, grid, size_cap);
  const OperatorMatrix diff{grid, Eigen::MatrixXcd(forward.entries.transpose() - candidate.entries)};
  TransposeResidual out;
  out.interior_radius = interior_radius > 0.0 ? interior_radius : 0.5 * grid.half_length();
  out.full = spectral_norm(diff.entries);
  out.interior = spectral_norm(diff.interior_block(out.interior_radius));
  return out;
}

TransposeResidual transpose_residual(const Symbol& sym, int N, const Grid& grid, double interior_radius,
                                     int size_cap) {
  return transpose_residual_against(sym, transpose_expansion(sym, N), grid, interior_radius, size_cap);
}

std::string to_string(SweepArm arm) {
  switch (arm) {
    case SweepArm::translate: return "translate";
    case SweepArm::dilate_up: return "dilate_up";
    case SweepArm::dilate_down: return "dilate_down";
  }
  return "?";
}

std::string to_string(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::weak_compactness: return "weak-compactness";
    case StatisticKind::l2_condition: return "L2-condition";
    case StatisticKind::a_term: return "A-term";
    case StatisticKind::b_term: return "B-term";
  }
  return "?";
}

std::vector<SchedulePoint> sweep_schedule(SweepArm arm, double start, double ratio, int count, double fixed_R) {
  if (count < 1) throw std::invalid_argument("sweep needs at least one point");
  if (!(start > 0.0) || !(ratio > 0.0)) throw std::invalid_argument("sweep start and ratio must be positive");
  if (arm == SweepArm::dilate_up && ratio <= 1.0) throw std::invalid_argument("dilate_up needs ratio > 1");
  if (arm == SweepArm::dilate_down && ratio >= 1.0) throw std::invalid_argument("dilate_down needs ratio < 1");
  if (arm == SweepArm::translate && ratio <= 1.0) throw std::invalid_argument("translate needs ratio > 1");
  std::vector<SchedulePoint> out;
  double v = start;
  for (int i = 0; i < count; ++i, v *= ratio) {
    if (arm == SweepArm::translate)
      out.push_back({Point{v, 0.0}, fixed_R});
    else
      out.push_back({Point{}, v});
  }
  return out;
}

void check_torus_safety(const std::vector<SchedulePoint>& schedule, double max_offset, const Grid& grid) {
  const double limit = 0.5 * grid.half_length();
  for (const auto& p : schedule) {
    if (norm(p.x0) + max_offset + p.R > limit)
      throw SupportEscapesTorus("schedule point |x0| = " + std::to_string(norm(p.x0)) + ", R = " +
                                std::to_string(p.R) + " leaves the safe region |x| <= " + std::to_string(limit));
  }
}

std::vector<SweepPoint> weak_compactness_sweep(const GridOperator& op, const BumpFunction& phi1,
                                               const BumpFunction& phi2, const Point& x1, const Point& x2,
                                               SweepArm arm, const std::vector<SchedulePoint>& schedule) {
  check_torus_safety(schedule, std::max(norm(x1), norm(x2)), op.grid());
  std::vector<SweepPoint> out(schedule.size());
  parallel_for(schedule.size(), [&](std::size_t i) {
    const auto& s = schedule[i];
    out[i] = SweepPoint{arm, s.x0, s.R, weak_compactness_stat(op, phi1, phi2, x1, x2, s.x0, s.R),
                        StatisticKind::weak_compactness};
  });
  return out;
}

std::vector<SweepPoint> l2_condition_sweep(const GridOperator& op, const BumpFunction& phi, SweepArm arm,
                                           const std::vector<SchedulePoint>& schedule) {
  check_torus_safety(schedule, 0.0, op.grid());
  std::vector<SweepPoint> out(schedule.size());
  parallel_for(schedule.size(), [&](std::size_t i) {
    const auto& s = schedule[i];
    out[i] = SweepPoint{arm, s.x0, s.R, l2_condition_stat(op, phi, s.x0, s.R), StatisticKind::l2_condition};
  });
  return out;
}

TrendCheck trend_check(const std::vector<double>& values, double last_fraction, double step_limit) {
  TrendCheck out;
  if (values.empty()) return out;
  const double inf = std::numeric_limits<double>::infinity();
  auto ratio = [inf](double num, double den) {
    if (den == 0.0) return num == 0.0 ? 0.0 : inf;
    return num / den;
  };
  out.last_over_first = ratio(values.back(), values.front());
  for (std::size_t i = 1; i < values.size(); ++i)
    out.max_step_ratio = std::max(out.max_step_ratio, ratio(values[i], values[i - 1]));
  out.passed = out.last_over_first <= last_fraction && out.max_step_ratio <= step_limit;
  return out;
}

std::vector<double> cmo_proxy(const Symbol& sym, const std::vector<double>& shell_radii, int samples) {
  if (shell_radii.size() < 2) throw std::invalid_argument("cmo_proxy needs at least two shell radii");
  if (samples < 1) throw std::invalid_argument("cmo_proxy needs at least one sample per shell");
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  std::vector<double> out(shell_radii.size() - 1, 0.0);
  for (std::size_t i = 0; i + 1 < shell_radii.size(); ++i) {
    const double r0 = shell_radii[i];
    const double r1 = shell_radii[i + 1];
    if (!(r1 > r0)) throw std::invalid_argument("shell radii must increase");
    double best = 0.0;
    for (int k = 0; k < samples; ++k) {
      const double r = r0 + (k + 0.5) / samples * (r1 - r0);
      Point x{};
      if (sym.dimension() == 1) {
        x[0] = (k % 2) ? -r : r;
      } else {
        const double theta = 2.0 * std::numbers::pi * std::fmod(k * golden, 1.0);
        x = {r * std::cos(theta), r * std::sin(theta)};
      }
      best = std::max(best, std::abs(sym.eval(x, Point{})));
    }
    out[i] = best;
  }
  return out;
}

}  // namespace psido
