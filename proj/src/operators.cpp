#include "psido/operators.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "psido/errors.hpp"
#include "psido/parallel.hpp"

namespace psido {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

/// Out-of-place forward DFT F[q] = Σ_m f[m] e^{-2πi q·m/n} on n^d points.
class ForwardDft {
 public:
  explicit ForwardDft(const Grid& grid) : size_(grid.size()) {
    std::vector<Complex> in(size_), out(size_);
    auto* pin = reinterpret_cast<fftw_complex*>(in.data());
    auto* pout = reinterpret_cast<fftw_complex*>(out.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard<std::mutex> lock(planner_mutex());
    const int n = grid.points_per_dim();
    plan_ = grid.dimension() == 1 ? fftw_plan_dft_1d(n, pin, pout, FFTW_FORWARD, flags)
                                  : fftw_plan_dft_2d(n, n, pin, pout, FFTW_FORWARD, flags);
    if (!plan_) throw Error("FFTW planning failed");
  }
  ~ForwardDft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  ForwardDft(const ForwardDft&) = delete;
  ForwardDft& operator=(const ForwardDft&) = delete;

  void run(const Complex* in, Complex* out) const {
    // fftw_execute_dft does not modify the input of an out-of-place plan.
    fftw_execute_dft(plan_, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }

 private:
  int size_;
  fftw_plan plan_ = nullptr;
};

/// Per-axis phases e^{i ξ_k x_m} = (-1)^k e^{2πi k m / n}, built from an
/// exact integer reduction of k·m.
class PhaseTable {
 public:
  explicit PhaseTable(const Grid& grid) : grid_(grid), n_(grid.points_per_dim()), table_(n_ * n_) {
    std::vector<Complex> roots(n_);
    for (int r = 0; r < n_; ++r) {
      const double t = 2.0 * std::numbers::pi * r / n_;
      roots[r] = Complex(std::cos(t), std::sin(t));
    }
    for (int m = 0; m < n_; ++m) {
      for (int kk = 0; kk < n_; ++kk) {
        const int k = kk - n_ / 2;
        const long long prod = static_cast<long long>(k) * m;
        const int r = static_cast<int>(((prod % n_) + n_) % n_);
        table_[m * n_ + kk] = ((k % 2) ? -1.0 : 1.0) * roots[r];
      }
    }
  }
  /// e^{i ξ_k · x_m} for flat indices.
  Complex operator()(int m, int k) const {
    if (grid_.dimension() == 1) return table_[m * n_ + k];
    return table_[(m / n_) * n_ + k / n_] * table_[(m % n_) * n_ + k % n_];
  }
  /// (-1)^{k_0 + k_1}
  double sign(int k) const {
    const auto idx = grid_.frequency_index(k);
    return ((idx[0] + idx[1]) % 2) ? -1.0 : 1.0;
  }
  /// Position of frequency k in FFTW output order.
  int fft_slot(int k) const {
    const auto idx = grid_.frequency_index(k);
    auto wrap = [this](int v) { return ((v % n_) + n_) % n_; };
    if (grid_.dimension() == 1) return wrap(idx[0]);
    return wrap(idx[0]) * n_ + wrap(idx[1]);
  }

 private:
  Grid grid_;
  int n_;
  std::vector<Complex> table_;
};

void check_cap(const Grid& grid, int cap) {
  if (grid.size() > cap)
    throw SizeCapExceeded("grid has n^d = " + std::to_string(grid.size()) + " samples, above the dense cap of " +
                          std::to_string(cap));
}

void check_symbol_grid(const Symbol& sym, const Grid& grid) {
  if (sym.dimension() != grid.dimension()) throw GridMismatch("symbol dimension does not match grid dimension");
}

}  // namespace

GridFunction OperatorMatrix::apply(const GridFunction& f) const {
  if (!(f.grid() == grid)) throw GridMismatch("operator and grid function live on different grids");
  return GridFunction(grid, entries * f.values());
}

OperatorMatrix OperatorMatrix::transpose() const { return {grid, entries.transpose()}; }

Eigen::MatrixXcd OperatorMatrix::interior_block(double radius) const {
  const std::vector<int> idx = grid.indices_within(radius);
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXcd block(k, k);
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index r = 0; r < k; ++r) block(r, c) = entries(idx[r], idx[c]);
  return block;
}

GridOperator::GridOperator(Grid grid, std::function<GridFunction(const GridFunction&)> fn)
    : grid_(grid), fn_(std::move(fn)) {}

GridOperator::GridOperator(const OperatorMatrix& m) : grid_(m.grid) {
  auto shared = std::make_shared<const OperatorMatrix>(m);
  fn_ = [shared](const GridFunction& f) { return shared->apply(f); };
}

GridOperator GridOperator::from_symbol(const Symbol& sym, const Grid& grid) {
  check_symbol_grid(sym, grid);
  return GridOperator(grid, [sym](const GridFunction& f) { return psido::apply(sym, f); });
}

GridFunction GridOperator::operator()(const GridFunction& f) const {
  if (!(f.grid() == grid_)) throw GridMismatch("operator and grid function live on different grids");
  return fn_(f);
}

GridFunction apply(const Symbol& sym, const GridFunction& f) {
  const Grid& grid = f.grid();
  check_symbol_grid(sym, grid);
  const int N = grid.size();
  const PhaseTable phase(grid);

  std::vector<Complex> spectrum(N);
  {
    const ForwardDft dft(grid);
    std::vector<Complex> in(f.values().data(), f.values().data() + N);
    dft.run(in.data(), spectrum.data());
  }
  std::vector<Complex> fhat(N);
  for (int k = 0; k < N; ++k) fhat[k] = phase.sign(k) * spectrum[phase.fft_slot(k)] / static_cast<double>(N);

  std::vector<Point> freqs(N);
  for (int k = 0; k < N; ++k) freqs[k] = grid.frequency(k);

  Eigen::VectorXcd out(N);
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t mi) {
    const int m = static_cast<int>(mi);
    const Point x = grid.point(m);
    Complex acc = 0.0;
    for (int k = 0; k < N; ++k) {
      if (fhat[k] == 0.0) continue;
      acc += sym.eval(x, freqs[k]) * fhat[k] * phase(m, k);
    }
    out[m] = acc;
  });
  return GridFunction(grid, std::move(out));
}

OperatorMatrix assemble(const Symbol& sym, const Grid& grid, int size_cap) {
  check_cap(grid, size_cap);
  check_symbol_grid(sym, grid);
  const int N = grid.size();
  const PhaseTable phase(grid);
  const ForwardDft dft(grid);

  std::vector<Point> freqs(N);
  std::vector<int> slots(N);
  std::vector<double> signs(N);
  for (int k = 0; k < N; ++k) {
    freqs[k] = grid.frequency(k);
    slots[k] = phase.fft_slot(k);
    signs[k] = phase.sign(k);
  }

  // Row-major staging so each worker owns a contiguous row.
  std::vector<Complex> rows(static_cast<std::size_t>(N) * N);
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t mi) {
    const int m = static_cast<int>(mi);
    const Point x = grid.point(m);
    std::vector<Complex> v(N);
    for (int k = 0; k < N; ++k) v[slots[k]] = sym.eval(x, freqs[k]) * phase(m, k) * signs[k];
    dft.run(v.data(), rows.data() + mi * N);
  });

  OperatorMatrix out{grid, Eigen::MatrixXcd(N, N)};
  const double inv = 1.0 / N;
  for (int m = 0; m < N; ++m)
    for (int j = 0; j < N; ++j) out.entries(m, j) = rows[static_cast<std::size_t>(m) * N + j] * inv;
  return out;
}

OperatorMatrix multiplication_matrix(const ScalarFunction& a, const Grid& grid) {
  if (a.dimension() != grid.dimension()) throw GridMismatch("function dimension does not match grid");
  OperatorMatrix out{grid, Eigen::MatrixXcd::Zero(grid.size(), grid.size())};
  for (int m = 0; m < grid.size(); ++m) out.entries(m, m) = a.value(grid.point(m));
  return out;
}

OperatorMatrix commutator_matrix(const Symbol& sym, const ScalarFunction& a, const Grid& grid, int size_cap) {
  OperatorMatrix t = assemble(sym, grid, size_cap);
  if (a.dimension() != grid.dimension()) throw GridMismatch("function dimension does not match grid");
  const int N = grid.size();
  std::vector<double> av(N);
  for (int m = 0; m < N; ++m) av[m] = a.value(grid.point(m));
  for (int j = 0; j < N; ++j)
    for (int m = 0; m < N; ++m) t.entries(m, j) = t.entries(m, j) * av[j] - av[m] * t.entries(m, j);
  return t;
}

Complex bilinear_pair(const GridFunction& f, const GridFunction& g) {
  if (!(f.grid() == g.grid())) throw GridMismatch("bilinear pairing of functions on different grids");
  const double w = std::pow(f.grid().spacing(), f.grid().dimension());
  return w * (f.values().array() * g.values().array()).sum();
}

namespace {
constexpr char kMagic[8] = {'P', 'S', 'I', 'D', 'O', 'M', 'A', 'T'};
constexpr std::uint32_t kMatrixVersion = 1;

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw Error("truncated matrix file");
  return v;
}
}  // namespace

void write_matrix(std::ostream& os, const OperatorMatrix& m) {
  os.write(kMagic, sizeof(kMagic));
  put(os, kMatrixVersion);
  put(os, static_cast<std::int32_t>(m.grid.dimension()));
  put(os, static_cast<std::int32_t>(m.grid.points_per_dim()));
  put(os, m.grid.half_length());
  put(os, static_cast<std::uint64_t>(m.entries.rows()));
  put(os, static_cast<std::uint64_t>(m.entries.cols()));
  for (Eigen::Index r = 0; r < m.entries.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.entries.cols(); ++c) {
      put(os, m.entries(r, c).real());
      put(os, m.entries(r, c).imag());
    }
  }
  if (!os) throw Error("failed writing matrix stream");
}

void write_matrix(const std::string& path, const OperatorMatrix& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_matrix(os, m);
}

OperatorMatrix read_matrix(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw Error("not a PSIDOMAT stream");
  if (get<std::uint32_t>(is) != kMatrixVersion) throw Error("unsupported matrix file version");
  const int d = get<std::int32_t>(is);
  const int n = get<std::int32_t>(is);
  const double L = get<double>(is);
  const auto rows = get<std::uint64_t>(is);
  const auto cols = get<std::uint64_t>(is);
  OperatorMatrix m{Grid(d, n, L), Eigen::MatrixXcd(rows, cols)};
  for (std::uint64_t r = 0; r < rows; ++r)
    for (std::uint64_t c = 0; c < cols; ++c) {
      const double re = get<double>(is);
      const double im = get<double>(is);
      m.entries(r, c) = Complex(re, im);
    }
  return m;
}

}  // namespace psido
