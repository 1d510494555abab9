#include <algorithm>
#include <cmath>
#include <numbers>

#include "dlcz/pair_amplitude.hpp"
#include "numeric.hpp"
#include "parallel.hpp"

namespace dlcz {

using detail::cplx;

namespace {

constexpr int kCellOrder = 16;

std::vector<double> split_points(double lo, double hi, const std::vector<double>& extra) {
  std::vector<double> pts{lo, hi};
  for (double x : extra) {
    if (x > lo && x < hi) pts.push_back(x);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

// Integrates a functional of P over one cell restricted to t2 > t1. P is in
// ns units (1/(ΔrΔw) scaled by 1e18), so cell integrals of P are in ns⁴ like F.
class CellIntegrator {
 public:
  CellIntegrator(const PairModel& model, const Timeline& tl)
      : tl_(tl),
        S_(model),
        scale_(-1e18 / (tl.read.detuning_rad_per_s * tl.write.detuning_rad_per_s)),
        write_knots_(tl.write.knots_ns()),
        read_knots_(tl.read.knots_ns()) {
    for (const auto& g : S_.groups()) {
      rate_ = std::max(rate_, std::abs(g.weight) * 1e-9 *
                                  (std::numbers::pi * std::abs(model.field.K_Hz) +
                                   2.0 * std::numbers::pi * std::abs(model.field.bias_Hz)));
    }
  }

  template <class T, class Fn>
  T integrate(double x0, double x1, double y0, double y1, Fn&& value) const {
    const auto& rule = detail::gauss_legendre(kCellOrder);
    std::vector<double> t1_extra = write_knots_;
    t1_extra.push_back(y0);
    t1_extra.push_back(y1);
    const auto t1_pts = split_points(x0, x1, t1_extra);
    T total{};
    for (std::size_t i = 0; i + 1 < t1_pts.size(); ++i) {
      const double a = t1_pts[i], b = t1_pts[i + 1];
      if (a >= y1) break;
      for (const auto& [ta, tb] : subdivide(a, b)) {
        const double h1 = 0.5 * (tb - ta);
        for (int q = 0; q < kCellOrder; ++q) {
          const double t1 = ta + h1 * (rule.nodes[q] + 1.0);
          const double fw = envelope_value(tl_.write, t1);
          if (fw == 0.0) continue;
          const double lower = std::max(y0, t1);
          if (lower >= y1) continue;
          const auto t2_pts = split_points(lower, y1, read_knots_);
          T inner{};
          for (std::size_t k = 0; k + 1 < t2_pts.size(); ++k) {
            for (const auto& [ua, ub] : subdivide(t2_pts[k], t2_pts[k + 1])) {
              const double h2 = 0.5 * (ub - ua);
              T acc{};
              for (int r = 0; r < kCellOrder; ++r) {
                const double t2 = ua + h2 * (rule.nodes[r] + 1.0);
                const double fr = envelope_value(tl_.read, t2);
                if (fr == 0.0) continue;
                acc += rule.weights[r] * value(scale_ * fr * fw * S_(t2 - t1));
              }
              inner += h2 * acc;
            }
          }
          total += rule.weights[q] * h1 * inner;
        }
      }
    }
    return total;
  }

 private:
  std::vector<std::pair<double, double>> subdivide(double a, double b) const {
    const int n = 1 + static_cast<int>((b - a) * rate_ / 2.0);
    std::vector<std::pair<double, double>> out;
    const double h = (b - a) / n;
    for (int i = 0; i < n; ++i) out.emplace_back(a + i * h, i + 1 == n ? b : a + (i + 1) * h);
    return out;
  }

  const Timeline& tl_;
  Coherence S_;
  double scale_;
  double rate_ = 0.0;
  std::vector<double> write_knots_;
  std::vector<double> read_knots_;
};

std::vector<double> edges(double begin, double end, double bin) {
  const long n = std::max(1L, static_cast<long>(std::ceil((end - begin) / bin - 1e-9)));
  std::vector<double> e(n + 1);
  for (long i = 0; i <= n; ++i) e[i] = begin + bin * static_cast<double>(i);
  return e;
}

void check_grid_inputs(const Timeline& tl, double bin_ns) {
  tl.validate();
  if (!(bin_ns > 0.0) || !std::isfinite(bin_ns)) {
    throw std::invalid_argument("bin width must be positive");
  }
  if (tl.is_delta()) {
    throw std::invalid_argument("wavepackets need finite pulse envelopes");
  }
}

}  // namespace

GridRange default_grid_range(const Timeline& timeline) {
  return {timeline.write.start_ns, timeline.write.end_ns(), timeline.read.start_ns,
          timeline.read.end_ns()};
}

WavepacketGrid wavepacket_grid(const PairModel& model, const Timeline& timeline, double bin_ns,
                               int threads) {
  return wavepacket_grid(model, timeline, bin_ns, default_grid_range(timeline), threads);
}

WavepacketGrid wavepacket_grid(const PairModel& model, const Timeline& timeline, double bin_ns,
                               const GridRange& range, int threads) {
  check_grid_inputs(timeline, bin_ns);
  if (!(range.t1_end_ns > range.t1_begin_ns) || !(range.t2_end_ns > range.t2_begin_ns)) {
    throw std::invalid_argument("grid range must be non-empty");
  }
  WavepacketGrid grid;
  grid.bin_ns = bin_ns;
  grid.t1_edges_ns = edges(range.t1_begin_ns, range.t1_end_ns, bin_ns);
  grid.t2_edges_ns = edges(range.t2_begin_ns, range.t2_end_ns, bin_ns);
  const auto n1 = grid.t1_edges_ns.size() - 1;
  const auto n2 = grid.t2_edges_ns.size() - 1;
  const CellIntegrator cell(model, timeline);
  const double area = bin_ns * bin_ns;

  const auto rows = detail::parallel_map(n2, threads, [&](std::size_t i) {
    std::vector<double> row(n1, 0.0);
    const double y0 = grid.t2_edges_ns[i], y1 = grid.t2_edges_ns[i + 1];
    for (std::size_t j = 0; j < n1; ++j) {
      const double x0 = grid.t1_edges_ns[j], x1 = grid.t1_edges_ns[j + 1];
      if (x0 >= y1) continue;
      row[j] = cell.integrate<double>(x0, x1, y0, y1, [](cplx p) { return std::norm(p); }) / area;
    }
    return row;
  });
  grid.values.resize(static_cast<Eigen::Index>(n2), static_cast<Eigen::Index>(n1));
  for (std::size_t i = 0; i < n2; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return grid;
}

std::complex<double> wavepacket_total_amplitude(const PairModel& model, const Timeline& timeline,
                                                double bin_ns) {
  check_grid_inputs(timeline, bin_ns);
  const GridRange range = default_grid_range(timeline);
  const auto e1 = edges(range.t1_begin_ns, range.t1_end_ns, bin_ns);
  const auto e2 = edges(range.t2_begin_ns, range.t2_end_ns, bin_ns);
  const CellIntegrator cell(model, timeline);
  std::vector<cplx> parts;
  for (std::size_t i = 0; i + 1 < e2.size(); ++i) {
    for (std::size_t j = 0; j + 1 < e1.size(); ++j) {
      if (e1[j] >= e2[i + 1]) continue;
      parts.push_back(
          cell.integrate<cplx>(e1[j], e1[j + 1], e2[i], e2[i + 1], [](cplx p) { return p; }));
    }
  }
  return detail::pairwise_sum(parts);
}

}  // namespace dlcz
