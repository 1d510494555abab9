#include "dlcz/photon_statistics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "parallel.hpp"

namespace dlcz {

namespace {

constexpr double kMassTolerance = 1e-12;
constexpr std::uint64_t kBlockTrials = 1u << 16;

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
  }
}

struct Moments {
  double n1 = 0, n2 = 0;        // <n>
  double f1 = 0, f2 = 0;        // <n(n-1)>
  double n12 = 0;               // <n1 n2>
};

Moments moments(const JointDistribution& d) {
  Moments m;
  for (Eigen::Index i = 0; i < d.P.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.P.cols(); ++j) {
      const double p = d.P(i, j);
      if (p == 0.0) continue;
      const double a = static_cast<double>(i), b = static_cast<double>(j);
      m.n1 += p * a;
      m.n2 += p * b;
      m.f1 += p * a * (a - 1.0);
      m.f2 += p * b * (b - 1.0);
      m.n12 += p * a * b;
    }
  }
  return m;
}

}  // namespace

JointDistribution TwoModeState::distribution() const {
  if (!(chi > 0.0 && chi < 1.0)) throw std::invalid_argument("chi must lie in (0, 1)");
  int n = n_max;
  if (n == 0) {
    while (std::pow(chi, n + 1) > kMassTolerance) ++n;
  }
  return ideal_joint_distribution(chi, n);
}

JointDistribution ideal_joint_distribution(double chi, int n_max) {
  if (!(chi > 0.0 && chi < 1.0)) throw std::invalid_argument("chi must lie in (0, 1)");
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
  if (std::pow(chi, n_max + 1) > kMassTolerance) {
    throw std::invalid_argument("n_max truncates more than 1e-12 of the distribution");
  }
  JointDistribution d;
  d.P = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
  double weight = 1.0 - chi;
  for (int n = 0; n <= n_max; ++n) {
    d.P(n, n) = weight;
    weight *= chi;
  }
  return d;
}

JointDistribution poissonian_product(double mean1, double mean2, int n_max) {
  if (!(mean1 >= 0.0) || !(mean2 >= 0.0)) throw std::invalid_argument("means must be non-negative");
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
  auto poisson = [n_max](double mu) {
    Eigen::VectorXd v(n_max + 1);
    double p = std::exp(-mu);
    for (int n = 0; n <= n_max; ++n) {
      v(n) = p;
      p *= mu / (n + 1);
    }
    return v;
  };
  JointDistribution d;
  d.P = poisson(mean1) * poisson(mean2).transpose();
  if (1.0 - d.mass() > kMassTolerance) {
    throw std::invalid_argument("n_max truncates more than 1e-12 of the distribution");
  }
  return d;
}

void DetectionModel::validate() const {
  check_probability(eta1, "eta1");
  check_probability(eta2, "eta2");
  check_probability(bg1, "bg1");
  check_probability(bg2, "bg2");
}

CauchySchwarz cauchy_schwarz_R(double g11, double g22, double g12) {
  if (!(g11 > 0.0) || !(g22 > 0.0)) {
    throw std::invalid_argument("g11 and g22 must be positive");
  }
  const double R = g12 * g12 / (g11 * g22);
  return {R, R > 1.0};
}

CorrelationEstimate correlation_functions(const JointDistribution& dist,
                                          const DetectionModel& model) {
  model.validate();
  const Moments m = moments(dist);
  CorrelationEstimate e;
  const double e1 = model.eta1, e2 = model.eta2, b1 = model.bg1, b2 = model.bg2;
  e.p1 = e1 * m.n1 + 2.0 * b1;
  e.p2 = e2 * m.n2 + 2.0 * b2;
  e.p11 = e1 * e1 * m.f1 / 4.0 + b1 * e1 * m.n1 + b1 * b1;
  e.p22 = e2 * e2 * m.f2 / 4.0 + b2 * e2 * m.n2 + b2 * b2;
  e.p12 = e1 * e2 * m.n12 + 2.0 * b2 * e1 * m.n1 + 2.0 * b1 * e2 * m.n2 + 4.0 * b1 * b2;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  e.g11 = e.p1 > 0.0 ? e.p11 / (0.25 * e.p1 * e.p1) : nan;
  e.g22 = e.p2 > 0.0 ? e.p22 / (0.25 * e.p2 * e.p2) : nan;
  e.g12 = e.p1 > 0.0 && e.p2 > 0.0 ? e.p12 / (e.p1 * e.p2) : nan;
  if (e.g11 > 0.0 && e.g22 > 0.0) {
    const auto cs = cauchy_schwarz_R(e.g11, e.g22, e.g12);
    e.R = cs.R;
    e.nonclassical = cs.nonclassical;
  } else {
    e.R = nan;
  }
  return e;
}

namespace {

// Per-trial observables: c1a, c1b, c2a, c2b, c1a·c1b, c2a·c2b, c1·c2.
constexpr int kObs = 7;
constexpr int kPairs = kObs * (kObs + 1) / 2;

struct BlockSums {
  std::uint64_t n = 0;
  std::array<std::uint64_t, kObs> s{};
  std::array<std::uint64_t, kPairs> q{};
};

struct Sampler {
  std::vector<double> cdf;
  std::vector<std::pair<int, int>> cells;
};

Sampler make_sampler(const JointDistribution& d) {
  Sampler s;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < d.P.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.P.cols(); ++j) {
      const double p = d.P(i, j);
      if (p < 0.0 || !std::isfinite(p)) throw std::invalid_argument("invalid distribution entry");
      if (p == 0.0) continue;
      acc += p;
      s.cdf.push_back(acc);
      s.cells.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  if (!(acc > 0.0)) throw std::invalid_argument("distribution is empty");
  for (double& c : s.cdf) c /= acc;
  s.cdf.back() = 1.0;
  return s;
}

// 53-bit uniform in [0, 1), identical on every platform.
inline double uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

BlockSums run_block(const Sampler& sampler, const DetectionModel& m, std::uint64_t seed,
                    std::uint64_t block, std::uint64_t trials) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  std::mt19937_64 rng(seq);
  BlockSums b;
  b.n = trials;
  auto route = [&rng](int photons, double eta, double bg, std::uint64_t& a, std::uint64_t& c) {
    a = 0;
    c = 0;
    for (int k = 0; k < photons; ++k) {
      const double u = uniform(rng);
      if (u < 0.5 * eta) {
        ++a;
      } else if (u < eta) {
        ++c;
      }
    }
    if (uniform(rng) < bg) ++a;
    if (uniform(rng) < bg) ++c;
  };
  for (std::uint64_t t = 0; t < trials; ++t) {
    const double u = uniform(rng);
    const auto it = std::upper_bound(sampler.cdf.begin(), sampler.cdf.end(), u);
    const auto [n1, n2] = sampler.cells[static_cast<std::size_t>(it - sampler.cdf.begin())];
    std::array<std::uint64_t, kObs> x{};
    route(n1, m.eta1, m.bg1, x[0], x[1]);
    route(n2, m.eta2, m.bg2, x[2], x[3]);
    x[4] = x[0] * x[1];
    x[5] = x[2] * x[3];
    x[6] = (x[0] + x[1]) * (x[2] + x[3]);
    int k = 0;
    for (int i = 0; i < kObs; ++i) {
      b.s[i] += x[i];
      for (int j = i; j < kObs; ++j) b.q[k++] += x[i] * x[j];
    }
  }
  return b;
}

}  // namespace

CorrelationEstimate simulate_trials(const JointDistribution& dist, const DetectionModel& model,
                                    std::uint64_t n_trials, std::uint64_t seed, int threads) {
  model.validate();
  if (n_trials < 1) throw std::invalid_argument("at least one trial is required");
  const Sampler sampler = make_sampler(dist);
  const std::uint64_t blocks = (n_trials + kBlockTrials - 1) / kBlockTrials;
  const auto parts = detail::parallel_map(blocks, threads, [&](std::size_t b) {
    const std::uint64_t first = b * kBlockTrials;
    const std::uint64_t count = std::min(kBlockTrials, n_trials - first);
    return run_block(sampler, model, seed, b, count);
  });
  BlockSums total;
  for (const auto& p : parts) {
    total.n += p.n;
    for (int i = 0; i < kObs; ++i) total.s[i] += p.s[i];
    for (int k = 0; k < kPairs; ++k) total.q[k] += p.q[k];
  }

  const double n = static_cast<double>(total.n);
  Eigen::Matrix<double, kObs, 1> mu;
  Eigen::Matrix<double, kObs, kObs> cov;
  for (int i = 0; i < kObs; ++i) mu(i) = static_cast<double>(total.s[i]) / n;
  int k = 0;
  for (int i = 0; i < kObs; ++i) {
    for (int j = i; j < kObs; ++j) {
      const double c = static_cast<double>(total.q[k++]) / n - mu(i) * mu(j);
      cov(i, j) = c;
      cov(j, i) = c;
    }
  }

  CorrelationEstimate e;
  e.trials = total.n;
  e.p1 = mu(0) + mu(1);
  e.p2 = mu(2) + mu(3);
  e.p11 = mu(4);
  e.p22 = mu(5);
  e.p12 = mu(6);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  using Vec = Eigen::Matrix<double, kObs, 1>;
  auto se = [&](const Vec& grad) { return std::sqrt(std::max(0.0, grad.dot(cov * grad)) / n); };

  Vec d11 = Vec::Zero(), d22 = Vec::Zero(), d12 = Vec::Zero();
  if (mu(0) > 0.0 && mu(1) > 0.0) {
    e.g11 = mu(4) / (mu(0) * mu(1));
    d11(0) = -e.g11 / mu(0);
    d11(1) = -e.g11 / mu(1);
    d11(4) = 1.0 / (mu(0) * mu(1));
    e.se_g11 = se(d11);
  } else {
    e.g11 = e.se_g11 = nan;
  }
  if (mu(2) > 0.0 && mu(3) > 0.0) {
    e.g22 = mu(5) / (mu(2) * mu(3));
    d22(2) = -e.g22 / mu(2);
    d22(3) = -e.g22 / mu(3);
    d22(5) = 1.0 / (mu(2) * mu(3));
    e.se_g22 = se(d22);
  } else {
    e.g22 = e.se_g22 = nan;
  }
  if (e.p1 > 0.0 && e.p2 > 0.0) {
    e.g12 = mu(6) / (e.p1 * e.p2);
    d12(0) = d12(1) = -e.g12 / e.p1;
    d12(2) = d12(3) = -e.g12 / e.p2;
    d12(6) = 1.0 / (e.p1 * e.p2);
    e.se_g12 = se(d12);
  } else {
    e.g12 = e.se_g12 = nan;
  }
  if (e.g11 > 0.0 && e.g22 > 0.0 && std::isfinite(e.g12)) {
    const auto cs = cauchy_schwarz_R(e.g11, e.g22, e.g12);
    e.R = cs.R;
    e.nonclassical = cs.nonclassical;
    const Vec dR = e.R * (2.0 * d12 / e.g12 - d11 / e.g11 - d22 / e.g22);
    e.se_R = se(dR);
  } else {
    e.R = e.se_R = nan;
  }
  return e;
}

XiFit scale_fit_xi(const std::vector<double>& theory_delay_ns,
                   const std::vector<double>& theory_p12, const std::vector<G12Point>& data) {
  if (theory_delay_ns.size() != theory_p12.size() || theory_delay_ns.empty()) {
    throw std::invalid_argument("theory curve needs matching, non-empty columns");
  }
  if (data.empty()) throw std::invalid_argument("at least one data point is required");
  if (!std::is_sorted(theory_delay_ns.begin(), theory_delay_ns.end()) ||
      std::adjacent_find(theory_delay_ns.begin(), theory_delay_ns.end()) != theory_delay_ns.end()) {
    throw std::invalid_argument("theory delays must be strictly increasing");
  }
  if (std::all_of(theory_p12.begin(), theory_p12.end(), [](double p) { return p == 0.0; })) {
    throw std::invalid_argument("theory curve is identically zero");
  }
  auto interpolate = [&](double x) {
    if (x < theory_delay_ns.front() || x > theory_delay_ns.back()) {
      std::ostringstream os;
      os << "data delay " << x << " ns lies outside the theory range";
      throw std::invalid_argument(os.str());
    }
    const auto it = std::lower_bound(theory_delay_ns.begin(), theory_delay_ns.end(), x);
    const auto i = static_cast<std::size_t>(it - theory_delay_ns.begin());
    if (theory_delay_ns[i] == x) return theory_p12[i];
    const double x0 = theory_delay_ns[i - 1], x1 = theory_delay_ns[i];
    const double w = (x - x0) / (x1 - x0);
    return (1.0 - w) * theory_p12[i - 1] + w * theory_p12[i];
  };

  double spp = 0.0, spg = 0.0;
  std::vector<double> p(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!(data[i].sigma > 0.0)) throw std::invalid_argument("data sigmas must be positive");
    p[i] = interpolate(data[i].delay_ns);
    const double w = 1.0 / (data[i].sigma * data[i].sigma);
    spp += w * p[i] * p[i];
    spg += w * p[i] * data[i].g12;
  }
  if (!(spp > 0.0)) throw std::invalid_argument("theory vanishes at every data delay");

  XiFit fit;
  fit.points = data.size();
  fit.xi = spg / spp;
  fit.xi_sigma = 1.0 / std::sqrt(spp);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r = (fit.xi * p[i] - data[i].g12) / data[i].sigma;
    fit.chi_squared += r * r;
  }
  const std::size_t tail = std::max<std::size_t>(1, theory_p12.size() / 10);
  double mean = 0.0;
  for (std::size_t i = theory_p12.size() - tail; i < theory_p12.size(); ++i) mean += theory_p12[i];
  mean /= static_cast<double>(tail);
  fit.xi_th = mean > 0.0 ? 1.0 / mean : std::numeric_limits<double>::infinity();
  return fit;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool pending = false;
  for (char c : line) {
    if (c == ',' || c == ';' || c == '\t' || c == ' ' || c == '\r') {
      if (c == ',' || c == ';') {
        out.push_back(cur);
        cur.clear();
        pending = true;
      } else if (!cur.empty()) {
        out.push_back(cur);
        cur.clear();
        pending = false;
      }
      continue;
    }
    cur.push_back(c);
    pending = false;
  }
  if (!cur.empty() || pending) out.push_back(cur);
  return out;
}

bool parse_number(const std::string& s, double& v) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  return ec == std::errc() && ptr == end && std::isfinite(v);
}

}  // namespace

std::vector<G12Point> read_g12_data(std::istream& in, const std::string& source) {
  std::vector<G12Point> points;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  auto fail = [&](const std::string& what) {
    std::ostringstream os;
    os << source << ":" << line_no << ": " << what;
    throw DataParseError(os.str());
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto fields = split_fields(line.substr(first));
    if (!header_seen) {
      double v;
      if (fields.size() != 3) fail("header must name three columns (delay_ns, g12, sigma)");
      if (parse_number(fields[0], v)) fail("missing header row");
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) fail("expected 3 fields, found " + std::to_string(fields.size()));
    G12Point p{};
    if (!parse_number(fields[0], p.delay_ns)) fail("invalid delay '" + fields[0] + "'");
    if (!parse_number(fields[1], p.g12)) fail("invalid g12 '" + fields[1] + "'");
    if (!parse_number(fields[2], p.sigma)) fail("invalid sigma '" + fields[2] + "'");
    if (!(p.sigma > 0.0)) fail("sigma must be positive");
    points.push_back(p);
  }
  if (!header_seen) {
    line_no = std::max<std::size_t>(line_no, 1);
    fail("no header row");
  }
  if (points.empty()) fail("no data rows");
  return points;
}

}  // namespace dlcz
