#include "rfcharge/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <fftw3.h>

#include "rfcharge/format.hpp"

namespace rfcharge {

namespace {

// The FFTW planner is not re-entrant; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

ComplexBuffer make_buffer(std::size_t n) {
  return ComplexBuffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

class ForwardFft {
 public:
  explicit ForwardFft(std::size_t n) : n_(n), buf_(make_buffer(n)) {
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf_.get(), buf_.get(), FFTW_FORWARD,
                             FFTW_ESTIMATE);
  }
  ~ForwardFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  ForwardFft(const ForwardFft&) = delete;
  ForwardFft& operator=(const ForwardFft&) = delete;

  fftw_complex* data() { return buf_.get(); }
  void run() { fftw_execute(plan_); }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  ComplexBuffer buf_;
  fftw_plan plan_;
};

double fgn_autocovariance(double hurst, std::size_t k) {
  const double h2 = 2.0 * hurst;
  const double kd = static_cast<double>(k);
  const double below = k == 0 ? 1.0 : std::pow(kd - 1.0, h2);
  return 0.5 * (std::pow(kd + 1.0, h2) - 2.0 * std::pow(kd, h2) + below);
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

FgnGenerator::FgnGenerator(double hurst, std::size_t n, FgnMethod preferred)
    : hurst_(hurst), n_(n) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("hurst must lie in (0, 1)");
  if (n == 0) throw std::invalid_argument("fGn length must be >= 1");
  if (preferred == FgnMethod::Hosking) {
    method_ = FgnMethod::Hosking;
    return;
  }

  const std::size_t half = next_pow2(std::max<std::size_t>(n, 2));
  embed_ = 2 * half;
  ForwardFft fft(embed_);
  auto* c = fft.data();
  for (std::size_t k = 0; k <= half; ++k) {
    c[k][0] = fgn_autocovariance(hurst, k);
    c[k][1] = 0.0;
  }
  for (std::size_t k = 1; k < half; ++k) {
    c[embed_ - k][0] = c[k][0];
    c[embed_ - k][1] = 0.0;
  }
  fft.run();

  double max_eig = 0.0;
  double min_eig = 0.0;
  for (std::size_t k = 0; k < embed_; ++k) {
    max_eig = std::max(max_eig, c[k][0]);
    min_eig = std::min(min_eig, c[k][0]);
  }
  if (min_eig < -1e-10 * max_eig) {
    method_ = FgnMethod::Hosking;
    return;
  }
  sqrt_eigen_.resize(embed_);
  const double m = static_cast<double>(embed_);
  for (std::size_t k = 0; k < embed_; ++k) {
    sqrt_eigen_[k] = std::sqrt(std::max(0.0, c[k][0]) / m);
  }
}

std::pair<std::vector<double>, std::vector<double>> FgnGenerator::sample_pair(
    Rng& rng, double sigma) const {
  if (method_ == FgnMethod::Hosking) {
    auto a = hosking(rng, sigma);
    auto b = hosking(rng, sigma);
    return {std::move(a), std::move(b)};
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  ForwardFft fft(embed_);
  auto* v = fft.data();
  // Complex white noise shaped by the circulant spectrum: the real and
  // imaginary parts of the transform are independent with the target
  // covariance.
  for (std::size_t k = 0; k < embed_; ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    v[k][0] = sqrt_eigen_[k] * re;
    v[k][1] = sqrt_eigen_[k] * im;
  }
  fft.run();
  std::vector<double> a(n_);
  std::vector<double> b(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    a[j] = sigma * v[j][0];
    b[j] = sigma * v[j][1];
  }
  return {std::move(a), std::move(b)};
}

std::vector<double> FgnGenerator::sample(Rng& rng, double sigma) const {
  return sample_pair(rng, sigma).first;
}

// Durbin-Levinson recursion, O(n^2).
std::vector<double> FgnGenerator::hosking(Rng& rng, double sigma) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(n_);
  std::vector<double> phi(n_, 0.0);
  std::vector<double> prev(n_, 0.0);
  std::vector<double> gamma(n_ + 1);
  for (std::size_t k = 0; k <= n_; ++k) gamma[k] = fgn_autocovariance(hurst_, k);
  double v = 1.0;
  x[0] = normal(rng);
  for (std::size_t i = 1; i < n_; ++i) {
    double num = gamma[i];
    for (std::size_t j = 1; j < i; ++j) num -= prev[j] * gamma[i - j];
    const double phi_ii = num / v;
    phi[i] = phi_ii;
    for (std::size_t j = 1; j < i; ++j) phi[j] = prev[j] - phi_ii * prev[i - j];
    v *= (1.0 - phi_ii * phi_ii);
    double mean = 0.0;
    for (std::size_t j = 1; j <= i; ++j) mean += phi[j] * x[i - j];
    x[i] = mean + std::sqrt(std::max(v, 0.0)) * normal(rng);
    std::copy(phi.begin(), phi.begin() + static_cast<long>(i) + 1, prev.begin());
  }
  for (double& s : x) s *= sigma;
  return x;
}

FgnResult fgn_increments(double hurst, std::size_t n, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  FgnGenerator gen(hurst, n);
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(Stream::Mobility)}));
  return {gen.sample(rng, sigma), gen.method()};
}

double truncated_pareto_min(double alpha, double mean, double max_length) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("alpha must lie in (1, 2)");
  if (!(mean > 0.0) || !(max_length > mean)) {
    throw std::invalid_argument("need 0 < mean < max_length");
  }
  auto truncated_mean = [&](double xm) {
    const double tail = std::pow(xm / max_length, alpha);
    return alpha * std::pow(xm, alpha) / (1.0 - tail) *
           (std::pow(xm, 1.0 - alpha) - std::pow(max_length, 1.0 - alpha)) / (alpha - 1.0);
  };
  // truncated_mean is increasing in xm and exceeds xm, so the root is below `mean`.
  double lo = mean * 1e-12;
  double hi = mean;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (truncated_mean(mid) < mean) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(lo * hi);
}

namespace {

LevyStep draw_levy(Rng& rng, double alpha, double xm, double max_length) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double tail = std::pow(xm / max_length, alpha);
  const double u = unit(rng);
  const double length = xm / std::pow(1.0 - u * (1.0 - tail), 1.0 / alpha);
  const double heading = 2.0 * std::numbers::pi * unit(rng);
  return {std::min(length, max_length), heading};
}

}  // namespace

std::vector<LevyStep> levy_steps(double alpha, std::size_t n, double scale,
                                 std::uint64_t seed, double max_length) {
  const double xm = truncated_pareto_min(alpha, scale, max_length);
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(Stream::Mobility)}));
  std::vector<LevyStep> steps;
  steps.reserve(n);
  for (std::size_t i = 0; i < n; ++i) steps.push_back(draw_levy(rng, alpha, xm, max_length));
  return steps;
}

void MobilityConfig::validate() const {
  if (const auto* f = std::get_if<FbmModel>(&model)) {
    if (!(f->hurst > 0.0 && f->hurst < 1.0)) {
      throw std::invalid_argument("hurst must lie in (0, 1)");
    }
  } else {
    const auto& l = std::get<LevyModel>(model);
    if (!(l.alpha > 1.0 && l.alpha < 2.0)) {
      throw std::invalid_argument("levy alpha must lie in (1, 2)");
    }
  }
  if (!(mean_speed > 0.0) || !std::isfinite(mean_speed)) {
    throw std::invalid_argument("mean_speed must be > 0");
  }
  if (!(time_step > 0.0) || !std::isfinite(time_step)) {
    throw std::invalid_argument("time_step must be > 0");
  }
}

std::string model_name(const MobilityModel& model) {
  if (const auto* f = std::get_if<FbmModel>(&model)) {
    return "fbm(H=" + format_double(f->hurst) + ")";
  }
  return "levy(alpha=" + format_double(std::get<LevyModel>(model).alpha) + ")";
}

TrajectoryBuilder::TrajectoryBuilder(const MobilityConfig& cfg, double duration,
                                     const Area& area)
    : cfg_(cfg), area_(area) {
  cfg.validate();
  area.validate();
  if (!(duration >= cfg.time_step)) {
    throw std::invalid_argument("duration must be >= time_step");
  }
  steps_ = static_cast<std::size_t>(std::llround(std::floor(duration / cfg.time_step + 1e-9)));
  if (const auto* f = std::get_if<FbmModel>(&cfg.model)) {
    fgn_.emplace_back(f->hurst, steps_);
  } else {
    levy_min_ = truncated_pareto_min(std::get<LevyModel>(cfg.model).alpha,
                                     cfg.mean_speed * cfg.time_step, area.diagonal());
  }
}

Trajectory TrajectoryBuilder::build(std::uint64_t seed) const {
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(Stream::Mobility)}));
  Trajectory t;
  t.time_step = cfg_.time_step;
  t.positions.reserve(steps_ + 1);
  std::uniform_real_distribution<double> ux(0.0, area_.width);
  std::uniform_real_distribution<double> uy(0.0, area_.height);
  Point p = area_.wrap({ux(rng), uy(rng)});
  t.positions.push_back(p);

  const double step_mean = cfg_.mean_speed * cfg_.time_step;
  if (!fgn_.empty()) {
    // Per-axis sigma such that the mean 2-D Gaussian step length is step_mean.
    const double sigma = step_mean * std::sqrt(2.0 / std::numbers::pi);
    const auto [dx, dy] = fgn_.front().sample_pair(rng, sigma);
    for (std::size_t i = 0; i < steps_; ++i) {
      p = area_.wrap({p.x + dx[i], p.y + dy[i]});
      t.positions.push_back(p);
      t.path_length += std::hypot(dx[i], dy[i]);
    }
  } else {
    const double alpha = std::get<LevyModel>(cfg_.model).alpha;
    const double diag = area_.diagonal();
    for (std::size_t i = 0; i < steps_; ++i) {
      const LevyStep s = draw_levy(rng, alpha, levy_min_, diag);
      p = area_.wrap({p.x + s.length * std::cos(s.heading),
                      p.y + s.length * std::sin(s.heading)});
      t.positions.push_back(p);
      t.path_length += s.length;
    }
  }
  return t;
}

Trajectory build_trajectory(const MobilityConfig& cfg, double duration, const Area& area,
                            std::uint64_t seed) {
  return TrajectoryBuilder(cfg, duration, area).build(seed);
}

double mean_speed(const Trajectory& trajectory) {
  const auto& pos = trajectory.positions;
  if (pos.size() < 2) return 0.0;
  return trajectory.path_length /
         (static_cast<double>(pos.size() - 1) * trajectory.time_step);
}

std::string trajectories_csv(const std::vector<Trajectory>& trajectories) {
  std::ostringstream os;
  os << "t_s,user_id,x_m,y_m\n";
  for (std::size_t u = 0; u < trajectories.size(); ++u) {
    const auto& t = trajectories[u];
    for (std::size_t i = 0; i < t.positions.size(); ++i) {
      os << format_double(static_cast<double>(i) * t.time_step) << ',' << u << ','
         << format_double(t.positions[i].x) << ',' << format_double(t.positions[i].y)
         << '\n';
    }
  }
  return os.str();
}

}  // namespace rfcharge
