#pragma once

// User mobility: fractional Brownian motion (Hurst H, H = 0.5 is classical
// Brownian motion) and Levy flight, normalized to a mean speed, on a torus.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rfcharge/deployment.hpp"
#include "rfcharge/rng.hpp"

namespace rfcharge {

enum class FgnMethod { DaviesHarte, Hosking };

struct FgnResult {
  std::vector<double> samples;
  FgnMethod method = FgnMethod::DaviesHarte;
};

/// Fractional Gaussian noise with per-sample standard deviation `sigma` and
/// autocovariance sigma^2/2 (|k+1|^2H - 2|k|^2H + |k-1|^2H). Uses circulant
/// embedding and falls back to the Hosking recursion if the embedding is not
/// non-negative definite.
FgnResult fgn_increments(double hurst, std::size_t n, double sigma, std::uint64_t seed);

/// Reusable fGn generator for one (H, n); the circulant spectrum is computed
/// once and shared by every sample drawn.
class FgnGenerator {
 public:
  /// `preferred` = Hosking skips the embedding altogether.
  FgnGenerator(double hurst, std::size_t n, FgnMethod preferred = FgnMethod::DaviesHarte);

  FgnMethod method() const { return method_; }
  std::size_t size() const { return n_; }

  std::vector<double> sample(Rng& rng, double sigma) const;
  /// Two independent series from a single transform.
  std::pair<std::vector<double>, std::vector<double>> sample_pair(Rng& rng,
                                                                  double sigma) const;

 private:
  std::vector<double> hosking(Rng& rng, double sigma) const;

  double hurst_;
  std::size_t n_;
  std::size_t embed_ = 0;  // circulant size, power of two >= 2n
  std::vector<double> sqrt_eigen_;  // sqrt(lambda_k / embed_)
  FgnMethod method_ = FgnMethod::DaviesHarte;
};

struct LevyStep {
  double length;  // m
  double heading;  // rad in [0, 2pi)
};

/// Lower cutoff of a Pareto(alpha) law truncated at `max_length` whose mean
/// equals `mean`.
double truncated_pareto_min(double alpha, double mean, double max_length);

/// Isotropic steps with Pareto(alpha) lengths truncated at `max_length` and
/// scaled so the mean length is `scale`. Requires 1 < alpha < 2.
std::vector<LevyStep> levy_steps(double alpha, std::size_t n, double scale,
                                 std::uint64_t seed, double max_length);

struct FbmModel {
  double hurst = 0.5;
};

struct LevyModel {
  double alpha = 1.5;
};

using MobilityModel = std::variant<FbmModel, LevyModel>;

struct MobilityConfig {
  MobilityModel model = FbmModel{0.5};
  double mean_speed = 3.0 / 3.6;  // m/s
  double time_step = 1.0;  // s
  std::uint64_t seed = 1;

  void validate() const;
};

std::string model_name(const MobilityModel& model);

struct Trajectory {
  double time_step = 1.0;
  std::vector<Point> positions;
  double path_length = 0.0;  // m, sum of unwrapped step lengths
};

/// Builds trajectories of a fixed duration and model. For FBM the fGn
/// spectrum is shared across calls.
class TrajectoryBuilder {
 public:
  TrajectoryBuilder(const MobilityConfig& cfg, double duration, const Area& area);

  std::size_t steps() const { return steps_; }
  Trajectory build(std::uint64_t seed) const;

 private:
  MobilityConfig cfg_;
  Area area_;
  std::size_t steps_;
  std::vector<FgnGenerator> fgn_;  // empty for Levy
  double levy_min_ = 0.0;
};

/// Uniform start, then one position per time step; length is
/// duration / time_step + 1.
Trajectory build_trajectory(const MobilityConfig& cfg, double duration, const Area& area,
                            std::uint64_t seed);

/// Path length over elapsed time. Uses the unwrapped step lengths, so steps
/// longer than half the area are not shortened by the wrap-around.
double mean_speed(const Trajectory& trajectory);

/// CSV with columns t_s, user_id, x_m, y_m.
std::string trajectories_csv(const std::vector<Trajectory>& trajectories);

}  // namespace rfcharge
