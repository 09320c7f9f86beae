#include "rfcharge/deployment.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rfcharge/format.hpp"
#include "rfcharge/rng.hpp"

namespace rfcharge {

void Area::validate() const {
  if (!(width > 0.0 && std::isfinite(width)) || !(height > 0.0 && std::isfinite(height))) {
    throw std::invalid_argument("area dimensions must be positive");
  }
}

double Area::diagonal() const { return std::hypot(width, height); }

Point Area::wrap(Point p) const {
  p.x = std::fmod(p.x, width);
  if (p.x < 0.0) p.x += width;
  if (p.x >= width) p.x = 0.0;
  p.y = std::fmod(p.y, height);
  if (p.y < 0.0) p.y += height;
  if (p.y >= height) p.y = 0.0;
  return p;
}

namespace {

inline double wrap_delta(double d, double span) {
  if (d > 0.5 * span) return d - span;
  if (d < -0.5 * span) return d + span;
  return d;
}

inline double torus_dist2(const Point& a, const Point& b, double w, double h) {
  const double dx = wrap_delta(b.x - a.x, w);
  const double dy = wrap_delta(b.y - a.y, h);
  return dx * dx + dy * dy;
}

Point uniform_point(Rng& rng, const Area& area) {
  std::uniform_real_distribution<double> ux(0.0, area.width);
  std::uniform_real_distribution<double> uy(0.0, area.height);
  return area.wrap({ux(rng), uy(rng)});
}

}  // namespace

Point torus_delta(const Point& from, const Point& to, const Area& area) {
  return {wrap_delta(to.x - from.x, area.width), wrap_delta(to.y - from.y, area.height)};
}

double torus_distance(const Point& a, const Point& b, const Area& area) {
  if (!area.contains(a) || !area.contains(b)) {
    throw std::domain_error("point outside the area");
  }
  return std::sqrt(torus_dist2(a, b, area.width, area.height));
}

void StraussConfig::validate() const {
  if (!(interaction_gamma >= 0.0 && interaction_gamma <= 1.0)) {
    throw std::invalid_argument("interaction_gamma must lie in [0, 1]");
  }
  if (!(interaction_radius >= 0.0) || !std::isfinite(interaction_radius)) {
    throw std::invalid_argument("interaction_radius must be >= 0");
  }
}

std::vector<Point> sample_strauss(const StraussConfig& cfg, const Area& area) {
  cfg.validate();
  area.validate();
  Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(Stream::Deployment)}));
  const std::size_t n = cfg.n_points;
  const double r2 = cfg.interaction_radius * cfg.interaction_radius;
  const double w = area.width;
  const double h = area.height;
  std::vector<Point> pts;
  pts.reserve(n);
  if (n == 0) return pts;

  auto neighbours = [&](const Point& p, std::size_t skip) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j != skip && torus_dist2(p, pts[j], w, h) < r2) ++count;
    }
    return count;
  };

  if (cfg.interaction_gamma == 0.0) {
    // Hard core: the chain must start from a configuration of positive density.
    constexpr int kRestarts = 20;
    constexpr int kAttemptsPerPoint = 5'000;
    for (int restart = 0; restart < kRestarts && pts.size() < n; ++restart) {
      pts.clear();
      while (pts.size() < n) {
        bool placed = false;
        for (int a = 0; a < kAttemptsPerPoint; ++a) {
          const Point p = uniform_point(rng, area);
          if (neighbours(p, pts.size()) == 0) {
            pts.push_back(p);
            placed = true;
            break;
          }
        }
        if (!placed) break;
      }
    }
    if (pts.size() < n) {
      throw std::runtime_error("cannot pack " + std::to_string(n) +
                               " hard-core points of radius " +
                               format_double(cfg.interaction_radius) + " into the area");
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) pts.push_back(uniform_point(rng, area));
  }

  if (cfg.interaction_gamma == 1.0) {
    // Without interaction every relocation is accepted, so the chain is the
    // independent uniform sample it started from; the burn-in would only
    // redraw it.
    return pts;
  }

  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t proposals = cfg.burn_in_sweeps * n;
  for (std::size_t step = 0; step < proposals; ++step) {
    const std::size_t i = pick(rng);
    const Point cand = uniform_point(rng, area);
    const double u = unit(rng);
    const long delta = static_cast<long>(neighbours(cand, i)) -
                       static_cast<long>(neighbours(pts[i], i));
    if (delta <= 0 || u < std::pow(cfg.interaction_gamma, static_cast<double>(delta))) {
      pts[i] = cand;
    }
  }
  return pts;
}

std::size_t close_pair_count(const std::vector<Point>& points, double radius,
                             const Area& area) {
  const double r2 = radius * radius;
  std::size_t count = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (torus_dist2(points[i], points[j], area.width, area.height) < r2) ++count;
    }
  }
  return count;
}

std::string points_csv(const std::vector<Point>& points) {
  std::ostringstream os;
  os << "id,x_m,y_m\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    os << i << ',' << format_double(points[i].x) << ',' << format_double(points[i].y)
       << '\n';
  }
  return os.str();
}

}  // namespace rfcharge
