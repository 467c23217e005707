#include "allencahn/heteroclinic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "allencahn/error.hpp"

namespace allencahn {

namespace {

constexpr double kTailSwitch = 1e-6;

struct HalfSolution {
  std::vector<double> values;
  std::vector<double> derivative;
};

// Integrates from s = 0 in the direction `sign` (+1 towards H = 1, -1 towards H = -1).
HalfSolution integrate_half(const Potential& p, int steps, double h, int sign) {
  const double well = sign > 0 ? 1.0 : -1.0;
  const double rate = std::sqrt(std::max(p.d2w(well), 0.0));
  if (!(rate > 0.0)) throw ValidationError("W''(+-1) must be positive for a heteroclinic profile");
  auto rhs = [&p, sign](double y) { return sign * std::sqrt(2.0 * std::max(p.w(y), 0.0)); };

  HalfSolution out;
  out.values.reserve(steps + 1);
  out.derivative.reserve(steps + 1);
  double y = 0.0;
  out.values.push_back(y);
  out.derivative.push_back(std::abs(rhs(y)));

  bool tail = false;
  double tail_start = 0.0;
  int tail_index = 0;
  for (int i = 1; i <= steps; ++i) {
    if (!tail && std::abs(well - y) < kTailSwitch) {
      tail = true;
      tail_start = std::abs(well - y);
      tail_index = i - 1;
    }
    if (tail) {
      const double gap = tail_start * std::exp(-rate * h * (i - tail_index));
      y = well - sign * gap;
      out.values.push_back(y);
      out.derivative.push_back(rate * gap);
      continue;
    }
    const double k1 = rhs(y);
    const double k2 = rhs(y + 0.5 * h * k1);
    const double k3 = rhs(y + 0.5 * h * k2);
    const double k4 = rhs(y + h * k3);
    y += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    if (sign * (well - y) <= 0.0) y = well - sign * std::numeric_limits<double>::min();
    out.values.push_back(y);
    out.derivative.push_back(std::abs(rhs(y)));
  }
  return out;
}

}  // namespace

HeteroclinicProfile::HeteroclinicProfile(std::vector<double> grid, std::vector<double> values,
                                         std::vector<double> derivative, double tail_rate)
    : grid_(std::move(grid)),
      values_(std::move(values)),
      derivative_(std::move(derivative)),
      tail_rate_(tail_rate) {
  if (grid_.size() < 2 || values_.size() != grid_.size() || derivative_.size() != grid_.size())
    throw ValidationError("heteroclinic profile arrays must share a size >= 2");
  step_ = grid_[1] - grid_[0];
  tail_plus_ = 1.0 - values_.back();
  tail_minus_ = 1.0 + values_.front();
}

// Cell index and local coordinate, measured from the centre node so that s and -s land on
// mirrored cells.
void HeteroclinicProfile::locate(double s, std::size_t& i, double& t) const {
  const double a = s / step_;
  const double f = std::floor(a);
  const auto centre = static_cast<long>(grid_.size() / 2);
  const long cell = std::clamp(static_cast<long>(f) + centre, 0L, static_cast<long>(grid_.size()) - 2);
  i = static_cast<std::size_t>(cell);
  t = a - static_cast<double>(cell - centre);
}

double HeteroclinicProfile::value(double s) const {
  const double S = grid_.back();
  if (s >= S) return 1.0 - tail_plus_ * std::exp(-tail_rate_ * (s - S));
  if (s <= -S) return -1.0 + tail_minus_ * std::exp(-tail_rate_ * (-S - s));
  std::size_t i = 0;
  double t = 0.0;
  locate(s, i, t);
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * values_[i] + h10 * step_ * derivative_[i] + h01 * values_[i + 1] +
         h11 * step_ * derivative_[i + 1];
}

double HeteroclinicProfile::slope(double s) const {
  const double S = grid_.back();
  if (s >= S) return tail_rate_ * tail_plus_ * std::exp(-tail_rate_ * (s - S));
  if (s <= -S) return tail_rate_ * tail_minus_ * std::exp(-tail_rate_ * (-S - s));
  std::size_t i = 0;
  double t = 0.0;
  locate(s, i, t);
  const double t2 = t * t;
  const double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1;
  const double d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
  return (d00 * values_[i] + d01 * values_[i + 1]) / step_ + d10 * derivative_[i] +
         d11 * derivative_[i + 1];
}

double HeteroclinicProfile::inverse(double h) const {
  if (h >= 1.0) return std::numeric_limits<double>::infinity();
  if (h <= -1.0) return -std::numeric_limits<double>::infinity();
  const double S = grid_.back();
  if (h >= values_.back()) return S + std::log(tail_plus_ / (1.0 - h)) / tail_rate_;
  if (h <= values_.front()) return -S - std::log(tail_minus_ / (1.0 + h)) / tail_rate_;
  const auto it = std::upper_bound(values_.begin(), values_.end(), h);
  const auto i = static_cast<std::size_t>(std::distance(values_.begin(), it)) - 1;
  double lo = grid_[i], hi = grid_[i + 1];
  for (int iter = 0; iter < 80 && hi - lo > 1e-15; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (value(mid) < h ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double HeteroclinicProfile::gradient_energy() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < derivative_.size(); ++i) {
    const double w = (i == 0 || i + 1 == derivative_.size()) ? 0.5 : 1.0;
    sum += w * derivative_[i] * derivative_[i];
  }
  sum *= step_;
  const double plus = tail_rate_ * tail_plus_;
  const double minus = tail_rate_ * tail_minus_;
  return sum + (plus * plus + minus * minus) / (2.0 * tail_rate_);
}

HeteroclinicProfile solve_heteroclinic(const Potential& p, double half_width, double step) {
  if (!(half_width >= 5.0)) throw ValidationError("heteroclinic half_width must be >= 5");
  if (!(step > 0.0 && step <= 0.01)) throw ValidationError("heteroclinic step must lie in (0, 0.01]");

  // The profile only exists when W > 0 strictly between the wells.
  for (int i = -999; i <= 999; ++i) {
    const double t = i / 1000.0;
    if (!(p.w(t) > 0.0)) {
      std::ostringstream os;
      os << "potential '" << p.name << "' vanishes at interior point t = " << t
         << "; the heteroclinic profile is undefined";
      throw ValidationError(os.str());
    }
  }

  const int steps = static_cast<int>(std::ceil(half_width / step));
  const double h = half_width / steps;
  const HalfSolution up = integrate_half(p, steps, h, +1);
  const HalfSolution down = integrate_half(p, steps, h, -1);

  std::vector<double> grid(2 * steps + 1), values(2 * steps + 1), derivative(2 * steps + 1);
  for (int i = -steps; i <= steps; ++i) {
    const auto k = static_cast<std::size_t>(i + steps);
    grid[k] = i * h;
    const HalfSolution& half = i >= 0 ? up : down;
    const auto j = static_cast<std::size_t>(std::abs(i));
    values[k] = half.values[j];
    derivative[k] = half.derivative[j];
  }
  grid[static_cast<std::size_t>(steps)] = 0.0;

  // Least-squares slope of log(1 - H) over the last two length units.
  const int window = std::min(steps, static_cast<int>(std::ceil(2.0 / h)));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = steps - window; i <= steps; ++i) {
    const auto k = static_cast<std::size_t>(i + steps);
    const double x = grid[k];
    const double y = std::log(1.0 - values[k]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double n = window + 1;
  const double tail_rate = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
  if (!(tail_rate > 0.0) || !std::isfinite(tail_rate))
    throw SolverError("heteroclinic tail does not decay; check the potential's wells");
  return HeteroclinicProfile(std::move(grid), std::move(values), std::move(derivative), tail_rate);
}

}  // namespace allencahn
