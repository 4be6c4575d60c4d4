#include "coherentflow/flow_models.hpp"

#include <cmath>
#include <string>

#include "coherentflow/error.hpp"

namespace cf {
namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

Domain Domain::box2(double x0, double x1, double y0, double y1, std::vector<int> wrap_axes) {
  Domain d;
  d.lower = Eigen::Vector2d(x0, y0);
  d.upper = Eigen::Vector2d(x1, y1);
  d.wrap_axes = std::move(wrap_axes);
  return d;
}

bool Domain::valid() const {
  if (lower.size() == 0 || lower.size() != upper.size()) return false;
  if (!(lower.array() < upper.array()).all()) return false;
  for (int axis : wrap_axes)
    if (axis < 0 || axis >= lower.size()) return false;
  return true;
}

bool Domain::contains(const Eigen::VectorXd& pos) const {
  return pos.size() == lower.size() && (pos.array() >= lower.array()).all() &&
         (pos.array() <= upper.array()).all();
}

Vec2 double_gyre_velocity(const Vec2& pos, double t, const DoubleGyreParams& p) {
  const double x = pos.x();
  const double y = pos.y();
  const double s = std::sin(p.omega * t);
  const double f = p.eps * s * x * x + (1.0 - 2.0 * p.eps * s) * x;
  const double dfdx = 2.0 * p.alpha * s * x + (1.0 - 2.0 * p.alpha * s);
  return {-kPi * p.amp * std::sin(kPi * f) * std::cos(kPi * y),
          kPi * p.amp * std::cos(kPi * f) * std::sin(kPi * y) * dfdx};
}

double bickley_stream(const Vec2& pos, double t, const BickleyParams& p) {
  const double sech = 1.0 / std::cosh(pos.y() / p.l0);
  double waves = 0.0;
  for (int n = 0; n < 3; ++n) waves += p.eps[n] * std::cos(p.k[n] * (pos.x() - p.c[n] * t));
  return -p.u0 * p.l0 * std::tanh(pos.y() / p.l0) + p.u0 * p.l0 * sech * sech * waves;
}

Vec2 bickley_velocity(const Vec2& pos, double t, const BickleyParams& p) {
  const double th = std::tanh(pos.y() / p.l0);
  const double sech = 1.0 / std::cosh(pos.y() / p.l0);
  const double sech2 = sech * sech;
  double waves = 0.0;
  double waves_dx = 0.0;
  for (int n = 0; n < 3; ++n) {
    const double phase = p.k[n] * (pos.x() - p.c[n] * t);
    waves += p.eps[n] * std::cos(phase);
    waves_dx -= p.eps[n] * p.k[n] * std::sin(phase);
  }
  // psi = -U L tanh(y/L) + U L sech^2(y/L) W(x,t)
  const double dpsi_dy = -p.u0 * sech2 - 2.0 * p.u0 * sech2 * th * waves;
  const double dpsi_dx = p.u0 * p.l0 * sech2 * waves_dx;
  return {-dpsi_dy, dpsi_dx};
}

double single_gyre_stream(const Vec2& pos, const SingleGyreParams& p) {
  const double lx = p.domain.upper[0] - p.domain.lower[0];
  const double ly = p.domain.upper[1] - p.domain.lower[1];
  const double xs = (pos.x() - p.domain.lower[0]) / lx;
  const double ys = (pos.y() - p.domain.lower[1]) / ly;
  return p.amp * std::sin(kPi * xs) * std::sin(kPi * ys);
}

Vec2 single_gyre_velocity(const Vec2& pos, double /*t*/, const SingleGyreParams& p) {
  const double lx = p.domain.upper[0] - p.domain.lower[0];
  const double ly = p.domain.upper[1] - p.domain.lower[1];
  const double xs = (pos.x() - p.domain.lower[0]) / lx;
  const double ys = (pos.y() - p.domain.lower[1]) / ly;
  return {-kPi * p.amp * std::sin(kPi * xs) * std::cos(kPi * ys) / ly,
          kPi * p.amp * std::cos(kPi * xs) * std::sin(kPi * ys) / lx};
}

Vec2 FlowField::velocity(const Vec2& pos, double t) const {
  const double model_t = time_scale_ * t + time_offset_;
  const Vec2 v = std::visit(
      Overloaded{
          [&](const DoubleGyreParams& p) { return double_gyre_velocity(pos, model_t, p); },
          [&](const BickleyParams& p) { return bickley_velocity(pos, model_t, p); },
          [&](const SingleGyreParams& p) { return single_gyre_velocity(pos, model_t, p); },
          [&](const UniformFlowParams& p) { return Vec2(p.velocity); },
      },
      model_);
  return sign_ * v;
}

FlowField FlowField::frozen(double t_fixed) const {
  FlowField out = *this;
  out.time_offset_ = time_scale_ * t_fixed + time_offset_;
  out.time_scale_ = 0.0;
  return out;
}

FlowField FlowField::time_reversed(double t_ref) const {
  FlowField out = *this;
  out.time_offset_ = time_scale_ * t_ref + time_offset_;
  out.time_scale_ = -time_scale_;
  out.sign_ = -sign_;
  return out;
}

std::vector<Vec2> seed_grid(const Domain& domain, const std::vector<int>& counts) {
  require(domain.valid() && domain.dim() == 2, ErrorCode::invalid_argument,
          "seed_grid: expected a valid 2-D domain");
  require(counts.size() == 2, ErrorCode::invalid_argument, "seed_grid: expected two counts");
  for (int c : counts)
    require(c >= 2, ErrorCode::invalid_argument,
            "seed_grid: counts must be >= 2 per axis, got " + std::to_string(c));

  const int nx = counts[0];
  const int ny = counts[1];
  std::vector<Vec2> seeds;
  seeds.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    const double y = domain.lower[1] + (domain.upper[1] - domain.lower[1]) * j / (ny - 1);
    for (int i = 0; i < nx; ++i) {
      const double x = domain.lower[0] + (domain.upper[0] - domain.lower[0]) * i / (nx - 1);
      seeds.emplace_back(x, y);
    }
  }
  return seeds;
}

}  // namespace cf
