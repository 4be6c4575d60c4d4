#include "coherentflow/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coherentflow/error.hpp"
#include "coherentflow/parallel.hpp"

namespace cf {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b* (fifth minus embedded fourth order weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// Increments are formed relative to k1 so a constant field is integrated
// without rounding: the weights sum to one analytically but not in floating
// point.
Vec2 rk4_step(const FlowField& field, const Vec2& y, double t, double h) {
  const Vec2 k1 = field.velocity(y, t);
  const Vec2 k2 = field.velocity(y + 0.5 * h * k1, t + 0.5 * h);
  const Vec2 k3 = field.velocity(y + 0.5 * h * k2, t + 0.5 * h);
  const Vec2 k4 = field.velocity(y + h * k3, t + h);
  return y + h * (k1 + (2.0 * (k2 - k1) + 2.0 * (k3 - k1) + (k4 - k1)) / 6.0);
}

Vec2 advance_rk4(const FlowField& field, const Vec2& pos, double t, double dt, double h_max) {
  const double h_cap = h_max > 0.0 ? h_max : dt;
  const auto substeps = static_cast<long>(std::ceil(dt / h_cap - 1e-12));
  const double h = dt / static_cast<double>(std::max(1L, substeps));
  Vec2 y = pos;
  for (long i = 0; i < std::max(1L, substeps); ++i) y = rk4_step(field, y, t + h * i, h);
  return y;
}

Vec2 advance_rk45(const FlowField& field, const Vec2& pos, double t, double dt,
                  const IntegratorConfig& cfg) {
  const double t_end = t + dt;
  const double h_cap = cfg.max_step > 0.0 ? std::min(cfg.max_step, dt) : dt;
  double h = h_cap;
  double time = t;
  Vec2 y = pos;
  Vec2 k1 = field.velocity(y, time);

  while (time < t_end) {
    const double remaining = t_end - time;
    bool last = false;
    if (h >= remaining) {
      h = remaining;
      last = true;
    }
    if (h < 1e-12 * dt)
      throw Error(ErrorCode::integration_failure,
                  "step size underflow at t=" + std::to_string(time));

    const Vec2 k2 = field.velocity(y + h * (a21 * k1), time + c2 * h);
    const Vec2 k3 = field.velocity(y + h * (a31 * k1 + a32 * k2), time + c3 * h);
    const Vec2 k4 = field.velocity(y + h * (a41 * k1 + a42 * k2 + a43 * k3), time + c4 * h);
    const Vec2 k5 =
        field.velocity(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), time + c5 * h);
    const Vec2 k6 = field.velocity(
        y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), time + h);
    const Vec2 y_new =
        y + h * (k1 + (b3 * (k3 - k1) + b4 * (k4 - k1) + b5 * (k5 - k1) + b6 * (k6 - k1)));
    const double t_new = last ? t_end : time + h;
    const Vec2 k7 = field.velocity(y_new, t_new);

    const Vec2 err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double norm = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      norm = std::max(norm, std::abs(err[i]) / scale);
    }

    if (norm <= 1.0) {
      time = t_new;
      y = y_new;
      k1 = k7;
      const double grow = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
      h = std::min(h * grow, h_cap);
    } else {
      h *= std::clamp(0.9 * std::pow(norm, -0.2), 0.1, 0.9);
    }
  }
  return y;
}

}  // namespace

Ensemble::Ensemble(std::size_t particles, std::size_t steps, std::size_t dim, double t0,
                   double dt_out)
    : particles_(particles),
      steps_(steps),
      dim_(dim),
      t0_(t0),
      dt_out_(dt_out),
      positions_(particles * steps * dim, 0.0) {
  require(particles >= 1, ErrorCode::invalid_argument, "ensemble needs at least one particle");
  require(steps >= 1 && dim >= 1, ErrorCode::invalid_argument, "ensemble needs steps and dim");
  require(dt_out > 0.0, ErrorCode::invalid_argument, "ensemble dt_out must be positive");
  ids_.resize(particles);
  for (std::size_t i = 0; i < particles; ++i) ids_[i] = static_cast<std::int64_t>(i);
}

Eigen::MatrixXd Ensemble::snapshot(std::size_t step) const {
  require(step < steps_, ErrorCode::invalid_argument,
          "snapshot index " + std::to_string(step) + " out of range");
  Eigen::MatrixXd out(particles_, dim_);
  for (std::size_t p = 0; p < particles_; ++p)
    for (std::size_t a = 0; a < dim_; ++a) out(p, a) = at(p, step, a);
  return out;
}

void Ensemble::set_ids(std::vector<std::int64_t> ids) {
  require(ids.size() == particles_, ErrorCode::dimension_mismatch,
          "ensemble id count does not match particle count");
  ids_ = std::move(ids);
}

bool Ensemble::operator==(const Ensemble& other) const {
  return particles_ == other.particles_ && steps_ == other.steps_ && dim_ == other.dim_ &&
         t0_ == other.t0_ && dt_out_ == other.dt_out_ && positions_ == other.positions_ &&
         ids_ == other.ids_;
}

Vec2 advance(const FlowField& field, const Vec2& pos, double t, double dt,
             const IntegratorConfig& cfg) {
  require(dt > 0.0, ErrorCode::invalid_argument, "advance: dt must be positive");
  require(cfg.rel_tol > 0.0 && cfg.abs_tol > 0.0, ErrorCode::invalid_argument,
          "advance: tolerances must be positive");
  if (cfg.method == IntegratorMethod::rk4_fixed) return advance_rk4(field, pos, t, dt, cfg.max_step);
  return advance_rk45(field, pos, t, dt, cfg);
}

Eigen::VectorXd wrap(const Eigen::VectorXd& pos, const Domain& domain) {
  Eigen::VectorXd out = pos;
  for (int axis : domain.wrap_axes) {
    const double lo = domain.lower[axis];
    const double period = domain.upper[axis] - lo;
    double v = std::fmod(out[axis] - lo, period);
    if (v < 0.0) v += period;
    if (v >= period) v = 0.0;
    out[axis] = lo + v;
  }
  return out;
}

Vec2 wrap(const Vec2& pos, const Domain& domain) {
  return wrap(Eigen::VectorXd(pos), domain).head<2>();
}

std::size_t snapshot_count(double t0, double t_end, double dt_out) {
  require(t_end > t0, ErrorCode::invalid_argument, "time window: t_end must exceed t0");
  require(dt_out > 0.0, ErrorCode::invalid_argument, "time window: dt_out must be positive");
  const double ratio = (t_end - t0) / dt_out;
  const double rounded = std::round(ratio);
  require(std::abs(ratio - rounded) * dt_out <= 1e-9 && rounded >= 1.0,
          ErrorCode::invalid_argument, "time window: dt_out must divide (t_end - t0)");
  return static_cast<std::size_t>(rounded) + 1;
}

Ensemble integrate_ensemble(const FlowField& field, const std::vector<Vec2>& seeds, double t0,
                            double t_end, double dt_out, const IntegratorConfig& cfg,
                            const std::optional<Domain>& domain) {
  require(!seeds.empty(), ErrorCode::invalid_argument, "integrate_ensemble: no seeds");
  if (domain) require(domain->valid() && domain->dim() == 2, ErrorCode::invalid_argument,
                      "integrate_ensemble: invalid domain");
  const std::size_t steps = snapshot_count(t0, t_end, dt_out);
  Ensemble ens(seeds.size(), steps, 2, t0, dt_out);
  ens.set_domain(domain);

  parallel_for(seeds.size(), [&](std::size_t p) {
    Vec2 y = seeds[p];
    if (domain) y = wrap(y, *domain);
    ens.at(p, 0, 0) = y.x();
    ens.at(p, 0, 1) = y.y();
    for (std::size_t s = 1; s < steps; ++s) {
      try {
        y = advance(field, y, ens.time(s - 1), dt_out, cfg);
      } catch (const Error& e) {
        throw Error(e.code(), "particle " + std::to_string(p) + ": " + e.what());
      }
      if (domain) y = wrap(y, *domain);
      ens.at(p, s, 0) = y.x();
      ens.at(p, s, 1) = y.y();
    }
  });
  return ens;
}

}  // namespace cf
