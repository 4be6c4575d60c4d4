#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <numbers>
#include <variant>
#include <vector>

namespace cf {

using Vec2 = Eigen::Vector2d;

/// Axis-aligned box with optional periodic axes.
struct Domain {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<int> wrap_axes;

  static Domain box2(double x0, double x1, double y0, double y1,
                     std::vector<int> wrap_axes = {});

  Eigen::Index dim() const { return lower.size(); }
  bool valid() const;  // lower < upper componentwise, wrap axes in range
  bool contains(const Eigen::VectorXd& pos) const;
};

/// Time-dependent double gyre. `eps` perturbs f, `alpha` its x-derivative.
struct DoubleGyreParams {
  double eps = 0.25;
  double alpha = 0.25;
  double amp = 0.25;
  double omega = 2.0 * std::numbers::pi;
};

/// Bickley jet with three travelling waves; k_n = 2n / r0.
struct BickleyParams {
  double u0 = 5.4138;
  double l0 = 1.77;
  double r0 = 6.371;
  double c[3] = {0.1446 * 5.4138, 0.2053 * 5.4138, 0.4561 * 5.4138};
  double eps[3] = {0.075, 0.4, 0.3};
  double k[3] = {2.0 / 6.371, 4.0 / 6.371, 6.0 / 6.371};

  static BickleyParams defaults() { return {}; }
};

/// Single recirculation cell filling `domain`:
/// psi = amp * sin(pi x~) sin(pi y~) on unit-normalized coordinates.
struct SingleGyreParams {
  double amp = 1.0;
  Domain domain = Domain::box2(0.0, 1.0, 0.0, 1.0);
};

/// Spatially constant velocity; used for still water and test fixtures.
struct UniformFlowParams {
  Vec2 velocity = Vec2::Zero();
};

Vec2 double_gyre_velocity(const Vec2& pos, double t, const DoubleGyreParams& p);
Vec2 bickley_velocity(const Vec2& pos, double t, const BickleyParams& p);
Vec2 single_gyre_velocity(const Vec2& pos, double t, const SingleGyreParams& p);

/// Bickley stream function; the velocity is (-dpsi/dy, dpsi/dx).
double bickley_stream(const Vec2& pos, double t, const BickleyParams& p);
double single_gyre_stream(const Vec2& pos, const SingleGyreParams& p);

/// Closed-form velocity field: one of the analytic models, optionally with
/// time frozen or reversed.
class FlowField {
 public:
  using Model = std::variant<DoubleGyreParams, BickleyParams, SingleGyreParams,
                             UniformFlowParams>;

  FlowField() : model_(UniformFlowParams{}) {}
  explicit FlowField(Model model) : model_(std::move(model)) {}

  static FlowField zero() { return FlowField(UniformFlowParams{}); }
  static FlowField uniform(const Vec2& v) { return FlowField(UniformFlowParams{v}); }

  Vec2 velocity(const Vec2& pos, double t) const;

  /// Same field evaluated at a fixed time for every t.
  FlowField frozen(double t_fixed) const;

  /// Field whose forward flow from s=0 retraces this field backwards from
  /// t_ref: v'(x, s) = -v(x, t_ref - s).
  FlowField time_reversed(double t_ref) const;

  const Model& model() const { return model_; }

 private:
  Model model_;
  // Model time = time_scale_ * t + time_offset_; velocity scaled by sign_.
  double time_scale_ = 1.0;
  double time_offset_ = 0.0;
  double sign_ = 1.0;
};

/// Uniform grid over `domain` with inclusive endpoints, first axis fastest.
std::vector<Vec2> seed_grid(const Domain& domain, const std::vector<int>& counts);

}  // namespace cf
