#pragma once

#include <optional>
#include <string>

#include "decarb/error.hpp"

namespace decarb {

/// Floored experience curve: cost(X) = floor + (c0 - floor) * (X / x0)^(-b).
struct TechCurve {
  std::string name;
  double c0 = 1.0;     // cost at the reference cumulative deployment x0
  double floor = 0.0;  // asymptotic cost
  double learning_exponent = 0.0;
  double x0 = 1.0;

  void validate() const;
};

/// Logistic adoption schedule K / (1 + exp(-r (t - t0))), t in quarters.
struct AdoptionCurve {
  double saturation = 1.0;
  double rate = 1.0;
  double midpoint = 0.0;

  void validate() const;
};

class TechError : public Error {
 public:
  enum class Kind { NonpositiveCumulative, TargetOutOfRange, DegenerateHorizon, InvalidCurve };
  TechError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

double wright_cost(const TechCurve& curve, double cumulative);

/// Solves for the learning exponent that puts the curve through
/// (x_target, cost_target). The exponent field of `curve` is ignored.
double calibrate_exponent(const TechCurve& curve, double x_target, double cost_target);

double logistic_level(const AdoptionCurve& curve, double t);

/// Technology state; current_cost is kept equal to wright_cost(curve, cumulative).
class TechState {
 public:
  TechState() = default;
  TechState(TechCurve curve, double cumulative);

  const TechCurve& curve() const { return curve_; }
  double cumulative() const { return cumulative_; }
  double current_cost() const { return current_cost_; }

  /// Adds non-negative deployment and recomputes the cost.
  TechState advanced(double new_deployment) const;

 private:
  TechCurve curve_;
  double cumulative_ = 1.0;
  double current_cost_ = 1.0;
};

TechState advance_tech(const TechState& state, double new_deployment);

/// A technology as configured for a run: its learning state, an optional
/// S-curve schedule that forces deployment, and how much of the green
/// sector's realised sales count as deployment of this technology.
struct Technology {
  TechState state;
  std::optional<AdoptionCurve> adoption;
  double purchase_share = 0.0;
  double initial_cost = 1.0;

  double cost_index() const { return state.current_cost() / initial_cost; }
};

/// Deployment for quarter t: max(S-curve increment over [t, t+1], realised
/// purchases converted at the current cost).
double quarterly_deployment(const Technology& tech, int t, double realised_units);

}  // namespace decarb
