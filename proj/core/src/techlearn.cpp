#include "decarb/techlearn.hpp"

#include <cmath>

namespace decarb {

void TechCurve::validate() const {
  if (!(floor >= 0.0) || !(c0 > floor)) {
    throw TechError(TechError::Kind::InvalidCurve, "tech curve '" + name + "': require c0 > floor >= 0");
  }
  if (!(x0 > 0.0)) throw TechError(TechError::Kind::InvalidCurve, "tech curve '" + name + "': x0 must be > 0");
  if (!(learning_exponent >= 0.0)) {
    throw TechError(TechError::Kind::InvalidCurve, "tech curve '" + name + "': learning exponent must be >= 0");
  }
}

void AdoptionCurve::validate() const {
  if (!(saturation > 0.0) || !(rate > 0.0)) {
    throw TechError(TechError::Kind::InvalidCurve, "adoption curve: require k > 0 and r > 0");
  }
}

double wright_cost(const TechCurve& curve, double cumulative) {
  if (!(cumulative > 0.0)) {
    throw TechError(TechError::Kind::NonpositiveCumulative, "wright_cost: cumulative deployment must be > 0");
  }
  if (curve.learning_exponent == 0.0 || cumulative == curve.x0) return curve.c0;
  return curve.floor + (curve.c0 - curve.floor) * std::pow(cumulative / curve.x0, -curve.learning_exponent);
}

double calibrate_exponent(const TechCurve& curve, double x_target, double cost_target) {
  if (!(cost_target > curve.floor) || !(cost_target < curve.c0)) {
    throw TechError(TechError::Kind::TargetOutOfRange, "calibrate_exponent: target cost must lie strictly between floor and c0");
  }
  if (x_target == curve.x0) {
    throw TechError(TechError::Kind::DegenerateHorizon, "calibrate_exponent: target deployment equals x0");
  }
  if (!(x_target > curve.x0)) {
    throw TechError(TechError::Kind::DegenerateHorizon, "calibrate_exponent: target deployment must exceed x0");
  }
  return std::log((curve.c0 - curve.floor) / (cost_target - curve.floor)) / std::log(x_target / curve.x0);
}

double logistic_level(const AdoptionCurve& curve, double t) {
  return curve.saturation / (1.0 + std::exp(-curve.rate * (t - curve.midpoint)));
}

TechState::TechState(TechCurve curve, double cumulative)
    : curve_(std::move(curve)), cumulative_(cumulative), current_cost_(wright_cost(curve_, cumulative)) {}

TechState TechState::advanced(double new_deployment) const {
  if (!(new_deployment >= 0.0)) throw std::invalid_argument("advance_tech: deployment must be >= 0");
  if (new_deployment == 0.0) return *this;
  return TechState(curve_, cumulative_ + new_deployment);
}

TechState advance_tech(const TechState& state, double new_deployment) { return state.advanced(new_deployment); }

double quarterly_deployment(const Technology& tech, int t, double realised_units) {
  double scheduled = 0.0;
  if (tech.adoption) {
    scheduled = logistic_level(*tech.adoption, t + 1) - logistic_level(*tech.adoption, t);
  }
  return std::max(scheduled, std::max(realised_units, 0.0));
}

}  // namespace decarb
