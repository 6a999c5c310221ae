#pragma once

#include <array>
#include <vector>

#include "ilab/engagement.hpp"
#include "ilab/rnn.hpp"

namespace ilab {

/// One raw (unscaled) observed feature row [x, y, vx, vy] of the target.
using FeatureRow = std::array<double, kFeatureDim>;

/// Predicted scalar lateral accelerations (m/s^2) for the next n_p steps.
/// raw_history must hold exactly model.n_history rows; n_p <= model.horizon.
std::vector<double> predict_accel(const EncoderDecoderModel& model,
                                  const std::vector<FeatureRow>& raw_history, int n_p);

/// Full horizon forecast in LOS components: unscale the network output,
/// propagate the target heading with theta(j+1) = theta(j) + dt*a(j)/v_t and
/// resolve each a(j) against the nominal LOS angle lambda_seq[j].
std::vector<PolarTargetAccel> predict_polar(const EncoderDecoderModel& model,
                                            const std::vector<FeatureRow>& raw_history,
                                            const std::vector<double>& lambda_seq,
                                            double theta_t0, double v_t, int n_p);

}  // namespace ilab
