#include "ilab/predict.hpp"

#include <stdexcept>

namespace ilab {

std::vector<double> predict_accel(const EncoderDecoderModel& model,
                                  const std::vector<FeatureRow>& raw_history, int n_p) {
    if (static_cast<int>(raw_history.size()) != model.n_history) {
        throw std::invalid_argument("predict_accel: history length != model n_history");
    }
    if (n_p < 1 || n_p > model.horizon) {
        throw std::invalid_argument("predict_accel: horizon exceeds trained model horizon");
    }
    std::vector<Eigen::MatrixXd> features(raw_history.size(), Eigen::MatrixXd(kFeatureDim, 1));
    for (std::size_t t = 0; t < raw_history.size(); ++t) {
        for (int f = 0; f < kFeatureDim; ++f) {
            features[t](f, 0) = model.scaler.scale(raw_history[t][static_cast<std::size_t>(f)], f);
        }
    }
    InferenceResult res = forward(model, features, n_p);
    std::vector<double> accel(static_cast<std::size_t>(n_p));
    for (int j = 0; j < n_p; ++j) {
        accel[static_cast<std::size_t>(j)] = unscale_accel(res.outputs(j, 0), model.a_max);
    }
    return accel;
}

std::vector<PolarTargetAccel> predict_polar(const EncoderDecoderModel& model,
                                            const std::vector<FeatureRow>& raw_history,
                                            const std::vector<double>& lambda_seq,
                                            double theta_t0, double v_t, int n_p) {
    if (static_cast<int>(lambda_seq.size()) < n_p) {
        throw std::invalid_argument("predict_polar: lambda forecast shorter than horizon");
    }
    const std::vector<double> accel = predict_accel(model, raw_history, n_p);
    std::vector<PolarTargetAccel> w(static_cast<std::size_t>(n_p));
    double theta = theta_t0;
    for (int j = 0; j < n_p; ++j) {
        w[static_cast<std::size_t>(j)] =
            target_accel_polar(accel[static_cast<std::size_t>(j)], theta,
                               lambda_seq[static_cast<std::size_t>(j)]);
        theta = wrap_angle(theta + model.dt * accel[static_cast<std::size_t>(j)] / v_t);
    }
    return w;
}

}  // namespace ilab
