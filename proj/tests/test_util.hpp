#pragma once

// Shared helpers for the unit and acceptance suites.

#include <fstream>
#include <string>
#include <vector>

#include "ilab/rnn.hpp"

namespace testutil {

/// Tiny model with an arbitrary hidden width (the library presets start at 32).
inline ilab::EncoderDecoderModel probe_model(ilab::ArchKind arch, int hidden, int n_history,
                                             int horizon, ilab::Rng& rng) {
    ilab::EncoderDecoderModel m;
    m.arch = arch;
    m.preset = ilab::SizePreset::Small;
    m.hidden_dim = hidden;
    m.n_history = n_history;
    m.horizon = horizon;
    const ilab::CellKind cell =
        arch == ilab::ArchKind::SimpleRNN ? ilab::CellKind::SimpleRNN : ilab::CellKind::LSTM;
    m.encoder = ilab::make_cell(cell, ilab::kFeatureDim, hidden, rng);
    m.decoder = ilab::make_cell(cell, m.decoder_input_dim(), hidden, rng);
    m.w_out.resize(1, hidden);
    m.w_cls.resize(m.n_classes, hidden);
    for (int j = 0; j < hidden; ++j) m.w_out(0, j) = rng.uniform(-0.5, 0.5);
    for (int i = 0; i < m.n_classes; ++i)
        for (int j = 0; j < hidden; ++j) m.w_cls(i, j) = rng.uniform(-0.5, 0.5);
    m.b_out = Eigen::VectorXd::Zero(1);
    m.b_cls = Eigen::VectorXd::Zero(m.n_classes);
    m.scaler.fmin = {0.0, 0.0, 0.0, 0.0};
    m.scaler.fmax = {1.0, 1.0, 1.0, 1.0};
    return m;
}

/// Random teacher-forcing batch with features/labels in [0, 1].
inline ilab::Batch random_batch(int n_history, int horizon, int b, ilab::Rng& rng) {
    ilab::Batch batch;
    batch.features.assign(static_cast<std::size_t>(n_history),
                          Eigen::MatrixXd(ilab::kFeatureDim, b));
    batch.labels.resize(horizon, b);
    batch.classes.resize(static_cast<std::size_t>(b));
    for (auto& x : batch.features) {
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform();
    }
    for (int i = 0; i < horizon; ++i)
        for (int j = 0; j < b; ++j) batch.labels(i, j) = rng.uniform();
    for (auto& c : batch.classes) c = static_cast<int>(rng.uniform_int(ilab::kManeuverKinds));
    return batch;
}

/// Pointers to every parameter entry and the matching gradient entry.
struct ParamView {
    std::vector<double*> param;
    std::vector<double*> grad;
};

inline void collect(Eigen::MatrixXd& p, Eigen::MatrixXd& g, ParamView& view) {
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        view.param.push_back(p.data() + i);
        view.grad.push_back(g.data() + i);
    }
}
inline void collect(Eigen::VectorXd& p, Eigen::VectorXd& g, ParamView& view) {
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        view.param.push_back(p.data() + i);
        view.grad.push_back(g.data() + i);
    }
}

inline ParamView param_view(ilab::EncoderDecoderModel& m, ilab::ModelGrads& g) {
    ParamView v;
    collect(m.encoder.w_x, g.enc_wx, v);
    collect(m.encoder.w_h, g.enc_wh, v);
    collect(m.encoder.b, g.enc_b, v);
    collect(m.decoder.w_x, g.dec_wx, v);
    collect(m.decoder.w_h, g.dec_wh, v);
    collect(m.decoder.b, g.dec_b, v);
    collect(m.w_out, g.w_out, v);
    collect(m.b_out, g.b_out, v);
    collect(m.w_cls, g.w_cls, v);
    collect(m.b_cls, g.b_cls, v);
    return v;
}

/// Central finite-difference check; returns the worst relative error.
inline double gradient_check(ilab::EncoderDecoderModel& m, const ilab::Batch& batch,
                             const ilab::DropoutMasks* masks, double h = 1e-5) {
    ilab::ModelGrads g = ilab::backward(m, batch, masks);
    ParamView v = param_view(m, g);
    double worst = 0.0;
    for (std::size_t i = 0; i < v.param.size(); ++i) {
        double* p = v.param[i];
        const double saved = *p;
        *p = saved + h;
        const double lp = ilab::loss_value(m, batch, masks);
        *p = saved - h;
        const double lm = ilab::loss_value(m, batch, masks);
        *p = saved;
        const double fd = (lp - lm) / (2.0 * h);
        const double an = *v.grad[i];
        const double denom = std::max({1e-6, std::abs(fd), std::abs(an)});
        worst = std::max(worst, std::abs(fd - an) / denom);
    }
    return worst;
}

inline std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

}  // namespace testutil
