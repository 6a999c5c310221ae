#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ilab/dataset.hpp"
#include "ilab/rng.hpp"

namespace ilab {

enum class CellKind : std::uint8_t { SimpleRNN = 0, LSTM = 1 };
enum class ArchKind : std::uint8_t { SimpleRNN = 0, LSTM = 1, MLSTM = 2 };
enum class SizePreset : std::uint8_t { Small = 0, Medium = 1, Large = 2 };

int preset_width(SizePreset p);
const char* arch_name(ArchKind a);
ArchKind parse_arch(const std::string& s);
SizePreset parse_preset(const std::string& s);

/// Weights of one recurrent cell. LSTM packs the four gates row-wise in the
/// order [input; forget; candidate; output], so w_x is (4H x in).
struct RecurrentCellParams {
    CellKind kind = CellKind::LSTM;
    int input_dim = 0;
    int hidden_dim = 0;
    Eigen::MatrixXd w_x;
    Eigen::MatrixXd w_h;
    Eigen::VectorXd b;
};

struct CellState {
    Eigen::VectorXd h;
    Eigen::VectorXd c;  // empty for SimpleRNN
};

/// Fresh cell with fan-in-scaled uniform init (forget-gate bias 1 for LSTM).
RecurrentCellParams make_cell(CellKind kind, int input_dim, int hidden_dim, Rng& rng);

/// Single-step cell update (vector form).
CellState cell_forward(const RecurrentCellParams& p, const Eigen::VectorXd& x,
                       const CellState& state);

/// Encoder-decoder network mapping an observation window to a horizon of
/// normalized lateral accelerations. The classifier head exists on every
/// model but is wired into the decoder input only for the MLSTM arch.
struct EncoderDecoderModel {
    ArchKind arch = ArchKind::LSTM;
    SizePreset preset = SizePreset::Large;
    int hidden_dim = 0;
    int n_history = 0;
    int horizon = 0;
    int n_classes = kManeuverKinds;
    double dt = 0.02;
    double a_max = 8.0 * kGravity;
    double beta = 0.2;  // classification-loss weight (MLSTM)
    double dropout_recurrent = 0.20;
    double dropout_dense = 0.10;
    RecurrentCellParams encoder;
    RecurrentCellParams decoder;
    Eigen::MatrixXd w_out;  // 1 x H
    Eigen::VectorXd b_out;  // 1
    Eigen::MatrixXd w_cls;  // n_classes x H
    Eigen::VectorXd b_cls;  // n_classes
    ScalerParams scaler;

    int decoder_input_dim() const { return arch == ArchKind::MLSTM ? 1 + n_classes : 1; }
    bool uses_classifier() const { return arch == ArchKind::MLSTM; }
};

/// Fresh model with fan-in-scaled uniform init and forget-gate bias 1.
EncoderDecoderModel make_model(ArchKind arch, SizePreset preset, int n_history, int horizon,
                               double dt, double a_max, const ScalerParams& scaler, Rng& rng);

/// A column-per-sample minibatch.
struct Batch {
    std::vector<Eigen::MatrixXd> features;  // n_history entries of (4 x B), scaled
    Eigen::MatrixXd labels;                 // horizon x B, scaled
    std::vector<int> classes;               // B maneuver labels

    int size() const { return static_cast<int>(classes.size()); }
};

Batch make_batch(const std::vector<TrajectorySample>& part, const std::vector<std::size_t>& idx,
                 int n_history, int horizon);

/// Inverted-dropout masks, fixed for one forward/backward pass.
struct DropoutMasks {
    Eigen::MatrixXd enc_in;     // 4 x B
    Eigen::MatrixXd dec_in;     // dec_input_dim x B
    Eigen::MatrixXd dense_out;  // H x B
    Eigen::MatrixXd dense_cls;  // H x B
};

DropoutMasks draw_masks(const EncoderDecoderModel& m, int batch, Rng& rng);

struct InferenceResult {
    Eigen::MatrixXd outputs;      // decode_steps x B, normalized accelerations
    Eigen::MatrixXd class_probs;  // n_classes x B (MLSTM; empty otherwise)
};

/// Forward pass. teacher nullptr -> autoregressive decoding; otherwise the
/// decoder is fed teacher->row(j-1) at step j. masks nullptr -> no dropout.
InferenceResult forward(const EncoderDecoderModel& m, const std::vector<Eigen::MatrixXd>& features,
                        int decode_steps, const Eigen::MatrixXd* teacher = nullptr,
                        const DropoutMasks* masks = nullptr);

/// Mean squared error over all entries (normalized scale).
double mse_loss(const Eigen::MatrixXd& outputs, const Eigen::MatrixXd& labels);

/// Mean negative log-likelihood of the true classes.
double cross_entropy(const Eigen::MatrixXd& probs, const std::vector<int>& classes);

/// Teacher-forced training loss of one batch: MSE (+ beta * CE for MLSTM).
double loss_value(const EncoderDecoderModel& m, const Batch& batch,
                  const DropoutMasks* masks = nullptr);

struct ModelGrads {
    Eigen::MatrixXd enc_wx, enc_wh;
    Eigen::VectorXd enc_b;
    Eigen::MatrixXd dec_wx, dec_wh;
    Eigen::VectorXd dec_b;
    Eigen::MatrixXd w_out;
    Eigen::VectorXd b_out;
    Eigen::MatrixXd w_cls;
    Eigen::VectorXd b_cls;

    static ModelGrads zero(const EncoderDecoderModel& m);
    void add(const ModelGrads& other);
    void scale(double s);
};

/// Analytic gradients of loss_value (same batch, same masks), exact BPTT.
/// loss_out receives the total loss, mse_out its MSE component.
ModelGrads backward(const EncoderDecoderModel& m, const Batch& batch,
                    const DropoutMasks* masks = nullptr, double* loss_out = nullptr,
                    double* mse_out = nullptr);

void save_model(const EncoderDecoderModel& m, const std::string& path);
EncoderDecoderModel load_model(const std::string& path);

}  // namespace ilab
