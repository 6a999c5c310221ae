#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ilab/rnn.hpp"

namespace ilab {

struct TrainConfig {
    double lr = 0.08;
    double adagrad_eps = 1e-8;
    int batch_size = 64;
    int epochs = 40;
    double beta = 0.2;  // classification-loss weight, MLSTM only
    std::uint64_t seed = 1;
    int threads = 0;  // 0 -> hardware concurrency
    bool verbose = false;
};

struct EpochStats {
    int epoch = 0;
    double train_mse = 0.0;       // teacher-forced, dropout active
    double val_mse = 0.0;         // deterministic, teacher-forced
    double val_class_acc = -1.0;  // MLSTM only, else -1
};

struct TrainResult {
    std::vector<EpochStats> epochs;
    int best_epoch = -1;  // epoch whose weights were retained
};

/// Adagrad training with teacher forcing. The model is left at the weights of
/// the best validation epoch. Throws std::runtime_error on divergence (NaN).
TrainResult train(EncoderDecoderModel& model, const Dataset& ds, const TrainConfig& cfg);

/// Teacher-forced MSE (and optionally classification accuracy) on a partition.
double evaluate_mse(const EncoderDecoderModel& model, const std::vector<TrajectorySample>& part,
                    double* class_acc = nullptr);

void write_loss_csv(const TrainResult& result, const std::string& path, bool with_class_acc);

}  // namespace ilab
