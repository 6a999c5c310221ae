#include "ilab/train.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace ilab {

namespace {

constexpr std::size_t kBlockSize = 8;  // fixed so reductions do not depend on thread count

struct AdagradState {
    ModelGrads acc;

    explicit AdagradState(const EncoderDecoderModel& m) : acc(ModelGrads::zero(m)) {}

    static void update_one(Eigen::MatrixXd& param, Eigen::MatrixXd& acc,
                           const Eigen::MatrixXd& grad, double lr, double eps) {
        acc.array() += grad.array().square();
        param.array() -= lr * grad.array() / (acc.array().sqrt() + eps);
    }
    static void update_one(Eigen::VectorXd& param, Eigen::VectorXd& acc,
                           const Eigen::VectorXd& grad, double lr, double eps) {
        acc.array() += grad.array().square();
        param.array() -= lr * grad.array() / (acc.array().sqrt() + eps);
    }

    void apply(EncoderDecoderModel& m, const ModelGrads& g, double lr, double eps) {
        update_one(m.encoder.w_x, acc.enc_wx, g.enc_wx, lr, eps);
        update_one(m.encoder.w_h, acc.enc_wh, g.enc_wh, lr, eps);
        update_one(m.encoder.b, acc.enc_b, g.enc_b, lr, eps);
        update_one(m.decoder.w_x, acc.dec_wx, g.dec_wx, lr, eps);
        update_one(m.decoder.w_h, acc.dec_wh, g.dec_wh, lr, eps);
        update_one(m.decoder.b, acc.dec_b, g.dec_b, lr, eps);
        update_one(m.w_out, acc.w_out, g.w_out, lr, eps);
        update_one(m.b_out, acc.b_out, g.b_out, lr, eps);
        update_one(m.w_cls, acc.w_cls, g.w_cls, lr, eps);
        update_one(m.b_cls, acc.b_cls, g.b_cls, lr, eps);
    }
};

struct ModelSnapshot {
    RecurrentCellParams encoder, decoder;
    Eigen::MatrixXd w_out, w_cls;
    Eigen::VectorXd b_out, b_cls;

    static ModelSnapshot take(const EncoderDecoderModel& m) {
        return {m.encoder, m.decoder, m.w_out, m.w_cls, m.b_out, m.b_cls};
    }
    void restore(EncoderDecoderModel& m) const {
        m.encoder = encoder;
        m.decoder = decoder;
        m.w_out = w_out;
        m.w_cls = w_cls;
        m.b_out = b_out;
        m.b_cls = b_cls;
    }
};

std::vector<std::vector<std::size_t>> split_blocks(const std::vector<std::size_t>& idx) {
    std::vector<std::vector<std::size_t>> blocks;
    for (std::size_t start = 0; start < idx.size(); start += kBlockSize) {
        const std::size_t end = std::min(start + kBlockSize, idx.size());
        blocks.emplace_back(idx.begin() + static_cast<std::ptrdiff_t>(start),
                            idx.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return blocks;
}

/// Run fn(block_index) over all blocks with a work-stealing counter. Outputs
/// are written per block, so the result is independent of scheduling.
void parallel_blocks(std::size_t n_blocks, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n_blocks <= 1) {
        for (std::size_t i = 0; i < n_blocks; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_blocks) break;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(threads, static_cast<int>(n_blocks));
    pool.reserve(static_cast<std::size_t>(n - 1));
    for (int t = 0; t < n - 1; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

}  // namespace

double evaluate_mse(const EncoderDecoderModel& model, const std::vector<TrajectorySample>& part,
                    double* class_acc) {
    if (part.empty()) throw std::invalid_argument("evaluate_mse: empty partition");
    std::vector<std::size_t> idx(part.size());
    std::iota(idx.begin(), idx.end(), 0);
    const auto blocks = split_blocks(idx);
    double se = 0.0;
    std::size_t n_out = 0;
    std::size_t correct = 0;
    for (const auto& block : blocks) {
        Batch batch = make_batch(part, block, model.n_history, model.horizon);
        InferenceResult res = forward(model, batch.features, model.horizon, &batch.labels);
        se += (res.outputs - batch.labels).array().square().sum();
        n_out += static_cast<std::size_t>(res.outputs.size());
        if (model.uses_classifier() && class_acc) {
            for (int b = 0; b < batch.size(); ++b) {
                int arg = 0;
                res.class_probs.col(b).maxCoeff(&arg);
                if (arg == batch.classes[static_cast<std::size_t>(b)]) ++correct;
            }
        }
    }
    if (class_acc) {
        *class_acc = model.uses_classifier()
                         ? static_cast<double>(correct) / static_cast<double>(part.size())
                         : -1.0;
    }
    return se / static_cast<double>(n_out);
}

TrainResult train(EncoderDecoderModel& model, const Dataset& ds, const TrainConfig& cfg) {
    if (ds.train.empty() || ds.val.empty()) {
        throw std::invalid_argument("train: empty train or validation partition");
    }
    if (cfg.lr < 0.0) throw std::invalid_argument("train: negative learning rate");
    model.beta = cfg.beta;

    const int threads = cfg.threads > 0
                            ? cfg.threads
                            : std::max(1u, std::thread::hardware_concurrency());
    Rng rng(cfg.seed);
    AdagradState opt(model);
    TrainResult result;
    double best_val = std::numeric_limits<double>::infinity();
    ModelSnapshot best = ModelSnapshot::take(model);
    result.best_epoch = -1;

    std::vector<std::size_t> order(ds.train.size());
    std::iota(order.begin(), order.end(), 0);

    std::uint64_t mask_counter = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_se_proxy = 0.0;  // sum of per-batch mse * batch size
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            std::vector<std::size_t> batch_idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                               order.begin() + static_cast<std::ptrdiff_t>(end));
            const auto blocks = split_blocks(batch_idx);

            // Per-block masks are drawn from split streams up front so the
            // draw order does not depend on scheduling.
            std::vector<Rng> block_rngs;
            block_rngs.reserve(blocks.size());
            for (std::size_t i = 0; i < blocks.size(); ++i) {
                block_rngs.push_back(rng.split(mask_counter++));
            }

            std::vector<ModelGrads> block_grads(blocks.size(), ModelGrads::zero(model));
            std::vector<double> block_mse(blocks.size(), 0.0);
            parallel_blocks(blocks.size(), threads, [&](std::size_t i) {
                Batch batch = make_batch(ds.train, blocks[i], model.n_history, model.horizon);
                DropoutMasks masks = draw_masks(model, batch.size(), block_rngs[i]);
                double loss = 0.0, mse = 0.0;
                ModelGrads g = backward(model, batch, &masks, &loss, &mse);
                // backward() averages over its batch; convert back to a sum
                // so blocks of different sizes combine exactly.
                g.scale(static_cast<double>(batch.size()));
                block_grads[i] = std::move(g);
                block_mse[i] = mse * batch.size();
            });

            ModelGrads total = ModelGrads::zero(model);
            double batch_se = 0.0;
            for (std::size_t i = 0; i < blocks.size(); ++i) {
                total.add(block_grads[i]);
                batch_se += block_mse[i];
            }
            const double bsz = static_cast<double>(batch_idx.size());
            total.scale(1.0 / bsz);
            epoch_se_proxy += batch_se;
            seen += batch_idx.size();

            if (!std::isfinite(batch_se)) {
                throw std::runtime_error("train: loss diverged (NaN/inf) at epoch " +
                                         std::to_string(epoch));
            }
            if (cfg.lr > 0.0) opt.apply(model, total, cfg.lr, cfg.adagrad_eps);
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_mse = epoch_se_proxy / static_cast<double>(seen);
        double acc = -1.0;
        stats.val_mse = evaluate_mse(model, ds.val, &acc);
        stats.val_class_acc = acc;
        result.epochs.push_back(stats);
        if (cfg.verbose) {
            std::fprintf(stderr, "epoch %3d  train %.5f  val %.5f", epoch, stats.train_mse,
                         stats.val_mse);
            if (acc >= 0.0) std::fprintf(stderr, "  acc %.3f", acc);
            std::fprintf(stderr, "\n");
        }
        if (stats.val_mse < best_val) {
            best_val = stats.val_mse;
            best = ModelSnapshot::take(model);
            result.best_epoch = epoch;
        }
    }

    if (result.best_epoch >= 0) best.restore(model);
    return result;
}

void write_loss_csv(const TrainResult& result, const std::string& path, bool with_class_acc) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_loss_csv: cannot write " + path);
    std::fprintf(f, with_class_acc ? "epoch,train_mse,val_mse,val_class_acc\n"
                                   : "epoch,train_mse,val_mse\n");
    for (const auto& e : result.epochs) {
        if (with_class_acc) {
            std::fprintf(f, "%d,%.17g,%.17g,%.17g\n", e.epoch, e.train_mse, e.val_mse,
                         e.val_class_acc);
        } else {
            std::fprintf(f, "%d,%.17g,%.17g\n", e.epoch, e.train_mse, e.val_mse);
        }
    }
    std::fclose(f);
}

}  // namespace ilab
