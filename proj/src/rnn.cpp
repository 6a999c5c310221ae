#include "ilab/rnn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ilab {

int preset_width(SizePreset p) {
    switch (p) {
        case SizePreset::Small: return 32;
        case SizePreset::Medium: return 64;
        case SizePreset::Large: return 128;
    }
    return 32;
}

const char* arch_name(ArchKind a) {
    switch (a) {
        case ArchKind::SimpleRNN: return "rnn";
        case ArchKind::LSTM: return "lstm";
        case ArchKind::MLSTM: return "mlstm";
    }
    return "?";
}

ArchKind parse_arch(const std::string& s) {
    if (s == "rnn") return ArchKind::SimpleRNN;
    if (s == "lstm") return ArchKind::LSTM;
    if (s == "mlstm") return ArchKind::MLSTM;
    throw std::invalid_argument("unknown arch: " + s);
}

SizePreset parse_preset(const std::string& s) {
    if (s == "small") return SizePreset::Small;
    if (s == "medium") return SizePreset::Medium;
    if (s == "large") return SizePreset::Large;
    throw std::invalid_argument("unknown size preset: " + s);
}

namespace {

inline Eigen::ArrayXXd sigmoid(const Eigen::ArrayXXd& z) { return 1.0 / (1.0 + (-z).exp()); }

}  // namespace

RecurrentCellParams make_cell(CellKind kind, int input_dim, int hidden_dim, Rng& rng) {
    RecurrentCellParams p;
    p.kind = kind;
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    const int rows = kind == CellKind::LSTM ? 4 * hidden_dim : hidden_dim;
    const double sx = 1.0 / std::sqrt(static_cast<double>(input_dim));
    const double sh = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    p.w_x.resize(rows, input_dim);
    p.w_h.resize(rows, hidden_dim);
    p.b = Eigen::VectorXd::Zero(rows);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < input_dim; ++j) p.w_x(i, j) = rng.uniform(-sx, sx);
        for (int j = 0; j < hidden_dim; ++j) p.w_h(i, j) = rng.uniform(-sh, sh);
    }
    if (kind == CellKind::LSTM) {
        p.b.segment(hidden_dim, hidden_dim).setOnes();  // forget gate opens initially
    }
    return p;
}

namespace {

// Batched single cell step; gate matrices are returned through the cache.
struct StepCache {
    Eigen::MatrixXd x;       // post-dropout input
    Eigen::MatrixXd h_prev;
    Eigen::MatrixXd c_prev;  // LSTM
    Eigen::MatrixXd i, f, g, o, c, tanh_c;
    Eigen::MatrixXd h;
};

void cell_step(const RecurrentCellParams& p, const Eigen::MatrixXd& x,
               const Eigen::MatrixXd& h_prev, const Eigen::MatrixXd& c_prev, StepCache& cache) {
    const int H = p.hidden_dim;
    cache.x = x;
    cache.h_prev = h_prev;
    if (p.kind == CellKind::SimpleRNN) {
        Eigen::MatrixXd z = p.w_x * x + p.w_h * h_prev;
        z.colwise() += p.b;
        cache.h = z.array().tanh().matrix();
        return;
    }
    cache.c_prev = c_prev;
    Eigen::MatrixXd z = p.w_x * x + p.w_h * h_prev;
    z.colwise() += p.b;
    cache.i = sigmoid(z.topRows(H).array()).matrix();
    cache.f = sigmoid(z.middleRows(H, H).array()).matrix();
    cache.g = z.middleRows(2 * H, H).array().tanh().matrix();
    cache.o = sigmoid(z.bottomRows(H).array()).matrix();
    cache.c = cache.f.cwiseProduct(c_prev) + cache.i.cwiseProduct(cache.g);
    cache.tanh_c = cache.c.array().tanh().matrix();
    cache.h = cache.o.cwiseProduct(cache.tanh_c);
}

/// Backward of one cell step. dh/dc are the incoming gradients and are
/// replaced by the gradients w.r.t. the previous step; dx receives the
/// gradient w.r.t. the cell input.
void cell_step_backward(const RecurrentCellParams& p, const StepCache& cache, Eigen::MatrixXd& dh,
                        Eigen::MatrixXd& dc, Eigen::MatrixXd& dx, Eigen::MatrixXd& dwx,
                        Eigen::MatrixXd& dwh, Eigen::VectorXd& db) {
    if (p.kind == CellKind::SimpleRNN) {
        Eigen::MatrixXd dz = dh.cwiseProduct((1.0 - cache.h.array().square()).matrix());
        dwx.noalias() += dz * cache.x.transpose();
        dwh.noalias() += dz * cache.h_prev.transpose();
        db += dz.rowwise().sum();
        dx.noalias() = p.w_x.transpose() * dz;
        dh.noalias() = p.w_h.transpose() * dz;
        return;
    }
    const int H = p.hidden_dim;
    Eigen::MatrixXd do_ = dh.cwiseProduct(cache.tanh_c);
    Eigen::MatrixXd dct = dc + dh.cwiseProduct(cache.o)
                                   .cwiseProduct((1.0 - cache.tanh_c.array().square()).matrix());
    Eigen::MatrixXd di = dct.cwiseProduct(cache.g);
    Eigen::MatrixXd df = dct.cwiseProduct(cache.c_prev);
    Eigen::MatrixXd dg = dct.cwiseProduct(cache.i);

    Eigen::MatrixXd dz(4 * H, dh.cols());
    dz.topRows(H) = di.cwiseProduct(cache.i).cwiseProduct((1.0 - cache.i.array()).matrix());
    dz.middleRows(H, H) =
        df.cwiseProduct(cache.f).cwiseProduct((1.0 - cache.f.array()).matrix());
    dz.middleRows(2 * H, H) = dg.cwiseProduct((1.0 - cache.g.array().square()).matrix());
    dz.bottomRows(H) =
        do_.cwiseProduct(cache.o).cwiseProduct((1.0 - cache.o.array()).matrix());

    dwx.noalias() += dz * cache.x.transpose();
    dwh.noalias() += dz * cache.h_prev.transpose();
    db += dz.rowwise().sum();
    dx.noalias() = p.w_x.transpose() * dz;
    dh.noalias() = p.w_h.transpose() * dz;
    dc = dct.cwiseProduct(cache.f);
}

}  // namespace

CellState cell_forward(const RecurrentCellParams& p, const Eigen::VectorXd& x,
                       const CellState& state) {
    if (x.size() != p.input_dim || state.h.size() != p.hidden_dim) {
        throw std::invalid_argument("cell_forward: dimension mismatch");
    }
    if (p.kind == CellKind::LSTM && state.c.size() != p.hidden_dim) {
        throw std::invalid_argument("cell_forward: missing cell state");
    }
    StepCache cache;
    cell_step(p, x, state.h, p.kind == CellKind::LSTM ? Eigen::MatrixXd(state.c)
                                                      : Eigen::MatrixXd(),
              cache);
    CellState out;
    out.h = cache.h.col(0);
    if (p.kind == CellKind::LSTM) out.c = cache.c.col(0);
    return out;
}

EncoderDecoderModel make_model(ArchKind arch, SizePreset preset, int n_history, int horizon,
                               double dt, double a_max, const ScalerParams& scaler, Rng& rng) {
    EncoderDecoderModel m;
    m.arch = arch;
    m.preset = preset;
    m.hidden_dim = preset_width(preset);
    m.n_history = n_history;
    m.horizon = horizon;
    m.dt = dt;
    m.a_max = a_max;
    m.scaler = scaler;
    const CellKind cell = arch == ArchKind::SimpleRNN ? CellKind::SimpleRNN : CellKind::LSTM;
    m.encoder = make_cell(cell, kFeatureDim, m.hidden_dim, rng);
    m.decoder = make_cell(cell, m.decoder_input_dim(), m.hidden_dim, rng);
    const double so = 1.0 / std::sqrt(static_cast<double>(m.hidden_dim));
    m.w_out.resize(1, m.hidden_dim);
    for (int j = 0; j < m.hidden_dim; ++j) m.w_out(0, j) = rng.uniform(-so, so);
    m.b_out = Eigen::VectorXd::Zero(1);
    m.w_cls.resize(m.n_classes, m.hidden_dim);
    for (int i = 0; i < m.n_classes; ++i)
        for (int j = 0; j < m.hidden_dim; ++j) m.w_cls(i, j) = rng.uniform(-so, so);
    m.b_cls = Eigen::VectorXd::Zero(m.n_classes);
    return m;
}

Batch make_batch(const std::vector<TrajectorySample>& part, const std::vector<std::size_t>& idx,
                 int n_history, int horizon) {
    Batch batch;
    const int B = static_cast<int>(idx.size());
    batch.features.assign(n_history, Eigen::MatrixXd(kFeatureDim, B));
    batch.labels.resize(horizon, B);
    batch.classes.resize(B);
    for (int b = 0; b < B; ++b) {
        const TrajectorySample& s = part[idx[static_cast<std::size_t>(b)]];
        for (int t = 0; t < n_history; ++t) {
            for (int f = 0; f < kFeatureDim; ++f) {
                batch.features[static_cast<std::size_t>(t)](f, b) =
                    s.history[static_cast<std::size_t>(t * kFeatureDim + f)];
            }
        }
        for (int j = 0; j < horizon; ++j) batch.labels(j, b) = s.future_accel[static_cast<std::size_t>(j)];
        batch.classes[static_cast<std::size_t>(b)] = static_cast<int>(s.maneuver_label);
    }
    return batch;
}

DropoutMasks draw_masks(const EncoderDecoderModel& m, int batch, Rng& rng) {
    auto draw = [&](int rows, int cols, double rate) {
        Eigen::MatrixXd mask(rows, cols);
        const double keep = 1.0 - rate;
        for (int c = 0; c < cols; ++c) {
            for (int r = 0; r < rows; ++r) {
                mask(r, c) = rng.uniform() < keep ? 1.0 / keep : 0.0;
            }
        }
        return mask;
    };
    DropoutMasks masks;
    masks.enc_in = draw(kFeatureDim, batch, m.dropout_recurrent);
    masks.dec_in = draw(m.decoder_input_dim(), batch, m.dropout_recurrent);
    masks.dense_out = draw(m.hidden_dim, batch, m.dropout_dense);
    masks.dense_cls = draw(m.hidden_dim, batch, m.dropout_dense);
    return masks;
}

namespace {

Eigen::MatrixXd softmax_cols(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd p = logits;
    for (int c = 0; c < p.cols(); ++c) {
        const double mx = p.col(c).maxCoeff();
        p.col(c) = (p.col(c).array() - mx).exp();
        p.col(c) /= p.col(c).sum();
    }
    return p;
}

/// Full forward pass with every intermediate kept for BPTT.
struct PassCache {
    std::vector<StepCache> enc;  // n_history steps
    std::vector<StepCache> dec;  // decode_steps steps
    Eigen::MatrixXd cls_input;   // masked encoder latent
    Eigen::MatrixXd logits;
    Eigen::MatrixXd probs;
    std::vector<Eigen::MatrixXd> head_input;  // masked decoder hidden per step
    Eigen::MatrixXd outputs;                  // decode_steps x B
};

void run_forward(const EncoderDecoderModel& m, const std::vector<Eigen::MatrixXd>& features,
                 int decode_steps, const Eigen::MatrixXd* teacher, const DropoutMasks* masks,
                 PassCache& pc) {
    if (static_cast<int>(features.size()) != m.n_history) {
        throw std::invalid_argument("forward: window length != n_history");
    }
    if (decode_steps < 1 || decode_steps > m.horizon) {
        throw std::invalid_argument("forward: decode_steps out of range");
    }
    const int B = static_cast<int>(features.front().cols());
    const int H = m.hidden_dim;
    const bool lstm = m.encoder.kind == CellKind::LSTM;

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(H, B);
    Eigen::MatrixXd c = lstm ? Eigen::MatrixXd::Zero(H, B) : Eigen::MatrixXd();
    pc.enc.resize(static_cast<std::size_t>(m.n_history));
    for (int t = 0; t < m.n_history; ++t) {
        Eigen::MatrixXd x = features[static_cast<std::size_t>(t)];
        if (masks) x = x.cwiseProduct(masks->enc_in);
        auto& cache = pc.enc[static_cast<std::size_t>(t)];
        cell_step(m.encoder, x, h, c, cache);
        h = cache.h;
        if (lstm) c = cache.c;
    }

    if (m.uses_classifier()) {
        pc.cls_input = masks ? h.cwiseProduct(masks->dense_cls) : h;
        pc.logits = m.w_cls * pc.cls_input;
        pc.logits.colwise() += m.b_cls;
        pc.probs = softmax_cols(pc.logits);
    }

    pc.dec.resize(static_cast<std::size_t>(decode_steps));
    pc.head_input.resize(static_cast<std::size_t>(decode_steps));
    pc.outputs.resize(decode_steps, B);
    Eigen::RowVectorXd prev = Eigen::RowVectorXd::Constant(B, 0.5);  // normalized zero accel
    for (int j = 0; j < decode_steps; ++j) {
        Eigen::MatrixXd in(m.decoder_input_dim(), B);
        in.row(0) = j == 0 ? prev : (teacher ? Eigen::RowVectorXd(teacher->row(j - 1))
                                             : Eigen::RowVectorXd(pc.outputs.row(j - 1)));
        if (m.uses_classifier()) in.bottomRows(m.n_classes) = pc.probs;
        if (masks) in = in.cwiseProduct(masks->dec_in);
        auto& cache = pc.dec[static_cast<std::size_t>(j)];
        cell_step(m.decoder, in, h, c, cache);
        h = cache.h;
        if (lstm) c = cache.c;
        Eigen::MatrixXd& head_in = pc.head_input[static_cast<std::size_t>(j)];
        head_in = masks ? h.cwiseProduct(masks->dense_out) : h;
        pc.outputs.row(j) = (m.w_out * head_in).row(0);
        pc.outputs.row(j).array() += m.b_out(0);
    }
}

double batch_loss_from_cache(const EncoderDecoderModel& m, const Batch& batch,
                             const PassCache& pc) {
    double loss = mse_loss(pc.outputs, batch.labels);
    if (m.uses_classifier() && m.beta > 0.0) {
        loss += m.beta * cross_entropy(pc.probs, batch.classes);
    }
    return loss;
}

}  // namespace

InferenceResult forward(const EncoderDecoderModel& m, const std::vector<Eigen::MatrixXd>& features,
                        int decode_steps, const Eigen::MatrixXd* teacher,
                        const DropoutMasks* masks) {
    PassCache pc;
    run_forward(m, features, decode_steps, teacher, masks, pc);
    InferenceResult res;
    res.outputs = pc.outputs;
    res.class_probs = pc.probs;
    return res;
}

double mse_loss(const Eigen::MatrixXd& outputs, const Eigen::MatrixXd& labels) {
    if (outputs.rows() != labels.rows() || outputs.cols() != labels.cols()) {
        throw std::invalid_argument("mse_loss: shape mismatch");
    }
    return (outputs - labels).array().square().mean();
}

double cross_entropy(const Eigen::MatrixXd& probs, const std::vector<int>& classes) {
    double ce = 0.0;
    for (int b = 0; b < probs.cols(); ++b) {
        const double p = std::max(probs(classes[static_cast<std::size_t>(b)], b), 1e-300);
        ce -= std::log(p);
    }
    return ce / static_cast<double>(probs.cols());
}

double loss_value(const EncoderDecoderModel& m, const Batch& batch, const DropoutMasks* masks) {
    PassCache pc;
    run_forward(m, batch.features, m.horizon, &batch.labels, masks, pc);
    return batch_loss_from_cache(m, batch, pc);
}

ModelGrads ModelGrads::zero(const EncoderDecoderModel& m) {
    ModelGrads g;
    g.enc_wx = Eigen::MatrixXd::Zero(m.encoder.w_x.rows(), m.encoder.w_x.cols());
    g.enc_wh = Eigen::MatrixXd::Zero(m.encoder.w_h.rows(), m.encoder.w_h.cols());
    g.enc_b = Eigen::VectorXd::Zero(m.encoder.b.size());
    g.dec_wx = Eigen::MatrixXd::Zero(m.decoder.w_x.rows(), m.decoder.w_x.cols());
    g.dec_wh = Eigen::MatrixXd::Zero(m.decoder.w_h.rows(), m.decoder.w_h.cols());
    g.dec_b = Eigen::VectorXd::Zero(m.decoder.b.size());
    g.w_out = Eigen::MatrixXd::Zero(m.w_out.rows(), m.w_out.cols());
    g.b_out = Eigen::VectorXd::Zero(m.b_out.size());
    g.w_cls = Eigen::MatrixXd::Zero(m.w_cls.rows(), m.w_cls.cols());
    g.b_cls = Eigen::VectorXd::Zero(m.b_cls.size());
    return g;
}

void ModelGrads::add(const ModelGrads& other) {
    enc_wx += other.enc_wx;
    enc_wh += other.enc_wh;
    enc_b += other.enc_b;
    dec_wx += other.dec_wx;
    dec_wh += other.dec_wh;
    dec_b += other.dec_b;
    w_out += other.w_out;
    b_out += other.b_out;
    w_cls += other.w_cls;
    b_cls += other.b_cls;
}

void ModelGrads::scale(double s) {
    enc_wx *= s;
    enc_wh *= s;
    enc_b *= s;
    dec_wx *= s;
    dec_wh *= s;
    dec_b *= s;
    w_out *= s;
    b_out *= s;
    w_cls *= s;
    b_cls *= s;
}

ModelGrads backward(const EncoderDecoderModel& m, const Batch& batch, const DropoutMasks* masks,
                    double* loss_out, double* mse_out) {
    PassCache pc;
    run_forward(m, batch.features, m.horizon, &batch.labels, masks, pc);
    if (loss_out) *loss_out = batch_loss_from_cache(m, batch, pc);
    if (mse_out) *mse_out = mse_loss(pc.outputs, batch.labels);

    const int B = batch.size();
    const int H = m.hidden_dim;
    const int T = m.horizon;
    const bool lstm = m.encoder.kind == CellKind::LSTM;
    ModelGrads g = ModelGrads::zero(m);

    // d(loss)/d(outputs), loss = mean over horizon x batch.
    Eigen::MatrixXd dout = 2.0 / static_cast<double>(T * B) * (pc.outputs - batch.labels);

    Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(H, B);
    Eigen::MatrixXd dc = Eigen::MatrixXd::Zero(H, B);
    Eigen::MatrixXd dprobs = Eigen::MatrixXd::Zero(m.n_classes, B);

    for (int j = T - 1; j >= 0; --j) {
        const auto& cache = pc.dec[static_cast<std::size_t>(j)];
        const Eigen::MatrixXd& head_in = pc.head_input[static_cast<std::size_t>(j)];
        const Eigen::RowVectorXd dy = dout.row(j);
        g.w_out.noalias() += dy * head_in.transpose();
        g.b_out(0) += dy.sum();
        Eigen::MatrixXd dhead = m.w_out.transpose() * dy;
        if (masks) dhead = dhead.cwiseProduct(masks->dense_out);
        dh += dhead;
        Eigen::MatrixXd din;
        cell_step_backward(m.decoder, cache, dh, dc, din, g.dec_wx, g.dec_wh, g.dec_b);
        if (masks) din = din.cwiseProduct(masks->dec_in);
        if (m.uses_classifier()) dprobs += din.bottomRows(m.n_classes);
        // Teacher forcing: the scalar input row carries no gradient path.
    }

    // Classifier head: decoder-input path plus the cross-entropy term.
    if (m.uses_classifier()) {
        Eigen::MatrixXd dlogits(m.n_classes, B);
        for (int b = 0; b < B; ++b) {
            const auto p = pc.probs.col(b);
            const double dot = p.dot(dprobs.col(b));
            dlogits.col(b) = p.cwiseProduct(dprobs.col(b).array().matrix() -
                                            Eigen::VectorXd::Constant(m.n_classes, dot));
        }
        if (m.beta > 0.0) {
            Eigen::MatrixXd dce = pc.probs;
            for (int b = 0; b < B; ++b) dce(batch.classes[static_cast<std::size_t>(b)], b) -= 1.0;
            dlogits += (m.beta / static_cast<double>(B)) * dce;
        }
        g.w_cls.noalias() += dlogits * pc.cls_input.transpose();
        g.b_cls += dlogits.rowwise().sum();
        Eigen::MatrixXd dlatent = m.w_cls.transpose() * dlogits;
        if (masks) dlatent = dlatent.cwiseProduct(masks->dense_cls);
        dh += dlatent;
    }

    for (int t = m.n_history - 1; t >= 0; --t) {
        const auto& cache = pc.enc[static_cast<std::size_t>(t)];
        Eigen::MatrixXd din;
        cell_step_backward(m.encoder, cache, dh, dc, din, g.enc_wx, g.enc_wh, g.enc_b);
    }
    (void)lstm;
    return g;
}

namespace {

constexpr char kModelMagic[4] = {'I', 'L', 'N', 'N'};
constexpr std::uint32_t kModelVersion = 1;

template <typename T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void get(std::ifstream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

void put_matrix(std::ofstream& os, const Eigen::MatrixXd& mat) {
    put(os, static_cast<std::uint64_t>(mat.rows()));
    put(os, static_cast<std::uint64_t>(mat.cols()));
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
        for (Eigen::Index c = 0; c < mat.cols(); ++c) put(os, mat(r, c));
    }
}

Eigen::MatrixXd get_matrix(std::ifstream& is) {
    std::uint64_t rows = 0, cols = 0;
    get(is, rows);
    get(is, cols);
    Eigen::MatrixXd mat(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
        for (Eigen::Index c = 0; c < mat.cols(); ++c) get(is, mat(r, c));
    }
    return mat;
}

}  // namespace

void save_model(const EncoderDecoderModel& m, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_model: cannot write " + path);
    os.write(kModelMagic, 4);
    put(os, kModelVersion);
    put(os, static_cast<std::uint8_t>(m.arch));
    put(os, static_cast<std::uint8_t>(m.preset));
    put(os, static_cast<std::int32_t>(m.hidden_dim));
    put(os, static_cast<std::int32_t>(m.n_history));
    put(os, static_cast<std::int32_t>(m.horizon));
    put(os, static_cast<std::int32_t>(m.n_classes));
    put(os, m.dt);
    put(os, m.a_max);
    put(os, m.beta);
    put(os, m.dropout_recurrent);
    put(os, m.dropout_dense);
    for (double v : m.scaler.fmin) put(os, v);
    for (double v : m.scaler.fmax) put(os, v);
    put_matrix(os, m.encoder.w_x);
    put_matrix(os, m.encoder.w_h);
    put_matrix(os, m.encoder.b);
    put_matrix(os, m.decoder.w_x);
    put_matrix(os, m.decoder.w_h);
    put_matrix(os, m.decoder.b);
    put_matrix(os, m.w_out);
    put_matrix(os, m.b_out);
    put_matrix(os, m.w_cls);
    put_matrix(os, m.b_cls);
    if (!os) throw std::runtime_error("save_model: write failed for " + path);
}

EncoderDecoderModel load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_model: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kModelMagic, 4) != 0) {
        throw std::runtime_error("load_model: bad magic in " + path);
    }
    std::uint32_t version = 0;
    get(is, version);
    if (version != kModelVersion) throw std::runtime_error("load_model: unsupported version");
    EncoderDecoderModel m;
    std::uint8_t arch = 0, preset = 0;
    std::int32_t hidden = 0, n_hist = 0, horizon = 0, n_classes = 0;
    get(is, arch);
    get(is, preset);
    get(is, hidden);
    get(is, n_hist);
    get(is, horizon);
    get(is, n_classes);
    m.arch = static_cast<ArchKind>(arch);
    m.preset = static_cast<SizePreset>(preset);
    m.hidden_dim = hidden;
    m.n_history = n_hist;
    m.horizon = horizon;
    m.n_classes = n_classes;
    get(is, m.dt);
    get(is, m.a_max);
    get(is, m.beta);
    get(is, m.dropout_recurrent);
    get(is, m.dropout_dense);
    for (double& v : m.scaler.fmin) get(is, v);
    for (double& v : m.scaler.fmax) get(is, v);
    const CellKind cell = m.arch == ArchKind::SimpleRNN ? CellKind::SimpleRNN : CellKind::LSTM;
    m.encoder.kind = cell;
    m.encoder.w_x = get_matrix(is);
    m.encoder.w_h = get_matrix(is);
    m.encoder.b = get_matrix(is);
    m.encoder.input_dim = static_cast<int>(m.encoder.w_x.cols());
    m.encoder.hidden_dim = m.hidden_dim;
    m.decoder.kind = cell;
    m.decoder.w_x = get_matrix(is);
    m.decoder.w_h = get_matrix(is);
    m.decoder.b = get_matrix(is);
    m.decoder.input_dim = static_cast<int>(m.decoder.w_x.cols());
    m.decoder.hidden_dim = m.hidden_dim;
    m.w_out = get_matrix(is);
    m.b_out = get_matrix(is);
    m.w_cls = get_matrix(is);
    m.b_cls = get_matrix(is);
    if (!is) throw std::runtime_error("load_model: truncated file " + path);
    return m;
}

}  // namespace ilab
