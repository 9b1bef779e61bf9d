#include "metastack/learners/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

namespace metastack::learners {

namespace {

// Offsets of the parameter blocks inside the flat vector.
struct Layout {
    std::size_t n, m;
    std::size_t wx() const { return 0; }
    std::size_t wh() const { return 4 * m * n; }
    std::size_t bias() const { return wh() + 4 * m * m; }
    std::size_t head() const { return bias() + 4 * m; }
    std::size_t head_bias() const { return head() + m; }
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;

// Logistic function of every entry; tanh(z) is taken as 2 sigmoid(2z) - 1 so
// one vectorized exp covers all gates.
template <typename Array>
void logistic(Array&& a) {
    a = 1.0 / (1.0 + (-a).exp());
}

// Gate pre-activations a = Wx x + Wh h + b, then the state update. `gates`
// receives the activated i, f, g, o blocks.
void forward_step(const double* p, const Layout& lay, const double* x, const double* h_prev, const double* c_prev,
                  double* gates, double* c, double* tanh_c, double* h) {
    const auto n = static_cast<Eigen::Index>(lay.n);
    const auto m = static_cast<Eigen::Index>(lay.m);
    VectorMap a(gates, 4 * m);
    a.noalias() = ConstMatrixMap(p + lay.wx(), 4 * m, n) * ConstVectorMap(x, n);
    a.noalias() += ConstMatrixMap(p + lay.wh(), 4 * m, m) * ConstVectorMap(h_prev, m);
    a += ConstVectorMap(p + lay.bias(), 4 * m);
    a.segment(2 * m, m) *= 2.0;
    logistic(a.array());
    a.segment(2 * m, m) = 2.0 * a.segment(2 * m, m).array() - 1.0;

    VectorMap cell(c, m);
    VectorMap tc(tanh_c, m);
    cell = a.segment(m, m).cwiseProduct(ConstVectorMap(c_prev, m)) + a.segment(0, m).cwiseProduct(a.segment(2 * m, m));
    tc = 2.0 * cell;
    logistic(tc.array());
    tc = 2.0 * tc.array() - 1.0;
    VectorMap(h, m) = a.segment(3 * m, m).cwiseProduct(tc);
}

double head_output(const double* p, const Layout& lay, const double* h) {
    const double* v = p + lay.head();
    double y = p[lay.head_bias()];
    for (std::size_t j = 0; j < lay.m; ++j) y += v[j] * h[j];
    return y;
}

// Scaled-space SSE of the sequence outputs; accumulates its gradient into `grad` when given.
class SequenceTape {
public:
    SequenceTape(const Layout& lay, std::size_t length)
        : lay_(lay), length_(length), gates_(length * 4 * lay.m), cells_((length + 1) * lay.m),
          tanh_c_(length * lay.m), hidden_((length + 1) * lay.m), outputs_(length) {}

    double evaluate(const double* p, const double* xs, const double* ys, double* grad) {
        const std::size_t m = lay_.m;
        const std::size_t n = lay_.n;
        std::fill(cells_.begin(), cells_.begin() + static_cast<std::ptrdiff_t>(m), 0.0);
        std::fill(hidden_.begin(), hidden_.begin() + static_cast<std::ptrdiff_t>(m), 0.0);
        double sse = 0.0;
        for (std::size_t t = 0; t < length_; ++t) {
            forward_step(p, lay_, xs + t * n, &hidden_[t * m], &cells_[t * m], &gates_[t * 4 * m],
                         &cells_[(t + 1) * m], &tanh_c_[t * m], &hidden_[(t + 1) * m]);
            outputs_[t] = head_output(p, lay_, &hidden_[(t + 1) * m]);
            const double e = outputs_[t] - ys[t];
            sse += e * e;
        }
        if (grad != nullptr) backward(p, xs, ys, grad);
        return sse;
    }

private:
    void backward(const double* p, const double* xs, const double* ys, double* grad) {
        const std::size_t m = lay_.m;
        const std::size_t n = lay_.n;
        const double* wh = p + lay_.wh();
        const double* v = p + lay_.head();
        double* g_wx = grad + lay_.wx();
        double* g_wh = grad + lay_.wh();
        double* g_b = grad + lay_.bias();
        double* g_v = grad + lay_.head();
        double& g_v0 = grad[lay_.head_bias()];

        std::vector<double> dh_next(m, 0.0), dc_next(m, 0.0), dh(m), dc(m), da(4 * m);
        for (std::size_t t = length_; t-- > 0;) {
            const double* gates = &gates_[t * 4 * m];
            const double* ig = gates;
            const double* fg = gates + m;
            const double* gg = gates + 2 * m;
            const double* og = gates + 3 * m;
            const double* c_prev = &cells_[t * m];
            const double* h_prev = &hidden_[t * m];
            const double* h = &hidden_[(t + 1) * m];
            const double* tc = &tanh_c_[t * m];

            const double dy = 2.0 * (outputs_[t] - ys[t]);
            g_v0 += dy;
            for (std::size_t j = 0; j < m; ++j) {
                g_v[j] += dy * h[j];
                dh[j] = dy * v[j] + dh_next[j];
            }
            for (std::size_t j = 0; j < m; ++j) {
                const double d_o = dh[j] * tc[j];
                dc[j] = dh[j] * og[j] * (1.0 - tc[j] * tc[j]) + dc_next[j];
                const double d_i = dc[j] * gg[j];
                const double d_g = dc[j] * ig[j];
                const double d_f = dc[j] * c_prev[j];
                dc_next[j] = dc[j] * fg[j];
                da[j] = d_i * ig[j] * (1.0 - ig[j]);
                da[m + j] = d_f * fg[j] * (1.0 - fg[j]);
                da[2 * m + j] = d_g * (1.0 - gg[j] * gg[j]);
                da[3 * m + j] = d_o * og[j] * (1.0 - og[j]);
            }
            const auto nn = static_cast<Eigen::Index>(n);
            const auto mm = static_cast<Eigen::Index>(m);
            const ConstVectorMap d_a(da.data(), 4 * mm);
            VectorMap(g_b, 4 * mm) += d_a;
            Eigen::Map<RowMatrix>(g_wx, 4 * mm, nn).noalias() += d_a * ConstVectorMap(xs + t * n, nn).transpose();
            Eigen::Map<RowMatrix>(g_wh, 4 * mm, mm).noalias() += d_a * ConstVectorMap(h_prev, mm).transpose();
            VectorMap(dh_next.data(), mm).noalias() = ConstMatrixMap(wh, 4 * mm, mm).transpose() * d_a;
        }
    }

    Layout lay_;
    std::size_t length_;
    std::vector<double> gates_, cells_, tanh_c_, hidden_, outputs_;
};

struct ScaledSequence {
    std::vector<double> xs;
    std::vector<double> ys;
};

ScaledSequence scale_sequence(const TrainingSet& seq, const Standardizer& s) {
    ScaledSequence out{std::vector<double>(seq.size() * seq.width()), std::vector<double>(seq.size())};
    for (std::size_t t = 0; t < seq.size(); ++t) {
        s.transform_input(seq.pattern(t), std::span<double>(out.xs.data() + t * seq.width(), seq.width()));
        out.ys[t] = s.transform_target(seq.target(t));
    }
    return out;
}

} // namespace

LstmModel::LstmModel(std::size_t inputs, std::size_t hidden, std::vector<double> parameters, Standardizer scaling)
    : inputs_(inputs), hidden_(hidden), params_(std::move(parameters)), scaling_(std::move(scaling)) {
    require(hidden_ >= 1, ErrorKind::InvalidArgument, "LSTM needs at least one unit per gate");
    require(params_.size() == parameter_count(inputs_, hidden_), ErrorKind::LengthMismatch,
            "LSTM parameter vector has the wrong length");
}

LstmState LstmModel::initial_state() const {
    return {std::vector<double>(hidden_, 0.0), std::vector<double>(hidden_, 0.0)};
}

double LstmModel::step_scaled(std::span<const double> x, LstmState& state) const {
    const Layout lay{inputs_, hidden_};
    std::vector<double> gates(4 * hidden_), c(hidden_), tc(hidden_), h(hidden_);
    forward_step(params_.data(), lay, x.data(), state.hidden.data(), state.cell.data(), gates.data(), c.data(),
                 tc.data(), h.data());
    state.cell = std::move(c);
    state.hidden = std::move(h);
    return head_output(params_.data(), lay, state.hidden.data());
}

double LstmModel::step(std::span<const double> pattern, LstmState& state) const {
    require(pattern.size() == inputs_, ErrorKind::LengthMismatch, "pattern width differs from LSTM inputs");
    std::vector<double> x(inputs_);
    scaling_.transform_input(pattern, x);
    return scaling_.restore_target(step_scaled(x, state));
}

std::vector<double> LstmModel::run(const TrainingSet& sequence) const {
    LstmState state = initial_state();
    std::vector<double> out;
    out.reserve(sequence.size());
    for (std::size_t t = 0; t < sequence.size(); ++t) out.push_back(step(sequence.pattern(t), state));
    return out;
}

double LstmModel::predict(const TrainingSet& history, std::span<const double> query) const {
    LstmState state = initial_state();
    for (std::size_t t = 0; t < history.size(); ++t) step(history.pattern(t), state);
    return step(query, state);
}

LstmModel lstm_fit(const TrainingSet& train, const LstmOptions& options) {
    require(!train.empty(), ErrorKind::EmptyTrainingSet, "LSTM needs a non-empty training sequence");
    require(options.hidden >= 1, ErrorKind::InvalidArgument, "LSTM needs at least one unit per gate");
    const auto idx = train.indices();
    require(std::is_sorted(idx.begin(), idx.end()), ErrorKind::InvalidArgument,
            "LSTM training patterns must be in time order");

    const Standardizer scaling = Standardizer::fit(train);
    const ScaledSequence seq = scale_sequence(train, scaling);
    const Layout lay{train.width(), options.hidden};
    const std::size_t p = LstmModel::parameter_count(lay.n, lay.m);

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> init(-0.5, 0.5);
    std::vector<double> theta(p);
    for (double& w : theta) w = init(rng);

    SequenceTape tape(lay, train.size());
    std::vector<double> grad(p), first(p, 0.0), second(p, 0.0);
    double decay1 = 1.0;
    double decay2 = 1.0;
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        tape.evaluate(theta.data(), seq.xs.data(), seq.ys.data(), grad.data());

        double norm = 0.0;
        for (double g : grad) norm += g * g;
        norm = std::sqrt(norm);
        if (!std::isfinite(norm)) break;
        const double clip = norm > options.clip_norm ? options.clip_norm / norm : 1.0;

        decay1 *= options.beta1;
        decay2 *= options.beta2;
        for (std::size_t k = 0; k < p; ++k) {
            const double g = grad[k] * clip;
            first[k] = options.beta1 * first[k] + (1.0 - options.beta1) * g;
            second[k] = options.beta2 * second[k] + (1.0 - options.beta2) * g * g;
            const double m_hat = first[k] / (1.0 - decay1);
            const double v_hat = second[k] / (1.0 - decay2);
            theta[k] -= options.step * m_hat / (std::sqrt(v_hat) + options.epsilon);
        }
    }
    return LstmModel(lay.n, lay.m, std::move(theta), scaling);
}

double lstm_sequence_sse(const LstmModel& model, const TrainingSet& sequence) {
    const auto out = model.run(sequence);
    double sse = 0.0;
    for (std::size_t t = 0; t < out.size(); ++t) {
        const double e = out[t] - sequence.target(t);
        sse += e * e;
    }
    return sse;
}

std::vector<double> lstm_sse_gradient(const LstmModel& model, const TrainingSet& sequence) {
    require(!sequence.empty(), ErrorKind::EmptyTrainingSet, "gradient of an empty sequence");
    const Layout lay{model.inputs(), model.hidden()};
    const ScaledSequence seq = scale_sequence(sequence, model.scaling());
    SequenceTape tape(lay, sequence.size());
    std::vector<double> grad(model.parameters().size(), 0.0);
    tape.evaluate(model.parameters().data(), seq.xs.data(), seq.ys.data(), grad.data());
    // Raw-unit SSE is target_scale^2 times the scaled SSE.
    const double s2 = model.scaling().target_scale * model.scaling().target_scale;
    for (double& g : grad) g *= s2;
    return grad;
}

} // namespace metastack::learners
