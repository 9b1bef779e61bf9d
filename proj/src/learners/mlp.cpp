#include "metastack/learners/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

namespace metastack::learners {

MlpModel::MlpModel(std::size_t inputs, std::size_t hidden, std::vector<double> parameters, Standardizer scaling)
    : inputs_(inputs), hidden_(hidden), params_(std::move(parameters)), scaling_(std::move(scaling)) {
    require(hidden_ >= 1, ErrorKind::InvalidArgument, "MLP needs at least one hidden node");
    require(params_.size() == parameter_count(inputs_, hidden_), ErrorKind::LengthMismatch,
            "MLP parameter vector has the wrong length");
}

double MlpModel::evaluate_scaled(std::span<const double> x, std::span<double> jacobian_row) const {
    const std::size_t stride = inputs_ + 1;
    const double* v = params_.data() + hidden_ * stride;
    double out = v[hidden_];
    for (std::size_t j = 0; j < hidden_; ++j) {
        const double* w = params_.data() + j * stride;
        double z = w[0];
        for (std::size_t i = 0; i < inputs_; ++i) z += w[i + 1] * x[i];
        const double phi = std::tanh(0.5 * z);
        out += v[j] * phi;
        if (!jacobian_row.empty()) {
            const double dz = v[j] * 0.5 * (1.0 - phi * phi);
            double* g = jacobian_row.data() + j * stride;
            g[0] = dz;
            for (std::size_t i = 0; i < inputs_; ++i) g[i + 1] = dz * x[i];
            jacobian_row[hidden_ * stride + j] = phi;
        }
    }
    if (!jacobian_row.empty()) jacobian_row[hidden_ * stride + hidden_] = 1.0;
    return out;
}

double MlpModel::predict(std::span<const double> query) const {
    require(query.size() == inputs_, ErrorKind::LengthMismatch, "query width differs from MLP inputs");
    std::vector<double> x(inputs_);
    scaling_.transform_input(query, x);
    return scaling_.restore_target(evaluate_scaled(x));
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ScaledData {
    RowMatrix x;  // one row per sample
    Eigen::VectorXd y;
};

ScaledData scale(const TrainingSet& train, const Standardizer& s) {
    ScaledData d{RowMatrix(static_cast<Eigen::Index>(train.size()), static_cast<Eigen::Index>(train.width())),
                 Eigen::VectorXd(static_cast<Eigen::Index>(train.size()))};
    for (std::size_t r = 0; r < train.size(); ++r) {
        const auto i = static_cast<Eigen::Index>(r);
        s.transform_input(train.pattern(r), std::span<double>(d.x.row(i).data(), train.width()));
        d.y(i) = s.transform_target(train.target(r));
    }
    return d;
}

// Residuals f(x) - y and, optionally, the Jacobian of f in row-major order.
double residuals(const MlpModel& model, const ScaledData& d, Eigen::VectorXd& r, RowMatrix* jacobian) {
    const auto rows = d.x.rows();
    const auto p = static_cast<std::size_t>(model.parameters().size());
    double sse = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        const std::span<const double> xrow(d.x.row(i).data(), static_cast<std::size_t>(d.x.cols()));
        std::span<double> jrow;
        if (jacobian != nullptr) jrow = {jacobian->row(i).data(), p};
        r(i) = model.evaluate_scaled(xrow, jrow) - d.y(i);
        sse += r(i) * r(i);
    }
    return sse;
}

double squared_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

} // namespace

MlpModel mlp_fit(const TrainingSet& train, const MlpOptions& options) {
    require(!train.empty(), ErrorKind::EmptyTrainingSet, "MLP needs at least one training pair");
    require(options.hidden >= 1, ErrorKind::InvalidArgument, "MLP needs at least one hidden node");
    require(options.epochs >= 1, ErrorKind::InvalidArgument, "MLP needs at least one epoch");

    const Standardizer scaling = Standardizer::fit(train);
    const ScaledData data = scale(train, scaling);
    const std::size_t n = train.width();
    const std::size_t p = MlpModel::parameter_count(n, options.hidden);

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> init(-0.5, 0.5);
    std::vector<double> theta(p);
    for (double& w : theta) w = init(rng);

    const auto rows = static_cast<Eigen::Index>(train.size());
    const auto cols = static_cast<Eigen::Index>(p);
    RowMatrix jac(rows, cols);
    RowMatrix trial_jac(rows, cols);
    Eigen::VectorXd r(rows);
    Eigen::VectorXd trial_r(rows);

    MlpModel model(n, options.hidden, theta, scaling);
    double objective = residuals(model, data, r, &jac) + options.alpha * squared_norm(theta);
    double damping = options.initial_damping;

    for (std::size_t iter = 0; iter < options.epochs; ++iter) {
        const Eigen::Map<const Eigen::VectorXd> w(theta.data(), cols);
        const Eigen::VectorXd half_gradient = jac.transpose() * r + options.alpha * w;
        if (2.0 * half_gradient.norm() < options.gradient_tolerance) break;

        Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(cols, cols);
        hessian.selfadjointView<Eigen::Lower>().rankUpdate(jac.transpose());
        hessian.triangularView<Eigen::StrictlyUpper>() = hessian.transpose();
        hessian.diagonal().array() += options.alpha;

        bool accepted = false;
        while (!accepted && damping < 1e10) {
            Eigen::MatrixXd damped = hessian;
            damped.diagonal().array() += damping;
            const Eigen::VectorXd step = damped.ldlt().solve(-half_gradient);
            std::vector<double> candidate(p);
            for (std::size_t k = 0; k < p; ++k) candidate[k] = theta[k] + step(static_cast<Eigen::Index>(k));
            MlpModel trial(n, options.hidden, candidate, scaling);
            const double trial_objective =
                residuals(trial, data, trial_r, &trial_jac) + options.alpha * squared_norm(candidate);
            if (std::isfinite(trial_objective) && trial_objective < objective) {
                theta = std::move(candidate);
                model = std::move(trial);
                objective = trial_objective;
                jac.swap(trial_jac);
                r.swap(trial_r);
                damping = std::max(damping / 10.0, 1e-20);
                accepted = true;
            } else {
                damping *= 10.0;
            }
        }
        if (!accepted) break;
    }
    return model;
}

double mlp_sse(const MlpModel& model, const TrainingSet& train) {
    double sse = 0.0;
    for (std::size_t i = 0; i < train.size(); ++i) {
        const double e = model.predict(train.pattern(i)) - train.target(i);
        sse += e * e;
    }
    return sse;
}

std::vector<double> mlp_sse_gradient(const MlpModel& model, const TrainingSet& train) {
    const std::size_t p = model.parameters().size();
    std::vector<double> grad(p, 0.0);
    std::vector<double> jrow(p);
    std::vector<double> x(model.inputs());
    const Standardizer& s = model.scaling();
    for (std::size_t i = 0; i < train.size(); ++i) {
        s.transform_input(train.pattern(i), x);
        const double out = s.restore_target(model.evaluate_scaled(x, jrow));
        const double coeff = 2.0 * (out - train.target(i)) * s.target_scale;
        for (std::size_t k = 0; k < p; ++k) grad[k] += coeff * jrow[k];
    }
    return grad;
}

} // namespace metastack::learners
