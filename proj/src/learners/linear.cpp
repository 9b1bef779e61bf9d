#include "metastack/learners/linear.hpp"

#include <Eigen/Dense>

namespace metastack::learners {

double LinearCoeffs::operator()(std::span<const double> query) const {
    require(query.size() == slopes.size(), ErrorKind::LengthMismatch, "query width differs from coefficient count");
    double f = intercept;
    for (std::size_t i = 0; i < slopes.size(); ++i) f += slopes[i] * query[i];
    return f;
}

LinearCoeffs fit_linear(const TrainingSet& train) {
    require(!train.empty(), ErrorKind::EmptyTrainingSet, "linear combiner needs at least one training pair");
    const auto rows = static_cast<Eigen::Index>(train.size());
    const auto n = static_cast<Eigen::Index>(train.width());

    Eigen::MatrixXd design(rows, n + 1);
    Eigen::VectorXd y(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto p = train.pattern(static_cast<std::size_t>(r));
        design(r, 0) = 1.0;
        for (Eigen::Index j = 0; j < n; ++j) design(r, j + 1) = p[static_cast<std::size_t>(j)];
        y(r) = train.target(static_cast<std::size_t>(r));
    }

    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
    const Eigen::VectorXd a = cod.solve(y);

    LinearCoeffs coeffs;
    coeffs.intercept = a(0);
    coeffs.slopes.assign(a.data() + 1, a.data() + a.size());
    return coeffs;
}

LinearForecast lr_combine(const TrainingSet& train, std::span<const double> query) {
    LinearCoeffs coeffs = fit_linear(train);
    const double f = coeffs(query);
    return {f, std::move(coeffs)};
}

} // namespace metastack::learners
