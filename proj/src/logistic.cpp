#include "noisegate/logistic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "noisegate/errors.hpp"

namespace noisegate {

namespace {

constexpr double kProbClamp = 1e-10;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double deviance_of(const Eigen::VectorXd& eta, const std::vector<double>& y) {
    double dev = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double p = std::clamp(sigmoid(eta[static_cast<Eigen::Index>(i)]), kProbClamp,
                                    1.0 - kProbClamp);
        dev -= 2.0 * (y[i] * std::log(p) + (1.0 - y[i]) * std::log(1.0 - p));
    }
    return dev;
}

}  // namespace

LogisticFit fit_logistic(const std::vector<double>& rows, std::size_t n, std::size_t p,
                         const std::vector<double>& y, const LogisticOptions& options) {
    if (y.size() != n || rows.size() != n * p) throw DataError("logistic input shape mismatch");

    const Eigen::Index ni = static_cast<Eigen::Index>(n);
    const Eigen::Index pi = static_cast<Eigen::Index>(p) + 1;

    Eigen::MatrixXd design(ni, pi);
    design.col(0).setOnes();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j)
            design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j) + 1) =
                rows[i * p + j];

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(pi);
    Eigen::VectorXd eta = design * theta;
    double dev = deviance_of(eta, y);

    LogisticFit fit;
    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        fit.iterations = iter;

        Eigen::VectorXd prob(ni), weight(ni), residual(ni);
        for (Eigen::Index i = 0; i < ni; ++i) {
            const double pr = std::clamp(sigmoid(eta[i]), kProbClamp, 1.0 - kProbClamp);
            prob[i] = pr;
            weight[i] = pr * (1.0 - pr);
            residual[i] = y[static_cast<std::size_t>(i)] - pr;
        }

        Eigen::MatrixXd hessian = design.transpose() * weight.asDiagonal() * design;
        for (Eigen::Index j = 1; j < pi; ++j) hessian(j, j) += options.ridge;
        Eigen::VectorXd gradient = design.transpose() * residual;
        for (Eigen::Index j = 1; j < pi; ++j) gradient[j] -= options.ridge * theta[j];

        const Eigen::VectorXd delta = hessian.ldlt().solve(gradient);

        // Step-halving keeps the penalized deviance monotone.
        double step = 1.0;
        Eigen::VectorXd next = theta + delta;
        Eigen::VectorXd next_eta = design * next;
        double next_dev = deviance_of(next_eta, y);
        auto penalty = [&](const Eigen::VectorXd& t) {
            return options.ridge * t.tail(pi - 1).squaredNorm();
        };
        int halvings = 0;
        while (next_dev + penalty(next) > dev + penalty(theta) + 1e-12 && halvings < 30) {
            step *= 0.5;
            ++halvings;
            next = theta + step * delta;
            next_eta = design * next;
            next_dev = deviance_of(next_eta, y);
        }

        const double change = std::abs(dev - next_dev);
        theta = next;
        eta = next_eta;
        dev = next_dev;

        Eigen::VectorXd g =
            design.transpose() *
            (eta.unaryExpr([](double e) { return sigmoid(e); }) -
             Eigen::Map<const Eigen::VectorXd>(y.data(), ni));
        for (Eigen::Index j = 1; j < pi; ++j) g[j] += options.ridge * theta[j];
        fit.gradient_inf_norm = g.lpNorm<Eigen::Infinity>();

        if (change < options.deviance_tolerance &&
            fit.gradient_inf_norm < options.gradient_tolerance) {
            fit.converged = true;
            break;
        }
    }

    fit.intercept = theta[0];
    fit.coefficients.assign(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) fit.coefficients[j] = theta[static_cast<Eigen::Index>(j) + 1];
    fit.deviance = dev;
    return fit;
}

double logistic_predict(const LogisticFit& fit, const double* row, std::size_t p) {
    double z = fit.intercept;
    for (std::size_t j = 0; j < p; ++j) z += fit.coefficients[j] * row[j];
    return sigmoid(z);
}

std::vector<double> logistic_gradient(const std::vector<double>& rows, std::size_t n,
                                      std::size_t p, const std::vector<double>& y,
                                      double intercept, const std::vector<double>& coefficients,
                                      double ridge) {
    std::vector<double> gradient(p + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double z = intercept;
        for (std::size_t j = 0; j < p; ++j) z += coefficients[j] * rows[i * p + j];
        const double diff = sigmoid(z) - y[i];
        gradient[0] += diff;
        for (std::size_t j = 0; j < p; ++j) gradient[j + 1] += diff * rows[i * p + j];
    }
    for (std::size_t j = 0; j < p; ++j) gradient[j + 1] += ridge * coefficients[j];
    return gradient;
}

}  // namespace noisegate
