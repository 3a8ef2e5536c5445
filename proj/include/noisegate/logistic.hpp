#pragma once

#include <cstddef>
#include <vector>

namespace noisegate {

/// Ridge-regularized binary logistic regression fitted by iteratively
/// reweighted least squares. The intercept is never penalized. Features are
/// used as given; callers standardize first.
struct LogisticFit {
    double intercept = 0.0;
    std::vector<double> coefficients;
    double deviance = 0.0;
    double gradient_inf_norm = 0.0;  // of the penalized objective at the solution
    int iterations = 0;
    bool converged = false;
};

struct LogisticOptions {
    double ridge = 1e-8;
    int max_iterations = 100;
    double deviance_tolerance = 1e-8;
    double gradient_tolerance = 1e-6;
};

/// y holds 1.0 for the positive class, 0.0 otherwise; rows are row-major n x p.
LogisticFit fit_logistic(const std::vector<double>& rows, std::size_t n, std::size_t p,
                         const std::vector<double>& y, const LogisticOptions& options = {});

/// P(positive) for one row of p features.
double logistic_predict(const LogisticFit& fit, const double* row, std::size_t p);

/// Gradient of the penalized negative log-likelihood at (intercept, coefs);
/// layout: [d/d intercept, d/d coef_0, ...]. Exposed for optimality checks.
std::vector<double> logistic_gradient(const std::vector<double>& rows, std::size_t n,
                                      std::size_t p, const std::vector<double>& y,
                                      double intercept, const std::vector<double>& coefficients,
                                      double ridge);

}  // namespace noisegate
