#pragma once

#include "mgt/sweep.hpp"

#include <span>
#include <string>
#include <vector>

namespace mgt {

enum class FitModel { power_law, exp_law };

std::string to_string(FitModel m);

struct FitResult {
    FitModel model = FitModel::power_law;
    double exponent = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int n_points = 0;
};

/// Ordinary least squares y = a + b x; returns (a, b, r^2). Needs 3+ points.
struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r_squared = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// log T = intercept - exponent log eps over records with T_num (and a passed gate when
/// the gate ran). Throws std::invalid_argument with fewer than 3 usable records.
FitResult fit_power_law(const std::vector<LifespanRecord>& records);

/// log T = intercept + exponent eps^{-p(p-1)}.
FitResult fit_exp_law(const std::vector<LifespanRecord>& records, double p);

/// Records that may enter a fit.
std::vector<LifespanRecord> fit_eligible(const std::vector<LifespanRecord>& records);

} // namespace mgt
