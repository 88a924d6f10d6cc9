#include "mgt/fit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace mgt {

std::string to_string(FitModel m) { return m == FitModel::exp_law ? "exp_law" : "power_law"; }

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw std::invalid_argument("fit_line: need at least 3 points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_line: abscissae are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += e * e;
    }
    // A constant response is fitted exactly by the zero slope.
    const double r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    f.r_squared = std::clamp(r2, 0.0, 1.0);
    return f;
}

std::vector<LifespanRecord> fit_eligible(const std::vector<LifespanRecord>& records) {
    std::vector<LifespanRecord> out;
    for (const auto& r : records)
        if (r.T_num && *r.T_num > 0.0 && r.eps > 0.0 && r.gate_passed.value_or(true))
            out.push_back(r);
    return out;
}

namespace {

FitResult fit_records(const std::vector<LifespanRecord>& records, FitModel model,
                      const std::function<double(double)>& abscissa) {
    const auto usable = fit_eligible(records);
    if (usable.size() < 3)
        throw std::invalid_argument("fit: need at least 3 records with a blow-up time, have " +
                                    std::to_string(usable.size()));
    std::vector<double> x, y;
    for (const auto& r : usable) {
        x.push_back(abscissa(r.eps));
        y.push_back(std::log(*r.T_num));
    }
    const LineFit lf = fit_line(x, y);
    FitResult res;
    res.model = model;
    res.exponent = model == FitModel::power_law ? -lf.slope : lf.slope;
    res.intercept = lf.intercept;
    res.r_squared = lf.r_squared;
    res.n_points = static_cast<int>(usable.size());
    return res;
}

} // namespace

FitResult fit_power_law(const std::vector<LifespanRecord>& records) {
    return fit_records(records, FitModel::power_law, [](double e) { return std::log(e); });
}

FitResult fit_exp_law(const std::vector<LifespanRecord>& records, double p) {
    return fit_records(records, FitModel::exp_law,
                       [p](double e) { return std::pow(e, -p * (p - 1.0)); });
}

} // namespace mgt
