#include "mgt/iteration.hpp"

#include "format.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

namespace mgt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

double clamp_exp(double log_value) {
    if (log_value >= std::log(std::numeric_limits<double>::max()))
        return std::numeric_limits<double>::max();
    return std::exp(log_value);
}

// Infinite product of 1 + x^k for k >= k0, with |x| < 1.
double tail_product(double x, int k0) {
    double log_prod = 0.0;
    for (int k = k0; k < 4000; ++k) {
        const double term = std::pow(x, k);
        log_prod += std::log1p(term);
        if (term < 1e-18) break;
    }
    return std::exp(log_prod);
}

} // namespace

double strauss_exponent(int n) {
    require(n >= 1, "strauss_exponent: n must be at least 1");
    if (n == 1) return kInf;
    const double a = n - 1.0, b = n + 1.0;
    return (b + std::sqrt(b * b + 8.0 * a)) / (2.0 * a);
}

double glassey_exponent(int n) {
    require(n >= 1, "glassey_exponent: n must be at least 1");
    if (n == 1) return kInf;
    return (n + 1.0) / (n - 1.0);
}

double theta(double p, int n) { return 2.0 + (n + 1.0) * p - (n - 1.0) * p * p; }

ExponentSet make_exponents(int n, double p) {
    return ExponentSet{n, p, strauss_exponent(n), glassey_exponent(n), theta(p, n)};
}

double subcritical_lifespan_exponent(double p, int n) {
    require(p > 1.0, "subcritical_lifespan_exponent: p must exceed 1");
    const double th = theta(p, n);
    require(th > 0.0, "subcritical_lifespan_exponent: theta(p, n) <= 0, p is not subcritical");
    return 2.0 * p * (p - 1.0) / th;
}

SubcriticalSequences build_subcritical(const SubcriticalParams& prm) {
    const double p = prm.p;
    const int n = prm.n;
    require(p > 1.0, "build_subcritical: p must exceed 1");
    require(n >= 1, "build_subcritical: n must be at least 1");
    require(prm.j_max >= 0 && prm.j_max <= 1000000, "build_subcritical: j_max must lie in [0, 1e6]");
    require(prm.C_holder > 0 && prm.K > 0 && prm.eps > 0 && prm.R > 0 && prm.beta > 0,
            "build_subcritical: constants, eps, R and beta must be positive");

    SubcriticalSequences s;
    s.params = prm;
    const int J = prm.j_max;
    s.ell.resize(J + 1);
    s.L.resize(J + 1);
    double L = 1.0;
    for (int k = 0; k <= J; ++k) {
        s.ell[k] = 1.0 + std::pow(p, -k);
        L *= s.ell[k];
        s.L[k] = L;
    }
    s.L_inf = s.L[J] * tail_product(1.0 / p, J + 1);

    const double alpha0 = (n - 1.0) * p / 2.0, gamma0 = n + 1.0;
    s.alpha.assign(1, alpha0);
    s.gamma.assign(1, gamma0);
    s.log_C.assign(1, std::log(prm.K) - (n + 1.0) * std::log(2.0) - std::log(n * (n + 1.0)) +
                          std::log(-std::expm1(-0.5)) + p * std::log(prm.eps));
    for (int j = 0; j < J; ++j) {
        const double g = s.gamma[j];
        const double ell_next = 1.0 + std::pow(p, -(j + 1));
        s.log_C.push_back(std::log(p - 0.5) + std::log(prm.C_holder) + p * s.log_C[j] -
                          2.0 * (j + 1) * std::log(p) - std::log(g * p + 1.0) -
                          std::log(g * p + 2.0) - (g * p + 2.0) * std::log(ell_next));
        s.alpha.push_back(n * (p - 1.0) + p * s.alpha[j]);
        s.gamma.push_back(2.0 + p * g);
    }

    const double g_inf = gamma0 + 2.0 / (p - 1.0);
    // ell_j^{gamma_j} <= exp(g_inf) for every j since log(1+x) <= x.
    s.M = std::exp(-g_inf);
    s.D = (p - 0.5) * prm.C_holder * s.M / (g_inf * g_inf);
    s.j0 = std::max(0, static_cast<int>(std::ceil(std::log(s.D) / (4.0 * std::log(p)) - p / (p - 1.0))));
    const double log_E0 = s.log_C[0] - p * std::log(prm.eps) -
                          4.0 * p * std::log(p) / ((p - 1.0) * (p - 1.0)) + std::log(s.D) / (p - 1.0);
    s.E0 = std::exp(log_E0);
    s.E1 = std::exp(-(alpha0 + n + g_inf) * std::log(2.0) + log_E0);
    const double th = theta(p, n);
    if (th > 0.0) {
        s.E2 = std::pow(s.E1, -2.0 * (p - 1.0) / th);
        s.eps0 = epsilon_threshold_subcritical(s, prm.R, prm.beta);
    } else {
        s.E2 = s.eps0 = std::numeric_limits<double>::quiet_NaN();
    }
    return s;
}

SumIdentity sum_identity(double p, int j) {
    require(p != 1.0, "sum_identity: p must differ from 1");
    require(j >= 1, "sum_identity: j must be at least 1");
    SumIdentity r;
    double pk = 1.0;
    for (int k = 0; k < j; ++k) {
        r.lhs += (j - k) * pk;
        r.geometric_lhs += pk;
        pk *= p;
    }
    r.rhs = ((std::pow(p, j + 1) - p) / (p - 1.0) - j) / (p - 1.0);
    r.geometric_rhs = (std::pow(p, j) - 1.0) / (p - 1.0);
    return r;
}

double subcritical_envelope_log(double t, int j, const SubcriticalSequences& seq, double R,
                                double beta) {
    require(j >= 0 && j < static_cast<int>(seq.log_C.size()), "subcritical_envelope: j out of range");
    const double start = seq.L[j] * beta;
    require(t >= start, "subcritical_envelope: t below L_j beta");
    if (t == start) return -kInf;
    return seq.log_C[j] - seq.alpha[j] * std::log(R + t) + seq.gamma[j] * std::log(t - start);
}

double subcritical_envelope(double t, int j, const SubcriticalSequences& seq, double R, double beta) {
    return clamp_exp(subcritical_envelope_log(t, j, seq, R, beta));
}

double epsilon_threshold_subcritical(const SubcriticalSequences& seq, double R, double beta) {
    const double p = seq.params.p;
    const double th = theta(p, seq.params.n);
    require(th > 0.0, "epsilon_threshold_subcritical: p is not subcritical");
    const double log_rhs = 2.0 * (p - 1.0) / th * std::log(seq.E1) +
                           std::log(std::max(R, 2.0 * seq.L_inf * beta));
    return std::exp(-th / (2.0 * p * (p - 1.0)) * log_rhs);
}

double subcritical_lifespan_bound(double eps, const SubcriticalSequences& seq) {
    require(eps > 0.0 && eps <= seq.eps0 * (1.0 + 1e-12),
            "subcritical_lifespan_bound: eps outside (0, eps0]");
    return seq.E2 * std::pow(eps, -subcritical_lifespan_exponent(seq.params.p, seq.params.n));
}

double default_omega0(double beta) { return std::max(1.01, 1.01 / beta); }

CriticalSequences build_critical(const CriticalParams& prm) {
    const double p = prm.p;
    const int n = prm.n;
    require(p > 1.0, "build_critical: p must exceed 1");
    require(n >= 1, "build_critical: n must be at least 1");
    require(prm.j_max >= 0 && prm.j_max <= 1000000, "build_critical: j_max must lie in [0, 1e6]");
    require(prm.C_hat > 0 && prm.M_init > 0 && prm.beta > 0 && prm.eps > 0,
            "build_critical: C_hat, M_init, beta and eps must be positive");
    const double omega0 = prm.omega0 > 0.0 ? prm.omega0 : default_omega0(prm.beta);
    require(omega0 > 1.0, "build_critical: omega0 must exceed 1");
    require(prm.beta * omega0 > 1.0, "build_critical: beta * omega0 must exceed 1");

    CriticalSequences s;
    s.params = prm;
    s.params.omega0 = omega0;
    s.at_strauss = n >= 2 && std::abs(p - strauss_exponent(n)) <= 1e-9;

    const int J = prm.j_max;
    const int K = 2 * J + 2;
    s.omega.resize(K + 1);
    s.Omega.resize(K + 1);
    s.omega[0] = omega0;
    s.Omega[0] = omega0;
    for (int k = 1; k <= K; ++k) {
        s.omega[k] = 1.0 + std::ldexp(1.0, -k);
        s.Omega[k] = s.Omega[k - 1] * s.omega[k];
    }
    s.Omega_inf = s.Omega[K] * tail_product(0.5, K + 1);

    s.a.assign(1, 1.0);
    s.b.assign(1, 0.0);
    s.log_M.assign(1, std::log(prm.M_init) + p * std::log(prm.eps));
    const double log_pref = -3.0 * n * std::log(2.0) + std::log(prm.beta) + std::log(prm.C_hat);
    for (int j = 0; j < J; ++j) {
        s.log_M.push_back(log_pref - std::log(s.a[j] * p + 1.0) - 6.0 * (j + 1) * std::log(2.0) +
                          p * s.log_M[j]);
        s.a.push_back(s.a[j] * p + 1.0);
        s.b.push_back((p - 1.0) + s.b[j] * p);
    }

    const double log_64p = std::log(64.0 * p);
    s.D_hat = std::exp(log_pref) * (p - 1.0) / p;
    s.N0 = prm.M_init * std::exp(-p / ((p - 1.0) * (p - 1.0)) * log_64p) *
           std::pow(s.D_hat, 1.0 / (p - 1.0));
    const double bO = prm.beta * s.Omega_inf;
    s.N1 = 0.5 * std::pow(bO, -p / (p - 1.0)) * s.N0;
    s.t0 = std::max(3.0, std::pow(bO, bO / (bO - 1.0)));
    s.j1 = std::max(0, static_cast<int>(std::ceil(std::log(s.D_hat) / log_64p - p / (p - 1.0))));
    // exp(N1^{1-p} eps0^{-p(p-1)}) = t0.
    s.eps0 = std::exp(-(std::log(std::log(s.t0)) + (p - 1.0) * std::log(s.N1)) / (p * (p - 1.0)));
    return s;
}

double critical_envelope_log(double t, int j, const CriticalSequences& seq, double beta) {
    require(j >= 0 && j < static_cast<int>(seq.log_M.size()), "critical_envelope: j out of range");
    const double start = beta * seq.Omega[2 * j];
    require(t >= start, "critical_envelope: t below beta Omega_2j");
    if (t == start) return -kInf;
    const double log_log_bracket = std::log(std::log(3.0 + t));
    return seq.log_M[j] - seq.b[j] * log_log_bracket + seq.a[j] * std::log(std::log(t / start));
}

double critical_envelope(double t, int j, const CriticalSequences& seq, double beta) {
    return clamp_exp(critical_envelope_log(t, j, seq, beta));
}

double critical_J(double t, double eps, const CriticalSequences& seq) {
    const double p = seq.params.p;
    return seq.N1 * std::pow(eps, p) * std::pow(std::log(t), 1.0 / (p - 1.0));
}

double critical_final_bound_log(double t, double eps, int j, const CriticalSequences& seq) {
    require(t >= seq.t0, "critical_final_bound: t below t0");
    const double p = seq.params.p;
    const double bO = seq.params.beta * seq.Omega_inf;
    return std::pow(p, j) * std::log(critical_J(t, eps, seq)) + std::log(std::log(3.0 + t)) -
           std::log(std::log(t / bO)) / (p - 1.0);
}

double critical_lifespan_bound_log(double eps, const CriticalSequences& seq) {
    require(eps > 0.0 && eps <= seq.eps0 * (1.0 + 1e-12),
            "critical_lifespan_bound: eps outside (0, eps0]");
    const double p = seq.params.p;
    return std::pow(seq.N1, 1.0 - p) * std::pow(eps, -p * (p - 1.0));
}

InequalitySides subcritical_slicing_inequality(double p, int j) {
    const double x = std::pow(p, -(j + 1)); // ell_{j+1} - 1
    return {-std::expm1(-x), (p - 0.5) * std::pow(p, -2.0 * (j + 1))};
}

InequalitySides critical_slicing_inequality(const CriticalSequences& seq, int j) {
    require(2 * j + 1 < static_cast<int>(seq.Omega.size()), "critical_slicing_inequality: j out of range");
    // Omega_{2j+1} - Omega_{2j} = Omega_{2j} (omega_{2j+1} - 1), free of cancellation.
    const double gap = seq.Omega[2 * j] * std::ldexp(1.0, -(2 * j + 1));
    return {-std::expm1(-gap), std::ldexp(1.0, -2 * (2 * j + 1))};
}

ExactCheck exact_closed_form_check(long p_num, long p_den, int n, int j_max) {
    using boost::multiprecision::cpp_rational;
    require(p_den > 0 && p_num > p_den, "exact_closed_form_check: need p = p_num/p_den > 1");
    const cpp_rational p(p_num, p_den);
    const cpp_rational alpha0 = cpp_rational(n - 1) * p / 2, gamma0 = n + 1;
    const cpp_rational two_over = cpp_rational(2) / (p - 1);

    ExactCheck res{true, true, true, true, j_max};
    cpp_rational alpha = alpha0, gamma = gamma0, a = 1, b = 0, pj = 1;
    for (int j = 0; j <= j_max; ++j) {
        if (alpha != (alpha0 + n) * pj - n) res.alpha = false;
        if (gamma != (gamma0 + two_over) * pj - two_over) res.gamma = false;
        if (a != (pj * p - 1) / (p - 1)) res.a = false;
        if (b != pj - 1) res.b = false;
        alpha = cpp_rational(n) * (p - 1) + p * alpha;
        gamma = 2 + p * gamma;
        a = a * p + 1;
        b = (p - 1) + b * p;
        pj *= p;
    }
    return res;
}

void write_subcritical_csv(const SubcriticalSequences& seq, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << "j,log_C,alpha,gamma,ell,L\n";
    for (std::size_t j = 0; j < seq.log_C.size(); ++j)
        out << j << ',' << detail::shortest(seq.log_C[j]) << ',' << detail::shortest(seq.alpha[j])
            << ',' << detail::shortest(seq.gamma[j]) << ',' << detail::shortest(seq.ell[j]) << ','
            << detail::shortest(seq.L[j]) << '\n';
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

void write_critical_csv(const CriticalSequences& seq, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << "j,log_M,a,b,omega,Omega\n";
    for (std::size_t j = 0; j < seq.omega.size(); ++j) {
        out << j << ',';
        if (j < seq.log_M.size())
            out << detail::shortest(seq.log_M[j]) << ',' << detail::shortest(seq.a[j]) << ','
                << detail::shortest(seq.b[j]);
        else
            out << ",,";
        out << ',' << detail::shortest(seq.omega[j]) << ',' << detail::shortest(seq.Omega[j]) << '\n';
    }
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

} // namespace mgt
