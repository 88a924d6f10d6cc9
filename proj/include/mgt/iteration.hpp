#pragma once

#include <filesystem>
#include <vector>

namespace mgt {

/// Positive root of (n-1)p^2 - (n+1)p - 2 = 0; +infinity for n = 1.
double strauss_exponent(int n);
/// (n+1)/(n-1); +infinity for n = 1.
double glassey_exponent(int n);
/// 2 + (n+1)p - (n-1)p^2.
double theta(double p, int n);

struct ExponentSet {
    int n = 1;
    double p = 2.0;
    double p_strauss = 0.0;
    double p_glassey = 0.0;
    double theta = 0.0;
};

ExponentSet make_exponents(int n, double p);

/// 2p(p-1)/theta(p,n). Throws std::invalid_argument when theta <= 0.
double subcritical_lifespan_exponent(double p, int n);

struct SubcriticalParams {
    double p = 2.0;
    int n = 1;
    int j_max = 30;
    double C_holder = 1.0;
    double K = 1.0;
    double eps = 1.0;
    double R = 1.0;
    double beta = 1.0;
};

/// Sequences of the subcritical lower-bound iteration. C_j is stored as log C_j.
struct SubcriticalSequences {
    SubcriticalParams params;
    std::vector<double> log_C;
    std::vector<double> alpha;
    std::vector<double> gamma;
    std::vector<double> ell;
    std::vector<double> L;
    /// Infinite product of the ell_k.
    double L_inf = 0.0;
    double M = 0.0;
    double D = 0.0;
    double E0 = 0.0;
    double E1 = 0.0;
    double E2 = 0.0;
    int j0 = 0;
    double eps0 = 0.0;
};

/// Throws std::invalid_argument for non-positive inputs, p <= 1, or j_max outside [0, 1e6].
SubcriticalSequences build_subcritical(const SubcriticalParams& params);

struct SumIdentity {
    double lhs = 0.0;
    double rhs = 0.0;
    double geometric_lhs = 0.0;
    double geometric_rhs = 0.0;
};

/// sum_{k<j} (j-k) p^k against its closed form, and sum_{k<j} p^k against (p^j-1)/(p-1).
SumIdentity sum_identity(double p, int j);

/// log of C_j (R+t)^{-alpha_j} (t - L_j beta)^{gamma_j}; -infinity at t = L_j beta.
/// Throws std::invalid_argument for t below L_j beta or j outside the sequences.
double subcritical_envelope_log(double t, int j, const SubcriticalSequences& seq, double R,
                                double beta);
/// exp of the above, clamped to the largest finite double.
double subcritical_envelope(double t, int j, const SubcriticalSequences& seq, double R,
                            double beta);

/// Largest eps0 with eps0^{-2p(p-1)/theta} >= E1^{2(p-1)/theta} max{R, 2 L beta}.
double epsilon_threshold_subcritical(const SubcriticalSequences& seq, double R, double beta);

/// E2 eps^{-2p(p-1)/theta}. Throws std::invalid_argument for eps outside (0, eps0].
double subcritical_lifespan_bound(double eps, const SubcriticalSequences& seq);

struct CriticalParams {
    double p = 2.0;
    int n = 2;
    int j_max = 30;
    double C_hat = 1.0;
    double M_init = 1.0;
    double beta = 1.0;
    double eps = 1.0;
    /// 0 selects max(1.01, 1.01/beta).
    double omega0 = 0.0;
};

double default_omega0(double beta);

/// Sequences of the critical slicing iteration. M_j is stored as log M_j.
/// omega and Omega are stored up to index 2 j_max + 2 so every envelope has its slice.
struct CriticalSequences {
    CriticalParams params;
    std::vector<double> log_M;
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> omega;
    std::vector<double> Omega;
    double Omega_inf = 0.0;
    double D_hat = 0.0;
    double N0 = 0.0;
    double N1 = 0.0;
    int j1 = 0;
    double t0 = 0.0;
    double eps0 = 0.0;
    /// False when p differs from the Strauss exponent by more than 1e-9.
    bool at_strauss = true;
};

/// Throws std::invalid_argument when beta omega0 <= 1, omega0 <= 1 or inputs are invalid.
CriticalSequences build_critical(const CriticalParams& params);

/// log of M_j (log<t>)^{-b_j} (log(t/(beta Omega_2j)))^{a_j}; -infinity at the left
/// endpoint. Throws std::invalid_argument below t = beta Omega_2j.
double critical_envelope_log(double t, int j, const CriticalSequences& seq, double beta);
double critical_envelope(double t, int j, const CriticalSequences& seq, double beta);

/// J(t, eps) = N1 eps^p (log t)^{1/(p-1)}.
double critical_J(double t, double eps, const CriticalSequences& seq);

/// log of the j-th lower bound in the final form
/// exp(p^j log J) log<t> (log(t/(beta Omega)))^{-1/(p-1)}, valid for t >= t0.
double critical_final_bound_log(double t, double eps, int j, const CriticalSequences& seq);

/// log of exp(N1^{1-p} eps^{-p(p-1)}), i.e. N1^{1-p} eps^{-p(p-1)}.
/// Throws std::invalid_argument for eps outside (0, eps0].
double critical_lifespan_bound_log(double eps, const CriticalSequences& seq);

/// Both sides of 1 - e^{-(ell_{j+1} - 1)} >= (p - 1/2) p^{-2(j+1)}.
struct InequalitySides {
    double lhs = 0.0;
    double rhs = 0.0;
};
InequalitySides subcritical_slicing_inequality(double p, int j);
/// Both sides of 1 - e^{-(Omega_{2j+1} - Omega_{2j})} >= 2^{-2(2j+1)}.
InequalitySides critical_slicing_inequality(const CriticalSequences& seq, int j);

/// Result of comparing recurrences with closed forms in exact rational arithmetic.
struct ExactCheck {
    bool alpha = false;
    bool gamma = false;
    bool a = false;
    bool b = false;
    int j_checked = 0;
    bool all() const { return alpha && gamma && a && b; }
};

/// Runs alpha, gamma (subcritical, dimension n) and a, b (critical) with p = p_num/p_den
/// exactly up to j_max and compares every term with its closed form.
ExactCheck exact_closed_form_check(long p_num, long p_den, int n, int j_max);

/// Sequence tables; log-domain columns carry a log_ prefix.
void write_subcritical_csv(const SubcriticalSequences& seq, const std::filesystem::path& path);
void write_critical_csv(const CriticalSequences& seq, const std::filesystem::path& path);

} // namespace mgt
