// Test-only reference computations. Nothing here calls into the library's
// probability, Bessel or Bures code paths.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using Matrix4c = Eigen::Matrix<cplx, 4, 4>;

// Power series for integer-order J_n(x), long double accumulation.
inline double bessel_series(int n, double x) {
    const int order = std::abs(n);
    long double term = 1.0L;
    for (int i = 1; i <= order; ++i) term *= static_cast<long double>(x) / (2.0L * i);
    long double sum = term;
    const long double q = -0.25L * static_cast<long double>(x) * static_cast<long double>(x);
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<long double>(k) * static_cast<long double>(k + order));
        sum += term;
        if (std::fabs(static_cast<double>(term)) < 1e-22) break;
    }
    const double v = static_cast<double>(sum);
    return (n < 0 && order % 2 == 1) ? -v : v;
}

// Absolute bin-centre frequencies, written out independently of FrequencyGrid.
struct Grid {
    double pump, offset, spacing;  // rad/s
    double idler(int k) const { return 0.5 * pump - offset + (k - 1) * spacing; }
    double signal(int l) const { return 0.5 * pump + offset + l * spacing; }
};

// One annihilation operator written as a linear combination sum_j w_j a_j
// over modes j in [-1, 2] (stored at j + 1).
using Operator = std::array<cplx, 4>;

// P_kl = |<vac| c_I,k c_S,l |psi>|^2 by explicit operator expansion:
//   b_X,j = a_X,j exp(i tau_X w_X,j)     (absolute frequencies)
//   c_X,k = sum_{p=-1..1} J_p(m) e^{-i p phi} b_X,k-p
// and <vac| a_I,i a_S,s a+_I,m a+_S,n |vac> = delta_im delta_sn.
inline std::array<std::array<double, 2>, 2> brute_force_probs(const std::array<cplx, 4>& c, bool modulated,
                                                              double mod_index, double rf_phase, const Grid& g,
                                                              double tau_s, double tau_i) {
    auto build = [&](bool idler, int k) {
        Operator op{};
        for (int p = -1; p <= 1; ++p) {
            const int j = k - p;
            cplx w;
            if (!modulated)
                w = p == 0 ? cplx(1.0) : cplx(0.0);
            else
                w = bessel_series(p, mod_index) * std::exp(cplx(0.0, -p * rf_phase));
            const double omega = idler ? g.idler(j) : g.signal(j);
            const double tau = idler ? tau_i : tau_s;
            op[j + 1] += w * std::exp(cplx(0.0, tau * omega));
        }
        return op;
    };
    std::array<std::array<double, 2>, 2> probs{};
    for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) {
            const Operator ci = build(true, k);
            const Operator cs = build(false, l);
            cplx amp = 0.0;
            // creation pairs a+_I,m a+_S,n with amplitude c_mn, m,n in {0,1}
            for (int m = 0; m < 2; ++m)
                for (int n = 0; n < 2; ++n) amp += ci[m + 1] * cs[n + 1] * c[2 * m + n];
            probs[k][l] = std::norm(amp);
        }
    }
    return probs;
}

// Direct Bures-ensemble draw: Householder QR with the phase fix
// U = Q diag(R_ii / |R_ii|), rho = (I+U) G G^+ (I+U)^+ / Tr.
inline Matrix4c direct_bures(std::mt19937_64& gen) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix4c g, z;
    for (int r = 0; r < 4; ++r)
        for (int col = 0; col < 4; ++col) {
            g(r, col) = cplx(nd(gen), nd(gen));
            z(r, col) = cplx(nd(gen), nd(gen));
        }
    Eigen::HouseholderQR<Matrix4c> qr(z);
    Matrix4c q = qr.householderQ();
    const Matrix4c rmat = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < 4; ++i) q.col(i) *= rmat(i, i) / std::abs(rmat(i, i));
    const Matrix4c a = (Matrix4c::Identity() + q) * g;
    Matrix4c rho = a * a.adjoint();
    return rho / rho.trace().real();
}

// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
struct KsResult {
    double d;
    double p;
};

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(i / na - j / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    const double lambda = (ne + 0.12 + 0.11 / ne) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) p += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    return {d, std::clamp(p, 0.0, 1.0)};
}

}  // namespace oracle
