#include "hdcov/block_test.hpp"

#include "hdcov/errors.hpp"
#include "hdcov/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hdcov {
namespace {

double tr_ab(const Matrix& a, const Matrix& b) { return (a.cwiseProduct(b.transpose())).sum(); }
// tr(A A') for a rectangular block.
double tr_aat(const Matrix& a) { return a.squaredNorm(); }

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0, 1)");
}

}  // namespace

BlockTestResult assemble_block_result(const BlockTestResult& parts, Index n1, Index n2, double alpha) {
    check_alpha(alpha);
    BlockTestResult r = parts;
    const double a = static_cast<double>(n1);
    const double b = static_cast<double>(n2);
    r.alpha = alpha;
    r.s_stat = r.u1 + r.u2 - 2.0 * r.w;
    const double lead = r.u1 / b + r.u2 / a;
    r.omega0_sq_hat = 2.0 * lead * lead + 2.0 / (a * a) * r.a1_block1 * r.a1_block2 +
                      2.0 / (b * b) * r.a2_block1 * r.a2_block2 + 4.0 / (a * b) * r.c_block1 * r.c_block2;
    if (!(r.omega0_sq_hat > 0.0) || !std::isfinite(r.omega0_sq_hat))
        throw DegenerateScaleError("omega0^2 estimate = " + std::to_string(r.omega0_sq_hat));
    r.z_stat = r.s_stat / std::sqrt(r.omega0_sq_hat);
    r.p_value = std_normal_sf(r.z_stat);
    r.reject = r.z_stat >= upper_quantile(alpha);
    return r;
}

BlockTestResult two_sample_block_test(const SampleMatrix& x1, const SampleMatrix& x2,
                                      const BlockPartition& part, double alpha, EstimatorMode mode) {
    check_alpha(alpha);
    if (x1.p() != x2.p()) throw DimensionError("samples have different dimensions");
    const bool centered = mode == EstimatorMode::CenteredFirstTerm;
    auto [x1a, x1b] = split_blocks(centered ? center_columns(x1) : x1, part);
    auto [x2a, x2b] = split_blocks(centered ? center_columns(x2) : x2, part);

    const GramSet g1a = compute_gram(x1a), g1b = compute_gram(x1b);
    const GramSet g2a = compute_gram(x2a), g2b = compute_gram(x2b);
    const GramSet ha = compute_gram(x1a, x2a), hb = compute_gram(x1b, x2b);

    BlockTestResult parts;
    parts.u1 = within_estimate(g1a, g1b, mode);
    parts.u2 = within_estimate(g2a, g2b, mode);
    parts.w = cross_estimate(ha, hb, mode);
    parts.a1_block1 = within_estimate(g1a, g1a, mode);
    parts.a1_block2 = within_estimate(g1b, g1b, mode);
    parts.a2_block1 = within_estimate(g2a, g2a, mode);
    parts.a2_block2 = within_estimate(g2b, g2b, mode);
    parts.c_block1 = cross_estimate(ha, ha, mode);
    parts.c_block2 = cross_estimate(hb, hb, mode);
    return assemble_block_result(parts, x1.n(), x2.n(), alpha);
}

Matrix BlockPopulationSpec::block(int h, int r, int c) const {
    const Matrix& s = h == 1 ? sigma1 : sigma2;
    const Index r0 = r == 1 ? 0 : part.p1();
    const Index c0 = c == 1 ? 0 : part.p1();
    const Index rn = r == 1 ? part.p1() : part.p2();
    const Index cn = c == 1 ? part.p1() : part.p2();
    return s.block(r0, c0, rn, cn);
}

PopulationSpec BlockPopulationSpec::full() const {
    return PopulationSpec{sigma1, sigma2, gamma1, gamma2, delta1, delta2, n1, n2};
}

void BlockPopulationSpec::validate() const {
    if (sigma1.rows() != part.p() || sigma2.rows() != part.p())
        throw DimensionError("covariances do not match the partition");
    full().validate();
    for (const Matrix* s : {&sigma1, &sigma2}) {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(*s, Eigen::EigenvaluesOnly);
        const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
        if (eig.eigenvalues().minCoeff() < -1e-10 * scale)
            throw std::invalid_argument("covariance is not positive semidefinite");
    }
    for (int h = 1; h <= 2; ++h) {
        const Matrix s11 = block(h, 1, 1), s12 = block(h, 1, 2), s22 = block(h, 2, 2);
        const double lhs = tr_aat(s12);
        const double rhs = std::sqrt(tr_ab(s11, s11) * tr_ab(s22, s22));
        if (lhs > rhs * (1.0 + 1e-10) + 1e-300)
            throw std::invalid_argument("off-diagonal block violates the trace inequality");
    }
}

double BlockPopulationSpec::eta_p() const {
    return tr_aat(block(1, 1, 2)) / tr_aat(block(2, 1, 2));
}

double BlockPopulationSpec::cross_block_ratio() const {
    double worst = 0.0;
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j)
            for (int k = 1; k <= 2; ++k)
                for (int l = 1; l <= 2; ++l) {
                    const Matrix num = block(i, 1, 1) * block(j, 1, 2) * block(k, 2, 2) *
                                       block(l, 1, 2).transpose();
                    const double den =
                        tr_ab(block(i, 1, 1), block(j, 1, 1)) * tr_ab(block(k, 2, 2), block(l, 2, 2));
                    worst = std::max(worst, std::abs(num.trace()) / den);
                }
    return worst;
}

namespace {

// Terms shared by omega^2_0, omega-tilde^2 and omega^2: the products of
// diagonal-block traces.
double diagonal_block_terms(const BlockPopulationSpec& s) {
    const double a = static_cast<double>(s.n1), b = static_cast<double>(s.n2);
    const Matrix s111 = s.block(1, 1, 1), s122 = s.block(1, 2, 2);
    const Matrix s211 = s.block(2, 1, 1), s222 = s.block(2, 2, 2);
    return 2.0 / (a * a) * tr_ab(s111, s111) * tr_ab(s122, s122) +
           2.0 / (b * b) * tr_ab(s211, s211) * tr_ab(s222, s222) +
           4.0 / (a * b) * tr_ab(s111, s211) * tr_ab(s122, s222);
}

}  // namespace

double block_null_scale_population(const BlockPopulationSpec& spec) {
    spec.validate();
    const Matrix s12 = spec.block(1, 1, 2);
    const Matrix other = spec.block(2, 1, 2);
    if ((s12 - other).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, s12.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("null scale needs a common off-diagonal block");
    const double inv = 1.0 / static_cast<double>(spec.n1) + 1.0 / static_cast<double>(spec.n2);
    const double t = tr_aat(s12);
    return 2.0 * inv * inv * t * t + diagonal_block_terms(spec);
}

double block_alt_variance(const BlockPopulationSpec& spec) {
    spec.validate();
    const double n[2] = {static_cast<double>(spec.n1), static_cast<double>(spec.n2)};
    const double delta[2] = {spec.delta1, spec.delta2};
    const std::optional<Matrix>* gam[2] = {&spec.gamma1, &spec.gamma2};
    const Matrix d = spec.block(1, 1, 2) - spec.block(2, 1, 2);

    double v = 0.0;
    for (int i = 0; i < 2; ++i) {
        const int h = i + 1;
        const Matrix s11 = spec.block(h, 1, 1), s12 = spec.block(h, 1, 2), s22 = spec.block(h, 2, 2);
        const double t = tr_aat(s12);
        const Matrix m = s12 * d.transpose();
        v += 2.0 / (n[i] * n[i]) * t * t;
        v += 2.0 / (n[i] * n[i]) * tr_ab(s11, s11) * tr_ab(s22, s22);
        v += 4.0 / n[i] * tr_ab(m, m);
        v += 4.0 / n[i] * tr_ab(s11 * d, s22 * d.transpose());
        if (delta[i] != 0.0) {
            if (!*gam[i]) throw std::invalid_argument("nonzero kurtosis term needs loadings");
            const Matrix& g = **gam[i];
            const Matrix b = g.topRows(spec.part.p1()).transpose() * d * g.bottomRows(spec.part.p2());
            v += 4.0 * delta[i] / n[i] * b.diagonal().squaredNorm();
        }
    }
    const double cross = tr_ab(spec.block(1, 1, 2), spec.block(2, 1, 2).transpose());
    const Matrix s111 = spec.block(1, 1, 1), s122 = spec.block(1, 2, 2);
    const Matrix s211 = spec.block(2, 1, 1), s222 = spec.block(2, 2, 2);
    v += 4.0 / (n[0] * n[1]) * cross * cross;
    v += 4.0 / (n[0] * n[1]) * tr_ab(s111, s211) * tr_ab(s122, s222);
    return v;
}

double block_omega_tilde_sq(const BlockPopulationSpec& spec) {
    spec.validate();
    const double lead = tr_aat(spec.block(1, 1, 2)) / static_cast<double>(spec.n2) +
                        tr_aat(spec.block(2, 1, 2)) / static_cast<double>(spec.n1);
    return 2.0 * lead * lead + diagonal_block_terms(spec);
}

double block_power(const BlockPopulationSpec& spec, double alpha) {
    check_alpha(alpha);
    spec.validate();
    const Matrix d = spec.block(1, 1, 2) - spec.block(2, 1, 2);
    if (d.isZero(0.0)) return alpha;
    const double omega = std::sqrt(block_alt_variance(spec));
    const double tilde = std::sqrt(block_omega_tilde_sq(spec));
    return std_normal_cdf(-(tilde / omega) * upper_quantile(alpha) + d.squaredNorm() / omega);
}

Snr2 block_snr2(const BlockPopulationSpec& spec) {
    spec.validate();
    const Matrix d = spec.block(1, 1, 2) - spec.block(2, 1, 2);
    const double signal = d.squaredNorm();
    const double omega = std::sqrt(block_alt_variance(spec));
    Snr2 out;
    out.snr = signal / omega;
    out.tilde_ratio = std::sqrt(block_omega_tilde_sq(spec)) / omega;
    const double r = r_function(spec.eta_p(), spec.k_n());
    out.tilde_bound = std::sqrt(r * r + 1.0);
    if (signal == 0.0) {
        out.delta2n = std::numeric_limits<double>::infinity();
        out.lower_bound = 0.0;
        return out;
    }
    const double noise =
        spec.block(1, 1, 1).trace() * spec.block(1, 2, 2).trace() / static_cast<double>(spec.n1) +
        spec.block(2, 1, 1).trace() * spec.block(2, 2, 2).trace() / static_cast<double>(spec.n2);
    out.delta2n = noise / signal;
    const double kurt = std::max(8.0 + 4.0 * spec.delta1, 8.0 + 4.0 * spec.delta2);
    out.lower_bound = 1.0 / std::sqrt(4.0 * out.delta2n * out.delta2n + kurt * out.delta2n);
    return out;
}

}  // namespace hdcov
