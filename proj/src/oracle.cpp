#include "hdcov/errors.hpp"
#include "hdcov/estimators.hpp"

#include <string>
#include <vector>

namespace hdcov::oracle {
namespace {

// Dense table of naive dot products between rows of x (cols [c0, c0+len))
// and rows of y (same columns).
class Dots {
public:
    Dots(const SampleMatrix& x, const SampleMatrix& y, Index c0, Index len)
        : cols_(y.n()), v_(static_cast<std::size_t>(x.n() * y.n())) {
        for (Index i = 0; i < x.n(); ++i)
            for (Index j = 0; j < y.n(); ++j) {
                double s = 0.0;
                for (Index k = c0; k < c0 + len; ++k) s += x(i, k) * y(j, k);
                v_[static_cast<std::size_t>(i * cols_ + j)] = s;
            }
    }
    double operator()(Index i, Index j) const { return v_[static_cast<std::size_t>(i * cols_ + j)]; }

private:
    Index cols_;
    std::vector<double> v_;
};

void guard(Index n) {
    if (n > kMaxN)
        throw std::invalid_argument("oracle limited to n <= " + std::to_string(kMaxN) + ", got " +
                                    std::to_string(n));
}

// Shared body of Eqs. for A (x1 == x2 blocks) and U: first-block products
// d1, second-block products d2, kernel d1(i,j) * d2(j,i) and so on.
double within_literal(const Dots& d1, const Dots& d2, Index n) {
    if (n < 4) throw SampleSizeError("oracle needs n >= 4");
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            if (j == i) continue;
            s1 += d1(i, j) * d2(j, i);
            for (Index k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                s2 += d1(i, j) * d2(j, k);
                for (Index l = 0; l < n; ++l) {
                    if (l == i || l == j || l == k) continue;
                    s3 += d1(i, j) * d2(k, l);
                }
            }
        }
    const double nd = static_cast<double>(n);
    return s1 / (nd * (nd - 1)) - 2.0 * s2 / (nd * (nd - 1) * (nd - 2)) +
           s3 / (nd * (nd - 1) * (nd - 2) * (nd - 3));
}

// Four-term cross combination. p12/p21 are first-block products (x1 rows vs
// x2 rows and back), q12/q21 second-block ones; for C both blocks coincide.
double cross_literal(const Dots& p12, const Dots& q12, const Dots& p21, const Dots& q21, Index n1,
                     Index n2) {
    if (n1 < 2 || n2 < 2) throw SampleSizeError("oracle needs n1, n2 >= 2");
    double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0;
    for (Index i = 0; i < n1; ++i)
        for (Index j = 0; j < n2; ++j) t1 += p12(i, j) * q21(j, i);
    // sum_{i != k} sum_j  X1i'X2j X2j'X1k
    for (Index i = 0; i < n1; ++i)
        for (Index k = 0; k < n1; ++k) {
            if (k == i) continue;
            for (Index j = 0; j < n2; ++j) t2 += p12(i, j) * q21(j, k);
        }
    // sum_{i != k} sum_j  X2i'X1j X1j'X2k
    for (Index i = 0; i < n2; ++i)
        for (Index k = 0; k < n2; ++k) {
            if (k == i) continue;
            for (Index j = 0; j < n1; ++j) t3 += p21(i, j) * q12(j, k);
        }
    // sum_{i != k} sum_{j != l}  X1i'X2j X1k'X2l
    for (Index i = 0; i < n1; ++i)
        for (Index k = 0; k < n1; ++k) {
            if (k == i) continue;
            for (Index j = 0; j < n2; ++j)
                for (Index l = 0; l < n2; ++l) {
                    if (l == j) continue;
                    t4 += p12(i, j) * q12(k, l);
                }
        }
    const double a = static_cast<double>(n1);
    const double b = static_cast<double>(n2);
    return t1 / (a * b) - t2 / (a * b * (a - 1)) - t3 / (a * b * (b - 1)) +
           t4 / (a * b * (a - 1) * (b - 1));
}

}  // namespace

double a_stat(const SampleMatrix& x) {
    guard(x.n());
    const Dots d(x, x, 0, x.p());
    return within_literal(d, d, x.n());
}

double c_stat(const SampleMatrix& x1, const SampleMatrix& x2) {
    guard(x1.n());
    guard(x2.n());
    if (x1.p() != x2.p()) throw DimensionError("samples have different dimensions");
    const Dots d12(x1, x2, 0, x1.p());
    const Dots d21(x2, x1, 0, x1.p());
    return cross_literal(d12, d12, d21, d21, x1.n(), x2.n());
}

double u_stat(const SampleMatrix& x, const BlockPartition& part) {
    guard(x.n());
    if (part.p() != x.p()) throw DimensionError("partition does not match sample");
    const Dots d1(x, x, 0, part.p1());
    const Dots d2(x, x, part.p1(), part.p2());
    return within_literal(d1, d2, x.n());
}

double w_stat(const SampleMatrix& x1, const SampleMatrix& x2, const BlockPartition& part) {
    guard(x1.n());
    guard(x2.n());
    if (x1.p() != x2.p() || part.p() != x1.p()) throw DimensionError("dimension mismatch");
    const Dots p12(x1, x2, 0, part.p1());
    const Dots q12(x1, x2, part.p1(), part.p2());
    const Dots p21(x2, x1, 0, part.p1());
    const Dots q21(x2, x1, part.p1(), part.p2());
    return cross_literal(p12, q12, p21, q21, x1.n(), x2.n());
}

}  // namespace hdcov::oracle
