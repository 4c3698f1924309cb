#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hdcov {

/// Deterministic pseudo-random stream.
///
/// Engine: xoshiro256** 1.0, with the 256-bit state filled by SplitMix64
/// from a key that mixes (seed, stream_id). This pairing is the versioned
/// output contract: the same (seed, stream_id) produces the same sequence
/// on every platform. Distinct stream ids give statistically independent
/// streams without any coordination between owners.
///
/// Normal variates use the Marsaglia polar method; gamma variates use
/// Marsaglia-Tsang squeeze/rejection (with the U^(1/a) boost for a < 1).
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()();

    /// Uniform on the open interval (0, 1).
    double uniform();
    double normal();
    /// Gamma(shape, scale=1), exact for every shape > 0.
    double gamma(double shape);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

enum class InnovationKind { StandardNormal, CenteredGamma };

/// Distribution of the i.i.d. innovations driving the data models.
/// Centered gamma uses (shape, scale) with shape * scale^2 == 1, so every
/// spec has mean 0 and variance 1.
class InnovationSpec {
public:
    static InnovationSpec standard_normal();
    /// Throws std::invalid_argument unless shape, scale > 0 and
    /// shape * scale^2 == 1 to within 1e-12 relative.
    static InnovationSpec centered_gamma(double shape, double scale);

    InnovationKind kind() const { return kind_; }
    double shape() const { return shape_; }
    double scale() const { return scale_; }

    bool operator==(const InnovationSpec&) const = default;

private:
    InnovationSpec(InnovationKind kind, double shape, double scale)
        : kind_(kind), shape_(shape), scale_(scale) {}

    InnovationKind kind_;
    double shape_;
    double scale_;
};

/// Standard normal CDF. Throws std::domain_error for non-finite x.
double std_normal_cdf(double x);

/// Upper tail 1 - Phi(x), accurate far into the tail.
double std_normal_sf(double x);

/// Inverse of std_normal_cdf (Wichura AS 241). Throws std::domain_error
/// unless 0 < p < 1.
double std_normal_quantile(double p);

/// Fills `out` with i.i.d. innovations.
void fill_innovations(RngStream& rng, const InnovationSpec& spec, std::span<double> out);

std::vector<double> sample_innovations(RngStream& rng, const InnovationSpec& spec,
                                       std::size_t count);

/// Excess kurtosis E z^4 - 3 of the innovation distribution.
double kurtosis_delta(const InnovationSpec& spec);

/// Pairwise (tree) summation; the reduction order depends only on the size.
double pairwise_sum(std::span<const double> values);

}  // namespace hdcov
