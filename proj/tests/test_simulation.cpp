#include "hdcov/cov_test.hpp"
#include "hdcov/simulation.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace hdcov;

namespace {

Matrix sample_cov(const SampleMatrix& x) {
    const RowMatrix c = x.values().rowwise() - x.values().colwise().mean();
    return (c.transpose() * c) / static_cast<double>(x.n() - 1);
}

bool same_content(const MonteCarloReport& a, const MonteCarloReport& b) {
    return a.replications == b.replications && a.rejections == b.rejections &&
           a.rejection_rate == b.rejection_rate && a.standard_error == b.standard_error &&
           a.statistics == b.statistics;
}

ScenarioConfig small_null(std::size_t reps) {
    ScenarioConfig c;
    c.p = 20;
    c.n1 = 15;
    c.n2 = 18;
    c.model1 = c.model2 = MaModel{{0.5}};
    c.replications = reps;
    c.master_seed = 12345;
    return c;
}

}  // namespace

TEST(MaModel, PopulationCovariance) {
    EXPECT_EQ(ma_population_cov(MaModel::white_noise(), 5), Matrix::Identity(5, 5));
    const Matrix s = ma_population_cov(MaModel{{0.5}}, 4);
    EXPECT_EQ(s(0, 0), 1.25);
    EXPECT_EQ(s(2, 1), 0.5);
    EXPECT_EQ(s(3, 1), 0.0);
    const Matrix t = ma_population_cov(MaModel{{2.0, 1.0}}, 6);
    EXPECT_EQ(t(1, 1), 6.0);
    EXPECT_EQ(t(1, 2), 4.0);  // 2 + 2*1
    EXPECT_EQ(t(1, 3), 1.0);
    EXPECT_EQ(t(1, 4), 0.0);
    EXPECT_TRUE(t.isApprox(t.transpose()));
    // Bandwidth larger than p.
    EXPECT_NEAR(ma_population_cov(MaModel::constant(5, 0.1), 2)(0, 1), 0.14, 1e-15);
}

TEST(MaModel, WhiteNoiseIsRawInnovations) {
    RngStream a(4, 0), b(4, 0);
    const auto x = simulate_ma(a, 3, 5, MaModel::white_noise(), InnovationSpec::standard_normal());
    for (Index i = 0; i < 3; ++i)
        for (Index k = 0; k < 5; ++k) EXPECT_EQ(x(i, k), b.normal());
}

TEST(MaModel, Deterministic) {
    RngStream a(4, 3), b(4, 3);
    const auto spec = InnovationSpec::centered_gamma(0.5, std::sqrt(2.0));
    EXPECT_EQ(simulate_ma(a, 7, 9, MaModel{{2.0, 1.0}}, spec).values(),
              simulate_ma(b, 7, 9, MaModel{{2.0, 1.0}}, spec).values());
}

TEST(MaModel, ConstantFastPathMatchesGeneral) {
    // Same innovations, equal coefficients: sliding sums vs the direct loop.
    RngStream a(8, 0), b(8, 0);
    const auto fast = simulate_ma(a, 4, 30, MaModel::constant(7, 0.8), InnovationSpec::standard_normal());
    std::vector<double> z(37);
    for (Index i = 0; i < 4; ++i) {
        for (auto& v : z) v = b.normal();
        for (Index k = 0; k < 30; ++k) {
            double v = z[k];
            for (Index m = 1; m <= 7; ++m) v += 0.8 * z[k + m];
            EXPECT_NEAR(fast(i, k), v, 1e-12);
        }
    }
}

TEST(MaModel, SampleCovarianceConverges) {
    RngStream rng(10, 0);
    const auto x = simulate_ma(rng, 5000, 3, MaModel{{0.5}}, InnovationSpec::standard_normal());
    const Matrix target = (Matrix(3, 3) << 1.25, 0.5, 0, 0.5, 1.25, 0.5, 0, 0.5, 1.25).finished();
    EXPECT_LE((sample_cov(x) - target).cwiseAbs().maxCoeff(), 0.05);
}

TEST(MaModel, GammaSampleCovarianceConverges) {
    RngStream rng(11, 0);
    const auto x = simulate_ma(rng, 20000, 4, MaModel{{2.0, 1.0}},
                               InnovationSpec::centered_gamma(0.5, std::sqrt(2.0)));
    const Matrix target = ma_population_cov(MaModel{{2.0, 1.0}}, 4);
    // Var(x_k^2) = 324 - 36 under Gamma(0.5) innovations, so the diagonal SE is about 0.12.
    EXPECT_LE((sample_cov(x) - target).cwiseAbs().maxCoeff(), 0.5);
}

TEST(Scenario, NullSanityBand) {
    const auto r = run_scenario(small_null(50));
    EXPECT_LE(r.rejection_rate, 0.2);
    EXPECT_EQ(r.statistics.size(), 50u);
    EXPECT_DOUBLE_EQ(r.rejection_rate * 50, static_cast<double>(r.rejections));
}

TEST(Scenario, RunToRunDeterminism) {
    const auto a = run_scenario(small_null(40));
    const auto b = run_scenario(small_null(40));
    EXPECT_TRUE(same_content(a, b));
}

TEST(Scenario, WorkerIndependence) {
    auto cfg = small_null(37);
    cfg.innov2 = InnovationSpec::centered_gamma(4.0, 0.5);
    const auto one = run_scenario(cfg, 1);
    for (std::size_t w : {2u, 3u, 8u}) EXPECT_TRUE(same_content(one, run_scenario(cfg, w))) << w;
    cfg.test = TestKind::Block;
    const auto b1 = run_scenario(cfg, 1);
    EXPECT_TRUE(same_content(b1, run_scenario(cfg, 4)));
}

TEST(Scenario, ReplicationStreamsAreReRunnable) {
    const auto cfg = small_null(5);
    const auto r = run_scenario(cfg);
    RngStream s1(cfg.master_seed, replication_stream(3, 0)), s2(cfg.master_seed, replication_stream(3, 1));
    const auto x1 = simulate_ma(s1, cfg.n1, cfg.p, cfg.model1, cfg.innov1);
    const auto x2 = simulate_ma(s2, cfg.n2, cfg.p, cfg.model2, cfg.innov2);
    EXPECT_EQ(r.statistics[3], two_sample_cov_test(x1, x2).l_n);
}

TEST(Scenario, FailingReplicationIsReported) {
    auto cfg = small_null(3);
    cfg.n1 = 3;  // too small for the exact estimators
    try {
        run_scenario(cfg);
        FAIL() << "expected an error";
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("replication 0"), std::string::npos) << msg;
        EXPECT_NE(msg.find("12345"), std::string::npos) << msg;
    }
}

TEST(Tables, Layout) {
    EXPECT_EQ(table_scenarios(TableId::T1, 100, 1).size(), 12u);
    const auto t2 = table_scenarios(TableId::T2, 100, 7);
    ASSERT_EQ(t2.size(), 48u);
    EXPECT_EQ(t2[1].p, 64);
    EXPECT_EQ(t2[1].n1, 20);
    EXPECT_EQ(t2[1].master_seed, 8u);
    EXPECT_EQ(t2[24].model2.coeffs, (std::vector<double>{2.0, 1.0}));
    const auto t5 = table_scenarios(TableId::T5, 100, 1);
    ASSERT_EQ(t5.size(), 40u);
    EXPECT_EQ(t5[1].p, 100);
    EXPECT_EQ(t5[1].model1.order(), 3u);
    EXPECT_EQ(t5[21].model2.order(), 50u);
    EXPECT_EQ(t5[0].test, TestKind::Block);
    const auto t6 = table_scenarios(TableId::T6, 100, 1);
    EXPECT_EQ(t6[0].innov2, InnovationSpec::centered_gamma(0.5, std::sqrt(2.0)));
    EXPECT_EQ(parse_table_id("t3"), TableId::T3);
    EXPECT_EQ(parse_table_id("5"), TableId::T5);
    EXPECT_THROW(parse_table_id("T9"), std::invalid_argument);
    EXPECT_THROW(reproduce_table(TableId::T2, 50, 1), std::invalid_argument);
}

TEST(Tables, CsvHeader) {
    std::ostringstream out;
    write_table_csv(out, {TableRow{"T2", 50, 50, 64, "size", 0.05, 0.01, 1000, 3}});
    const auto text = out.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "table,n1,n2,p,kind,rate,se,reps,seed");
    EXPECT_NE(text.find("T2,50,50,64,size,"), std::string::npos);
}
