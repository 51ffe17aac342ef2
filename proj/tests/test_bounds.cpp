#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qwsearch/bounds.hpp"

namespace qwsearch {
namespace {

Graph two_cliques(std::size_t half) {
  std::vector<Edge> edges;
  for (std::size_t base : {std::size_t{0}, half})
    for (std::size_t i = 0; i < half; ++i)
      for (std::size_t j = i + 1; j < half; ++j)
        edges.emplace_back(static_cast<Vertex>(base + i), static_cast<Vertex>(base + j));
  return Graph(2 * half, edges, 0.5);
}

TEST(BoundReport, HoldsFlagUsesSlack) {
  EXPECT_TRUE(BoundReport::make("x", 1.0 + 5e-13, 1.0).holds);
  EXPECT_FALSE(BoundReport::make("x", 1.0 + 5e-12, 1.0).holds);
}

TEST(OperatorDeviation, CompleteGraphHasZeroDeviation) {
  const auto rep = check_operator_deviation(complete_graph(20));
  EXPECT_NEAR(rep.lhs, 0.0, 1e-12);
  EXPECT_TRUE(rep.holds);
  EXPECT_TRUE(rep.report_only);
}

TEST(OperatorDeviation, HoldsOnSample) {
  const auto g = sample_gnp(512, 0.3, 101);
  const auto rep = check_operator_deviation(g);
  EXPECT_TRUE(rep.holds);
  EXPECT_FALSE(rep.report_only);
  EXPECT_DOUBLE_EQ(rep.rhs, std::sqrt(8.0 * 512 * 0.3 * std::log(512.0)));
}

TEST(EigenvalueBands, CompleteGraph) {
  const std::size_t n = 16;
  const auto bands = check_eigenvalue_bands(complete_graph(n));
  EXPECT_NEAR(bands.leading.lhs, 1.0, 1e-12);
  EXPECT_NEAR(bands.bulk.lhs, 1.0, 1e-12);
  EXPECT_TRUE(bands.leading.holds);
  EXPECT_TRUE(bands.bulk.holds);
  EXPECT_DOUBLE_EQ(bands.leading.rhs, std::sqrt(8.0 * n * std::log(std::sqrt(2.0) * n)));
}

TEST(EigenvalueBands, HoldOnSample) {
  const auto bands = check_eigenvalue_bands(sample_gnp(512, 0.3, 102));
  EXPECT_TRUE(bands.leading.holds);
  EXPECT_TRUE(bands.bulk.holds);
}

TEST(DegreeConcentration, DegenerateCompleteGraph) {
  const std::size_t n = 10;
  const auto rep = check_degree_concentration(complete_graph(n));
  EXPECT_DOUBLE_EQ(rep.lhs, 1.0);
  EXPECT_DOUBLE_EQ(rep.rhs, 0.0);
  EXPECT_FALSE(rep.holds);
  EXPECT_TRUE(rep.report_only);
}

TEST(DegreeConcentration, HoldsOnSample) {
  EXPECT_TRUE(check_degree_concentration(sample_gnp(512, 0.3, 103)).holds);
}

TEST(DegreeConcentration, StarGraphReportsArithmetic) {
  const Graph g(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, 0.2);
  const auto rep = check_degree_concentration(g);
  EXPECT_DOUBLE_EQ(rep.lhs, 3.0);
  EXPECT_DOUBLE_EQ(rep.rhs, 2.0 * std::sqrt(std::log(5.0) * 0.8));
}

TEST(AlphaLowerBound, Algebra) {
  const std::size_t n = 1024;
  const double ln_n = std::log(1024.0);
  EXPECT_NEAR(alpha_lower_bound(n, 256.0 * ln_n / n), 0.0, 1e-12);
  EXPECT_NEAR(alpha_lower_bound(n, 1024.0 * ln_n / n * 0.5) , 1.0 - 16.0 / std::sqrt(512.0), 1e-12);
  EXPECT_THROW(alpha_lower_bound(n, ln_n / n), InvalidArgument);
}

TEST(AlphaLowerBound, QuarterKilo) {
  // np / ln n = 1024 gives 1 - 16/32.
  const std::size_t n = 100000;
  const double p = 1024.0 * std::log(static_cast<double>(n)) / n;
  EXPECT_NEAR(alpha_lower_bound(n, p), 0.5, 1e-12);
}

TEST(CheckAlpha, MeasuredOverlapExceedsBound) {
  const auto rep = check_alpha(sample_gnp(1024, 0.5, 104));
  EXPECT_TRUE(rep.holds);
  EXPECT_GT(rep.rhs, 0.99);
  EXPECT_LE(rep.rhs, 1.0);
}

TEST(DulQuantities, Algebra) {
  // ln n / np = 1/1024.
  const std::size_t n = 20000;
  const double p = 1024.0 * std::log(static_cast<double>(n)) / n;
  const auto q = dul_quantities(n, p);
  EXPECT_NEAR(q.d, (1.0 - 1.0 / 16.0) / (1.0 + 1.0 / 8.0), 1e-12);
  EXPECT_NEAR(q.d, 0.8333, 1e-4);
  EXPECT_NEAR(q.u, (1.0 + 1.0 / 16.0) / (1.0 - 1.0 / 8.0), 1e-12);
  EXPECT_NEAR(q.u, 1.2142, 1e-4);
}

TEST(DulQuantities, PowerAndRoundingFactor) {
  const auto q = dul_quantities(1024, 0.5);
  const double ln_n = std::log(1024.0);
  const double y = ln_n / std::log(std::sqrt(512.0 / ln_n) / 4.0);
  EXPECT_EQ(q.l, static_cast<long>(std::ceil(y)));
  EXPECT_EQ(q.l, 10);
  EXPECT_GE(q.c_const, 1.0);
  EXPECT_LT(q.c_const, 2.0);
  EXPECT_LE(q.d, 1.0);
  EXPECT_GE(q.u, 1.0);
  EXPECT_THROW(dul_quantities(1024, 0.05), InvalidArgument);
}

TEST(InfnormBound, FormulaRatio) {
  const std::size_t n = 1024;
  const double v = infnorm_bound(n, 0.5, 1.0);
  const double ln_n = std::log(1024.0);
  EXPECT_NEAR(v, std::pow(ln_n, 1.5) / (32.0 * std::sqrt(512.0) * std::log(512.0)), 1e-15);
  const double ratio = infnorm_bound(n, 0.5, 1.0) / infnorm_bound(n, 0.125, 1.0);
  EXPECT_NEAR(ratio, 0.5 * std::log(128.0) / std::log(512.0), 1e-14);
  EXPECT_DOUBLE_EQ(infnorm_bound(n, 0.5, 3.0), 3.0 * v);
  EXPECT_THROW(infnorm_bound(4, 0.2, 1.0), InvalidArgument);
}

TEST(Lambda1BandProbability, Examples) {
  EXPECT_EQ(lambda1_band_probability(1500, 0.1, std::numeric_limits<double>::infinity()), 1.0);
  EXPECT_EQ(lambda1_band_probability(1500, 0.1, 0.0), 0.0);
  const double delta = 2.0 * std::sqrt(0.9) / (1500.0 * std::sqrt(0.1));
  EXPECT_NEAR(lambda1_band_probability(1500, 0.1, delta), 1.0 - oracle::erfc_series(1.0), 1e-12);
  EXPECT_NEAR(lambda1_band_probability(1500, 0.1, delta), 0.8427, 1e-4);
  EXPECT_THROW(lambda1_band_probability(1500, 0.0, 0.1), InvalidArgument);
  EXPECT_THROW(lambda1_band_probability(1500, 0.1, -0.1), InvalidArgument);
}

TEST(LaplacianNorm, CompleteGraphRatioIsOne) {
  const auto rep = check_laplacian_norm(complete_graph(30));
  EXPECT_NEAR(rep.aux.at("mu1_over_np"), 1.0, 1e-12);
  EXPECT_TRUE(rep.holds);
  EXPECT_TRUE(rep.report_only);
}

TEST(LaplacianNorm, EmptyGraphReportOnly) {
  const auto rep = check_laplacian_norm(Graph(8, {}, 0.0));
  EXPECT_EQ(rep.aux.at("mu1"), 0.0);
  EXPECT_TRUE(rep.report_only);
  EXPECT_FALSE(rep.holds);
}

TEST(LaplacianNorm, CenteredRatioOnSample) {
  const auto rep = check_laplacian_norm(sample_gnp(400, 0.3, 105), 0.5);
  EXPECT_TRUE(rep.holds);
  EXPECT_GT(rep.aux.at("centered_norm_ratio"), 0.5);
  EXPECT_LT(rep.aux.at("centered_norm_ratio"), 1.5);
}

TEST(Mu1VsMaxDegree, StarGraph) {
  const Graph g(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, 0.5);
  const auto rep = check_mu1_vs_maxdeg(g);
  EXPECT_NEAR(rep.aux.at("mu1"), 5.0, 1e-12);
  EXPECT_EQ(rep.aux.at("delta_max"), 4.0);
  EXPECT_TRUE(rep.holds);
}

TEST(Mu1VsMaxDegree, EdgelessGraph) {
  const auto rep = check_mu1_vs_maxdeg(Graph(6, {}, 0.1));
  EXPECT_EQ(rep.aux.at("mu1"), 0.0);
  EXPECT_EQ(rep.aux.at("delta_max"), 0.0);
  EXPECT_TRUE(rep.holds);
}

TEST(Mu1VsMaxDegree, LowerBoundNeverFails) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto g = sample_gnp(60, 0.05 + 0.05 * static_cast<double>(seed % 5), seed);
    const auto rep = check_mu1_vs_maxdeg(g, 1e6);
    EXPECT_GE(rep.aux.at("mu1"), rep.aux.at("delta_max"));
    EXPECT_TRUE(rep.holds);
  }
}

TEST(AlgebraicConnectivity, CompleteGraph) {
  const auto rep = check_algebraic_connectivity(complete_graph(25));
  EXPECT_NEAR(rep.aux.at("mu_n_minus_1"), 25.0, 1e-11);
  EXPECT_NEAR(rep.lhs, 0.0, 1e-11);
}

TEST(AlgebraicConnectivity, DisconnectedIsFlagged) {
  const auto rep = check_algebraic_connectivity(two_cliques(6));
  EXPECT_EQ(rep.aux.at("disconnected"), 1.0);
  EXPECT_EQ(rep.aux.at("mu_n_minus_1"), 0.0);
  EXPECT_TRUE(rep.report_only);
}

TEST(AlgebraicConnectivity, SampleWithinFour) {
  const auto rep = check_algebraic_connectivity(sample_gnp(1024, 0.1, 106));
  EXPECT_FALSE(rep.report_only);
  EXPECT_TRUE(rep.holds) << "ratio " << rep.aux.at("ratio");
}

TEST(DegreeExtremes, ReportsRatios) {
  const auto tc = threshold_constants(2.0);
  const Graph g(4, {{0, 1}, {1, 2}, {2, 3}}, 0.5);
  const auto rep = degree_extremes_vs_lambert(g, tc);
  EXPECT_DOUBLE_EQ(rep.aux.at("delta_max_over_log"), 2.0 / std::log(4.0));
  EXPECT_DOUBLE_EQ(rep.aux.at("delta_min_over_log"), 1.0 / std::log(4.0));
  EXPECT_DOUBLE_EQ(rep.aux.at("rel_dev_max"), std::abs(2.0 / std::log(4.0) - tc.a) / tc.a);
  EXPECT_EQ(rep.holds, rep.lhs <= 1e-12);
}

TEST(Reports, BitReproducibleFromSeed) {
  const auto a = check_operator_deviation(sample_gnp(200, 0.2, 55));
  const auto b = check_operator_deviation(sample_gnp(200, 0.2, 55));
  EXPECT_EQ(a.lhs, b.lhs);
  const auto c = check_laplacian_norm(sample_gnp(200, 0.2, 55));
  const auto d = check_laplacian_norm(sample_gnp(200, 0.2, 55));
  EXPECT_EQ(c.aux, d.aux);
}

}  // namespace
}  // namespace qwsearch
