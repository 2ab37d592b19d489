#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "redbound/entropy.hpp"
#include "redbound/states.hpp"

using namespace redbound;

namespace {

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

struct SilenceWarnings {
  std::vector<std::string> seen;
  std::function<void(const std::string&)> saved = warning_handler();
  SilenceWarnings() {
    warning_handler() = [this](const std::string& m) { seen.push_back(m); };
  }
  ~SilenceWarnings() { warning_handler() = saved; }
};

DensityMatrix ghz3() {
  const double h = 1.0 / std::sqrt(2.0);
  CVector v(8);
  v[0] = v[7] = h;
  return pure_state(v, {2, 2, 2}, {"A", "B", "E"});
}

}  // namespace

TEST(Validate, MaximallyMixedQubitPasses) { EXPECT_TRUE(validate(maximally_mixed({2})).pass); }

TEST(Validate, NegativeEigenvalueFails) {
  const DensityMatrix bad{CMatrix::diagonal({1.5, -0.5}), {2}, {}};
  const auto d = validate(bad);
  EXPECT_FALSE(d.pass);
  EXPECT_NEAR(d.min_eigenvalue, -0.5, 1e-12);
}

TEST(Validate, ReportsDefects) {
  const DensityMatrix bad{CMatrix::diagonal({0.7, 0.7}), {2}, {}};
  const auto d = validate(bad);
  EXPECT_FALSE(d.pass);
  EXPECT_NEAR(d.trace_defect, 0.4, 1e-12);
  const DensityMatrix wrong_dims{CMatrix::identity(4) * cplx(0.25), {3}, {}};
  EXPECT_FALSE(validate(wrong_dims).shape_ok);
}

TEST(Ingest, ClipsTinyNegativeEigenvalueWithWarning) {
  SilenceWarnings w;
  const DensityMatrix rho = ingest_state(CMatrix::diagonal({1.0 + 5e-10, -5e-10}), {2});
  EXPECT_EQ(w.seen.size(), 1u);
  EXPECT_GE(min_eigenvalue(rho.mat), 0.0);
  EXPECT_NEAR(rho.mat.trace().real(), 1.0, 1e-15);
}

TEST(Ingest, RejectsLargeNegativity) {
  EXPECT_THROW(ingest_state(CMatrix::diagonal({1.5, -0.5}), {2}), InvalidState);
}

TEST(Purify, PureInputHasTrivialReference) {
  const DensityMatrix p = purify(bell_state());
  EXPECT_EQ(p.dims.back(), 1u);
  const Indices keep{0, 1};
  EXPECT_LE(max_abs_diff(partial_trace(p.mat, p.dims, keep), bell_state().mat), 1e-12);
}

TEST(Purify, MaximallyMixedQubitGivesMaximallyEntangledPair) {
  const DensityMatrix p = purify(maximally_mixed({2}, {"A"}));
  ASSERT_EQ(p.dims, (Dims{2, 2}));
  EXPECT_NEAR(p.mat.trace().real(), 1.0, 1e-12);
  EXPECT_NEAR((p.mat * p.mat).trace().real(), 1.0, 1e-12);
  const Indices keep{0};
  EXPECT_NEAR(von_neumann(partial_trace(p.mat, p.dims, keep)), 1.0, 1e-12);
}

TEST(Purify, RankThreeOnFourDims) {
  Rng rng(21);
  const DensityMatrix rho = random_state({4}, 3, rng, {"A"});
  const DensityMatrix p = purify(rho);
  EXPECT_EQ(p.dims.back(), 3u);
  EXPECT_EQ(p.labels.back(), "E");
  const auto e = hermitian_eig(p.mat).eigenvalues;
  EXPECT_NEAR(e.back(), 1.0, 1e-9);
  EXPECT_NEAR(e[e.size() - 2], 0.0, 1e-9);
  const Indices keep{0};
  EXPECT_LE(frobenius_distance(partial_trace(p.mat, p.dims, keep), rho.mat), 1e-9);
}

TEST(Haar, ScalarHasUnitModulus) { EXPECT_NEAR(std::abs(haar_unitary(1, std::uint64_t{5})(0, 0)), 1.0, 1e-15); }

TEST(Haar, UnitaryForAnySeed) {
  for (std::uint64_t seed : {0ULL, 1ULL, 99ULL, 123456789ULL})
    EXPECT_LE(unitarity_defect(haar_unitary(8, seed)), 1e-10);
}

TEST(Haar, BitwiseReproducible) { EXPECT_EQ(haar_unitary(2, std::uint64_t{42}), haar_unitary(2, std::uint64_t{42})); }

TEST(Haar, FirstMomentVanishes) {
  // E[U_ij] = 0 and E[|U_ij|^2] = 1/d for Haar measure.
  Rng rng(22);
  const int n = 4000;
  cplx mean = 0.0;
  double second = 0.0;
  for (int t = 0; t < n; ++t) {
    const CMatrix u = haar_unitary(3, rng);
    mean += u(0, 1);
    second += std::norm(u(2, 0));
  }
  EXPECT_LT(std::abs(mean / static_cast<double>(n)), 0.05);
  EXPECT_NEAR(second / n, 1.0 / 3.0, 0.02);
}

TEST(CqEmbed, SingleMember) {
  Rng rng(23);
  const DensityMatrix r = random_state({3}, 2, rng, {"B"});
  const DensityMatrix cq = cq_embed(Ensemble{{1.0}, {r}});
  EXPECT_EQ(cq.dims, (Dims{1, 3}));
  EXPECT_EQ(cq.labels.front(), "X");
  EXPECT_LE(max_abs_diff(cq.mat, r.mat), 1e-15);
}

TEST(CqEmbed, ClassicalBitPair) {
  const DensityMatrix zero = pure_state({1.0, 0.0}, {2}), one = pure_state({0.0, 1.0}, {2});
  const DensityMatrix cq = cq_embed(Ensemble{{0.5, 0.5}, {zero, one}});
  EXPECT_LE(max_abs_diff(cq.mat, CMatrix::diagonal({0.5, 0, 0, 0.5})), 1e-15);
}

TEST(CqEmbed, RegisterTracesToAverage) {
  Rng rng(24);
  Ensemble e{{0.2, 0.3, 0.5}, {}};
  for (int i = 0; i < 3; ++i) e.members.push_back(random_state({2, 2}, 2, rng));
  const DensityMatrix cq = cq_embed(e);
  const Indices keep{1, 2};
  EXPECT_LE(max_abs_diff(partial_trace(cq.mat, cq.dims, keep), ensemble_average(e).mat), 1e-12);
}

TEST(MeasureToCqq, TrivialPovm) {
  const DensityMatrix g = ghz3();
  const DensityMatrix w = measure_to_cqq(g, Povm{{CMatrix::identity(2)}});
  const Indices be{1, 2};
  EXPECT_EQ(w.dims, (Dims{1, 2, 2}));
  EXPECT_LE(max_abs_diff(w.mat, partial_trace(g.mat, g.dims, be)), 1e-15);
}

TEST(MeasureToCqq, GhzComputationalMeasurement) {
  const DensityMatrix w = measure_to_cqq(ghz3(), computational_povm(2));
  CMatrix expected(8, 8);
  expected(0, 0) = 0.5;  // |0>|00>
  expected(7, 7) = 0.5;  // |1>|11>
  EXPECT_LE(max_abs_diff(w.mat, expected), 1e-15);
  EXPECT_EQ(w.labels, (std::vector<std::string>{"X", "B", "E"}));
}

TEST(MeasureToCqq, MatchesDirectFormulaThroughCqEmbed) {
  Rng rng(25);
  const DensityMatrix rho = random_state({2, 2, 2}, 3, rng, {"A", "B", "E"});
  const Povm q = computational_povm(2);
  Ensemble e;
  for (const auto& el : q.elements) {
    // Tr_A((Q (x) I) rho), written out by hand.
    CMatrix block(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t a = 0; a < 2; ++a)
          for (std::size_t b = 0; b < 2; ++b) block(i, j) += el(a, b) * rho.mat(b * 4 + i, a * 4 + j);
    const double p = block.trace().real();
    e.weights.push_back(p);
    e.members.push_back(DensityMatrix{block * cplx(1.0 / p), {2, 2}, {"B", "E"}});
  }
  EXPECT_LE(max_abs_diff(measure_to_cqq(rho, q).mat, cq_embed(e).mat), 1e-12);
}

TEST(MeasureToCqq, RejectsBadPovm) {
  EXPECT_THROW(measure_to_cqq(ghz3(), Povm{{CMatrix::diagonal({1, 0})}}), InvalidState);
  EXPECT_THROW(measure_to_cqq(ghz3(), computational_povm(3)), InvalidState);
}

TEST(Choi, IdentityChannelGivesBellState) {
  EXPECT_LE(max_abs_diff(choi(identity_channel(2)).mat, bell_state().mat), 1e-15);
}

TEST(Choi, FullyDepolarizingGivesMaximallyMixed) {
  EXPECT_LE(max_abs_diff(choi(fully_depolarizing_channel(2)).mat, CMatrix::identity(4) * cplx(0.25)), 1e-15);
}

TEST(Choi, DephasingIsBellDiagonal) {
  const double p = 0.3;
  const CMatrix c = choi(dephasing_channel(p)).mat;
  // Kraus expansion by hand: (1-p/2) Phi+ + (p/2) Phi-.
  const double h = 1.0 / std::sqrt(2.0);
  const CMatrix expected = CMatrix::projector(CVector{h, 0, 0, h}) * cplx(1 - p / 2) +
                           CMatrix::projector(CVector{h, 0, 0, -h}) * cplx(p / 2);
  EXPECT_LE(max_abs_diff(c, expected), 1e-15);
}

TEST(Choi, RoundTripThroughKraus) {
  Rng rng(26);
  const DensityMatrix rho = random_state({3, 2}, 6, rng);
  // Give the reference a maximally mixed marginal: choi of some channel.
  Channel c{{}, 2, 3, {}};
  const CMatrix v = orthonormalize_columns(ginibre(6, 2, rng));  // isometry 2 -> 3 (x) 2
  for (std::size_t e = 0; e < 2; ++e) {
    CMatrix k(3, 2);
    for (std::size_t o = 0; o < 3; ++o)
      for (std::size_t i = 0; i < 2; ++i) k(o, i) = v(o * 2 + e, i);
    c.kraus.push_back(k);
  }
  const DensityMatrix j = choi(c);
  const DensityMatrix back = choi(channel_from_choi(j));
  EXPECT_LE(max_abs_diff(back.mat, j.mat), 1e-12);
  (void)rho;
}

TEST(ApplyChannel, IdentityLeavesState) {
  Rng rng(27);
  const DensityMatrix rho = random_state({2, 3}, 4, rng, {"A", "B"});
  const Indices t{1};
  EXPECT_LE(max_abs_diff(apply_channel(identity_channel(3), rho, t).mat, rho.mat), 1e-15);
}

TEST(ApplyChannel, DepolarizingHalfOfBellGivesIsotropic) {
  const double p = 0.4;
  const Indices t{1};
  const CMatrix out = apply_channel(depolarizing_channel(p), bell_state(), t).mat;
  const CMatrix expected = bell_state().mat * cplx(1 - p) + CMatrix::identity(4) * cplx(p / 4);
  EXPECT_LE(max_abs_diff(out, expected), 1e-15);
}

TEST(ApplyChannel, AgreesWithChoiOnProductInputs) {
  Rng rng(28);
  const Channel c = compose(depolarizing_channel(0.2), dephasing_channel(0.5));
  const DensityMatrix sigma = random_state({2}, 2, rng, {"B"});
  const DensityMatrix out = apply_channel(c, sigma, Indices{0});
  // Lambda(sigma) = d Tr_A[(sigma^T (x) I) J].
  const CMatrix j = choi(c).mat;
  CMatrix viaChoi(2, 2);
  for (std::size_t o1 = 0; o1 < 2; ++o1)
    for (std::size_t o2 = 0; o2 < 2; ++o2)
      for (std::size_t i1 = 0; i1 < 2; ++i1)
        for (std::size_t i2 = 0; i2 < 2; ++i2) viaChoi(o1, o2) += 2.0 * sigma.mat(i1, i2) * j(i1 * 2 + o1, i2 * 2 + o2);
  EXPECT_LE(max_abs_diff(out.mat, viaChoi), 1e-10);
}

TEST(ApplyChannel, DimensionMismatchThrows) {
  const Indices t{0};
  EXPECT_THROW(apply_channel(identity_channel(3), bell_state(), t), InvalidState);
}

TEST(Compose, ChoiSpectrumMatchesKrausComposition) {
  const Channel a = depolarizing_channel(0.3), b = dephasing_channel(0.6);
  const Channel ab = compose(a, b);
  // Sequential application on half of |Phi+>.
  const Indices t{1};
  const DensityMatrix seq = apply_channel(a, apply_channel(b, bell_state(), t), t);
  const auto x = hermitian_eig(choi(ab).mat).eigenvalues, y = hermitian_eig(seq.mat).eigenvalues;
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(x[k], y[k], 1e-9);
}

TEST(Channel, RejectsNonTracePreserving) {
  Channel c{{CMatrix::diagonal({1, 0.5})}, 2, 2, {}};
  EXPECT_THROW(choi(c), InvalidState);
}

TEST(Constructors, OutputsPassValidate) {
  Rng rng(29);
  EXPECT_TRUE(validate(bell_state()).pass);
  EXPECT_TRUE(validate(maximally_mixed({2, 3})).pass);
  EXPECT_TRUE(validate(random_state({2, 2}, 3, rng)).pass);
  EXPECT_TRUE(validate(random_pure({3, 2}, rng)).pass);
  EXPECT_TRUE(validate(choi(depolarizing_channel(0.5))).pass);
  EXPECT_TRUE(validate(purify(random_state({3}, 2, rng))).pass);
}
