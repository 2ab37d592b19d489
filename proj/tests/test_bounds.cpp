#include <gtest/gtest.h>

#include <cmath>

#include "redbound/bounds.hpp"
#include "redbound/zoo.hpp"

using namespace redbound;

namespace {

SearchConfig with_min_discarded(std::size_t n) {
  SearchConfig cfg;
  cfg.min_discarded = n;
  return cfg;
}

// Entropy of a diagonal single-qubit reduction, computed from populations.
double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

}  // namespace

TEST(Defects, PureDiscardedPartIsFree) {
  Rng rng(71);
  const DensityMatrix p = random_pure({3}, rng);
  EXPECT_NEAR(defect_key(p), 0.0, 1e-10);
  EXPECT_NEAR(defect_dist(p), 0.0, 1e-10);
  EXPECT_NEAR(defect_private(p), 0.0, 1e-10);
}

TEST(Defects, MaximallyMixedQubits) {
  EXPECT_NEAR(defect_key(maximally_mixed({2})), 4.0, 1e-12);
  EXPECT_NEAR(defect_key(maximally_mixed({2, 2})), 8.0, 1e-12);
  EXPECT_NEAR(defect_dist(maximally_mixed({2})), 2.0, 1e-12);
  EXPECT_NEAR(defect_private(maximally_mixed({2})), 4.0, 1e-12);
  EXPECT_THROW(state_defect(Quantity::ChannelCapacity, maximally_mixed({2})), InvalidState);
}

TEST(Defects, AdditiveOnProductsSubadditiveOtherwise) {
  Rng rng(72);
  for (int t = 0; t < 30; ++t) {
    const DensityMatrix r = random_state({2}, 2, rng), s = random_state({3}, 2, rng);
    EXPECT_NEAR(defect_key(tensor(r, s)), defect_key(r) + defect_key(s), 1e-9);
    EXPECT_NEAR(defect_dist(tensor(r, s)), defect_dist(r) + defect_dist(s), 1e-9);
    const DensityMatrix joint = random_state({2, 3}, 1 + t % 6, rng);
    const Indices b{0}, bp{1};
    EXPECT_LE(defect_key(joint), defect_key(reduce(joint, b)) + defect_key(reduce(joint, bp)) + 1e-8);
    EXPECT_GE(defect_dist(joint), -1e-12);
  }
}

TEST(Quantity, ParseRoundTrip) {
  for (auto q : {Quantity::KeyRate, Quantity::DistillableEnt, Quantity::ChannelCapacity, Quantity::PrivateCapacity})
    EXPECT_EQ(parse_quantity(to_string(q)), q);
  EXPECT_FALSE(parse_quantity("Nonsense").has_value());
}

TEST(ChannelDefect, TrivialDiscardIsZero) {
  const Indices none{};
  EXPECT_EQ(defect_channel(identity_channel(2), none), 0.0);
}

TEST(ChannelDefect, AnalyticCapForOneQubit) {
  const Channel c{{CMatrix::identity(4)}, 4, 4, {2, 2}};
  const Indices bp{1};
  EXPECT_NEAR(defect_channel(c, bp), 2.0, 1e-15);
}

TEST(ChannelDefect, SearchFindsMaximallyMixedInput) {
  const Channel c{{CMatrix::identity(4)}, 4, 4, {2, 2}};
  const Indices bp{1};
  ChannelDefectConfig cfg;
  cfg.search = true;
  const double v = defect_channel(c, bp, cfg);
  EXPECT_NEAR(v, 2.0, 1e-3);
  EXPECT_LE(v, 2.0);
}

TEST(ChannelDefect, SearchNeverExceedsCap) {
  Rng rng(73);
  const Channel c = compose(Channel{{CMatrix::identity(4)}, 4, 4, {2, 2}},
                            Channel{{haar_unitary(4, rng)}, 4, 4, {}});
  const Indices bp{0};
  ChannelDefectConfig cfg;
  cfg.search = true;
  cfg.steps = 50;
  EXPECT_LE(defect_channel(c, bp, cfg), defect_channel(c, bp) + 1e-12);
}

TEST(StateBound, ExtendibleInputCostsNothing) {
  const DensityMatrix u = upsilon_state(2);
  const BoundReport r = certified_state_bound(u, Quantity::KeyRate);
  EXPECT_TRUE(r.certified);
  EXPECT_EQ(r.bound_bits, 0.0);
  EXPECT_TRUE(r.plan.discarded_parts.empty());
  EXPECT_EQ(r.plan.bob_parts, (Indices{1}));
}

TEST(StateBound, Example1KeyRateIsFour) {
  const BoundReport r = certified_state_bound(block_singlet_state(2, 1.0), Quantity::KeyRate);
  ASSERT_TRUE(r.certified);
  EXPECT_NEAR(r.bound_bits, 4.0, 1e-9);
  EXPECT_EQ(r.bound_bits, r.defect_bits);
  EXPECT_EQ(r.plan.discarded_parts, (Indices{3}));
  EXPECT_TRUE(is_feasible(r.certificate.verdict));
}

TEST(StateBound, ZeroAmplitudeBlockStateIsFree) {
  const BoundReport r = certified_state_bound(block_singlet_state(2, 0.0), Quantity::KeyRate);
  ASSERT_TRUE(r.certified);
  EXPECT_NEAR(r.bound_bits, 0.0, 1e-12);
}

TEST(StateBound, Example2AfterDiscardingOneBobQubit) {
  const BoundReport r =
      certified_state_bound(example2_state(2, complete_graph(7)), Quantity::KeyRate, with_min_discarded(1));
  ASSERT_TRUE(r.certified);
  EXPECT_NEAR(r.bound_bits, 4.0, 1e-9);
  EXPECT_EQ(r.plan.discarded_parts.size(), 1u);
}

TEST(StateBound, DurDistillableEqualsTwiceReductionEntropy) {
  const DensityMatrix rho = dur_equal_state(5);
  const BoundReport r = certified_state_bound(rho, Quantity::DistillableEnt, with_min_discarded(1));
  ASSERT_TRUE(r.certified);
  ASSERT_EQ(r.plan.discarded_parts.size(), 1u);
  const std::size_t q = r.plan.discarded_parts[0];
  // Population of |0> on qubit q, read off the diagonal.
  double p0 = 0.0;
  for (std::size_t i = 0; i < rho.dim(); ++i)
    if (((i >> (4 - q)) & 1U) == 0) p0 += rho.mat(i, i).real();
  EXPECT_NEAR(r.bound_bits, 2.0 * binary_entropy(p0), 1e-9);
}

TEST(StateBound, PureBellHasNoCertificate) {
  const BoundReport r = certified_state_bound(bell_state(), Quantity::KeyRate);
  EXPECT_FALSE(r.certified);
  EXPECT_TRUE(std::isinf(r.bound_bits));
  EXPECT_EQ(r.certificate.verdict, Verdict::InfeasibleClosedForm);
}

TEST(StateBound, UnlabeledStateThrows) {
  const DensityMatrix rho = make_state(CMatrix::identity(4) * cplx(0.25), {2, 2});
  EXPECT_THROW(certified_state_bound(rho, Quantity::KeyRate), InvalidState);
  EXPECT_THROW(certified_state_bound(bell_state(), Quantity::ChannelCapacity), InvalidState);
}

TEST(StateBound, UnitarySearchNeverWorsensIdentityPlan) {
  // Bob holds half a Bell pair in B0 and a fresh qubit in B1.
  const DensityMatrix rho = relabel(tensor(bell_state(), pure_state({1.0, 0.0}, {2})), {"A", "B0", "B1"});
  SearchConfig plain = with_min_discarded(1);
  SearchConfig searched = plain;
  searched.unitary_search = true;
  searched.unitary_restarts = 2;
  searched.unitary_steps = 40;
  searched.unitary_probe_iters = 100;
  searched.seed = 5;
  const BoundReport a = certified_state_bound(rho, Quantity::KeyRate, plain);
  const BoundReport b = certified_state_bound(rho, Quantity::KeyRate, searched);
  ASSERT_TRUE(a.certified);
  ASSERT_TRUE(b.certified);
  EXPECT_LE(b.bound_bits, a.bound_bits + 1e-9);
  if (b.plan.unitary) {
    EXPECT_LE(unitarity_defect(*b.plan.unitary), 1e-9);
  }
}

TEST(StateBound, DiscardedSetsAreMonotone) {
  Rng rng(74);
  const DensityMatrix rho = random_state({2, 2, 2}, 8, rng, {"A", "B0", "B1"});
  const Indices b0{1}, b1{2}, both{1, 2};
  const double d0 = defect_key(reduce(rho, b0)), d1 = defect_key(reduce(rho, b1)), d01 = defect_key(reduce(rho, both));
  EXPECT_LE(d01, d0 + d1 + 1e-8);
  EXPECT_GE(d0, 0.0);
}

TEST(ChannelBound, Example3IsTwoBits) {
  const BoundReport r = certified_channel_bound(example3_channel(), Quantity::ChannelCapacity, with_min_discarded(1));
  ASSERT_TRUE(r.certified);
  EXPECT_NEAR(r.bound_bits, 2.0, 1e-9);
  EXPECT_EQ(r.plan.discarded_parts.size(), 1u);
}

TEST(ChannelBound, IdentityQubitChannelIsUncertified) {
  const BoundReport r = certified_channel_bound(identity_channel(2), Quantity::ChannelCapacity);
  EXPECT_FALSE(r.certified);
  EXPECT_TRUE(std::isinf(r.bound_bits));
}

TEST(ChannelBound, FullyDepolarizingIsFree) {
  for (auto q : {Quantity::ChannelCapacity, Quantity::PrivateCapacity}) {
    const BoundReport r = certified_channel_bound(fully_depolarizing_channel(2), q);
    ASSERT_TRUE(r.certified);
    EXPECT_EQ(r.bound_bits, 0.0);
  }
  EXPECT_THROW(certified_channel_bound(identity_channel(2), Quantity::KeyRate), InvalidState);
}

TEST(Witnesses, BellHasOneBitAndNoBound) {
  EXPECT_NEAR(coherent_info_witness(bell_state()), 1.0, 1e-12);
  EXPECT_FALSE(certified_state_bound(bell_state(), Quantity::KeyRate).certified);
}

TEST(Witnesses, UpsilonBracketCollapses) {
  const DensityMatrix u = upsilon_state(2);
  EXPECT_LE(coherent_info_witness(u), 1e-12);
  EXPECT_LE(dw_witness(u), 1e-8);
  EXPECT_EQ(certified_state_bound(u, Quantity::KeyRate).bound_bits, 0.0);
}

TEST(Witnesses, Example1WitnessesBelowBound) {
  const DensityMatrix rho = block_singlet_state(2, 1.0);
  const double bound = certified_state_bound(rho, Quantity::KeyRate).bound_bits;
  EXPECT_LE(dw_witness(rho), bound + 1e-8);
  EXPECT_LE(coherent_info_witness(rho), bound + 1e-8);
}

TEST(Witnesses, DwWitnessMatchesExplicitPurification) {
  // Classical correlations with no Eve leakage: X = B uniform bit.
  const DensityMatrix rho = make_state(CMatrix::diagonal({0.5, 0, 0, 0.5}), {2, 2}, {"A", "B"});
  EXPECT_NEAR(dw_witness(rho), 0.0, 1e-10);  // purification copies the bit to Eve
  EXPECT_NEAR(dw_witness(bell_state()), 1.0, 1e-10);
}
