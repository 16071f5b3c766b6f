#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "vlsm/error.hpp"
#include "vlsm/volume.hpp"

using namespace vlsm;
using testing_support::cube;

TEST(VolumeGeometry, LinearizesXFastest) {
  const VolumeGeometry g({4, 3, 2}, {1, 1, 1});
  EXPECT_EQ(g.voxel_count(), 24u);
  EXPECT_EQ(g.index(1, 0, 0), 1u);
  EXPECT_EQ(g.index(0, 1, 0), 4u);
  EXPECT_EQ(g.index(0, 0, 1), 12u);
  for (std::size_t i = 0; i < g.voxel_count(); ++i) {
    const auto c = g.coords(i);
    EXPECT_EQ(g.index(c[0], c[1], c[2]), i);
  }
}

TEST(VolumeGeometry, RejectsBadDimsAndSpacing) {
  EXPECT_THROW(VolumeGeometry({0, 2, 2}, {1, 1, 1}), InputError);
  EXPECT_THROW(VolumeGeometry({2, 2, 2}, {1, 0, 1}), InputError);
  EXPECT_THROW(VolumeGeometry({2, 2, 2}, {1, -2, 1}), InputError);
}

TEST(VolumeGeometry, CompatibilityTolerance) {
  const VolumeGeometry a({4, 4, 4}, {2, 2, 2}, {1, 1, 1});
  EXPECT_TRUE(a.compatible(VolumeGeometry({4, 4, 4}, {2 + 5e-7, 2, 2}, {1, 1, 1 - 5e-7})));
  EXPECT_FALSE(a.compatible(VolumeGeometry({4, 4, 4}, {2 + 1e-5, 2, 2}, {1, 1, 1})));
  EXPECT_FALSE(a.compatible(VolumeGeometry({4, 4, 5}, {2, 2, 2}, {1, 1, 1})));
  EXPECT_THROW(require_compatible(a, VolumeGeometry({4, 4, 5}, {2, 2, 2}), "test"), InputError);
}

TEST(BinaryMask, NormalizesNonzeroBytes) {
  const BinaryMask m(cube(2), {0, 7, 0, 1, 255, 0, 0, 0});
  EXPECT_EQ(m.size(), 3u);
  EXPECT_EQ(m.voxels()[1], 1);
  EXPECT_EQ(m.true_indices(), (std::vector<std::size_t>{1, 3, 4}));
  EXPECT_THROW(BinaryMask(cube(2), {0, 1}), InputError);
}

TEST(BinaryMask, SetAlgebra) {
  BinaryMask a(cube(2)), b(cube(2));
  a.set(0, true);
  a.set(1, true);
  b.set(1, true);
  b.set(2, true);
  EXPECT_EQ(mask_and(a, b).true_indices(), (std::vector<std::size_t>{1}));
  EXPECT_EQ(mask_or(a, b).true_indices(), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(intersection_size(a, b), 1u);
  EXPECT_TRUE(is_subset(mask_and(a, b), a));
  EXPECT_FALSE(is_subset(a, b));
  EXPECT_THROW(mask_and(a, BinaryMask(cube(3))), InputError);
}

TEST(Cohort, Validation) {
  const BinaryMask m(cube(2));
  EXPECT_THROW(Cohort({{"a", m}}, {1.0}), InputError);
  EXPECT_THROW(Cohort({{"a", m}, {"a", m}}, {1.0, 2.0}), InputError);
  EXPECT_THROW(Cohort({{"a", m}, {"b", m}}, {1.0}), InputError);
  EXPECT_THROW(Cohort({{"a", m}, {"b", BinaryMask(cube(3))}}, {1.0, 2.0}), InputError);
  const Cohort c({{"a", m}, {"b", m}}, {1.0, 2.0});
  EXPECT_EQ(c.with_scores({5.0, 6.0}).scores()[1], 6.0);
  EXPECT_THROW(c.with_scores({5.0}), InputError);
}

TEST(OverlapMap, CountsSubjectsPerVoxel) {
  BinaryMask a(cube(2)), b(cube(2)), c(cube(2));
  a.set(0, true);
  b.set(0, true);
  b.set(5, true);
  c.set(7, true);
  const auto map = overlap_map(Cohort({{"a", a}, {"b", b}, {"c", c}}, {0, 0, 0}));
  EXPECT_EQ(map.counts, (std::vector<std::int32_t>{2, 0, 0, 0, 0, 1, 0, 1}));
}

TEST(OverlapMap, SingleSubjectEqualsMask) {
  std::mt19937_64 rng(3);
  const auto m = testing_support::random_mask(cube(5), 0.3, rng);
  BinaryMask other(cube(5));
  const auto map = overlap_map(Cohort({{"a", m}, {"b", other}}, {0, 0}));
  for (std::size_t i = 0; i < m.voxel_count(); ++i) EXPECT_EQ(map.counts[i], m[i] ? 1 : 0);
}

TEST(PercentDamage, HalfOfRoi) {
  // ROI of 4 voxels, lesion covers 2 of them plus one outside.
  BinaryMask roi(cube(2)), lesion(cube(2));
  for (int i : {0, 1, 2, 3}) roi.set(i, true);
  for (int i : {0, 1, 6}) lesion.set(i, true);
  EXPECT_DOUBLE_EQ(percent_damage(lesion, roi), 0.5);
  EXPECT_DOUBLE_EQ(percent_damage(roi, roi), 1.0);
  EXPECT_DOUBLE_EQ(percent_damage(BinaryMask(cube(2)), roi), 0.0);
}

TEST(PercentDamage, EmptyRoiAndMismatchThrow) {
  BinaryMask lesion(cube(2));
  EXPECT_THROW(percent_damage(lesion, BinaryMask(cube(2))), InputError);
  BinaryMask roi(cube(3));
  roi.set(0, true);
  EXPECT_THROW(percent_damage(lesion, roi), InputError);
}
