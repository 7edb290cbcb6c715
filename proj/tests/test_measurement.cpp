#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "clothbench/error.hpp"
#include "clothbench/measurement.hpp"
#include "oracles.hpp"

using namespace clothbench;

namespace {

constexpr double kExact = 1e-9;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no clothbench::Error thrown";
  return ErrorCode::InvalidArgument;
}

// Halve the current longest edge until both fit; ties fold the height.
EffectiveRectangle fold_by_hand(double w, double h, double max_edge) {
  int folds = 0;
  while (w > max_edge || h > max_edge) {
    if (w > h) w /= 2.0;
    else h /= 2.0;
    ++folds;
  }
  return {w, h, folds};
}

}  // namespace

TEST(PlateDiameter, Examples) {
  EXPECT_NEAR(plate_diameter(300.0), 180.0, kExact);
  EXPECT_NEAR(plate_diameter(300.0, 0.5), 150.0, kExact);
  EXPECT_EQ(code_of([] { (void)plate_diameter(300.0, 1.2); }), ErrorCode::InvalidRatio);
  EXPECT_EQ(code_of([] { (void)plate_diameter(300.0, 0.0); }), ErrorCode::InvalidRatio);
  EXPECT_NEAR(plate_area_mm2(180.0), std::numbers::pi * 90.0 * 90.0, kExact);
}

TEST(FoldToFit, Examples) {
  EXPECT_EQ(fold_to_fit(300.0, 500.0), (EffectiveRectangle{300.0, 500.0, 0}));
  EXPECT_EQ(fold_to_fit(1400.0, 2000.0), (EffectiveRectangle{350.0, 500.0, 4}));
  EXPECT_EQ(fold_to_fit(450.0, 600.0), (EffectiveRectangle{450.0, 300.0, 1}));
}

TEST(FoldToFit, MatchesHandHalvingAndFits) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(10.0, 5000.0);
  for (int i = 0; i < 1000; ++i) {
    const double w = u(rng);
    const double h = u(rng);
    const auto r = fold_to_fit(w, h);
    EXPECT_EQ(r, fold_by_hand(w, h, 500.0));
    EXPECT_LE(r.width_mm, 500.0);
    EXPECT_LE(r.height_mm, 500.0);
    EXPECT_NEAR(r.area_mm2() * std::pow(2.0, r.folds), w * h, 1e-6 * w * h);
  }
}

TEST(NormalizeSample, GarmentUsesBoundingRectangle) {
  ClothObject tee;
  tee.shape = {ShapeKind::TShirt, {}};
  tee.dimensions = {{ReferenceLine::Line1, 450.0}, {ReferenceLine::Line2, 600.0}};
  EXPECT_EQ(normalize_sample(tee), (EffectiveRectangle{450.0, 300.0, 1}));
  ClothObject sheet;
  sheet.dimensions = {{ReferenceLine::Line1, 1400.0}, {ReferenceLine::Line2, 2000.0}};
  EXPECT_EQ(normalize_sample(sheet), (EffectiveRectangle{350.0, 500.0, 4}));
}

TEST(DrapeStiffness, Examples) {
  EXPECT_NEAR(drape_stiffness({900.0, 324.0, 900.0}), 1.0, kExact);
  EXPECT_NEAR(drape_stiffness({900.0, 324.0, 324.0}), 0.0, kExact);
  EXPECT_NEAR(drape_stiffness({900.0, 324.0, 612.0}), 0.5, kExact);
}

TEST(DrapeStiffness, ClampsAndRejects) {
  EXPECT_EQ(drape_stiffness({900.0, 324.0, 910.0}), 1.0);
  EXPECT_EQ(drape_stiffness({900.0, 324.0, 320.0}), 0.0);
  EXPECT_EQ(code_of([] { (void)drape_stiffness({900.0, 324.0, 1200.0}); }), ErrorCode::OutOfRange);
  EXPECT_EQ(code_of([] { (void)drape_stiffness({300.0, 324.0, 310.0}); }), ErrorCode::DegeneratePlate);
  EXPECT_EQ(code_of([] { (void)drape_stiffness({300.0, 0.0, 100.0}); }), ErrorCode::DegeneratePlate);
}

TEST(DrapeStiffness, ScaleInvariant) {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  std::uniform_real_distribution<double> k(0.01, 100.0);
  for (int i = 0; i < 500; ++i) {
    const double a2 = 100.0 + 900.0 * frac(rng);
    const double a1 = a2 * (1.5 + 3.0 * frac(rng));
    const double a3 = a2 + (a1 - a2) * frac(rng);
    const double s = k(rng);
    const double base = drape_stiffness({a1, a2, a3});
    EXPECT_NEAR(drape_stiffness({s * a1, s * a2, s * a3}), base, 1e-12);
    EXPECT_GE(base, 0.0);
    EXPECT_LE(base, 1.0);
  }
}

TEST(Elasticity, Examples) {
  EXPECT_NEAR(elasticity({ReferenceLine::Line1, 200.0, 200.0}), 0.0, kExact);
  EXPECT_NEAR(elasticity({ReferenceLine::Line1, 100.0, 150.0}), 0.5, kExact);
  EXPECT_NEAR(elasticity({ReferenceLine::Line1, 100.0, 187.0}), 0.87, kExact);
  EXPECT_EQ(code_of([] { (void)elasticity({ReferenceLine::Line1, 0.0, 10.0}); }), ErrorCode::InvalidLengths);
  EXPECT_EQ(code_of([] { (void)elasticity({ReferenceLine::Line1, 100.0, 90.0}); }), ErrorCode::InvalidLengths);
}

TEST(ElasticityProfile, SummaryIsMax) {
  const auto single = elasticity_profile({{ReferenceLine::Line1, 100.0, 130.0}});
  EXPECT_NEAR(single.summary, 0.3, kExact);
  const auto two = elasticity_profile({{ReferenceLine::Line1, 100.0, 110.0}, {ReferenceLine::Line2, 100.0, 140.0}});
  EXPECT_NEAR(two.summary, 0.4, kExact);
  ASSERT_EQ(two.per_line.size(), 2u);
  EXPECT_EQ(code_of([] {
              (void)elasticity_profile({{ReferenceLine::Line1, 100.0, 110.0}, {ReferenceLine::Line1, 100.0, 120.0}});
            }),
            ErrorCode::DuplicateLine);
  EXPECT_EQ(code_of([] { (void)elasticity_profile({}); }), ErrorCode::InvalidArgument);
}

TEST(Friction, Examples) {
  EXPECT_NEAR(friction_coefficient({0.0, 60.0}), 0.0, kExact);
  EXPECT_NEAR(friction_coefficient({100.0 / std::sqrt(2.0), 100.0}), 1.0, kExact);
  EXPECT_NEAR(friction_coefficient({30.0, 60.0}), 0.5 / std::sqrt(0.75), kExact);
  EXPECT_NEAR(friction_coefficient({30.0, 60.0}), 0.57735, 1e-5);
  EXPECT_EQ(code_of([] { (void)friction_coefficient({60.0, 60.0}); }), ErrorCode::SlideAngleInvalid);
  EXPECT_EQ(code_of([] { (void)friction_coefficient({-1.0, 60.0}); }), ErrorCode::SlideAngleInvalid);
}

TEST(Friction, MatchesTanAsinIdentity) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> ratio(0.0, 0.999);
  for (int i = 0; i < 1000; ++i) {
    const double r = ratio(rng);
    const double mu = friction_coefficient({r * 250.0, 250.0});
    EXPECT_NEAR(mu, std::tan(std::asin(r)), 1e-12 * std::max(1.0, mu));
  }
}

TEST(CriticalHeight, ExamplesAndRoundTrip) {
  EXPECT_NEAR(critical_height(0.0, 100.0), 0.0, kExact);
  EXPECT_NEAR(critical_height(1.0, 100.0), 100.0 / std::sqrt(2.0), kExact);
  EXPECT_NEAR(critical_height(1.0 / std::sqrt(3.0), 60.0), 30.0, 1e-6);
  // 0.577350 is 1/sqrt(3) rounded to six places; dh/dmu = l / (1 + mu^2)^1.5.
  EXPECT_NEAR(critical_height(0.577350, 60.0), 30.0, 60.0 * 5e-7 / std::pow(4.0 / 3.0, 1.5));
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> mu(0.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double m = mu(rng);
    EXPECT_NEAR(friction_coefficient({critical_height(m, 80.0), 80.0}), m, 1e-9 * std::max(1.0, m));
  }
}

TEST(Records, RederiveMatchesValue) {
  StiffnessRaw s;
  s.areas = {900.0, 324.0, 612.0};
  const auto stiff = make_record("A", s);
  EXPECT_EQ(stiff.kind(), PropertyKind::Stiffness);
  EXPECT_NEAR(stiff.value, 0.5, kExact);
  EXPECT_EQ(rederive(stiff.raw), stiff.value);
  EXPECT_TRUE(stiff.timestamp.empty());

  const auto el = make_record("C", ElasticityInputs{ReferenceLine::Line1, 100.0, 187.0});
  EXPECT_EQ(el.kind(), PropertyKind::Elasticity);
  EXPECT_NEAR(el.value, 0.87, kExact);

  const auto fr = make_record("", FrictionRaw{{30.0, 60.0}, kFrictionSurface});
  EXPECT_EQ(fr.kind(), PropertyKind::Friction);
  EXPECT_NEAR(fr.value, 0.57735026919, 1e-9);
  EXPECT_EQ(parse_property_kind(to_string(PropertyKind::Friction)), PropertyKind::Friction);
}

TEST(StiffnessImaging, SyntheticDisks) {
  const double plate_d = 180.0;
  const auto flat = oracle::disk_image(400, 400, 200.0, 200.0, 150.0);
  const auto plate_sized = oracle::disk_image(400, 400, 200.0, 200.0, 90.0);
  ImageCalibration cal;
  cal.scale_mm_per_px = 1.0;
  const auto same = stiffness_from_images(flat, flat, {plate_d}, {}, cal);
  EXPECT_NEAR(same.value, 1.0, 0.02);
  const auto draped = stiffness_from_images(flat, plate_sized, {plate_d}, {}, cal);
  EXPECT_NEAR(draped.value, 0.0, 0.02);
  EXPECT_EQ(rederive(draped.raw), draped.value);
}

TEST(StiffnessImaging, PlateMaskCalibrationAndHalfDrape) {
  const double plate_d = 180.0;
  const double r_flat = 150.0;
  const double r_mid = std::sqrt((r_flat * r_flat + 90.0 * 90.0) / 2.0);
  ImageCalibration cal;
  cal.plate_mask = oracle::disk_mask(400, 400, 200.0, 200.0, 90.0);
  const auto rec = stiffness_from_images(oracle::disk_image(400, 400, 200.0, 200.0, r_flat),
                                         oracle::disk_image(400, 400, 200.0, 200.0, r_mid), {plate_d}, {}, cal);
  EXPECT_NEAR(rec.value, 0.5, 0.02);
}

TEST(StiffnessImaging, FoldedFlatAreaAndMissingScale) {
  const auto draped = oracle::disk_image(400, 400, 200.0, 200.0, 120.0);
  ImageCalibration cal;
  cal.scale_mm_per_px = 1.0;
  const double a1 = 350.0 * 500.0 / 4.0;
  const auto rec = stiffness_from_images(std::nullopt, draped, {180.0}, {}, cal, a1, 2);
  const auto& raw = std::get<StiffnessRaw>(rec.raw);
  EXPECT_EQ(raw.areas.a1_mm2, a1);
  EXPECT_EQ(raw.fold_count, 2);
  EXPECT_EQ(code_of([&] { (void)stiffness_from_images(draped, draped, {180.0}, {}, ImageCalibration{}); }),
            ErrorCode::MissingScale);
}
