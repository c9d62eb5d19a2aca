#include <gtest/gtest.h>

#include <random>

#include "nrc/encoding.hpp"
#include "test_util.hpp"

using namespace nrc;

namespace {

std::vector<Shift> row(const std::string& cells) {
  std::vector<Shift> out;
  for (char c : cells) {
    if (c == ' ') continue;
    out.push_back(c == 'O' ? 0 : c == 'D' ? 1 : c == 'N' ? 2 : static_cast<Shift>(c - '0'));
  }
  return out;
}

ProblemInstance shape(int d, int s) {
  ProblemInstance p;
  p.name = "shape";
  p.n = 1;
  p.d = d;
  p.s = s;
  return p;
}

std::array<double, kDerivedFeatures> raw(const std::string& cells) { return derived_features(row(cells), false); }

enum Feature { kIsolatedShift, kIsolatedOff, kMaxShiftBlock, kMaxOffBlock, kAssigned, kShiftBlocks, kOffBlocks,
               kTransitions };

}  // namespace

TEST(Encoding, RealValuesPerDay) {
  const auto v = encode_real(shape(3, 2), row("ODN"), row("DDO"));
  const std::vector<double> want = {0, 0.5, 1, 0.5, 0.5, 0};
  EXPECT_EQ(v, want);
}

TEST(Encoding, IdentityChangeHasEqualHalves) {
  const auto r = row("DNOODN");
  const auto v = encode_real(shape(6, 2), r, r);
  EXPECT_TRUE(std::equal(v.begin(), v.begin() + 6, v.begin() + 6));
}

TEST(Encoding, RealRoundTrip) {
  std::mt19937_64 rng(3);
  for (int s = 1; s <= 10; ++s)
    for (int t = 0; t < 20; ++t) {
      const int d = 1 + rng() % 30;
      std::vector<Shift> a(d), b(d);
      for (auto& c : a) c = rng() % (s + 1);
      for (auto& c : b) c = rng() % (s + 1);
      const auto [da, db] = decode_real(encode_real(shape(d, s), a, b), s);
      EXPECT_EQ(da, a);
      EXPECT_EQ(db, b);
    }
}

TEST(Encoding, BinaryCompactConvention) {
  const auto v = encode_binary(shape(3, 2), row("ODN"), row("OOO"));
  const std::vector<double> want = {0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0};
  EXPECT_EQ(v, want);
  const auto zero = encode_binary(shape(4, 3), row("OOOO"), row("OOOO"));
  EXPECT_TRUE(std::all_of(zero.begin(), zero.end(), [](double x) { return x == 0; }));
}

TEST(Encoding, BinaryGroupsHoldAtMostOneBit) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    const int s = 1 + rng() % 5, d = 1 + rng() % 20;
    std::vector<Shift> a(d), b(d);
    for (auto& c : a) c = rng() % (s + 1);
    for (auto& c : b) c = rng() % (s + 1);
    for (bool literal : {false, true}) {
      const auto v = encode_binary(shape(d, s), a, b, literal);
      const int width = literal ? s + 1 : s;
      ASSERT_EQ(v.size(), static_cast<std::size_t>(2 * d * width));
      for (int g = 0; g < 2 * d; ++g) {
        double ones = 0;
        for (int k = 0; k < width; ++k) ones += v[g * width + k];
        EXPECT_LE(ones, 1.0);
        if (literal) EXPECT_EQ(v[g * width], 0.0);  // the day-off bit stays clear
        const Shift cell = g < d ? a[g] : b[g - d];
        EXPECT_EQ(ones, cell ? 1.0 : 0.0);
      }
    }
  }
}

TEST(Encoding, WindowIsCentredAndPadded) {
  EncodingSpec spec = EncodingSpec::parse_tag("real.w5");
  const auto before = row("DNDNDNDN");
  auto after = before;
  after[0] = 0;
  std::vector<double> out(spec.size(8, 2));
  ASSERT_EQ(out.size(), 10u);
  encode(spec, 2, before, after, 0, out);
  const std::vector<double> want = {0, 0, 0.5, 1, 0.5, 0, 0, 0, 1, 0.5};
  EXPECT_EQ(out, want);
  encode(spec, 2, before, before, 7, out);
  const std::vector<double> tail = {1, 0.5, 1, 0, 0, 1, 0.5, 1, 0, 0};
  EXPECT_EQ(out, tail);
}

TEST(Encoding, FeaturesFollowEachHalf) {
  const EncodingSpec spec = EncodingSpec::parse_tag("binary.w3.f");
  EXPECT_EQ(spec.size(10, 2), 2 * (3 * 2 + kDerivedFeatures));
  const auto before = row("DDDOOOONNN");
  auto after = before;
  after[4] = 1;
  std::vector<double> out(spec.size(10, 2));
  encode(spec, 2, before, after, 4, out);
  const auto fb = derived_features(before);
  const auto fa = derived_features(after);
  EXPECT_TRUE(std::equal(fb.begin(), fb.end(), out.begin() + 6));
  EXPECT_TRUE(std::equal(fa.begin(), fa.end(), out.begin() + 14 + 6));
}

TEST(Encoding, DimensionChecks) {
  const EncodingSpec spec;
  std::vector<double> out(5);
  EXPECT_THROW(encode(spec, 2, row("DD"), row("DDD"), 0, out), DimensionMismatch);
  EXPECT_THROW(encode(spec, 2, row("DD"), row("DN"), 0, out), DimensionMismatch);
  EXPECT_THROW(decode_real(std::vector<double>{0.5, 0.5, 1}, 2), DimensionMismatch);
}

TEST(Encoding, TagsRoundTrip) {
  for (const char* t : {"real", "binary", "literal", "real.w3", "binary.w5.f", "literal.raw", "binary.w7.f"})
    EXPECT_EQ(EncodingSpec::parse_tag(t).tag(), t);
  EXPECT_THROW(EncodingSpec::parse_tag("ternary"), FormatError);
  EXPECT_THROW(EncodingSpec::parse_tag("real.w0"), FormatError);
  EXPECT_THROW(EncodingSpec::parse_tag("real.x"), FormatError);
}

TEST(Features, LongestBlocks) {
  const auto f = raw("O O O D D D O O N N N N");
  EXPECT_EQ(f[kMaxShiftBlock], 4);
  EXPECT_EQ(f[kMaxOffBlock], 3);
}

TEST(Features, BlockCounts) {
  const auto f = raw("O O D O O N O O N N");
  EXPECT_EQ(f[kShiftBlocks], 3);
  EXPECT_EQ(f[kOffBlocks], 3);
  EXPECT_EQ(f[kAssigned], 4);
}

TEST(Features, Transitions) {
  EXPECT_EQ(raw("O D D D D")[kTransitions], 1);
  EXPECT_EQ(raw("O D D N D")[kTransitions], 3);
}

TEST(Features, IsolatedCellsUseBothNeighbours) {
  const auto f = raw("D O O D D O N O");
  EXPECT_EQ(f[kIsolatedShift], 1);  // N on day 7; the D on day 1 has only one neighbour
  EXPECT_EQ(f[kIsolatedOff], 1);
  const auto n = derived_features(row("D O O D D O N O"));
  EXPECT_DOUBLE_EQ(n[kIsolatedShift], 1.0 / 8);
}

TEST(Labels, PseudoClasses) {
  EXPECT_EQ(label_sample(0, 10), PseudoClass::Equal);
  EXPECT_EQ(target_of(label_sample(0, 10)), 0.5);
  EXPECT_EQ(label_sample(1, 10), PseudoClass::Good);
  EXPECT_EQ(label_sample(10, 10), PseudoClass::VeryGood);
  EXPECT_EQ(label_sample(-9, 10), PseudoClass::Bad);
  EXPECT_EQ(label_sample(-10, 10), PseudoClass::VeryBad);
  EXPECT_EQ(binary_label(PseudoClass::Good), 1);
  EXPECT_EQ(binary_label(PseudoClass::Equal), -1);
}

TEST(Labels, NearestClass) {
  EXPECT_EQ(nearest_class(0.0), PseudoClass::VeryBad);
  EXPECT_EQ(nearest_class(0.15), PseudoClass::VeryBad);  // tie goes to the lower class
  EXPECT_EQ(nearest_class(0.31), PseudoClass::Bad);
  EXPECT_EQ(nearest_class(0.52), PseudoClass::Equal);
  EXPECT_EQ(nearest_class(0.75), PseudoClass::Good);
  EXPECT_EQ(nearest_class(0.9), PseudoClass::VeryGood);
}

TEST(Fingerprint, SensitiveToValuesAndSeed) {
  const std::vector<double> a = {0, 0.5, 1}, b = {0, 0.5, 0.5};
  EXPECT_EQ(fingerprint(a), fingerprint(a));
  EXPECT_NE(fingerprint(a), fingerprint(b));
  EXPECT_NE(fingerprint(a, 1), fingerprint(a, 2));
}
