#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nrc/instance.hpp"

namespace nrc {

// Ordinal quality of one employee's change, from Z_i(before) - Z_i(after).
enum class PseudoClass : std::uint8_t { VeryBad = 0, Bad = 1, Equal = 2, Good = 3, VeryGood = 4 };
inline constexpr int kClassCount = 5;

double target_of(PseudoClass label);          // 0, 0.3, 0.5, 0.7, 1
PseudoClass nearest_class(double output);     // closest target, lower class on exact ties
PseudoClass label_sample(Cost delta_z_i, Cost tau);
inline int binary_label(PseudoClass c) { return c >= PseudoClass::Good ? 1 : -1; }
std::string_view to_string(PseudoClass label);

enum class ShiftEncoding : std::uint8_t {
  Real,           // k/s per day
  Binary,         // s bits per day, day off = all zero
  BinaryLiteral,  // s+1 bits per day; bit 0 stands for the day off and is never set
};

// How a change (row before, row after, changed day) becomes a classifier input.
struct EncodingSpec {
  ShiftEncoding shifts = ShiftEncoding::Real;
  int window = 0;              // days per half centred on the changed day; 0 = whole period
  bool features = false;       // append 8 derived features for each half
  bool raw_features = false;   // features as counts instead of count / d

  int size(int d, int s) const;
  std::string tag() const;  // e.g. "real", "binary.w5.f", "literal.raw"
  static EncodingSpec parse_tag(std::string_view tag);
  bool operator==(const EncodingSpec&) const = default;
};

inline constexpr int kDerivedFeatures = 8;

// isolated shifts, isolated days off, longest shift block, longest off block, shifts
// assigned, shift blocks, off blocks, transitions between consecutive cells.
std::array<double, kDerivedFeatures> derived_features(std::span<const Shift> row, bool normalize = true);

// Writes spec.size(d, s) values; `after` must differ from `before` at most at `day`.
void encode(const EncodingSpec& spec, int s, std::span<const Shift> before, std::span<const Shift> after, int day,
            std::span<double> out);

std::vector<double> encode_real(const ProblemInstance& instance, std::span<const Shift> before,
                                std::span<const Shift> after);
std::vector<double> encode_binary(const ProblemInstance& instance, std::span<const Shift> before,
                                  std::span<const Shift> after, bool literal = false);
// Inverse of encode_real.
std::pair<std::vector<Shift>, std::vector<Shift>> decode_real(std::span<const double> pattern, int s);

// FNV-1a over the bytes of a value vector.
std::uint64_t fingerprint(std::span<const double> values, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace nrc
