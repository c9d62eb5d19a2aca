#include "nrc/encoding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>

namespace nrc {

namespace {

constexpr double kTargets[kClassCount] = {0.0, 0.3, 0.5, 0.7, 1.0};

int group_width(ShiftEncoding e, int s) {
  switch (e) {
    case ShiftEncoding::Real: return 1;
    case ShiftEncoding::Binary: return s;
    case ShiftEncoding::BinaryLiteral: return s + 1;
  }
  return 1;
}

// Encodes one half (a row, possibly windowed) and returns the number of values written.
int encode_half(const EncodingSpec& spec, int s, std::span<const Shift> row, int first, int length, double* out) {
  const int d = static_cast<int>(row.size());
  const int width = group_width(spec.shifts, s);
  std::fill(out, out + static_cast<std::size_t>(length) * width, 0.0);
  for (int q = 0; q < length; ++q) {
    const int day = first + q;
    if (day < 0 || day >= d) continue;  // padding reads as a day off
    const Shift c = row[day];
    if (c == kDayOff) continue;
    switch (spec.shifts) {
      case ShiftEncoding::Real: out[q] = static_cast<double>(c) / s; break;
      case ShiftEncoding::Binary: out[q * width + (c - 1)] = 1.0; break;
      case ShiftEncoding::BinaryLiteral: out[q * width + c] = 1.0; break;
    }
  }
  int written = length * width;
  if (spec.features) {
    const auto f = derived_features(row, !spec.raw_features);
    std::copy(f.begin(), f.end(), out + written);
    written += kDerivedFeatures;
  }
  return written;
}

}  // namespace

double target_of(PseudoClass label) { return kTargets[static_cast<int>(label)]; }

PseudoClass nearest_class(double output) {
  int best = 0;
  for (int c = 1; c < kClassCount; ++c)
    if (std::abs(output - kTargets[c]) < std::abs(output - kTargets[best])) best = c;
  return static_cast<PseudoClass>(best);
}

PseudoClass label_sample(Cost delta, Cost tau) {
  if (delta >= tau) return PseudoClass::VeryGood;
  if (delta > 0) return PseudoClass::Good;
  if (delta == 0) return PseudoClass::Equal;
  if (delta > -tau) return PseudoClass::Bad;
  return PseudoClass::VeryBad;
}

std::string_view to_string(PseudoClass label) {
  switch (label) {
    case PseudoClass::VeryBad: return "very_bad";
    case PseudoClass::Bad: return "bad";
    case PseudoClass::Equal: return "equal";
    case PseudoClass::Good: return "good";
    case PseudoClass::VeryGood: return "very_good";
  }
  return "?";
}

int EncodingSpec::size(int d, int s) const {
  const int days = window > 0 ? window : d;
  return 2 * (days * group_width(shifts, s) + (features ? kDerivedFeatures : 0));
}

std::string EncodingSpec::tag() const {
  std::string t = shifts == ShiftEncoding::Real ? "real" : shifts == ShiftEncoding::Binary ? "binary" : "literal";
  if (window > 0) t += ".w" + std::to_string(window);
  if (features) t += raw_features ? ".raw" : ".f";
  return t;
}

EncodingSpec EncodingSpec::parse_tag(std::string_view tag) {
  EncodingSpec spec;
  std::size_t pos = tag.find('.');
  const auto head = tag.substr(0, pos);
  if (head == "real") spec.shifts = ShiftEncoding::Real;
  else if (head == "binary") spec.shifts = ShiftEncoding::Binary;
  else if (head == "literal") spec.shifts = ShiftEncoding::BinaryLiteral;
  else throw FormatError("unknown encoding '" + std::string(tag) + "'");
  while (pos != std::string_view::npos) {
    const std::size_t next = tag.find('.', pos + 1);
    const auto part = tag.substr(pos + 1, next == std::string_view::npos ? std::string_view::npos : next - pos - 1);
    if (part == "f") {
      spec.features = true;
    } else if (part == "raw") {
      spec.features = spec.raw_features = true;
    } else if (part.size() > 1 && part[0] == 'w') {
      const auto [p, ec] = std::from_chars(part.data() + 1, part.data() + part.size(), spec.window);
      if (ec != std::errc() || p != part.data() + part.size() || spec.window < 1)
        throw FormatError("bad window in encoding '" + std::string(tag) + "'");
    } else {
      throw FormatError("unknown encoding option in '" + std::string(tag) + "'");
    }
    pos = next;
  }
  return spec;
}

std::array<double, kDerivedFeatures> derived_features(std::span<const Shift> row, bool normalize) {
  const int d = static_cast<int>(row.size());
  int isolated_shifts = 0, isolated_off = 0, max_shift = 0, max_off = 0, assigned = 0, shift_blocks = 0,
      off_blocks = 0, transitions = 0;
  int run = 0;
  for (int j = 0; j < d; ++j) {
    const bool worked = row[j] != kDayOff;
    assigned += worked;
    if (j > 0 && row[j] != row[j - 1]) ++transitions;
    if (j == 0 || worked != (row[j - 1] != kDayOff)) {
      run = 0;
      ++(worked ? shift_blocks : off_blocks);
    }
    ++run;
    if (worked) max_shift = std::max(max_shift, run);
    else max_off = std::max(max_off, run);
    if (j > 0 && j + 1 < d) {
      const bool left = row[j - 1] != kDayOff, right = row[j + 1] != kDayOff;
      if (worked && !left && !right) ++isolated_shifts;
      if (!worked && left && right) ++isolated_off;
    }
  }
  std::array<double, kDerivedFeatures> f = {
      double(isolated_shifts), double(isolated_off), double(max_shift), double(max_off),
      double(assigned),        double(shift_blocks), double(off_blocks), double(transitions)};
  if (normalize && d > 0)
    for (auto& v : f) v /= d;
  return f;
}

void encode(const EncodingSpec& spec, int s, std::span<const Shift> before, std::span<const Shift> after, int day,
            std::span<double> out) {
  const int d = static_cast<int>(before.size());
  if (static_cast<int>(after.size()) != d) throw DimensionMismatch("before and after rows differ in length");
  if (static_cast<int>(out.size()) != spec.size(d, s)) throw DimensionMismatch("encoding buffer has the wrong size");
  const int length = spec.window > 0 ? spec.window : d;
  const int first = spec.window > 0 ? day - spec.window / 2 : 0;
  const int half = encode_half(spec, s, before, first, length, out.data());
  encode_half(spec, s, after, first, length, out.data() + half);
}

std::vector<double> encode_real(const ProblemInstance& instance, std::span<const Shift> before,
                                std::span<const Shift> after) {
  const EncodingSpec spec;
  std::vector<double> out(spec.size(instance.d, instance.s));
  encode(spec, instance.s, before, after, 0, out);
  return out;
}

std::vector<double> encode_binary(const ProblemInstance& instance, std::span<const Shift> before,
                                  std::span<const Shift> after, bool literal) {
  EncodingSpec spec;
  spec.shifts = literal ? ShiftEncoding::BinaryLiteral : ShiftEncoding::Binary;
  std::vector<double> out(spec.size(instance.d, instance.s));
  encode(spec, instance.s, before, after, 0, out);
  return out;
}

std::pair<std::vector<Shift>, std::vector<Shift>> decode_real(std::span<const double> pattern, int s) {
  if (pattern.size() % 2) throw DimensionMismatch("real pattern must have even length");
  const std::size_t d = pattern.size() / 2;
  std::pair<std::vector<Shift>, std::vector<Shift>> rows{std::vector<Shift>(d), std::vector<Shift>(d)};
  for (std::size_t r = 0; r < pattern.size(); ++r) {
    const long k = std::lround(pattern[r] * s);
    if (k < 0 || k > s) throw DimensionMismatch("value outside the real encoding range");
    (r < d ? rows.first[r] : rows.second[r - d]) = static_cast<Shift>(k);
  }
  return rows;
}

std::uint64_t fingerprint(std::span<const double> values, std::uint64_t h) {
  for (double v : values) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof v);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace nrc
