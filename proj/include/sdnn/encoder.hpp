#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sdnn/attack_domain.hpp"

namespace sdnn {

// 12 per-attribute features, each normalized into [-1, 1].
using FeatureVector = std::array<double, kNumAttributes>;

inline std::array<int, kNumAttributes> encode_scenario(const AttackScenario& s,
                                                       const Vocabulary& vocab) {
  std::array<int, kNumAttributes> codes{};
  for (int ord = 1; ord <= kNumAttributes; ++ord) {
    AttributeKind kind = attribute_from_ordinal(ord);
    const std::string& value = s.values[static_cast<std::size_t>(ord - 1)];
    auto code = vocab.code_of(kind, value);
    if (!code) {
      throw std::invalid_argument(std::string("unregistered value '") + value +
                                  "' for attribute " + attribute_name(kind));
    }
    codes[static_cast<std::size_t>(ord - 1)] = *code;
  }
  return codes;
}

// x_i = -1 + 2*code/(k-1) for vocabulary size k; a size-1 attribute maps to 0.
inline FeatureVector normalize_features(const std::array<int, kNumAttributes>& codes,
                                        const Vocabulary& vocab) {
  FeatureVector x{};
  for (int ord = 1; ord <= kNumAttributes; ++ord) {
    AttributeKind kind = attribute_from_ordinal(ord);
    int k = vocab.size(kind);
    int code = codes[static_cast<std::size_t>(ord - 1)];
    if (code < 0 || code >= k) {
      throw std::out_of_range("code " + std::to_string(code) + " out of range for attribute " +
                              attribute_name(kind) + " (size " + std::to_string(k) + ")");
    }
    x[static_cast<std::size_t>(ord - 1)] =
        k <= 1 ? 0.0 : -1.0 + 2.0 * static_cast<double>(code) / static_cast<double>(k - 1);
  }
  return x;
}

// Affine map between the pattern-ID interval [lo, hi] and [-band, +band].
// The degenerate hi == lo case maps the single ID to 0.
struct TargetScaling {
  int lo = 1;
  int hi = 1;
  double band = 0.8;

  double scale(int pattern_id) const {
    if (pattern_id < lo || pattern_id > hi) {
      throw std::out_of_range("pattern_id " + std::to_string(pattern_id) +
                              " outside [" + std::to_string(lo) + "," +
                              std::to_string(hi) + "]");
    }
    if (hi == lo) return 0.0;
    return -band + 2.0 * band * static_cast<double>(pattern_id - lo) /
                       static_cast<double>(hi - lo);
  }

  // Inverse of scale on its range; extrapolates linearly outside the band.
  double unscale(double y) const {
    if (hi == lo) return static_cast<double>(lo);
    return static_cast<double>(lo) +
           (y + band) * static_cast<double>(hi - lo) / (2.0 * band);
  }
};

// Round half-away-from-zero, then clamp into [lo, hi].
inline int decode_prediction(double id_estimate, int lo, int hi) {
  if (hi < lo) throw std::invalid_argument("decode range with hi < lo");
  double r = std::round(id_estimate);
  int id = static_cast<int>(r);
  if (id < lo) id = lo;
  if (id > hi) id = hi;
  return id;
}

}  // namespace sdnn
