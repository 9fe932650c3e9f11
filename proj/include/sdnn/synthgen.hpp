#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdnn/attack_domain.hpp"
#include "sdnn/corpus.hpp"
#include "sdnn/util.hpp"

namespace sdnn {

// Canonical attribute codes for one pattern, plus the attributes allowed to
// vary between repeated scenarios of that pattern.
struct PatternTemplate {
  int pattern_id = 0;
  std::array<int, kNumAttributes> canonical_codes{};
  std::bitset<kNumAttributes> jitter_kinds;  // bit i = attribute ordinal i+1
};

// Emits per_pattern scenarios per template: the canonical codes, with each
// jitter-enabled attribute replaced (with probability noise_rate) by a
// uniformly random other valid code. Attributes with a single valid code
// never change.
inline Corpus generate_corpus(const std::vector<PatternTemplate>& templates,
                              int per_pattern, double noise_rate, std::uint64_t seed,
                              const Vocabulary& vocab) {
  if (templates.empty()) throw std::invalid_argument("no templates");
  if (per_pattern < 1) throw std::invalid_argument("per_pattern must be >= 1");
  if (noise_rate < 0.0 || noise_rate > 1.0) {
    throw std::invalid_argument("noise_rate must lie in [0,1]");
  }
  std::mt19937_64 rng(seed);
  Corpus corpus;
  for (const auto& t : templates) {
    for (int i = 0; i < kNumAttributes; ++i) {
      int k = vocab.size(attribute_from_ordinal(i + 1));
      int code = t.canonical_codes[static_cast<std::size_t>(i)];
      if (code < 0 || code >= k) {
        throw std::invalid_argument("template for pattern " +
                                    std::to_string(t.pattern_id) +
                                    " has invalid code " + std::to_string(code) +
                                    " for attribute " +
                                    attribute_name(attribute_from_ordinal(i + 1)));
      }
    }
    for (int rep = 0; rep < per_pattern; ++rep) {
      CodedScenario s;
      s.scenario_id = "SYN-" + std::to_string(t.pattern_id) + "-" + std::to_string(rep);
      s.pattern_id = t.pattern_id;
      s.codes = t.canonical_codes;
      for (int i = 0; i < kNumAttributes; ++i) {
        if (!t.jitter_kinds.test(static_cast<std::size_t>(i))) continue;
        int k = vocab.size(attribute_from_ordinal(i + 1));
        if (k <= 1) continue;  // no alternative exists
        if (rand_unit(rng) < noise_rate) {
          // Uniform over the k-1 codes other than the current one.
          int alt = static_cast<int>(rand_below(rng, static_cast<std::size_t>(k - 1)));
          if (alt >= s.codes[static_cast<std::size_t>(i)]) ++alt;
          s.codes[static_cast<std::size_t>(i)] = alt;
        }
      }
      corpus.scenarios.push_back(std::move(s));
    }
  }
  return corpus;
}

// Default desk-scale task: pattern IDs 1..53 without 18 and 19. The Target
// and AttackVector codes jointly determine the pattern (id-1 = 10*target +
// vector); every other multi-valued attribute is jitter-eligible.
inline std::vector<PatternTemplate> default_templates(const Vocabulary& vocab) {
  std::vector<PatternTemplate> templates;
  for (int id = 1; id <= 53; ++id) {
    if (id == 18 || id == 19) continue;
    PatternTemplate t;
    t.pattern_id = id;
    for (int i = 0; i < kNumAttributes; ++i) {
      AttributeKind kind = attribute_from_ordinal(i + 1);
      int k = vocab.size(kind);
      int code;
      if (kind == AttributeKind::Target) {
        code = (id - 1) / 10;
      } else if (kind == AttributeKind::AttackVector) {
        code = (id - 1) % 10;
      } else if (kind == AttributeKind::Dependencies ||
                 kind == AttributeKind::HttpSecurity) {
        // Jitter-eligible attributes carry no pattern signal: their
        // canonical code is fixed so noise on them stays ignorable.
        code = 0;
        t.jitter_kinds.set(static_cast<std::size_t>(i), k > 1);
      } else {
        // Redundant clean encodings of the pattern ID.
        code = (id - 1) % k;
      }
      if (code >= k) {
        throw std::logic_error("default template code exceeds vocabulary size");
      }
      t.canonical_codes[static_cast<std::size_t>(i)] = code;
    }
    templates.push_back(t);
  }
  return templates;
}

// Template file: CSV `pattern_id,c1..c12,jitter_mask` with the mask as 12
// binary digits in attribute order.
inline void write_templates(const std::vector<PatternTemplate>& templates,
                            std::ostream& out) {
  for (const auto& t : templates) {
    out << t.pattern_id;
    for (int c : t.canonical_codes) out << ',' << c;
    out << ',';
    for (int i = 0; i < kNumAttributes; ++i) out << (t.jitter_kinds.test(static_cast<std::size_t>(i)) ? '1' : '0');
    out << '\n';
  }
}

inline std::vector<PatternTemplate> parse_templates(std::istream& in) {
  std::vector<PatternTemplate> templates;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("pattern_id", 0) == 0) continue;
    auto fields = split_fields(line);
    if (fields.size() != kNumAttributes + 2) {
      throw std::runtime_error("template line " + std::to_string(line_no) +
                               ": expected 14 fields");
    }
    PatternTemplate t;
    t.pattern_id = static_cast<int>(parse_long(fields[0]));
    for (int i = 0; i < kNumAttributes; ++i) {
      t.canonical_codes[static_cast<std::size_t>(i)] =
          static_cast<int>(parse_long(fields[static_cast<std::size_t>(i + 1)]));
    }
    auto mask = fields[kNumAttributes + 1];
    if (mask.size() != kNumAttributes) {
      throw std::runtime_error("template line " + std::to_string(line_no) +
                               ": jitter_mask must have 12 digits");
    }
    for (int i = 0; i < kNumAttributes; ++i) {
      char c = mask[static_cast<std::size_t>(i)];
      if (c != '0' && c != '1') {
        throw std::runtime_error("template line " + std::to_string(line_no) +
                                 ": jitter_mask digit must be 0 or 1");
      }
      t.jitter_kinds.set(static_cast<std::size_t>(i), c == '1');
    }
    templates.push_back(t);
  }
  return templates;
}

}  // namespace sdnn
