#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sdnn/util.hpp"

namespace sdnn {

inline constexpr int kNumAttributes = 12;

// The 12 attributes abstracted from an attack scenario, in schema order.
enum class AttributeKind : int {
  Attacker = 1,
  Source = 2,
  Target = 3,
  AttackVector = 4,
  AttackType = 5,
  InputValidation = 6,
  Dependencies = 7,
  OutputEncoding = 8,
  Authentication = 9,
  AccessControl = 10,
  HttpSecurity = 11,
  ErrorHandling = 12,
};

inline constexpr std::array<const char*, kNumAttributes> kAttributeNames = {
    "Attacker",        "Source",         "Target",         "AttackVector",
    "AttackType",      "InputValidation", "Dependencies",  "OutputEncoding",
    "Authentication",  "AccessControl",  "HttpSecurity",   "ErrorHandling",
};

inline int attribute_ordinal(AttributeKind k) { return static_cast<int>(k); }

inline AttributeKind attribute_from_ordinal(int ordinal) {
  if (ordinal < 1 || ordinal > kNumAttributes) {
    throw std::out_of_range("attribute ordinal out of range: " + std::to_string(ordinal));
  }
  return static_cast<AttributeKind>(ordinal);
}

inline const char* attribute_name(AttributeKind k) {
  return kAttributeNames[static_cast<std::size_t>(attribute_ordinal(k) - 1)];
}

// Case-fold and collapse runs of whitespace; values compare equal after this.
inline std::string normalize_value(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

inline std::optional<AttributeKind> attribute_from_name(std::string_view name) {
  std::string n = normalize_value(name);
  for (int i = 0; i < kNumAttributes; ++i) {
    if (n == normalize_value(kAttributeNames[static_cast<std::size_t>(i)])) {
      return attribute_from_ordinal(i + 1);
    }
  }
  return std::nullopt;
}

// Per-attribute mapping between value strings and dense integer codes.
// A value's code is its 0-based registration position.
class Vocabulary {
 public:
  // Returns the existing code when the (normalized) value is already known,
  // otherwise appends it and returns the new code.
  int register_value(AttributeKind kind, std::string_view text) {
    std::string norm = normalize_value(text);
    if (norm.empty()) {
      throw std::invalid_argument(std::string("empty value for attribute ") +
                                  attribute_name(kind));
    }
    auto& idx = index_[slot(kind)];
    auto it = idx.find(norm);
    if (it != idx.end()) return it->second;
    auto& vals = values_[slot(kind)];
    int code = static_cast<int>(vals.size());
    vals.emplace_back(text);
    idx.emplace(std::move(norm), code);
    return code;
  }

  std::optional<int> code_of(AttributeKind kind, std::string_view text) const {
    const auto& idx = index_[slot(kind)];
    auto it = idx.find(normalize_value(text));
    if (it == idx.end()) return std::nullopt;
    return it->second;
  }

  int size(AttributeKind kind) const {
    return static_cast<int>(values_[slot(kind)].size());
  }

  const std::string& value_at(AttributeKind kind, int code) const {
    const auto& vals = values_[slot(kind)];
    if (code < 0 || code >= static_cast<int>(vals.size())) {
      throw std::out_of_range(std::string("no code ") + std::to_string(code) +
                              " for attribute " + attribute_name(kind));
    }
    return vals[static_cast<std::size_t>(code)];
  }

  std::uint64_t fingerprint() const {
    std::uint64_t h = 14695981039346656037ull;
    for (int ord = 1; ord <= kNumAttributes; ++ord) {
      const auto& vals = values_[static_cast<std::size_t>(ord - 1)];
      for (std::size_t code = 0; code < vals.size(); ++code) {
        h = fnv1a(std::to_string(ord), h);
        h = fnv1a(std::to_string(code), h);
        h = fnv1a(normalize_value(vals[code]), h);
      }
    }
    return h;
  }

 private:
  static std::size_t slot(AttributeKind k) {
    return static_cast<std::size_t>(attribute_ordinal(k) - 1);
  }

  std::array<std::vector<std::string>, kNumAttributes> values_;
  std::array<std::unordered_map<std::string, int>, kNumAttributes> index_;
};

// An attack pattern: unique ID plus the ordered component sequence.
struct AttackPattern {
  int id = 0;
  std::vector<std::string> components;
  std::string description;
};

// A concrete scenario: one value string per attribute, with ground-truth
// pattern ID when known.
struct AttackScenario {
  std::string scenario_id;
  std::array<std::string, kNumAttributes> values;
  std::optional<int> pattern_id;
};

// Published (value, code) pairs the shipped default vocabulary must honor.
inline const std::array<std::pair<const char*, int>, kNumAttributes>&
pinned_default_pairs() {
  static const std::array<std::pair<const char*, int>, kNumAttributes> pairs = {{
      {"No Access", 0},
      {"External", 1},
      {"Buffer", 9},
      {"Long Get Request", 39},
      {"Availability", 5},
      {"Partial Validation", 2},
      {"Authentication & Input Validation", 6},
      {"None", 0},
      {"None", 0},
      {"URL Access", 2},
      {"Input Validation", 3},
      {"None", 0},
  }};
  return pairs;
}

// Default vocabulary: each pinned value sits at its published code, with
// placeholder entries filling the codes below it.
inline Vocabulary default_vocabulary() {
  Vocabulary v;
  const auto& pairs = pinned_default_pairs();
  for (int ord = 1; ord <= kNumAttributes; ++ord) {
    AttributeKind kind = attribute_from_ordinal(ord);
    const auto& [value, code] = pairs[static_cast<std::size_t>(ord - 1)];
    for (int c = 0; c < code; ++c) {
      v.register_value(kind, "unassigned-" + std::to_string(c));
    }
    int got = v.register_value(kind, value);
    if (got != code) {
      throw std::logic_error("default vocabulary pin failed");
    }
  }
  return v;
}

// Catalog of pattern IDs 1..53; only pattern 3 has its component sequence
// published, the rest carry a placeholder component.
inline std::vector<AttackPattern> default_pattern_catalog() {
  std::vector<AttackPattern> catalog;
  catalog.reserve(53);
  for (int id = 1; id <= 53; ++id) {
    AttackPattern p;
    p.id = id;
    if (id == 3) {
      p.components = {"User", "HTTPServer", "GetMethod", "GetMethodBufferWrite",
                      "Buffer"};
      p.description = "Excessively long HTTP GET request overflows a server buffer";
    } else {
      p.components = {"Unspecified"};
    }
    catalog.push_back(std::move(p));
  }
  return catalog;
}

// Returns every violation found, not just the first.
inline std::vector<std::string> scenario_validate(
    const AttackScenario& s, const Vocabulary& vocab,
    const std::vector<AttackPattern>& catalog) {
  std::vector<std::string> violations;
  for (int ord = 1; ord <= kNumAttributes; ++ord) {
    AttributeKind kind = attribute_from_ordinal(ord);
    const std::string& value = s.values[static_cast<std::size_t>(ord - 1)];
    if (normalize_value(value).empty()) {
      violations.push_back(std::string("missing value for attribute ") +
                           attribute_name(kind));
      continue;
    }
    if (!vocab.code_of(kind, value)) {
      violations.push_back(std::string("unknown value '") + value +
                           "' for attribute " + attribute_name(kind));
    }
  }
  if (s.pattern_id) {
    bool found = false;
    for (const auto& p : catalog) {
      if (p.id == *s.pattern_id) {
        found = true;
        break;
      }
    }
    if (!found) {
      violations.push_back("unknown pattern_id " + std::to_string(*s.pattern_id));
    }
  }
  return violations;
}

// Vocabulary file: one `<kind-ordinal>,<code>,<value>` entry per line,
// `#` starts a comment. Round-trips bit-exactly.
inline void write_vocabulary(const Vocabulary& v, std::ostream& out) {
  for (int ord = 1; ord <= kNumAttributes; ++ord) {
    AttributeKind kind = attribute_from_ordinal(ord);
    for (int code = 0; code < v.size(kind); ++code) {
      out << ord << ',' << code << ',' << v.value_at(kind, code) << '\n';
    }
  }
}

inline Vocabulary parse_vocabulary(std::istream& in) {
  Vocabulary v;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_fields(line);
    if (fields.size() < 3) {
      throw std::runtime_error("vocabulary line " + std::to_string(line_no) +
                               ": expected <ordinal>,<code>,<value>");
    }
    AttributeKind kind = attribute_from_ordinal(static_cast<int>(parse_long(fields[0])));
    int code = static_cast<int>(parse_long(fields[1]));
    // Value may itself contain commas; rejoin the remainder.
    std::string value(line.substr(fields[0].size() + fields[1].size() + 2));
    int got = v.register_value(kind, value);
    if (got != code) {
      throw std::runtime_error("vocabulary line " + std::to_string(line_no) +
                               ": code " + std::to_string(code) +
                               " breaks dense ordering (expected " +
                               std::to_string(got) + ")");
    }
  }
  return v;
}

}  // namespace sdnn
