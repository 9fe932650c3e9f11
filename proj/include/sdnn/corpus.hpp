#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "sdnn/attack_domain.hpp"
#include "sdnn/util.hpp"

namespace sdnn {

// One corpus row: scenario ID, the 12 attribute codes, ground-truth pattern.
struct CodedScenario {
  std::string scenario_id;
  std::array<int, kNumAttributes> codes{};
  int pattern_id = 0;

  bool operator==(const CodedScenario&) const = default;
};

struct Corpus {
  std::vector<CodedScenario> scenarios;
  std::string source_path;
};

inline constexpr const char* kCorpusHeader =
    "scenario_id,attacker,source,target,vector,type,input_validation,"
    "dependencies,output_encoding,authentication,access_control,"
    "http_security,error_handling,pattern_id";

struct ParseError : std::runtime_error {
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_number(line) {}
  int line_number;
};

// ASCII comma-delimited corpus: optional header, then
// `scenario_id,c1,...,c12,pattern_id` rows of integer codes.
inline Corpus parse_corpus(std::istream& in, std::string source_path = "") {
  Corpus corpus;
  corpus.source_path = std::move(source_path);
  std::unordered_set<std::string> seen_ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("scenario_id", 0) == 0) continue;  // header
    auto fields = split_fields(line);
    if (fields.size() != kNumAttributes + 2) {
      throw ParseError(line_no, "expected 14 fields, got " +
                                    std::to_string(fields.size()));
    }
    CodedScenario s;
    s.scenario_id = std::string(fields[0]);
    if (s.scenario_id.empty()) throw ParseError(line_no, "empty scenario_id");
    if (!seen_ids.insert(s.scenario_id).second) {
      throw ParseError(line_no, "duplicate scenario_id '" + s.scenario_id + "'");
    }
    for (int i = 0; i < kNumAttributes; ++i) {
      long code;
      try {
        code = parse_long(fields[static_cast<std::size_t>(i + 1)]);
      } catch (const std::exception& e) {
        throw ParseError(line_no, e.what());
      }
      if (code < 0) throw ParseError(line_no, "negative code");
      s.codes[static_cast<std::size_t>(i)] = static_cast<int>(code);
    }
    long pid;
    try {
      pid = parse_long(fields[kNumAttributes + 1]);
    } catch (const std::exception& e) {
      throw ParseError(line_no, e.what());
    }
    if (pid < 1) throw ParseError(line_no, "pattern_id must be >= 1");
    s.pattern_id = static_cast<int>(pid);
    corpus.scenarios.push_back(std::move(s));
  }
  return corpus;
}

inline Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  return parse_corpus(in, path);
}

// Header plus one row per scenario, LF line endings, trailing newline.
// Returns the byte count written.
inline std::size_t write_corpus(const Corpus& c, std::ostream& out) {
  std::ostringstream buf;
  buf << kCorpusHeader << '\n';
  for (const auto& s : c.scenarios) {
    buf << s.scenario_id;
    for (int code : s.codes) buf << ',' << code;
    buf << ',' << s.pattern_id << '\n';
  }
  std::string text = buf.str();
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("corpus write failed");
  return text.size();
}

inline std::size_t save_corpus(const Corpus& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return write_corpus(c, out);
}

struct SplitSpec {
  double train_fraction = 260.0 / 311.0;
  std::uint64_t seed = 42;
  bool stratified = true;
};

// Seeded train/test split. Stratified mode guarantees every pattern with at
// least one sample contributes at least one training sample; singleton
// patterns contribute nothing to the test set.
inline std::pair<Corpus, Corpus> split_corpus(const Corpus& c, const SplitSpec& spec) {
  const std::size_t n = c.scenarios.size();
  if (n < 2) throw std::invalid_argument("split needs a corpus of at least 2 samples");
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw std::invalid_argument("train_fraction must lie in (0,1)");
  }

  std::size_t target_train = static_cast<std::size_t>(
      std::llround(spec.train_fraction * static_cast<double>(n)));
  target_train = std::clamp<std::size_t>(target_train, 1, n - 1);

  std::vector<bool> in_train(n, false);
  std::mt19937_64 rng(spec.seed);

  if (!spec.stratified) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    shuffle_deterministic(idx, rng);
    for (std::size_t i = 0; i < target_train; ++i) in_train[idx[i]] = true;
  } else {
    std::map<int, std::vector<std::size_t>> groups;  // pattern_id -> indices
    for (std::size_t i = 0; i < n; ++i) {
      groups[c.scenarios[i].pattern_id].push_back(i);
    }
    // Largest-remainder allocation of the train budget across patterns,
    // with a floor of one training sample per pattern.
    struct Alloc {
      int pattern_id;
      std::size_t size;
      std::size_t take;
      double remainder;
    };
    std::vector<Alloc> allocs;
    std::size_t total = 0;
    for (const auto& [pid, idxs] : groups) {
      double ideal = spec.train_fraction * static_cast<double>(idxs.size());
      std::size_t base = static_cast<std::size_t>(std::floor(ideal));
      base = std::clamp<std::size_t>(base, 1, idxs.size());
      allocs.push_back({pid, idxs.size(), base, ideal - std::floor(ideal)});
      total += base;
    }
    while (total < target_train) {
      Alloc* best = nullptr;
      for (auto& a : allocs) {
        if (a.take >= a.size) continue;
        if (!best || a.remainder > best->remainder ||
            (a.remainder == best->remainder && a.pattern_id < best->pattern_id)) {
          best = &a;
        }
      }
      if (!best) break;
      ++best->take;
      best->remainder -= 1.0;
      ++total;
    }
    while (total > target_train) {
      Alloc* best = nullptr;
      for (auto& a : allocs) {
        if (a.take <= 1) continue;
        if (!best || a.remainder < best->remainder ||
            (a.remainder == best->remainder && a.pattern_id > best->pattern_id)) {
          best = &a;
        }
      }
      if (!best) break;
      --best->take;
      best->remainder += 1.0;
      --total;
    }
    for (const auto& a : allocs) {
      std::vector<std::size_t> idxs = groups[a.pattern_id];
      shuffle_deterministic(idxs, rng);
      for (std::size_t i = 0; i < a.take; ++i) in_train[idxs[i]] = true;
    }
  }

  Corpus train, test;
  train.source_path = c.source_path;
  test.source_path = c.source_path;
  for (std::size_t i = 0; i < n; ++i) {
    (in_train[i] ? train : test).scenarios.push_back(c.scenarios[i]);
  }
  return {std::move(train), std::move(test)};
}

// Splits samples into the unique inclusive ID range containing their
// pattern_id. Ranges must be non-overlapping and cover every ID present.
inline std::vector<Corpus> partition_by_range(
    const Corpus& c, const std::vector<std::pair<int, int>>& ranges) {
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (ranges[i].first > ranges[i].second) {
      throw std::invalid_argument("empty range (" + std::to_string(ranges[i].first) +
                                  "," + std::to_string(ranges[i].second) + ")");
    }
    for (std::size_t j = i + 1; j < ranges.size(); ++j) {
      if (ranges[i].first <= ranges[j].second && ranges[j].first <= ranges[i].second) {
        throw std::invalid_argument(
            "overlapping ranges around pattern_id " +
            std::to_string(std::max(ranges[i].first, ranges[j].first)));
      }
    }
  }
  std::vector<Corpus> parts(ranges.size());
  for (auto& p : parts) p.source_path = c.source_path;
  for (const auto& s : c.scenarios) {
    bool placed = false;
    for (std::size_t k = 0; k < ranges.size(); ++k) {
      if (s.pattern_id >= ranges[k].first && s.pattern_id <= ranges[k].second) {
        parts[k].scenarios.push_back(s);
        placed = true;
        break;
      }
    }
    if (!placed) {
      throw std::invalid_argument("pattern_id " + std::to_string(s.pattern_id) +
                                  " not covered by any range");
    }
  }
  return parts;
}

}  // namespace sdnn
