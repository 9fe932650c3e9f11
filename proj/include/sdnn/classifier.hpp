#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdnn/corpus.hpp"
#include "sdnn/encoder.hpp"
#include "sdnn/mlp.hpp"

namespace sdnn {

// One pattern-ID range owned by one trained network.
struct Partition {
  int lo = 1;
  int hi = 1;
  TargetScaling scaling;
  Network network;
  TrainReport report;
};

struct EnsembleModel {
  std::vector<Partition> partitions;
  std::uint64_t vocab_fingerprint = 0;
};

// Greedy left-to-right ranges of span at most max_classes_per_net, clipped
// to the IDs actually present. IDs 1..53 with the default cap yield
// [(1,28),(29,53)].
inline std::vector<std::pair<int, int>> build_partitions(const std::set<int>& ids_present,
                                                         int max_classes_per_net = 28) {
  if (ids_present.empty()) throw std::invalid_argument("no pattern IDs present");
  if (max_classes_per_net < 1) throw std::invalid_argument("max_classes_per_net must be >= 1");
  std::vector<std::pair<int, int>> ranges;
  auto it = ids_present.begin();
  while (it != ids_present.end()) {
    int lo = *it;
    int span_end = lo + max_classes_per_net - 1;
    int hi = lo;
    while (it != ids_present.end() && *it <= span_end) {
      hi = *it;
      ++it;
    }
    ranges.emplace_back(lo, hi);
  }
  return ranges;
}

namespace detail {
inline std::vector<Sample> to_samples(const Corpus& part, const Vocabulary& vocab,
                                      const TargetScaling& scaling) {
  std::vector<Sample> samples;
  samples.reserve(part.scenarios.size());
  for (const auto& s : part.scenarios) {
    FeatureVector x = normalize_features(s.codes, vocab);
    samples.push_back({std::vector<double>(x.begin(), x.end()),
                       {scaling.scale(s.pattern_id)}});
  }
  return samples;
}
}  // namespace detail

// Trains one network per pattern-ID partition. Partition k trains with seed
// config.seed + k so partitions stay independent and the whole ensemble is
// reproducible.
inline EnsembleModel train_ensemble(const Corpus& train_corpus, const Vocabulary& vocab,
                                    const TrainConfig& config, const NetworkSpec& spec,
                                    int max_classes_per_net = 28, double band = 0.8) {
  if (train_corpus.scenarios.empty()) {
    throw std::invalid_argument("train_ensemble: empty corpus");
  }
  std::set<int> ids;
  for (const auto& s : train_corpus.scenarios) ids.insert(s.pattern_id);
  auto ranges = build_partitions(ids, max_classes_per_net);
  auto parts = partition_by_range(train_corpus, ranges);

  EnsembleModel model;
  model.vocab_fingerprint = vocab.fingerprint();
  for (std::size_t k = 0; k < ranges.size(); ++k) {
    Partition p;
    p.lo = ranges[k].first;
    p.hi = ranges[k].second;
    p.scaling = TargetScaling{p.lo, p.hi, band};
    auto samples = detail::to_samples(parts[k], vocab, p.scaling);
    TrainConfig part_config = config;
    part_config.seed = config.seed + k;
    p.network = init_network(spec, part_config.seed);
    p.report = train(p.network, samples, part_config);
    model.partitions.push_back(std::move(p));
  }
  return model;
}

struct Prediction {
  int predicted_id = 0;
  double raw = 0.0;  // on the pattern-ID scale
  int partition = 0;
};

namespace detail {
inline Prediction predict_codes(const EnsembleModel& m,
                                const std::array<int, kNumAttributes>& codes,
                                const Vocabulary& vocab) {
  FeatureVector fx = normalize_features(codes, vocab);
  std::vector<double> x(fx.begin(), fx.end());
  Prediction best;
  double best_residual = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < m.partitions.size(); ++k) {
    const Partition& p = m.partitions[k];
    double y = predict(p.network, x)[0];
    double raw = p.scaling.unscale(y);
    int id = decode_prediction(raw, p.lo, p.hi);
    double residual = std::abs(raw - static_cast<double>(id));
    if (residual < best_residual) {
      best_residual = residual;
      best = {id, raw, static_cast<int>(k)};
    }
  }
  return best;
}
}  // namespace detail

// Routes the scenario through every partition; the one whose raw output sits
// closest to an in-range integer ID wins (ties go to the lowest index).
inline Prediction predict_pattern(const EnsembleModel& m, const AttackScenario& s,
                                  const Vocabulary& vocab) {
  if (m.vocab_fingerprint != vocab.fingerprint()) {
    throw std::runtime_error("vocabulary fingerprint mismatch (model/vocabulary skew)");
  }
  return detail::predict_codes(m, encode_scenario(s, vocab), vocab);
}

struct EvalRow {
  std::string scenario_id;
  int expected_id = 0;
  double raw = 0.0;
  int predicted_id = 0;
  bool correct = false;
  int partition = 0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::vector<double> partition_accuracy;
  double overall_accuracy = 0.0;
};

inline EvalReport evaluate(const EnsembleModel& m, const Corpus& test,
                           const Vocabulary& vocab) {
  if (test.scenarios.empty()) throw std::invalid_argument("evaluate: empty test corpus");
  if (m.vocab_fingerprint != vocab.fingerprint()) {
    throw std::runtime_error("vocabulary fingerprint mismatch (model/vocabulary skew)");
  }
  EvalReport report;
  for (const auto& s : test.scenarios) {
    Prediction p = detail::predict_codes(m, s.codes, vocab);
    report.rows.push_back({s.scenario_id, s.pattern_id, p.raw, p.predicted_id,
                           p.predicted_id == s.pattern_id, p.partition});
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const EvalRow& a, const EvalRow& b) {
    if (a.expected_id != b.expected_id) return a.expected_id < b.expected_id;
    return a.scenario_id < b.scenario_id;
  });

  std::vector<int> part_total(m.partitions.size(), 0);
  std::vector<int> part_correct(m.partitions.size(), 0);
  int correct = 0;
  for (const auto& r : report.rows) {
    ++part_total[static_cast<std::size_t>(r.partition)];
    if (r.correct) {
      ++part_correct[static_cast<std::size_t>(r.partition)];
      ++correct;
    }
  }
  for (std::size_t k = 0; k < m.partitions.size(); ++k) {
    report.partition_accuracy.push_back(
        part_total[k] == 0 ? 0.0
                           : static_cast<double>(part_correct[k]) / part_total[k]);
  }
  report.overall_accuracy = static_cast<double>(correct) / report.rows.size();
  return report;
}

// `scenario_id,partition,expected,actual_raw,predicted,correct` rows.
inline void write_eval_csv(const EvalReport& report, std::ostream& out) {
  out << "scenario_id,partition,expected,actual_raw,predicted,correct\n";
  for (const auto& r : report.rows) {
    out << r.scenario_id << ',' << r.partition << ',' << r.expected_id << ','
        << format_double(r.raw) << ',' << r.predicted_id << ','
        << (r.correct ? 1 : 0) << '\n';
  }
}

inline std::string fingerprint_hex(std::uint64_t fp) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fp;
  return os.str();
}

// Ensemble file: `ensemblev1,<n_partitions>,<vocab_fingerprint>` manifest,
// then per partition a `lo,hi,band` line followed by the embedded model.
inline void write_ensemble(const EnsembleModel& m, std::ostream& out) {
  out << "ensemblev1," << m.partitions.size() << ','
      << fingerprint_hex(m.vocab_fingerprint) << '\n';
  for (const auto& p : m.partitions) {
    out << p.lo << ',' << p.hi << ',' << format_double(p.scaling.band) << '\n';
    write_network(p.network, out);
  }
}

inline EnsembleModel parse_ensemble(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty ensemble stream");
  auto header = split_fields(line);
  if (header.size() != 3 || header[0] != "ensemblev1") {
    throw std::runtime_error("bad ensemble header: '" + line + "'");
  }
  std::size_t n = static_cast<std::size_t>(parse_long(header[1]));
  EnsembleModel m;
  m.vocab_fingerprint = std::stoull(std::string(header[2]), nullptr, 16);
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::getline(in, line)) throw std::runtime_error("truncated ensemble file");
    auto fields = split_fields(line);
    if (fields.size() != 3) throw std::runtime_error("bad partition header: '" + line + "'");
    Partition p;
    p.lo = static_cast<int>(parse_long(fields[0]));
    p.hi = static_cast<int>(parse_long(fields[1]));
    p.scaling = TargetScaling{p.lo, p.hi, parse_double(fields[2])};
    p.network = parse_network(in);
    m.partitions.push_back(std::move(p));
  }
  return m;
}

inline void save_ensemble(const EnsembleModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_ensemble(m, out);
}

inline EnsembleModel load_ensemble(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ensemble file: " + path);
  return parse_ensemble(in);
}

}  // namespace sdnn
