#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include "sdnn/classifier.hpp"
#include "sdnn/synthgen.hpp"

using namespace sdnn;

namespace {

// A network whose output is a constant: zero weights, linear output bias.
Network constant_net(double y) {
  Network net;
  net.spec = NetworkSpec{12, 1, 1, Activation::Linear};
  net.w1.assign(12, 0.0);
  net.b1.assign(1, 0.0);
  net.w2.assign(1, 0.0);
  net.b2 = {y};
  return net;
}

Partition constant_partition(int lo, int hi, double raw_output) {
  Partition p;
  p.lo = lo;
  p.hi = hi;
  p.scaling = TargetScaling{lo, hi, 0.8};
  p.network = constant_net(p.scaling.hi == p.scaling.lo
                               ? 0.0
                               : p.scaling.scale(lo) +
                                     (raw_output - lo) * 2.0 * 0.8 / (hi - lo));
  return p;
}

std::array<int, 12> zero_codes() { return {}; }

}  // namespace

TEST_CASE("partition building follows the published split") {
  std::set<int> ids;
  for (int id = 1; id <= 53; ++id) {
    if (id != 18 && id != 19) ids.insert(id);
  }
  CHECK(build_partitions(ids, 28) ==
        std::vector<std::pair<int, int>>{{1, 28}, {29, 53}});

  CHECK(build_partitions({5}, 28) == std::vector<std::pair<int, int>>{{5, 5}});

  std::set<int> wide;
  for (int id = 1; id <= 60; ++id) wide.insert(id);
  auto ranges = build_partitions(wide, 28);
  CHECK(ranges == std::vector<std::pair<int, int>>{{1, 28}, {29, 56}, {57, 60}});
  CHECK(ranges[0].second - ranges[0].first + 1 == 28);
  CHECK(ranges[2].second - ranges[2].first + 1 == 4);

  CHECK_THROWS(build_partitions({}, 28));
}

TEST_CASE("routing picks the partition with the smallest rounding residual") {
  Vocabulary vocab = default_vocabulary();
  EnsembleModel m;
  m.vocab_fingerprint = vocab.fingerprint();
  m.partitions.push_back(constant_partition(1, 28, 2.9761));   // residual 0.0239
  m.partitions.push_back(constant_partition(29, 53, 30.41));   // residual 0.41

  auto p = detail::predict_codes(m, zero_codes(), vocab);
  CHECK(p.partition == 0);
  CHECK(p.predicted_id == 3);
  CHECK_THAT(p.raw, Catch::Matchers::WithinAbs(2.9761, 1e-9));
}

TEST_CASE("routing ties break toward the lowest partition index") {
  Vocabulary vocab = default_vocabulary();
  EnsembleModel m;
  m.vocab_fingerprint = vocab.fingerprint();
  m.partitions.push_back(constant_partition(1, 28, 4.25));
  m.partitions.push_back(constant_partition(29, 53, 30.25));
  auto p = detail::predict_codes(m, zero_codes(), vocab);
  CHECK(p.partition == 0);
  CHECK(p.predicted_id == 4);
}

TEST_CASE("single-partition models route trivially") {
  Vocabulary vocab = default_vocabulary();
  EnsembleModel m;
  m.vocab_fingerprint = vocab.fingerprint();
  m.partitions.push_back(constant_partition(1, 28, 7.6));
  AttackScenario s;
  s.scenario_id = "t";
  s.values = {"No Access", "External", "Buffer", "Long Get Request", "Availability",
              "Partial Validation", "Authentication & Input Validation", "None",
              "None", "URL Access", "Input Validation", "None"};
  auto p = predict_pattern(m, s, vocab);
  CHECK(p.partition == 0);
  CHECK(p.predicted_id == 8);

  Vocabulary other;
  other.register_value(AttributeKind::Attacker, "whatever");
  CHECK_THROWS(predict_pattern(m, s, other));
}

TEST_CASE("ensemble training covers the ID span and is deterministic") {
  Vocabulary vocab = default_vocabulary();
  auto templates = default_templates(vocab);
  Corpus corpus = generate_corpus(templates, 3, 0.0, 11, vocab);

  TrainConfig config;
  config.max_iterations = 30;
  config.validation_fraction = 0.0;
  NetworkSpec spec;

  EnsembleModel a = train_ensemble(corpus, vocab, config, spec);
  REQUIRE(a.partitions.size() == 2);
  CHECK(a.partitions[0].lo == 1);
  CHECK(a.partitions[0].hi == 28);
  CHECK(a.partitions[1].lo == 29);
  CHECK(a.partitions[1].hi == 53);

  EnsembleModel b = train_ensemble(corpus, vocab, config, spec);
  std::ostringstream sa, sb;
  write_ensemble(a, sa);
  write_ensemble(b, sb);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("a single-pattern corpus trains one degenerate partition") {
  Vocabulary vocab = default_vocabulary();
  Corpus corpus;
  for (int i = 0; i < 4; ++i) {
    CodedScenario s;
    s.scenario_id = "only-" + std::to_string(i);
    s.pattern_id = 7;
    corpus.scenarios.push_back(s);
  }
  TrainConfig config;
  config.max_iterations = 5;
  config.validation_fraction = 0.0;
  EnsembleModel m = train_ensemble(corpus, vocab, config, NetworkSpec{});
  REQUIRE(m.partitions.size() == 1);
  CHECK(m.partitions[0].lo == 7);
  CHECK(m.partitions[0].hi == 7);

  EvalReport report = evaluate(m, corpus, vocab);
  CHECK(report.overall_accuracy == 1.0);
}

TEST_CASE("evaluation counts, orders and flags rows") {
  Vocabulary vocab = default_vocabulary();
  EnsembleModel m;
  m.vocab_fingerprint = vocab.fingerprint();
  m.partitions.push_back(constant_partition(29, 53, 50.6745));

  Corpus test;
  CodedScenario s;
  s.scenario_id = "b-52";
  s.pattern_id = 52;
  test.scenarios.push_back(s);
  s.scenario_id = "a-51";
  s.pattern_id = 51;
  test.scenarios.push_back(s);

  EvalReport report = evaluate(m, test, vocab);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].scenario_id == "a-51");  // ordered by expected then id
  CHECK(report.rows[0].predicted_id == 51);
  CHECK(report.rows[0].correct);
  CHECK(report.rows[1].expected_id == 52);
  CHECK(report.rows[1].predicted_id == 51);
  CHECK_FALSE(report.rows[1].correct);
  CHECK(report.overall_accuracy == 0.5);
  CHECK(report.partition_accuracy[0] == 0.5);

  std::ostringstream csv;
  write_eval_csv(report, csv);
  CHECK(csv.str().rfind("scenario_id,partition,expected,actual_raw,predicted,correct\n", 0) == 0);
  CHECK(csv.str().find("b-52,0,52,") != std::string::npos);

  CHECK_THROWS(evaluate(m, Corpus{}, vocab));
}

TEST_CASE("a 26-sample partition with one miss scores 25/26") {
  Vocabulary vocab = default_vocabulary();
  EnsembleModel m;
  m.vocab_fingerprint = vocab.fingerprint();
  m.partitions.push_back(constant_partition(1, 28, 10.0));

  Corpus test;
  for (int i = 0; i < 26; ++i) {
    CodedScenario s;
    s.scenario_id = "t" + std::to_string(i);
    s.pattern_id = i == 0 ? 9 : 10;  // one expected value the constant net misses
    test.scenarios.push_back(s);
  }
  EvalReport report = evaluate(m, test, vocab);
  CHECK_THAT(report.partition_accuracy[0], Catch::Matchers::WithinAbs(25.0 / 26.0, 1e-15));
  CHECK_THAT(report.overall_accuracy, Catch::Matchers::WithinAbs(0.9615, 5e-5));
}

TEST_CASE("predictions always land inside the winning partition range") {
  Vocabulary vocab = default_vocabulary();
  auto templates = default_templates(vocab);
  Corpus corpus = generate_corpus(templates, 2, 0.3, 19, vocab);
  TrainConfig config;
  config.max_iterations = 10;
  config.validation_fraction = 0.0;
  EnsembleModel m = train_ensemble(corpus, vocab, config, NetworkSpec{});
  EvalReport report = evaluate(m, corpus, vocab);
  for (const auto& r : report.rows) {
    const auto& p = m.partitions[static_cast<std::size_t>(r.partition)];
    CHECK(r.predicted_id >= p.lo);
    CHECK(r.predicted_id <= p.hi);
  }
}

TEST_CASE("noise-free synthetic task reaches perfect test accuracy (seed 42)") {
  Vocabulary vocab = default_vocabulary();
  auto templates = default_templates(vocab);
  Corpus corpus = generate_corpus(templates, 4, 0.0, 42, vocab);
  auto [train_c, test_c] = split_corpus(corpus, SplitSpec{0.75, 42, true});

  TrainConfig config;
  config.seed = 42;
  config.patience = 20;  // default 6 can trip while momentum is still ramping
  NetworkSpec spec;
  spec.output_activation = Activation::Linear;
  EnsembleModel m = train_ensemble(train_c, vocab, config, spec);
  EvalReport report = evaluate(m, test_c, vocab);
  CHECK(report.overall_accuracy == 1.0);
}

TEST_CASE("ensemble file round-trips bitwise") {
  Vocabulary vocab = default_vocabulary();
  auto templates = default_templates(vocab);
  Corpus corpus = generate_corpus(templates, 2, 0.0, 23, vocab);
  TrainConfig config;
  config.max_iterations = 5;
  config.validation_fraction = 0.0;
  EnsembleModel m = train_ensemble(corpus, vocab, config, NetworkSpec{});

  std::ostringstream first;
  write_ensemble(m, first);
  std::istringstream in(first.str());
  EnsembleModel back = parse_ensemble(in);
  std::ostringstream second;
  write_ensemble(back, second);
  CHECK(first.str() == second.str());
  CHECK(back.vocab_fingerprint == m.vocab_fingerprint);
  REQUIRE(back.partitions.size() == m.partitions.size());
  CHECK(back.partitions[0].network == m.partitions[0].network);
}
