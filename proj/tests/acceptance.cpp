// End-to-end acceptance suite. Each check prints one pass/fail line; the
// process exits nonzero if any check fails. argv[1] must point at the CLI
// binary (used for the byte-identical re-run check).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sdnn/attack_domain.hpp"
#include "sdnn/classifier.hpp"
#include "sdnn/corpus.hpp"
#include "sdnn/encoder.hpp"
#include "sdnn/mlp.hpp"
#include "sdnn/synthgen.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace sdnn;
namespace st = sdnn::testing;

namespace {

int failures = 0;

void criterion(int number, const std::string& name, const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << number << ": " << name;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << std::endl;
  if (!ok) ++failures;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool run_cmd(const std::string& cmd) { return std::system(cmd.c_str()) == 0; }

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-cli-binary>" << std::endl;
    return 2;
  }
  const std::string cli = argv[1];

  criterion(1, "tansig exactness, bounds and oddness", [](std::string& detail) {
    if (tansig(0.0) != 0.0) return false;
    if (std::abs(tansig(1.0) - 0.7615941559557649) > 1e-12) return false;
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100000; ++i) {
      double n = -30.0 + 60.0 * rand_unit(rng);
      double a = tansig(n);
      if (std::abs(n) <= 20.0 && !(std::abs(a) < 1.0)) return false;
      if (std::abs(tansig(-n) + a) > 1e-15) return false;
    }
    detail = "10^5 samples";
    return true;
  });

  criterion(2, "analytic gradients match finite differences", [](std::string& detail) {
    std::mt19937_64 rng(2);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      Network net = init_network(NetworkSpec{12, 20, 1}, rng());
      auto batch = st::random_batch(rng, 12, 1, 5);
      worst = std::max(worst, st::max_gradient_deviation(net, batch, 1e-6));
    }
    detail = "max relative error " + format_double(worst);
    return worst < 1e-6;
  });

  criterion(3, "XOR sanity (2-4-1, seed 42)", [](std::string& detail) {
    Network net = init_network(NetworkSpec{2, 4, 1, Activation::Linear}, 42);
    TrainConfig config;
    config.learning_rate = 0.5;
    config.momentum = 0.9;
    config.max_iterations = 2000;
    config.mse_goal = 0.01;
    config.validation_fraction = 0.0;
    config.seed = 42;
    TrainReport report = train(net, st::xor_dataset(), config);
    detail = "MSE " + format_double(report.train_mse.back()) + " at epoch " +
             std::to_string(report.stopped_at_epoch);
    if (report.train_mse.back() >= 0.01) return false;
    for (const auto& [x, t] : st::xor_dataset()) {
      if (std::round(predict(net, x)[0]) != t[0]) return false;
    }
    return true;
  });

  criterion(4, "published scenario encodes to its published codes", [](std::string&) {
    Vocabulary vocab = default_vocabulary();
    AttackScenario s;
    s.scenario_id = "CVE-2003-1192";
    s.values = {"No Access", "External", "Buffer", "Long Get Request", "Availability",
                "Partial Validation", "Authentication & Input Validation", "None",
                "None", "URL Access", "Input Validation", "None"};
    return encode_scenario(s, vocab) ==
           std::array<int, 12>{0, 1, 9, 39, 5, 2, 6, 0, 0, 2, 3, 0};
  });

  criterion(5, "scale/decode round-trip exact over 1..53", [](std::string&) {
    for (TargetScaling ts : {TargetScaling{1, 28, 0.8}, TargetScaling{29, 53, 0.8}}) {
      for (int id = ts.lo; id <= ts.hi; ++id) {
        if (decode_prediction(ts.unscale(ts.scale(id)), ts.lo, ts.hi) != id) return false;
      }
    }
    return true;
  });

  criterion(6, "end-to-end synthetic run: accuracy >= 0.90 within 60 s", [](std::string& detail) {
    Vocabulary vocab = default_vocabulary();
    auto templates = default_templates(vocab);
    Corpus corpus = generate_corpus(templates, 6, 0.15, 42, vocab);
    auto [train_c, test_c] = split_corpus(corpus, SplitSpec{260.0 / 311.0, 42, true});

    auto start = std::chrono::steady_clock::now();
    TrainConfig config;
    config.seed = 42;
    config.patience = 20;
    NetworkSpec spec;
    spec.output_activation = Activation::Linear;
    EnsembleModel model = train_ensemble(train_c, vocab, config, spec);
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    EvalReport report = evaluate(model, test_c, vocab);
    detail = std::to_string(corpus.scenarios.size()) + " samples, " +
             std::to_string(train_c.scenarios.size()) + "/" +
             std::to_string(test_c.scenarios.size()) + " split, " +
             std::to_string(model.partitions.size()) + " partitions, accuracy " +
             format_double(report.overall_accuracy) + ", train " +
             format_double(seconds) + " s";
    return model.partitions.size() == 2 && report.overall_accuracy >= 0.90 &&
           seconds <= 60.0;
  });

  criterion(7, "stopping respects the cap and best-epoch weights", [](std::string& detail) {
    std::mt19937_64 rng(7);
    auto data = st::random_batch(rng, 6, 1, 40);
    Network net = init_network(NetworkSpec{6, 10, 1}, 3);
    TrainConfig config;
    config.learning_rate = 0.3;
    config.patience = 6;
    config.validation_fraction = 0.25;
    config.seed = 3;
    TrainReport report = train(net, data, config);
    if (report.stopped_at_epoch > 1000) return false;
    if (report.stop_reason != StopReason::PatienceExhausted) {
      detail = std::string("stop_reason ") + stop_reason_name(report.stop_reason);
      return false;
    }
    double best = report.val_mse[static_cast<std::size_t>(report.best_epoch - 1)];
    for (double v : report.val_mse) {
      if (v < best) return false;
    }
    // Replaying the run up to best_epoch must reproduce the returned weights.
    Network replay = init_network(NetworkSpec{6, 10, 1}, 3);
    TrainConfig truncated = config;
    truncated.max_iterations = report.best_epoch;
    truncated.patience = report.best_epoch + 1;
    train(replay, data, truncated);
    detail = "patience stop at epoch " + std::to_string(report.stopped_at_epoch) +
             ", best epoch " + std::to_string(report.best_epoch);
    return replay == net;
  });

  criterion(8, "decode anchors from the published comparison table", [](std::string&) {
    if (decode_prediction(2.9761, 1, 28) != 3) return false;
    if (decode_prediction(19.9984, 1, 28) != 20) return false;
    if (decode_prediction(50.6745, 29, 53) != 51) return false;  // reproduces the 52 miss
    return decode_prediction(7.0000, 1, 28) != 10;  // flagged incorrect vs expected 10
  });

  criterion(9, "two identical train invocations are byte-identical", [&cli](std::string& detail) {
    fs::path dir = fs::temp_directory_path() / "sdnn_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto q = [](const fs::path& p) { return "\"" + p.string() + "\""; };
    fs::path corpus = dir / "corpus.csv";
    fs::path train_c = dir / "train.csv";
    fs::path test_c = dir / "test.csv";
    if (!run_cmd("\"" + cli + "\" gen --seed 42 --out " + q(corpus) + " --train-out " +
                 q(train_c) + " --test-out " + q(test_c) + " > /dev/null")) {
      detail = "gen failed";
      return false;
    }
    for (int run = 1; run <= 2; ++run) {
      fs::path sub = dir / ("run" + std::to_string(run));
      fs::create_directories(sub);
      if (!run_cmd("\"" + cli + "\" train --seed 42 --corpus " + q(train_c) + " --model " +
                   q(sub / "model.txt") + " --out-dir " + q(sub) + " > /dev/null")) {
        detail = "train failed";
        return false;
      }
      if (!run_cmd("\"" + cli + "\" eval --model " + q(sub / "model.txt") + " --corpus " +
                   q(test_c) + " --report " + q(sub / "report.csv") + " > /dev/null")) {
        detail = "eval failed";
        return false;
      }
    }
    bool same_model = read_file(dir / "run1" / "model.txt") == read_file(dir / "run2" / "model.txt");
    bool same_report = read_file(dir / "run1" / "report.csv") == read_file(dir / "run2" / "report.csv");
    if (!same_model) detail = "model files differ";
    if (!same_report) detail += std::string(detail.empty() ? "" : "; ") + "reports differ";
    return same_model && same_report;
  });

  criterion(10, "corpus/vocabulary/model/ensemble files round-trip bytewise", [](std::string&) {
    Vocabulary vocab = default_vocabulary();
    vocab.register_value(AttributeKind::Source, "Internal");
    std::ostringstream v1;
    write_vocabulary(vocab, v1);
    std::istringstream vin(v1.str());
    std::ostringstream v2;
    write_vocabulary(parse_vocabulary(vin), v2);
    if (v1.str() != v2.str()) return false;

    Corpus corpus = generate_corpus(default_templates(vocab), 3, 0.2, 5, vocab);
    std::ostringstream c1;
    write_corpus(corpus, c1);
    std::istringstream cin_s(c1.str());
    std::ostringstream c2;
    write_corpus(parse_corpus(cin_s), c2);
    if (c1.str() != c2.str()) return false;

    Network net = init_network(NetworkSpec{12, 20, 1}, 77);
    std::ostringstream m1;
    write_network(net, m1);
    std::istringstream min(m1.str());
    std::ostringstream m2;
    write_network(parse_network(min), m2);
    if (m1.str() != m2.str()) return false;

    TrainConfig config;
    config.max_iterations = 5;
    config.validation_fraction = 0.0;
    EnsembleModel model = train_ensemble(corpus, vocab, config, NetworkSpec{});
    std::ostringstream e1;
    write_ensemble(model, e1);
    std::istringstream ein(e1.str());
    std::ostringstream e2;
    write_ensemble(parse_ensemble(ein), e2);
    return e1.str() == e2.str();
  });

  if (failures) {
    std::cout << failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all criteria passed" << std::endl;
  return 0;
}
