// Command-line front end for the attack-scenario classification pipeline:
// vocabulary management, synthetic corpus generation, training, evaluation
// and single-scenario prediction.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdnn/attack_domain.hpp"
#include "sdnn/classifier.hpp"
#include "sdnn/corpus.hpp"
#include "sdnn/encoder.hpp"
#include "sdnn/mlp.hpp"
#include "sdnn/synthgen.hpp"

namespace fs = std::filesystem;
using namespace sdnn;

namespace {

Vocabulary load_vocab_or_default(const std::string& path) {
  if (path.empty()) return default_vocabulary();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vocabulary file: " + path);
  return parse_vocabulary(in);
}

// Scenario file with value strings instead of codes:
// `scenario_id,v1,...,v12,pattern_id` with an optional header row.
int run_vocab_build(const std::string& corpus_path, const std::string& vocab_path) {
  Vocabulary vocab = default_vocabulary();
  std::ifstream in(corpus_path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + corpus_path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("scenario_id", 0) == 0) continue;
    auto fields = split_fields(line);
    if (fields.size() != kNumAttributes + 2) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected 14 fields, got " +
                               std::to_string(fields.size()));
    }
    for (int i = 0; i < kNumAttributes; ++i) {
      vocab.register_value(attribute_from_ordinal(i + 1),
                           fields[static_cast<std::size_t>(i + 1)]);
    }
  }
  std::ofstream out(vocab_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + vocab_path);
  write_vocabulary(vocab, out);
  return 0;
}

int run_vocab_show(const std::string& vocab_path) {
  Vocabulary vocab = load_vocab_or_default(vocab_path);
  write_vocabulary(vocab, std::cout);
  return 0;
}

std::vector<std::string> validate_corpus_codes(const Corpus& corpus,
                                               const Vocabulary& vocab) {
  std::vector<std::string> violations;
  for (const auto& s : corpus.scenarios) {
    for (int i = 0; i < kNumAttributes; ++i) {
      AttributeKind kind = attribute_from_ordinal(i + 1);
      int code = s.codes[static_cast<std::size_t>(i)];
      if (code >= vocab.size(kind)) {
        violations.push_back(s.scenario_id + ": code " + std::to_string(code) +
                             " out of range for attribute " + attribute_name(kind));
      }
    }
  }
  return violations;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attack-scenario classification over a 12-attribute schema"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 42;
  app.add_option("--seed", seed, "Global RNG seed")->envname("DS_SEED");

  // vocab
  auto* vocab_cmd = app.add_subcommand("vocab", "Build or show a vocabulary");
  std::string vocab_action, vocab_corpus, vocab_file;
  vocab_cmd->add_option("action", vocab_action, "build or show")->required();
  vocab_cmd->add_option("--corpus", vocab_corpus, "Scenario file with value strings");
  vocab_cmd->add_option("--vocab", vocab_file, "Vocabulary file path");

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic corpus");
  std::string gen_out, gen_templates, gen_vocab, gen_train_out, gen_test_out;
  int gen_per_pattern = 6;
  double gen_noise = 0.15;
  double gen_train_fraction = 260.0 / 311.0;
  gen_cmd->add_option("--out", gen_out, "Corpus output path")->required();
  gen_cmd->add_option("--templates", gen_templates, "Template CSV (default: built-in)");
  gen_cmd->add_option("--vocab", gen_vocab, "Vocabulary file (default: built-in)");
  gen_cmd->add_option("--per-pattern", gen_per_pattern, "Scenarios per pattern");
  gen_cmd->add_option("--noise", gen_noise, "Jitter probability per attribute");
  gen_cmd->add_option("--train-out", gen_train_out, "Also write a stratified train split");
  gen_cmd->add_option("--test-out", gen_test_out, "Also write the matching test split");
  gen_cmd->add_option("--train-fraction", gen_train_fraction, "Train fraction for the split");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train the partitioned ensemble");
  std::string train_corpus, train_vocab, train_model, train_outdir = ".";
  TrainConfig tconfig;
  NetworkSpec nspec;
  int max_classes = 28;
  double band = 0.8;
  train_cmd->add_option("--corpus", train_corpus, "Training corpus")->required();
  train_cmd->add_option("--vocab", train_vocab, "Vocabulary file (default: built-in)");
  train_cmd->add_option("--model", train_model, "Ensemble model output path")->required();
  train_cmd->add_option("--out-dir", train_outdir, "Directory for per-partition MSE CSVs");
  train_cmd->add_option("--hidden", nspec.n_hidden, "Hidden layer size");
  train_cmd->add_option("--lr", tconfig.learning_rate, "Learning rate");
  train_cmd->add_option("--momentum", tconfig.momentum, "Momentum");
  train_cmd->add_option("--max-iter", tconfig.max_iterations, "Iteration cap");
  train_cmd->add_option("--patience", tconfig.patience, "Early-stopping patience");
  train_cmd->add_option("--band", band, "Target scaling band");
  train_cmd->add_option("--max-classes", max_classes, "Max pattern IDs per network");
  std::string out_act = "tansig";
  train_cmd->add_option("--out-act", out_act, "Output activation: tansig or linear");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on a corpus");
  std::string eval_model, eval_corpus, eval_vocab, eval_report;
  eval_cmd->add_option("--model", eval_model, "Ensemble model path")->required();
  eval_cmd->add_option("--corpus", eval_corpus, "Test corpus")->required();
  eval_cmd->add_option("--vocab", eval_vocab, "Vocabulary file (default: built-in)");
  eval_cmd->add_option("--report", eval_report, "Evaluation CSV output path");

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Classify one scenario");
  std::string predict_model, predict_vocab;
  std::vector<std::string> predict_args;
  predict_cmd->add_option("--model", predict_model, "Ensemble model path")->required();
  predict_cmd->add_option("--vocab", predict_vocab, "Vocabulary file (default: built-in)");
  predict_cmd->add_option("attributes", predict_args, "12 kind=value assignments");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*vocab_cmd) {
      if (vocab_action == "build") {
        if (vocab_corpus.empty() || vocab_file.empty()) {
          throw std::runtime_error("vocab build requires --corpus and --vocab");
        }
        return run_vocab_build(vocab_corpus, vocab_file);
      }
      if (vocab_action == "show") return run_vocab_show(vocab_file);
      throw std::runtime_error("unknown vocab action '" + vocab_action + "'");
    }

    if (*gen_cmd) {
      Vocabulary vocab = load_vocab_or_default(gen_vocab);
      std::vector<PatternTemplate> templates;
      if (gen_templates.empty()) {
        templates = default_templates(vocab);
      } else {
        std::ifstream in(gen_templates);
        if (!in) throw std::runtime_error("cannot open template file: " + gen_templates);
        templates = parse_templates(in);
      }
      Corpus corpus = generate_corpus(templates, gen_per_pattern, gen_noise, seed, vocab);
      save_corpus(corpus, gen_out);
      std::cout << "wrote " << corpus.scenarios.size() << " scenarios to " << gen_out << '\n';
      if (!gen_train_out.empty() || !gen_test_out.empty()) {
        if (gen_train_out.empty() || gen_test_out.empty()) {
          throw std::runtime_error("--train-out and --test-out must be given together");
        }
        auto [train_c, test_c] =
            split_corpus(corpus, SplitSpec{gen_train_fraction, seed, true});
        save_corpus(train_c, gen_train_out);
        save_corpus(test_c, gen_test_out);
        std::cout << "split " << train_c.scenarios.size() << " train / "
                  << test_c.scenarios.size() << " test\n";
      }
      return 0;
    }

    if (*train_cmd) {
      tconfig.seed = seed;
      nspec.output_activation = activation_from_name(out_act);
      Vocabulary vocab = load_vocab_or_default(train_vocab);
      Corpus corpus = load_corpus(train_corpus);
      if (corpus.scenarios.empty()) {
        throw std::runtime_error("training corpus is empty");
      }
      auto violations = validate_corpus_codes(corpus, vocab);
      if (!violations.empty()) {
        for (const auto& v : violations) std::cerr << v << '\n';
        return 1;
      }
      EnsembleModel model =
          train_ensemble(corpus, vocab, tconfig, nspec, max_classes, band);
      save_ensemble(model, train_model);
      fs::create_directories(train_outdir);
      for (std::size_t k = 0; k < model.partitions.size(); ++k) {
        fs::path csv = fs::path(train_outdir) / ("mse_partition" + std::to_string(k) + ".csv");
        std::ofstream out(csv, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for writing: " + csv.string());
        write_report_csv(model.partitions[k].report, out);
      }
      for (std::size_t k = 0; k < model.partitions.size(); ++k) {
        const auto& p = model.partitions[k];
        std::cout << "partition " << k << " [" << p.lo << "," << p.hi << "] stopped at epoch "
                  << p.report.stopped_at_epoch << " (" << stop_reason_name(p.report.stop_reason)
                  << "), final train MSE " << format_double(p.report.train_mse.back()) << '\n';
      }
      return 0;
    }

    if (*eval_cmd) {
      Vocabulary vocab = load_vocab_or_default(eval_vocab);
      EnsembleModel model = load_ensemble(eval_model);
      Corpus corpus = load_corpus(eval_corpus);
      EvalReport report = evaluate(model, corpus, vocab);
      if (!eval_report.empty()) {
        std::ofstream out(eval_report, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for writing: " + eval_report);
        write_eval_csv(report, out);
      }
      for (std::size_t k = 0; k < report.partition_accuracy.size(); ++k) {
        std::printf("partition %zu accuracy %.4f\n", k, report.partition_accuracy[k]);
      }
      std::printf("overall accuracy %.4f\n", report.overall_accuracy);
      return 0;
    }

    if (*predict_cmd) {
      Vocabulary vocab = load_vocab_or_default(predict_vocab);
      EnsembleModel model = load_ensemble(predict_model);
      AttackScenario scenario;
      scenario.scenario_id = "cli";
      std::set<int> seen;
      for (const auto& arg : predict_args) {
        auto eq = arg.find('=');
        if (eq == std::string::npos) {
          throw std::runtime_error("expected kind=value, got '" + arg + "'");
        }
        auto kind = attribute_from_name(arg.substr(0, eq));
        if (!kind) throw std::runtime_error("unknown attribute '" + arg.substr(0, eq) + "'");
        int ord = attribute_ordinal(*kind);
        if (!seen.insert(ord).second) {
          throw std::runtime_error(std::string("duplicate attribute ") + attribute_name(*kind));
        }
        scenario.values[static_cast<std::size_t>(ord - 1)] = arg.substr(eq + 1);
      }
      if (seen.size() != kNumAttributes) {
        std::string missing;
        for (int ord = 1; ord <= kNumAttributes; ++ord) {
          if (!seen.count(ord)) {
            if (!missing.empty()) missing += ", ";
            missing += attribute_name(attribute_from_ordinal(ord));
          }
        }
        throw std::runtime_error("missing attributes: " + missing);
      }
      Prediction p = predict_pattern(model, scenario, vocab);
      std::cout << "predicted=" << p.predicted_id << " raw=" << format_double(p.raw)
                << " partition=" << p.partition << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
