#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sdnn/util.hpp"

namespace sdnn {

enum class Activation { TanSig, Linear };

inline const char* activation_name(Activation a) {
  return a == Activation::TanSig ? "tansig" : "linear";
}

inline Activation activation_from_name(std::string_view name) {
  if (name == "tansig") return Activation::TanSig;
  if (name == "linear") return Activation::Linear;
  throw std::runtime_error("unknown activation: '" + std::string(name) + "'");
}

struct NetworkSpec {
  int n_in = 12;
  int n_hidden = 20;
  int n_out = 1;
  Activation output_activation = Activation::TanSig;
};

// Three-layer feed-forward network. Weight matrices are row-major:
// w1 is n_hidden x n_in, w2 is n_out x n_hidden.
struct Network {
  NetworkSpec spec;
  std::vector<double> w1, b1, w2, b2;

  bool operator==(const Network&) const = default;
};

inline bool operator==(const NetworkSpec& a, const NetworkSpec& b) {
  return a.n_in == b.n_in && a.n_hidden == b.n_hidden && a.n_out == b.n_out &&
         a.output_activation == b.output_activation;
}

// 2/(1+exp(-2n)) - 1, saturating to exactly +-1 for |n| > 20. Inside the
// guard the result is kept strictly within (-1, 1): where the correctly
// rounded value would hit +-1 the nearest interior double is returned.
inline double tansig(double n) {
  if (n > 20.0) return 1.0;
  if (n < -20.0) return -1.0;
  double a = 2.0 / (1.0 + std::exp(-2.0 * n)) - 1.0;
  if (a >= 1.0) return std::nextafter(1.0, 0.0);
  if (a <= -1.0) return std::nextafter(-1.0, 0.0);
  return a;
}

// Derivative expressed in the activation value: d tansig / dn = 1 - a^2.
inline double tansig_prime(double a) { return 1.0 - a * a; }

// Weights i.i.d. uniform on [-r, r] with r = 1/sqrt(fan_in); biases zero.
inline Network init_network(const NetworkSpec& spec, std::uint64_t seed) {
  if (spec.n_in < 1 || spec.n_hidden < 1 || spec.n_out < 1) {
    throw std::invalid_argument("all layer sizes must be >= 1");
  }
  Network net;
  net.spec = spec;
  std::mt19937_64 rng(seed);
  auto fill = [&rng](std::vector<double>& w, std::size_t count, int fan_in) {
    double r = 1.0 / std::sqrt(static_cast<double>(fan_in));
    w.resize(count);
    for (auto& v : w) v = -r + 2.0 * r * rand_unit(rng);
  };
  fill(net.w1, static_cast<std::size_t>(spec.n_hidden) * spec.n_in, spec.n_in);
  net.b1.assign(static_cast<std::size_t>(spec.n_hidden), 0.0);
  fill(net.w2, static_cast<std::size_t>(spec.n_out) * spec.n_hidden, spec.n_hidden);
  net.b2.assign(static_cast<std::size_t>(spec.n_out), 0.0);
  return net;
}

struct ForwardResult {
  std::vector<double> output;  // n_out
  std::vector<double> hidden;  // n_hidden activations, kept for gradients
};

inline ForwardResult forward(const Network& net, std::span<const double> x) {
  const auto& s = net.spec;
  if (static_cast<int>(x.size()) != s.n_in) {
    throw std::invalid_argument("input size " + std::to_string(x.size()) +
                                " != n_in " + std::to_string(s.n_in));
  }
  ForwardResult r;
  r.hidden.resize(static_cast<std::size_t>(s.n_hidden));
  for (int j = 0; j < s.n_hidden; ++j) {
    double z = net.b1[static_cast<std::size_t>(j)];
    const double* row = &net.w1[static_cast<std::size_t>(j) * s.n_in];
    for (int i = 0; i < s.n_in; ++i) z += row[i] * x[static_cast<std::size_t>(i)];
    r.hidden[static_cast<std::size_t>(j)] = tansig(z);
  }
  r.output.resize(static_cast<std::size_t>(s.n_out));
  for (int o = 0; o < s.n_out; ++o) {
    double z = net.b2[static_cast<std::size_t>(o)];
    const double* row = &net.w2[static_cast<std::size_t>(o) * s.n_hidden];
    for (int j = 0; j < s.n_hidden; ++j) z += row[j] * r.hidden[static_cast<std::size_t>(j)];
    r.output[static_cast<std::size_t>(o)] =
        s.output_activation == Activation::TanSig ? tansig(z) : z;
  }
  return r;
}

inline std::vector<double> predict(const Network& net, std::span<const double> x) {
  return forward(net, x).output;
}

// Mean over all samples and components of the squared error.
inline double mse(const std::vector<std::vector<double>>& outputs,
                  const std::vector<std::vector<double>>& targets) {
  if (outputs.size() != targets.size() || outputs.empty()) {
    throw std::invalid_argument("mse: sample count mismatch or empty");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t s = 0; s < outputs.size(); ++s) {
    if (outputs[s].size() != targets[s].size()) {
      throw std::invalid_argument("mse: vector length mismatch at sample " +
                                  std::to_string(s));
    }
    for (std::size_t o = 0; o < outputs[s].size(); ++o) {
      double e = outputs[s][o] - targets[s][o];
      sum += e * e;
      ++count;
    }
  }
  return sum / static_cast<double>(count);
}

using Sample = std::pair<std::vector<double>, std::vector<double>>;  // (input, target)

struct Gradients {
  std::vector<double> w1, b1, w2, b2;
};

// Exact gradient of the batch MSE with respect to every weight and bias.
inline Gradients backprop_gradients(const Network& net, std::span<const Sample> batch) {
  if (batch.empty()) throw std::invalid_argument("backprop: empty batch");
  const auto& s = net.spec;
  Gradients g;
  g.w1.assign(net.w1.size(), 0.0);
  g.b1.assign(net.b1.size(), 0.0);
  g.w2.assign(net.w2.size(), 0.0);
  g.b2.assign(net.b2.size(), 0.0);

  const double scale = 2.0 / (static_cast<double>(batch.size()) * s.n_out);
  std::vector<double> delta_out(static_cast<std::size_t>(s.n_out));
  std::vector<double> delta_hidden(static_cast<std::size_t>(s.n_hidden));

  for (const auto& [x, t] : batch) {
    if (static_cast<int>(t.size()) != s.n_out) {
      throw std::invalid_argument("backprop: target size mismatch");
    }
    ForwardResult fr = forward(net, x);
    for (int o = 0; o < s.n_out; ++o) {
      double y = fr.output[static_cast<std::size_t>(o)];
      double d = scale * (y - t[static_cast<std::size_t>(o)]);
      if (s.output_activation == Activation::TanSig) d *= tansig_prime(y);
      delta_out[static_cast<std::size_t>(o)] = d;
      g.b2[static_cast<std::size_t>(o)] += d;
      double* grow = &g.w2[static_cast<std::size_t>(o) * s.n_hidden];
      for (int j = 0; j < s.n_hidden; ++j) {
        grow[j] += d * fr.hidden[static_cast<std::size_t>(j)];
      }
    }
    for (int j = 0; j < s.n_hidden; ++j) {
      double back = 0.0;
      for (int o = 0; o < s.n_out; ++o) {
        back += net.w2[static_cast<std::size_t>(o) * s.n_hidden + j] *
                delta_out[static_cast<std::size_t>(o)];
      }
      delta_hidden[static_cast<std::size_t>(j)] =
          back * tansig_prime(fr.hidden[static_cast<std::size_t>(j)]);
    }
    for (int j = 0; j < s.n_hidden; ++j) {
      double d = delta_hidden[static_cast<std::size_t>(j)];
      g.b1[static_cast<std::size_t>(j)] += d;
      double* grow = &g.w1[static_cast<std::size_t>(j) * s.n_in];
      for (int i = 0; i < s.n_in; ++i) grow[i] += d * x[static_cast<std::size_t>(i)];
    }
  }
  return g;
}

struct TrainConfig {
  double learning_rate = 0.05;
  double momentum = 0.9;
  int max_iterations = 1000;
  double mse_goal = 0.0;  // 0 disables the goal stop
  int patience = 6;
  double validation_fraction = 0.15;
  std::uint64_t seed = 42;
};

enum class StopReason { GoalReached, PatienceExhausted, MaxIterations };

inline const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::GoalReached: return "goal_reached";
    case StopReason::PatienceExhausted: return "patience_exhausted";
    default: return "max_iterations";
  }
}

struct TrainReport {
  std::vector<double> train_mse;
  std::vector<double> val_mse;  // empty when no validation split
  StopReason stop_reason = StopReason::MaxIterations;
  int stopped_at_epoch = 0;
  int best_epoch = 0;
};

namespace detail {
inline double dataset_mse(const Network& net, const std::vector<Sample>& data,
                          std::span<const std::size_t> idx) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i : idx) {
    ForwardResult fr = forward(net, data[i].first);
    for (std::size_t o = 0; o < fr.output.size(); ++o) {
      double e = fr.output[o] - data[i].second[o];
      sum += e * e;
      ++count;
    }
  }
  return sum / static_cast<double>(count);
}
}  // namespace detail

// Full-batch gradient descent with momentum. One epoch = one full-batch
// update. Stops on the MSE goal, on `patience` consecutive epochs of
// non-improving validation MSE (restoring the best-epoch weights), or at
// the iteration cap.
inline TrainReport train(Network& net, const std::vector<Sample>& train_set,
                         const TrainConfig& config) {
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t val_n = 0;
  if (config.validation_fraction > 0.0) {
    std::mt19937_64 rng(config.seed);
    shuffle_deterministic(order, rng);
    val_n = static_cast<std::size_t>(config.validation_fraction *
                                     static_cast<double>(order.size()));
    if (order.size() - val_n == 0) val_n = 0;
  }
  std::vector<std::size_t> fit_idx(order.begin(), order.end() - static_cast<long>(val_n));
  std::vector<std::size_t> val_idx(order.end() - static_cast<long>(val_n), order.end());

  std::vector<Sample> batch;
  batch.reserve(fit_idx.size());
  for (std::size_t i : fit_idx) batch.push_back(train_set[i]);

  Gradients vel;
  vel.w1.assign(net.w1.size(), 0.0);
  vel.b1.assign(net.b1.size(), 0.0);
  vel.w2.assign(net.w2.size(), 0.0);
  vel.b2.assign(net.b2.size(), 0.0);

  TrainReport report;
  Network best = net;
  double best_val = std::numeric_limits<double>::infinity();
  int bad_epochs = 0;

  auto apply = [&](std::vector<double>& w, std::vector<double>& v,
                   const std::vector<double>& g) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      v[i] = config.momentum * v[i] - config.learning_rate * g[i];
      w[i] += v[i];
    }
  };

  for (int epoch = 1; epoch <= config.max_iterations; ++epoch) {
    Gradients g = backprop_gradients(net, batch);
    apply(net.w1, vel.w1, g.w1);
    apply(net.b1, vel.b1, g.b1);
    apply(net.w2, vel.w2, g.w2);
    apply(net.b2, vel.b2, g.b2);

    double tmse = detail::dataset_mse(net, train_set, fit_idx);
    report.train_mse.push_back(tmse);
    report.stopped_at_epoch = epoch;

    if (!val_idx.empty()) {
      double vmse = detail::dataset_mse(net, train_set, val_idx);
      report.val_mse.push_back(vmse);
      if (vmse < best_val) {
        best_val = vmse;
        best = net;
        report.best_epoch = epoch;
        bad_epochs = 0;
      } else {
        ++bad_epochs;
      }
    } else {
      report.best_epoch = epoch;
    }

    if (config.mse_goal > 0.0 && tmse <= config.mse_goal) {
      report.stop_reason = StopReason::GoalReached;
      return report;
    }
    if (!val_idx.empty() && bad_epochs >= config.patience) {
      report.stop_reason = StopReason::PatienceExhausted;
      net = best;
      return report;
    }
  }
  report.stop_reason = StopReason::MaxIterations;
  if (!val_idx.empty()) net = best;
  return report;
}

// Model file: `mlpv1,<n_in>,<n_hidden>,<n_out>,<activation>` header, then
// w1 rows, the b1 row, w2 rows, the b2 row, values comma-separated with
// shortest round-trip formatting.
inline void write_network(const Network& net, std::ostream& out) {
  const auto& s = net.spec;
  out << "mlpv1," << s.n_in << ',' << s.n_hidden << ',' << s.n_out << ','
      << activation_name(s.output_activation) << '\n';
  auto write_row = [&out](const double* row, int n) {
    for (int i = 0; i < n; ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  };
  for (int j = 0; j < s.n_hidden; ++j) write_row(&net.w1[static_cast<std::size_t>(j) * s.n_in], s.n_in);
  write_row(net.b1.data(), s.n_hidden);
  for (int o = 0; o < s.n_out; ++o) write_row(&net.w2[static_cast<std::size_t>(o) * s.n_hidden], s.n_hidden);
  write_row(net.b2.data(), s.n_out);
}

inline Network parse_network(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty model stream");
  auto header = split_fields(line);
  if (header.size() != 5 || header[0] != "mlpv1") {
    throw std::runtime_error("bad model header: '" + line + "'");
  }
  NetworkSpec spec;
  spec.n_in = static_cast<int>(parse_long(header[1]));
  spec.n_hidden = static_cast<int>(parse_long(header[2]));
  spec.n_out = static_cast<int>(parse_long(header[3]));
  spec.output_activation = activation_from_name(header[4]);

  auto read_row = [&in](int n) {
    std::string row_line;
    if (!std::getline(in, row_line)) throw std::runtime_error("truncated model file");
    auto fields = split_fields(row_line);
    if (static_cast<int>(fields.size()) != n) {
      throw std::runtime_error("model row has " + std::to_string(fields.size()) +
                               " values, expected " + std::to_string(n));
    }
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) row[i] = parse_double(fields[i]);
    return row;
  };

  Network net;
  net.spec = spec;
  for (int j = 0; j < spec.n_hidden; ++j) {
    auto row = read_row(spec.n_in);
    net.w1.insert(net.w1.end(), row.begin(), row.end());
  }
  net.b1 = read_row(spec.n_hidden);
  for (int o = 0; o < spec.n_out; ++o) {
    auto row = read_row(spec.n_hidden);
    net.w2.insert(net.w2.end(), row.begin(), row.end());
  }
  net.b2 = read_row(spec.n_out);
  return net;
}

// Training-curve export: `epoch,train_mse,val_mse` (val column empty when
// no validation split was used).
inline void write_report_csv(const TrainReport& report, std::ostream& out) {
  out << "epoch,train_mse,val_mse\n";
  for (std::size_t e = 0; e < report.train_mse.size(); ++e) {
    out << (e + 1) << ',' << format_double(report.train_mse[e]) << ',';
    if (e < report.val_mse.size()) out << format_double(report.val_mse[e]);
    out << '\n';
  }
}

}  // namespace sdnn
