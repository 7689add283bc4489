#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cookplan/error.hpp"
#include "cookplan/staterec/series.hpp"

namespace cookplan::staterec {

struct TrainConfig {
  double l2 = 1.0;
  std::size_t max_epochs = 1000;
  /// Stop once an iteration lowers the objective by less than this.
  double tol = 1e-8;
  /// Recorded in the probe file; training itself is deterministic.
  std::uint64_t seed = 0;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Logistic probe over standardized features.
struct LinearProbe {
  std::vector<double> mean;
  std::vector<double> scale;
  std::vector<double> weights;
  double bias = 0.0;
  TrainConfig config;

  std::size_t dim() const noexcept { return weights.size(); }

  /// Probability that `frame` is post-change.
  double score(const std::vector<double>& frame) const {
    if (frame.size() != dim()) {
      throw ModelError("frame dimension " + std::to_string(frame.size()) + " does not match probe dimension " +
                       std::to_string(dim()));
    }
    double z = bias;
    for (std::size_t j = 0; j < dim(); ++j) z += weights[j] * (frame[j] - mean[j]) / scale[j];
    return 1.0 / (1.0 + std::exp(-z));
  }

  friend bool operator==(const LinearProbe&, const LinearProbe&) = default;
};

/// Per-iteration record of the optimizer.
struct TrainLog {
  std::vector<double> objective;  ///< objective before each accepted step, then the final value
  std::size_t iterations = 0;
  bool converged = false;
};

/// Standardized, labeled training matrix.
struct Dataset {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
};

namespace detail {

/// log(1 + exp(v)) without overflow.
inline double softplus(double v) { return v > 0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v)); }

inline double sigmoid(double v) {
  if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

}  // namespace detail

/// J(w, b) = (1/N) * [ sum_i logloss_i + (l2/2) * |w|^2 ]; the bias is not
/// regularized. Writes dJ/dw into `grad_w` and dJ/db into `grad_b`.
inline double objective(const Dataset& data, const std::vector<double>& w, double b, double l2,
                        std::vector<double>* grad_w = nullptr, double* grad_b = nullptr) {
  const std::size_t n = data.x.size();
  const std::size_t d = w.size();
  double loss = 0.0;
  if (grad_w) grad_w->assign(d, 0.0);
  if (grad_b) *grad_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double z = b;
    for (std::size_t j = 0; j < d; ++j) z += w[j] * data.x[i][j];
    // logloss = softplus(z) - y z
    loss += detail::softplus(z) - (data.y[i] ? z : 0.0);
    if (grad_w || grad_b) {
      const double r = detail::sigmoid(z) - data.y[i];
      if (grad_w) {
        for (std::size_t j = 0; j < d; ++j) (*grad_w)[j] += r * data.x[i][j];
      }
      if (grad_b) *grad_b += r;
    }
  }
  double sq = 0.0;
  for (double v : w) sq += v * v;
  const double inv_n = 1.0 / static_cast<double>(n);
  if (grad_w) {
    for (std::size_t j = 0; j < d; ++j) (*grad_w)[j] = ((*grad_w)[j] + l2 * w[j]) * inv_n;
  }
  if (grad_b) *grad_b *= inv_n;
  return (loss + 0.5 * l2 * sq) * inv_n;
}

/// Pools the labeled frames of all series and freezes the standardization.
inline Dataset build_dataset(const std::vector<AnnotatedSeries>& data, std::vector<double>& mean,
                             std::vector<double>& scale) {
  if (data.empty()) throw ModelError("training needs at least one series");
  const std::size_t d = data.front().series.dim();
  Dataset ds;
  for (std::size_t k = 0; k < data.size(); ++k) {
    check_series(data[k].series);
    if (data[k].series.dim() != d) {
      throw ModelError("series " + std::to_string(k + 1) + " has dimension " +
                       std::to_string(data[k].series.dim()) + ", expected " + std::to_string(d));
    }
    const auto labels = label_series(data[k]);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      ds.x.push_back(data[k].series.features[i]);
      ds.y.push_back(labels[i]);
    }
  }
  std::size_t ones = 0;
  for (int v : ds.y) ones += static_cast<std::size_t>(v);
  if (ones == 0 || ones == ds.y.size()) {
    throw ModelError("all training frames carry the same label; need both pre- and post-change frames");
  }
  const double n = static_cast<double>(ds.x.size());
  mean.assign(d, 0.0);
  scale.assign(d, 0.0);
  for (const auto& row : ds.x) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
  }
  for (auto& m : mean) m /= n;
  for (const auto& row : ds.x) {
    for (std::size_t j = 0; j < d; ++j) scale[j] += (row[j] - mean[j]) * (row[j] - mean[j]);
  }
  for (auto& s : scale) {
    s = std::sqrt(s / n);
    if (!(s > 1e-12)) s = 1.0;
  }
  for (auto& row : ds.x) {
    for (std::size_t j = 0; j < d; ++j) row[j] = (row[j] - mean[j]) / scale[j];
  }
  return ds;
}

/// Full-batch gradient descent from zero with Armijo backtracking.
inline LinearProbe train_probe(const std::vector<AnnotatedSeries>& data, const TrainConfig& cfg = {},
                               TrainLog* log = nullptr) {
  if (!(cfg.l2 > 0.0) || cfg.max_epochs == 0 || !(cfg.tol > 0.0)) {
    throw ModelError("l2, max-epochs and tol must be positive");
  }
  LinearProbe probe;
  probe.config = cfg;
  const Dataset ds = build_dataset(data, probe.mean, probe.scale);
  const std::size_t d = probe.mean.size();
  std::vector<double> w(d, 0.0), gw, trial(d);
  double b = 0.0, gb = 0.0;
  double f = objective(ds, w, b, cfg.l2, &gw, &gb);
  double step = 1.0;
  TrainLog local;
  for (std::size_t it = 0; it < cfg.max_epochs; ++it) {
    local.objective.push_back(f);
    double g2 = gb * gb;
    for (double v : gw) g2 += v * v;
    if (g2 == 0.0) {
      local.converged = true;
      break;
    }
    double f_new = f;
    double b_new = b;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      for (std::size_t j = 0; j < d; ++j) trial[j] = w[j] - step * gw[j];
      b_new = b - step * gb;
      f_new = objective(ds, trial, b_new, cfg.l2);
      if (f_new <= f - 1e-4 * step * g2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      local.converged = true;
      break;
    }
    w = trial;
    b = b_new;
    const double decrease = f - f_new;
    f = objective(ds, w, b, cfg.l2, &gw, &gb);
    ++local.iterations;
    step = std::min(step * 2.0, 1e3);
    if (decrease < cfg.tol) {
      local.converged = true;
      break;
    }
  }
  local.objective.push_back(f);
  probe.weights = w;
  probe.bias = b;
  if (log) *log = std::move(local);
  return probe;
}

/// Fraction of training frames classified correctly.
inline double training_accuracy(const LinearProbe& probe, const std::vector<AnnotatedSeries>& data) {
  std::size_t correct = 0, total = 0;
  for (const auto& a : data) {
    const auto labels = label_series(a);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const int predicted = probe.score(a.series.features[i]) > 0.5 ? 1 : 0;
      correct += predicted == labels[i];
      ++total;
    }
  }
  return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

struct DetectionResult {
  std::optional<double> time;
  std::optional<std::size_t> frame;
  std::vector<int> labels;
  std::vector<double> scores;
};

/// Classifies frames in time order; the change is detected at the first
/// frame whose score exceeds 0.5.
inline DetectionResult detect_change(const LinearProbe& probe, const FeatureSeries& s) {
  if (s.dim() != probe.dim()) {
    throw ModelError("series dimension " + std::to_string(s.dim()) + " does not match probe dimension " +
                     std::to_string(probe.dim()));
  }
  DetectionResult r;
  r.scores.reserve(s.size());
  r.labels.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double p = probe.score(s.features[i]);
    r.scores.push_back(p);
    r.labels.push_back(p > 0.5 ? 1 : 0);
    if (p > 0.5 && !r.frame) {
      r.frame = i;
      r.time = s.timestamps[i];
    }
  }
  return r;
}

/// Signed detected-minus-annotated time, or nullopt for a miss.
inline std::optional<double> evaluate(const LinearProbe& probe, const AnnotatedSeries& a) {
  const auto r = detect_change(probe, a.series);
  if (!r.time) return std::nullopt;
  return *r.time - a.annotation;
}

inline std::string save_probe(const LinearProbe& p) {
  auto vec = [](const std::vector<double>& v) {
    std::string out;
    for (double x : v) out += " " + format_double(x);
    return out;
  };
  std::string out = "cookplan-probe 1\n";
  out += "dimension " + std::to_string(p.dim()) + "\n";
  out += "l2 " + format_double(p.config.l2) + "\n";
  out += "max-epochs " + std::to_string(p.config.max_epochs) + "\n";
  out += "tol " + format_double(p.config.tol) + "\n";
  out += "seed " + std::to_string(p.config.seed) + "\n";
  out += "bias " + format_double(p.bias) + "\n";
  out += "mean" + vec(p.mean) + "\n";
  out += "scale" + vec(p.scale) + "\n";
  out += "weights" + vec(p.weights) + "\n";
  return out;
}

inline LinearProbe load_probe(std::string_view text) {
  LinearProbe p;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  std::size_t dim = 0;
  bool have_dim = false, have_bias = false;
  while (std::getline(in, line)) {
    ++line_no;
    const SourcePos pos{line_no, 1};
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::vector<std::string> values;
    for (std::string v; ls >> v;) values.push_back(v);
    auto one = [&]() -> const std::string& {
      if (values.size() != 1) throw ParseError("'" + key + "' takes one value", pos);
      return values[0];
    };
    auto many = [&](std::vector<double>& dst) {
      if (!have_dim) throw ParseError("'dimension' must come before '" + key + "'", pos);
      if (values.size() != dim) throw ParseError("'" + key + "' needs " + std::to_string(dim) + " values", pos);
      dst.clear();
      for (const auto& v : values) dst.push_back(parse_double(v, pos));
    };
    if (line_no == 1) {
      if (key != "cookplan-probe" || values != std::vector<std::string>{"1"}) {
        throw ParseError("not a probe file (expected 'cookplan-probe 1')", pos);
      }
    } else if (key == "dimension") {
      dim = static_cast<std::size_t>(parse_double(one(), pos));
      have_dim = dim > 0;
      if (!have_dim) throw ParseError("dimension must be positive", pos);
    } else if (key == "l2") {
      p.config.l2 = parse_double(one(), pos);
    } else if (key == "max-epochs") {
      p.config.max_epochs = static_cast<std::size_t>(parse_double(one(), pos));
    } else if (key == "tol") {
      p.config.tol = parse_double(one(), pos);
    } else if (key == "seed") {
      const auto& v = one();
      auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), p.config.seed);
      if (ec != std::errc{} || ptr != v.data() + v.size()) throw ParseError("malformed seed '" + v + "'", pos);
    } else if (key == "bias") {
      p.bias = parse_double(one(), pos);
      have_bias = true;
    } else if (key == "mean") {
      many(p.mean);
    } else if (key == "scale") {
      many(p.scale);
    } else if (key == "weights") {
      many(p.weights);
    } else {
      throw ParseError("unknown probe key '" + key + "'", pos);
    }
  }
  if (!have_dim || !have_bias || p.mean.size() != dim || p.scale.size() != dim || p.weights.size() != dim) {
    throw ParseError("incomplete probe file", SourcePos{line_no, 1});
  }
  for (double s : p.scale) {
    if (!(s > 0.0)) throw ParseError("probe scale values must be positive", SourcePos{line_no, 1});
  }
  return p;
}

}  // namespace cookplan::staterec
