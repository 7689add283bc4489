#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "cookplan/error.hpp"

namespace cookplan::staterec {

/// Timestamped feature vectors, nominally at 10 Hz.
struct FeatureSeries {
  std::vector<double> timestamps;
  /// One row per frame, all of width `dim()`.
  std::vector<std::vector<double>> features;

  std::size_t size() const noexcept { return timestamps.size(); }
  std::size_t dim() const noexcept { return features.empty() ? 0 : features.front().size(); }

  friend bool operator==(const FeatureSeries&, const FeatureSeries&) = default;
};

struct AnnotatedSeries {
  FeatureSeries series;
  /// Seconds; the first frame at or after this time is post-change.
  double annotation = 0.0;

  friend bool operator==(const AnnotatedSeries&, const AnnotatedSeries&) = default;
};

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error("cannot format number");
  return std::string(buf, end);
}

inline double parse_double(std::string_view text, SourcePos pos) {
  double v = 0.0;
  const char* b = text.data();
  const char* e = text.data() + text.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || ptr != e || b == e) {
    throw ParseError("expected a number, got '" + std::string(text) + "'", pos);
  }
  if (!std::isfinite(v)) throw ParseError("non-finite value '" + std::string(text) + "'", pos);
  return v;
}

inline void check_series(const FeatureSeries& s) {
  if (s.size() < 2) throw ModelError("a feature series needs at least 2 frames");
  if (s.features.size() != s.timestamps.size()) throw ModelError("timestamp and feature counts differ");
  const std::size_t d = s.dim();
  if (d == 0) throw ModelError("feature dimension must be positive");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.features[i].size() != d) {
      throw ModelError("frame " + std::to_string(i) + " has dimension " +
                       std::to_string(s.features[i].size()) + ", expected " + std::to_string(d));
    }
    if (i > 0 && !(s.timestamps[i] > s.timestamps[i - 1])) {
      throw ModelError("timestamps must be strictly increasing (frame " + std::to_string(i) + ")");
    }
  }
}

/// Reads `t,f0,f1,...,f{D-1}` CSV. D comes from the header.
inline FeatureSeries parse_feature_csv(std::string_view text) {
  FeatureSeries s;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  std::size_t dim = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!header) {
      if (cells.size() < 2 || cells[0] != "t") {
        throw ParseError("expected header 't,f0,f1,...'", SourcePos{line_no, 1});
      }
      for (std::size_t i = 1; i < cells.size(); ++i) {
        if (cells[i] != "f" + std::to_string(i - 1)) {
          throw ParseError("header column " + std::to_string(i + 1) + " should be 'f" +
                               std::to_string(i - 1) + "'",
                           SourcePos{line_no, 1});
        }
      }
      dim = cells.size() - 1;
      header = true;
      continue;
    }
    if (cells.size() != dim + 1) {
      throw ParseError("row has " + std::to_string(cells.size()) + " columns, expected " +
                           std::to_string(dim + 1),
                       SourcePos{line_no, 1});
    }
    s.timestamps.push_back(parse_double(cells[0], SourcePos{line_no, 1}));
    std::vector<double> row(dim);
    for (std::size_t i = 0; i < dim; ++i) row[i] = parse_double(cells[i + 1], SourcePos{line_no, 1});
    s.features.push_back(std::move(row));
  }
  if (!header) throw ParseError("empty feature file", SourcePos{1, 1});
  check_series(s);
  return s;
}

inline std::string write_feature_csv(const FeatureSeries& s) {
  std::string out = "t";
  for (std::size_t i = 0; i < s.dim(); ++i) out += ",f" + std::to_string(i);
  out += "\n";
  for (std::size_t r = 0; r < s.size(); ++r) {
    out += format_double(s.timestamps[r]);
    for (double v : s.features[r]) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

inline double parse_annotation(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string first, extra;
  if (!(in >> first)) throw ParseError("empty annotation file", SourcePos{1, 1});
  if (in >> extra) throw ParseError("annotation file must hold a single number", SourcePos{1, 1});
  return parse_double(first, SourcePos{1, 1});
}

inline std::string write_annotation(double t) { return format_double(t) + "\n"; }

/// 0 for frames before the annotation time, 1 from it on.
inline std::vector<int> label_series(const AnnotatedSeries& a) {
  const auto& ts = a.series.timestamps;
  if (ts.empty()) throw ModelError("empty series");
  if (a.annotation < ts.front() || a.annotation > ts.back()) {
    throw ModelError("annotation time " + format_double(a.annotation) + " s is outside [" +
                     format_double(ts.front()) + ", " + format_double(ts.back()) + "]");
  }
  std::vector<int> labels(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) labels[i] = ts[i] < a.annotation ? 0 : 1;
  return labels;
}

/// Timestamp of frame `i` at 10 Hz starting from 0.
inline double frame_time(std::size_t i) { return static_cast<double>(i) / 10.0; }

/// Step-change series: frames before `change_frame` ~ N(0, I), frames from
/// it on ~ N(mu1, I) with mu1 = separation * (1, ..., 1) / sqrt(D), so the
/// class means are `separation` standard deviations apart. The seed only
/// drives the noise.
inline AnnotatedSeries synthesize_series(std::size_t dim, std::size_t frames, std::size_t change_frame,
                                         double separation, std::uint64_t seed) {
  if (dim == 0) throw ModelError("dimension must be positive");
  if (frames < 2) throw ModelError("need at least 2 frames");
  if (change_frame == 0 || change_frame >= frames) {
    throw ModelError("change frame must satisfy 0 < change-frame < frames");
  }
  if (!(separation >= 0.0) || !std::isfinite(separation)) throw ModelError("separation must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double shift = separation / std::sqrt(static_cast<double>(dim));
  AnnotatedSeries a;
  a.series.timestamps.resize(frames);
  a.series.features.assign(frames, std::vector<double>(dim));
  for (std::size_t i = 0; i < frames; ++i) {
    a.series.timestamps[i] = frame_time(i);
    const double mean = i < change_frame ? 0.0 : shift;
    for (std::size_t j = 0; j < dim; ++j) a.series.features[i][j] = mean + noise(rng);
  }
  a.annotation = frame_time(change_frame);
  return a;
}

}  // namespace cookplan::staterec
