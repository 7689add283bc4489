#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cookplan/error.hpp"
#include "cookplan/goals/recipe_plan.hpp"
#include "cookplan/sim/validator.hpp"
#include "cookplan/staterec/probe.hpp"

namespace cookplan::sim {

/// Frame rate of the state-recognition stream.
inline constexpr double kFrameRate = 10.0;

/// Cooking actions whose effect is an ingredient state, and therefore wait
/// for the state change to be observed.
inline bool waits_for_state(std::string_view schema) {
  return schema == "stir" || schema == "heat" || schema == "cook" || schema == "boil" ||
         schema == "stir-fry";
}

/// How the simulator learns that a state change has happened.
struct WaitPolicy {
  enum class Kind { immediate, delay, detector };
  Kind kind = Kind::immediate;
  std::size_t frames = 0;  ///< for `delay`
  /// For `detector`: the probe runs over `stream` and the wait ends at the
  /// first frame classified post-change.
  const staterec::LinearProbe* probe = nullptr;
  const staterec::FeatureSeries* stream = nullptr;

  static WaitPolicy immediate() { return {}; }
  static WaitPolicy delay(std::size_t frames) { return {Kind::delay, frames, nullptr, nullptr}; }
  static WaitPolicy detector(const staterec::LinearProbe& p, const staterec::FeatureSeries& s) {
    return {Kind::detector, 0, &p, &s};
  }
};

/// Policy per waiting action schema; schemas without an entry use `fallback`.
struct StateChangeOracle {
  WaitPolicy fallback;
  std::map<std::string, WaitPolicy> per_schema;
  /// Longest wait before the run is abandoned, in seconds.
  double timeout = 600.0;

  const WaitPolicy& policy_for(const std::string& schema) const {
    auto it = per_schema.find(schema);
    return it == per_schema.end() ? fallback : it->second;
  }
};

struct TraceEntry {
  std::size_t step = 0;  ///< 1-based
  std::string action;
  std::string pre;
  std::string post;
  bool complemented = false;
  double wait = 0.0;
};

struct ExecutionTrace {
  std::vector<TraceEntry> entries;
  /// Set when a wait exceeded the timeout; that action was not completed.
  std::optional<TraceEntry> timeout;

  bool complete() const noexcept { return !timeout.has_value(); }
};

inline std::string format_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", s);
  return buf;
}

/// ```
/// entry 1 step=1 action=(hold egg arm1 stove) pre=<d> post=<d> complemented=1 wait=0.000
/// timeout 5 step=2 action=(boil egg poached-egg) pre=<d> waited=600.000
/// ```
inline std::string print_trace(const ExecutionTrace& t) {
  std::string out;
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    const auto& e = t.entries[i];
    out += "entry " + std::to_string(i + 1) + " step=" + std::to_string(e.step) + " action=" + e.action +
           " pre=" + e.pre + " post=" + e.post + " complemented=" + (e.complemented ? "1" : "0") +
           " wait=" + format_seconds(e.wait) + "\n";
  }
  if (t.timeout) {
    const auto& e = *t.timeout;
    out += "timeout " + std::to_string(t.entries.size() + 1) + " step=" + std::to_string(e.step) +
           " action=" + e.action + " pre=" + e.pre + " waited=" + format_seconds(e.wait) + "\n";
  }
  return out;
}

namespace detail {

inline std::string schema_of(const std::string& action) {
  const auto end = action.find_first_of(" )", 1);
  return action.substr(1, end - 1);
}

/// Seconds until the policy fires, or nullopt when it never does.
inline std::optional<double> wait_seconds(const WaitPolicy& p) {
  switch (p.kind) {
    case WaitPolicy::Kind::immediate: return 0.0;
    case WaitPolicy::Kind::delay: return static_cast<double>(p.frames) / kFrameRate;
    case WaitPolicy::Kind::detector: {
      if (p.probe == nullptr || p.stream == nullptr || p.stream->size() == 0) return std::nullopt;
      const auto r = staterec::detect_change(*p.probe, *p.stream);
      if (!r.time) return std::nullopt;
      return *r.time - p.stream->timestamps.front();
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Runs a validated plan. Waiting actions block until their oracle fires;
/// a wait that never fires or exceeds the timeout truncates the trace.
inline ExecutionTrace execute(const Replayer& replayer, const goals::PlanFile& plan,
                              const StateChangeOracle& oracle) {
  ExecutionTrace trace;
  AtomSet state = replayer.initial();
  for (std::size_t k = 0; k < plan.steps.size(); ++k) {
    for (const auto& a : plan.steps[k].actions) {
      TraceEntry e;
      e.step = k + 1;
      e.action = a.name;
      e.complemented = a.complemented;
      e.pre = digest(state);
      const std::string schema = detail::schema_of(a.name);
      if (waits_for_state(schema)) {
        const auto w = detail::wait_seconds(oracle.policy_for(schema));
        if (!w || *w > oracle.timeout) {
          e.wait = oracle.timeout;
          trace.timeout = e;
          return trace;
        }
        e.wait = *w;
      }
      AtomSet next = state;
      const auto outcome = replayer.apply(next, a.name);
      if (!outcome.failures.empty()) {
        throw Error("cannot execute " + a.name + ": " + outcome.failures.front());
      }
      state = std::move(next);
      e.post = digest(state);
      trace.entries.push_back(std::move(e));
    }
  }
  return trace;
}

}  // namespace cookplan::sim
