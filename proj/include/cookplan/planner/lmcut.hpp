#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

namespace cookplan::planner {

/// LM-cut lower bound on a delete-relaxed, unit-cost task with positive
/// preconditions only (negative conditions are compiled into extra facts by
/// the caller). Instances keep scratch buffers, so one object must not be
/// shared between threads.
class LmCut {
 public:
  static constexpr int kInfinity = std::numeric_limits<int>::max() / 4;

  LmCut(std::size_t num_facts, std::vector<std::vector<std::uint32_t>> pre,
        std::vector<std::vector<std::uint32_t>> eff, std::vector<std::uint32_t> goal)
      : num_facts_(num_facts + 2),
        init_fact_(static_cast<std::uint32_t>(num_facts)),
        goal_fact_(static_cast<std::uint32_t>(num_facts + 1)),
        pre_(std::move(pre)),
        eff_(std::move(eff)) {
    for (auto& p : pre_) {
      if (p.empty()) p.push_back(init_fact_);
    }
    base_cost_.assign(pre_.size(), 1);
    // Artificial goal action: all goal facts -> goal_fact_, cost 0.
    if (goal.empty()) goal.push_back(init_fact_);
    pre_.push_back(std::move(goal));
    eff_.push_back({goal_fact_});
    base_cost_.push_back(0);

    pre_of_.resize(num_facts_);
    achievers_.resize(num_facts_);
    for (std::uint32_t a = 0; a < pre_.size(); ++a) {
      for (auto f : pre_[a]) pre_of_[f].push_back(a);
      for (auto f : eff_[a]) achievers_[f].push_back(a);
    }
    hmax_.resize(num_facts_);
    unsat_.resize(pre_.size());
    pcf_.resize(pre_.size());
    zone_.resize(num_facts_);
    reached_.resize(num_facts_);
    in_cut_.resize(pre_.size());
  }

  /// Returns the heuristic value for the state whose true relaxed facts are
  /// `state`, or nullopt when the goal is relaxed-unreachable (dead end).
  std::optional<int> operator()(const std::vector<std::uint32_t>& state) {
    cost_ = base_cost_;
    compute_hmax(state);
    if (hmax_[goal_fact_] >= kInfinity) return std::nullopt;
    int h = 0;
    while (hmax_[goal_fact_] != 0) {
      mark_goal_zone();
      const auto cut = find_cut(state);
      int m = kInfinity;
      for (auto a : cut) m = std::min(m, cost_[a]);
      h += m;
      for (auto a : cut) cost_[a] -= m;
      compute_hmax(state);
    }
    return h;
  }

  /// Plain h^max under unit costs; used by tests as a weaker admissible bound.
  std::optional<int> hmax(const std::vector<std::uint32_t>& state) {
    cost_ = base_cost_;
    compute_hmax(state);
    if (hmax_[goal_fact_] >= kInfinity) return std::nullopt;
    return hmax_[goal_fact_];
  }

 private:
  void compute_hmax(const std::vector<std::uint32_t>& state) {
    std::fill(hmax_.begin(), hmax_.end(), kInfinity);
    for (std::size_t a = 0; a < pre_.size(); ++a) unsat_[a] = static_cast<int>(pre_[a].size());
    using Entry = std::pair<int, std::uint32_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    auto seed = [&](std::uint32_t f) {
      if (hmax_[f] != 0) {
        hmax_[f] = 0;
        queue.push({0, f});
      }
    };
    seed(init_fact_);
    for (auto f : state) seed(f);
    while (!queue.empty()) {
      const auto [c, f] = queue.top();
      queue.pop();
      if (c > hmax_[f]) continue;
      for (auto a : pre_of_[f]) {
        if (--unsat_[a] != 0) continue;
        pcf_[a] = f;
        const int reach = c + cost_[a];
        for (auto e : eff_[a]) {
          if (reach < hmax_[e]) {
            hmax_[e] = reach;
            queue.push({reach, e});
          }
        }
      }
    }
  }

  void mark_goal_zone() {
    std::fill(zone_.begin(), zone_.end(), 0);
    std::vector<std::uint32_t> stack{goal_fact_};
    zone_[goal_fact_] = 1;
    while (!stack.empty()) {
      const auto g = stack.back();
      stack.pop_back();
      for (auto a : achievers_[g]) {
        if (cost_[a] != 0 || unsat_[a] != 0) continue;
        const auto f = pcf_[a];
        if (!zone_[f]) {
          zone_[f] = 1;
          stack.push_back(f);
        }
      }
    }
  }

  std::vector<std::uint32_t> find_cut(const std::vector<std::uint32_t>& state) {
    std::fill(reached_.begin(), reached_.end(), 0);
    std::fill(in_cut_.begin(), in_cut_.end(), 0);
    std::vector<std::uint32_t> queue;
    auto visit = [&](std::uint32_t f) {
      if (!reached_[f] && !zone_[f]) {
        reached_[f] = 1;
        queue.push_back(f);
      }
    };
    visit(init_fact_);
    for (auto f : state) visit(f);
    std::vector<std::uint32_t> cut;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      const auto f = queue[i];
      for (auto a : pre_of_[f]) {
        if (unsat_[a] != 0 || pcf_[a] != f) continue;
        for (auto e : eff_[a]) {
          if (zone_[e]) {
            if (!in_cut_[a]) {
              in_cut_[a] = 1;
              cut.push_back(a);
            }
          } else {
            visit(e);
          }
        }
      }
    }
    return cut;
  }

  std::size_t num_facts_;
  std::uint32_t init_fact_;
  std::uint32_t goal_fact_;
  std::vector<std::vector<std::uint32_t>> pre_;
  std::vector<std::vector<std::uint32_t>> eff_;
  std::vector<int> base_cost_;
  std::vector<int> cost_;
  std::vector<std::vector<std::uint32_t>> pre_of_;
  std::vector<std::vector<std::uint32_t>> achievers_;
  std::vector<int> hmax_;
  std::vector<int> unsat_;
  std::vector<std::uint32_t> pcf_;
  std::vector<char> zone_;
  std::vector<char> reached_;
  std::vector<char> in_cut_;
};

}  // namespace cookplan::planner
