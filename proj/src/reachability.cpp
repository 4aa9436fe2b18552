#include "syncpat/reachability.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <functional>

#include "syncpat/congruence.hpp"

namespace syncpat {

const char* verdict_id(Verdict v) {
  switch (v) {
    case Verdict::True: return "true";
    case Verdict::False: return "false";
    case Verdict::BoundExceeded: return "bound-exceeded";
  }
  return "?";
}

Limits default_limits() {
  Limits lim;
  if (const char* s = std::getenv("SYNCPAT_STATE_LIMIT")) {
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end && *end == '\0' && v > 0) lim.states = (size_t)v;
  }
  return lim;
}

Verdict reach_success(const Term& t, const Limits& lim) {
  std::set<std::string> visited;
  std::deque<std::pair<Term, size_t>> frontier;  // term, depth
  Term c = canonicalize(t);
  visited.insert(state_key(c));
  frontier.push_back({c, 0});
  bool truncated = false;
  while (!frontier.empty()) {
    auto [cur, depth] = frontier.front();
    frontier.pop_front();
    if (has_success(cur)) return Verdict::True;
    if (depth >= lim.depth) {
      truncated = true;
      continue;
    }
    for (const Step& s : enumerate_steps(cur, lim.unfold_depth).steps) {
      std::string key = state_key(s.residual);
      if (visited.count(key)) continue;
      if (visited.size() >= lim.states) {
        truncated = true;
        continue;
      }
      visited.insert(std::move(key));
      frontier.push_back({s.residual, depth + 1});
    }
  }
  return truncated ? Verdict::BoundExceeded : Verdict::False;
}

Verdict must_reach_success_finite(const Term& t, const Limits& lim) {
  // search for a finite maximal execution that never passes a successful
  // state; successful states satisfy the property for every continuation
  std::set<std::string> visited;
  std::deque<std::pair<Term, size_t>> frontier;
  Term c = canonicalize(t);
  visited.insert(state_key(c));
  frontier.push_back({c, 0});
  bool truncated = false;
  while (!frontier.empty()) {
    auto [cur, depth] = frontier.front();
    frontier.pop_front();
    if (has_success(cur)) continue;
    StepSet ss = enumerate_steps(cur, lim.unfold_depth);
    if (ss.steps.empty()) return Verdict::False;  // unsuccessful dead end
    if (depth >= lim.depth) {
      truncated = true;
      continue;
    }
    for (const Step& s : ss.steps) {
      std::string key = state_key(s.residual);
      if (visited.count(key)) continue;
      if (visited.size() >= lim.states) {
        truncated = true;
        continue;
      }
      visited.insert(std::move(key));
      frontier.push_back({s.residual, depth + 1});
    }
  }
  return truncated ? Verdict::BoundExceeded : Verdict::True;
}

std::vector<Execution> maximal_executions(const Term& t, const Limits& lim) {
  std::vector<Execution> out;
  std::vector<Step> path;
  std::vector<std::string> path_keys;
  size_t expansions = 0;

  std::function<void(const Term&)> dfs = [&](const Term& cur) {
    StepSet ss = enumerate_steps(cur, lim.unfold_depth);
    if (ss.steps.empty()) {
      out.push_back({path, false});
      return;
    }
    if (path.size() >= lim.depth || ++expansions > lim.states) {
      out.push_back({path, true});  // truncated by limits
      return;
    }
    for (const Step& s : ss.steps) {
      std::string key = state_key(s.residual);
      path.push_back(s);
      if (std::find(path_keys.begin(), path_keys.end(), key) != path_keys.end()) {
        out.push_back({path, true});  // lasso back into the current path
      } else {
        path_keys.push_back(key);
        dfs(s.residual);
        path_keys.pop_back();
      }
      path.pop_back();
    }
  };

  Term c = canonicalize(t);
  path_keys.push_back(state_key(c));
  dfs(c);
  return out;
}

Verdict is_convergent(const Term& t, const Limits& lim) {
  // DFS with an on-path set: a back edge is an infinite execution
  std::set<std::string> done;
  std::vector<std::string> on_path;
  bool truncated = false;

  std::function<bool(const Term&, size_t)> dfs = [&](const Term& cur, size_t depth) {
    if (depth >= lim.depth || done.size() >= lim.states) {
      truncated = true;
      return true;
    }
    for (const Step& s : enumerate_steps(cur, lim.unfold_depth).steps) {
      std::string key = state_key(s.residual);
      if (std::find(on_path.begin(), on_path.end(), key) != on_path.end()) return false;
      if (done.count(key)) continue;
      on_path.push_back(key);
      bool ok = dfs(s.residual, depth + 1);
      on_path.pop_back();
      done.insert(key);
      if (!ok) return false;
    }
    return true;
  };

  Term c = canonicalize(t);
  on_path.push_back(state_key(c));
  bool acyclic = dfs(c, 0);
  if (!acyclic) return Verdict::False;
  return truncated ? Verdict::BoundExceeded : Verdict::True;
}

}  // namespace syncpat
