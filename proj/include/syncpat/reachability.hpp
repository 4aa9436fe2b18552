#pragma once

#include "syncpat/semantics.hpp"

namespace syncpat {

enum class Verdict { True, False, BoundExceeded };

const char* verdict_id(Verdict v);

struct Limits {
  size_t states = 100000;
  size_t depth = 10000;
  int unfold_depth = 2;
};

/// Default limits, honouring the SYNCPAT_STATE_LIMIT environment variable.
Limits default_limits();

/// May t reach a successful term? FALSE only when the whole reachable
/// congruence-quotient space was explored without success.
Verdict reach_success(const Term& t, const Limits& lim = default_limits());

/// Does every finite maximal execution of t pass through a successful term?
/// Infinite executions are ignored.
Verdict must_reach_success_finite(const Term& t, const Limits& lim = default_limits());

struct Execution {
  std::vector<Step> steps;
  bool cycles = false;  // truncated lasso: the last state revisits the path
};

/// All finite maximal executions (and truncated lasso markers for cyclic
/// ones) up to the depth/state limits, as replayable step sequences.
std::vector<Execution> maximal_executions(const Term& t, const Limits& lim = default_limits());

/// TRUE iff no infinite reduction sequence exists (exhausted acyclic space).
Verdict is_convergent(const Term& t, const Limits& lim = default_limits());

}  // namespace syncpat
