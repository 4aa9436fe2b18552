#pragma once

#include <functional>

#include "syncpat/patterns.hpp"

namespace syncpat {

struct EnumSpec {
  int max_operators = 3;
  int name_pool = 3;
  bool allow_restriction = false;
  bool allow_replication = false;
  Calculus cal = Calculus::MA;
};

/// Every canonical-form-distinct term within the bounds, exactly once, in a
/// deterministic order. Size is the operator count (0 does not count).
void enumerate_terms(const EnumSpec& spec, const std::function<void(const Term&)>& sink);

struct Violation {
  std::string term;
  std::string detail;
};

struct LemmaReport {
  long long terms_checked = 0;
  long long witnesses_found = 0;
  std::vector<Violation> violations;
  double seconds = 0;
  std::string note;
};

/// In every M witness (asymmetric conflicts allowed), either one of b's two
/// conflicts is asymmetric or b reduces an open-action. Exhaustive over the
/// ambient-term universe of `spec`; expected violation count is zero.
LemmaReport check_lemma3(const EnumSpec& spec, int jobs = 1);

/// Ambient terms whose ambient brackets carry pairwise distinct names admit
/// no M witness built from two symmetric conflicts.
LemmaReport check_corollary_unique_names(const EnumSpec& spec, int jobs = 1);

/// Some execution of t performs three of the witness's five steps.
bool check_lemma5(const Term& t, const GreatMWitness& w);

/// Every M witness over the given join terms is local.
LemmaReport check_join_locality(const std::vector<Term>& corpus);

/// Independent slow semantics: exhaustive single-rule application under a
/// bounded congruence closure. Replication-free terms only. Used to
/// cross-check enumerate_steps.
std::vector<std::pair<std::vector<Consumed>, Term>> slow_steps(const Term& t);

}  // namespace syncpat
