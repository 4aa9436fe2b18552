#pragma once

#include "syncpat/term.hpp"

namespace syncpat {

enum class Axiom { MaIn, MaOut, MaOpen, SaIn, SaOut, SaOpen, PiTau, PiComm, JoinReact };

const char* axiom_id(Axiom a);

/// One consumed capability occurrence. `recurrent` says whether the step
/// leaves the operator in place (ambient entered but not moved, replication,
/// join definition) or removes it.
struct Consumed {
  Label label;
  CapKind kind;
  bool recurrent = false;

  friend bool operator==(const Consumed&, const Consumed&) = default;
  friend auto operator<=>(const Consumed& a, const Consumed& b) {
    if (auto c = a.label <=> b.label; c != 0) return c;
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    return (a.recurrent ? 1 : 0) <=> (b.recurrent ? 1 : 0);
  }
};

struct Step {
  int id = -1;
  Axiom axiom;
  std::vector<Consumed> consumed;  // kept sorted
  Term residual;                   // canonicalized
};

struct StepSet {
  Term source;
  std::vector<Step> steps;
};

/// All reduction steps of t modulo structural congruence, using at most
/// `unfold_depth` copies per replication operator per redex. Steps are
/// deduplicated by (consumed multiset, residual up to congruence) and get
/// stable ids 0..n-1 in a deterministic order.
StepSet enumerate_steps(const Term& t, int unfold_depth = 2);

/// Residual of s. Errors if s is not a step of t.
Term apply_step(const Term& t, const Step& s);

/// True iff t still offers a step consuming exactly s.consumed (labels
/// persist across reductions, so this asks whether s survived).
bool still_enabled(const Term& t, const Step& s, int unfold_depth = 2);

bool same_consumed(const Step& a, const Step& b);

}  // namespace syncpat
