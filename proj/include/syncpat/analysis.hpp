#pragma once

#include "syncpat/semantics.hpp"

namespace syncpat {

enum class PairKind {
  ConflictSymmetric,
  ConflictAsymmetric,
  ParallelDistributable,
  ParallelLocal,
};

const char* pair_kind_id(PairKind k);

struct SharedLabel {
  Label label;
  CapKind kind;
  bool rec_in_first = false;
  bool rec_in_second = false;
};

struct PairRelation {
  PairKind kind;
  int disabler = -1;  // step id of the disabling step for asymmetric conflicts
  std::vector<SharedLabel> shared;
};

/// Classification of two alternative steps of t: symmetric conflict when a
/// shared label is non-recurrent in both, asymmetric conflict when applying
/// one step semantically disables the other in exactly one direction,
/// otherwise parallel (distributable iff every label recurrent in both is a
/// distributable-recurrent operator, i.e. a replication).
PairRelation classify_pair(const Term& t, const Step& s1, const Step& s2);

struct Distribution {
  std::vector<Term> components;
  Term witness;  // the congruent rearrangement the components were read from
};

/// Maximal decomposition into distributable components: no capability
/// occurrence appears in two components, every guarded subterm and non-0
/// constant is covered. Replications are unfolded `unfold` times first.
Distribution decompose(const Term& t, int unfold = 0);

struct Degree {
  bool unbounded = false;
  size_t value = 0;  // component count; meaningful when !unbounded
};

Degree degree_of_distributability(const Term& t);

enum class ExecRelation { Conflict, ParallelLocal, ParallelDistributable };

const char* exec_relation_id(ExecRelation r);

/// Relation between two executions of t: conflict iff some cross pair of
/// steps is in (symmetric) conflict; distributable iff every cross pair is.
ExecRelation classify_executions(const Term& t, const std::vector<Step>& e1,
                                 const std::vector<Step>& e2);

}  // namespace syncpat
