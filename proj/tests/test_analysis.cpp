#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>

#include "doctest.h"
#include "support/gen.hpp"
#include "syncpat/analysis.hpp"
#include "syncpat/congruence.hpp"
#include "syncpat/parser.hpp"

using namespace syncpat;

namespace {

const Step* step_to(const StepSet& ss, const char* expect, Calculus cal) {
  Term e = parse(expect, cal);
  for (const Step& s : ss.steps)
    if (congruent(s.residual, e)) return &s;
  return nullptr;
}

}  // namespace

TEST_CASE("ambient example: two conflicts and one distributable pair") {
  Term t = parse("open n1.0 | n1[0] | n1[in n2.0] | n2[0]", Calculus::MA);
  StepSet ss = enumerate_steps(t);
  const Step* a = step_to(ss, "n1[in n2.0] | n2[0]", Calculus::MA);
  const Step* b = step_to(ss, "n1[0] | in n2.0 | n2[0]", Calculus::MA);
  const Step* c = step_to(ss, "open n1.0 | n1[0] | n2[n1[0]]", Calculus::MA);
  REQUIRE((a && b && c));

  PairRelation ab = classify_pair(t, *a, *b);
  CHECK(ab.kind == PairKind::ConflictSymmetric);
  REQUIRE(ab.shared.size() == 1);
  CHECK(ab.shared[0].kind == CapKind::Open);

  PairRelation bc = classify_pair(t, *b, *c);
  CHECK(bc.kind == PairKind::ConflictSymmetric);
  REQUIRE(bc.shared.size() == 1);
  CHECK(bc.shared[0].kind == CapKind::Ambient);

  PairRelation ac = classify_pair(t, *a, *c);
  CHECK(ac.kind == PairKind::ParallelDistributable);
  CHECK(ac.shared.empty());
}

TEST_CASE("in-chain is an asymmetric conflict") {
  Term t = parse("n1[in n2.0] | n2[in n3.0] | n3[0]", Calculus::MA);
  StepSet ss = enumerate_steps(t);
  const Step* s1 = step_to(ss, "n2[in n3.0 | n1[0]] | n3[0]", Calculus::MA);
  const Step* s2 = step_to(ss, "n1[in n2.0] | n3[n2[0]]", Calculus::MA);
  REQUIRE((s1 && s2));
  PairRelation r = classify_pair(t, *s1, *s2);
  CHECK(r.kind == PairKind::ConflictAsymmetric);
  CHECK(r.disabler == s2->id);
  // the shared ambient n2 has mixed recurrence
  REQUIRE(r.shared.size() == 1);
  CHECK(r.shared[0].rec_in_first);
  CHECK_FALSE(r.shared[0].rec_in_second);
  // direction does not change the kind
  CHECK(classify_pair(t, *s2, *s1).kind == PairKind::ConflictAsymmetric);
  CHECK(classify_pair(t, *s2, *s1).disabler == s2->id);
}

TEST_CASE("disjoint open pairs are parallel") {
  Term t = parse("open n.0 | n[0] | n[ok]", Calculus::MA);
  StepSet ss = enumerate_steps(t);
  REQUIRE(ss.steps.size() == 2);
  CHECK(classify_pair(t, ss.steps[0], ss.steps[1]).kind == PairKind::ConflictSymmetric);

  Term u = parse("open n.0 | n[0] | open n.0 | n[ok]", Calculus::MA);
  StepSet su = enumerate_steps(u);
  REQUIRE(su.steps.size() == 4);
  int parallel = 0, conflict = 0;
  for (size_t i = 0; i < su.steps.size(); ++i)
    for (size_t j = i + 1; j < su.steps.size(); ++j) {
      PairKind k = classify_pair(u, su.steps[i], su.steps[j]).kind;
      if (k == PairKind::ParallelDistributable) ++parallel;
      if (k == PairKind::ConflictSymmetric) ++conflict;
    }
  CHECK(parallel == 2);  // the two label-disjoint pairings
  CHECK(conflict == 4);  // pairs sharing an open or an ambient
}

TEST_CASE("mutually entering ambients disable each other") {
  Term t = parse("x[in y.0] | y[in x.0]", Calculus::MA);
  StepSet ss = enumerate_steps(t);
  REQUIRE(ss.steps.size() == 2);
  PairRelation r = classify_pair(t, ss.steps[0], ss.steps[1]);
  CHECK(r.kind == PairKind::ConflictSymmetric);
  // no shared label is non-recurrent in both; the conflict is semantic
  for (auto& sl : r.shared) CHECK(sl.rec_in_first != sl.rec_in_second);
}

TEST_CASE("output-input pairings in the asynchronous example") {
  Term t = parse("y!<u> | y?(x).0 | y!<v> | y?(x).0", Calculus::PiAsyn);
  StepSet ss = enumerate_steps(t);
  REQUIRE(ss.steps.size() == 4);
  int distributable = 0, symmetric = 0;
  for (size_t i = 0; i < ss.steps.size(); ++i)
    for (size_t j = i + 1; j < ss.steps.size(); ++j) {
      PairRelation r = classify_pair(t, ss.steps[i], ss.steps[j]);
      if (r.kind == PairKind::ParallelDistributable) ++distributable;
      if (r.kind == PairKind::ConflictSymmetric) ++symmetric;
    }
  CHECK(distributable == 2);
  CHECK(symmetric == 4);
}

TEST_CASE("steps sharing only a join definition are parallel but local") {
  Term t = parse("def a<> |> 0 and b<> |> 0 in (a<> | b<>)", Calculus::Join);
  StepSet ss = enumerate_steps(t);
  REQUIRE(ss.steps.size() == 2);
  PairRelation r = classify_pair(t, ss.steps[0], ss.steps[1]);
  CHECK(r.kind == PairKind::ParallelLocal);
  REQUIRE(r.shared.size() == 1);
  CHECK(r.shared[0].kind == CapKind::JoinDefinition);
  CHECK(r.shared[0].rec_in_first);
  CHECK(r.shared[0].rec_in_second);
}

TEST_CASE("steps on different copies of a replication are distributable") {
  Term t = parse("!(tau.0)", Calculus::PiMix);
  StepSet ss = enumerate_steps(t, 2);
  REQUIRE(ss.steps.size() == 2);
  CHECK(classify_pair(t, ss.steps[0], ss.steps[1]).kind == PairKind::ParallelDistributable);
}

TEST_CASE("decomposition of the ambient example") {
  Term t = parse("open n1.0 | n1[0] | n1[in n2.0] | n2[0]", Calculus::MA);
  Distribution d = decompose(t);
  REQUIRE(d.components.size() == 4);

  // Def. 6: non-trivial components, no capability occurs twice, everything
  // covered
  std::set<std::pair<int, std::vector<int>>> seen;
  size_t total = 0;
  for (const Term& c : d.components) {
    auto ls = labels_of(c);
    CHECK((!ls.empty() || has_success(c)));
    for (auto& [l, k] : ls) {
      CHECK(!seen.count({l.base, l.path}));
      seen.insert({l.base, l.path});
    }
    total += ls.size();
  }
  CHECK(total == labels_of(canonicalize(t)).size());
  CHECK(congruent(d.witness, t));
}

TEST_CASE("decomposition of nested join definitions") {
  Term t = parse("def a<> |> 0 in (def b<> |> c<a> in (a<> | b<>))", Calculus::Join);
  Distribution d = decompose(t);
  CHECK(d.components.size() == 4);
  int defs = 0, msgs = 0;
  for (const Term& c : d.components) {
    if (c.root->is<JDef>()) ++defs;
    if (c.root->is<Msg>()) ++msgs;
  }
  CHECK(defs == 2);
  CHECK(msgs == 2);
}

TEST_CASE("degree of distributability") {
  CHECK(decompose(Term{Calculus::MA, nil()}).components.empty());
  CHECK(degree_of_distributability(parse("ok", Calculus::MA)).value == 1);
  CHECK_FALSE(degree_of_distributability(parse("ok", Calculus::MA)).unbounded);

  Degree d = degree_of_distributability(parse("!(n[0])", Calculus::MA));
  CHECK(d.unbounded);

  Degree m = degree_of_distributability(
      parse("open n1.0 | n1[0] | n1[in n2.0] | n2[0]", Calculus::MA));
  CHECK_FALSE(m.unbounded);
  CHECK(m.value == 4);

  // unfolding a replication adds distributable copies
  CHECK(decompose(parse("!(n[0])", Calculus::MA), 0).components.size() == 1);
  CHECK(decompose(parse("!(n[0])", Calculus::MA), 2).components.size() == 3);
}

TEST_CASE("execution pairs of the success-instrumented example") {
  Term t = parse("open n1.0 | n1[n3[0]] | n1[in n2.in n3.ok] | n2[open n1.0]", Calculus::MA);
  StepSet ss = enumerate_steps(t);
  REQUIRE(ss.steps.size() == 3);
  const Step* a =
      step_to(ss, "n3[0] | n1[in n2.in n3.ok] | n2[open n1.0]", Calculus::MA);
  const Step* b =
      step_to(ss, "n1[n3[0]] | in n2.in n3.ok | n2[open n1.0]", Calculus::MA);
  const Step* c = step_to(
      ss, "open n1.0 | n1[n3[0]] | n2[n1[in n3.ok] | open n1.0]", Calculus::MA);
  REQUIRE((a && b && c));

  CHECK(classify_executions(t, {*a}, {*c}) == ExecRelation::ParallelDistributable);
  CHECK(classify_executions(t, {*a}, {*b}) == ExecRelation::Conflict);
  CHECK(classify_executions(t, {}, {}) == ExecRelation::ParallelDistributable);

  // non-replayable sequences are rejected
  Term other = parse("open x.0 | x[0]", Calculus::MA);
  Step foreign = enumerate_steps(other).steps[0];
  CHECK_THROWS(classify_executions(t, {foreign}, {}));
}

TEST_CASE("classification matches semantic disabling on generated terms") {
  int seed = 4242;
  for (Calculus cal : {Calculus::MA, Calculus::SA, Calculus::PiMix, Calculus::PiSep,
                       Calculus::PiAsyn, Calculus::Join}) {
    bool pi_or_join = cal != Calculus::MA && cal != Calculus::SA;
    testgen::Gen g(seed++, cal);
    g.allow_bang = false;
    int pairs = 0;
    for (int i = 0; i < 150 && pairs < 400; ++i) {
      Term t = g.term(2 + g.pick(7));
      StepSet ss = enumerate_steps(t);
      for (size_t x = 0; x < ss.steps.size(); ++x)
        for (size_t y = x + 1; y < ss.steps.size(); ++y) {
          ++pairs;
          const Step& s1 = ss.steps[x];
          const Step& s2 = ss.steps[y];
          PairRelation r = classify_pair(t, s1, s2);
          bool en2 = still_enabled(apply_step(t, s1), s2);
          bool en1 = still_enabled(apply_step(t, s2), s1);
          bool shared_nonrec = false;
          for (auto& sl : r.shared)
            if (!sl.rec_in_first && !sl.rec_in_second) shared_nonrec = true;

          if (pi_or_join) {
            // semantic mutual disabling coincides with symmetric conflict
            CHECK((r.kind == PairKind::ConflictSymmetric) == (!en1 && !en2));
            CHECK(r.kind != PairKind::ConflictAsymmetric);
          } else {
            if (shared_nonrec) {
              CHECK_FALSE(en1);
              CHECK_FALSE(en2);
            }
            if (r.kind == PairKind::ConflictAsymmetric) {
              bool mixed = false;
              for (auto& sl : r.shared)
                if (sl.rec_in_first != sl.rec_in_second) mixed = true;
              CHECK(mixed);
            }
          }
          if (r.kind == PairKind::ParallelDistributable ||
              r.kind == PairKind::ParallelLocal) {
            CHECK(en1);
            CHECK(en2);
          }
        }
    }
  }
}

TEST_CASE("decomposition invariants on generated terms") {
  int seed = 555;
  for (Calculus cal : {Calculus::MA, Calculus::PiMix, Calculus::Join}) {
    testgen::Gen g(seed++, cal);
    for (int i = 0; i < 120; ++i) {
      Term t = g.term(1 + g.pick(7));
      Distribution d = decompose(t);
      std::set<std::pair<int, std::vector<int>>> seen;
      for (const Term& c : d.components) {
        CHECK((!labels_of(c).empty() || has_success(c)));
        for (auto& [l, k] : labels_of(c)) {
          CHECK(!seen.count({l.base, l.path}));
          seen.insert({l.base, l.path});
        }
      }
      CHECK(seen.size() == labels_of(canonicalize(t)).size());
      CHECK(congruent(d.witness, t));
    }
  }
}
