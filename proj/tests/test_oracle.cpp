#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <map>
#include <set>

#include "doctest.h"
#include "support/gen.hpp"
#include "syncpat/congruence.hpp"
#include "syncpat/oracle.hpp"
#include "syncpat/parser.hpp"

using namespace syncpat;

namespace {

EnumSpec ma_spec(int ops, int pool = 3) {
  EnumSpec s;
  s.max_operators = ops;
  s.name_pool = pool;
  return s;
}

std::string key(const Term& t) { return state_key(canonicalize(t)); }

// Independent generator for the cross-check: every raw parse tree of the
// replication-free restriction-free ambient grammar with exactly `ops`
// operators (bars included), deduplicated later by canonical form.
std::vector<NodePtr> raw_terms(int ops, const std::vector<Name>& pool) {
  std::vector<NodePtr> out;
  if (ops == 0) {
    out.push_back(nil());
    return out;
  }
  if (ops == 1) out.push_back(ok());
  for (const Name& n : pool) {
    for (const NodePtr& b : raw_terms(ops - 1, pool)) {
      out.push_back(amb(n, b));
      for (CapKind k : {CapKind::In, CapKind::Out, CapKind::Open})
        out.push_back(prefix(k, n, b));
    }
  }
  for (int l = 0; l <= ops - 1; ++l)
    for (const NodePtr& a : raw_terms(l, pool))
      for (const NodePtr& b : raw_terms(ops - 1 - l, pool))
        out.push_back(mk(Node{Par{{a, b}}}));
  return out;
}

void count_brackets(const NodePtr& n, std::map<Name, int>& per_name) {
  if (auto* p = n->get<Par>()) {
    for (auto& c : p->parts) count_brackets(c, per_name);
  } else if (auto* a = n->get<Amb>()) {
    per_name[a->name]++;
    count_brackets(a->body, per_name);
  } else if (auto* pr = n->get<Prefix>()) {
    count_brackets(pr->cont, per_name);
  }
}

bool unique_brackets(const Term& t) {
  std::map<Name, int> per_name;
  count_brackets(t.root, per_name);
  for (auto& [n, c] : per_name)
    if (c > 1) return false;
  return true;
}

}  // namespace

TEST_CASE("tiny universes are the expected sets") {
  std::vector<std::string> got;
  enumerate_terms(ma_spec(0), [&](const Term& t) { got.push_back(key(t)); });
  REQUIRE(got.size() == 1);
  CHECK(got[0] == key(parse("0", Calculus::MA)));

  std::set<std::string> keys;
  enumerate_terms(ma_spec(1, 1), [&](const Term& t) { keys.insert(key(t)); });
  std::set<std::string> want;
  for (const char* s : {"0", "ok", "n1[0]", "in n1.0", "out n1.0", "open n1.0"})
    want.insert(key(parse(s, Calculus::MA)));
  CHECK(keys == want);
}

TEST_CASE("stream equals the raw grammar closure at small sizes") {
  std::vector<Name> pool{Name{"n1"}, Name{"n2"}, Name{"n3"}};
  std::set<std::string> raw;
  for (int s = 0; s <= 3; ++s)
    for (const NodePtr& n : raw_terms(s, pool))
      raw.insert(key(Term{Calculus::MA, n}));

  std::set<std::string> stream;
  long long count = 0;
  enumerate_terms(ma_spec(3), [&](const Term& t) {
    ++count;
    stream.insert(key(t));
  });
  CHECK(count == 2133);
  CHECK((long long)stream.size() == count);  // canonically distinct
  CHECK(stream == raw);                      // complete
}

TEST_CASE("stream is deterministic and distinct at four operators") {
  std::vector<std::string> first, second;
  std::set<std::string> keys;
  enumerate_terms(ma_spec(4), [&](const Term& t) {
    first.push_back(render(t));
    keys.insert(key(t));
  });
  enumerate_terms(ma_spec(4), [&](const Term& t) { second.push_back(render(t)); });
  CHECK(first.size() == 27717);
  CHECK(keys.size() == first.size());
  CHECK(first == second);
}

TEST_CASE("replication widening stays canonically distinct") {
  EnumSpec sp = ma_spec(3);
  sp.allow_replication = true;
  std::set<std::string> keys;
  long long count = 0;
  enumerate_terms(sp, [&](const Term& t) {
    ++count;
    keys.insert(key(t));
  });
  CHECK((long long)keys.size() == count);
  CHECK(keys.count(key(parse("!(ok)", Calculus::MA))) == 1);
  CHECK(keys.count(key(parse("!(n1[0])", Calculus::MA))) == 1);
  CHECK(keys.count(key(parse("!(in n1.0)", Calculus::MA))) == 1);
  CHECK(keys.count(key(parse("!(!(ok))", Calculus::MA))) == 1);
  // !0 collapses to 0 under canonical form, so it is never listed separately
  CHECK(key(parse("!(0)", Calculus::MA)) == key(parse("0", Calculus::MA)));

  EnumSpec bad = ma_spec(2);
  bad.allow_restriction = true;
  CHECK_THROWS_AS(enumerate_terms(bad, [](const Term&) {}), std::invalid_argument);
}

TEST_CASE("lemma 3 sweep below three steps is vacuous") {
  LemmaReport r = check_lemma3(ma_spec(2));
  CHECK(r.terms_checked == 170);
  CHECK(r.witnesses_found == 0);
  CHECK(r.violations.empty());
}

TEST_CASE("lemma 3 sweep equals the unfiltered detector run") {
  LemmaReport fast = check_lemma3(ma_spec(5));
  long long terms = 0, wit = 0, viol = 0;
  enumerate_terms(ma_spec(5), [&](const Term& t) {
    ++terms;
    for (const MWitness& w : find_m(t, true)) {
      ++wit;
      if (w.conflict_ba_symmetric && w.conflict_bc_symmetric && !w.b_uses_open) ++viol;
    }
  });
  CHECK(fast.terms_checked == terms);
  CHECK(fast.witnesses_found == wit);
  CHECK((long long)fast.violations.size() == viol);
}

TEST_CASE("lemma 3 sweep at seven operators") {
  LemmaReport r = check_lemma3(ma_spec(7));
  CHECK(r.terms_checked == 71755048);
  CHECK(r.witnesses_found == 51);
  CHECK(r.violations.empty());

  // partitioned runs merge to the same report
  LemmaReport r2 = check_lemma3(ma_spec(7), 3);
  CHECK(r2.terms_checked == r.terms_checked);
  CHECK(r2.witnesses_found == r.witnesses_found);
  CHECK(r2.violations.size() == r.violations.size());
}

TEST_CASE("the canonical M term counts as witness, not violation") {
  Term t = parse("open n1.0 | n1[0] | n1[in n2.0] | n2[0]", Calculus::MA);
  auto ws = find_m(t, true);
  REQUIRE(!ws.empty());
  for (const MWitness& w : ws)
    CHECK((w.b_uses_open || !w.conflict_ba_symmetric || !w.conflict_bc_symmetric));
}

TEST_CASE("unique-name corollary sweep equals the direct filter") {
  LemmaReport fast = check_corollary_unique_names(ma_spec(5));
  long long terms = 0, wit = 0;
  enumerate_terms(ma_spec(5), [&](const Term& t) {
    if (!unique_brackets(t)) return;
    ++terms;
    wit += (long long)find_m(t, false).size();
  });
  CHECK(fast.terms_checked == terms);
  CHECK(fast.witnesses_found == wit);
  CHECK(wit == 0);
}

TEST_CASE("unique-name corollary at seven operators") {
  LemmaReport r = check_corollary_unique_names(ma_spec(7));
  CHECK(r.terms_checked == 52625704);
  CHECK(r.witnesses_found == 0);
  CHECK(r.violations.empty());

  // the in-chain lives in this universe and has no strict M
  Term chain = parse("n1[in n2.0] | n2[in n3.0] | n3[0]", Calculus::MA);
  CHECK(unique_brackets(chain));
  CHECK(find_m(chain, false).empty());
  // the canonical M term does not: two brackets named n1
  CHECK(!unique_brackets(parse("open n1.0 | n1[0] | n1[in n2.0] | n2[0]", Calculus::MA)));
}

TEST_CASE("ambient conflicts always share a consumed occurrence") {
  // The sweep's cheap filter assumes: a conflict (either kind) implies a
  // shared label not recurrent on both sides, and a parallel pair never
  // shares a label non-recurrent on both sides.
  for (unsigned seed = 0; seed < 150; ++seed) {
    testgen::Gen g(seed, Calculus::MA);
    g.allow_bang = false;
    g.allow_nu = false;
    Term t = g.term(2 + (int)seed % 7);
    StepSet ss = enumerate_steps(t);
    for (size_t i = 0; i < ss.steps.size(); ++i)
      for (size_t j = i + 1; j < ss.steps.size(); ++j) {
        PairRelation rel = classify_pair(t, ss.steps[i], ss.steps[j]);
        bool edge = false, clash = false;
        for (const SharedLabel& s : rel.shared) {
          edge = edge || !(s.rec_in_first && s.rec_in_second);
          clash = clash || (!s.rec_in_first && !s.rec_in_second);
        }
        if (rel.kind == PairKind::ConflictSymmetric || rel.kind == PairKind::ConflictAsymmetric)
          CHECK(edge);
        else
          CHECK(!clash);
      }
  }
}

TEST_CASE("lemma 5 on the five-ambient cycle and the mixed-choice star") {
  Term cyc = parse("a[in b.0] | b[in c.0] | c[in d.0] | d[in e.0] | e[in a.0]", Calculus::MA);
  auto cw = find_great_m(cyc, true);
  REQUIRE(!cw.empty());
  CHECK(check_lemma5(cyc, cw[0]));

  Term star = parse(
      "a!<> + b?().0 | b!<> + c?().0 | c!<> + d?().0 | d!<> + e?().0 | e!<> + a?().0",
      Calculus::PiMix);
  auto sw = find_great_m(star);
  REQUIRE(!sw.empty());
  CHECK(!check_lemma5(star, sw[0]));  // every maximal execution stops after two

  Term dead = parse("0", Calculus::MA);
  CHECK_THROWS(check_lemma5(dead, cw[0]));
}

TEST_CASE("join corpus locality") {
  std::vector<Term> corpus;
  corpus.push_back(parse("def a<> |> ok and b<> |> ok and a<> | b<> |> 0 in (a<> | b<>)",
                         Calculus::Join));
  corpus.push_back(parse("def a<> |> ok in (a<> | a<>)", Calculus::Join));
  LemmaReport r = check_join_locality(corpus);
  CHECK(r.terms_checked == 2);
  CHECK(r.witnesses_found > 0);
  CHECK(r.violations.empty());

  LemmaReport empty = check_join_locality({});
  CHECK(empty.terms_checked == 0);
  CHECK(empty.witnesses_found == 0);

  CHECK_THROWS_AS(check_join_locality({parse("ok", Calculus::MA)}), std::invalid_argument);
}
