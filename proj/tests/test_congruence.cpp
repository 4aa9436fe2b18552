#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "support/congruence_oracle.hpp"
#include "support/gen.hpp"
#include "syncpat/congruence.hpp"
#include "syncpat/parser.hpp"

using namespace syncpat;

static Term P(const std::string& s, Calculus c) { return parse(s, c); }

TEST_CASE("unit laws") {
  CHECK(congruent(P("in n.0 | 0", Calculus::MA), P("in n.0", Calculus::MA)));
  CHECK(congruent(P("(nu n) 0", Calculus::MA), P("0", Calculus::MA)));
  CHECK(congruent(P("open n.0 | n[0]", Calculus::MA), P("n[0] | open n.0", Calculus::MA)));
  CHECK_FALSE(congruent(P("open n.0", Calculus::MA), P("open m.0", Calculus::MA)));
  CHECK_THROWS_AS((void)congruent(P("0", Calculus::MA), P("0", Calculus::Join)),
                  CalculusMismatch);
}

TEST_CASE("restrictions pull out of ambients") {
  Term t = P("(nu n)(m[n[0]])", Calculus::MA);
  Term u = P("m[(nu n) n[0]]", Calculus::MA);
  CHECK(congruent(t, u));
  CHECK(canonicalize(u).root->is<Nu>());  // outermost-nu form
  // but not through a prefix guard
  CHECK_FALSE(congruent(P("in m.((nu n) n[0])", Calculus::MA),
                        P("(nu n) in m.(n[0])", Calculus::MA)));
}

TEST_CASE("scope extrusion and binder order") {
  CHECK(congruent(P("(nu a)(a!<b> | c!<b>)", Calculus::PiAsyn),
                  P("((nu a) a!<b>) | c!<b>", Calculus::PiAsyn)));
  CHECK_FALSE(congruent(P("(nu a)(a!<b> | a?(x).0)", Calculus::PiAsyn),
                        P("((nu a) a!<b>) | a?(x).0", Calculus::PiAsyn)));
  CHECK(congruent(P("(nu a)(nu b)(a!<b>)", Calculus::PiAsyn),
                  P("(nu b)(nu a)(a!<b>)", Calculus::PiAsyn)));
}

TEST_CASE("replication is not unfolded") {
  Term a = P("!(open n.0) | open n.0", Calculus::MA);
  Term b = P("!(open n.0)", Calculus::MA);
  CHECK_FALSE(congruent(a, b));  // sound incompleteness, never a wrong true
  CHECK(congruent(P("!0 | in n.0", Calculus::MA), P("in n.0", Calculus::MA)));
}

TEST_CASE("join heating") {
  Term t = P("def a<x> |> 0 in (def b<y> |> c<a> in (a<> | b<>))", Calculus::Join);
  Term u = P("def a<x> |> 0 in (def b<y> |> c<a> in (b<> | a<>))", Calculus::Join);
  CHECK(congruent(t, u));
  // molecules may cross a definition whose names they do not use
  Term v = P("def a<> |> 0 in (a<> | b<>)", Calculus::Join);
  Term w = P("b<> | def a<> |> 0 in a<>", Calculus::Join);
  CHECK(congruent(v, w));
  CHECK_FALSE(congruent(v, P("def a<> |> 0 in a<>", Calculus::Join)));
  // rule order within a definition is immaterial
  CHECK(congruent(P("def a<> |> ok and b<> |> 0 in a<>", Calculus::Join),
                  P("def b<> |> 0 and a<> |> ok in a<>", Calculus::Join)));
}

TEST_CASE("canonicalize invariants on generated terms") {
  for (unsigned seed = 0; seed < 120; ++seed) {
    for (Calculus cal : {Calculus::MA, Calculus::SA, Calculus::PiMix, Calculus::PiSep,
                         Calculus::PiAsyn, Calculus::Join}) {
      testgen::Gen g(seed, cal);
      Term t = g.term(1 + (int)(seed % 7));
      Term c = canonicalize(t);
      CHECK(has_success(c) == has_success(t));
      CHECK(free_names(c) == free_names(t));
      // label multiset preserved, except labels of erased inert replications
      auto labels = [](const Term& x, bool reps) {
        std::vector<Label> ls;
        for (auto& [l, k] : labels_of(x))
          if (reps || k != CapKind::Replication) ls.push_back(l);
        std::sort(ls.begin(), ls.end());
        return ls;
      };
      CHECK(labels(c, false) == labels(t, false));
      auto rc = labels(c, true), rt = labels(t, true);
      CHECK(std::includes(rt.begin(), rt.end(), rc.begin(), rc.end()));
      Term cc = canonicalize(c);
      CHECK_MESSAGE(compare_nodes(cc.root, c.root, true) == 0, render(t), "  c=", render(c),
                    "  cc=", render(cc));
      CHECK(congruent(t, c));
      CHECK(state_key(t) == state_key(c));
    }
  }
}

TEST_CASE("congruent agrees with the single-rule closure oracle") {
  long checked = 0, positives = 0;
  for (unsigned seed = 0; seed < 70; ++seed) {
    for (Calculus cal : {Calculus::MA, Calculus::PiMix, Calculus::PiAsyn, Calculus::Join}) {
      testgen::Gen g(seed, cal);
      g.allow_bang = false;  // replication-free fragment
      Term t = g.term(1 + (int)(seed % 5));
      auto cl = congoracle::closure(t, 200);
      // everything the rules reach must be congruent to t
      size_t take = std::min<size_t>(cl.items.size(), 25);
      for (size_t i = 0; i < take; ++i) {
        CHECK_MESSAGE(congruent(t, Term{cal, cl.items[i]}), render(t), "  vs  ",
                      render(Term{cal, cl.items[i]}));
        ++checked;
      }
      // and an unrelated term must agree with the oracle's verdict
      testgen::Gen g2(seed + 1000, cal);
      g2.allow_bang = false;
      Term s = g2.term(1 + (int)((seed + 3) % 5));
      auto verdict = congoracle::oracle_congruent(t, s, 200);
      if (verdict) {
        CHECK_MESSAGE(congruent(t, s) == *verdict, render(t), "  vs  ", render(s));
        ++checked;
        if (*verdict) ++positives;
      }
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("state keys separate congruence classes") {
  Term a = P("open n.0 | n[0]", Calculus::MA);
  Term b = P("n[0] | open n.0", Calculus::MA);
  Term c = P("n[0] | open m.0", Calculus::MA);
  CHECK(state_key(a) == state_key(b));
  CHECK(state_key(a) != state_key(c));
  // labels do not influence the key
  CHECK(state_key(a) == state_key(strip_labels(a)));
}
