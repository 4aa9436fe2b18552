// End-to-end acceptance checks. Each criterion prints exactly one line.
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "support/gen.hpp"
#include "syncpat/congruence.hpp"
#include "syncpat/oracle.hpp"
#include "syncpat/parser.hpp"
#include "syncpat/reachability.hpp"

using namespace syncpat;

namespace {

std::string corpus_dir() {
  const char* d = std::getenv("SYNCPAT_CORPUS_DIR");
  return d ? d : "corpus";
}

Term load(const std::string& name) {
  std::ifstream in(corpus_dir() + "/" + name);
  if (!in) throw std::runtime_error("cannot open corpus file " + name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_file(buf.str());
}

int g_failures = 0;

void report(int n, const std::string& what, bool ok, double secs, double budget) {
  bool pass = ok && secs <= budget;
  if (!pass) ++g_failures;
  std::printf("criterion %2d: %s  %s (%.2fs)\n", n, pass ? "pass" : "FAIL", what.c_str(), secs);
  std::fflush(stdout);
}

template <class F>
void criterion(int n, const std::string& what, double budget, F body) {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    ok = body();
  } catch (const std::exception& e) {
    std::printf("criterion %2d: exception: %s\n", n, e.what());
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(n, what, ok, secs, budget);
}

bool disjoint_consumed(const Step& x, const Step& y) {
  for (const Consumed& c : x.consumed)
    for (const Consumed& d : y.consumed)
      if (c.label == d.label) return false;
  return true;
}

}  // namespace

int main() {
  criterion(1, "three-step ambient term: pair matrix and one non-local open-based witness", 1.0, [] {
    Term t = load("ma-m.term");
    StepSet ss = enumerate_steps(t);
    if (ss.steps.size() != 3) return false;
    int sym = 0, dist = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        PairKind k = classify_pair(t, ss.steps[i], ss.steps[j]).kind;
        if (k == PairKind::ConflictSymmetric) ++sym;
        if (k == PairKind::ParallelDistributable) ++dist;
      }
    if (sym != 2 || dist != 1) return false;
    auto ws = find_m(t);
    if (ws.size() != 1) return false;
    const MWitness& w = ws[0];
    return w.non_local && w.b_uses_open && w.conflict_ba_symmetric && w.conflict_bc_symmetric &&
           classify_pair(t, w.a, w.c).kind == PairKind::ParallelDistributable;
  });

  criterion(2, "success table for the instantiated term and its derivatives", 1.0, [] {
    return reach_success(load("ma-m-success.term")) == Verdict::True &&
           must_reach_success_finite(load("ma-m-success.term")) == Verdict::False &&
           must_reach_success_finite(load("ma-s-a.term")) == Verdict::True &&
           reach_success(load("ma-s-b.term")) == Verdict::False &&
           must_reach_success_finite(load("ma-s-c.term")) == Verdict::True;
  });

  criterion(3, "mixed-choice five-cycle: non-local sync-star in all 32 variants, 2-step executions", 5.0, [] {
    for (int i = 0; i < 32; ++i) {
      char name[40];
      std::snprintf(name, sizeof name, "pi-mix-star-%d%d%d%d%d.term", (i >> 4) & 1, (i >> 3) & 1,
                    (i >> 2) & 1, (i >> 1) & 1, i & 1);
      Term t = load(name);
      StepSet ss = enumerate_steps(t);
      if (ss.steps.size() != 5) return false;
      auto ws = find_great_m(t, false, true);
      if (ws.size() != 1 || !ws[0].non_local) return false;
      // the witness cycle covers exactly the five communications of the term
      for (const Step& s : ss.steps) {
        bool found = false;
        for (const Step& c : ws[0].cycle) found |= same_consumed(s, c);
        if (!found) return false;
      }
    }
    Term t0 = load("pi-mix-star-00000.term");
    auto execs = maximal_executions(t0);
    if (execs.empty()) return false;
    for (const Execution& e : execs)
      if (e.cycles || e.steps.size() != 2) return false;
    return true;
  });

  criterion(4, "ambient in-cycle: no strict sync-star, one asymmetric one that replays", 1.0, [] {
    Term t = load("ma-in-cycle.term");
    if (!find_great_m(t, false).empty()) return false;
    auto ws = find_great_m(t, true);
    return ws.size() == 1 && check_lemma5(t, ws[0]);
  });

  criterion(5, "exhaustive sweep (<=8 ops, 3 names): witnesses exist, zero violations, frozen counts", 600.0, [] {
    EnumSpec spec;
    spec.max_operators = 8;
    spec.name_pool = 3;
    LemmaReport rep = check_lemma3(spec, 2);
    return rep.violations.empty() && rep.witnesses_found == 2280 &&
           rep.terms_checked == 1023779576LL;
  });

  criterion(6, "unique-ambient-name sweep (<=8 ops): zero strict witnesses, frozen count", 600.0, [] {
    EnumSpec spec;
    spec.max_operators = 8;
    spec.name_pool = 3;
    LemmaReport rep = check_corollary_unique_names(spec, 2);
    return rep.violations.empty() && rep.witnesses_found == 0 &&
           rep.terms_checked == 688507319LL;
  });

  criterion(7, "asynchronous two-sender two-receiver term: non-local witness with crossed steps", 1.0, [] {
    Term t = load("pi-asyn-m.term");
    auto ws = find_m(t);
    if (ws.size() != 4) return false;
    for (const MWitness& w : ws) {
      if (!w.non_local) continue;
      if (disjoint_consumed(w.a, w.c) && !disjoint_consumed(w.b, w.a) &&
          !disjoint_consumed(w.b, w.c))
        return true;
    }
    return false;
  });

  criterion(8, "safe-ambient counterexample: non-local witness with open/open/in axioms", 1.0, [] {
    Term t = load("sa-m.term");
    for (const MWitness& w : find_m(t)) {
      if (!w.non_local) continue;
      if (w.a.axiom == Axiom::SaOpen && w.b.axiom == Axiom::SaOpen && w.c.axiom == Axiom::SaIn)
        return true;
    }
    return false;
  });

  criterion(9, "step enumeration agrees with the naive rule-applier on 1000 terms per calculus", 120.0, [] {
    auto key_less = [](const std::pair<std::vector<Consumed>, Term>& x,
                       const std::pair<std::vector<Consumed>, Term>& y) {
      if (x.first != y.first) return x.first < y.first;
      return compare_nodes(x.second.root, y.second.root, true) < 0;
    };
    int seed = 42;
    for (Calculus cal : {Calculus::MA, Calculus::SA, Calculus::PiMix, Calculus::PiSep,
                         Calculus::PiAsyn, Calculus::Join}) {
      testgen::Gen g(seed++, cal);
      g.allow_bang = false;
      for (int i = 0; i < 1000; ++i) {
        Term t = g.term(1 + g.pick(8));
        auto slow = slow_steps(t);
        StepSet fast = enumerate_steps(t);
        std::vector<std::pair<std::vector<Consumed>, Term>> fs;
        for (auto& s : fast.steps) fs.push_back({s.consumed, canonicalize(s.residual)});
        if (slow.size() != fs.size()) return false;
        std::sort(slow.begin(), slow.end(), key_less);
        std::sort(fs.begin(), fs.end(), key_less);
        for (size_t k = 0; k < fs.size(); ++k) {
          if (fs[k].first != slow[k].first) return false;
          if (compare_nodes(fs[k].second.root, slow[k].second.root, true) != 0) return false;
        }
      }
    }
    return true;
  });

  criterion(10, "symmetric conflict is mutual disabling; asymmetric conflicts mix recurrence", 120.0, [] {
    int seed = 4242;
    for (Calculus cal : {Calculus::PiMix, Calculus::PiSep, Calculus::PiAsyn, Calculus::Join}) {
      testgen::Gen g(seed++, cal);
      g.allow_bang = false;  // copy labels are not stable across unfoldings
      for (int i = 0; i < 300; ++i) {
        Term t = g.term(1 + g.pick(8));
        StepSet ss = enumerate_steps(t);
        if (ss.steps.size() > 12) continue;
        for (size_t a = 0; a < ss.steps.size(); ++a)
          for (size_t b = a + 1; b < ss.steps.size(); ++b) {
            PairKind k = classify_pair(t, ss.steps[a], ss.steps[b]).kind;
            bool mutual = !still_enabled(apply_step(t, ss.steps[a]), ss.steps[b]) &&
                          !still_enabled(apply_step(t, ss.steps[b]), ss.steps[a]);
            if ((k == PairKind::ConflictSymmetric) != mutual) return false;
          }
      }
    }
    for (Calculus cal : {Calculus::MA, Calculus::SA}) {
      testgen::Gen g(seed++, cal);
      g.allow_bang = false;
      for (int i = 0; i < 300; ++i) {
        Term t = g.term(1 + g.pick(8));
        StepSet ss = enumerate_steps(t);
        if (ss.steps.size() > 12) continue;
        for (size_t a = 0; a < ss.steps.size(); ++a)
          for (size_t b = a + 1; b < ss.steps.size(); ++b) {
            PairRelation rel = classify_pair(t, ss.steps[a], ss.steps[b]);
            if (rel.kind != PairKind::ConflictAsymmetric) continue;
            bool mixed = false;
            for (const SharedLabel& sl : rel.shared)
              mixed |= sl.rec_in_first != sl.rec_in_second;
            if (!mixed) return false;
          }
      }
    }
    return true;
  });

  std::printf("%s\n", g_failures == 0 ? "all criteria pass" : "FAILURES PRESENT");
  return g_failures == 0 ? 0 : 1;
}
