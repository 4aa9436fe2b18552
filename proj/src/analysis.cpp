#include "syncpat/analysis.hpp"

#include <algorithm>

#include "syncpat/congruence.hpp"

namespace syncpat {

const char* pair_kind_id(PairKind k) {
  switch (k) {
    case PairKind::ConflictSymmetric: return "conflict-symmetric";
    case PairKind::ConflictAsymmetric: return "conflict-asymmetric";
    case PairKind::ParallelDistributable: return "parallel-distributable";
    case PairKind::ParallelLocal: return "parallel-local";
  }
  return "?";
}

const char* exec_relation_id(ExecRelation r) {
  switch (r) {
    case ExecRelation::Conflict: return "conflict";
    case ExecRelation::ParallelLocal: return "parallel-local";
    case ExecRelation::ParallelDistributable: return "parallel-distributable";
  }
  return "?";
}

namespace {

std::vector<SharedLabel> shared_labels(const Step& s1, const Step& s2) {
  std::vector<SharedLabel> out;
  for (const Consumed& a : s1.consumed)
    for (const Consumed& b : s2.consumed)
      if (a.label == b.label) out.push_back({a.label, a.kind, a.recurrent, b.recurrent});
  return out;
}

// The committed reading of which recurrent operators can be split across
// locations: a replication can (!P = P | !P), an ambient or a join
// definition cannot.
bool distributable_recurrent(CapKind k) { return k == CapKind::Replication; }

bool same_step(const Step& a, const Step& b) {
  return a.consumed == b.consumed && compare_nodes(a.residual.root, b.residual.root, true) == 0;
}

}  // namespace

PairRelation classify_pair(const Term& t, const Step& s1, const Step& s2) {
  if (same_step(s1, s2)) throw std::invalid_argument("classify_pair needs two distinct steps");

  PairRelation rel;
  rel.shared = shared_labels(s1, s2);

  for (const SharedLabel& sl : rel.shared)
    if (!sl.rec_in_first && !sl.rec_in_second) {
      rel.kind = PairKind::ConflictSymmetric;
      return rel;
    }

  Term r1 = apply_step(t, s1);
  Term r2 = apply_step(t, s2);
  bool survives2 = still_enabled(r1, s2);
  bool survives1 = still_enabled(r2, s1);
  if (!survives1 && !survives2) {
    // mutual semantic disabling without a jointly non-recurrent label
    // (two ambients moving each other's target away)
    rel.kind = PairKind::ConflictSymmetric;
    return rel;
  }
  if (survives1 != survives2) {
    rel.kind = PairKind::ConflictAsymmetric;
    rel.disabler = survives2 ? s2.id : s1.id;
    return rel;
  }

  rel.kind = PairKind::ParallelDistributable;
  for (const SharedLabel& sl : rel.shared)
    if (sl.rec_in_first && sl.rec_in_second && !distributable_recurrent(sl.kind))
      rel.kind = PairKind::ParallelLocal;
  return rel;
}

Distribution decompose(const Term& t, int unfold) {
  NodePtr root = t.root;
  for (int round = 0; round < unfold; ++round) {
    // one unfolding !P = P | !P per unguarded replication
    std::function<NodePtr(const NodePtr&)> unf = [&](const NodePtr& n) -> NodePtr {
      if (auto* p = n->get<Par>()) {
        std::vector<NodePtr> parts;
        for (auto& c : p->parts) parts.push_back(unf(c));
        return par(std::move(parts));
      }
      if (auto* r = n->get<Nu>()) return nu(r->name, unf(r->body));
      if (auto* a = n->get<Amb>()) return amb(a->name, unf(a->body), a->label);
      if (auto* b = n->get<Bang>()) {
        std::optional<Label> rep;
        auto ls = labels_of(Term{t.cal, b->body});
        if (!ls.empty()) rep = ls.front().first;
        int idx = 1;
        if (rep) {
          std::vector<std::pair<Label, CapKind>> all;
          collect_labels(root, all);
          for (auto& [l, k] : all) {
            if (l.base != rep->base || l.path.size() != rep->path.size() + 1) continue;
            if (!std::equal(rep->path.begin(), rep->path.end(), l.path.begin())) continue;
            idx = std::max(idx, l.path.back() + 1);
          }
        }
        return par({extend_copy_paths(b->body, idx), n});
      }
      return n;
    };
    root = unf(root);
  }

  Term w = canonicalize(Term{t.cal, root});
  Distribution d;
  d.witness = w;

  if (t.cal == Calculus::Join) {
    // heated solution: every definition block and every molecule on its own
    NodePtr cur = w.root;
    while (auto* def = cur->get<JDef>()) {
      d.components.push_back(Term{t.cal, jdef(def->rules, nil(), def->label)});
      cur = def->main;
    }
    std::function<void(const NodePtr&)> mols = [&](const NodePtr& n) {
      if (n->is<Nil>()) return;
      if (auto* p = n->get<Par>()) {
        for (auto& c : p->parts) mols(c);
        return;
      }
      d.components.push_back(Term{t.cal, n});
    };
    mols(cur);
    return d;
  }

  NodePtr cur = w.root;
  while (auto* r = cur->get<Nu>()) cur = r->body;
  std::function<void(const NodePtr&)> comps = [&](const NodePtr& n) {
    if (n->is<Nil>()) return;
    if (auto* p = n->get<Par>()) {
      for (auto& c : p->parts) comps(c);
      return;
    }
    d.components.push_back(Term{t.cal, n});
  };
  comps(cur);
  return d;
}

Degree degree_of_distributability(const Term& t) {
  Distribution d = decompose(t, 0);
  Degree deg;
  deg.value = d.components.size();
  for (const Term& c : d.components)
    if (c.root->is<Bang>()) deg.unbounded = true;
  return deg;
}

ExecRelation classify_executions(const Term& t, const std::vector<Step>& e1,
                                 const std::vector<Step>& e2) {
  for (const std::vector<Step>* e : {&e1, &e2}) {
    Term cur = t;
    for (const Step& s : *e) cur = apply_step(cur, s);  // throws if not replayable
  }
  bool all_distributable = true;
  for (const Step& a : e1)
    for (const Step& b : e2) {
      bool conflict = false;
      for (const SharedLabel& sl : shared_labels(a, b)) {
        if (!sl.rec_in_first && !sl.rec_in_second) conflict = true;
        if (sl.rec_in_first && sl.rec_in_second && !distributable_recurrent(sl.kind))
          all_distributable = false;
      }
      if (conflict) return ExecRelation::Conflict;
    }
  return all_distributable ? ExecRelation::ParallelDistributable : ExecRelation::ParallelLocal;
}

}  // namespace syncpat
