#include "syncpat/semantics.hpp"

#include <algorithm>
#include <functional>

#include "syncpat/congruence.hpp"

namespace syncpat {

const char* axiom_id(Axiom a) {
  switch (a) {
    case Axiom::MaIn: return "ma-in";
    case Axiom::MaOut: return "ma-out";
    case Axiom::MaOpen: return "ma-open";
    case Axiom::SaIn: return "sa-in";
    case Axiom::SaOut: return "sa-out";
    case Axiom::SaOpen: return "sa-open";
    case Axiom::PiTau: return "pi-tau";
    case Axiom::PiComm: return "pi-comm";
    case Axiom::JoinReact: return "join-react";
  }
  return "?";
}

namespace {

// Next free copy index for a replication/definition whose body carries the
// given representative label: one past every extension already present.
int next_copy_index(const std::vector<std::pair<Label, CapKind>>& all,
                    const std::optional<Label>& rep) {
  if (!rep) return 1;
  int mx = 0;
  for (auto& [l, k] : all) {
    if (l.base != rep->base || l.path.size() != rep->path.size() + 1) continue;
    if (!std::equal(rep->path.begin(), rep->path.end(), l.path.begin())) continue;
    mx = std::max(mx, l.path.back());
  }
  return mx + 1;
}

struct Group {
  int parent = -1;      // enclosing copy group
  Label bang;           // the replication that produced this copy
};

struct Comp {
  NodePtr node;
  int group = -1;  // -1: part of the real term
};

struct Region {
  std::vector<Name> binders;
  std::vector<Comp> comps;
  std::vector<Group> groups;
};

struct Enumerator {
  Calculus cal;
  int unfold;
  std::vector<std::pair<Label, CapKind>> all_labels;
  std::set<Name> used_names;
  std::vector<Step> steps;

  bool is_ma() const { return cal == Calculus::MA || cal == Calculus::SA; }

  Region build_region(const NodePtr& n) {
    Region r;
    flatten(n, -1, r);
    return r;
  }

  void flatten(const NodePtr& n, int group, Region& r) {
    if (n->is<Nil>()) return;
    if (auto p = n->get<Par>()) {
      for (auto& c : p->parts) flatten(c, group, r);
      return;
    }
    if (auto u = n->get<Nu>()) {
      Name b = fresh_name(u->name, used_names);
      used_names.insert(b);
      NodePtr body = b == u->name ? u->body : substitute(u->body, {{u->name, b}});
      r.binders.push_back(b);
      flatten(body, group, r);
      return;
    }
    if (auto bg = n->get<Bang>()) {
      r.comps.push_back(Comp{n, group});
      std::optional<Label> rep;
      auto ls = labels_of(Term{cal, bg->body});
      if (!ls.empty()) rep = ls.front().first;
      int base = next_copy_index(all_labels, rep);
      for (int k = 0; k < unfold; ++k) {
        int g = (int)r.groups.size();
        r.groups.push_back(Group{group, bg->label});
        flatten(extend_copy_paths(bg->body, base + k), g, r);
      }
      return;
    }
    r.comps.push_back(Comp{n, group});
  }

  // Residual comps for a rewrite: `replace` maps comp index to replacement
  // (nullptr removes); untouched virtual copies are folded back into !P by
  // omission. `used_out` collects the replication labels of the copies the
  // rewrite touched.
  std::vector<NodePtr> build_comps(const Region& r,
                                   const std::map<int, NodePtr>& replace,
                                   const std::set<int>& extra_used,
                                   std::vector<Label>* used_bangs = nullptr) const {
    std::vector<char> used(r.groups.size(), 0);
    auto mark = [&](int g) {
      while (g >= 0 && !used[g]) {
        used[g] = 1;
        g = r.groups[g].parent;
      }
    };
    for (auto& [i, rep] : replace)
      if (r.comps[i].group >= 0) mark(r.comps[i].group);
    for (int g : extra_used) mark(g);
    std::vector<NodePtr> out;
    for (size_t i = 0; i < r.comps.size(); ++i) {
      auto it = replace.find((int)i);
      if (it != replace.end()) {
        if (it->second) out.push_back(it->second);
        continue;
      }
      int g = r.comps[i].group;
      if (g < 0 || used[g]) out.push_back(r.comps[i].node);
    }
    if (used_bangs)
      for (size_t g = 0; g < r.groups.size(); ++g)
        if (used[g]) used_bangs->push_back(r.groups[g].bang);
    return out;
  }

  NodePtr wrap(const Region& r, std::vector<NodePtr> comps) const {
    NodePtr cur = par(std::move(comps));
    for (auto it = r.binders.rbegin(); it != r.binders.rend(); ++it) cur = nu(*it, cur);
    return cur;
  }

  void emit(Axiom ax, std::vector<Consumed> consumed, NodePtr root) {
    std::sort(consumed.begin(), consumed.end());
    Step s;
    s.axiom = ax;
    s.consumed = std::move(consumed);
    s.residual = canonicalize(Term{cal, std::move(root)});
    steps.push_back(std::move(s));
  }

  using Rebuild = std::function<NodePtr(const Region&, const std::map<int, NodePtr>&,
                                        const std::set<int>&, std::vector<Label>*)>;

  // ------------------------------------------------------------------ MA/SA

  void ma_region(const NodePtr& node, const Rebuild& rebuild) {
    Region r = build_region(node);
    auto local = [&](const std::map<int, NodePtr>& rep, const std::set<int>& eu,
                     std::vector<Label>* ub) { return rebuild(r, rep, eu, ub); };

    for (size_t i = 0; i < r.comps.size(); ++i) {
      const Prefix* pf = r.comps[i].node->get<Prefix>();
      if (pf && pf->cap == CapKind::Open) {
        for (size_t j = 0; j < r.comps.size(); ++j) {
          if (i == j) continue;
          const Amb* am = r.comps[j].node->get<Amb>();
          if (!am || !(am->name == pf->name)) continue;
          if (cal == Calculus::MA) {
            emit(Axiom::MaOpen,
                 {{pf->label, CapKind::Open, false}, {am->label, CapKind::Ambient, false}},
                 local({{(int)i, pf->cont}, {(int)j, am->body}}, {}, nullptr));
          } else {
            Region rb = build_region(am->body);
            for (size_t q = 0; q < rb.comps.size(); ++q) {
              const Prefix* co = rb.comps[q].node->get<Prefix>();
              if (!co || co->cap != CapKind::CoOpen || !(co->name == am->name)) continue;
              NodePtr content = wrap(rb, build_comps(rb, {{(int)q, co->cont}}, {}));
              emit(Axiom::SaOpen,
                   {{pf->label, CapKind::Open, false},
                    {co->label, CapKind::CoOpen, false},
                    {am->label, CapKind::Ambient, false}},
                   local({{(int)i, pf->cont}, {(int)j, content}}, {}, nullptr));
            }
          }
        }
      }
    }

    for (size_t i = 0; i < r.comps.size(); ++i) {
      const Amb* mover = r.comps[i].node->get<Amb>();
      if (!mover) continue;
      Region ri = build_region(mover->body);
      for (size_t p = 0; p < ri.comps.size(); ++p) {
        const Prefix* pf = ri.comps[p].node->get<Prefix>();
        if (!pf || pf->cap != CapKind::In) continue;
        for (size_t j = 0; j < r.comps.size(); ++j) {
          if (i == j) continue;
          const Amb* target = r.comps[j].node->get<Amb>();
          if (!target || !(target->name == pf->name)) continue;
          NodePtr moved =
              amb(mover->name, wrap(ri, build_comps(ri, {{(int)p, pf->cont}}, {})), mover->label);
          std::vector<Consumed> cons{{pf->label, CapKind::In, false},
                                     {mover->label, CapKind::Ambient, false},
                                     {target->label, CapKind::Ambient, true}};
          if (cal == Calculus::MA) {
            NodePtr tgt = amb(target->name, par({target->body, moved}), target->label);
            emit(Axiom::MaIn, cons, local({{(int)i, nullptr}, {(int)j, tgt}}, {}, nullptr));
          } else {
            Region rj = build_region(target->body);
            for (size_t q = 0; q < rj.comps.size(); ++q) {
              const Prefix* co = rj.comps[q].node->get<Prefix>();
              if (!co || co->cap != CapKind::CoIn || !(co->name == target->name)) continue;
              NodePtr body = wrap(rj, build_comps(rj, {{(int)q, co->cont}}, {}));
              NodePtr tgt = amb(target->name, par({body, moved}), target->label);
              auto cs = cons;
              cs.push_back({co->label, CapKind::CoIn, false});
              emit(Axiom::SaIn, cs, local({{(int)i, nullptr}, {(int)j, tgt}}, {}, nullptr));
            }
          }
        }
      }
    }

    for (size_t j = 0; j < r.comps.size(); ++j) {
      const Amb* parent = r.comps[j].node->get<Amb>();
      if (!parent) continue;
      Region rj = build_region(parent->body);
      for (size_t i = 0; i < rj.comps.size(); ++i) {
        const Amb* mover = rj.comps[i].node->get<Amb>();
        if (!mover) continue;
        Region ri = build_region(mover->body);
        for (size_t p = 0; p < ri.comps.size(); ++p) {
          const Prefix* pf = ri.comps[p].node->get<Prefix>();
          if (!pf || pf->cap != CapKind::Out || !(pf->name == parent->name)) continue;
          NodePtr moved =
              amb(mover->name, wrap(ri, build_comps(ri, {{(int)p, pf->cont}}, {})), mover->label);
          std::vector<Consumed> cons{{pf->label, CapKind::Out, false},
                                     {mover->label, CapKind::Ambient, false},
                                     {parent->label, CapKind::Ambient, true}};
          auto finish = [&](const std::map<int, NodePtr>& inner, std::vector<Consumed> cs,
                            Axiom ax) {
            NodePtr newParent =
                amb(parent->name, wrap(rj, build_comps(rj, inner, {})), parent->label);
            emit(ax, std::move(cs),
                 local({{(int)j, mk(Node{Par{{newParent, moved}}})}}, {}, nullptr));
          };
          if (cal == Calculus::MA) {
            finish({{(int)i, nullptr}}, cons, Axiom::MaOut);
          } else {
            for (size_t q = 0; q < rj.comps.size(); ++q) {
              if (q == i) continue;
              const Prefix* co = rj.comps[q].node->get<Prefix>();
              if (!co || co->cap != CapKind::CoOut || !(co->name == parent->name)) continue;
              auto cs = cons;
              cs.push_back({co->label, CapKind::CoOut, false});
              finish({{(int)i, nullptr}, {(int)q, co->cont}}, cs, Axiom::SaOut);
            }
          }
        }
      }
    }

    // recurse into ambient bodies
    for (size_t i = 0; i < r.comps.size(); ++i) {
      const Amb* am = r.comps[i].node->get<Amb>();
      if (!am) continue;
      int g = r.comps[i].group;
      Rebuild sub = [&, i, g, am](const Region& inner, const std::map<int, NodePtr>& rep,
                                  const std::set<int>& eu, std::vector<Label>* ub) {
        NodePtr body = wrap(inner, build_comps(inner, rep, eu, ub));
        std::set<int> outer_eu;
        if (g >= 0) outer_eu.insert(g);
        return rebuild(r, {{(int)i, amb(am->name, body, am->label)}}, outer_eu, ub);
      };
      ma_region(am->body, sub);
    }
  }

  // --------------------------------------------------------------------- pi

  void pi_term(const NodePtr& node) {
    Region r = build_region(node);
    auto finish = [&](Axiom ax, std::vector<Consumed> cons, const std::map<int, NodePtr>& rep) {
      std::vector<Label> bangs;
      NodePtr root = wrap(r, build_comps(r, rep, {}, &bangs));
      if (ax == Axiom::PiComm) {
        std::sort(bangs.begin(), bangs.end());
        bangs.erase(std::unique(bangs.begin(), bangs.end()), bangs.end());
        for (auto& b : bangs) cons.push_back({b, CapKind::Replication, true});
      }
      emit(ax, std::move(cons), root);
    };
    auto sum_kind = [](const Sum* s) {
      if (s->branches.size() > 1) return CapKind::Sum;
      switch (s->branches[0].kind) {
        case GuardKind::Output: return CapKind::OutputAtom;
        case GuardKind::Input: return CapKind::InputPrefix;
        default: return CapKind::Tau;
      }
    };
    struct Out {
      size_t comp;
      Label label;
      CapKind kind;
      Name chan;
      std::optional<Name> obj;
      NodePtr cont;
    };
    std::vector<Out> outs;
    for (size_t i = 0; i < r.comps.size(); ++i) {
      if (auto m = r.comps[i].node->get<Msg>()) {
        outs.push_back(Out{i, m->label, CapKind::OutputAtom, m->chan, m->obj, nil()});
        continue;
      }
      const Sum* s = r.comps[i].node->get<Sum>();
      if (!s) continue;
      CapKind k = sum_kind(s);
      for (const Branch& br : s->branches) {
        if (br.kind == GuardKind::Tau)
          finish(Axiom::PiTau, {{s->label, k, false}}, {{(int)i, br.cont}});
        else if (br.kind == GuardKind::Output)
          outs.push_back(Out{i, s->label, k, br.chan, br.obj, br.cont});
      }
    }
    for (const Out& o : outs) {
      for (size_t j = 0; j < r.comps.size(); ++j) {
        if (j == o.comp) continue;
        const Sum* s = r.comps[j].node->get<Sum>();
        if (!s) continue;
        CapKind k = sum_kind(s);
        for (const Branch& br : s->branches) {
          if (br.kind != GuardKind::Input || !(br.chan == o.chan)) continue;
          if (br.obj.has_value() != o.obj.has_value()) continue;  // arity
          NodePtr cont = br.cont;
          if (br.obj && !(*br.obj == *o.obj)) cont = substitute(cont, {{*br.obj, *o.obj}});
          finish(Axiom::PiComm,
                 {{o.label, o.kind, false}, {s->label, k, false}},
                 {{(int)o.comp, o.cont}, {(int)j, cont}});
        }
      }
    }
  }

  // ------------------------------------------------------------------- join

  void join_term(const NodePtr& node) {
    // canonical join terms nest definitions around one molecule region
    std::vector<const JDef*> blocks;
    NodePtr cur = node;
    while (auto d = cur->get<JDef>()) {
      blocks.push_back(d);
      cur = d->main;
    }
    Region r = build_region(cur);
    auto rebuild_mols = [&](std::vector<NodePtr> mols) {
      NodePtr m = wrap(r, std::move(mols));
      for (auto it = blocks.rbegin(); it != blocks.rend(); ++it)
        m = jdef((*it)->rules, m, (*it)->label);
      return m;
    };
    for (const JDef* d : blocks) {
      std::optional<Label> rep;
      for (const JRule& rr : d->rules) {
        auto ls = labels_of(Term{cal, rr.body});
        if (!ls.empty()) {
          rep = ls.front().first;
          break;
        }
        if (!rr.patterns.empty()) {  // fall back to a pattern label
          rep = rr.patterns.front().label;
          break;
        }
      }
      int idx = next_copy_index(all_labels, rep);
      for (const JRule& rule : d->rules) {
        // all ways to match the patterns against distinct molecules
        std::vector<size_t> chosen;
        std::function<void(size_t)> match = [&](size_t pi) {
          if (pi == rule.patterns.size()) {
            std::map<Name, Name> subst;
            std::vector<Consumed> cons{{d->label, CapKind::JoinDefinition, true}};
            std::map<int, NodePtr> rep_map;
            bool ok = true;
            for (size_t q = 0; q < rule.patterns.size(); ++q) {
              const Msg* m = r.comps[chosen[q]].node->get<Msg>();
              const JPattern& pt = rule.patterns[q];
              if (pt.var && m->obj) {
                auto [it, fresh] = subst.emplace(*pt.var, *m->obj);
                if (!fresh && !(it->second == *m->obj)) ok = false;
              }
              cons.push_back({m->label, CapKind::JoinMessage, false});
              rep_map[(int)chosen[q]] = nullptr;
            }
            if (!ok) return;
            NodePtr body = extend_copy_paths(rule.body, idx);
            body = substitute(body, subst);
            std::vector<NodePtr> mols = build_comps(r, rep_map, {});
            mols.push_back(body);
            emit(Axiom::JoinReact, std::move(cons), rebuild_mols(std::move(mols)));
            return;
          }
          const JPattern& pt = rule.patterns[pi];
          for (size_t i = 0; i < r.comps.size(); ++i) {
            if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
            const Msg* m = r.comps[i].node->get<Msg>();
            if (!m || !(m->chan == pt.chan)) continue;
            if (m->obj.has_value() != pt.var.has_value()) continue;
            chosen.push_back(i);
            match(pi + 1);
            chosen.pop_back();
          }
        };
        match(0);
      }
    }
  }
};

}  // namespace

StepSet enumerate_steps(const Term& t, int unfold_depth) {
  Term c = canonicalize(t);
  Enumerator e;
  e.cal = t.cal;
  e.unfold = unfold_depth;
  e.all_labels = labels_of(c);
  e.used_names = all_names(c.root);

  if (e.is_ma()) {
    Enumerator::Rebuild top = [&](const Region& r, const std::map<int, NodePtr>& rep,
                                  const std::set<int>& eu, std::vector<Label>* ub) {
      return e.wrap(r, e.build_comps(r, rep, eu, ub));
    };
    e.ma_region(c.root, top);
  } else if (t.cal == Calculus::Join) {
    e.join_term(c.root);
  } else {
    e.pi_term(c.root);
  }

  // dedup by (consumed multiset, residual with labels), deterministic order
  std::vector<Step> uniq;
  for (auto& s : e.steps) {
    bool dup = false;
    for (auto& u : uniq)
      if (u.consumed == s.consumed &&
          compare_nodes(u.residual.root, s.residual.root, true) == 0) {
        dup = true;
        break;
      }
    if (!dup) uniq.push_back(std::move(s));
  }
  std::sort(uniq.begin(), uniq.end(), [](const Step& a, const Step& b) {
    if (a.consumed != b.consumed) return a.consumed < b.consumed;
    if (a.axiom != b.axiom) return (int)a.axiom < (int)b.axiom;
    return compare_nodes(a.residual.root, b.residual.root, true) < 0;
  });
  for (size_t i = 0; i < uniq.size(); ++i) uniq[i].id = (int)i;
  return StepSet{std::move(c), std::move(uniq)};
}

bool same_consumed(const Step& a, const Step& b) { return a.consumed == b.consumed; }

Term apply_step(const Term& t, const Step& s) {
  StepSet ss = enumerate_steps(t);
  for (auto& cand : ss.steps)
    if (cand.consumed == s.consumed &&
        compare_nodes(cand.residual.root, s.residual.root, true) == 0)
      return cand.residual;
  throw std::runtime_error("step not applicable to this term");
}

bool still_enabled(const Term& t, const Step& s, int unfold_depth) {
  StepSet ss = enumerate_steps(t, unfold_depth);
  for (auto& cand : ss.steps)
    if (cand.consumed == s.consumed) return true;
  return false;
}

}  // namespace syncpat
