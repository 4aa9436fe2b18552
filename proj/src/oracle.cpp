#include "syncpat/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <thread>
#include <tuple>

#include "syncpat/congruence.hpp"
#include "syncpat/parser.hpp"
#include "syncpat/reachability.hpp"

namespace syncpat {

namespace {

// ---------------------------------------------------------------- slow path
//
// Deliberately naive reference semantics: hoist every restriction to the
// outermost level by textbook scope extrusion with always-fresh binders, then
// match the reduction axioms literally over parallel multisets. No canonical
// forms, no sharing with the fast enumerator beyond the AST.

struct Slow {
  Calculus cal;
  std::set<Name> used;
  std::vector<std::pair<std::vector<Consumed>, Term>> out;
  std::vector<std::pair<Label, CapKind>> all_labels;

  Name freshen(const Name& n) {
    Name f = fresh_name(n, used);
    used.insert(f);
    return f;
  }

  // Pulls every Nu in the subtree (outside guards) to the front of the
  // returned binder list, renaming each binder to a fresh name.
  NodePtr hoist(const NodePtr& n, std::vector<Name>& binders) {
    if (auto u = n->get<Nu>()) {
      Name f = freshen(u->name);
      binders.push_back(f);
      return hoist(f == u->name ? u->body : substitute(u->body, {{u->name, f}}), binders);
    }
    if (auto p = n->get<Par>()) {
      std::vector<NodePtr> parts;
      for (auto& c : p->parts) parts.push_back(hoist(c, binders));
      return par(std::move(parts));
    }
    if (auto a = n->get<Amb>()) return amb(a->name, hoist(a->body, binders), a->label);
    return n;
  }

  static void comps_of(const NodePtr& n, std::vector<NodePtr>& cs) {
    if (n->is<Nil>()) return;
    if (auto p = n->get<Par>()) {
      for (auto& c : p->parts) comps_of(c, cs);
      return;
    }
    cs.push_back(n);
  }

  void emit(std::vector<Consumed> cons, NodePtr root, const std::vector<Name>& binders) {
    for (auto it = binders.rbegin(); it != binders.rend(); ++it) root = nu(*it, root);
    std::sort(cons.begin(), cons.end());
    out.push_back({std::move(cons), Term{cal, std::move(root)}});
  }

  static NodePtr replaced(const std::vector<NodePtr>& cs,
                          const std::map<size_t, NodePtr>& rep) {
    std::vector<NodePtr> parts;
    for (size_t i = 0; i < cs.size(); ++i) {
      auto it = rep.find(i);
      if (it != rep.end()) {
        if (it->second) parts.push_back(it->second);
      } else {
        parts.push_back(cs[i]);
      }
    }
    return par(std::move(parts));
  }

  // ------------------------------------------------------------------ MA/SA

  // wrap(newRegion) rebuilds the whole term around the region being reduced.
  void ma_region(const std::vector<NodePtr>& cs, const std::vector<Name>& binders,
                 const std::function<NodePtr(NodePtr)>& wrap) {
    bool sa = cal == Calculus::SA;
    auto fire = [&](std::vector<Consumed> cons, const std::map<size_t, NodePtr>& rep) {
      emit(std::move(cons), wrap(replaced(cs, rep)), binders);
    };

    for (size_t i = 0; i < cs.size(); ++i) {
      const Prefix* op = cs[i]->get<Prefix>();
      if (op && op->cap == CapKind::Open) {
        for (size_t j = 0; j < cs.size(); ++j) {
          const Amb* am = j == i ? nullptr : cs[j]->get<Amb>();
          if (!am || !(am->name == op->name)) continue;
          if (!sa) {
            fire({{op->label, CapKind::Open, false}, {am->label, CapKind::Ambient, false}},
                 {{i, op->cont}, {j, am->body}});
            continue;
          }
          std::vector<NodePtr> bcs;
          comps_of(am->body, bcs);
          for (size_t q = 0; q < bcs.size(); ++q) {
            const Prefix* co = bcs[q]->get<Prefix>();
            if (!co || co->cap != CapKind::CoOpen || !(co->name == am->name)) continue;
            fire({{op->label, CapKind::Open, false},
                  {co->label, CapKind::CoOpen, false},
                  {am->label, CapKind::Ambient, false}},
                 {{i, op->cont}, {j, replaced(bcs, {{q, co->cont}})}});
          }
        }
      }

      const Amb* mover = cs[i]->get<Amb>();
      if (!mover) continue;
      std::vector<NodePtr> mcs;
      comps_of(mover->body, mcs);
      for (size_t p = 0; p < mcs.size(); ++p) {
        const Prefix* pf = mcs[p]->get<Prefix>();
        if (!pf || pf->cap != CapKind::In) continue;
        for (size_t j = 0; j < cs.size(); ++j) {
          const Amb* tgt = j == i ? nullptr : cs[j]->get<Amb>();
          if (!tgt || !(tgt->name == pf->name)) continue;
          NodePtr moved = amb(mover->name, replaced(mcs, {{p, pf->cont}}), mover->label);
          std::vector<Consumed> cons{{pf->label, CapKind::In, false},
                                     {mover->label, CapKind::Ambient, false},
                                     {tgt->label, CapKind::Ambient, true}};
          if (!sa) {
            fire(cons, {{i, nullptr},
                        {j, amb(tgt->name, par({tgt->body, moved}), tgt->label)}});
            continue;
          }
          std::vector<NodePtr> tcs;
          comps_of(tgt->body, tcs);
          for (size_t q = 0; q < tcs.size(); ++q) {
            const Prefix* co = tcs[q]->get<Prefix>();
            if (!co || co->cap != CapKind::CoIn || !(co->name == tgt->name)) continue;
            auto cc = cons;
            cc.push_back({co->label, CapKind::CoIn, false});
            NodePtr body = par({replaced(tcs, {{q, co->cont}}), moved});
            fire(cc, {{i, nullptr}, {j, amb(tgt->name, body, tgt->label)}});
          }
        }
      }
    }

    for (size_t j = 0; j < cs.size(); ++j) {
      const Amb* parent = cs[j]->get<Amb>();
      if (!parent) continue;
      std::vector<NodePtr> pcs;
      comps_of(parent->body, pcs);
      for (size_t i = 0; i < pcs.size(); ++i) {
        const Amb* mover = pcs[i]->get<Amb>();
        if (!mover) continue;
        std::vector<NodePtr> mcs;
        comps_of(mover->body, mcs);
        for (size_t p = 0; p < mcs.size(); ++p) {
          const Prefix* pf = mcs[p]->get<Prefix>();
          if (!pf || pf->cap != CapKind::Out || !(pf->name == parent->name)) continue;
          NodePtr moved = amb(mover->name, replaced(mcs, {{p, pf->cont}}), mover->label);
          std::vector<Consumed> cons{{pf->label, CapKind::Out, false},
                                     {mover->label, CapKind::Ambient, false},
                                     {parent->label, CapKind::Ambient, true}};
          if (!sa) {
            NodePtr np = amb(parent->name, replaced(pcs, {{i, nullptr}}), parent->label);
            fire(cons, {{j, par({np, moved})}});
            continue;
          }
          for (size_t q = 0; q < pcs.size(); ++q) {
            const Prefix* co = q == i ? nullptr : pcs[q]->get<Prefix>();
            if (!co || co->cap != CapKind::CoOut || !(co->name == parent->name)) continue;
            auto cc = cons;
            cc.push_back({co->label, CapKind::CoOut, false});
            NodePtr np =
                amb(parent->name, replaced(pcs, {{i, nullptr}, {q, co->cont}}), parent->label);
            fire(cc, {{j, par({np, moved})}});
          }
        }
      }
    }

    for (size_t i = 0; i < cs.size(); ++i) {
      const Amb* am = cs[i]->get<Amb>();
      if (!am) continue;
      std::vector<NodePtr> bcs;
      comps_of(am->body, bcs);
      auto subwrap = [&, i, am](NodePtr body) {
        return wrap(replaced(cs, {{i, amb(am->name, body, am->label)}}));
      };
      ma_region(bcs, binders, subwrap);
    }
  }

  // --------------------------------------------------------------------- pi

  void pi_region(const std::vector<NodePtr>& cs, const std::vector<Name>& binders) {
    auto kind_of = [](const Sum* s) {
      if (s->branches.size() > 1) return CapKind::Sum;
      switch (s->branches[0].kind) {
        case GuardKind::Output: return CapKind::OutputAtom;
        case GuardKind::Input: return CapKind::InputPrefix;
        default: return CapKind::Tau;
      }
    };
    for (size_t i = 0; i < cs.size(); ++i) {
      if (const Sum* s = cs[i]->get<Sum>()) {
        for (const Branch& b : s->branches)
          if (b.kind == GuardKind::Tau)
            emit({{s->label, kind_of(s), false}}, replaced(cs, {{i, b.cont}}), binders);
      }
      std::vector<std::tuple<Label, CapKind, Name, std::optional<Name>, NodePtr>> sends;
      if (const Msg* m = cs[i]->get<Msg>()) {
        sends.push_back({m->label, CapKind::OutputAtom, m->chan, m->obj, nil()});
      } else if (const Sum* s = cs[i]->get<Sum>()) {
        for (const Branch& b : s->branches)
          if (b.kind == GuardKind::Output)
            sends.push_back({s->label, kind_of(s), b.chan, b.obj, b.cont});
      }
      for (auto& [slab, skind, schan, sobj, scont] : sends) {
        for (size_t j = 0; j < cs.size(); ++j) {
          const Sum* rs = j == i ? nullptr : cs[j]->get<Sum>();
          if (!rs) continue;
          for (const Branch& b : rs->branches) {
            if (b.kind != GuardKind::Input || !(b.chan == schan)) continue;
            if (b.obj.has_value() != sobj.has_value()) continue;
            NodePtr cont = b.cont;
            if (b.obj && !(*b.obj == *sobj)) cont = substitute(cont, {{*b.obj, *sobj}});
            emit({{slab, skind, false}, {rs->label, kind_of(rs), false}},
                 replaced(cs, {{i, scont}, {j, cont}}), binders);
          }
        }
      }
    }
  }

  // ------------------------------------------------------------------- join

  void join_term(const NodePtr& root) {
    // heat: lift definitions out with fresh defined names, gather messages
    std::vector<std::pair<std::vector<JRule>, Label>> blocks;
    std::vector<NodePtr> mols;
    std::function<void(const NodePtr&)> heat = [&](const NodePtr& n) {
      if (n->is<Nil>()) return;
      if (auto p = n->get<Par>()) {
        for (auto& c : p->parts) heat(c);
        return;
      }
      if (auto d = n->get<JDef>()) {
        std::map<Name, Name> ren;
        for (const JRule& r : d->rules)
          for (const JPattern& pt : r.patterns)
            if (!ren.count(pt.chan)) ren.emplace(pt.chan, freshen(pt.chan));
        std::vector<JRule> rules;
        for (const JRule& r : d->rules) {
          JRule nr;
          for (const JPattern& pt : r.patterns)
            nr.patterns.push_back(JPattern{ren.at(pt.chan), pt.var, pt.label});
          // received variables shadow defined channels inside the rule body
          std::map<Name, Name> rren = ren;
          for (const JPattern& pt : r.patterns)
            if (pt.var) rren.erase(*pt.var);
          nr.body = rren.empty() ? r.body : substitute(r.body, rren);
          rules.push_back(std::move(nr));
        }
        blocks.push_back({std::move(rules), d->label});
        heat(substitute(d->main, ren));
        return;
      }
      mols.push_back(n);
    };
    heat(root);

    auto rebuild = [&](std::vector<NodePtr> ms) {
      NodePtr cur = par(std::move(ms));
      for (auto it = blocks.rbegin(); it != blocks.rend(); ++it)
        cur = jdef(it->first, cur, it->second);
      return cur;
    };

    for (auto& [rules, dlabel] : blocks) {
      std::optional<Label> rep;
      for (const JRule& r : rules) {
        auto ls = labels_of(Term{cal, r.body});
        if (!ls.empty()) rep = ls.front().first;
        else if (!r.patterns.empty()) rep = r.patterns.front().label;
        if (rep) break;
      }
      int idx = 1;
      if (rep) {
        for (auto& [l, k] : all_labels) {
          if (l.base != rep->base || l.path.size() != rep->path.size() + 1) continue;
          if (!std::equal(rep->path.begin(), rep->path.end(), l.path.begin())) continue;
          idx = std::max(idx, l.path.back() + 1);
        }
      }
      for (const JRule& rule : rules) {
        std::vector<size_t> chosen;
        std::function<void(size_t)> match = [&](size_t pi) {
          if (pi == rule.patterns.size()) {
            std::map<Name, Name> subst;
            std::vector<Consumed> cons{{dlabel, CapKind::JoinDefinition, true}};
            std::map<size_t, NodePtr> rem;
            for (size_t q = 0; q < rule.patterns.size(); ++q) {
              const Msg* m = mols[chosen[q]]->get<Msg>();
              if (rule.patterns[q].var && m->obj) subst[*rule.patterns[q].var] = *m->obj;
              cons.push_back({m->label, CapKind::JoinMessage, false});
              rem[chosen[q]] = nullptr;
            }
            NodePtr body = substitute(instantiate(rule.body, idx), subst);
            std::vector<NodePtr> ms;
            for (size_t q = 0; q < mols.size(); ++q)
              if (!rem.count(q)) ms.push_back(mols[q]);
            ms.push_back(body);
            emit(std::move(cons), rebuild(std::move(ms)), {});
            return;
          }
          const JPattern& pt = rule.patterns[pi];
          for (size_t q = 0; q < mols.size(); ++q) {
            if (std::find(chosen.begin(), chosen.end(), q) != chosen.end()) continue;
            const Msg* m = mols[q]->get<Msg>();
            if (!m || !(m->chan == pt.chan)) continue;
            if (m->obj.has_value() != pt.var.has_value()) continue;
            chosen.push_back(q);
            match(pi + 1);
            chosen.pop_back();
          }
        };
        match(0);
      }
    }
  }

  static NodePtr instantiate(const NodePtr& n, int idx);
};

NodePtr Slow::instantiate(const NodePtr& n, int idx) {
  auto ext = [&](Label l) {
    if (l.valid()) l.path.push_back(idx);
    return l;
  };
  if (n->is<Nil>() || n->is<Ok>()) return n;
  if (auto p = n->get<Par>()) {
    std::vector<NodePtr> parts;
    for (auto& c : p->parts) parts.push_back(instantiate(c, idx));
    return mk(Node{Par{std::move(parts)}});
  }
  if (auto u = n->get<Nu>()) return nu(u->name, instantiate(u->body, idx));
  if (auto b = n->get<Bang>()) return bang(instantiate(b->body, idx), ext(b->label));
  if (auto a = n->get<Amb>()) return amb(a->name, instantiate(a->body, idx), ext(a->label));
  if (auto p = n->get<Prefix>())
    return prefix(p->cap, p->name, instantiate(p->cont, idx), ext(p->label));
  if (auto s = n->get<Sum>()) {
    std::vector<Branch> bs;
    for (const Branch& br : s->branches)
      bs.push_back(Branch{br.kind, br.chan, br.obj, instantiate(br.cont, idx)});
    return sum(std::move(bs), ext(s->label));
  }
  if (auto m = n->get<Msg>()) return msg(m->chan, m->obj, ext(m->label));
  const JDef* d = n->get<JDef>();
  std::vector<JRule> rs;
  for (const JRule& r : d->rules) {
    JRule nr;
    for (const JPattern& pt : r.patterns)
      nr.patterns.push_back(JPattern{pt.chan, pt.var, ext(pt.label)});
    nr.body = instantiate(r.body, idx);
    rs.push_back(std::move(nr));
  }
  return jdef(std::move(rs), instantiate(d->main, idx), ext(d->label));
}

}  // namespace

std::vector<std::pair<std::vector<Consumed>, Term>> slow_steps(const Term& t) {
  Slow s;
  s.cal = t.cal;
  s.used = all_names(t.root);
  s.all_labels = labels_of(t);

  if (t.cal == Calculus::Join) {
    s.join_term(t.root);
  } else {
    std::vector<Name> binders;
    NodePtr flat = s.hoist(t.root, binders);
    std::vector<NodePtr> cs;
    Slow::comps_of(flat, cs);
    if (t.cal == Calculus::MA || t.cal == Calculus::SA) {
      auto wrap = [](NodePtr n) { return n; };
      s.ma_region(cs, binders, wrap);
    } else {
      s.pi_region(cs, binders);
    }
  }

  // dedup up to congruence of residuals
  std::vector<std::pair<std::vector<Consumed>, Term>> uniq;
  for (auto& [cons, res] : s.out) {
    Term c = canonicalize(res);
    bool dup = false;
    for (auto& [uc, ur] : uniq)
      if (uc == cons && compare_nodes(ur.root, c.root, true) == 0) {
        dup = true;
        break;
      }
    if (!dup) uniq.push_back({cons, c});
  }
  return uniq;
}

// ------------------------------------------------------- term enumeration
//
// An ambient term modulo congruence is a multiset of components, where a
// component is ok, a capability prefix over a term, an ambient over a term,
// or (optionally) a replication over a term. Enumerating multisets of
// canonical components therefore yields every congruence class exactly once.
// Size = operator count: ok/prefix/ambient/replication cost 1 each, every
// parallel bar costs 1, and 0 is free.
//
// Components up to a stored size cap K live in rank-ordered tables together
// with a structural summary that lets a running region summary count the
// reduction steps of a partial multiset in O(1) per added component. Larger
// components (which fit at most once per term) are generated on the fly by
// wrapping recursively enumerated bodies.

namespace {

constexpr int kPoolMax = 8;

struct CompInfo {
  NodePtr node;   // built eagerly for stored components, lazily for big ones
  NodePtr body;   // wrapper body, kept for lazy builds
  int8_t tag = 0; // 0 ok, 1 prefix, 2 ambient, 3 replication
  CapKind cap = CapKind::In;
  int8_t name = -1;
  int16_t size = 0;
  int steps_inside = 0;
  std::array<int8_t, kPoolMax> ins_top{};   // ambient: top-level in-prefixes in body
  std::array<int8_t, kPoolMax> outs_top{};  // ambient: top-level out-prefixes in body
  std::array<int8_t, kPoolMax> brackets{};  // ambient brackets anywhere in the subtree
};

struct RegionSummary {
  int steps = 0;
  std::array<int8_t, kPoolMax> opens{}, ins{}, outs{}, ambs{};
  std::array<int16_t, kPoolMax> amb_ins{}, amb_outs{};
  std::array<int8_t, kPoolMax> brackets{};

  void add(const CompInfo& c, int p) {
    for (int m = 0; m < p; ++m) brackets[m] += c.brackets[m];
    if (c.tag == 1) {
      if (c.cap == CapKind::Open) {
        steps += ambs[c.name];
        opens[c.name]++;
      } else if (c.cap == CapKind::In) {
        ins[c.name]++;
      } else {
        outs[c.name]++;
      }
    } else if (c.tag == 2) {
      int extra = c.steps_inside + opens[c.name] + amb_ins[c.name];
      for (int m = 0; m < p; ++m) extra += int(c.ins_top[m]) * ambs[m];
      steps += extra;
      ambs[c.name]++;
      for (int m = 0; m < p; ++m) {
        amb_ins[m] += c.ins_top[m];
        amb_outs[m] += c.outs_top[m];
      }
    }
  }
};

NodePtr comp_node(const CompInfo& c, const std::vector<Name>& names) {
  if (c.node) return c.node;
  if (c.tag == 3) return bang(c.body);
  if (c.tag == 2) return amb(names[c.name], c.body);
  return prefix(c.cap, names[c.name], c.body);
}

struct Universe {
  EnumSpec spec;
  std::vector<Name> names;
  int K = 0;  // components of size <= K are stored
  std::vector<CompInfo> comps;                    // flat, index = rank
  std::array<int, kPoolMax + 2> size_begin{};     // comp rank range per size
  struct TermList {
    std::vector<int32_t> ids;      // concatenated component ranks
    std::vector<int32_t> off;      // off[i]..off[i+1) indexes ids
    std::vector<RegionSummary> sum;
    std::vector<NodePtr> node;
  };
  std::vector<TermList> terms;  // by exact size 0..K

  int pool() const { return spec.name_pool; }
  int comp_size(int rank) const {
    int s = 1;
    while (size_begin[s + 1] <= rank) ++s;
    return s;
  }
};

// Wraps a body (given by its region summary) into a component summary.
CompInfo wrap_comp(int tag, CapKind cap, int name, NodePtr node, NodePtr body,
                   const RegionSummary& r, int sz) {
  CompInfo c;
  c.node = std::move(node);
  c.body = std::move(body);
  c.tag = int8_t(tag);
  c.cap = cap;
  c.name = int8_t(name);
  c.size = int16_t(sz);
  c.brackets = r.brackets;
  if (tag == 2) {
    c.steps_inside = r.steps + r.amb_outs[name];
    c.ins_top = r.ins;
    c.outs_top = r.outs;
    c.brackets[name]++;
  }
  return c;
}

struct WrapSpec {
  int tag;
  CapKind cap;
  int name;
};

std::vector<WrapSpec> wrapper_order(const EnumSpec& spec) {
  std::vector<WrapSpec> w;
  for (int i = 0; i < spec.name_pool; ++i) w.push_back({2, CapKind::Ambient, i});
  for (CapKind k : {CapKind::In, CapKind::Out, CapKind::Open})
    for (int i = 0; i < spec.name_pool; ++i) w.push_back({1, k, i});
  if (spec.allow_replication) w.push_back({3, CapKind::Replication, -1});
  return w;
}

struct Walk {
  const Universe* U = nullptr;
  bool unique_brackets = false;  // prune terms repeating an ambient name
  int jobs = 1, tid = 0;
  long long first_ctr = 0;  // partitions work over the first component

  using Fn = void (*)(void*, std::vector<const CompInfo*>&, const RegionSummary&);

  bool mine() { return first_ctr++ % jobs == tid; }

  static bool bracket_clash(const RegionSummary& st, const CompInfo& c, int p) {
    for (int m = 0; m < p; ++m)
      if (st.brackets[m] + c.brackets[m] > 1) return true;
    return false;
  }

  // Multiset suffix over stored components of rank <= max_rank. `rem` is the
  // remaining budget where a component of size s costs s+1 (a term of size n
  // has budget n+1, absorbing the bars).
  void small_rec(int rem, int max_rank, std::vector<const CompInfo*>& cur,
                 const RegionSummary& st, void* o, Fn f, bool top) {
    if (rem == 0) {
      f(o, cur, st);
      return;
    }
    int p = U->pool();
    int sz = std::min(U->comp_size(max_rank), rem - 1);
    for (; sz >= 1; --sz) {
      int hi = std::min(max_rank, U->size_begin[sz + 1] - 1);
      for (int r = hi; r >= U->size_begin[sz]; --r) {
        if (top && cur.empty() && !mine()) continue;
        const CompInfo& c = (*U).comps[r];
        if (unique_brackets && bracket_clash(st, c, p)) continue;
        RegionSummary st2 = st;
        st2.add(c, p);
        cur.push_back(&c);
        small_rec(rem - sz - 1, r, cur, st2, o, f, top);
        cur.pop_back();
      }
    }
  }

  // Every term of size exactly s, as (components, summary).
  void gen_exact(int s, void* o, Fn f, bool top) {
    int p = U->pool();
    if (s == 0) {
      if (!top || tid == 0) {
        std::vector<const CompInfo*> none;
        RegionSummary st{};
        f(o, none, st);
      }
      return;
    }
    if (s <= U->K) {
      auto& tl = U->terms[s];
      std::vector<const CompInfo*> cur;
      for (size_t i = 0; i < tl.sum.size(); ++i) {
        if (top && (long long)i % jobs != tid) continue;
        if (unique_brackets) {
          bool bad = false;
          for (int m = 0; m < p; ++m) bad = bad || tl.sum[i].brackets[m] > 1;
          if (bad) continue;
        }
        cur.clear();
        for (int k = tl.off[i]; k < tl.off[i + 1]; ++k) cur.push_back(&U->comps[tl.ids[k]]);
        f(o, cur, tl.sum[i]);
      }
      return;
    }
    // A component larger than K fits at most once and is put first.
    auto wraps = wrapper_order(U->spec);
    for (int bs = s; bs > U->K; --bs) {
      struct BigCtx {
        Walk* w;
        const std::vector<WrapSpec>* wraps;
        int bs, rem_after;
        void* o;
        Fn f;
        bool top;
      } bc{this, &wraps, bs, (s + 1) - (bs + 1), o, f, top};
      Fn body_cb = [](void* vb, std::vector<const CompInfo*>& bcur, const RegionSummary& bst) {
        auto* b = static_cast<BigCtx*>(vb);
        Walk* w = b->w;
        int p = w->U->pool();
        std::vector<NodePtr> parts;
        parts.reserve(bcur.size());
        for (auto* c : bcur) parts.push_back(comp_node(*c, w->U->names));
        NodePtr body = par(std::move(parts));
        std::vector<const CompInfo*> cur;
        for (const WrapSpec& ws : *b->wraps) {
          if (ws.tag == 3 && body->is<Nil>()) continue;
          if (b->top && !w->mine()) continue;
          CompInfo big = wrap_comp(ws.tag, ws.cap, ws.name, nullptr, body, bst, b->bs);
          if (w->unique_brackets) {
            bool bad = false;
            for (int m = 0; m < p; ++m) bad = bad || big.brackets[m] > 1;
            if (bad) continue;
          }
          RegionSummary st{};
          st.add(big, p);
          cur.assign(1, &big);
          if (b->rem_after == 0)
            b->f(b->o, cur, st);
          else
            w->small_rec(b->rem_after, w->U->size_begin[w->U->K + 1] - 1, cur, st, b->o, b->f,
                         false);
        }
      };
      Walk sub = *this;
      sub.jobs = 1;
      sub.tid = 0;
      sub.gen_exact(bs - 1, &bc, body_cb, false);
    }
    std::vector<const CompInfo*> cur;
    RegionSummary st{};
    small_rec(s + 1, U->size_begin[U->K + 1] - 1, cur, st, o, f, top);
  }
};

Universe build_universe(const EnumSpec& spec) {
  if (spec.max_operators < 0) throw std::invalid_argument("max-operators must be >= 0");
  if (spec.name_pool < 1 || spec.name_pool > kPoolMax)
    throw std::invalid_argument("name-pool-size out of range");
  if (spec.allow_restriction)
    throw std::invalid_argument("restriction enumeration is not supported");
  if (spec.cal != Calculus::MA) throw std::invalid_argument("enumeration covers MA only");

  Universe U;
  U.spec = spec;
  for (int i = 0; i < spec.name_pool; ++i) U.names.push_back(Name{"n" + std::to_string(i + 1)});

  // Pick the stored size cap from component counts: c1 = 1 + 4p (+0 for !0,
  // skipped), c_s = w * t_{s-1}; t_s via multisets with bar-inclusive sizes.
  int w = 4 * spec.name_pool + (spec.allow_replication ? 1 : 0);
  std::vector<long long> c{0, 1 + 4 * spec.name_pool}, t{1};
  long long cum = c[1];
  int K = std::min(spec.max_operators, 1);
  for (int s = 1; cum <= 3'000'000 && s < spec.max_operators && s < kPoolMax; ++s) {
    // t[s]: multisets of components whose sizes (plus one bar each) sum to s+1
    t.push_back(0);
    {
      std::function<long long(int, int)> cnt = [&](int rem, int maxsz) -> long long {
        if (rem == 0) return 1;
        long long total = 0;
        for (int z = std::min(maxsz, rem - 1); z >= 1; --z) {
          // j copies of size-z components: combinations with repetition
          long long ways = 1;
          for (int j = 1; j * (z + 1) <= rem; ++j) {
            ways = ways * (c[z] + j - 1) / j;
            total += ways * cnt(rem - j * (z + 1), z - 1);
          }
        }
        return total;
      };
      t[s] = cnt(s + 1, s);
    }
    c.push_back(w * t[s]);
    cum += c[s + 1];
    if (cum <= 3'000'000) K = s + 1;
  }
  if (spec.max_operators > 2 * K + 2)
    throw std::invalid_argument("max-operators too large for enumeration");
  U.K = K;

  auto wraps = wrapper_order(spec);
  U.terms.resize(K + 1);
  U.terms[0].off = {0, 0};
  U.terms[0].sum.push_back(RegionSummary{});
  U.terms[0].node.push_back(nil());
  U.size_begin[1] = 0;
  for (int s = 1; s <= K; ++s) {
    if (s == 1) {
      CompInfo okc;
      okc.node = ok();
      okc.tag = 0;
      okc.size = 1;
      U.comps.push_back(okc);
    }
    auto& bodies = U.terms[s - 1];
    for (const WrapSpec& ws : wraps) {
      for (size_t i = 0; i < bodies.sum.size(); ++i) {
        if (ws.tag == 3 && bodies.node[i]->is<Nil>()) continue;
        NodePtr n = ws.tag == 3  ? bang(bodies.node[i])
                    : ws.tag == 2 ? amb(U.names[ws.name], bodies.node[i])
                                  : prefix(ws.cap, U.names[ws.name], bodies.node[i]);
        U.comps.push_back(
            wrap_comp(ws.tag, ws.cap, ws.name, std::move(n), bodies.node[i], bodies.sum[i], s));
      }
    }
    U.size_begin[s + 1] = int(U.comps.size());
    // collect stored terms of size s
    struct Collect {
      Universe* U;
      int s;
    } cc{&U, s};
    Walk walk;
    walk.U = &U;
    Walk::Fn f = [](void* v, std::vector<const CompInfo*>& cur, const RegionSummary& st) {
      auto* c = static_cast<Collect*>(v);
      auto& tl = c->U->terms[c->s];
      std::vector<NodePtr> parts;
      for (auto* ci : cur) {
        tl.ids.push_back(int32_t(ci - c->U->comps.data()));
        parts.push_back(ci->node);
      }
      tl.off.push_back(int32_t(tl.ids.size()));
      tl.sum.push_back(st);
      tl.node.push_back(par(std::move(parts)));
    };
    U.terms[s].off = {0};
    std::vector<const CompInfo*> cur;
    walk.small_rec(s + 1, U.size_begin[s + 1] - 1, cur, {}, &cc, f, false);
  }
  for (int s = K + 1; s <= kPoolMax + 1; ++s) U.size_begin[s] = int(U.comps.size());
  return U;
}

// ------------------------------------------------- light ambient step scan
//
// Consumed occurrences of every step of a replication-free ambient term,
// identified by traversal-order ids. Used as a cheap necessary filter before
// the real detectors run.

struct LOcc {
  int id;
  bool rec;
};

struct LStep {
  Axiom ax;
  LOcc occ[3];
  int n = 0;
};

struct LightScan {
  std::vector<LStep> steps;
  int ctr = 0;

  struct RInfo {
    std::vector<std::pair<int, const Name*>> opens, ins, outs;  // top prefixes
    std::vector<std::pair<int, const Name*>> ambs;              // top ambients
    // (child ambient id, out-prefix id) per top-level out inside a top
    // ambient's body, keyed by the out name
    std::vector<std::tuple<const Name*, int, int>> amb_outs;
  };

  static void flatten(const NodePtr& n, std::vector<const Node*>& out) {
    if (n->is<Nil>() || n->is<Ok>()) return;
    if (auto p = n->get<Par>()) {
      for (auto& c : p->parts) flatten(c, out);
      return;
    }
    out.push_back(n.get());
  }

  RInfo region(const std::vector<const Node*>& comps) {
    RInfo R;
    std::vector<std::pair<const Amb*, int>> sub;
    for (const Node* n : comps) {
      if (auto* pr = std::get_if<Prefix>(&n->v)) {
        int id = ctr++;
        if (pr->cap == CapKind::Open)
          R.opens.push_back({id, &pr->name});
        else if (pr->cap == CapKind::In)
          R.ins.push_back({id, &pr->name});
        else if (pr->cap == CapKind::Out)
          R.outs.push_back({id, &pr->name});
      } else if (auto* a = std::get_if<Amb>(&n->v)) {
        int id = ctr++;
        R.ambs.push_back({id, &a->name});
        sub.push_back({a, id});
      }
    }
    for (auto [a, id] : sub) {
      std::vector<const Node*> inner;
      flatten(a->body, inner);
      RInfo Ri = region(inner);
      // in: a sibling ambient named like the prefix
      for (auto [pid, m] : Ri.ins)
        for (auto [bid, bn] : R.ambs)
          if (bid != id && *bn == *m)
            steps.push_back({Axiom::MaIn, {{pid, false}, {id, false}, {bid, true}}, 3});
      // out: grandchild out-prefix naming this ambient
      for (auto [m, cid, pid] : Ri.amb_outs)
        if (*m == a->name)
          steps.push_back({Axiom::MaOut, {{pid, false}, {cid, false}, {id, true}}, 3});
      // surface this ambient's top-level outs to the grandparent
      for (auto [pid, m] : Ri.outs) R.amb_outs.push_back({m, id, pid});
    }
    for (auto [pid, m] : R.opens)
      for (auto [bid, bn] : R.ambs)
        if (*bn == *m) steps.push_back({Axiom::MaOpen, {{pid, false}, {bid, false}}, 2});
    return R;
  }
};

std::vector<LStep> light_steps(const std::vector<const CompInfo*>& comps,
                               const std::vector<Name>& names) {
  LightScan sc;
  std::vector<NodePtr> hold;
  std::vector<const Node*> flat;
  hold.reserve(comps.size());
  for (auto* c : comps) {
    hold.push_back(comp_node(*c, names));
    LightScan::flatten(hold.back(), flat);
  }
  sc.region(flat);
  return sc.steps;
}

// Necessary condition for an M witness (asymmetric conflicts allowed):
// b shares an occurrence with a and with c where at least one side consumes
// it, while a and c share no occurrence both consume.
bool m_candidate(const std::vector<LStep>& ls) {
  auto edge = [&](const LStep& x, const LStep& y) {
    for (int i = 0; i < x.n; ++i)
      for (int j = 0; j < y.n; ++j)
        if (x.occ[i].id == y.occ[j].id && !(x.occ[i].rec && y.occ[j].rec)) return true;
    return false;
  };
  auto clash = [&](const LStep& x, const LStep& y) {
    for (int i = 0; i < x.n; ++i)
      for (int j = 0; j < y.n; ++j)
        if (x.occ[i].id == y.occ[j].id && !x.occ[i].rec && !y.occ[j].rec) return true;
    return false;
  };
  int n = int(ls.size());
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) {
      if (a == b || !edge(ls[b], ls[a])) continue;
      for (int c = a + 1; c < n; ++c)
        if (c != b && edge(ls[b], ls[c]) && !clash(ls[a], ls[c])) return true;
    }
  return false;
}

Term materialize(const std::vector<const CompInfo*>& comps, const Universe& U) {
  std::vector<NodePtr> parts;
  parts.reserve(comps.size());
  for (auto* c : comps) parts.push_back(comp_node(*c, U.names));
  return assign_labels(Term{U.spec.cal, par(std::move(parts))});
}

struct LemmaCtx {
  const Universe* U;
  bool strict = false;  // corollary mode: symmetric-conflict M only
  long long terms = 0, witnesses = 0;
  std::vector<Violation> viols;
};

void lemma_visit(void* v, std::vector<const CompInfo*>& cur, const RegionSummary& st) {
  auto* ctx = static_cast<LemmaCtx*>(v);
  ctx->terms++;
  if (st.steps < 3) return;
  auto ls = light_steps(cur, ctx->U->names);
  if (!m_candidate(ls)) return;
  Term t = materialize(cur, *ctx->U);
  auto ws = find_m(t, /*allow_asymmetric=*/!ctx->strict);
  ctx->witnesses += (long long)ws.size();
  for (const MWitness& w : ws) {
    if (ctx->strict) {
      ctx->viols.push_back({render(t), "strict M witness in a unique-ambient-name term"});
    } else if (w.conflict_ba_symmetric && w.conflict_bc_symmetric && !w.b_uses_open) {
      ctx->viols.push_back(
          {render(t), "both of b's conflicts symmetric and b does not reduce an open"});
    }
  }
}

LemmaReport run_sweep(const EnumSpec& spec, int jobs, bool strict, const char* note) {
  auto t0 = std::chrono::steady_clock::now();
  if (spec.allow_replication)
    throw std::invalid_argument("lemma checks cover the replication-free fragment");
  Universe U = build_universe(spec);
  jobs = std::max(1, jobs);
  std::vector<LemmaCtx> ctxs(jobs);
  auto run = [&](int tid) {
    ctxs[tid].U = &U;
    ctxs[tid].strict = strict;
    Walk w;
    w.U = &U;
    w.unique_brackets = strict;
    w.jobs = jobs;
    w.tid = tid;
    for (int s = 0; s <= spec.max_operators; ++s) {
      w.first_ctr = 0;
      w.gen_exact(s, &ctxs[tid], lemma_visit, true);
    }
  };
  if (jobs == 1) {
    run(0);
  } else {
    std::vector<std::thread> ts;
    for (int i = 0; i < jobs; ++i) ts.emplace_back(run, i);
    for (auto& t : ts) t.join();
  }
  LemmaReport rep;
  rep.note = note;
  for (auto& c : ctxs) {
    rep.terms_checked += c.terms;
    rep.witnesses_found += c.witnesses;
    for (auto& v : c.viols) rep.violations.push_back(v);
  }
  std::sort(rep.violations.begin(), rep.violations.end(),
            [](const Violation& a, const Violation& b) {
              return std::tie(a.term, a.detail) < std::tie(b.term, b.detail);
            });
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace

void enumerate_terms(const EnumSpec& spec, const std::function<void(const Term&)>& sink) {
  Universe U = build_universe(spec);
  struct Ctx {
    const Universe* U;
    const std::function<void(const Term&)>* sink;
  } ctx{&U, &sink};
  Walk w;
  w.U = &U;
  Walk::Fn f = [](void* v, std::vector<const CompInfo*>& cur, const RegionSummary&) {
    auto* c = static_cast<Ctx*>(v);
    (*c->sink)(materialize(cur, *c->U));
  };
  for (int s = 0; s <= spec.max_operators; ++s) w.gen_exact(s, &ctx, f, true);
}

LemmaReport check_lemma3(const EnumSpec& spec, int jobs) {
  if (spec.cal != Calculus::MA) throw std::invalid_argument("lemma 3 is about MA");
  return run_sweep(spec, jobs, /*strict=*/false,
                   "bounded evidence: replication- and restriction-free universe");
}

LemmaReport check_corollary_unique_names(const EnumSpec& spec, int jobs) {
  if (spec.cal != Calculus::MA) throw std::invalid_argument("the corollary is about MA");
  return run_sweep(spec, jobs, /*strict=*/true,
                   "bounded evidence: unique-ambient-name replication-free universe");
}

bool check_lemma5(const Term& t, const GreatMWitness& w) {
  StepSet ss = enumerate_steps(t);
  for (const Step& c : w.cycle) {
    bool found = false;
    for (const Step& s : ss.steps) found = found || same_consumed(s, c);
    if (!found) throw std::runtime_error("witness does not replay");
  }
  for (const Execution& e : maximal_executions(t)) {
    int hit = 0;
    for (const Step& c : w.cycle)
      for (const Step& s : e.steps)
        if (same_consumed(s, c)) {
          ++hit;
          break;
        }
    if (hit >= 3) return true;
  }
  return false;
}

LemmaReport check_join_locality(const std::vector<Term>& corpus) {
  auto t0 = std::chrono::steady_clock::now();
  LemmaReport rep;
  rep.note = "corpus-based check";
  for (const Term& t : corpus) {
    if (t.cal != Calculus::Join) throw std::invalid_argument("non-join term in corpus");
    rep.terms_checked++;
    for (const MWitness& w : find_m(t, /*allow_asymmetric=*/true)) {
      rep.witnesses_found++;
      if (w.non_local) rep.violations.push_back({render(t), "non-local M witness"});
    }
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace syncpat
