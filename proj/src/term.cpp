#include "syncpat/term.hpp"

#include <algorithm>
#include <cassert>

namespace syncpat {

const char* calculus_id(Calculus c) {
  switch (c) {
    case Calculus::MA: return "ma";
    case Calculus::SA: return "sa";
    case Calculus::PiMix: return "pi-mix";
    case Calculus::PiSep: return "pi-sep";
    case Calculus::PiAsyn: return "pi-asyn";
    case Calculus::Join: return "join";
  }
  return "?";
}

std::optional<Calculus> calculus_from_id(std::string_view id) {
  if (id == "ma") return Calculus::MA;
  if (id == "sa") return Calculus::SA;
  if (id == "pi-mix") return Calculus::PiMix;
  if (id == "pi-sep") return Calculus::PiSep;
  if (id == "pi-asyn") return Calculus::PiAsyn;
  if (id == "join") return Calculus::Join;
  return std::nullopt;
}

std::string Name::str() const {
  if (fresh == 0) return text;
  return text + "'" + std::to_string(fresh);
}

std::string Label::str() const {
  std::string s = std::to_string(base);
  for (int i : path) { s += '.'; s += std::to_string(i); }
  return s;
}

const char* cap_kind_id(CapKind k) {
  switch (k) {
    case CapKind::In: return "in";
    case CapKind::Out: return "out";
    case CapKind::Open: return "open";
    case CapKind::CoIn: return "co-in";
    case CapKind::CoOut: return "co-out";
    case CapKind::CoOpen: return "co-open";
    case CapKind::Ambient: return "ambient";
    case CapKind::Sum: return "sum";
    case CapKind::OutputAtom: return "output";
    case CapKind::InputPrefix: return "input";
    case CapKind::Tau: return "tau";
    case CapKind::JoinMessage: return "message";
    case CapKind::JoinDefinition: return "definition";
    case CapKind::Replication: return "replication";
  }
  return "?";
}

NodePtr mk(Node n) { return std::make_shared<const Node>(std::move(n)); }

NodePtr nil() { return mk(Node{Nil{}}); }
NodePtr ok() { return mk(Node{Ok{}}); }

NodePtr par(std::vector<NodePtr> parts) {
  if (parts.empty()) return nil();
  if (parts.size() == 1) return parts[0];
  return mk(Node{Par{std::move(parts)}});
}

NodePtr nu(Name n, NodePtr body) { return mk(Node{Nu{std::move(n), std::move(body)}}); }
NodePtr bang(NodePtr body, Label l) { return mk(Node{Bang{std::move(body), std::move(l)}}); }
NodePtr amb(Name n, NodePtr body, Label l) {
  return mk(Node{Amb{std::move(n), std::move(body), std::move(l)}});
}
NodePtr prefix(CapKind cap, Name n, NodePtr cont, Label l) {
  return mk(Node{Prefix{cap, std::move(n), std::move(cont), std::move(l)}});
}
NodePtr sum(std::vector<Branch> branches, Label l) {
  return mk(Node{Sum{std::move(branches), std::move(l)}});
}
NodePtr msg(Name chan, std::optional<Name> obj, Label l) {
  return mk(Node{Msg{std::move(chan), std::move(obj), std::move(l)}});
}
NodePtr jdef(std::vector<JRule> rules, NodePtr main, Label l) {
  return mk(Node{JDef{std::move(rules), std::move(main), std::move(l)}});
}

// --- names -------------------------------------------------------------

namespace {

void free_names_rec(const NodePtr& n, std::set<Name> bound, std::set<Name>& out) {
  if (!n) return;
  if (n->is<Nil>() || n->is<Ok>()) return;
  if (auto* p = n->get<Par>()) {
    for (auto& c : p->parts) free_names_rec(c, bound, out);
    return;
  }
  if (auto* r = n->get<Nu>()) {
    bound.insert(r->name);
    free_names_rec(r->body, std::move(bound), out);
    return;
  }
  if (auto* b = n->get<Bang>()) {
    free_names_rec(b->body, std::move(bound), out);
    return;
  }
  if (auto* a = n->get<Amb>()) {
    if (!bound.count(a->name)) out.insert(a->name);
    free_names_rec(a->body, std::move(bound), out);
    return;
  }
  if (auto* p = n->get<Prefix>()) {
    if (!bound.count(p->name)) out.insert(p->name);
    free_names_rec(p->cont, std::move(bound), out);
    return;
  }
  if (auto* s = n->get<Sum>()) {
    for (auto& br : s->branches) {
      if (br.kind != GuardKind::Tau && !bound.count(br.chan)) out.insert(br.chan);
      auto b2 = bound;
      if (br.kind == GuardKind::Input) {
        if (br.obj) b2.insert(*br.obj);
      } else if (br.kind == GuardKind::Output && br.obj && !bound.count(*br.obj)) {
        out.insert(*br.obj);
      }
      free_names_rec(br.cont, std::move(b2), out);
    }
    return;
  }
  if (auto* m = n->get<Msg>()) {
    if (!bound.count(m->chan)) out.insert(m->chan);
    if (m->obj && !bound.count(*m->obj)) out.insert(*m->obj);
    return;
  }
  if (auto* d = n->get<JDef>()) {
    // Defined variables (pattern channels) are bound in main and in every
    // rule body; received variables are bound in their own rule body.
    auto defined = bound;
    for (auto& r : d->rules)
      for (auto& pat : r.patterns) defined.insert(pat.chan);
    for (auto& r : d->rules) {
      auto b2 = defined;
      for (auto& pat : r.patterns)
        if (pat.var) b2.insert(*pat.var);
      free_names_rec(r.body, std::move(b2), out);
    }
    free_names_rec(d->main, std::move(defined), out);
    return;
  }
}

}  // namespace

std::set<Name> free_names(const NodePtr& n) {
  std::set<Name> out;
  free_names_rec(n, {}, out);
  return out;
}

std::set<Name> free_names(const Term& t) { return free_names(t.root); }

std::set<Name> all_names(const NodePtr& n) {
  std::set<Name> out;
  if (!n) return out;
  if (auto* p = n->get<Par>()) {
    for (auto& c : p->parts) { auto s = all_names(c); out.insert(s.begin(), s.end()); }
  } else if (auto* r = n->get<Nu>()) {
    out.insert(r->name);
    auto s = all_names(r->body); out.insert(s.begin(), s.end());
  } else if (auto* b = n->get<Bang>()) {
    out = all_names(b->body);
  } else if (auto* a = n->get<Amb>()) {
    out.insert(a->name);
    auto s = all_names(a->body); out.insert(s.begin(), s.end());
  } else if (auto* p = n->get<Prefix>()) {
    out.insert(p->name);
    auto s = all_names(p->cont); out.insert(s.begin(), s.end());
  } else if (auto* s = n->get<Sum>()) {
    for (auto& br : s->branches) {
      if (br.kind != GuardKind::Tau) out.insert(br.chan);
      if (br.obj) out.insert(*br.obj);
      auto ss = all_names(br.cont); out.insert(ss.begin(), ss.end());
    }
  } else if (auto* m = n->get<Msg>()) {
    out.insert(m->chan);
    if (m->obj) out.insert(*m->obj);
  } else if (auto* d = n->get<JDef>()) {
    for (auto& r : d->rules) {
      for (auto& pat : r.patterns) {
        out.insert(pat.chan);
        if (pat.var) out.insert(*pat.var);
      }
      auto s = all_names(r.body); out.insert(s.begin(), s.end());
    }
    auto s = all_names(d->main); out.insert(s.begin(), s.end());
  }
  return out;
}

Name fresh_name(const Name& n, const std::set<Name>& used) {
  Name cand = n;
  cand.fresh = std::max(1, n.fresh + 1);
  while (used.count(cand)) ++cand.fresh;
  return cand;
}

// --- alpha-invariant comparison ----------------------------------------

namespace {

using Env = BinderEnv;

int cmp3(int a, int b) { return a < b ? -1 : a > b ? 1 : 0; }

int cmp_name(const Name& a, const Env& ea, const Name& b, const Env& eb) {
  auto ia = ea.idx.find(a);
  auto ib = eb.idx.find(b);
  bool ba = ia != ea.idx.end(), bb = ib != eb.idx.end();
  if (ba != bb) return ba ? -1 : 1;
  if (ba) return cmp3(ia->second, ib->second);
  if (auto c = a <=> b; c != 0) return c < 0 ? -1 : 1;
  return 0;
}

int cmp_label(const Label& a, const Label& b) {
  if (auto c = a <=> b; c != 0) return c < 0 ? -1 : 1;
  return 0;
}

int node_rank(const NodePtr& n) { return static_cast<int>(n->v.index()); }

int cmp_rec(const NodePtr& a, const Env& ea, const NodePtr& b, const Env& eb, bool wl);

int cmp_opt_name(const std::optional<Name>& a, const Env& ea,
                 const std::optional<Name>& b, const Env& eb) {
  if (a.has_value() != b.has_value()) return a.has_value() ? 1 : -1;
  if (!a) return 0;
  return cmp_name(*a, ea, *b, eb);
}

int cmp_rec(const NodePtr& a, const Env& ea, const NodePtr& b, const Env& eb, bool wl) {
  if (int c = cmp3(node_rank(a), node_rank(b))) return c;
  if (a->is<Nil>() || a->is<Ok>()) return 0;
  if (auto* pa = a->get<Par>()) {
    auto* pb = b->get<Par>();
    if (int c = cmp3((int)pa->parts.size(), (int)pb->parts.size())) return c;
    for (size_t i = 0; i < pa->parts.size(); ++i)
      if (int c = cmp_rec(pa->parts[i], ea, pb->parts[i], eb, wl)) return c;
    return 0;
  }
  if (auto* ra = a->get<Nu>()) {
    auto* rb = b->get<Nu>();
    return cmp_rec(ra->body, ea.bind(ra->name), rb->body, eb.bind(rb->name), wl);
  }
  if (auto* ba = a->get<Bang>()) {
    auto* bb = b->get<Bang>();
    if (wl) if (int c = cmp_label(ba->label, bb->label)) return c;
    return cmp_rec(ba->body, ea, bb->body, eb, wl);
  }
  if (auto* aa = a->get<Amb>()) {
    auto* ab = b->get<Amb>();
    if (int c = cmp_name(aa->name, ea, ab->name, eb)) return c;
    if (wl) if (int c = cmp_label(aa->label, ab->label)) return c;
    return cmp_rec(aa->body, ea, ab->body, eb, wl);
  }
  if (auto* pa = a->get<Prefix>()) {
    auto* pb = b->get<Prefix>();
    if (int c = cmp3((int)pa->cap, (int)pb->cap)) return c;
    if (int c = cmp_name(pa->name, ea, pb->name, eb)) return c;
    if (wl) if (int c = cmp_label(pa->label, pb->label)) return c;
    return cmp_rec(pa->cont, ea, pb->cont, eb, wl);
  }
  if (auto* sa = a->get<Sum>()) {
    auto* sb = b->get<Sum>();
    if (int c = cmp3((int)sa->branches.size(), (int)sb->branches.size())) return c;
    if (wl) if (int c = cmp_label(sa->label, sb->label)) return c;
    for (size_t i = 0; i < sa->branches.size(); ++i) {
      auto& x = sa->branches[i];
      auto& y = sb->branches[i];
      if (int c = cmp3((int)x.kind, (int)y.kind)) return c;
      if (x.kind != GuardKind::Tau)
        if (int c = cmp_name(x.chan, ea, y.chan, eb)) return c;
      Env ex = ea, ey = eb;
      if (x.kind == GuardKind::Input) {
        if (x.obj.has_value() != y.obj.has_value()) return x.obj ? 1 : -1;
        if (x.obj) { ex = ea.bind(*x.obj); ey = eb.bind(*y.obj); }
      } else if (x.kind == GuardKind::Output) {
        if (int c = cmp_opt_name(x.obj, ea, y.obj, eb)) return c;
      }
      if (int c = cmp_rec(x.cont, ex, y.cont, ey, wl)) return c;
    }
    return 0;
  }
  if (auto* ma = a->get<Msg>()) {
    auto* mb = b->get<Msg>();
    if (int c = cmp_name(ma->chan, ea, mb->chan, eb)) return c;
    if (wl) if (int c = cmp_label(ma->label, mb->label)) return c;
    return cmp_opt_name(ma->obj, ea, mb->obj, eb);
  }
  if (auto* da = a->get<JDef>()) {
    auto* db = b->get<JDef>();
    if (int c = cmp3((int)da->rules.size(), (int)db->rules.size())) return c;
    if (wl) if (int c = cmp_label(da->label, db->label)) return c;
    Env dea = ea, deb = eb;
    for (auto& r : da->rules)
      for (auto& p : r.patterns) dea = dea.bind(p.chan);
    for (auto& r : db->rules)
      for (auto& p : r.patterns) deb = deb.bind(p.chan);
    for (size_t i = 0; i < da->rules.size(); ++i) {
      auto& x = da->rules[i];
      auto& y = db->rules[i];
      if (int c = cmp3((int)x.patterns.size(), (int)y.patterns.size())) return c;
      Env bx = dea, by = deb;
      for (size_t j = 0; j < x.patterns.size(); ++j) {
        if (int c = cmp_name(x.patterns[j].chan, dea, y.patterns[j].chan, deb)) return c;
        if (x.patterns[j].var.has_value() != y.patterns[j].var.has_value())
          return x.patterns[j].var ? 1 : -1;
        if (wl) if (int c = cmp_label(x.patterns[j].label, y.patterns[j].label)) return c;
        if (x.patterns[j].var) {
          bx = bx.bind(*x.patterns[j].var);
          by = by.bind(*y.patterns[j].var);
        }
      }
      if (int c = cmp_rec(x.body, bx, y.body, by, wl)) return c;
    }
    return cmp_rec(da->main, dea, db->main, deb, wl);
  }
  return 0;
}

}  // namespace

int compare_nodes(const NodePtr& a, const NodePtr& b, bool with_labels,
                  const BinderEnv& ea, const BinderEnv& eb) {
  return cmp_rec(a, ea, b, eb, with_labels);
}

bool alpha_eq_nodes(const NodePtr& a, const NodePtr& b) {
  return compare_nodes(a, b, false) == 0;
}

bool alpha_eq(const Term& t1, const Term& t2) {
  if (t1.cal != t2.cal) throw CalculusMismatch{};
  return alpha_eq_nodes(t1.root, t2.root);
}

// --- substitution ------------------------------------------------------

namespace {

using Mapping = std::map<Name, Name>;

Name apply_map(const Name& n, const Mapping& m) {
  auto it = m.find(n);
  return it == m.end() ? n : it->second;
}

NodePtr subst_rec(const NodePtr& n, Mapping m, std::set<Name>& avoid);

// Renames binder `bn` if it would capture a substituted name or is itself
// in the mapping's domain. Returns the (possibly renamed) binder and the
// mapping to use inside its scope.
std::pair<Name, Mapping> enter_binder(const Name& bn, Mapping m, std::set<Name>& avoid) {
  m.erase(bn);
  bool capture = false;
  for (auto& [from, to] : m)
    if (to == bn) { capture = true; break; }
  if (!capture) {
    avoid.insert(bn);
    return {bn, std::move(m)};
  }
  Name nb = fresh_name(bn, avoid);
  avoid.insert(nb);
  m[bn] = nb;
  return {nb, std::move(m)};
}

NodePtr subst_rec(const NodePtr& n, Mapping m, std::set<Name>& avoid) {
  if (n->is<Nil>()) return nil();
  if (n->is<Ok>()) return ok();
  if (auto* p = n->get<Par>()) {
    std::vector<NodePtr> parts;
    for (auto& c : p->parts) parts.push_back(subst_rec(c, m, avoid));
    return par(std::move(parts));
  }
  if (auto* r = n->get<Nu>()) {
    auto [bn, m2] = enter_binder(r->name, m, avoid);
    return nu(bn, subst_rec(r->body, std::move(m2), avoid));
  }
  if (auto* b = n->get<Bang>()) return bang(subst_rec(b->body, m, avoid), b->label);
  if (auto* a = n->get<Amb>())
    return amb(apply_map(a->name, m), subst_rec(a->body, m, avoid), a->label);
  if (auto* p = n->get<Prefix>())
    return prefix(p->cap, apply_map(p->name, m), subst_rec(p->cont, m, avoid), p->label);
  if (auto* s = n->get<Sum>()) {
    std::vector<Branch> bs;
    for (auto& br : s->branches) {
      Branch nb = br;
      if (br.kind != GuardKind::Tau) nb.chan = apply_map(br.chan, m);
      if (br.kind == GuardKind::Output && br.obj) nb.obj = apply_map(*br.obj, m);
      if (br.kind == GuardKind::Input && br.obj) {
        auto [bn, m2] = enter_binder(*br.obj, m, avoid);
        nb.obj = bn;
        nb.cont = subst_rec(br.cont, std::move(m2), avoid);
      } else {
        nb.cont = subst_rec(br.cont, m, avoid);
      }
      bs.push_back(std::move(nb));
    }
    return sum(std::move(bs), s->label);
  }
  if (auto* mg = n->get<Msg>()) {
    std::optional<Name> obj = mg->obj;
    if (obj) obj = apply_map(*obj, m);
    return msg(apply_map(mg->chan, m), obj, mg->label);
  }
  if (auto* d = n->get<JDef>()) {
    // Defined variables bind jointly over main and all rule bodies; rename
    // them together when needed.
    Mapping md = m;
    std::set<Name> defined;
    for (auto& r : d->rules)
      for (auto& pat : r.patterns) defined.insert(pat.chan);
    std::map<Name, Name> ren;
    for (auto& dn : defined) {
      auto [bn, m2] = enter_binder(dn, md, avoid);
      md = std::move(m2);
      if (bn != dn) ren[dn] = bn;
    }
    std::vector<JRule> rules;
    for (auto& r : d->rules) {
      JRule nr;
      Mapping mb = md;
      for (auto& pat : r.patterns) {
        JPattern np = pat;
        auto it = ren.find(pat.chan);
        if (it != ren.end()) np.chan = it->second;
        if (pat.var) {
          auto [bv, m2] = enter_binder(*pat.var, mb, avoid);
          np.var = bv;
          mb = std::move(m2);
        }
        nr.patterns.push_back(std::move(np));
      }
      nr.body = subst_rec(r.body, mb, avoid);
      rules.push_back(std::move(nr));
    }
    return jdef(std::move(rules), subst_rec(d->main, md, avoid), d->label);
  }
  assert(false);
  return n;
}

}  // namespace

NodePtr substitute(const NodePtr& n, const std::map<Name, Name>& mapping) {
  std::set<Name> avoid = all_names(n);
  for (auto& [a, b] : mapping) { avoid.insert(a); avoid.insert(b); }
  return subst_rec(n, mapping, avoid);
}

Term substitute(const Term& t, const std::map<Name, Name>& mapping) {
  return {t.cal, substitute(t.root, mapping)};
}

// --- labelling ---------------------------------------------------------

namespace {

NodePtr relabel_rec(const NodePtr& n, int& next) {
  if (n->is<Nil>() || n->is<Ok>()) return n;
  if (auto* p = n->get<Par>()) {
    std::vector<NodePtr> parts;
    for (auto& c : p->parts) parts.push_back(relabel_rec(c, next));
    return par(std::move(parts));
  }
  if (auto* r = n->get<Nu>()) return nu(r->name, relabel_rec(r->body, next));
  if (auto* b = n->get<Bang>()) {
    Label l{next++, {}};
    return bang(relabel_rec(b->body, next), l);
  }
  if (auto* a = n->get<Amb>()) {
    Label l{next++, {}};
    return amb(a->name, relabel_rec(a->body, next), l);
  }
  if (auto* p = n->get<Prefix>()) {
    Label l{next++, {}};
    return prefix(p->cap, p->name, relabel_rec(p->cont, next), l);
  }
  if (auto* s = n->get<Sum>()) {
    Label l{next++, {}};
    std::vector<Branch> bs;
    for (auto& br : s->branches) {
      Branch nb = br;
      nb.cont = relabel_rec(br.cont, next);
      bs.push_back(std::move(nb));
    }
    return sum(std::move(bs), l);
  }
  if (auto* m = n->get<Msg>()) return msg(m->chan, m->obj, Label{next++, {}});
  if (auto* d = n->get<JDef>()) {
    Label l{next++, {}};
    std::vector<JRule> rules;
    for (auto& r : d->rules) {
      JRule nr;
      for (auto& pat : r.patterns) {
        JPattern np = pat;
        np.label = Label{next++, {}};
        nr.patterns.push_back(std::move(np));
      }
      nr.body = relabel_rec(r.body, next);
      rules.push_back(std::move(nr));
    }
    return jdef(std::move(rules), relabel_rec(d->main, next), l);
  }
  assert(false);
  return n;
}

}  // namespace

Term assign_labels(const Term& t) {
  int next = 0;
  return {t.cal, relabel_rec(t.root, next)};
}

// --- subterms, success, labels -----------------------------------------

namespace {

void subterms_rec(const NodePtr& n, std::vector<NodePtr>& out) {
  out.push_back(n);
  if (auto* p = n->get<Par>()) {
    for (auto& c : p->parts) subterms_rec(c, out);
  } else if (auto* r = n->get<Nu>()) {
    subterms_rec(r->body, out);
  } else if (auto* b = n->get<Bang>()) {
    subterms_rec(b->body, out);
  } else if (auto* a = n->get<Amb>()) {
    subterms_rec(a->body, out);
  } else if (auto* p = n->get<Prefix>()) {
    subterms_rec(p->cont, out);
  } else if (auto* s = n->get<Sum>()) {
    for (auto& br : s->branches) subterms_rec(br.cont, out);
  } else if (auto* d = n->get<JDef>()) {
    for (auto& r : d->rules) subterms_rec(r.body, out);
    subterms_rec(d->main, out);
  }
}

}  // namespace

std::vector<Term> subterms(const Term& t) {
  std::vector<NodePtr> nodes;
  subterms_rec(t.root, nodes);
  // Set semantics up to alpha-equivalence.
  std::vector<Term> out;
  for (auto& n : nodes) {
    bool dup = false;
    for (auto& o : out)
      if (alpha_eq_nodes(o.root, n)) { dup = true; break; }
    if (!dup) out.push_back({t.cal, n});
  }
  return out;
}

bool has_success(const NodePtr& n) {
  if (n->is<Ok>()) return true;
  if (auto* p = n->get<Par>()) {
    for (auto& c : p->parts)
      if (has_success(c)) return true;
    return false;
  }
  if (auto* r = n->get<Nu>()) return has_success(r->body);
  if (auto* b = n->get<Bang>()) return has_success(b->body);
  if (auto* a = n->get<Amb>()) return has_success(a->body);
  // Prefixes, sums and definition rule bodies guard; a definition's main
  // process is unguarded.
  if (auto* d = n->get<JDef>()) return has_success(d->main);
  return false;
}

bool has_success(const Term& t) { return has_success(t.root); }

void collect_labels(const NodePtr& n, std::vector<std::pair<Label, CapKind>>& out) {
  if (auto* p = n->get<Par>()) {
    for (auto& c : p->parts) collect_labels(c, out);
  } else if (auto* r = n->get<Nu>()) {
    collect_labels(r->body, out);
  } else if (auto* b = n->get<Bang>()) {
    out.emplace_back(b->label, CapKind::Replication);
    collect_labels(b->body, out);
  } else if (auto* a = n->get<Amb>()) {
    out.emplace_back(a->label, CapKind::Ambient);
    collect_labels(a->body, out);
  } else if (auto* p = n->get<Prefix>()) {
    out.emplace_back(p->label, p->cap);
    collect_labels(p->cont, out);
  } else if (auto* s = n->get<Sum>()) {
    CapKind k = CapKind::Sum;
    if (s->branches.size() == 1) {
      if (s->branches[0].kind == GuardKind::Tau) k = CapKind::Tau;
      else if (s->branches[0].kind == GuardKind::Input) k = CapKind::InputPrefix;
    }
    out.emplace_back(s->label, k);
    for (auto& br : s->branches) collect_labels(br.cont, out);
  } else if (auto* m = n->get<Msg>()) {
    out.emplace_back(m->label, CapKind::JoinMessage);
  } else if (auto* d = n->get<JDef>()) {
    out.emplace_back(d->label, CapKind::JoinDefinition);
    for (auto& r : d->rules) {
      for (auto& pat : r.patterns) out.emplace_back(pat.label, CapKind::JoinDefinition);
      collect_labels(r.body, out);
    }
    collect_labels(d->main, out);
  }
}

std::vector<std::pair<Label, CapKind>> labels_of(const Term& t) {
  std::vector<std::pair<Label, CapKind>> out;
  collect_labels(t.root, out);
  return out;
}

NodePtr extend_copy_paths(const NodePtr& n, int idx) {
  auto ext = [&](Label l) {
    if (l.valid()) l.path.push_back(idx);
    return l;
  };
  if (n->is<Nil>() || n->is<Ok>()) return n;
  if (auto* p = n->get<Par>()) {
    std::vector<NodePtr> parts;
    for (auto& c : p->parts) parts.push_back(extend_copy_paths(c, idx));
    return mk(Node{Par{std::move(parts)}});
  }
  if (auto* r = n->get<Nu>()) return nu(r->name, extend_copy_paths(r->body, idx));
  if (auto* b = n->get<Bang>()) return bang(extend_copy_paths(b->body, idx), ext(b->label));
  if (auto* a = n->get<Amb>()) return amb(a->name, extend_copy_paths(a->body, idx), ext(a->label));
  if (auto* p = n->get<Prefix>())
    return prefix(p->cap, p->name, extend_copy_paths(p->cont, idx), ext(p->label));
  if (auto* s = n->get<Sum>()) {
    std::vector<Branch> bs;
    for (const Branch& br : s->branches)
      bs.push_back(Branch{br.kind, br.chan, br.obj, extend_copy_paths(br.cont, idx)});
    return sum(std::move(bs), ext(s->label));
  }
  if (auto* m = n->get<Msg>()) return msg(m->chan, m->obj, ext(m->label));
  const JDef* d = n->get<JDef>();
  std::vector<JRule> rs;
  for (const JRule& r : d->rules) {
    JRule nr;
    for (const JPattern& pt : r.patterns)
      nr.patterns.push_back(JPattern{pt.chan, pt.var, ext(pt.label)});
    nr.body = extend_copy_paths(r.body, idx);
    rs.push_back(std::move(nr));
  }
  return jdef(std::move(rs), extend_copy_paths(d->main, idx), ext(d->label));
}

// --- grammar checks ----------------------------------------------------

namespace {

std::optional<std::string> check_rec(const NodePtr& n, Calculus cal) {
  bool is_pi = cal == Calculus::PiMix || cal == Calculus::PiSep || cal == Calculus::PiAsyn;
  if (n->is<Nil>() || n->is<Ok>()) return std::nullopt;
  if (auto* p = n->get<Par>()) {
    for (auto& c : p->parts)
      if (auto e = check_rec(c, cal)) return e;
    return std::nullopt;
  }
  if (auto* r = n->get<Nu>()) {
    if (cal == Calculus::Join) return "restriction is not part of the join grammar";
    return check_rec(r->body, cal);
  }
  if (auto* b = n->get<Bang>()) {
    if (cal == Calculus::Join) return "replication is not part of the join grammar";
    return check_rec(b->body, cal);
  }
  if (auto* a = n->get<Amb>()) {
    if (cal != Calculus::MA && cal != Calculus::SA) return "ambient outside ma/sa";
    return check_rec(a->body, cal);
  }
  if (auto* p = n->get<Prefix>()) {
    if (cal != Calculus::MA && cal != Calculus::SA) return "action prefix outside ma/sa";
    bool co = p->cap == CapKind::CoIn || p->cap == CapKind::CoOut || p->cap == CapKind::CoOpen;
    if (co && cal != Calculus::SA) return "co-action outside sa";
    return check_rec(p->cont, cal);
  }
  if (auto* s = n->get<Sum>()) {
    if (!is_pi) return "choice/prefix outside pi";
    if (s->branches.empty()) return "empty sum";
    if (cal == Calculus::PiAsyn) {
      if (s->branches.size() > 1) return "choice in pi-asyn";
      if (s->branches[0].kind == GuardKind::Output)
        return "output with continuation in pi-asyn";
    }
    if (cal == Calculus::PiSep) {
      bool any_in = false, any_out = false;
      for (auto& br : s->branches) {
        any_in |= br.kind == GuardKind::Input;
        any_out |= br.kind == GuardKind::Output;
      }
      if (any_in && any_out) return "mixed sum in pi-sep";
    }
    for (auto& br : s->branches)
      if (auto e = check_rec(br.cont, cal)) return e;
    return std::nullopt;
  }
  if (n->get<Msg>()) {
    if (cal != Calculus::PiAsyn && cal != Calculus::Join)
      return "atomic output outside pi-asyn/join";
    return std::nullopt;
  }
  if (auto* d = n->get<JDef>()) {
    if (cal != Calculus::Join) return "definition outside join";
    if (d->rules.empty()) return "empty definition";
    for (auto& r : d->rules) {
      if (r.patterns.empty()) return "empty join pattern";
      if (auto e = check_rec(r.body, cal)) return e;
    }
    return check_rec(d->main, cal);
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> grammar_violation(const Term& t) {
  return check_rec(t.root, t.cal);
}

}  // namespace syncpat
