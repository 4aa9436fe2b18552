#include "syncpat/congruence.hpp"

#include <algorithm>
#include <sstream>

namespace syncpat {
namespace {

// Two-stage order: the congruence class first, labels only as tie-break so
// canonical forms of labelled terms come out deterministic.
int cmp2(const NodePtr& a, const NodePtr& b, const BinderEnv& ea, const BinderEnv& eb) {
  if (int c = compare_nodes(a, b, false, ea, eb)) return c;
  return compare_nodes(a, b, true, ea, eb);
}

constexpr size_t kPermMax = 5;

struct JBlock {
  std::vector<JRule> rules;
  Label label;
  std::vector<Name> defined;
};

struct Canon {
  Calculus cal;
  std::set<Name> global_free;
  std::set<Name> taken;    // every name seen or generated so far
  std::set<Name> emitted;  // binder names already placed in the output
  long budget = 20000;     // candidate orderings tried before falling back

  Canon(Calculus c, std::set<Name> gf, std::set<Name> all)
      : cal(c), global_free(std::move(gf)), taken(std::move(all)) {}

  // Renames a binder apart from free names and previous binders.
  Name hygienic(const Name& b) {
    Name r = b;
    if (global_free.count(r) || emitted.count(r)) {
      r = fresh_name(b, taken);
    }
    taken.insert(r);
    emitted.insert(r);
    return r;
  }

  NodePtr canon(const NodePtr& n, const BinderEnv& env) {
    if (cal == Calculus::Join) return canon_join(n, env);
    return canon_region(n, env);
  }

  // --- pi / ambient calculi -------------------------------------------------

  // Flattens the unguarded structure of n into restriction binders and
  // parallel components, hoisting restrictions out of ambient brackets.
  void collect(const NodePtr& n, std::vector<Name>& binders, std::vector<NodePtr>& comps) {
    if (auto p = n->get<Par>()) {
      for (auto& c : p->parts) collect(c, binders, comps);
      return;
    }
    if (auto u = n->get<Nu>()) {
      Name b = hygienic(u->name);
      NodePtr body = u->body;
      if (!(b == u->name)) body = substitute(body, {{u->name, b}});
      binders.push_back(b);
      collect(body, binders, comps);
      return;
    }
    if (auto a = n->get<Amb>()) {
      std::vector<NodePtr> inner;
      collect(a->body, binders, inner);
      comps.push_back(amb(a->name, par(std::move(inner)), a->label));
      return;
    }
    if (n->is<Nil>()) return;
    comps.push_back(n);
  }

  NodePtr canon_region(const NodePtr& n, const BinderEnv& env) {
    std::vector<Name> binders;
    std::vector<NodePtr> raw;
    collect(n, binders, raw);

    std::set<Name> used;
    for (auto& c : raw) {
      auto f = free_names(c);
      used.insert(f.begin(), f.end());
    }
    std::erase_if(binders, [&](const Name& b) { return !used.count(b); });

    auto build = [&](const std::vector<Name>& order) {
      BinderEnv e = env;
      for (auto& b : order) e = e.bind(b);
      std::vector<NodePtr> comps;
      for (auto& c : raw) {
        NodePtr cc = canon_comp(c, e);
        if (!cc->is<Nil>()) comps.push_back(cc);
      }
      std::stable_sort(comps.begin(), comps.end(),
                       [&](const NodePtr& x, const NodePtr& y) { return cmp2(x, y, e, e) < 0; });
      NodePtr cur = par(std::move(comps));
      for (auto it = order.rbegin(); it != order.rend(); ++it) cur = nu(*it, cur);
      return cur;
    };

    if (binders.size() <= 1 || binders.size() > kPermMax || budget <= 0)
      return build(binders);

    std::vector<Name> ord = binders;
    std::sort(ord.begin(), ord.end());
    NodePtr best;
    do {
      if (--budget < 0) break;
      NodePtr cand = build(ord);
      if (!best || cmp2(cand, best, env, env) < 0) best = cand;
    } while (std::next_permutation(ord.begin(), ord.end()));
    return best ? best : build(binders);
  }

  NodePtr canon_comp(const NodePtr& n, const BinderEnv& env) {
    if (auto a = n->get<Amb>())
      return amb(a->name, canon(a->body, env), a->label);
    if (auto b = n->get<Bang>()) {
      NodePtr body = canon(b->body, env);
      if (body->is<Nil>()) return nil();
      return bang(body, b->label);
    }
    if (auto p = n->get<Prefix>())
      return prefix(p->cap, p->name, canon(p->cont, env), p->label);
    if (auto s = n->get<Sum>()) {
      std::vector<Branch> bs;
      for (const Branch& br : s->branches) {
        Branch nb = br;
        BinderEnv e = env;
        if (nb.kind == GuardKind::Input && nb.obj) {
          Name v = hygienic(*nb.obj);
          if (!(v == *nb.obj)) nb.cont = substitute(nb.cont, {{*nb.obj, v}});
          nb.obj = v;
          e = e.bind(v);
        }
        nb.cont = canon(nb.cont, e);
        bs.push_back(std::move(nb));
      }
      return sum(std::move(bs), s->label);
    }
    return n;  // Nil, Ok, Msg
  }

  // --- join calculus --------------------------------------------------------

  void collect_join(const NodePtr& n, std::vector<JBlock>& blocks, std::vector<NodePtr>& mols) {
    if (auto p = n->get<Par>()) {
      for (auto& c : p->parts) collect_join(c, blocks, mols);
      return;
    }
    if (auto d = n->get<JDef>()) {
      JBlock blk;
      blk.label = d->label;
      std::map<Name, Name> ren;
      for (const JRule& r : d->rules)
        for (const JPattern& pt : r.patterns)
          if (!ren.count(pt.chan)) {
            Name nd = hygienic(pt.chan);
            ren.emplace(pt.chan, nd);
            blk.defined.push_back(nd);
          }
      bool renamed = false;
      for (auto& [from, to] : ren)
        if (!(from == to)) renamed = true;
      NodePtr main = d->main;
      for (const JRule& r : d->rules) {
        JRule nr;
        for (const JPattern& pt : r.patterns) {
          JPattern np = pt;
          np.chan = ren.at(pt.chan);
          nr.patterns.push_back(np);
        }
        // received variables shadow defined channels inside the body
        std::map<Name, Name> rren = ren;
        for (const JPattern& pt : r.patterns)
          if (pt.var) rren.erase(*pt.var);
        nr.body = renamed && !rren.empty() ? substitute(r.body, rren) : r.body;
        // received variables bind only in the rule body; rename them apart
        for (JPattern& pt : nr.patterns) {
          if (!pt.var) continue;
          Name v = hygienic(*pt.var);
          if (!(v == *pt.var)) nr.body = substitute(nr.body, {{*pt.var, v}});
          pt.var = v;
        }
        blk.rules.push_back(std::move(nr));
      }
      if (renamed) main = substitute(main, ren);
      blocks.push_back(std::move(blk));
      collect_join(main, blocks, mols);
      return;
    }
    if (n->is<Nil>()) return;
    mols.push_back(n);
  }

  NodePtr canon_join(const NodePtr& n, const BinderEnv& env) {
    std::vector<JBlock> blocks;
    std::vector<NodePtr> mols;
    collect_join(n, blocks, mols);
    const size_t nb = blocks.size();

    // block j must stay under block i when its rule bodies use i's names
    std::vector<std::set<Name>> body_free(nb);
    for (size_t j = 0; j < nb; ++j)
      for (const JRule& r : blocks[j].rules) {
        auto f = free_names(r.body);
        body_free[j].insert(f.begin(), f.end());
      }
    auto depends = [&](size_t j, size_t i) {  // j needs i in scope
      for (const Name& d : blocks[i].defined)
        if (body_free[j].count(d)) return true;
      return false;
    };

    auto build = [&](const std::vector<size_t>& border,
                     const std::vector<std::vector<size_t>>& rorder) {
      BinderEnv e = env;
      for (size_t bi : border) {
        std::set<Name> seen;
        for (size_t ri : rorder[bi])
          for (const JPattern& pt : blocks[bi].rules[ri].patterns)
            if (seen.insert(pt.chan).second) e = e.bind(pt.chan);
      }
      std::vector<NodePtr> ms = mols;
      std::stable_sort(ms.begin(), ms.end(),
                       [&](const NodePtr& x, const NodePtr& y) { return cmp2(x, y, e, e) < 0; });
      NodePtr cur = par(std::move(ms));
      for (auto it = border.rbegin(); it != border.rend(); ++it) {
        std::vector<JRule> rs;
        for (size_t ri : rorder[*it]) {
          JRule r = blocks[*it].rules[ri];
          BinderEnv re = e;
          for (const JPattern& pt : r.patterns)
            if (pt.var) re = re.bind(*pt.var);
          r.body = canon(r.body, re);
          rs.push_back(std::move(r));
        }
        cur = jdef(std::move(rs), cur, blocks[*it].label);
      }
      return cur;
    };

    std::vector<size_t> border(nb);
    std::vector<std::vector<size_t>> rorder(nb);
    for (size_t i = 0; i < nb; ++i) {
      border[i] = i;
      rorder[i].resize(blocks[i].rules.size());
      for (size_t r = 0; r < rorder[i].size(); ++r) rorder[i][r] = r;
    }
    if (nb == 0) {
      BinderEnv e = env;
      std::vector<NodePtr> ms = mols;
      std::stable_sort(ms.begin(), ms.end(),
                       [&](const NodePtr& x, const NodePtr& y) { return cmp2(x, y, e, e) < 0; });
      return par(std::move(ms));
    }

    bool small = nb <= kPermMax && budget > 0;
    for (size_t i = 0; small && i < nb; ++i)
      if (rorder[i].size() > 4) small = false;
    if (!small) return build(border, rorder);

    NodePtr best;
    std::vector<size_t> bord = border;
    do {
      bool valid = true;
      for (size_t a = 0; valid && a < nb; ++a)
        for (size_t b = a + 1; valid && b < nb; ++b)
          if (depends(bord[a], bord[b])) valid = false;  // a's bodies need b below it
      if (!valid) continue;
      // odometer over rule orderings of every block
      std::vector<std::vector<size_t>> ro = rorder;
      for (auto& v : ro) std::sort(v.begin(), v.end());
      while (true) {
        if (--budget < 0) break;
        NodePtr cand = build(bord, ro);
        if (!best || cmp2(cand, best, env, env) < 0) best = cand;
        size_t k = 0;
        while (k < nb && !std::next_permutation(ro[k].begin(), ro[k].end())) ++k;
        if (k == nb) break;
      }
      if (budget < 0) break;
    } while (std::next_permutation(bord.begin(), bord.end()));
    return best ? best : build(border, rorder);
  }
};

// --- label stripping --------------------------------------------------------

NodePtr strip_rec(const NodePtr& n) {
  if (n->is<Nil>() || n->is<Ok>()) return n;
  if (auto p = n->get<Par>()) {
    std::vector<NodePtr> parts;
    for (auto& c : p->parts) parts.push_back(strip_rec(c));
    return mk(Node{Par{std::move(parts)}});
  }
  if (auto u = n->get<Nu>()) return nu(u->name, strip_rec(u->body));
  if (auto b = n->get<Bang>()) return bang(strip_rec(b->body));
  if (auto a = n->get<Amb>()) return amb(a->name, strip_rec(a->body));
  if (auto p = n->get<Prefix>()) return prefix(p->cap, p->name, strip_rec(p->cont));
  if (auto s = n->get<Sum>()) {
    std::vector<Branch> bs;
    for (const Branch& br : s->branches)
      bs.push_back(Branch{br.kind, br.chan, br.obj, strip_rec(br.cont)});
    return sum(std::move(bs));
  }
  if (auto m = n->get<Msg>()) return msg(m->chan, m->obj);
  const JDef* d = n->get<JDef>();
  std::vector<JRule> rs;
  for (const JRule& r : d->rules) {
    JRule nr;
    for (const JPattern& pt : r.patterns) nr.patterns.push_back(JPattern{pt.chan, pt.var, {}});
    nr.body = strip_rec(r.body);
    rs.push_back(std::move(nr));
  }
  return jdef(std::move(rs), strip_rec(d->main));
}

// --- positional serialisation -----------------------------------------------

std::string nm(const Name& n, const BinderEnv& env) {
  auto it = env.idx.find(n);
  if (it != env.idx.end()) return "#" + std::to_string(it->second);
  return n.str();
}

void ser(const NodePtr& n, const BinderEnv& env, std::string& out) {
  if (n->is<Nil>()) { out += "0"; return; }
  if (n->is<Ok>()) { out += "ok"; return; }
  if (auto p = n->get<Par>()) {
    out += "(";
    for (size_t i = 0; i < p->parts.size(); ++i) {
      if (i) out += "|";
      ser(p->parts[i], env, out);
    }
    out += ")";
    return;
  }
  if (auto u = n->get<Nu>()) {
    out += "nu.";
    ser(u->body, env.bind(u->name), out);
    return;
  }
  if (auto b = n->get<Bang>()) {
    out += "!";
    ser(b->body, env, out);
    return;
  }
  if (auto a = n->get<Amb>()) {
    out += nm(a->name, env) + "[";
    ser(a->body, env, out);
    out += "]";
    return;
  }
  if (auto p = n->get<Prefix>()) {
    out += std::string(cap_kind_id(p->cap)) + " " + nm(p->name, env) + ".";
    ser(p->cont, env, out);
    return;
  }
  if (auto s = n->get<Sum>()) {
    out += "(";
    for (size_t i = 0; i < s->branches.size(); ++i) {
      const Branch& br = s->branches[i];
      if (i) out += "+";
      switch (br.kind) {
        case GuardKind::Output:
          out += nm(br.chan, env) + "!<" + (br.obj ? nm(*br.obj, env) : "") + ">.";
          ser(br.cont, env, out);
          break;
        case GuardKind::Input: {
          out += nm(br.chan, env) + "?.";
          ser(br.cont, br.obj ? env.bind(*br.obj) : env, out);
          break;
        }
        case GuardKind::Tau:
          out += "tau.";
          ser(br.cont, env, out);
          break;
      }
    }
    out += ")";
    return;
  }
  if (auto m = n->get<Msg>()) {
    out += nm(m->chan, env) + "<" + (m->obj ? nm(*m->obj, env) : "") + ">";
    return;
  }
  const JDef* d = n->get<JDef>();
  BinderEnv e = env;
  std::set<Name> seen;
  for (const JRule& r : d->rules)
    for (const JPattern& pt : r.patterns)
      if (seen.insert(pt.chan).second) e = e.bind(pt.chan);
  out += "def{";
  for (size_t ri = 0; ri < d->rules.size(); ++ri) {
    if (ri) out += " and ";
    const JRule& r = d->rules[ri];
    BinderEnv re = e;
    for (size_t pi = 0; pi < r.patterns.size(); ++pi) {
      if (pi) out += "|";
      const JPattern& pt = r.patterns[pi];
      out += nm(pt.chan, e) + (pt.var ? "<.>" : "<>");
      if (pt.var) re = re.bind(*pt.var);
    }
    out += "|>";
    ser(r.body, re, out);
  }
  out += "}in ";
  ser(d->main, e, out);
}

}  // namespace

Term canonicalize(const Term& t) {
  Canon c(t.cal, free_names(t.root), all_names(t.root));
  return Term{t.cal, c.canon(t.root, {})};
}

bool congruent(const Term& a, const Term& b) {
  if (a.cal != b.cal) throw CalculusMismatch();
  return compare_nodes(canonicalize(a).root, canonicalize(b).root, false) == 0;
}

bool congruent_labelled(const Term& a, const Term& b) {
  if (a.cal != b.cal) throw CalculusMismatch();
  return compare_nodes(canonicalize(a).root, canonicalize(b).root, true) == 0;
}

NodePtr strip_labels(const NodePtr& n) { return strip_rec(n); }

Term strip_labels(const Term& t) { return Term{t.cal, strip_rec(t.root)}; }

std::string state_key(const Term& t) {
  Term c = canonicalize(t);
  std::string out = std::string(calculus_id(t.cal)) + ":";
  ser(strip_rec(c.root), {}, out);
  return out;
}

}  // namespace syncpat
