#include "syncpat/patterns.hpp"

#include <algorithm>
#include <functional>

#include "syncpat/congruence.hpp"

namespace syncpat {

namespace {

// Residual distinctness is label-aware: alternative pairings of identical
// senders and receivers leave congruent leftovers that differ only in which
// occurrences survived.
bool distinct_residuals(const Step& a, const Step& b) {
  return compare_nodes(a.residual.root, b.residual.root, true) != 0;
}

struct PairMatrix {
  std::vector<PairRelation> cells;
  size_t n;

  PairMatrix(const Term& t, const StepSet& ss) : n(ss.steps.size()) {
    cells.resize(n * n);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j) {
        cells[i * n + j] = classify_pair(t, ss.steps[i], ss.steps[j]);
        cells[j * n + i] = cells[i * n + j];
      }
  }
  const PairRelation& at(size_t i, size_t j) const { return cells[i * n + j]; }

  bool conflict(size_t i, size_t j, bool allow_asymmetric) const {
    PairKind k = at(i, j).kind;
    return k == PairKind::ConflictSymmetric ||
           (allow_asymmetric && k == PairKind::ConflictAsymmetric);
  }
  bool parallel(size_t i, size_t j) const {
    PairKind k = at(i, j).kind;
    return k == PairKind::ParallelDistributable || k == PairKind::ParallelLocal;
  }
};

}  // namespace

std::vector<MWitness> find_m(const Term& t, bool allow_asymmetric, bool nonlocal_only) {
  StepSet ss = enumerate_steps(t);
  std::vector<MWitness> out;
  if (ss.steps.size() < 3) return out;
  PairMatrix m(t, ss);

  for (size_t b = 0; b < ss.steps.size(); ++b) {
    for (size_t a = 0; a < ss.steps.size(); ++a) {
      if (a == b || !m.conflict(b, a, allow_asymmetric)) continue;
      for (size_t c = a + 1; c < ss.steps.size(); ++c) {
        if (c == b || !m.conflict(b, c, allow_asymmetric)) continue;
        if (!m.parallel(a, c)) continue;
        if (!distinct_residuals(ss.steps[a], ss.steps[b]) ||
            !distinct_residuals(ss.steps[b], ss.steps[c]) ||
            !distinct_residuals(ss.steps[a], ss.steps[c]))
          continue;
        MWitness w;
        w.a = ss.steps[a];
        w.b = ss.steps[b];
        w.c = ss.steps[c];
        w.non_local = m.at(a, c).kind == PairKind::ParallelDistributable;
        if (nonlocal_only && !w.non_local) continue;
        w.conflict_ba_symmetric = m.at(b, a).kind == PairKind::ConflictSymmetric;
        w.conflict_bc_symmetric = m.at(b, c).kind == PairKind::ConflictSymmetric;
        w.b_uses_open =
            ss.steps[b].axiom == Axiom::MaOpen || ss.steps[b].axiom == Axiom::SaOpen;
        out.push_back(std::move(w));
      }
    }
  }
  return out;
}

std::vector<GreatMWitness> find_great_m(const Term& t, bool allow_asymmetric,
                                        bool nonlocal_only) {
  StepSet ss = enumerate_steps(t);
  std::vector<GreatMWitness> out;
  size_t n = ss.steps.size();
  if (n < 5) return out;
  PairMatrix m(t, ss);

  // one witness per 5-subset whose conflict graph is exactly a 5-cycle,
  // reported in a canonical rotation/reflection
  std::vector<size_t> sel;
  std::function<void(size_t)> choose = [&](size_t from) {
    if (sel.size() == 5) {
      for (size_t x = 0; x < 5; ++x)
        for (size_t y = x + 1; y < 5; ++y) {
          bool confl = m.conflict(sel[x], sel[y], allow_asymmetric);
          bool para = m.parallel(sel[x], sel[y]);
          if (!confl && !para) return;  // an unusable asymmetric edge
        }
      // degree two in the conflict graph for every vertex
      std::array<std::vector<size_t>, 5> adj;
      for (size_t x = 0; x < 5; ++x)
        for (size_t y = 0; y < 5; ++y)
          if (x != y && m.conflict(sel[x], sel[y], allow_asymmetric)) adj[x].push_back(y);
      for (auto& a : adj)
        if (a.size() != 2) return;
      // walk the cycle from the smallest vertex toward its smaller neighbour
      std::array<size_t, 5> order{};
      order[0] = 0;
      order[1] = std::min(adj[0][0], adj[0][1]);
      for (int k = 2; k < 5; ++k) {
        auto& nb = adj[order[k - 1]];
        order[k] = nb[0] == order[k - 2] ? nb[1] : nb[0];
      }
      if (order[4] == order[0] || !m.conflict(sel[order[4]], sel[order[0]], allow_asymmetric))
        return;  // two disconnected components instead of one cycle
      for (size_t x = 0; x < 5; ++x)
        for (size_t y = x + 1; y < 5; ++y)
          if (!distinct_residuals(ss.steps[sel[x]], ss.steps[sel[y]])) return;

      GreatMWitness w;
      bool non_local = true;
      for (int k = 0; k < 5; ++k) {
        size_t u = sel[order[k]], v = sel[order[(k + 1) % 5]];
        w.cycle[k] = ss.steps[u];
        w.edge_symmetric[k] = m.at(u, v).kind == PairKind::ConflictSymmetric;
      }
      for (size_t x = 0; x < 5; ++x)
        for (size_t y = x + 1; y < 5; ++y)
          if (m.parallel(sel[x], sel[y]) &&
              m.at(sel[x], sel[y]).kind != PairKind::ParallelDistributable)
            non_local = false;
      w.non_local = non_local;
      if (nonlocal_only && !non_local) return;
      out.push_back(std::move(w));
      return;
    }
    for (size_t i = from; i < n; ++i) {
      sel.push_back(i);
      choose(i + 1);
      sel.pop_back();
    }
  };
  choose(0);
  return out;
}

}  // namespace syncpat
