#pragma once

#include <array>

#include "syncpat/analysis.hpp"

namespace syncpat {

/// Pattern M: three alternative steps a, b, c with pairwise different
/// residuals, a parallel to c, and b in conflict with both.
struct MWitness {
  Step a, b, c;
  bool non_local = false;        // a, c are distributable
  bool conflict_ba_symmetric = false;
  bool conflict_bc_symmetric = false;
  bool b_uses_open = false;      // b's axiom is an open
};

std::vector<MWitness> find_m(const Term& t, bool allow_asymmetric = false,
                             bool nonlocal_only = false);

/// Pattern sync-star: five alternative steps in an odd conflict cycle where
/// every non-adjacent pair is parallel.
struct GreatMWitness {
  std::array<Step, 5> cycle;
  std::array<bool, 5> edge_symmetric{};  // conflict cycle[i] vs cycle[(i+1)%5]
  bool non_local = false;                // all parallel pairs distributable
};

std::vector<GreatMWitness> find_great_m(const Term& t, bool allow_asymmetric = false,
                                        bool nonlocal_only = false);

}  // namespace syncpat
