#pragma once

#include "syncpat/term.hpp"

namespace syncpat {

/// Canonical representative of the structural congruence class. Parallel
/// compositions are flattened and sorted, inert subterms (0, !0, unused
/// restrictions) are removed, restrictions are pulled outward as far as the
/// congruence allows (including out of ambient brackets), restriction order
/// is normalised, and join terms are heated into definition blocks plus
/// message molecules and re-cooled deterministically. Bound names are
/// renamed apart from free names and from each other. Labels travel with
/// their occurrences and never influence the class, only tie-breaking.
Term canonicalize(const Term& t);

/// Structural congruence, ignoring labels. Throws CalculusMismatch.
bool congruent(const Term& a, const Term& b);

/// Structural congruence where labels distinguish occurrences.
bool congruent_labelled(const Term& a, const Term& b);

Term strip_labels(const Term& t);
NodePtr strip_labels(const NodePtr& n);

/// Stable text key for the congruence class of t: the canonical form
/// rendered with positional binder indices and without labels.
std::string state_key(const Term& t);

}  // namespace syncpat
