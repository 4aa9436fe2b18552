#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace syncpat {

enum class Calculus { MA, SA, PiMix, PiSep, PiAsyn, Join };

const char* calculus_id(Calculus c);
std::optional<Calculus> calculus_from_id(std::string_view id);

/// A name. User-written names have fresh == 0; machine-generated fresh
/// variants of a name carry a positive index and never collide with input.
struct Name {
  std::string text;
  int fresh = 0;

  friend bool operator==(const Name&, const Name&) = default;
  friend auto operator<=>(const Name& a, const Name& b) {
    if (auto c = a.text <=> b.text; c != 0) return c;
    return a.fresh <=> b.fresh;
  }
  std::string str() const;
};

/// Occurrence identity of one capability. `base` is assigned at parse time;
/// `path` grows by one index each time a replication unfolding or a join
/// definition instantiation copies the occurrence.
struct Label {
  int base = -1;
  std::vector<int> path;

  bool valid() const { return base >= 0; }
  friend bool operator==(const Label&, const Label&) = default;
  friend auto operator<=>(const Label& a, const Label& b) {
    if (auto c = a.base <=> b.base; c != 0) return c;
    return a.path <=> b.path;
  }
  std::string str() const;
};

enum class CapKind {
  In, Out, Open, CoIn, CoOut, CoOpen,
  Ambient, Sum, OutputAtom, InputPrefix, Tau,
  JoinMessage, JoinDefinition, Replication,
};

const char* cap_kind_id(CapKind k);

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Nil {};
struct Ok {};
struct Par { std::vector<NodePtr> parts; };
struct Nu { Name name; NodePtr body; };
struct Bang { NodePtr body; Label label; };
struct Amb { Name name; NodePtr body; Label label; };

/// MA/SA action prefix (in/out/open and the SA co-actions).
struct Prefix { CapKind cap; Name name; NodePtr cont; Label label; };

enum class GuardKind { Output, Input, Tau };

/// One branch of a guarded choice. `obj` is absent for objectless
/// communication (`a!<>` / `a?()`) and for tau.
struct Branch { GuardKind kind; Name chan; std::optional<Name> obj; NodePtr cont; };

/// Guarded choice. All pi prefixes, including the single input/tau prefixes
/// of the asynchronous calculus, are represented as (possibly singleton)
/// sums; the whole sum carries one label.
struct Sum { std::vector<Branch> branches; Label label; };

/// Atomic output: pi-asyn `y!<z>` and join messages `y<z>`.
struct Msg { Name chan; std::optional<Name> obj; Label label; };

struct JPattern { Name chan; std::optional<Name> var; Label label; };
struct JRule { std::vector<JPattern> patterns; NodePtr body; };

/// `def J1 |> P1 and ... in Q`. The block carries one label: consuming any
/// rule of the definition consumes the (recurrent) definition.
struct JDef { std::vector<JRule> rules; NodePtr main; Label label; };

struct Node {
  std::variant<Nil, Ok, Par, Nu, Bang, Amb, Prefix, Sum, Msg, JDef> v;

  template <class T> const T* get() const { return std::get_if<T>(&v); }
  template <class T> bool is() const { return std::holds_alternative<T>(v); }
};

NodePtr mk(Node n);
NodePtr nil();
NodePtr ok();
NodePtr par(std::vector<NodePtr> parts);   // flattens trivial cases (0/1 part)
NodePtr nu(Name n, NodePtr body);
NodePtr bang(NodePtr body, Label l = {});
NodePtr amb(Name n, NodePtr body, Label l = {});
NodePtr prefix(CapKind cap, Name n, NodePtr cont, Label l = {});
NodePtr sum(std::vector<Branch> branches, Label l = {});
NodePtr msg(Name chan, std::optional<Name> obj, Label l = {});
NodePtr jdef(std::vector<JRule> rules, NodePtr main, Label l = {});

struct Term {
  Calculus cal = Calculus::MA;
  NodePtr root;
};

struct CalculusMismatch : std::runtime_error {
  CalculusMismatch() : std::runtime_error("calculus mismatch") {}
};

// --- syntax-core operations -------------------------------------------------

std::set<Name> free_names(const Term& t);
std::set<Name> free_names(const NodePtr& n);

/// All names occurring anywhere in the term (free or bound, any role).
std::set<Name> all_names(const NodePtr& n);

/// True iff t1 and t2 are identical up to consistent renaming of bound
/// names. Labels are ignored. Throws CalculusMismatch.
bool alpha_eq(const Term& t1, const Term& t2);

/// Binder environment for alpha-invariant comparison: maps each bound name
/// in scope to its binder index.
struct BinderEnv {
  std::map<Name, int> idx;
  int next = 0;
  BinderEnv bind(const Name& n) const {
    BinderEnv e = *this;
    e.idx[n] = e.next++;
    return e;
  }
};

/// Alpha-invariant total order on nodes; labels compared only when
/// `with_labels`. Used for canonical sorting and congruence.
int compare_nodes(const NodePtr& a, const NodePtr& b, bool with_labels,
                  const BinderEnv& ea = {}, const BinderEnv& eb = {});

bool alpha_eq_nodes(const NodePtr& a, const NodePtr& b);

/// Capture-avoiding simultaneous substitution of free names.
Term substitute(const Term& t, const std::map<Name, Name>& mapping);
NodePtr substitute(const NodePtr& n, const std::map<Name, Name>& mapping);

/// Fresh relabelling: every capability occurrence gets a fresh base label
/// with an empty copy path, numbered in left-to-right preorder.
Term assign_labels(const Term& t);

std::vector<Term> subterms(const Term& t);

/// Unguarded occurrence of the success constant. Ambient brackets,
/// parallel, restriction and replication do not guard.
bool has_success(const Term& t);
bool has_success(const NodePtr& n);

/// Every (label, kind) pair carried by the term, in preorder.
std::vector<std::pair<Label, CapKind>> labels_of(const Term& t);
void collect_labels(const NodePtr& n, std::vector<std::pair<Label, CapKind>>& out);

/// Appends idx to the copy-path of every label in the subtree; used when a
/// replication unfolding or a join rule instantiation copies occurrences.
NodePtr extend_copy_paths(const NodePtr& n, int idx);

/// Checks the node constructors against the grammar of the calculus
/// (co-actions SA-only, sums absent in pi-asyn, homogeneous sums in pi-sep,
/// ...). Returns an error message or nullopt.
std::optional<std::string> grammar_violation(const Term& t);

/// A name based on `n` that differs from everything in `used`.
Name fresh_name(const Name& n, const std::set<Name>& used);

}  // namespace syncpat
