#pragma once

#include <optional>
#include <vector>

#include "amalia/afs.hpp"
#include "amalia/term.hpp"
#include "amalia/types.hpp"

namespace amalia {

// Concrete typed feature structures: rooted labeled graphs with opaque node
// identities. Values are immutable; equality of interest is alphabetic
// variance (mutual subsumption), not representation equality.
struct TfsNode {
  TypeId type;
  std::vector<std::pair<FeatureId, int>> arcs;  // sorted by feature
};

struct Tfs {
  std::vector<TfsNode> nodes;
  int root = 0;
};

struct Mrs {
  std::vector<TfsNode> nodes;
  std::vector<int> roots;  // ordered, repetition-free

  int len() const { return static_cast<int>(roots.size()); }
};

struct CyclicStructureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// delta(root, path); -1 when undefined.
int tfs_node_at(const Tfs& a, const Path& p);
int mrs_node_at(const Mrs& m, int i, const Path& p);  // i is 1-based

// Path value: the sub-structure rooted at delta(root, p); nullopt plays the
// role of the single top-typed node (nonexistent value).
std::optional<Tfs> val(const Tfs& a, const Path& p);

// Subsumption morphism a -> b, forced arc-by-arc from the roots; nullopt when
// none exists. morphism[node of a] = node of b.
std::optional<std::vector<int>> subsumes(const TypeHierarchy& h, const Tfs& a, const Tfs& b);
bool alphabetic_variants(const TypeHierarchy& h, const Tfs& a, const Tfs& b);

bool is_cyclic(const Tfs& a);

// rank(A) = (|Pi| - |Q|) + sum over paths of depth(type at path end).
// Strictly increases along strict subsumption of acyclic structures.
long long rank(const TypeHierarchy& h, const Tfs& a);  // throws CyclicStructureError

// Abstraction / concretion.
Afs abs(const Tfs& a);        // throws CyclicStructureError
Amrs abs_mrs(const Mrs& m);   // throws CyclicStructureError
Tfs conc(const Afs& f);
Mrs conc_amrs(const Amrs& m);

// The feature structure induced by root i (1-based); value-semantics copy.
Tfs project(const Mrs& m, int i);

// Well-typedness checks relative to a hierarchy.
bool well_typed(const TypeHierarchy& h, const Tfs& a);
bool totally_well_typed(const TypeHierarchy& h, const Tfs& a);

// Normal-term bridge. Partial subterms denote most general structures of
// their type and become arc-less nodes.
Tfs tfs_from_term(const Term& t, const TypeHierarchy& h);
Mrs mrs_from_terms(const std::vector<Term>& ts, const TypeHierarchy& h);
Term term_from_tfs(const Tfs& a, const TypeHierarchy& h);
std::vector<Term> terms_from_mrs(const Mrs& m, const TypeHierarchy& h);

std::string print_tfs(const Tfs& a, const TypeHierarchy& h);

}  // namespace amalia
