#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "amalia/afs.hpp"

namespace amalia {

// The declarative reference semantics: grammars over AMRSs, the parsing-step
// operator, and its fixpoint. This side never executes machine code; it is
// the ground truth the machine is checked against.

// A rule of length n >= 1; the last index is the head, indices 1..n-1 the
// body. Length-1 rules are the empty categories (epsilon facts).
struct Rule {
  Amrs amrs;

  int len() const { return amrs.len(); }
  auto operator<=>(const Rule&) const = default;
};

struct Grammar {
  std::vector<Rule> rules;                          // finite, non-empty
  std::map<std::string, std::vector<Afs>> lexicon;  // word -> Cat(word), non-empty sets
  Afs start = single_node_afs(BOTTOM);              // accept-all by default
};

struct UnknownWordError : std::runtime_error {
  std::string word;
  explicit UnknownWordError(const std::string& w)
      : std::runtime_error("unknown word: " + w), word(w) {}
};

enum class ItemStatus { Act, Comp };

struct Item {
  int i = 0;
  int j = 0;
  ItemStatus status = ItemStatus::Act;
  Amrs amrs;

  auto operator<=>(const Item&) const = default;
};

using ItemSet = std::set<Item>;

// All Abs(<A_j..A_k>) over lexicon choices; {lambda} when j > k.
std::vector<Amrs> pre_terminals(const Grammar& g, const std::vector<std::string>& words,
                                int j, int k);

// One application of the parsing-step operator: exactly the items derivable
// by one of the five cases (dot movement, completion, prediction,
// epsilon facts, scanning). Monotone in the argument.
ItemSet tgw_step(const TypeHierarchy& h, const Grammar& g,
                 const std::vector<std::string>& words, const ItemSet& items);

// Subsumption filter: drops every item for which a strictly more general
// item with the same span and status exists.
ItemSet apply_filter(const TypeHierarchy& h, const ItemSet& items);

struct FixpointBudget {
  int max_iterations = 10000;
  int max_items = 200000;
};

struct FixpointResult {
  ItemSet items;
  bool success = false;
  bool exhausted = false;  // budget ran out before a fixpoint was reached
  int iterations = 0;
};

// Iterates I_{m+1} = T_{G,w}(I_m) from the empty set until fixpoint or
// budget. Success: some [0,A,n,Comp] with len(A)=1 unifiable with the start
// symbol.
FixpointResult fixpoint_parse(const TypeHierarchy& h, const Grammar& g,
                              const std::vector<std::string>& words,
                              const FixpointBudget& budget, bool filter);

// The start-unified AFSs of the successful spanning items of `items`.
std::vector<Afs> successful_results(const TypeHierarchy& h, const Grammar& g,
                                    const std::vector<std::string>& words,
                                    const ItemSet& items);

// One strong-derivation step: replaces index j of `a` by the body of the
// rule, guided by a candidate instance r (r must subsume-extend Abs(rho)).
// nullopt when the "as specific as needed" equations do not hold.
std::optional<Amrs> strong_derive(const TypeHierarchy& h, const Amrs& a, int j,
                                  const Rule& rho, const Amrs& r);

}  // namespace amalia
