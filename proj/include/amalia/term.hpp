#pragma once

#include <memory>
#include <string>
#include <vector>

#include "amalia/types.hpp"

namespace amalia {

// Linear tagged-term notation for feature structures:
//   <1>b(<2>d, <2>)
// A tag's first occurrence may carry a type and arguments (dependent); later
// occurrences are bare `<k>` (independent). A type written without an argument
// list denotes the most general structure of that type; for types of arity 0
// the two spellings coincide. `partial` records that a subterm was written (or
// inferred) type-only, which compiles to put_var/get_var instead of put_node.
struct Term {
  int tag = 0;         // 0: untagged
  bool tag_only = false;
  TypeId type;
  bool partial = false;
  std::vector<Term> args;  // size == Ar(type) unless partial/tag_only
};

struct TermSyntaxError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses a single term. Verifies types exist and argument counts match arity.
Term parse_term(const std::string& text, const TypeHierarchy& h);

// Parses a multi-term: terms separated by `;`, tags scoped over the sequence.
std::vector<Term> parse_multi_term(const std::string& text, const TypeHierarchy& h);

std::string print_term(const Term& t, const TypeHierarchy& h);
std::string print_multi_term(const std::vector<Term>& ts, const TypeHierarchy& h);

}  // namespace amalia
