#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "amalia/types.hpp"

namespace amalia {

enum class Op : uint8_t {
  // query processing
  PutNode, PutArc, PutVar, Proceed, SameWord,
  // program processing
  GetStructure, GetVar, UnifyVariable, UnifyValue,
  // type unification functions
  BuildStr, BuildRef, BuildRefAndUnify, BuildSelfRef, BuildVar, UnifyFeat, Return,
  // parsing control
  PutRule, FirstKey, NextKey, CheckKey, TstActiveEdges, NextActiveEdge,
  TstCompleteEdges, NextCompleteEdge, Call, LoadFs, CopyActiveEdge,
  CopyCompleteEdge, EndOfProgram,
  // functional attachments; serialized as a `.goal` directive
  EvalGoal,
};

const char* op_name(Op op);

// Operand meaning varies by op:
//   PutNode/GetStructure: a=type b=arity c=register
//   PutVar/GetVar:        a=type c=register
//   PutArc:               a=reg b=offset c=reg
//   BuildStr/BuildVar:    a=type
//   BuildRef/BuildRefAndUnify/UnifyFeat: a=1-based arc position in the query type
//   branches (PutRule, CheckKey, Tst*/Next*, CopyActiveEdge): a=target pc
//   Proceed/SameWord/UnifyVariable/UnifyValue/LoadFs/CopyCompleteEdge: a=register
//   EvalGoal: a=goal id, b/c/d=argument registers
struct Instr {
  Op op;
  int32_t a = 0;
  int32_t b = 0;
  int32_t c = 0;
  int32_t d = 0;

  bool operator==(const Instr&) const = default;
};

enum class GoalId : int32_t { Append = 0, Union = 1 };
const char* goal_name(GoalId g);

// One compiled type-unification function unify_type[t1][t2].
struct TypeFn {
  bool fail = false;
  std::vector<Instr> code;

  bool operator==(const TypeFn&) const = default;
};

// A self-contained query block (lexical entry chain, start symbol, or an
// epsilon fact) together with the register holding its root.
struct CodeBlock {
  std::vector<Instr> code;
  int root_reg = 1;

  bool operator==(const CodeBlock&) const = default;
};

struct ObjectCode {
  TypeHierarchy hier;
  std::vector<TypeFn> unify_table;  // type_count^2, row-major [t1][t2]
  std::vector<Instr> program;       // driver loop followed by rule code
  std::vector<std::pair<std::string, CodeBlock>> lexicon;  // source order
  std::vector<CodeBlock> epsilons;
  CodeBlock start;

  const TypeFn& unify_fn(TypeId t1, TypeId t2) const {
    return unify_table[static_cast<size_t>(t1.v) * hier.type_count() + t2.v];
  }
  const CodeBlock* lexical_entry(const std::string& word) const {
    for (const auto& [w, b] : lexicon)
      if (w == word) return &b;
    return nullptr;
  }
};

struct ObjectFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Textual object format: one instruction per line with an optional `Lk:`
// label prefix, `;` comments, and `%% types` / `%% rules` / `%% start` /
// `%% empty` / `%% lexicon word <w>` sections. The type-unification table is
// regenerated from the types section on load. Byte-deterministic.
std::string save_object(const ObjectCode& oc);
ObjectCode load_object(const std::string& text);

// Debug rendering of one unify_type function (used by goldens and disasm).
std::string print_type_fn(const ObjectCode& oc, TypeId t1, TypeId t2);

// One instruction without label resolution (branch targets print as @pc).
std::string format_instruction(const Instr& in, const TypeHierarchy& h);

// Label assignment used by the serializer, as name -> program pc.
std::map<std::string, int32_t> program_labels(const ObjectCode& oc);

}  // namespace amalia
