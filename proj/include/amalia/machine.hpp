#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "amalia/instr.hpp"
#include "amalia/tfs.hpp"
#include "amalia/types.hpp"

namespace amalia {

// Tagged heap cells. STR carries a type and is immediately followed by its
// Ar(type) arc slots; a self-referential REF denotes a temporarily unknown
// value; VAR(t) is the unexpanded most general structure of type t.
struct HeapCell {
  enum class Tag : uint8_t { Str, Ref, Var };
  Tag tag = Tag::Ref;
  int32_t val = -1;  // type id (Str/Var) or address (Ref); -1 poisons fresh slots

  bool operator==(const HeapCell&) const = default;
};

struct Edge {
  bool complete = true;
  int32_t addr = 0;            // complete: heap address of the root
  int32_t label = 0;           // active: code address of a load_fs
  std::vector<int32_t> regs;   // active: snapshot of X1..Xk
};

struct EdgeList {
  std::vector<Edge> edges;
  size_t cur = 0;

  void add(Edge e) { edges.push_back(std::move(e)); }
  void init() { cur = 0; }
  void advance() { ++cur; }
  bool exhausted() const { return cur >= edges.size(); }
  const Edge& current() const { return edges[cur]; }
};

struct ChartEntry {
  EdgeList active;
  EdgeList complete;
};

// Entries live at (l, r), 0 <= l <= r; the (l,m)/(m,r) sub-keys of the
// traversal keys resolve to these shared entries.
struct Chart {
  int size = 0;  // max index value
  std::vector<ChartEntry> entries;

  void reset(int n) {
    size = n;
    entries.assign(static_cast<size_t>(n + 1) * (n + 1), ChartEntry{});
  }
  ChartEntry& at(int l, int r) { return entries[static_cast<size_t>(l) * (size + 1) + r]; }
  const ChartEntry& at(int l, int r) const {
    return entries[static_cast<size_t>(l) * (size + 1) + r];
  }
};

struct MachineError : std::runtime_error {
  enum class Kind {
    InvalidInstruction,
    RegisterOutOfRange,
    BudgetExhausted,
    FailAtTopLevel,
    UnknownWord,
    NotAList,
    NotASet,
    BadHeapAccess,
  };
  Kind kind;
  MachineError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

struct ParseOutcome {
  bool success = false;
  std::vector<std::string> results;  // rendered terms, start-unified
  std::vector<Tfs> result_tfs;
  uint64_t instructions = 0;
  std::map<std::pair<int, int>, std::pair<int, int>> edge_counts;  // (l,r) -> (act, comp)
};

class Machine {
 public:
  explicit Machine(const ObjectCode& code) : oc_(&code) { reset(); }

  // Whole pipeline: query assembly, epsilon edges, driver loop, extraction.
  ParseOutcome parse(const std::vector<std::string>& words);

  void reset();

  // --- phased execution (debugger and tests) ---
  // Loads the assembled query followed by the program; step() then runs one
  // instruction at a time until halted().
  void prepare(const std::vector<std::string>& words);
  bool halted() const { return phase_ == Phase::Done; }
  void step();
  // pc of the next program instruction (-1 while still in the query phase)
  int program_pc() const { return phase_ == Phase::Program ? pc_ : -1; }
  std::string describe_next() const;

  // Runs a self-contained query block; returns the heap address of its root.
  int run_block(const CodeBlock& b);
  // Runs program-side code against existing registers; false when the code
  // failed with no pending edge combination to fall back to.
  bool run_code(const std::vector<Instr>& code);

  // --- core operations ---
  int deref(int addr) const;
  void bind(int a1, int a2);              // trailed overwrite with REF
  bool unify_heap(int a1, int a2);
  int build_most_general_fs(TypeId t);    // STR + VAR cells for the arcs
  int copy_fs(int root);
  Tfs read_tfs(int addr) const;

  void set_reg(int i, int addr);
  int reg(int i) const;

  uint64_t instructions_executed() const { return steps_; }
  void set_budget(uint64_t b) { budget_ = b; }

  const std::vector<HeapCell>& heap() const { return heap_; }
  const Chart& chart() const { return chart_; }
  const std::vector<std::pair<int32_t, HeapCell>>& trail() const { return trail_; }
  const std::vector<std::pair<bool, int32_t>>& unification_stack() const { return ustack_; }
  const std::vector<int32_t>& return_stack() const { return retstack_; }
  int len() const { return len_; }
  int left() const { return left_; }
  int mid() const { return mid_; }
  int right() const { return right_; }

  std::string dump_heap(int from, int to) const;  // addr | TAG | payload

  ParseOutcome extract_results();

 private:
  enum class Phase { Idle, Query, Program, Done };

  void exec(const Instr& in);
  void flush_pending_run();
  void fetch_run();  // two-stream reorder of a maximal put_* run
  void run_type_fn(const TypeFn& fn, int query_addr);
  void expand_var(int addr);
  void do_fail();
  void store(int addr, HeapCell c);  // trailed
  int push_cell(HeapCell c);
  void unwind_trail(size_t mark);
  int copy_node(int addr, std::map<int, int>& memo);
  void copy_mrs();
  void insert_epsilon_edges();
  bool eval_goal(const Instr& in);
  int list_like_root(int tail_addr, TypeId cons_t, FeatureId head_f, FeatureId tail_f,
                     const std::vector<int>& elements);
  void ensure_reg(int i);
  void count_step();

  const ObjectCode* oc_;
  std::vector<HeapCell> heap_;
  std::vector<int32_t> regs_;  // 1-based; regs_[0] unused
  int reg_hwm_ = 0;            // highest register written since the last call
  std::vector<std::pair<bool, int32_t>> ustack_;  // (is_unify, addr)
  std::vector<std::pair<int32_t, HeapCell>> trail_;
  size_t trail_mark_ = 0;
  std::vector<int32_t> retstack_;
  int32_t addr_reg_ = 0;
  int left_ = -1, mid_ = -1, right_ = 0, len_ = 0;
  Chart chart_;

  Phase phase_ = Phase::Idle;
  std::vector<Instr> query_code_;
  size_t qpc_ = 0;
  int pc_ = 0;
  std::vector<Instr> run_buffer_;  // reordered put_* run
  size_t run_pos_ = 0;
  bool top_level_failed_ = false;

  uint64_t steps_ = 0;
  uint64_t budget_ = 100000000ull;
};

// Concatenates the words' lexical blocks; ambiguous entries are already
// chained with same_word inside each block.
std::vector<Instr> assemble_query(const ObjectCode& oc, const std::vector<std::string>& words);

}  // namespace amalia
