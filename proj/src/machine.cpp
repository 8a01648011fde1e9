#include "amalia/machine.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace amalia {

std::vector<Instr> assemble_query(const ObjectCode& oc,
                                  const std::vector<std::string>& words) {
  std::vector<Instr> code;
  for (const auto& w : words) {
    const CodeBlock* b = oc.lexical_entry(w);
    if (!b) throw MachineError(MachineError::Kind::UnknownWord, "unknown word: " + w);
    code.insert(code.end(), b->code.begin(), b->code.end());
  }
  return code;
}

void Machine::reset() {
  heap_.assign(1, HeapCell{});  // cell 0 is a sentinel; addresses start at 1
  regs_.assign(2, 0);
  reg_hwm_ = 0;
  ustack_.clear();
  trail_.clear();
  trail_mark_ = 0;
  retstack_.clear();
  addr_reg_ = 0;
  left_ = -1;
  mid_ = -1;
  right_ = 0;
  len_ = 0;
  chart_.reset(1);
  phase_ = Phase::Idle;
  query_code_.clear();
  qpc_ = 0;
  pc_ = 0;
  run_buffer_.clear();
  run_pos_ = 0;
  top_level_failed_ = false;
  steps_ = 0;
}

void Machine::ensure_reg(int i) {
  if (i < 1) throw MachineError(MachineError::Kind::RegisterOutOfRange, "register X0");
  if (static_cast<size_t>(i) >= regs_.size()) regs_.resize(i + 1, 0);
  reg_hwm_ = std::max(reg_hwm_, i);
}

void Machine::set_reg(int i, int addr) {
  ensure_reg(i);
  regs_[i] = addr;
}

int Machine::reg(int i) const {
  if (i < 1 || static_cast<size_t>(i) >= regs_.size())
    throw MachineError(MachineError::Kind::RegisterOutOfRange,
                       "register X" + std::to_string(i) + " unset");
  return regs_[i];
}

int Machine::push_cell(HeapCell c) {
  heap_.push_back(c);
  return static_cast<int>(heap_.size()) - 1;
}

void Machine::store(int addr, HeapCell c) {
  trail_.emplace_back(addr, heap_[addr]);
  heap_[addr] = c;
}

void Machine::unwind_trail(size_t mark) {
  while (trail_.size() > mark) {
    auto [addr, old] = trail_.back();
    trail_.pop_back();
    heap_[addr] = old;
  }
}

int Machine::deref(int addr) const {
  for (;;) {
    if (addr <= 0 || addr >= static_cast<int>(heap_.size()))
      throw MachineError(MachineError::Kind::BadHeapAccess,
                         "dereference of invalid address " + std::to_string(addr));
    const HeapCell& c = heap_[addr];
    if (c.tag != HeapCell::Tag::Ref || c.val == addr) return addr;
    if (c.val < 0)
      throw MachineError(MachineError::Kind::BadHeapAccess,
                         "read of uninitialized arc slot at " + std::to_string(addr));
    addr = c.val;
  }
}

void Machine::bind(int a1, int a2) { store(a1, HeapCell{HeapCell::Tag::Ref, a2}); }

int Machine::build_most_general_fs(TypeId t) {
  const auto& slots = oc_->hier.features_of(t);
  int addr = push_cell(HeapCell{HeapCell::Tag::Str, t.v});
  for (const auto& slot : slots)
    push_cell(HeapCell{HeapCell::Tag::Var, slot.restriction.v});
  return addr;
}

void Machine::expand_var(int addr) {
  TypeId t{heap_[addr].val};
  int naddr = build_most_general_fs(t);
  bind(addr, naddr);
}

void Machine::run_type_fn(const TypeFn& fn, int query_addr) {
  // One instruction per feature of the joined type, emitted in reverse
  // canonical order; the slot pointer descends so the skeleton's arc slots
  // end up in canonical order while stack pushes pop in the program type's
  // feature order.
  int slot = 0;
  for (const Instr& in : fn.code) {
    ++steps_;
    switch (in.op) {
      case Op::BuildStr: {
        TypeId t{in.a};
        int base = static_cast<int>(heap_.size());
        push_cell(HeapCell{HeapCell::Tag::Str, t.v});
        int n = oc_->hier.arity(t);
        for (int j = 0; j < n; ++j) push_cell(HeapCell{});
        slot = base + n;
        bind(query_addr, base);
        break;
      }
      case Op::BuildRef:
        heap_[slot] = HeapCell{HeapCell::Tag::Ref, query_addr + in.a};
        --slot;
        break;
      case Op::BuildRefAndUnify:
        heap_[slot] = HeapCell{HeapCell::Tag::Ref, query_addr + in.a};
        ustack_.emplace_back(true, slot);
        --slot;
        break;
      case Op::BuildSelfRef:
        heap_[slot] = HeapCell{HeapCell::Tag::Ref, slot};
        ustack_.emplace_back(false, slot);
        --slot;
        break;
      case Op::BuildVar:
        heap_[slot] = HeapCell{HeapCell::Tag::Var, in.a};
        --slot;
        break;
      case Op::UnifyFeat:
        ustack_.emplace_back(true, query_addr + in.a);
        break;
      case Op::Return:
        return;
      default:
        throw MachineError(MachineError::Kind::InvalidInstruction,
                           "bad instruction in type function");
    }
  }
}

bool Machine::unify_heap(int a1, int a2) {
  a1 = deref(a1);
  a2 = deref(a2);
  if (a1 == a2) return true;
  HeapCell c1 = heap_[a1], c2 = heap_[a2];
  if (c1.tag == HeapCell::Tag::Ref) {  // self-referential: unknown value
    bind(a1, a2);
    return true;
  }
  if (c2.tag == HeapCell::Tag::Ref) {
    bind(a2, a1);
    return true;
  }
  if (c1.tag == HeapCell::Tag::Var && c2.tag == HeapCell::Tag::Var) {
    TypeId j = oc_->hier.lub(TypeId{c1.val}, TypeId{c2.val});
    if (j == INCONSISTENT) return false;
    store(a2, HeapCell{HeapCell::Tag::Var, j.v});
    bind(a1, a2);
    return true;
  }
  if (c1.tag == HeapCell::Tag::Var) {
    expand_var(a1);
    a1 = deref(a1);
    c1 = heap_[a1];
  }
  if (c2.tag == HeapCell::Tag::Var) {
    expand_var(a2);
    a2 = deref(a2);
    c2 = heap_[a2];
  }
  TypeId t1{c1.val}, t2{c2.val};
  const TypeFn& fn = oc_->unify_fn(t1, t2);
  if (fn.fail) return false;
  run_type_fn(fn, a2);
  int n = oc_->hier.arity(t1);
  for (int i = 1; i <= n; ++i) {
    auto [is_unify, addr] = ustack_.back();
    ustack_.pop_back();
    if (is_unify) {
      if (!unify_heap(addr, a1 + i)) return false;
    } else {
      store(addr, HeapCell{HeapCell::Tag::Ref, a1 + i});
    }
  }
  bind(a1, a2);
  return true;
}

void Machine::do_fail() {
  unwind_trail(trail_mark_);
  ustack_.clear();
  run_buffer_.clear();
  run_pos_ = 0;
  if (retstack_.empty()) {
    top_level_failed_ = true;
    phase_ = Phase::Done;
    return;
  }
  pc_ = retstack_.back();
  retstack_.pop_back();
}

// --- copying ---

int Machine::copy_node(int addr, std::map<int, int>& memo) {
  int d = deref(addr);
  auto it = memo.find(d);
  if (it != memo.end()) return it->second;
  const HeapCell c = heap_[d];
  switch (c.tag) {
    case HeapCell::Tag::Var: {
      int n = push_cell(c);
      memo[d] = n;
      return n;
    }
    case HeapCell::Tag::Ref: {  // self-referential
      int n = push_cell(HeapCell{});
      heap_[n] = HeapCell{HeapCell::Tag::Ref, n};
      memo[d] = n;
      return n;
    }
    case HeapCell::Tag::Str: {
      int ar = oc_->hier.arity(TypeId{c.val});
      int base = push_cell(c);
      for (int j = 0; j < ar; ++j) push_cell(HeapCell{});
      memo[d] = base;
      for (int j = 1; j <= ar; ++j) {
        int child = copy_node(d + j, memo);
        heap_[base + j] = HeapCell{HeapCell::Tag::Ref, child};
      }
      return base;
    }
  }
  return 0;  // unreachable
}

int Machine::copy_fs(int root) {
  std::map<int, int> memo;
  return copy_node(root, memo);
}

void Machine::copy_mrs() {
  std::map<int, int> memo;
  for (int r = 1; r <= reg_hwm_; ++r)
    if (regs_[r] != 0) regs_[r] = copy_node(regs_[r], memo);
}

// --- goals ---

int Machine::list_like_root(int tail_addr, TypeId cons_t, FeatureId head_f, FeatureId tail_f,
                            const std::vector<int>& elements) {
  // Builds the spine back to front; element slots alias the source cells.
  int tail = tail_addr;
  for (auto it = elements.rbegin(); it != elements.rend(); ++it) {
    int node = push_cell(HeapCell{HeapCell::Tag::Str, cons_t.v});
    int hpos = oc_->hier.feature_position(cons_t, head_f);
    int tpos = oc_->hier.feature_position(cons_t, tail_f);
    for (int j = 0; j < oc_->hier.arity(cons_t); ++j) push_cell(HeapCell{});
    heap_[node + hpos] = HeapCell{HeapCell::Tag::Ref, *it};
    heap_[node + tpos] = HeapCell{HeapCell::Tag::Ref, tail};
    // any other appropriate features stay most general
    for (int j = 1; j <= oc_->hier.arity(cons_t); ++j)
      if (j != hpos && j != tpos)
        heap_[node + j] =
            HeapCell{HeapCell::Tag::Var, oc_->hier.features_of(cons_t)[j - 1].restriction.v};
    tail = node;
  }
  return tail;
}

bool Machine::eval_goal(const Instr& in) {
  GoalId goal = static_cast<GoalId>(in.a);
  const TypeHierarchy& h = oc_->hier;
  const bool is_append = goal == GoalId::Append;
  const char* kind = is_append ? "list" : "set";
  auto want_type = [&](const char* n) {
    if (!h.has_type(n))
      throw MachineError(is_append ? MachineError::Kind::NotAList : MachineError::Kind::NotASet,
                         std::string("hierarchy has no ") + kind + " encoding (missing type " +
                             n + ")");
    return h.type_by_name(n);
  };
  TypeId empty_t = want_type(is_append ? "e_list" : "e_set");
  TypeId cons_t = want_type(is_append ? "ne_list" : "ne_set");
  FeatureId head_f, tail_f;
  try {
    head_f = h.feature_by_name(is_append ? "hd" : "elt");
    tail_f = h.feature_by_name(is_append ? "tl" : "elts");
  } catch (const HierarchyError&) {
    throw MachineError(is_append ? MachineError::Kind::NotAList : MachineError::Kind::NotASet,
                       std::string("hierarchy has no ") + kind + " encoding");
  }

  // inputs must be instantiated chains ending in the empty marker
  auto walk = [&](int addr, std::vector<int>& elems) {
    for (;;) {
      int d = deref(addr);
      const HeapCell c = heap_[d];
      TypeId t{c.val};
      if (c.tag == HeapCell::Tag::Var) {
        if (t == empty_t) return;  // most general empty marker
        throw MachineError(is_append ? MachineError::Kind::NotAList
                                     : MachineError::Kind::NotASet,
                           std::string("goal input is not an instantiated ") + kind);
      }
      if (c.tag != HeapCell::Tag::Str)
        throw MachineError(is_append ? MachineError::Kind::NotAList
                                     : MachineError::Kind::NotASet,
                           std::string("goal input is not an instantiated ") + kind);
      if (t == empty_t) return;
      if (!h.subsumes(cons_t, t))
        throw MachineError(is_append ? MachineError::Kind::NotAList
                                     : MachineError::Kind::NotASet,
                           std::string("goal input is not a ") + kind + " (type " +
                               h.type_name(t) + ")");
      elems.push_back(d + h.feature_position(t, head_f));
      addr = d + h.feature_position(t, tail_f);
    }
  };

  std::vector<int> first_elems;
  walk(reg(in.b), first_elems);
  // the second operand is used as the result's tail unchanged
  std::vector<int> ignore;
  walk(reg(in.c), ignore);  // validates instantiation
  int result = list_like_root(deref(reg(in.c)), cons_t, head_f, tail_f, first_elems);
  return unify_heap(result, reg(in.d));
}

// --- execution ---

void Machine::count_step() {
  if (++steps_ > budget_)
    throw MachineError(MachineError::Kind::BudgetExhausted,
                       "instruction budget exhausted after " + std::to_string(steps_) +
                           " instructions");
}

void Machine::exec(const Instr& in) {
  count_step();
  const TypeHierarchy& h = oc_->hier;
  switch (in.op) {
    case Op::PutNode: {
      int addr = push_cell(HeapCell{HeapCell::Tag::Str, in.a});
      for (int j = 0; j < in.b; ++j) push_cell(HeapCell{});  // poisoned slots
      set_reg(in.c, addr);
      break;
    }
    case Op::PutArc:
      heap_[reg(in.a) + in.b] = HeapCell{HeapCell::Tag::Ref, reg(in.c)};
      break;
    case Op::PutVar:
      set_reg(in.c, push_cell(HeapCell{HeapCell::Tag::Var, in.a}));
      break;
    case Op::Proceed:
      ++len_;
      chart_.at(len_ - 1, len_).complete.add(Edge{true, reg(in.a), 0, {}});
      break;
    case Op::SameWord:
      chart_.at(len_, len_ + 1).complete.add(Edge{true, reg(in.a), 0, {}});
      break;
    case Op::GetStructure: {
      int addr = deref(reg(in.c));
      set_reg(in.c, addr);
      HeapCell c = heap_[addr];
      if (c.tag == HeapCell::Tag::Var) {
        expand_var(addr);
        addr = deref(addr);
        c = heap_[addr];
        set_reg(in.c, addr);
      }
      if (c.tag == HeapCell::Tag::Ref) {  // uninstantiated cell
        int base = static_cast<int>(heap_.size());
        push_cell(HeapCell{HeapCell::Tag::Str, in.a});
        for (int j = 1; j <= in.b; ++j) {
          int slot = push_cell(HeapCell{});
          heap_[slot] = HeapCell{HeapCell::Tag::Ref, slot};
        }
        bind(addr, base);
        for (int j = in.b; j >= 1; --j) ustack_.emplace_back(false, base + j);
      } else {
        const TypeFn& fn = oc_->unify_fn(TypeId{in.a}, TypeId{c.val});
        if (fn.fail) {
          do_fail();
          break;
        }
        run_type_fn(fn, addr);
      }
      break;
    }
    case Op::GetVar: {
      int naddr = push_cell(HeapCell{HeapCell::Tag::Var, in.a});
      if (!unify_heap(naddr, reg(in.c))) do_fail();
      break;
    }
    case Op::UnifyVariable: {
      auto [is_unify, addr] = ustack_.back();
      ustack_.pop_back();
      (void)is_unify;
      set_reg(in.a, addr);
      break;
    }
    case Op::UnifyValue: {
      auto [is_unify, addr] = ustack_.back();
      ustack_.pop_back();
      if (is_unify) {
        if (!unify_heap(addr, reg(in.a))) do_fail();
      } else {
        store(addr, HeapCell{HeapCell::Tag::Ref, reg(in.a)});
      }
      break;
    }
    case Op::PutRule:
      for (int i = 0; i <= len_; ++i)
        chart_.at(i, i).active.add(Edge{false, 0, in.a, {}});
      break;
    case Op::FirstKey:
      right_ = 0;
      left_ = -1;
      mid_ = -1;
      break;
    case Op::NextKey:
      --mid_;
      if (mid_ < left_) {
        --left_;
        if (left_ < 0) {
          ++right_;
          left_ = right_ - 1;
        }
        mid_ = right_ - 1;
      }
      chart_.at(left_, mid_).active.init();
      chart_.at(mid_, right_).complete.init();
      break;
    case Op::CheckKey:
      if (right_ < len_ || (right_ == len_ && !(left_ == 0 && mid_ == left_))) pc_ = in.a;
      break;
    case Op::TstActiveEdges:
      if (chart_.at(left_, mid_).active.exhausted()) pc_ = in.a;
      break;
    case Op::NextActiveEdge:
      chart_.at(left_, mid_).active.advance();
      pc_ = in.a;
      break;
    case Op::TstCompleteEdges:
      trail_mark_ = trail_.size();
      if (chart_.at(mid_, right_).complete.exhausted()) {
        chart_.at(mid_, right_).complete.init();
        pc_ = in.a;
      }
      break;
    case Op::NextCompleteEdge:
      unwind_trail(trail_mark_);
      chart_.at(mid_, right_).complete.advance();
      pc_ = in.a;
      break;
    case Op::Call: {
      const Edge& e1 = chart_.at(left_, mid_).active.current();
      const Edge& e2 = chart_.at(mid_, right_).complete.current();
      regs_.assign(2, 0);
      for (size_t i = 0; i < e1.regs.size(); ++i) set_reg(static_cast<int>(i) + 1, e1.regs[i]);
      reg_hwm_ = static_cast<int>(e1.regs.size());
      addr_reg_ = e2.addr;
      retstack_.push_back(pc_);
      pc_ = e1.label;
      break;
    }
    case Op::LoadFs:
      set_reg(in.a, addr_reg_);
      break;
    case Op::CopyActiveEdge: {
      copy_mrs();
      std::vector<int32_t> snapshot(regs_.begin() + 1, regs_.begin() + 1 + reg_hwm_);
      chart_.at(left_, right_).active.add(Edge{false, 0, in.a, std::move(snapshot)});
      pc_ = retstack_.back();
      retstack_.pop_back();
      break;
    }
    case Op::CopyCompleteEdge: {
      int caddr = copy_fs(reg(in.a));
      chart_.at(left_, right_).complete.add(Edge{true, caddr, 0, {}});
      pc_ = retstack_.back();
      retstack_.pop_back();
      break;
    }
    case Op::EvalGoal:
      if (!eval_goal(in)) do_fail();
      break;
    case Op::EndOfProgram:
      phase_ = Phase::Done;
      break;
    case Op::BuildStr:
    case Op::BuildRef:
    case Op::BuildRefAndUnify:
    case Op::BuildSelfRef:
    case Op::BuildVar:
    case Op::UnifyFeat:
    case Op::Return:
      throw MachineError(MachineError::Kind::InvalidInstruction,
                         "type-unification instruction outside a type function");
  }
}

static bool is_put(Op op) {
  return op == Op::PutNode || op == Op::PutVar || op == Op::PutArc;
}

void Machine::fetch_run() {
  // Two separate streams: all node-building instructions of a maximal put_*
  // run execute before its arc instructions.
  const std::vector<Instr>* src = phase_ == Phase::Query ? &query_code_ : &oc_->program;
  size_t at = phase_ == Phase::Query ? qpc_ : static_cast<size_t>(pc_);
  size_t end = at;
  while (end < src->size() && is_put((*src)[end].op)) ++end;
  run_buffer_.clear();
  run_pos_ = 0;
  for (size_t i = at; i < end; ++i)
    if ((*src)[i].op != Op::PutArc) run_buffer_.push_back((*src)[i]);
  for (size_t i = at; i < end; ++i)
    if ((*src)[i].op == Op::PutArc) run_buffer_.push_back((*src)[i]);
  if (phase_ == Phase::Query)
    qpc_ = end;
  else
    pc_ = static_cast<int>(end);
}

void Machine::insert_epsilon_edges() {
  for (const CodeBlock& b : oc_->epsilons) {
    int root = run_block(b);
    for (int i = 0; i <= len_; ++i)
      chart_.at(i, i).complete.add(Edge{true, root, 0, {}});
  }
}

void Machine::prepare(const std::vector<std::string>& words) {
  reset();
  query_code_ = assemble_query(*oc_, words);
  chart_.reset(std::max<int>(1, static_cast<int>(words.size())));
  phase_ = Phase::Query;
}

void Machine::step() {
  if (phase_ == Phase::Done || phase_ == Phase::Idle) return;
  if (run_pos_ < run_buffer_.size()) {
    const Instr in = run_buffer_[run_pos_++];
    if (run_pos_ >= run_buffer_.size()) {
      run_buffer_.clear();
      run_pos_ = 0;
    }
    exec(in);
    return;
  }
  if (phase_ == Phase::Query && qpc_ >= query_code_.size()) {
    insert_epsilon_edges();
    phase_ = Phase::Program;
    pc_ = 0;
    if (oc_->program.empty()) phase_ = Phase::Done;
    return;
  }
  const std::vector<Instr>* src = phase_ == Phase::Query ? &query_code_ : &oc_->program;
  size_t at = phase_ == Phase::Query ? qpc_ : static_cast<size_t>(pc_);
  if (at >= src->size()) {
    phase_ = Phase::Done;
    return;
  }
  if (is_put((*src)[at].op)) {
    fetch_run();
    step();
    return;
  }
  if (phase_ == Phase::Query)
    ++qpc_;
  else
    ++pc_;
  exec((*src)[at]);
}

std::string Machine::describe_next() const {
  if (run_pos_ < run_buffer_.size())
    return format_instruction(run_buffer_[run_pos_], oc_->hier);
  const std::vector<Instr>* src = phase_ == Phase::Query ? &query_code_ : &oc_->program;
  size_t at = phase_ == Phase::Query ? qpc_ : static_cast<size_t>(pc_);
  if (phase_ == Phase::Done || at >= src->size()) return "(halted)";
  return format_instruction((*src)[at], oc_->hier);
}

int Machine::run_block(const CodeBlock& b) {
  size_t i = 0;
  while (i < b.code.size()) {
    if (is_put(b.code[i].op)) {
      size_t end = i;
      while (end < b.code.size() && is_put(b.code[end].op)) ++end;
      for (size_t k = i; k < end; ++k)
        if (b.code[k].op != Op::PutArc) exec(b.code[k]);
      for (size_t k = i; k < end; ++k)
        if (b.code[k].op == Op::PutArc) exec(b.code[k]);
      i = end;
    } else {
      exec(b.code[i]);
      ++i;
    }
  }
  return reg(b.root_reg);
}

bool Machine::run_code(const std::vector<Instr>& code) {
  top_level_failed_ = false;
  size_t i = 0;
  while (i < code.size() && !top_level_failed_) {
    if (is_put(code[i].op)) {
      size_t end = i;
      while (end < code.size() && is_put(code[end].op)) ++end;
      for (size_t k = i; k < end; ++k)
        if (code[k].op != Op::PutArc) exec(code[k]);
      for (size_t k = i; k < end; ++k)
        if (code[k].op == Op::PutArc) exec(code[k]);
      i = end;
    } else {
      exec(code[i]);
      ++i;
    }
  }
  return !top_level_failed_;
}

Tfs Machine::read_tfs(int addr) const {
  Tfs out;
  std::map<int, int> memo;
  std::function<int(int)> walk = [&](int a) -> int {
    int d = deref(a);
    auto it = memo.find(d);
    if (it != memo.end()) return it->second;
    const HeapCell c = heap_[d];
    int id = static_cast<int>(out.nodes.size());
    switch (c.tag) {
      case HeapCell::Tag::Var:
        out.nodes.push_back(TfsNode{TypeId{c.val}, {}});
        memo[d] = id;
        return id;
      case HeapCell::Tag::Ref:  // unknown value: most general node
        out.nodes.push_back(TfsNode{BOTTOM, {}});
        memo[d] = id;
        return id;
      case HeapCell::Tag::Str: {
        out.nodes.push_back(TfsNode{TypeId{c.val}, {}});
        memo[d] = id;
        const auto& slots = oc_->hier.features_of(TypeId{c.val});
        for (size_t j = 0; j < slots.size(); ++j) {
          int child = walk(d + 1 + static_cast<int>(j));
          out.nodes[id].arcs.emplace_back(slots[j].feature, child);
        }
        std::sort(out.nodes[id].arcs.begin(), out.nodes[id].arcs.end());
        return id;
      }
    }
    return 0;
  };
  out.root = walk(addr);
  return out;
}

std::string Machine::dump_heap(int from, int to) const {
  std::ostringstream os;
  for (int a = from; a <= to && a < static_cast<int>(heap_.size()); ++a) {
    const HeapCell& c = heap_[a];
    os << a << " | ";
    switch (c.tag) {
      case HeapCell::Tag::Str:
        os << "STR | " << oc_->hier.type_name(TypeId{c.val});
        break;
      case HeapCell::Tag::Var:
        os << "VAR | " << oc_->hier.type_name(TypeId{c.val});
        break;
      case HeapCell::Tag::Ref:
        if (c.val < 0)
          os << "REF | ?";
        else
          os << "REF | " << c.val;
        break;
    }
    os << '\n';
  }
  return os.str();
}

ParseOutcome Machine::extract_results() {
  ParseOutcome out;
  out.instructions = steps_;
  for (int l = 0; l <= chart_.size; ++l)
    for (int r = l; r <= chart_.size; ++r) {
      const ChartEntry& e = chart_.at(l, r);
      if (!e.active.edges.empty() || !e.complete.edges.empty())
        out.edge_counts[{l, r}] = {static_cast<int>(e.active.edges.size()),
                                   static_cast<int>(e.complete.edges.size())};
    }
  for (const Edge& e : chart_.at(0, len_).complete.edges) {
    size_t mark = trail_.size();
    int copy = copy_fs(e.addr);
    int sroot = run_block(oc_->start);
    if (unify_heap(copy, sroot)) {
      Tfs t = read_tfs(copy);
      out.result_tfs.push_back(t);
      out.results.push_back(print_tfs(t, oc_->hier));
    }
    unwind_trail(mark);
  }
  out.success = !out.results.empty();
  return out;
}

ParseOutcome Machine::parse(const std::vector<std::string>& words) {
  prepare(words);
  while (!halted()) step();
  if (top_level_failed_)
    throw MachineError(MachineError::Kind::FailAtTopLevel,
                       "unification failure outside any edge combination");
  return extract_results();
}

}  // namespace amalia
