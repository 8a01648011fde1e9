#include "amalia/instr.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "amalia/compiler.hpp"

namespace amalia {

namespace {

struct OpInfo {
  Op op;
  const char* name;
};

constexpr OpInfo kOps[] = {
    {Op::PutNode, "put_node"},
    {Op::PutArc, "put_arc"},
    {Op::PutVar, "put_var"},
    {Op::Proceed, "proceed"},
    {Op::SameWord, "same_word"},
    {Op::GetStructure, "get_structure"},
    {Op::GetVar, "get_var"},
    {Op::UnifyVariable, "unify_variable"},
    {Op::UnifyValue, "unify_value"},
    {Op::BuildStr, "build_str"},
    {Op::BuildRef, "build_ref"},
    {Op::BuildRefAndUnify, "build_ref_and_unify"},
    {Op::BuildSelfRef, "build_self_ref"},
    {Op::BuildVar, "build_var"},
    {Op::UnifyFeat, "unify_feat"},
    {Op::Return, "return"},
    {Op::PutRule, "put_rule"},
    {Op::FirstKey, "first_key"},
    {Op::NextKey, "next_key"},
    {Op::CheckKey, "check_key"},
    {Op::TstActiveEdges, "tst_active_edges"},
    {Op::NextActiveEdge, "next_active_edge"},
    {Op::TstCompleteEdges, "tst_complete_edges"},
    {Op::NextCompleteEdge, "next_complete_edge"},
    {Op::Call, "call"},
    {Op::LoadFs, "load_fs"},
    {Op::CopyActiveEdge, "copy_active_edge"},
    {Op::CopyCompleteEdge, "copy_complete_edge"},
    {Op::EndOfProgram, "end_of_program"},
    {Op::EvalGoal, ".goal"},
};

bool is_branch(Op op) {
  switch (op) {
    case Op::PutRule:
    case Op::CheckKey:
    case Op::TstActiveEdges:
    case Op::NextActiveEdge:
    case Op::TstCompleteEdges:
    case Op::NextCompleteEdge:
    case Op::CopyActiveEdge:
      return true;
    default:
      return false;
  }
}

}  // namespace

const char* op_name(Op op) {
  for (const auto& oi : kOps)
    if (oi.op == op) return oi.name;
  return "?";
}

const char* goal_name(GoalId g) { return g == GoalId::Append ? "append" : "union"; }

namespace {

std::string format_instr(const Instr& in, const TypeHierarchy& h,
                         const std::map<int32_t, std::string>& labels) {
  std::ostringstream os;
  os << op_name(in.op);
  auto lbl = [&labels](int32_t pc) { return labels.at(pc); };
  switch (in.op) {
    case Op::PutNode:
    case Op::GetStructure:
      os << ' ' << h.type_name(TypeId{in.a}) << '/' << in.b << ",X" << in.c;
      break;
    case Op::PutVar:
    case Op::GetVar:
      os << ' ' << h.type_name(TypeId{in.a}) << ",X" << in.c;
      break;
    case Op::PutArc:
      os << " X" << in.a << ',' << in.b << ",X" << in.c;
      break;
    case Op::Proceed:
    case Op::SameWord:
    case Op::UnifyVariable:
    case Op::UnifyValue:
    case Op::LoadFs:
    case Op::CopyCompleteEdge:
      os << " X" << in.a;
      break;
    case Op::BuildStr:
    case Op::BuildVar:
      os << ' ' << h.type_name(TypeId{in.a});
      break;
    case Op::BuildRef:
    case Op::BuildRefAndUnify:
    case Op::UnifyFeat:
      os << ' ' << in.a;
      break;
    case Op::PutRule:
    case Op::CheckKey:
    case Op::TstActiveEdges:
    case Op::NextActiveEdge:
    case Op::TstCompleteEdges:
    case Op::NextCompleteEdge:
    case Op::CopyActiveEdge:
      os << ' ' << lbl(in.a);
      break;
    case Op::EvalGoal:
      os << ' ' << goal_name(static_cast<GoalId>(in.a)) << "(X" << in.b << ",X" << in.c
         << ",X" << in.d << ')';
      break;
    case Op::BuildSelfRef:
    case Op::Return:
    case Op::FirstKey:
    case Op::NextKey:
    case Op::Call:
    case Op::EndOfProgram:
      break;
  }
  return os.str();
}

std::string format_statement(const CharStatement& st) {
  std::ostringstream os;
  os << st.subject << " sub [";
  for (size_t i = 0; i < st.subtypes.size(); ++i) {
    if (i) os << ',';
    os << st.subtypes[i];
  }
  os << ']';
  if (!st.intros.empty()) {
    os << " intro [";
    for (size_t i = 0; i < st.intros.size(); ++i) {
      if (i) os << ',';
      os << st.intros[i].first << ':' << st.intros[i].second;
    }
    os << ']';
  }
  os << '.';
  return os.str();
}

void emit_block(std::ostringstream& os, const CodeBlock& b, const TypeHierarchy& h) {
  static const std::map<int32_t, std::string> no_labels;
  for (const Instr& in : b.code) os << "        " << format_instr(in, h, no_labels) << '\n';
}

}  // namespace

std::string save_object(const ObjectCode& oc) {
  std::ostringstream os;
  os << "; amalia object code\n";
  os << "%% types\n";
  for (const auto& st : oc.hier.to_statements()) os << format_statement(st) << '\n';

  // label every branch target in ascending pc order
  std::map<int32_t, std::string> labels;
  for (const Instr& in : oc.program)
    if (is_branch(in.op)) labels.emplace(in.a, "");
  int k = 1;
  for (auto& [pc, name] : labels) name = "L" + std::to_string(k++);

  os << "%% rules\n";
  for (size_t pc = 0; pc < oc.program.size(); ++pc) {
    std::string prefix;
    auto it = labels.find(static_cast<int32_t>(pc));
    if (it != labels.end()) prefix = it->second + ":";
    prefix.resize(8, ' ');
    os << prefix << format_instr(oc.program[pc], oc.hier, labels) << '\n';
  }

  os << "%% start\n";
  emit_block(os, oc.start, oc.hier);
  for (const auto& e : oc.epsilons) {
    os << "%% empty\n";
    emit_block(os, e, oc.hier);
  }
  for (const auto& [word, block] : oc.lexicon) {
    os << "%% lexicon word " << word << '\n';
    emit_block(os, block, oc.hier);
  }
  return os.str();
}

namespace {

struct RawLine {
  std::string label;  // without ':'
  std::string text;   // mnemonic + operands
};

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int parse_reg(const std::string& s) {
  if (s.size() < 2 || s[0] != 'X') throw ObjectFormatError("expected register, got: " + s);
  return std::stoi(s.substr(1));
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(strip(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!strip(cur).empty()) out.push_back(strip(cur));
  return out;
}

Instr parse_instr(const std::string& line, const TypeHierarchy& h,
                  const std::map<std::string, int32_t>& label_pcs) {
  std::string mnemonic, rest;
  size_t sp = line.find_first_of(" \t");
  if (sp == std::string::npos) {
    mnemonic = line;
  } else {
    mnemonic = line.substr(0, sp);
    rest = strip(line.substr(sp + 1));
  }
  Op op{};
  bool found = false;
  for (const auto& oi : kOps)
    if (mnemonic == oi.name) { op = oi.op; found = true; break; }
  if (!found) throw ObjectFormatError("unknown mnemonic: " + mnemonic);

  Instr in;
  in.op = op;
  auto label = [&label_pcs](const std::string& s) {
    auto it = label_pcs.find(s);
    if (it == label_pcs.end()) throw ObjectFormatError("undefined label: " + s);
    return it->second;
  };
  auto typed = [&h](const std::string& s, Instr& out) {
    size_t slash = s.find('/');
    if (slash == std::string::npos) {
      out.a = h.type_by_name(s).v;
      out.b = h.arity(TypeId{out.a});
    } else {
      out.a = h.type_by_name(s.substr(0, slash)).v;
      out.b = std::stoi(s.substr(slash + 1));
    }
  };
  std::vector<std::string> ops = split_commas(rest);
  switch (op) {
    case Op::PutNode:
    case Op::GetStructure:
    case Op::PutVar:
    case Op::GetVar:
      typed(ops.at(0), in);
      in.c = parse_reg(ops.at(1));
      break;
    case Op::PutArc:
      in.a = parse_reg(ops.at(0));
      in.b = std::stoi(ops.at(1));
      in.c = parse_reg(ops.at(2));
      break;
    case Op::Proceed:
    case Op::SameWord:
    case Op::UnifyVariable:
    case Op::UnifyValue:
    case Op::LoadFs:
    case Op::CopyCompleteEdge:
      in.a = parse_reg(ops.at(0));
      break;
    case Op::BuildStr:
    case Op::BuildVar:
      in.a = h.type_by_name(ops.at(0)).v;
      break;
    case Op::BuildRef:
    case Op::BuildRefAndUnify:
    case Op::UnifyFeat:
      in.a = std::stoi(ops.at(0));
      break;
    case Op::PutRule:
    case Op::CheckKey:
    case Op::TstActiveEdges:
    case Op::NextActiveEdge:
    case Op::TstCompleteEdges:
    case Op::NextCompleteEdge:
    case Op::CopyActiveEdge:
      in.a = label(ops.at(0));
      break;
    case Op::EvalGoal: {
      // union(X5,X9,X12)
      size_t lp = rest.find('(');
      size_t rp = rest.rfind(')');
      if (lp == std::string::npos || rp == std::string::npos)
        throw ObjectFormatError("malformed goal directive: " + rest);
      std::string name = strip(rest.substr(0, lp));
      in.a = name == "append" ? static_cast<int32_t>(GoalId::Append)
             : name == "union"
                 ? static_cast<int32_t>(GoalId::Union)
                 : throw ObjectFormatError("unknown goal: " + name);
      auto args = split_commas(rest.substr(lp + 1, rp - lp - 1));
      if (args.size() != 3) throw ObjectFormatError("goal needs 3 arguments: " + rest);
      in.b = parse_reg(args[0]);
      in.c = parse_reg(args[1]);
      in.d = parse_reg(args[2]);
      break;
    }
    default:
      break;
  }
  return in;
}

int first_register(const std::vector<Instr>& code) {
  for (const Instr& in : code)
    if (in.op == Op::PutNode || in.op == Op::PutVar) return in.c;
  return 1;
}

}  // namespace

ObjectCode load_object(const std::string& text) {
  enum class Section { None, Types, Rules, Start, Empty, Lexicon };
  Section section = Section::None;

  std::vector<std::string> type_lines;
  std::vector<RawLine> program_lines;
  std::vector<std::vector<std::string>> empty_blocks;
  std::vector<std::string> start_lines;
  std::vector<std::pair<std::string, std::vector<std::string>>> lex_blocks;

  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    size_t sc = line.find(';');
    if (sc != std::string::npos) line = line.substr(0, sc);
    std::string t = strip(line);
    if (t.empty()) continue;
    if (t.rfind("%%", 0) == 0) {
      std::string head = strip(t.substr(2));
      if (head == "types") section = Section::Types;
      else if (head == "rules") section = Section::Rules;
      else if (head == "start") section = Section::Start;
      else if (head == "empty") { section = Section::Empty; empty_blocks.emplace_back(); }
      else if (head.rfind("lexicon word ", 0) == 0) {
        section = Section::Lexicon;
        lex_blocks.emplace_back(strip(head.substr(13)), std::vector<std::string>{});
      } else {
        throw ObjectFormatError("unknown section: " + head);
      }
      continue;
    }
    switch (section) {
      case Section::Types:
        type_lines.push_back(t);
        break;
      case Section::Rules: {
        RawLine rl;
        size_t colon = t.find(':');
        size_t sp = t.find_first_of(" \t");
        if (colon != std::string::npos && (sp == std::string::npos || colon < sp)) {
          rl.label = strip(t.substr(0, colon));
          rl.text = strip(t.substr(colon + 1));
        } else {
          rl.text = t;
        }
        program_lines.push_back(std::move(rl));
        break;
      }
      case Section::Start:
        start_lines.push_back(t);
        break;
      case Section::Empty:
        empty_blocks.back().push_back(t);
        break;
      case Section::Lexicon:
        lex_blocks.back().second.push_back(t);
        break;
      case Section::None:
        throw ObjectFormatError("instruction outside any section: " + t);
    }
  }

  ObjectCode oc;
  std::string types_src;
  for (const auto& tl : type_lines) types_src += tl + "\n";
  oc.hier = compile_hierarchy(parse_type_statements(types_src));
  oc.unify_table = compile_type_table(oc.hier);

  std::map<std::string, int32_t> label_pcs;
  for (size_t pc = 0; pc < program_lines.size(); ++pc)
    if (!program_lines[pc].label.empty())
      label_pcs[program_lines[pc].label] = static_cast<int32_t>(pc);
  for (const auto& rl : program_lines)
    oc.program.push_back(parse_instr(rl.text, oc.hier, label_pcs));

  static const std::map<std::string, int32_t> no_labels;
  auto parse_block = [&oc](const std::vector<std::string>& lines) {
    CodeBlock b;
    for (const auto& l : lines) b.code.push_back(parse_instr(l, oc.hier, no_labels));
    b.root_reg = first_register(b.code);
    return b;
  };
  oc.start = parse_block(start_lines);
  for (const auto& e : empty_blocks) oc.epsilons.push_back(parse_block(e));
  for (const auto& [w, lines] : lex_blocks) oc.lexicon.emplace_back(w, parse_block(lines));
  return oc;
}

std::string format_instruction(const Instr& in, const TypeHierarchy& h) {
  if (is_branch(in.op)) {
    std::map<int32_t, std::string> lbl{{in.a, "@" + std::to_string(in.a)}};
    return format_instr(in, h, lbl);
  }
  static const std::map<int32_t, std::string> no_labels;
  return format_instr(in, h, no_labels);
}

std::map<std::string, int32_t> program_labels(const ObjectCode& oc) {
  std::map<int32_t, std::string> labels;
  for (const Instr& in : oc.program)
    if (is_branch(in.op)) labels.emplace(in.a, "");
  int k = 1;
  std::map<std::string, int32_t> out;
  for (auto& [pc, name] : labels) out.emplace("L" + std::to_string(k++), pc);
  return out;
}

std::string print_type_fn(const ObjectCode& oc, TypeId t1, TypeId t2) {
  std::ostringstream os;
  os << "unify_type[" << oc.hier.type_name(t1) << ',' << oc.hier.type_name(t2) << "]";
  const TypeFn& fn = oc.unify_fn(t1, t2);
  if (fn.fail) {
    os << " FAIL\n";
    return os.str();
  }
  os << '\n';
  static const std::map<int32_t, std::string> no_labels;
  for (const Instr& in : fn.code) os << "    " << format_instr(in, oc.hier, no_labels) << '\n';
  return os.str();
}

}  // namespace amalia
