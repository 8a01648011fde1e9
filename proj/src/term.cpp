#include "amalia/term.hpp"

#include <cctype>
#include <map>
#include <sstream>

namespace amalia {

namespace {

struct TermParser {
  const std::string& s;
  const TypeHierarchy& h;
  size_t pos = 0;
  std::map<int, bool> tags_seen;  // tag -> had a dependent occurrence

  explicit TermParser(const std::string& text, const TypeHierarchy& hier) : s(text), h(hier) {}

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) { ++pos; return true; }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) throw TermSyntaxError(std::string("expected '") + c + "' at offset " +
                                       std::to_string(pos) + " in term: " + s);
  }

  bool at_end() { skip_ws(); return pos >= s.size(); }

  std::string ident() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size()) {
      char c = s[pos];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$' || c == '^')
        ++pos;
      else
        break;
    }
    if (start == pos)
      throw TermSyntaxError("expected identifier at offset " + std::to_string(pos) +
                            " in term: " + s);
    return s.substr(start, pos - start);
  }

  int number() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (start == pos) throw TermSyntaxError("expected number at offset " + std::to_string(pos));
    return std::stoi(s.substr(start, pos - start));
  }

  Term term() {
    Term t;
    skip_ws();
    if (eat('<')) {
      t.tag = number();
      expect('>');
      skip_ws();
      bool fresh = tags_seen.emplace(t.tag, false).second;
      // an independent occurrence is a bare tag
      if (pos >= s.size() || s[pos] == ',' || s[pos] == ')' || s[pos] == ';') {
        if (fresh) {
          // first occurrence as bare tag: most general, type bot
          t.type = BOTTOM;
          t.partial = true;
          tags_seen[t.tag] = true;
        }
        t.tag_only = !fresh;
        if (!fresh) return t;
        return t;
      }
      if (tags_seen[t.tag])
        throw TermSyntaxError("tag <" + std::to_string(t.tag) +
                              "> has more than one dependent occurrence");
      tags_seen[t.tag] = true;
    }
    std::string name = ident();
    t.type = h.type_by_name(name);
    if (eat('(')) {
      if (!eat(')')) {
        do {
          t.args.push_back(term());
        } while (eat(','));
        expect(')');
      }
      int ar = h.arity(t.type);
      if (static_cast<int>(t.args.size()) != ar)
        throw TermSyntaxError("type " + name + " has arity " + std::to_string(ar) + " but " +
                              std::to_string(t.args.size()) + " arguments were given");
    } else {
      t.partial = true;
    }
    return t;
  }
};

void collect_tag_counts(const Term& t, std::map<int, int>& counts) {
  if (t.tag != 0) ++counts[t.tag];
  for (const auto& a : t.args) collect_tag_counts(a, counts);
}

void print_rec(const Term& t, const TypeHierarchy& h, const std::map<int, int>& counts,
               std::map<int, int>& renumber, std::ostream& os) {
  if (t.tag_only) {
    os << '<' << renumber.at(t.tag) << '>';
    return;
  }
  if (t.tag != 0 && counts.at(t.tag) > 1) {
    auto [it, fresh] = renumber.emplace(t.tag, static_cast<int>(renumber.size()) + 1);
    os << '<' << it->second << '>';
    (void)fresh;
  }
  os << h.type_name(t.type);
  if (!t.args.empty()) {
    os << '(';
    for (size_t i = 0; i < t.args.size(); ++i) {
      if (i) os << ',';
      print_rec(t.args[i], h, counts, renumber, os);
    }
    os << ')';
  }
}

}  // namespace

Term parse_term(const std::string& text, const TypeHierarchy& h) {
  TermParser p(text, h);
  Term t = p.term();
  if (!p.at_end()) throw TermSyntaxError("trailing input in term: " + text);
  return t;
}

std::vector<Term> parse_multi_term(const std::string& text, const TypeHierarchy& h) {
  TermParser p(text, h);
  std::vector<Term> ts;
  do {
    ts.push_back(p.term());
  } while (p.eat(';'));
  if (!p.at_end()) throw TermSyntaxError("trailing input in multi-term: " + text);
  return ts;
}

std::string print_term(const Term& t, const TypeHierarchy& h) {
  std::map<int, int> counts;
  collect_tag_counts(t, counts);
  std::map<int, int> renumber;
  std::ostringstream os;
  print_rec(t, h, counts, renumber, os);
  return os.str();
}

std::string print_multi_term(const std::vector<Term>& ts, const TypeHierarchy& h) {
  std::map<int, int> counts;
  for (const auto& t : ts) collect_tag_counts(t, counts);
  std::map<int, int> renumber;
  std::ostringstream os;
  for (size_t i = 0; i < ts.size(); ++i) {
    if (i) os << " ; ";
    print_rec(ts[i], h, counts, renumber, os);
  }
  return os.str();
}

}  // namespace amalia
