#include "syncpat/parser.hpp"

#include <cctype>
#include <cstring>
#include <functional>
#include <sstream>

namespace syncpat {

namespace {

enum class Tok {
  End, Zero, OkTok, Ident, LParen, RParen, LBrack, RBrack, LAngle, RAngle,
  Pipe, PipeGt, Plus, Bang, Dot, Query, Nu, In, Out, Open, CoIn, CoOut,
  CoOpen, Tau, Def, And, InKw,
};

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1, col = 1;

  explicit Lexer(const std::string& s) : src(s) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line, col);
  }

  void advance(size_t n) {
    for (size_t i = 0; i < n && pos < src.size(); ++i, ++pos) {
      if (src[pos] == '\n') { ++line; col = 1; } else ++col;
    }
  }

  void skip_ws() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == '#') {
        while (pos < src.size() && src[pos] != '\n') advance(1);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else {
        break;
      }
    }
  }

  bool starts_with(const char* s) const {
    return src.compare(pos, std::strlen(s), s) == 0;
  }

  Token next() {
    skip_ws();
    Token t{Tok::End, "", line, col};
    if (pos >= src.size()) return t;
    char c = src[pos];
    auto one = [&](Tok k) { t.kind = k; t.text = c; advance(1); return t; };
    switch (c) {
      case '(': return one(Tok::LParen);
      case ')': return one(Tok::RParen);
      case '[': return one(Tok::LBrack);
      case ']': return one(Tok::RBrack);
      case '<': return one(Tok::LAngle);
      case '>': return one(Tok::RAngle);
      case '+': return one(Tok::Plus);
      case '!': return one(Tok::Bang);
      case '.': return one(Tok::Dot);
      case '?': return one(Tok::Query);
      case '0': t.kind = Tok::Zero; t.text = "0"; advance(1); return t;
      case '|':
        if (pos + 1 < src.size() && src[pos + 1] == '>') {
          t.kind = Tok::PipeGt; t.text = "|>"; advance(2); return t;
        }
        return one(Tok::Pipe);
      default: break;
    }
    if (starts_with("co-in")) { t.kind = Tok::CoIn; t.text = "co-in"; advance(5); return t; }
    if (starts_with("co-out")) { t.kind = Tok::CoOut; t.text = "co-out"; advance(6); return t; }
    if (starts_with("co-open")) { t.kind = Tok::CoOpen; t.text = "co-open"; advance(7); return t; }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (pos < src.size()) {
        char d = src[pos];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '\'') {
          id += d;
          advance(1);
        } else {
          break;
        }
      }
      t.text = id;
      if (id == "ok") t.kind = Tok::OkTok;
      else if (id == "nu") t.kind = Tok::Nu;
      else if (id == "in") t.kind = Tok::In;
      else if (id == "out") t.kind = Tok::Out;
      else if (id == "open") t.kind = Tok::Open;
      else if (id == "tau") t.kind = Tok::Tau;
      else if (id == "def") t.kind = Tok::Def;
      else if (id == "and") t.kind = Tok::And;
      else t.kind = Tok::Ident;
      return t;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

struct Parser {
  Lexer lex;
  Token cur;
  Calculus cal;

  Parser(const std::string& s, Calculus c) : lex(s), cal(c) { cur = lex.next(); }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, cur.line, cur.col);
  }

  bool is_ma() const { return cal == Calculus::MA || cal == Calculus::SA; }
  bool is_pi() const {
    return cal == Calculus::PiMix || cal == Calculus::PiSep || cal == Calculus::PiAsyn;
  }

  void bump() { cur = lex.next(); }

  void expect(Tok k, const char* what) {
    if (cur.kind != k) fail(std::string("expected ") + what);
    bump();
  }

  Name name_tok() {
    if (cur.kind != Tok::Ident) fail("expected a name");
    Name n{cur.text, 0};
    bump();
    return n;
  }

  bool at_stop() const {
    switch (cur.kind) {
      case Tok::End: case Tok::RParen: case Tok::RBrack:
      case Tok::And: case Tok::In: case Tok::PipeGt:
        return true;
      default:
        return false;
    }
  }

  // parallel := factor ("|" factor)*   ("+" handled inside pi factors)
  NodePtr parallel() {
    std::vector<NodePtr> parts;
    parts.push_back(factor());
    while (cur.kind == Tok::Pipe) {
      bump();
      parts.push_back(factor());
    }
    return par(std::move(parts));
  }

  NodePtr continuation() {
    // Optional `. P`; omitted continuations default to 0. A continuation
    // never extends across '+': the branch guard owns only one factor.
    if (cur.kind == Tok::Dot) {
      bump();
      if (!is_ma() && cal != Calculus::Join &&
          (cur.kind == Tok::Ident || cur.kind == Tok::Tau))
        return pi_sum(false);
      return factor();
    }
    return nil();
  }

  NodePtr factor() {
    switch (cur.kind) {
      case Tok::Zero: bump(); return nil();
      case Tok::OkTok: bump(); return ok();
      case Tok::LParen: {
        bump();
        if (cur.kind == Tok::Nu) {
          if (cal == Calculus::Join) fail("restriction is not part of the join grammar");
          bump();
          Name n = name_tok();
          expect(Tok::RParen, "')'");
          return nu(n, parallel());  // restriction extends as far right as possible
        }
        NodePtr t = parallel();
        expect(Tok::RParen, "')'");
        return t;
      }
      case Tok::Bang: {
        if (cal == Calculus::Join) fail("replication is not part of the join grammar");
        bump();
        return bang(factor());
      }
      case Tok::In: case Tok::Out: case Tok::Open:
      case Tok::CoIn: case Tok::CoOut: case Tok::CoOpen: {
        if (!is_ma()) fail("action prefix outside ma/sa");
        CapKind k = cur.kind == Tok::In ? CapKind::In
                  : cur.kind == Tok::Out ? CapKind::Out
                  : cur.kind == Tok::Open ? CapKind::Open
                  : cur.kind == Tok::CoIn ? CapKind::CoIn
                  : cur.kind == Tok::CoOut ? CapKind::CoOut
                                           : CapKind::CoOpen;
        if (cal != Calculus::SA &&
            (k == CapKind::CoIn || k == CapKind::CoOut || k == CapKind::CoOpen))
          fail("co-actions are sa-only");
        bump();
        Name n = name_tok();
        return prefix(k, n, continuation());
      }
      case Tok::Def: {
        if (cal != Calculus::Join) fail("'def' outside join");
        bump();
        std::vector<JRule> rules;
        rules.push_back(jrule());
        while (cur.kind == Tok::And) {
          bump();
          rules.push_back(jrule());
        }
        expect(Tok::In, "'in'");
        return jdef(std::move(rules), parallel());
      }
      case Tok::Tau: {
        if (cal != Calculus::PiMix && cal != Calculus::PiSep && cal != Calculus::PiAsyn)
          fail("tau outside pi");
        return pi_sum();
      }
      case Tok::Ident: {
        if (is_ma()) {
          Name n = name_tok();
          expect(Tok::LBrack, "'['");
          NodePtr body = cur.kind == Tok::RBrack ? nil() : parallel();
          expect(Tok::RBrack, "']'");
          return amb(n, body);
        }
        if (cal == Calculus::Join) {
          Name chan = name_tok();
          expect(Tok::LAngle, "'<'");
          std::optional<Name> obj;
          if (cur.kind != Tok::RAngle) obj = name_tok();
          expect(Tok::RAngle, "'>'");
          return msg(chan, obj);
        }
        return pi_sum();
      }
      default:
        fail("expected a process term");
    }
  }

  JRule jrule() {
    JRule r;
    r.patterns.push_back(jpattern());
    while (cur.kind == Tok::Pipe) {
      bump();
      r.patterns.push_back(jpattern());
    }
    expect(Tok::PipeGt, "'|>'");
    // The rule body stops at 'and' / 'in'.
    r.body = parallel();
    return r;
  }

  JPattern jpattern() {
    JPattern p;
    p.chan = name_tok();
    expect(Tok::LAngle, "'<'");
    if (cur.kind != Tok::RAngle) p.var = name_tok();
    expect(Tok::RAngle, "'>'");
    return p;
  }

  // sum := guarded ("+" guarded)*
  NodePtr pi_sum(bool allow_plus = true) {
    std::vector<Branch> branches;
    bool first_atom = false;
    branches.push_back(pi_guarded(&first_atom));
    if (cal == Calculus::PiAsyn && first_atom) {
      // Atomic output.
      const Branch& b = branches[0];
      return msg(b.chan, b.obj);
    }
    while (allow_plus && cur.kind == Tok::Plus) {
      if (cal == Calculus::PiAsyn) fail("choice in pi-asyn");
      bump();
      bool atom = false;
      branches.push_back(pi_guarded(&atom));
    }
    if (cal == Calculus::PiSep) {
      bool any_in = false, any_out = false;
      for (auto& b : branches) {
        any_in |= b.kind == GuardKind::Input;
        any_out |= b.kind == GuardKind::Output;
      }
      if (any_in && any_out) fail("mixed sum under pi-sep");
    }
    return sum(std::move(branches));
  }

  Branch pi_guarded(bool* output_atom) {
    Branch b;
    *output_atom = false;
    if (cur.kind == Tok::Tau) {
      bump();
      b.kind = GuardKind::Tau;
      b.cont = continuation();
      return b;
    }
    b.chan = name_tok();
    if (cur.kind == Tok::Bang) {
      bump();
      b.kind = GuardKind::Output;
      expect(Tok::LAngle, "'<'");
      if (cur.kind != Tok::RAngle) b.obj = name_tok();
      expect(Tok::RAngle, "'>'");
      if (cal == Calculus::PiAsyn) {
        if (cur.kind == Tok::Dot) fail("output with continuation in pi-asyn");
        b.cont = nil();
        *output_atom = true;
        return b;
      }
      b.cont = continuation();
      return b;
    }
    if (cur.kind == Tok::Query) {
      bump();
      b.kind = GuardKind::Input;
      expect(Tok::LParen, "'('");
      if (cur.kind != Tok::RParen) b.obj = name_tok();
      expect(Tok::RParen, "')'");
      b.cont = continuation();
      return b;
    }
    fail("expected '!' or '?' after channel name");
  }

  NodePtr top() {
    NodePtr t = parallel();
    if (cur.kind != Tok::End) fail("trailing input after term");
    return t;
  }
};

}  // namespace

Term parse(const std::string& text, Calculus cal) {
  Parser p(text, cal);
  Term t{cal, p.top()};
  if (auto e = grammar_violation(t)) throw ParseError(*e, 1, 1);
  return assign_labels(t);
}

Term parse_file(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::string header;
  std::string body;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    std::string code = hash == std::string::npos ? line : line.substr(0, hash);
    bool blank = code.find_first_not_of(" \t\r") == std::string::npos;
    if (!have_header) {
      if (blank) continue;
      header = code;
      have_header = true;
    } else {
      body += line;
      body += '\n';
    }
  }
  if (!have_header) throw ParseError("missing %calculus header", lineno, 1);
  std::istringstream hs(header);
  std::string tag, id;
  hs >> tag >> id;
  if (tag != "%calculus") throw ParseError("expected '%calculus <id>' header", 1, 1);
  auto cal = calculus_from_id(id);
  if (!cal) throw ParseError("unknown calculus id '" + id + "'", 1, 1);
  return parse(body, *cal);
}

// --- renderer ----------------------------------------------------------

namespace {

// Precedence levels: 1 parallel / right-extending binders, 2 choice,
// 3 prefixes, 4 atoms.
void render_rec(const NodePtr& n, Calculus cal, int ctx, std::string& out);

void wrap(const NodePtr& n, Calculus cal, int prec, int ctx, std::string& out,
          const std::function<void(std::string&)>& body) {
  (void)n; (void)cal;
  if (prec < ctx) out += '(';
  body(out);
  if (prec < ctx) out += ')';
}

void render_branch(const Branch& b, Calculus cal, std::string& out) {
  if (b.kind == GuardKind::Tau) {
    out += "tau";
  } else if (b.kind == GuardKind::Output) {
    out += b.chan.str();
    out += "!<";
    if (b.obj) out += b.obj->str();
    out += '>';
  } else {
    out += b.chan.str();
    out += "?(";
    if (b.obj) out += b.obj->str();
    out += ')';
  }
  if (!b.cont->is<Nil>()) {
    out += '.';
    render_rec(b.cont, cal, 3, out);
  }
}

void render_rec(const NodePtr& n, Calculus cal, int ctx, std::string& out) {
  if (n->is<Nil>()) { out += '0'; return; }
  if (n->is<Ok>()) { out += "ok"; return; }
  if (auto* p = n->get<Par>()) {
    wrap(n, cal, 1, ctx, out, [&](std::string& o) {
      for (size_t i = 0; i < p->parts.size(); ++i) {
        if (i) o += " | ";
        render_rec(p->parts[i], cal, 2, o);
      }
    });
    return;
  }
  if (auto* r = n->get<Nu>()) {
    wrap(n, cal, 1, ctx, out, [&](std::string& o) {
      o += "(nu ";
      o += r->name.str();
      o += ") ";
      render_rec(r->body, cal, 1, o);
    });
    return;
  }
  if (auto* b = n->get<Bang>()) {
    out += '!';
    render_rec(b->body, cal, 4, out);
    return;
  }
  if (auto* a = n->get<Amb>()) {
    out += a->name.str();
    out += '[';
    if (!a->body->is<Nil>()) render_rec(a->body, cal, 1, out);
    out += ']';
    return;
  }
  if (auto* p = n->get<Prefix>()) {
    wrap(n, cal, 3, ctx, out, [&](std::string& o) {
      o += cap_kind_id(p->cap);
      o += ' ';
      o += p->name.str();
      if (!p->cont->is<Nil>()) {
        o += '.';
        render_rec(p->cont, cal, 3, o);
      }
    });
    return;
  }
  if (auto* s = n->get<Sum>()) {
    int prec = s->branches.size() > 1 ? 2 : 3;
    wrap(n, cal, prec, ctx, out, [&](std::string& o) {
      for (size_t i = 0; i < s->branches.size(); ++i) {
        if (i) o += " + ";
        render_branch(s->branches[i], cal, o);
      }
    });
    return;
  }
  if (auto* m = n->get<Msg>()) {
    out += m->chan.str();
    if (cal == Calculus::PiAsyn) out += '!';
    out += '<';
    if (m->obj) out += m->obj->str();
    out += '>';
    return;
  }
  if (auto* d = n->get<JDef>()) {
    wrap(n, cal, 1, ctx, out, [&](std::string& o) {
      o += "def ";
      for (size_t i = 0; i < d->rules.size(); ++i) {
        if (i) o += " and ";
        auto& r = d->rules[i];
        for (size_t j = 0; j < r.patterns.size(); ++j) {
          if (j) o += " | ";
          o += r.patterns[j].chan.str();
          o += '<';
          if (r.patterns[j].var) o += r.patterns[j].var->str();
          o += '>';
        }
        o += " |> ";
        render_rec(r.body, cal, 2, o);
      }
      o += " in ";
      render_rec(d->main, cal, 1, o);
    });
    return;
  }
  out += "?";
}

}  // namespace

std::string render(const NodePtr& n, Calculus cal) {
  std::string out;
  render_rec(n, cal, 0, out);
  return out;
}

std::string render(const Term& t) { return render(t.root, t.cal); }

}  // namespace syncpat
