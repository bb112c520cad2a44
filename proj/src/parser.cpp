#include "sill/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace sill {

std::string ParseError::render(std::string_view file) const {
  const char* k = kind_ == Kind::syntax ? "parse error" : kind_ == Kind::name ? "name error" : "linearity";
  std::ostringstream os;
  os << file << ":" << pos_.line << ":" << pos_.col << ": " << k << ": " << what();
  return os.str();
}

namespace {

struct Token {
  enum class Type { ident, number, sym, end } type = Type::end;
  std::string text;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip();
      Token t;
      t.pos = {line_, col_};
      if (i_ >= src_.size()) {
        t.type = Token::Type::end;
        out.push_back(t);
        return out;
      }
      char c = src_[i_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t s = i_;
        while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_' ||
                                    src_[i_] == '\'' || src_[i_] == '$'))
          advance(1);
        t.type = Token::Type::ident;
        t.text = std::string(src_.substr(s, i_ - s));
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t s = i_;
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) advance(1);
        t.type = Token::Type::number;
        t.text = std::string(src_.substr(s, i_ - s));
      } else {
        t.type = Token::Type::sym;
        t.text = symbol(t.pos);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance(std::size_t n) {
    for (std::size_t k = 0; k < n && i_ < src_.size(); ++k) {
      unsigned char c = static_cast<unsigned char>(src_[i_]);
      if (src_[i_] == '\n') {
        ++line_;
        col_ = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++col_;
      }
      ++i_;
    }
  }

  void skip() {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance(1);
      } else if (c == '/' && i_ + 1 < src_.size() && src_[i_ + 1] == '/') {
        while (i_ < src_.size() && src_[i_] != '\n') advance(1);
      } else {
        break;
      }
    }
  }

  std::string symbol(SourcePos pos) {
    static const std::pair<const char*, const char*> multi[] = {
        {"::", "::"}, {"<-", "<-"}, {"<=", "<="}, {">=", ">="}, {"=>", "=>"}, {"-o", "-o"},
        {"\\/", "\\/"}, {"/\\", "/\\"}, {"⊔", "\\/"}, {"⊓", "/\\"}, {"⊑", "<="},
        {"⊗", "*"}, {"⊸", "-o"}, {"⊕", "+"}, {"←", "<-"}};
    for (const auto& [pat, canon] : multi) {
      std::string_view p(pat);
      if (src_.substr(i_, p.size()) == p) {
        advance(p.size());
        return canon;
      }
    }
    static const std::string singles = "=;:,(){}[].@|*+&";
    char c = src_[i_];
    if (singles.find(c) != std::string::npos) {
      advance(1);
      return std::string(1, c);
    }
    throw ParseError(ParseError::Kind::syntax, pos, std::string("unexpected character `") + c + "`");
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

const std::set<std::string> kKeywords = {"level", "order", "type", "proc", "config", "close", "wait",
                                         "case",  "send",  "recv", "fwd",  "below",  "above"};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program run() {
    Program prog;
    while (!at_end()) {
      if (is_kw("level")) {
        next();
        do {
          auto t = ident("level name");
          for (const auto& l : prog.sig.level_decls)
            if (l == t.text) throw ParseError(ParseError::Kind::name, t.pos, "duplicate level `" + t.text + "`");
          prog.sig.level_decls.push_back(t.text);
        } while (accept(","));
        expect(";");
      } else if (is_kw("order")) {
        next();
        auto a = ident("level name");
        std::string prev = a.text;
        expect("<=");
        do {
          auto b = ident("level name");
          prog.sig.order_decls.emplace_back(prev, b.text);
          order_pos_.push_back(b.pos);
          prev = b.text;
        } while (accept("<="));
        expect(";");
      } else if (is_kw("type")) {
        next();
        auto n = ident("type name");
        if (prog.sig.types.contains(n.text))
          throw ParseError(ParseError::Kind::name, n.pos, "duplicate type definition `" + n.text + "`");
        expect("=");
        prog.sig.types.define(n.text, type());
        type_pos_[n.text] = n.pos;
        accept(";");
      } else if (is_kw("proc")) {
        ProcDef d = proc();
        if (prog.sig.procs.count(d.name))
          throw ParseError(ParseError::Kind::name, d.pos, "duplicate process definition `" + d.name + "`");
        prog.sig.proc_order.push_back(d.name);
        prog.sig.procs.emplace(d.name, std::move(d));
      } else if (is_kw("config")) {
        ConfigDecl c = config();
        if (prog.find_config(c.name))
          throw ParseError(ParseError::Kind::name, c.pos, "duplicate configuration `" + c.name + "`");
        prog.configs.push_back(std::move(c));
      } else {
        fail("expected `level`, `order`, `type`, `proc` or `config`");
      }
    }
    elaborate(prog);
    return prog;
  }

 private:
  // ---- token helpers

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(p_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().type == Token::Type::end; }
  Token next() { return toks_[p_ < toks_.size() - 1 ? p_++ : p_]; }
  bool is_sym(const char* s, std::size_t k = 0) const {
    return peek(k).type == Token::Type::sym && peek(k).text == s;
  }
  bool is_kw(const char* s) const { return peek().type == Token::Type::ident && peek().text == s; }
  bool accept(const char* s) {
    if (is_sym(s)) {
      next();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    std::string got = at_end() ? "end of input" : "`" + peek().text + "`";
    throw ParseError(ParseError::Kind::syntax, peek().pos, msg + ", got " + got);
  }
  void expect(const char* s) {
    if (!accept(s)) fail(std::string("expected `") + s + "`");
  }
  Token ident(const char* what) {
    if (peek().type != Token::Type::ident || kKeywords.count(peek().text))
      fail(std::string("expected ") + what);
    return next();
  }
  void expect_kw(const char* kw) {
    if (!is_kw(kw)) fail(std::string("expected `") + kw + "`");
    next();
  }

  // ---- secrecy terms; identifiers are resolved to levels in elaborate()

  SecTerm sec_atom() {
    if (accept("(")) {
      SecTerm t = sec();
      expect(")");
      return t;
    }
    return SecTerm::var(ident("secrecy level or variable").text);
  }

  SecTerm sec() {
    SecTerm acc = sec_atom();
    for (;;) {
      SecTerm::Kind k;
      if (is_sym("\\/")) k = SecTerm::Kind::join;
      else if (is_sym("/\\")) k = SecTerm::Kind::meet;
      else return acc;
      next();
      std::vector<SecTerm> ops{acc, sec_atom()};
      while (is_sym(k == SecTerm::Kind::join ? "\\/" : "/\\")) {
        next();
        ops.push_back(sec_atom());
      }
      acc = SecTerm::nary(k, std::move(ops));
    }
  }

  // ---- types

  TypeRef type() {
    TypeRef left = type_atom();
    SourcePos pos = peek().pos;
    if (accept("*")) return SessionType::tensor(left, type(), pos);
    if (accept("-o")) return SessionType::lolli(left, type(), pos);
    return left;
  }

  TypeRef type_atom() {
    SourcePos pos = peek().pos;
    if (peek().type == Token::Type::number) {
      if (peek().text != "1") fail("expected type");
      next();
      return SessionType::one(pos);
    }
    if (accept("(")) {
      TypeRef t = type();
      expect(")");
      return t;
    }
    if (accept("+")) return SessionType::plus(branches(), pos);
    if (accept("&")) return SessionType::with(branches(), pos);
    auto n = ident("type");
    type_refs_.emplace_back(n.text, n.pos);
    return SessionType::named(n.text, pos);
  }

  Branches branches() {
    expect("{");
    Branches bs;
    std::set<std::string> seen;
    do {
      auto l = ident("label");
      if (!seen.insert(l.text).second)
        throw ParseError(ParseError::Kind::name, l.pos, "duplicate label `" + l.text + "`");
      expect(":");
      bs.emplace_back(l.text, type());
    } while (accept(","));
    expect("}");
    return bs;
  }

  ChannelDecl chan_decl() {
    auto n = ident("channel name");
    expect(":");
    ChannelDecl d;
    d.name = n.text;
    d.pos = n.pos;
    d.type = type();
    expect("[");
    d.sec = sec();
    expect("]");
    return d;
  }

  // ---- definitions

  ProcDef proc() {
    expect_kw("proc");
    auto n = ident("process name");
    ProcDef d;
    d.name = n.text;
    d.pos = n.pos;
    expect("[");
    if (!is_sym("]")) {
      do {
        SecTerm a = sec();
        if (accept("<=")) {
          d.psi.constraints.push_back({a, sec()});
        } else if (accept(">=")) {
          d.psi.constraints.push_back({sec(), a});
        } else if (accept("=")) {
          SecTerm b = sec();
          d.psi.constraints.push_back({a, b});
          d.psi.constraints.push_back({b, a});
        } else {
          fail("expected `<=`, `>=` or `=` in constraint");
        }
      } while (accept(","));
    }
    expect("]");
    expect("(");
    if (!is_sym(")")) {
      do d.ctx.push_back(chan_decl());
      while (accept(","));
    }
    expect(")");
    expect("@");
    d.running = sec();
    expect("::");
    d.offered = chan_decl();
    expect("=");
    d.body = term();
    accept(";");
    return d;
  }

  ConfigDecl config() {
    expect_kw("config");
    auto n = ident("configuration name");
    ConfigDecl c;
    c.name = n.text;
    c.pos = n.pos;
    expect("{");
    while (!accept("}")) {
      ConfigLine line;
      line.pos = peek().pos;
      if (is_kw("below")) {
        next();
        line.part = Part::below;
      } else if (is_kw("above")) {
        next();
        line.part = Part::above;
      }
      line.chan = chan_decl();
      expect("<-");
      auto callee = ident("process name");
      line.callee = callee.text;
      callee_refs_.push_back({callee.text, callee.pos});
      expect("@");
      line.run = sec();
      expect("<-");
      expect("(");
      if (!is_sym(")")) {
        do {
          ConfigArg a;
          a.pos = peek().pos;
          if (is_sym(":", 1)) {
            a.dangling = chan_decl();
            a.name = a.dangling->name;
          } else {
            a.name = ident("channel name").text;
          }
          line.args.push_back(std::move(a));
        } while (accept(","));
      }
      expect(")");
      expect(";");
      c.lines.push_back(std::move(line));
    }
    return c;
  }

  // ---- process terms

  TermRef term() {
    SourcePos pos = peek().pos;
    Term t;
    t.pos = pos;
    if (accept("(")) {
      TermRef inner = term();
      expect(")");
      return inner;
    }
    if (is_kw("close")) {
      next();
      t.kind = Term::Kind::close;
      t.chan = ident("channel").text;
      return Term::finalize(std::move(t));
    }
    if (is_kw("wait")) {
      next();
      t.kind = Term::Kind::wait;
      t.chan = ident("channel").text;
      expect(";");
      t.cont = term();
      return Term::finalize(std::move(t));
    }
    if (is_kw("case")) {
      next();
      t.kind = Term::Kind::cases;
      t.chan = ident("channel").text;
      expect("(");
      std::set<std::string> seen;
      do {
        auto l = ident("label");
        if (!seen.insert(l.text).second)
          throw ParseError(ParseError::Kind::name, l.pos, "duplicate branch `" + l.text + "`");
        expect("=>");
        t.branches.emplace_back(l.text, term());
      } while (accept("|"));
      expect(")");
      std::sort(t.branches.begin(), t.branches.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      return Term::finalize(std::move(t));
    }
    if (is_kw("send")) {
      next();
      t.kind = Term::Kind::send;
      t.other = ident("channel").text;
      t.chan = ident("channel").text;
      expect(";");
      t.cont = term();
      return Term::finalize(std::move(t));
    }
    if (is_kw("fwd")) {
      next();
      t.kind = Term::Kind::fwd;
      t.chan = ident("channel").text;
      t.other = ident("channel").text;
      return Term::finalize(std::move(t));
    }
    auto x = ident("process term");
    if (accept(".")) {
      t.kind = Term::Kind::select;
      t.chan = x.text;
      t.label = ident("label").text;
      expect(";");
      t.cont = term();
      return Term::finalize(std::move(t));
    }
    if (accept("<-")) {
      expect_kw("recv");
      t.kind = Term::Kind::recv;
      t.other = x.text;
      t.chan = ident("channel").text;
      expect(";");
      t.cont = term();
      return Term::finalize(std::move(t));
    }
    if (accept(":")) {
      t.kind = Term::Kind::spawn;
      t.other = x.text;
      t.spawn_type = type();
      expect("[");
      t.spawn_max = sec();
      expect("]");
      expect("<-");
      auto callee = ident("process name");
      t.callee = callee.text;
      callee_refs_.push_back({callee.text, callee.pos});
      expect("@");
      t.spawn_run = sec();
      expect("<-");
      expect("(");
      if (!is_sym(")")) {
        do t.args.push_back(ident("channel").text);
        while (accept(","));
      }
      expect(")");
      spawn_sites_.push_back({t.callee, t.args.size(), pos});
      if (accept(";")) {
        t.cont = term();
      } else {
        // Tail call: spawn a fresh channel and forward the original to it.
        Term f;
        f.kind = Term::Kind::fwd;
        f.pos = pos;
        f.chan = x.text;
        f.other = x.text + "$";
        t.other = f.other;
        t.cont = Term::finalize(std::move(f));
      }
      return Term::finalize(std::move(t));
    }
    fail("expected process term");
  }

  // ---- elaboration: resolve levels, check names

  void elaborate(Program& prog) {
    auto& sig = prog.sig;
    try {
      sig.lattice = std::make_shared<const SecurityLattice>(
          SecurityLattice::build(sig.level_decls, sig.order_decls));
    } catch (const LatticeError& e) {
      SourcePos pos = order_pos_.empty() ? SourcePos{1, 1} : order_pos_.front();
      throw ParseError(ParseError::Kind::name, pos, e.what());
    }
    for (const auto& [n, pos] : type_refs_)
      if (!sig.types.contains(n)) throw ParseError(ParseError::Kind::name, pos, "unbound type name `" + n + "`");
    for (const auto& r : callee_refs_)
      if (!sig.procs.count(r.name))
        throw ParseError(ParseError::Kind::name, r.pos, "unbound process name `" + r.name + "`");
    for (const auto& s : spawn_sites_) {
      const auto& callee = sig.procs.at(s.callee);
      if (callee.ctx.size() != s.arity)
        throw ParseError(ParseError::Kind::name, s.pos,
                         "process `" + s.callee + "` expects " + std::to_string(callee.ctx.size()) +
                             " arguments, got " + std::to_string(s.arity));
    }
    const auto& lat = *sig.lattice;
    for (auto& [name, d] : sig.procs) {
      std::set<std::string> vars;
      auto resolve = [&](SecTerm& t, bool declare) { t = resolve_term(t, lat, declare ? &vars : nullptr); };
      for (auto& c : d.psi.constraints) {
        resolve(c.lhs, true);
        resolve(c.rhs, true);
      }
      for (auto& c : d.ctx) resolve(c.sec, true);
      resolve(d.offered.sec, true);
      resolve(d.running, true);
      d.psi.base = sig.lattice;
      d.psi.vars.assign(vars.begin(), vars.end());
      d.body = resolve_body(d.body, lat, vars);
      std::set<std::string> names;
      for (const auto& c : d.ctx)
        if (!names.insert(c.name).second)
          throw ParseError(ParseError::Kind::name, c.pos, "duplicate channel `" + c.name + "`");
      if (!names.insert(d.offered.name).second)
        throw ParseError(ParseError::Kind::name, d.offered.pos, "duplicate channel `" + d.offered.name + "`");
    }
    for (auto& c : prog.configs) {
      for (auto& line : c.lines) {
        line.chan.sec = resolve_ground(line.chan.sec, lat, line.pos);
        line.run = resolve_ground(line.run, lat, line.pos);
        for (auto& a : line.args)
          if (a.dangling) a.dangling->sec = resolve_ground(a.dangling->sec, lat, a.pos);
        const auto& callee = sig.procs.at(line.callee);
        if (callee.ctx.size() != line.args.size())
          throw ParseError(ParseError::Kind::name, line.pos,
                           "process `" + line.callee + "` expects " + std::to_string(callee.ctx.size()) +
                               " arguments, got " + std::to_string(line.args.size()));
      }
    }
    for (const auto& n : sig.proc_order) lint_linearity(sig, sig.procs.at(n));
  }

  SecTerm resolve_term(const SecTerm& t, const SecurityLattice& lat, std::set<std::string>* declare) {
    if (t.is_variable()) {
      if (auto l = lat.find(t.name())) return SecTerm::lit(*l);
      if (declare) declare->insert(t.name());
      return t;
    }
    std::vector<SecTerm> ops;
    for (const auto& op : t.operands()) ops.push_back(resolve_term(op, lat, declare));
    return t.operands().empty() ? t : SecTerm::nary(t.kind(), std::move(ops));
  }

  SecTerm resolve_ground(const SecTerm& t, const SecurityLattice& lat, SourcePos pos) {
    SecTerm r = resolve_term(t, lat, nullptr);
    std::set<std::string> vs;
    collect_vars(r, vs);
    if (!vs.empty())
      throw ParseError(ParseError::Kind::name, pos, "unknown level `" + *vs.begin() + "` in configuration");
    return r;
  }

  TermRef resolve_body(const TermRef& t, const SecurityLattice& lat, const std::set<std::string>& vars) {
    Term c = *t;
    if (c.kind == Term::Kind::spawn) {
      c.spawn_max = resolve_term(c.spawn_max, lat, nullptr);
      c.spawn_run = resolve_term(c.spawn_run, lat, nullptr);
      std::set<std::string> used;
      collect_vars(c.spawn_max, used);
      collect_vars(c.spawn_run, used);
      for (const auto& v : used)
        if (!vars.count(v)) throw ParseError(ParseError::Kind::name, c.pos, "unbound secrecy variable `" + v + "`");
    }
    for (auto& [l, b] : c.branches) b = resolve_body(b, lat, vars);
    if (c.cont) c.cont = resolve_body(c.cont, lat, vars);
    return Term::finalize(std::move(c));
  }

  struct CalleeRef {
    std::string name;
    SourcePos pos;
  };
  struct SpawnSite {
    std::string callee;
    std::size_t arity;
    SourcePos pos;
  };

  std::vector<Token> toks_;
  std::size_t p_ = 0;
  std::vector<std::pair<std::string, SourcePos>> type_refs_;
  std::map<std::string, SourcePos> type_pos_;
  std::vector<CalleeRef> callee_refs_;
  std::vector<SpawnSite> spawn_sites_;
  std::vector<SourcePos> order_pos_;
};

class Linter {
 public:
  explicit Linter(const ProcDef& d) : def_(d) {}

  void run() {
    std::set<std::string> live;
    for (const auto& c : def_.ctx) live.insert(c.name);
    live.insert(def_.offered.name);
    walk(*def_.body, live);
  }

 private:
  [[noreturn]] void error(const Term& t, const std::string& msg) const {
    throw ParseError(ParseError::Kind::linearity, t.pos, "in `" + def_.name + "`: " + msg);
  }

  void need(const Term& t, const std::set<std::string>& live, const std::string& x) const {
    if (!live.count(x)) error(t, "channel `" + x + "` is not available here (unbound or already consumed)");
  }

  void leaf(const Term& t, std::set<std::string> live, std::initializer_list<std::string> consumed) const {
    for (const auto& x : consumed) live.erase(x);
    if (!live.empty()) error(t, "channel `" + *live.begin() + "` is never used on this path");
  }

  void walk(const Term& t, std::set<std::string> live) const {
    switch (t.kind) {
      case Term::Kind::close:
        need(t, live, t.chan);
        leaf(t, live, {t.chan});
        return;
      case Term::Kind::wait:
        need(t, live, t.chan);
        live.erase(t.chan);
        walk(*t.cont, live);
        return;
      case Term::Kind::select:
        need(t, live, t.chan);
        walk(*t.cont, live);
        return;
      case Term::Kind::cases:
        need(t, live, t.chan);
        for (const auto& [l, b] : t.branches) walk(*b, live);
        return;
      case Term::Kind::send:
        need(t, live, t.chan);
        need(t, live, t.other);
        if (t.chan == t.other) error(t, "channel `" + t.chan + "` sent over itself");
        live.erase(t.other);
        walk(*t.cont, live);
        return;
      case Term::Kind::recv:
        need(t, live, t.chan);
        if (live.count(t.other)) error(t, "channel `" + t.other + "` is bound twice");
        live.insert(t.other);
        walk(*t.cont, live);
        return;
      case Term::Kind::fwd:
        need(t, live, t.chan);
        need(t, live, t.other);
        if (t.chan == t.other) error(t, "channel `" + t.chan + "` forwarded to itself");
        leaf(t, live, {t.chan, t.other});
        return;
      case Term::Kind::spawn: {
        std::set<std::string> seen;
        for (const auto& a : t.args) {
          need(t, live, a);
          if (!seen.insert(a).second) error(t, "channel `" + a + "` passed twice");
          live.erase(a);
        }
        if (live.count(t.other)) error(t, "channel `" + t.other + "` is bound twice");
        live.insert(t.other);
        walk(*t.cont, live);
        return;
      }
    }
  }

  const ProcDef& def_;
};

}  // namespace

void lint_linearity(const Signature&, const ProcDef& def) { Linter(def).run(); }

Program parse_program(std::string_view source) {
  Lexer lx(source);
  Parser p(lx.run());
  return p.run();
}

Program load_program(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open `" + path + "`");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

}  // namespace sill
