#include "holicheck/surface.hpp"

#include <cctype>
#include <charconv>
#include <set>
#include <sstream>
#include <unordered_set>

namespace holi {

std::string_view op_symbol(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Lt: return "<";
    case Op::Gt: return ">";
    case Op::Le: return "<=";
    case Op::Ge: return ">=";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::And: return "&&";
    case Op::Or: return "||";
  }
  return "?";
}

std::int64_t apply_op(Op op, std::int64_t a, std::int64_t b) {
  using U = std::uint64_t;
  switch (op) {
    case Op::Add: return static_cast<std::int64_t>(static_cast<U>(a) + static_cast<U>(b));
    case Op::Sub: return static_cast<std::int64_t>(static_cast<U>(a) - static_cast<U>(b));
    case Op::Mul: return static_cast<std::int64_t>(static_cast<U>(a) * static_cast<U>(b));
    case Op::Lt: return a < b;
    case Op::Gt: return a > b;
    case Op::Le: return a <= b;
    case Op::Ge: return a >= b;
    case Op::Eq: return a == b;
    case Op::Ne: return a != b;
    case Op::And: return a != 0 && b != 0;
    case Op::Or: return a != 0 || b != 0;
  }
  return 0;
}

namespace surface {

// ---------------------------------------------------------------------------
// Constructors

ExprPtr make(Expr::Kind kind, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->pos = pos;
  return e;
}

namespace {
std::shared_ptr<Expr> mk(Expr::Kind kind, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->pos = pos;
  return e;
}
}  // namespace

ExprPtr unit_lit(SourcePos pos) { return mk(Expr::Kind::Unit, pos); }

ExprPtr int_lit(std::int64_t v, SourcePos pos) {
  auto e = mk(Expr::Kind::Int, pos);
  e->value = v;
  return e;
}

ExprPtr ident(std::string name, SourcePos pos) {
  auto e = mk(Expr::Kind::Ident, pos);
  e->name = std::move(name);
  return e;
}

ExprPtr lambda(std::string param, Type param_type, Type result_type, ExprPtr body, SourcePos pos) {
  auto e = mk(Expr::Kind::Lambda, pos);
  e->name = std::move(param);
  e->type = std::move(param_type);
  e->result_type = std::move(result_type);
  e->a = std::move(body);
  return e;
}

ExprPtr assign(std::string ref, ExprPtr value, SourcePos pos) {
  auto e = mk(Expr::Kind::Assign, pos);
  e->name = std::move(ref);
  e->a = std::move(value);
  return e;
}

ExprPtr deref(std::string ref, SourcePos pos) {
  auto e = mk(Expr::Kind::Deref, pos);
  e->name = std::move(ref);
  return e;
}

ExprPtr binop(Op op, ExprPtr l, ExprPtr r, SourcePos pos) {
  auto e = mk(Expr::Kind::BinOp, pos);
  e->op = op;
  e->a = std::move(l);
  e->b = std::move(r);
  return e;
}

ExprPtr not_(ExprPtr x, SourcePos pos) {
  auto e = mk(Expr::Kind::Not, pos);
  e->a = std::move(x);
  return e;
}

ExprPtr neg(ExprPtr x, SourcePos pos) {
  auto e = mk(Expr::Kind::Neg, pos);
  e->a = std::move(x);
  return e;
}

ExprPtr pair(ExprPtr l, ExprPtr r, SourcePos pos) {
  auto e = mk(Expr::Kind::Pair, pos);
  e->a = std::move(l);
  e->b = std::move(r);
  return e;
}

ExprPtr fst(ExprPtr x, SourcePos pos) {
  auto e = mk(Expr::Kind::Fst, pos);
  e->a = std::move(x);
  return e;
}

ExprPtr snd(ExprPtr x, SourcePos pos) {
  auto e = mk(Expr::Kind::Snd, pos);
  e->a = std::move(x);
  return e;
}

ExprPtr app(ExprPtr f, ExprPtr arg, SourcePos pos) {
  auto e = mk(Expr::Kind::App, pos);
  e->a = std::move(f);
  e->b = std::move(arg);
  return e;
}

ExprPtr if_(ExprPtr c, ExprPtr t, ExprPtr f, SourcePos pos) {
  auto e = mk(Expr::Kind::If, pos);
  e->a = std::move(c);
  e->b = std::move(t);
  e->c = std::move(f);
  return e;
}

ExprPtr let(std::string x, ExprPtr bound, ExprPtr body, std::optional<Type> annot, SourcePos pos) {
  auto e = mk(Expr::Kind::Let, pos);
  e->name = std::move(x);
  e->a = std::move(bound);
  e->b = std::move(body);
  e->type = std::move(annot);
  return e;
}

ExprPtr letrec(std::string f, ExprPtr fn, ExprPtr body, std::optional<Type> annot, SourcePos pos) {
  auto e = mk(Expr::Kind::Letrec, pos);
  e->name = std::move(f);
  e->a = std::move(fn);
  e->b = std::move(body);
  e->type = std::move(annot);
  return e;
}

ExprPtr assert_(ExprPtr x, SourcePos pos) {
  auto e = mk(Expr::Kind::Assert, pos);
  e->a = std::move(x);
  return e;
}

ExprPtr seq(ExprPtr first, ExprPtr second, SourcePos pos) {
  auto e = mk(Expr::Kind::Seq, pos);
  e->a = std::move(first);
  e->b = std::move(second);
  return e;
}

// ---------------------------------------------------------------------------
// Equality

bool same(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->value != b->value || a->op != b->op || a->name != b->name) return false;
  if (a->type.has_value() != b->type.has_value()) return false;
  if (a->type && *a->type != *b->type) return false;
  if (a->result_type.has_value() != b->result_type.has_value()) return false;
  if (a->result_type && *a->result_type != *b->result_type) return false;
  return same(a->a, b->a) && same(a->b, b->b) && same(a->c, b->c);
}

bool same(const Decl& a, const Decl& b) {
  if (a.kind != b.kind || a.name != b.name) return false;
  switch (a.kind) {
    case DeclKind::Abstract:
      return a.type == b.type;
    case DeclKind::Public:
    case DeclKind::Private:
      return a.param == b.param && a.param_type == b.param_type && a.result_type == b.result_type &&
             same(a.body, b.body);
    case DeclKind::RefInt:
      return a.init == b.init;
    case DeclKind::RefFun:
      return same(a.fun_init, b.fun_init);
  }
  return false;
}

bool same(const SourceLibrary& a, const SourceLibrary& b) {
  if (a.decls.size() != b.decls.size()) return false;
  for (std::size_t i = 0; i < a.decls.size(); ++i)
    if (!same(a.decls[i], b.decls[i])) return false;
  return same(a.main, b.main);
}

const Decl* SourceLibrary::find(std::string_view name) const {
  for (const auto& d : decls)
    if (d.name == name) return &d;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok {
  End, Int, Ident,
  // keywords
  Import, Public, Private, KwInt, KwUnit, Fun, Let, Letrec, In, If, Then, Else, Assert, Fst, Snd, Not, Main,
  // punctuation
  LParen, RParen, LBrace, RBrace, Comma, Semi, Colon, ColonEq, Bang, Plus, Minus, Star,
  Lt, Gt, Le, Ge, EqEq, Ne, AndAnd, OrOr, Arrow, Equals,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t value = 0;
  SourcePos pos;
};

std::string describe(Tok t) {
  switch (t) {
    case Tok::End: return "end of input";
    case Tok::Int: return "integer";
    case Tok::Ident: return "identifier";
    case Tok::Import: return "'import'";
    case Tok::Public: return "'public'";
    case Tok::Private: return "'private'";
    case Tok::KwInt: return "'int'";
    case Tok::KwUnit: return "'unit'";
    case Tok::Fun: return "'fun'";
    case Tok::Let: return "'let'";
    case Tok::Letrec: return "'letrec'";
    case Tok::In: return "'in'";
    case Tok::If: return "'if'";
    case Tok::Then: return "'then'";
    case Tok::Else: return "'else'";
    case Tok::Assert: return "'assert'";
    case Tok::Fst: return "'fst'";
    case Tok::Snd: return "'snd'";
    case Tok::Not: return "'not'";
    case Tok::Main: return "'main'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::ColonEq: return "':='";
    case Tok::Bang: return "'!'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Lt: return "'<'";
    case Tok::Gt: return "'>'";
    case Tok::Le: return "'<='";
    case Tok::Ge: return "'>='";
    case Tok::EqEq: return "'=='";
    case Tok::Ne: return "'!='";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::Arrow: return "'->'";
    case Tok::Equals: return "'='";
  }
  return "?";
}

const std::pair<std::string_view, Tok> kKeywords[] = {
    {"import", Tok::Import}, {"public", Tok::Public}, {"private", Tok::Private}, {"int", Tok::KwInt},
    {"unit", Tok::KwUnit},   {"fun", Tok::Fun},       {"let", Tok::Let},         {"letrec", Tok::Letrec},
    {"in", Tok::In},         {"if", Tok::If},         {"then", Tok::Then},       {"else", Tok::Else},
    {"assert", Tok::Assert}, {"fst", Tok::Fst},       {"snd", Tok::Snd},         {"not", Tok::Not},
    {"main", Tok::Main},
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t j = 0; j < n && i < src.size(); ++j, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char ch = src[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(1);
      continue;
    }
    if (ch == '#' || (ch == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.pos = {line, col};
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Int;
      t.text = std::string(src.substr(i, j - i));
      auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
      if (ec != std::errc()) throw ParseError(t.pos, "integer literal out of range: " + t.text);
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.text = std::string(src.substr(i, j - i));
      t.kind = Tok::Ident;
      for (auto [kw, tok] : kKeywords)
        if (kw == t.text) t.kind = tok;
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    auto two = src.substr(i, 2);
    struct Sym {
      std::string_view s;
      Tok t;
    };
    static const Sym kTwo[] = {{":=", Tok::ColonEq}, {"<=", Tok::Le},     {">=", Tok::Ge},   {"==", Tok::EqEq},
                               {"!=", Tok::Ne},      {"&&", Tok::AndAnd}, {"||", Tok::OrOr}, {"->", Tok::Arrow}};
    static const Sym kOne[] = {{"(", Tok::LParen}, {")", Tok::RParen}, {"{", Tok::LBrace}, {"}", Tok::RBrace},
                               {",", Tok::Comma},  {";", Tok::Semi},   {":", Tok::Colon},  {"!", Tok::Bang},
                               {"+", Tok::Plus},   {"-", Tok::Minus},  {"*", Tok::Star},   {"<", Tok::Lt},
                               {">", Tok::Gt},     {"=", Tok::Equals}};
    bool matched = false;
    for (const auto& s : kTwo) {
      if (two == s.s) {
        t.kind = s.t;
        t.text = std::string(s.s);
        advance(2);
        matched = true;
        break;
      }
    }
    if (!matched) {
      for (const auto& s : kOne) {
        if (src[i] == s.s[0]) {
          t.kind = s.t;
          t.text = std::string(s.s);
          advance(1);
          matched = true;
          break;
        }
      }
    }
    if (!matched) throw ParseError(t.pos, std::string("unexpected character '") + ch + "'");
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.pos = {line, col};
  out.push_back(end);
  return out;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  SourceLibrary library() {
    SourceLibrary lib;
    std::set<std::string> seen;
    while (!at(Tok::End)) {
      if (at(Tok::Main)) {
        SourcePos pos = peek().pos;
        if (lib.main) throw ParseError(pos, "duplicate 'main'");
        next();
        expect(Tok::Equals);
        lib.main = sequence();
        accept(Tok::Semi);
        continue;
      }
      if (lib.main) fail({"end of input"});
      Decl d = declaration();
      if (!seen.insert(d.name).second) throw ParseError(d.pos, "duplicate declaration of '" + d.name + "'");
      lib.decls.push_back(std::move(d));
    }
    return lib;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  bool at(Tok t) const { return peek().kind == t; }
  Token next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool accept(Tok t) {
    if (!at(t)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    std::string msg = "unexpected " + found + ", expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? " or " : "") + expected[i];
    throw ParseError(t.pos, msg, std::move(expected));
  }
  Token expect(Tok t) {
    if (!at(t)) fail({describe(t)});
    return next();
  }
  std::string identifier() { return expect(Tok::Ident).text; }

  // A declaration starts here: used to tell a trailing ';' from sequencing.
  bool at_decl_start() const {
    switch (peek().kind) {
      case Tok::Import:
      case Tok::Public:
      case Tok::Private:
      case Tok::KwInt:
      case Tok::Main:
        return true;
      case Tok::Fun:
        return peek(1).kind == Tok::Ident && peek(2).kind == Tok::ColonEq;
      default:
        return false;
    }
  }

  bool at_seq_stop() const {
    switch (peek().kind) {
      case Tok::End:
      case Tok::RBrace:
      case Tok::RParen:
      case Tok::Comma:
      case Tok::Else:
      case Tok::Then:
      case Tok::In:
        return true;
      default:
        return at_decl_start();
    }
  }

  Decl declaration() {
    Decl d;
    d.pos = peek().pos;
    switch (peek().kind) {
      case Tok::Import:
        next();
        d.kind = DeclKind::Abstract;
        d.name = identifier();
        expect(Tok::Colon);
        d.type = type();
        accept(Tok::Semi);
        return d;
      case Tok::Public:
      case Tok::Private:
        d.kind = next().kind == Tok::Public ? DeclKind::Public : DeclKind::Private;
        d.name = identifier();
        expect(Tok::LParen);
        d.param = identifier();
        expect(Tok::Colon);
        d.param_type = type();
        expect(Tok::RParen);
        expect(Tok::Colon);
        d.result_type = type();
        expect(Tok::Equals);
        d.body = sequence();
        accept(Tok::Semi);
        return d;
      case Tok::KwInt: {
        next();
        d.kind = DeclKind::RefInt;
        d.name = identifier();
        expect(Tok::ColonEq);
        bool negative = accept(Tok::Minus);
        d.init = expect(Tok::Int).value;
        if (negative) d.init = -d.init;
        accept(Tok::Semi);
        return d;
      }
      case Tok::Fun:
        next();
        d.kind = DeclKind::RefFun;
        d.name = identifier();
        expect(Tok::ColonEq);
        if (at(Tok::Fun)) {
          d.fun_init = lambda_expr();
        } else {
          SourcePos p = peek().pos;
          d.fun_init = ident(identifier(), p);
        }
        accept(Tok::Semi);
        return d;
      default:
        fail({"'import'", "'public'", "'private'", "'int'", "'fun'", "'main'"});
    }
  }

  // type := prod ('->' type)?     prod := atom ('*' prod)?
  Type type() {
    Type left = prod_type();
    if (accept(Tok::Arrow)) return Type::arrow(left, type());
    return left;
  }
  Type prod_type() {
    Type left = atomic_type();
    if (accept(Tok::Star)) return Type::prod(left, prod_type());
    return left;
  }
  Type atomic_type() {
    if (accept(Tok::KwInt)) return Type::integer();
    if (accept(Tok::KwUnit)) return Type::unit();
    if (accept(Tok::LParen)) {
      Type t = type();
      expect(Tok::RParen);
      return t;
    }
    fail({"'int'", "'unit'", "'('"});
  }

  ExprPtr sequence() {
    ExprPtr first = expr();
    if (at(Tok::Semi)) {
      SourcePos p = peek().pos;
      next();
      if (at_seq_stop()) return first;  // trailing ';'
      return seq(first, sequence(), p);
    }
    return first;
  }

  ExprPtr lambda_expr() {
    SourcePos p = expect(Tok::Fun).pos;
    expect(Tok::LParen);
    std::string x = identifier();
    expect(Tok::Colon);
    Type pt = type();
    expect(Tok::RParen);
    expect(Tok::Colon);
    // Atomic only: a full type would swallow the '->' that introduces the body.
    Type rt = atomic_type();
    expect(Tok::Arrow);
    return lambda(std::move(x), pt, rt, sequence(), p);
  }

  ExprPtr expr() {
    SourcePos p = peek().pos;
    switch (peek().kind) {
      case Tok::Let: {
        next();
        std::string x = identifier();
        std::optional<Type> annot;
        if (accept(Tok::Colon)) annot = type();
        expect(Tok::Equals);
        ExprPtr bound = sequence();
        expect(Tok::In);
        return let(std::move(x), bound, sequence(), annot, p);
      }
      case Tok::Letrec: {
        next();
        std::string f = identifier();
        std::optional<Type> annot;
        if (accept(Tok::Colon)) annot = type();
        expect(Tok::Equals);
        if (!at(Tok::Fun)) fail({"'fun'"});
        ExprPtr fn = lambda_expr();
        expect(Tok::In);
        return letrec(std::move(f), fn, sequence(), annot, p);
      }
      case Tok::If: {
        next();
        ExprPtr c = sequence();
        expect(Tok::Then);
        ExprPtr t = sequence();
        expect(Tok::Else);
        return if_(c, t, sequence(), p);
      }
      case Tok::Fun:
        return lambda_expr();
      case Tok::Ident:
        if (peek(1).kind == Tok::ColonEq) {
          std::string r = next().text;
          next();
          return assign(std::move(r), expr(), p);
        }
        [[fallthrough]];
      default:
        return binary(0);
    }
  }

  static int precedence(Tok t) {
    switch (t) {
      case Tok::OrOr: return 1;
      case Tok::AndAnd: return 2;
      case Tok::EqEq:
      case Tok::Ne: return 3;
      case Tok::Lt:
      case Tok::Gt:
      case Tok::Le:
      case Tok::Ge: return 4;
      case Tok::Plus:
      case Tok::Minus: return 5;
      case Tok::Star: return 6;
      default: return -1;
    }
  }

  static Op to_op(Tok t) {
    switch (t) {
      case Tok::OrOr: return Op::Or;
      case Tok::AndAnd: return Op::And;
      case Tok::EqEq: return Op::Eq;
      case Tok::Ne: return Op::Ne;
      case Tok::Lt: return Op::Lt;
      case Tok::Gt: return Op::Gt;
      case Tok::Le: return Op::Le;
      case Tok::Ge: return Op::Ge;
      case Tok::Plus: return Op::Add;
      case Tok::Minus: return Op::Sub;
      default: return Op::Mul;
    }
  }

  // Left-associative precedence climbing over the binary operators.
  ExprPtr binary(int min_prec) {
    ExprPtr left = unary();
    for (;;) {
      int prec = precedence(peek().kind);
      if (prec < 0 || prec < min_prec) return left;
      Token op = next();
      ExprPtr right = binary(prec + 1);
      left = binop(to_op(op.kind), left, right, op.pos);
    }
  }

  ExprPtr unary() {
    SourcePos p = peek().pos;
    switch (peek().kind) {
      case Tok::Not:
        next();
        return not_(unary(), p);
      case Tok::Minus:
        next();
        if (at(Tok::Int)) return postfix(int_lit(-next().value, p));
        return neg(unary(), p);
      case Tok::Bang:
        next();
        return postfix(deref(identifier(), p));
      case Tok::Fst:
        next();
        return fst(unary(), p);
      case Tok::Snd:
        next();
        return snd(unary(), p);
      default:
        return postfix(atom());
    }
  }

  // f(a), f(a, b) == f((a, b)), f() == f(())
  ExprPtr postfix(ExprPtr e) {
    while (at(Tok::LParen)) {
      SourcePos p = next().pos;
      if (accept(Tok::RParen)) {
        e = app(e, unit_lit(p), p);
        continue;
      }
      ExprPtr arg = tuple_tail(sequence());
      expect(Tok::RParen);
      e = app(e, arg, p);
    }
    return e;
  }

  // After the first element of a parenthesised list: builds right-nested pairs.
  ExprPtr tuple_tail(ExprPtr first) {
    if (!at(Tok::Comma)) return first;
    SourcePos p = next().pos;
    ExprPtr rest = tuple_tail(sequence());
    return pair(first, rest, p);
  }

  ExprPtr atom() {
    SourcePos p = peek().pos;
    switch (peek().kind) {
      case Tok::Int:
        return int_lit(next().value, p);
      case Tok::Ident:
        return ident(next().text, p);
      case Tok::Assert: {
        next();
        expect(Tok::LParen);
        ExprPtr e = sequence();
        expect(Tok::RParen);
        return assert_(e, p);
      }
      case Tok::LParen: {
        next();
        if (accept(Tok::RParen)) return unit_lit(p);
        ExprPtr e = tuple_tail(sequence());
        expect(Tok::RParen);
        return e;
      }
      case Tok::LBrace: {
        next();
        ExprPtr e = sequence();
        expect(Tok::RBrace);
        return e;
      }
      default:
        fail({"expression"});
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

SourceLibrary parse_any(std::string_view text) {
  Parser p(lex(text));
  return p.library();
}

SourceLibrary parse(std::string_view text, FileKind kind) {
  SourceLibrary lib = parse_any(text);
  if (kind == FileKind::Client && !lib.main) throw ParseError({1, 1}, "a client needs a 'main' body", {"'main'"});
  if (kind == FileKind::Library && lib.main) throw ParseError({1, 1}, "a library cannot have a 'main' body");
  return lib;
}

// ---------------------------------------------------------------------------
// Printer
//
// Levels: 0 sequence, 1 prefix forms (let/if/fun/letrec/:=), 2 ||, 3 &&,
// 4 == !=, 5 comparisons, 6 + -, 7 *, 8 unary, 9 application, 10 atoms.
// Prefix forms extend as far right as possible, so they print bare only in
// tail position.

namespace {

int level_of(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Seq: return 0;
    case K::Let:
    case K::Letrec:
    case K::If:
    case K::Lambda:
    case K::Assign: return 1;
    case K::BinOp:
      switch (e.op) {
        case Op::Or: return 2;
        case Op::And: return 3;
        case Op::Eq:
        case Op::Ne: return 4;
        case Op::Lt:
        case Op::Gt:
        case Op::Le:
        case Op::Ge: return 5;
        case Op::Add:
        case Op::Sub: return 6;
        case Op::Mul: return 7;
      }
      return 7;
    case K::Not:
    case K::Neg:
    case K::Fst:
    case K::Snd:
    case K::Deref: return 8;
    case K::Int: return e.value < 0 ? 8 : 10;
    case K::App: return 9;
    default: return 10;
  }
}

class Printer {
 public:
  std::string out;

  void expr(const ExprPtr& e, int level, bool tail) {
    int own = level_of(*e);
    bool needs_parens = own < level || (own == 1 && !tail);
    if (needs_parens) {
      out += "(";
      raw(e, true);
      out += ")";
    } else {
      raw(e, tail);
    }
  }

  void raw(const ExprPtr& e, bool tail) {
    using K = Expr::Kind;
    switch (e->kind) {
      case K::Unit: out += "()"; break;
      case K::Int: out += std::to_string(e->value); break;
      case K::Ident: out += e->name; break;
      case K::Deref: out += "!" + e->name; break;
      case K::Lambda:
        out += "fun(" + e->name + ":" + e->type->str() + "):(" + e->result_type->str() + ") -> ";
        expr(e->a, 0, tail);
        break;
      case K::Assign:
        out += e->name + " := ";
        expr(e->a, 1, tail);
        break;
      case K::BinOp: {
        int lv = level_of(*e);
        expr(e->a, lv, false);
        out += " ";
        out += op_symbol(e->op);
        out += " ";
        expr(e->b, lv + 1, false);
        break;
      }
      case K::Not:
        out += "not ";
        expr(e->a, 8, false);
        break;
      case K::Neg:
        out += "-";
        expr(e->a, 8, false);
        break;
      case K::Fst:
        out += "fst ";
        expr(e->a, 8, false);
        break;
      case K::Snd:
        out += "snd ";
        expr(e->a, 8, false);
        break;
      case K::Pair:
        out += "(";
        expr(e->a, 0, true);
        out += ", ";
        expr(e->b, 0, true);
        out += ")";
        break;
      case K::App:
        expr(e->a, 9, false);
        out += "(";
        if (e->b->kind == K::Unit) {
        } else if (e->b->kind == K::Pair) {
          expr(e->b->a, 0, true);
          out += ", ";
          expr(e->b->b, 0, true);
        } else {
          expr(e->b, 0, true);
        }
        out += ")";
        break;
      case K::If:
        out += "if ";
        expr(e->a, 0, true);
        out += " then ";
        expr(e->b, 0, true);
        out += " else ";
        expr(e->c, 0, tail);
        break;
      case K::Let:
        out += "let " + e->name;
        if (e->type) out += " : " + e->type->str();
        out += " = ";
        expr(e->a, 0, true);
        out += " in ";
        expr(e->b, 0, tail);
        break;
      case K::Letrec:
        out += "letrec " + e->name;
        if (e->type) out += " : " + e->type->str();
        out += " = ";
        expr(e->a, 0, true);
        out += " in ";
        expr(e->b, 0, tail);
        break;
      case K::Assert:
        out += "assert(";
        expr(e->a, 0, true);
        out += ")";
        break;
      case K::Seq:
        expr(e->a, 1, false);
        out += "; ";
        expr(e->b, 0, tail);
        break;
    }
  }

  // Method bodies: one statement per line for top-level sequences.
  void body(const ExprPtr& e) {
    ExprPtr cur = e;
    out += "{\n";
    while (cur->kind == Expr::Kind::Seq) {
      out += "    ";
      expr(cur->a, 1, false);
      out += ";\n";
      cur = cur->b;
    }
    out += "    ";
    expr(cur, 0, true);
    out += "\n  }";
  }
};

}  // namespace

std::string print(const ExprPtr& e) {
  Printer p;
  p.expr(e, 0, true);
  return p.out;
}

std::string print(const SourceLibrary& lib) {
  Printer p;
  for (const auto& d : lib.decls) {
    switch (d.kind) {
      case DeclKind::Abstract:
        p.out += "import " + d.name + " : (" + d.type.str() + ")\n";
        break;
      case DeclKind::Public:
      case DeclKind::Private:
        p.out += d.kind == DeclKind::Public ? "public " : "private ";
        p.out += d.name + " (" + d.param + ":" + d.param_type.str() + ") : (" + d.result_type.str() + ") = ";
        p.body(d.body);
        p.out += ";\n";
        break;
      case DeclKind::RefInt:
        p.out += "int " + d.name + " := " + std::to_string(d.init) + ";\n";
        break;
      case DeclKind::RefFun:
        p.out += "fun " + d.name + " := ";
        p.expr(d.fun_init, 0, true);
        p.out += ";\n";
        break;
    }
  }
  if (lib.main) {
    p.out += "main = ";
    p.expr(lib.main, 0, true);
    p.out += "\n";
  }
  return p.out;
}

// ---------------------------------------------------------------------------
// Desugaring

ExprPtr desugar(const ExprPtr& e) {
  if (!e) return e;
  using K = Expr::Kind;
  switch (e->kind) {
    case K::Seq:
      return let("_", desugar(e->a), desugar(e->b), std::nullopt, e->pos);
    case K::Not:
      return binop(Op::Eq, desugar(e->a), int_lit(0, e->pos), e->pos);
    case K::Neg:
      return binop(Op::Sub, int_lit(0, e->pos), desugar(e->a), e->pos);
    default: {
      ExprPtr a = desugar(e->a), b = desugar(e->b), c = desugar(e->c);
      if (a == e->a && b == e->b && c == e->c) return e;
      auto copy = std::make_shared<Expr>(*e);
      copy->a = a;
      copy->b = b;
      copy->c = c;
      return copy;
    }
  }
}

SourceLibrary desugar(const SourceLibrary& lib) {
  SourceLibrary out = lib;
  for (auto& d : out.decls) {
    if (d.body) d.body = desugar(d.body);
    if (d.fun_init) d.fun_init = desugar(d.fun_init);
  }
  if (out.main) out.main = desugar(out.main);
  return out;
}

}  // namespace surface
}  // namespace holi
