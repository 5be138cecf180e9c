#include "cpsforge/parser.hpp"

#include <charconv>
#include <unordered_set>

namespace cpsforge {

namespace {

enum class Tok { Int, Str, Id, Kw, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t ival = 0;
  bool negative_ok = false;  // value fits only when negated (9223372036854775808)
  Span span;
};

const std::unordered_set<std::string> kKeywords = {
    "val", "var", "if",  "then",  "else",  "while", "do",   "match",  "case", "try", "catch",
    "finally", "throw", "fun", "await", "async", "true", "false", "unit", "def"};

// Longest first so that `<=` wins over `<`.
const char* const kPuncts[] = {"=>", "->", "+=", "-=", "==", "!=", "<=", ">=", "&&", "||", "(", ")",
                               "{",  "}",  "[",  "]",  ",",  ";",  ":",  ".",  "=",  "+",  "-", "*",
                               "/",  "%",  "<",  ">",  "_"};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.span = {line_, col_};
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        lex_int(t);
      } else if (c == '"') {
        lex_string(t);
      } else if (std::isalpha(static_cast<unsigned char>(c)) ||
                 (c == '_' && pos_ + 1 < src_.size() && ident_char(src_[pos_ + 1]))) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && ident_char(src_[pos_])) advance();
        t.text = std::string(src_.substr(start, pos_ - start));
        t.kind = kKeywords.count(t.text) ? Tok::Kw : Tok::Id;
      } else {
        bool found = false;
        for (const char* p : kPuncts) {
          std::string_view sv(p);
          if (src_.substr(pos_, sv.size()) == sv) {
            t.kind = Tok::Punct;
            t.text = std::string(sv);
            for (std::size_t i = 0; i < sv.size(); ++i) advance();
            found = true;
            break;
          }
        }
        if (!found)
          throw ParseError(t.span, std::string("unexpected character '") + c + "'", {});
      }
      out.push_back(std::move(t));
    }
  }

 private:
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  void lex_int(Token& t) {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
    std::string_view digits = src_.substr(start, pos_ - start);
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    constexpr std::uint64_t kMax = static_cast<std::uint64_t>(INT64_MAX);
    if (ec != std::errc() || p != digits.data() + digits.size() || v > kMax + 1)
      throw ParseError(t.span, "integer literal out of range", {});
    t.kind = Tok::Int;
    t.text = std::string(digits);
    if (v == kMax + 1) {
      t.negative_ok = true;
      t.ival = INT64_MIN;
    } else {
      t.ival = static_cast<std::int64_t>(v);
    }
  }

  void lex_string(Token& t) {
    advance();
    std::string s;
    for (;;) {
      if (pos_ >= src_.size() || src_[pos_] == '\n')
        throw ParseError(t.span, "unterminated string literal", {"\""});
      char c = src_[pos_];
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size()) throw ParseError(t.span, "unterminated string literal", {"\""});
        char e = src_[pos_];
        switch (e) {
          case 'n': s += '\n'; break;
          case 't': s += '\t'; break;
          case '"': s += '"'; break;
          case '\\': s += '\\'; break;
          default: throw ParseError({line_, col_}, std::string("unknown escape '\\") + e + "'", {});
        }
        advance();
        continue;
      }
      s += c;
      advance();
    }
    t.kind = Tok::Str;
    t.text = std::move(s);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// Names the core notation uses after `F.`.
const std::unordered_set<std::string> kCoreOps = {"pure",         "flatMap", "map",   "flatMapTry",
                                                  "error",        "adoptAwait", "convert", "whileHelper",
                                                  "shift",        "chain",   "finishChain"};

enum class End { Paren, Brace, Eof };

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program p;
    while (at_kw("def")) p.defs.push_back(def());
    p.main = sequence(End::Eof);
    expect_end();
    return p;
  }

  ExprPtr lone_expr() {
    auto e = sequence(End::Eof);
    expect_end();
    return e;
  }

 private:
  // -- token helpers --------------------------------------------------------

  const Token& peek(std::size_t k = 0) const {
    std::size_t i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }
  bool at_punct(std::string_view p, std::size_t k = 0) const {
    return peek(k).kind == Tok::Punct && peek(k).text == p;
  }
  bool at_kw(std::string_view kw, std::size_t k = 0) const {
    return peek(k).kind == Tok::Kw && peek(k).text == kw;
  }
  bool at_id(std::string_view name, std::size_t k = 0) const {
    return peek(k).kind == Tok::Id && peek(k).text == name;
  }
  Token take() {
    Token t = peek();
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void fail(std::set<std::string> expected) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : describe(t);
    std::string msg = "unexpected " + found + ", expected ";
    bool first = true;
    for (const auto& e : expected) {
      if (!first) msg += " or ";
      msg += e == "expression" || e == "type" || e == "identifier" || e == "pattern" ? e : "'" + e + "'";
      first = false;
    }
    throw ParseError(t.span, msg, std::move(expected));
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::Int: return "integer " + t.text;
      case Tok::Str: return "string literal";
      case Tok::Id: return "identifier '" + t.text + "'";
      case Tok::Kw: return "keyword '" + t.text + "'";
      case Tok::Punct: return "'" + t.text + "'";
      case Tok::End: return "end of input";
    }
    return "token";
  }

  void expect_punct(std::string_view p) {
    if (!at_punct(p)) fail({std::string(p)});
    take();
  }
  void expect_kw(std::string_view kw) {
    if (!at_kw(kw)) fail({std::string(kw)});
    take();
  }
  std::string expect_id() {
    if (peek().kind != Tok::Id) fail({"identifier"});
    return take().text;
  }
  void expect_end() {
    if (peek().kind != Tok::End) fail({"end of input"});
  }

  // -- definitions and types ------------------------------------------------

  FunDef def() {
    FunDef d;
    d.span = take().span;
    d.name = expect_id();
    d.params = param_list(true);
    expect_punct(":");
    d.ret = type();
    expect_punct("=");
    if (!at_punct("{")) fail({"{"});
    d.body = block();
    return d;
  }

  std::vector<Param> param_list(bool types_required) {
    expect_punct("(");
    std::vector<Param> ps;
    if (!at_punct(")")) {
      for (;;) {
        Param p;
        p.name = expect_id();
        if (types_required || at_punct(":")) {
          expect_punct(":");
          p.ty = type();
        }
        ps.push_back(std::move(p));
        if (!at_punct(",")) break;
        take();
      }
    }
    expect_punct(")");
    return ps;
  }

  TyPtr type() {
    if (at_punct("(")) {
      take();
      std::vector<TyPtr> ps;
      if (!at_punct(")")) {
        for (;;) {
          ps.push_back(type());
          if (!at_punct(",")) break;
          take();
        }
      }
      expect_punct(")");
      expect_punct("->");
      return Ty::fun(std::move(ps), type());
    }
    if (peek().kind != Tok::Id) fail({"type"});
    std::string n = take().text;
    if (n == "Int") return Ty::int_();
    if (n == "Bool") return Ty::bool_();
    if (n == "Str") return Ty::str();
    if (n == "Unit") return Ty::unit();
    if (n == "List" || n == "Option") {
      expect_punct("[");
      auto el = type();
      expect_punct("]");
      return n == "List" ? Ty::list(el) : Ty::option(el);
    }
    std::vector<TyPtr> args;
    if (at_punct("[")) {
      take();
      for (;;) {
        args.push_back(type());
        if (!at_punct(",")) break;
        take();
      }
      expect_punct("]");
    }
    if (is_monad_name(n) && args.size() == 1) return Ty::monad(n, args[0]);
    return Ty::receiver(n, std::move(args));
  }

  // -- expressions ----------------------------------------------------------

  bool at_end(End end) const {
    switch (end) {
      case End::Paren: return at_punct(")");
      case End::Brace: return at_punct("}");
      case End::Eof: return peek().kind == Tok::End;
    }
    return false;
  }

  /// Statements separated by `;` up to `end`. A lone statement stands for
  /// itself; several become a Block.
  ExprPtr sequence(End end) {
    Span s = peek().span;
    std::vector<ExprPtr> stmts;
    for (;;) {
      stmts.push_back(expr(end));
      if (!at_punct(";")) break;
      take();
      if (at_end(end)) break;  // tolerate a trailing `;`
    }
    if (stmts.size() == 1) return stmts[0];
    return mk::block(std::move(stmts), s);
  }

  ExprPtr block() {
    Span s = peek().span;
    expect_punct("{");
    std::vector<ExprPtr> stmts;
    for (;;) {
      stmts.push_back(expr(End::Brace));
      if (!at_punct(";")) break;
      take();
      if (at_punct("}")) break;
    }
    if (!at_punct("}")) fail({";", "}"});
    take();
    return mk::block(std::move(stmts), s);
  }

  /// One expression. `end` tells a `val`/`var` how far its scope reaches:
  /// the rest of the enclosing block, parenthesis, or input.
  ExprPtr expr(End end) {
    const Token& t = peek();
    Span s = t.span;
    if (t.kind == Tok::Kw) {
      if (t.text == "val" || t.text == "var") {
        bool is_val = t.text == "val";
        take();
        std::string name = expect_id();
        expect_punct("=");
        auto rhs = expr(end);
        if (!at_punct(";")) fail({";"});
        take();
        auto rest = sequence(end);
        return is_val ? mk::val(name, rhs, rest, s) : mk::var_def(name, rhs, rest, s);
      }
      if (t.text == "if") {
        take();
        auto c = expr(End::Paren);
        expect_kw("then");
        auto a = expr(End::Paren);
        expect_kw("else");
        auto b = expr(end);
        return mk::if_(c, a, b, s);
      }
      if (t.text == "while") {
        take();
        auto c = expr(End::Paren);
        expect_kw("do");
        auto b = expr(end);
        return mk::while_(c, b, s);
      }
      if (t.text == "match") {
        take();
        auto scrut = expr(End::Paren);
        expect_punct("{");
        std::vector<std::pair<Pattern, ExprPtr>> cases;
        do {
          expect_kw("case");
          auto p = pattern();
          expect_punct("=>");
          cases.emplace_back(std::move(p), expr(End::Brace));
          if (!at_kw("case") && !at_punct("}")) fail({"case", "}"});
        } while (!at_punct("}"));
        take();
        return mk::match(scrut, std::move(cases), s);
      }
      if (t.text == "try") {
        take();
        if (!at_punct("{")) fail({"{"});
        auto body = block();
        std::string name;
        ExprPtr handler, fin;
        if (at_kw("catch")) {
          take();
          name = expect_id();
          expect_punct("=>");
          if (!at_punct("{")) fail({"{"});
          handler = block();
        }
        if (at_kw("finally")) {
          take();
          if (!at_punct("{")) fail({"{"});
          fin = block();
        }
        if (!handler && !fin) fail({"catch", "finally"});
        return mk::try_(body, name, handler, fin, s);
      }
      if (t.text == "throw") {
        take();
        return mk::throw_(expr(end), s);
      }
      if (t.text == "fun") {
        take();
        auto ps = param_list(false);
        expect_punct("=>");
        return mk::lambda(std::move(ps), expr(end), s);
      }
    }
    if (t.kind == Tok::Id && (at_punct("=", 1) || at_punct("+=", 1) || at_punct("-=", 1))) {
      std::string name = take().text;
      std::string op = take().text;
      auto rhs = expr(end);
      if (op != "=")
        rhs = mk::method(mk::var(name, s), op == "+=" ? "plus" : "minus", {rhs}, rhs->span);
      return mk::assign(name, rhs, s);
    }
    return binary(1);
  }

  static int op_prec(const Token& t) {
    if (t.kind != Tok::Punct) return 0;
    const auto& o = t.text;
    if (o == "||") return 1;
    if (o == "&&") return 2;
    if (o == "<" || o == "<=" || o == ">" || o == ">=" || o == "==" || o == "!=") return 3;
    if (o == "+" || o == "-") return 4;
    if (o == "*" || o == "/" || o == "%") return 5;
    return 0;
  }

  ExprPtr binary(int min_prec) {
    auto lhs = postfix();
    for (;;) {
      int p = op_prec(peek());
      if (p == 0 || p < min_prec) return lhs;
      Token op = take();
      auto rhs = binary(p + 1);
      lhs = mk::method(lhs, std::string(method_for_op(op.text)), {rhs}, op.span);
    }
  }

  std::vector<ExprPtr> arg_list() {
    expect_punct("(");
    std::vector<ExprPtr> args;
    if (!at_punct(")")) {
      for (;;) {
        args.push_back(expr(End::Paren));
        if (!at_punct(",")) break;
        take();
      }
    }
    if (!at_punct(")")) fail({",", ")"});
    take();
    return args;
  }

  ExprPtr postfix() {
    auto e = primary();
    for (;;) {
      if (at_punct(".")) {
        Span s = take().span;
        std::string m = expect_id();
        if (!at_punct("(")) fail({"("});
        e = mk::method(e, m, arg_list(), s);
      } else if (at_punct("(")) {
        Span s = peek().span;
        e = mk::apply(e, arg_list(), s);
      } else {
        return e;
      }
    }
  }

  ExprPtr primary() {
    const Token& t = peek();
    Span s = t.span;
    switch (t.kind) {
      case Tok::Int: {
        if (t.negative_ok) throw ParseError(s, "integer literal out of range", {});
        return mk::lit(Literal{take().ival}, s);
      }
      case Tok::Str: return mk::lit(Literal{take().text}, s);
      case Tok::Kw:
        if (t.text == "true" || t.text == "false") return mk::lit(Literal{take().text == "true"}, s);
        if (t.text == "unit") {
          take();
          return mk::lit(Literal{UnitLit{}}, s);
        }
        if (t.text == "await") {
          take();
          expect_punct("(");
          auto inner = expr(End::Paren);
          expect_punct(")");
          return mk::await(inner, s);
        }
        if (t.text == "async") {
          take();
          expect_punct("[");
          std::string m = expect_id();
          expect_punct("]");
          if (!at_punct("{")) fail({"{"});
          return mk::async(m, block(), s);
        }
        break;
      case Tok::Id:
        if (t.text == "F" && at_punct(".", 1) && peek(2).kind == Tok::Id && kCoreOps.count(peek(2).text))
          return core_form();
        if (t.text == "cps" && at_punct("[", 1)) {
          take();
          take();
          std::string m = expect_id();
          expect_punct("]");
          expect_punct("{");
          auto body = sequence(End::Brace);
          expect_punct("}");
          return mk::cps_block(m, body);
        }
        return mk::var(take().text, s);
      case Tok::Punct:
        if (t.text == "(") {
          take();
          auto e = sequence(End::Paren);
          if (!at_punct(")")) fail({")"});
          take();
          return e;
        }
        if (t.text == "{") return block();
        if (t.text == "[") {
          take();
          std::vector<ExprPtr> items;
          if (!at_punct("]")) {
            for (;;) {
              items.push_back(expr(End::Paren));
              if (!at_punct(",")) break;
              take();
            }
          }
          expect_punct("]");
          return mk::apply(mk::var("list", s), std::move(items), s);
        }
        if (t.text == "-" && peek(1).kind == Tok::Int) {
          take();
          Token n = take();
          return mk::lit(Literal{n.negative_ok ? INT64_MIN : -n.ival}, s);
        }
        break;
      case Tok::End: break;
    }
    fail({"expression"});
  }

  std::string binder() {
    if (at_punct("_")) {
      take();
      return "_";
    }
    return expect_id();
  }

  /// Monadic core notation, as printed for transformed trees.
  ExprPtr core_form() {
    Span s = take().span;
    take();  // '.'
    std::string op = take().text;
    auto one = [&]() {
      expect_punct("(");
      auto e = expr(End::Paren);
      expect_punct(")");
      return e;
    };
    ExprPtr e;
    if (op == "pure") {
      e = mk::pure(one());
    } else if (op == "flatMap" || op == "map") {
      auto fa = one();
      expect_punct("(");
      std::string x = binder();
      expect_punct("=>");
      auto body = expr(End::Paren);
      expect_punct(")");
      e = op == "map" ? mk::map(fa, x, body) : mk::flat_map(fa, x, body);
    } else if (op == "flatMapTry") {
      auto fa = one();
      expect_punct("{");
      expect_kw("case");
      if (!at_id("Success")) fail({"Success"});
      take();
      expect_punct("(");
      std::string ok = binder();
      expect_punct(")");
      expect_punct("=>");
      auto on_ok = expr(End::Brace);
      expect_kw("case");
      if (!at_id("Failure")) fail({"Failure"});
      take();
      expect_punct("(");
      std::string bad = binder();
      expect_punct(")");
      expect_punct("=>");
      auto on_err = expr(End::Brace);
      expect_punct("}");
      e = mk::flat_map_try(fa, ok, on_ok, bad, on_err);
    } else if (op == "error") {
      e = mk::error(one());
    } else if (op == "adoptAwait") {
      e = mk::adopt(one(), 0);
    } else if (op == "convert") {
      expect_punct("[");
      std::string from = expect_id();
      expect_punct(",");
      std::string to = expect_id();
      expect_punct("]");
      e = mk::convert(from, to, one());
    } else if (op == "whileHelper") {
      auto args = arg_list();
      if (args.size() != 2) throw ParseError(s, "whileHelper takes two arguments", {});
      e = mk::while_helper(args[0], args[1]);
    } else if (op == "shift") {
      expect_punct("[");
      if (peek().kind != Tok::Str) fail({"string literal"});
      std::string tag = take().text;
      expect_punct("]");
      expect_punct("(");
      auto recv = primary();
      for (;;) {
        // the receiver may itself be a call chain: a.f(x).g
        if (at_punct(".") && at_punct("(", 2)) {
          take();
          std::string m = expect_id();
          recv = mk::method(recv, m, arg_list());
        } else if (at_punct("(")) {
          recv = mk::apply(recv, arg_list());
        } else {
          break;
        }
      }
      expect_punct(".");
      std::string m = expect_id();
      expect_punct(")");
      e = mk::shift_call(tag, recv, m, arg_list());
    } else if (op == "chain") {
      expect_punct("[");
      std::string name = expect_id();
      expect_punct("]");
      auto args = arg_list();
      if (args.size() != 2) throw ParseError(s, "chain takes two arguments", {});
      e = mk::chain_op(args[0], name, args[1]);
    } else {  // finishChain
      e = mk::finish_chain(one());
    }
    return e;
  }

  Pattern pattern() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int: return mk::lit_pat(Literal{take().ival});
      case Tok::Str: return mk::lit_pat(Literal{take().text});
      case Tok::Kw:
        if (t.text == "true" || t.text == "false") return mk::lit_pat(Literal{take().text == "true"});
        if (t.text == "unit") {
          take();
          return mk::lit_pat(Literal{UnitLit{}});
        }
        break;
      case Tok::Id: return mk::bind_pat(take().text);
      case Tok::Punct:
        if (t.text == "_") {
          take();
          return mk::wild_pat();
        }
        if (t.text == "-" && peek(1).kind == Tok::Int) {
          take();
          Token n = take();
          return mk::lit_pat(Literal{n.negative_ok ? INT64_MIN : -n.ival});
        }
        break;
      case Tok::End: break;
    }
    fail({"pattern"});
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Program parse_program(std::string_view text) {
  Parser p(Lexer(text).run());
  return p.program();
}

ExprPtr parse_expr(std::string_view text) {
  Parser p(Lexer(text).run());
  return p.lone_expr();
}

}  // namespace cpsforge
