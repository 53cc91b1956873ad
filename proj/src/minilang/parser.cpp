#include <cctype>
#include <limits>

#include <fmt/format.h>

#include "ddmin_loc/minilang.hpp"

namespace ddmin_loc::minilang {

SyntaxError::SyntaxError(int line, int column, const std::string& message)
    : Error(fmt::format("{}:{}: {}", line, column, message)), line_(line), column_(column) {}

namespace {

enum class Tok {
  Int, Char, String, Ident,
  KwIf, KwElse, KwWhile, KwFor, KwIn, KwPrint, KwAnd, KwOr, KwNot, KwTrue, KwFalse,
  Assign, Eq, Ne, Lt, Le, Gt, Ge, Plus, Minus, Star, Slash, Percent,
  LParen, RParen, LBracket, RBracket, Comma, LBrace, RBrace,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::u32string text;
  std::int64_t value = 0;
  int column = 0;
  int end_column = 0;
};

bool is_ident_start(char32_t c) { return c == U'_' || (c < 0x80 && std::isalpha(static_cast<int>(c))); }
bool is_ident_char(char32_t c) { return c == U'_' || (c < 0x80 && std::isalnum(static_cast<int>(c))); }
bool is_space(char32_t c) { return c == U' ' || c == U'\t' || c == U'\r'; }

Tok keyword(const std::u32string& word) {
  static const std::pair<std::u32string_view, Tok> kKeywords[] = {
      {U"if", Tok::KwIf},       {U"else", Tok::KwElse}, {U"while", Tok::KwWhile},
      {U"for", Tok::KwFor},     {U"in", Tok::KwIn},     {U"print", Tok::KwPrint},
      {U"and", Tok::KwAnd},     {U"or", Tok::KwOr},     {U"not", Tok::KwNot},
      {U"true", Tok::KwTrue},   {U"false", Tok::KwFalse},
  };
  for (const auto& [kw, tok] : kKeywords) {
    if (kw == word) return tok;
  }
  return Tok::Ident;
}

class Lexer {
public:
  Lexer(std::u32string_view text, int line) : text_(text), line_(line) {}

  std::vector<Token> tokenize() {
    std::vector<Token> out;
    while (true) {
      while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
      if (pos_ >= text_.size() || text_[pos_] == U'#') break;
      out.push_back(next());
    }
    Token end;
    end.kind = Tok::End;
    end.column = end.end_column = static_cast<int>(pos_) + 1;
    out.push_back(end);
    return out;
  }

private:
  [[noreturn]] void fail(std::size_t at, const std::string& msg) const {
    throw SyntaxError(line_, static_cast<int>(at) + 1, msg);
  }

  char32_t escaped(std::size_t start) {
    if (pos_ >= text_.size()) fail(start, "unterminated literal");
    char32_t c = text_[pos_++];
    if (c != U'\\') return c;
    if (pos_ >= text_.size()) fail(start, "unterminated literal");
    c = text_[pos_++];
    switch (c) {
      case U'n': return U'\n';
      case U't': return U'\t';
      case U'0': return U'\0';
      case U'\\': return U'\\';
      case U'\'': return U'\'';
      case U'"': return U'"';
      default: fail(pos_ - 2, "unknown escape sequence");
    }
  }

  Token next() {
    Token tok;
    const std::size_t start = pos_;
    tok.column = static_cast<int>(start) + 1;
    const char32_t c = text_[pos_];
    auto two = [&](char32_t second) {
      return pos_ + 1 < text_.size() && text_[pos_ + 1] == second;
    };
    auto single = [&](Tok kind, std::size_t len = 1) {
      tok.kind = kind;
      pos_ += len;
    };

    if (c < 0x80 && std::isdigit(static_cast<int>(c))) {
      std::int64_t value = 0;
      while (pos_ < text_.size() && text_[pos_] < 0x80 &&
             std::isdigit(static_cast<int>(text_[pos_]))) {
        const int digit = static_cast<int>(text_[pos_] - U'0');
        if (value > (std::numeric_limits<std::int64_t>::max() - digit) / 10) {
          fail(start, "integer literal too large");
        }
        value = value * 10 + digit;
        ++pos_;
      }
      tok.kind = Tok::Int;
      tok.value = value;
    } else if (is_ident_start(c)) {
      while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
      tok.text = std::u32string(text_.substr(start, pos_ - start));
      tok.kind = keyword(tok.text);
    } else if (c == U'\'') {
      ++pos_;
      tok.kind = Tok::Char;
      if (pos_ < text_.size() && text_[pos_] == U'\'') fail(start, "empty character literal");
      tok.text.push_back(escaped(start));
      if (pos_ >= text_.size() || text_[pos_] != U'\'') fail(start, "unterminated character literal");
      ++pos_;
    } else if (c == U'"') {
      ++pos_;
      tok.kind = Tok::String;
      while (true) {
        if (pos_ >= text_.size()) fail(start, "unterminated string literal");
        if (text_[pos_] == U'"') {
          ++pos_;
          break;
        }
        tok.text.push_back(escaped(start));
      }
    } else {
      switch (c) {
        case U'=': two(U'=') ? single(Tok::Eq, 2) : single(Tok::Assign); break;
        case U'!':
          if (!two(U'=')) fail(start, "unexpected character '!'");
          single(Tok::Ne, 2);
          break;
        case U'<': two(U'=') ? single(Tok::Le, 2) : single(Tok::Lt); break;
        case U'>': two(U'=') ? single(Tok::Ge, 2) : single(Tok::Gt); break;
        case U'+': single(Tok::Plus); break;
        case U'-': single(Tok::Minus); break;
        case U'*': single(Tok::Star); break;
        case U'/': single(Tok::Slash); break;
        case U'%': single(Tok::Percent); break;
        case U'(': single(Tok::LParen); break;
        case U')': single(Tok::RParen); break;
        case U'[': single(Tok::LBracket); break;
        case U']': single(Tok::RBracket); break;
        case U',': single(Tok::Comma); break;
        case U'{': single(Tok::LBrace); break;
        case U'}': single(Tok::RBrace); break;
        default:
          fail(start, fmt::format("unexpected character '{}'", encode_utf8(std::u32string(1, c))));
      }
    }
    tok.end_column = static_cast<int>(pos_) + 1;
    return tok;
  }

  std::u32string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

class ExprParser {
public:
  ExprParser(const std::vector<Token>& tokens, std::size_t pos, int line)
      : toks_(tokens), pos_(pos), line_(line) {}

  Expr parse_expr() { return parse_or(); }

  std::size_t position() const { return pos_; }
  const Token& peek() const { return toks_[pos_]; }

  void expect_end() const {
    if (peek().kind != Tok::End) fail(peek(), "unexpected token after expression");
  }

  [[noreturn]] void fail(const Token& at, const std::string& msg) const {
    throw SyntaxError(line_, at.column, msg);
  }

private:
  const Token& advance() { return toks_[pos_++]; }
  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    ++pos_;
    return true;
  }
  void expect(Tok kind, const char* what) {
    if (!accept(kind)) fail(peek(), fmt::format("expected {}", what));
  }

  Expr make(Expr::Kind kind, const Token& first) const {
    Expr e;
    e.kind = kind;
    e.line = line_;
    e.column = first.column;
    return e;
  }
  void close(Expr& e) const { e.end_column = toks_[pos_ - 1].end_column; }

  Expr logical_chain(Tok tok, BinaryOp op, Expr (ExprParser::*operand)()) {
    const Token& first = peek();
    Expr lhs = (this->*operand)();
    if (peek().kind != tok) return lhs;
    Expr chain = make(Expr::Kind::Binary, first);
    chain.op = op;
    chain.children.push_back(std::move(lhs));
    while (accept(tok)) chain.children.push_back((this->*operand)());
    close(chain);
    return chain;
  }

  Expr parse_or() { return logical_chain(Tok::KwOr, BinaryOp::Or, &ExprParser::parse_and); }
  Expr parse_and() { return logical_chain(Tok::KwAnd, BinaryOp::And, &ExprParser::parse_not); }

  Expr parse_not() {
    const Token& first = peek();
    if (accept(Tok::KwNot)) {
      Expr e = make(Expr::Kind::Unary, first);
      e.unary = '!';
      e.children.push_back(parse_not());
      close(e);
      return e;
    }
    return parse_comparison();
  }

  Expr parse_comparison() {
    const Token& first = peek();
    Expr lhs = parse_additive();
    std::optional<BinaryOp> op;
    switch (peek().kind) {
      case Tok::Eq: op = BinaryOp::Eq; break;
      case Tok::Ne: op = BinaryOp::Ne; break;
      case Tok::Lt: op = BinaryOp::Lt; break;
      case Tok::Le: op = BinaryOp::Le; break;
      case Tok::Gt: op = BinaryOp::Gt; break;
      case Tok::Ge: op = BinaryOp::Ge; break;
      case Tok::KwIn: op = BinaryOp::In; break;
      case Tok::KwNot:
        if (toks_[pos_ + 1].kind == Tok::KwIn) {
          op = BinaryOp::NotIn;
          ++pos_;
        }
        break;
      default: break;
    }
    if (!op) return lhs;
    ++pos_;
    Expr e = make(Expr::Kind::Binary, first);
    e.op = *op;
    e.children.push_back(std::move(lhs));
    e.children.push_back(parse_additive());
    close(e);
    return e;
  }

  Expr parse_additive() {
    const Token& first = peek();
    Expr lhs = parse_multiplicative();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const BinaryOp op = advance().kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
      Expr e = make(Expr::Kind::Binary, first);
      e.op = op;
      e.children.push_back(std::move(lhs));
      e.children.push_back(parse_multiplicative());
      close(e);
      lhs = std::move(e);
    }
    return lhs;
  }

  Expr parse_multiplicative() {
    const Token& first = peek();
    Expr lhs = parse_unary();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash || peek().kind == Tok::Percent) {
      const Tok t = advance().kind;
      Expr e = make(Expr::Kind::Binary, first);
      e.op = t == Tok::Star ? BinaryOp::Mul : t == Tok::Slash ? BinaryOp::Div : BinaryOp::Mod;
      e.children.push_back(std::move(lhs));
      e.children.push_back(parse_unary());
      close(e);
      lhs = std::move(e);
    }
    return lhs;
  }

  Expr parse_unary() {
    const Token& first = peek();
    if (accept(Tok::Minus)) {
      Expr e = make(Expr::Kind::Unary, first);
      e.unary = '-';
      e.children.push_back(parse_unary());
      close(e);
      return e;
    }
    return parse_postfix();
  }

  Expr parse_postfix() {
    const Token& first = peek();
    Expr e = parse_primary();
    while (accept(Tok::LBracket)) {
      Expr idx = make(Expr::Kind::Index, first);
      idx.children.push_back(std::move(e));
      idx.children.push_back(parse_expr());
      expect(Tok::RBracket, "']'");
      close(idx);
      e = std::move(idx);
    }
    return e;
  }

  Expr parse_primary() {
    const Token& tok = peek();
    Expr e = make(Expr::Kind::Int, tok);
    switch (tok.kind) {
      case Tok::Int:
        e.int_value = advance().value;
        break;
      case Tok::Char:
        e.kind = Expr::Kind::Char;
        e.text = advance().text;
        break;
      case Tok::String:
        e.kind = Expr::Kind::String;
        e.text = advance().text;
        break;
      case Tok::KwTrue:
      case Tok::KwFalse:
        e.kind = Expr::Kind::Bool;
        e.bool_value = advance().kind == Tok::KwTrue;
        break;
      case Tok::Ident:
        e.text = advance().text;
        if (accept(Tok::LParen)) {
          e.kind = Expr::Kind::Call;
          if (!accept(Tok::RParen)) {
            do {
              e.children.push_back(parse_expr());
            } while (accept(Tok::Comma));
            expect(Tok::RParen, "')'");
          }
        } else {
          e.kind = Expr::Kind::Var;
        }
        break;
      case Tok::LParen: {
        advance();
        Expr inner = parse_expr();
        expect(Tok::RParen, "')'");
        inner.column = tok.column;
        close(inner);
        return inner;
      }
      case Tok::LBracket:
        advance();
        e.kind = Expr::Kind::List;
        if (!accept(Tok::RBracket)) {
          do {
            e.children.push_back(parse_expr());
          } while (accept(Tok::Comma));
          expect(Tok::RBracket, "']'");
        }
        break;
      default:
        fail(tok, "expected an expression");
    }
    close(e);
    return e;
  }

  const std::vector<Token>& toks_;
  std::size_t pos_;
  int line_;
};

struct Line {
  int number = 0;
  std::u32string text;
  std::vector<Token> tokens;  // always ends with End
};

bool is_alone(const Line& line, Tok kind) {
  return line.tokens.size() == 2 && line.tokens[0].kind == kind;
}

class Parser {
public:
  explicit Parser(std::string_view source) {
    std::size_t start = 0;
    int number = 1;
    while (start <= source.size()) {
      const auto nl = source.find('\n', start);
      const auto raw = source.substr(start, nl == std::string_view::npos ? source.npos : nl - start);
      program_.source_lines.emplace_back(raw);
      Line line;
      line.number = number;
      line.text = decode_utf8(raw);
      line.tokens = Lexer(line.text, number).tokenize();
      if (line.tokens.size() > 1) lines_.push_back(std::move(line));
      if (nl == std::string_view::npos) break;
      start = nl + 1;
      ++number;
    }
    if (!program_.source_lines.empty() && program_.source_lines.back().empty()) {
      program_.source_lines.pop_back();
    }
  }

  Program parse() {
    program_.statements = parse_block(std::nullopt);
    return std::move(program_);
  }

private:
  [[noreturn]] static void fail(const Line& line, int column, const std::string& msg) {
    throw SyntaxError(line.number, column, msg);
  }

  std::vector<Stmt> parse_block(std::optional<int> opened_on) {
    std::vector<Stmt> out;
    while (true) {
      if (pos_ >= lines_.size()) {
        if (opened_on) {
          throw SyntaxError(*opened_on, 1,
                            fmt::format("unbalanced brace: block opened on line {} is never closed",
                                        *opened_on));
        }
        return out;
      }
      const Line& line = lines_[pos_];
      if (is_alone(line, Tok::RBrace)) {
        if (!opened_on) fail(line, 1, fmt::format("unbalanced brace: '}}' on line {} closes nothing", line.number));
        ++pos_;
        return out;
      }
      out.push_back(parse_statement());
    }
  }

  std::vector<Stmt> parse_braced_body(const Line& header) {
    if (pos_ >= lines_.size() || !is_alone(lines_[pos_], Tok::LBrace)) {
      fail(header, 1, fmt::format("expected '{{' alone on the line after line {}", header.number));
    }
    const int opened = lines_[pos_].number;
    ++pos_;
    return parse_block(opened);
  }

  std::string slice(const Line& line, int begin, int end) const {
    return encode_utf8(std::u32string_view(line.text).substr(
        static_cast<std::size_t>(begin - 1), static_cast<std::size_t>(end - begin)));
  }

  int add_site(const Line& line, std::string expr) {
    const int id = static_cast<int>(program_.sites.size());
    program_.sites.push_back({id, line.number, std::move(expr)});
    return id;
  }

  // Whole condition first, then each operand of a top-level and/or chain.
  void assign_condition_sites(Stmt& stmt, const Line& line) {
    stmt.site = add_site(line, slice(line, stmt.expr.column, stmt.expr.end_column));
    if (stmt.expr.kind == Expr::Kind::Binary &&
        (stmt.expr.op == BinaryOp::And || stmt.expr.op == BinaryOp::Or)) {
      for (auto& operand : stmt.expr.children) {
        operand.operand_site = add_site(line, slice(line, operand.column, operand.end_column));
      }
    }
  }

  Expr parse_rest(const Line& line, std::size_t from) {
    ExprParser ep(line.tokens, from, line.number);
    Expr e = ep.parse_expr();
    ep.expect_end();
    return e;
  }

  Stmt parse_statement() {
    const Line& line = lines_[pos_++];
    const auto& toks = line.tokens;
    Stmt stmt;
    stmt.line = line.number;
    program_.executable_lines.insert(line.number);

    switch (toks[0].kind) {
      case Tok::KwIf: {
        stmt.kind = Stmt::Kind::If;
        stmt.expr = parse_rest(line, 1);
        assign_condition_sites(stmt, line);
        stmt.body = parse_braced_body(line);
        if (pos_ < lines_.size() && is_alone(lines_[pos_], Tok::KwElse)) {
          const Line& else_line = lines_[pos_++];
          stmt.else_body = parse_braced_body(else_line);
        }
        break;
      }
      case Tok::KwWhile:
        stmt.kind = Stmt::Kind::While;
        stmt.expr = parse_rest(line, 1);
        assign_condition_sites(stmt, line);
        stmt.body = parse_braced_body(line);
        break;
      case Tok::KwFor: {
        stmt.kind = Stmt::Kind::For;
        if (toks[1].kind != Tok::Ident) fail(line, toks[1].column, "expected loop variable");
        stmt.target = toks[1].text;
        if (toks[2].kind != Tok::KwIn) fail(line, toks[2].column, "expected 'in'");
        stmt.expr = parse_rest(line, 3);
        stmt.site = add_site(line, slice(line, toks[1].column, stmt.expr.end_column));
        stmt.body = parse_braced_body(line);
        break;
      }
      case Tok::KwPrint:
        stmt.kind = Stmt::Kind::Print;
        stmt.expr = parse_rest(line, 1);
        break;
      case Tok::Ident:
        if (toks[1].kind != Tok::Assign) fail(line, toks[1].column, "expected '='");
        stmt.kind = Stmt::Kind::Assign;
        stmt.target = toks[0].text;
        stmt.expr = parse_rest(line, 2);
        break;
      case Tok::KwElse:
        fail(line, toks[0].column, "'else' without a preceding if block");
      case Tok::LBrace:
        fail(line, toks[0].column, "unexpected '{'");
      default:
        fail(line, toks[0].column, "expected a statement");
    }
    return stmt;
  }

  Program program_;
  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

}  // namespace

Program parse(std::string_view source) { return Parser(source).parse(); }

ElementMap element_map(const Program& program) {
  return ElementMap(program.executable_lines, program.sites);
}

}  // namespace ddmin_loc::minilang
