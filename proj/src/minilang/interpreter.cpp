#include <map>
#include <variant>

#include <fmt/format.h>

#include "ddmin_loc/minilang.hpp"

namespace ddmin_loc::minilang {

namespace {

struct Value;
using List = std::vector<Value>;

struct Value {
  std::variant<std::int64_t, bool, char32_t, std::u32string, List> v;

  bool operator==(const Value& other) const { return v == other.v; }
};

struct RuntimeError {
  std::string message;
};

std::string_view type_name(const Value& value) {
  switch (value.v.index()) {
    case 0: return "int";
    case 1: return "bool";
    case 2: return "char";
    case 3: return "string";
    default: return "list";
  }
}

std::u32string render(const Value& value) {
  struct Visitor {
    std::u32string operator()(std::int64_t i) const {
      const std::string s = std::to_string(i);
      return std::u32string(s.begin(), s.end());
    }
    std::u32string operator()(bool b) const { return b ? U"true" : U"false"; }
    std::u32string operator()(char32_t c) const { return std::u32string(1, c); }
    std::u32string operator()(const std::u32string& s) const { return s; }
    std::u32string operator()(const List& list) const {
      std::u32string out = U"[";
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (i) out += U", ";
        out += render(list[i]);
      }
      return out + U"]";
    }
  };
  return std::visit(Visitor{}, value.v);
}

class Interpreter {
public:
  Interpreter(std::string_view input, std::size_t budget) : budget_(budget) {
    vars_[U"input"] = Value{decode_utf8(input)};
  }

  void exec_block(const std::vector<Stmt>& body) {
    for (const auto& stmt : body) exec(stmt);
  }

  RunResult finish(std::optional<std::string> error) {
    RunResult result;
    result.output = encode_utf8(output_);
    result.trace = std::move(trace_);
    result.error = std::move(error);
    return result;
  }

private:
  [[noreturn]] static void fail(int line, const std::string& msg) {
    throw RuntimeError{fmt::format("line {}: {}", line, msg)};
  }

  void step(int line) {
    if (steps_ >= budget_) fail(line, "step budget exhausted");
    ++steps_;
    trace_.lines_hit.insert(line);
  }

  void record(int site, bool outcome) { trace_.predicate_hits.insert({site, outcome}); }

  bool truth(const Value& value, int line) {
    if (const auto* b = std::get_if<bool>(&value.v)) return *b;
    fail(line, fmt::format("condition must be bool, got {}", type_name(value)));
  }

  bool condition(const Stmt& stmt) {
    const Expr& e = stmt.expr;
    bool result;
    if (e.kind == Expr::Kind::Binary && (e.op == BinaryOp::And || e.op == BinaryOp::Or)) {
      result = logical(e);
    } else {
      result = truth(eval(e), stmt.line);
    }
    record(stmt.site, result);
    return result;
  }

  bool logical(const Expr& e) {
    const bool is_and = e.op == BinaryOp::And;
    for (const auto& operand : e.children) {
      const bool value = truth(eval(operand), e.line);
      if (operand.operand_site) record(*operand.operand_site, value);
      if (is_and && !value) return false;
      if (!is_and && value) return true;
    }
    return is_and;
  }

  void exec(const Stmt& stmt) {
    step(stmt.line);
    switch (stmt.kind) {
      case Stmt::Kind::Assign:
        vars_[stmt.target] = eval(stmt.expr);
        break;
      case Stmt::Kind::Print:
        output_ += render(eval(stmt.expr));
        output_.push_back(U'\n');
        break;
      case Stmt::Kind::If:
        exec_block(condition(stmt) ? stmt.body : stmt.else_body);
        break;
      case Stmt::Kind::While:
        while (condition(stmt)) {
          exec_block(stmt.body);
          step(stmt.line);
        }
        break;
      case Stmt::Kind::For: {
        const Value iterable = eval(stmt.expr);
        std::vector<Value> items;
        if (const auto* s = std::get_if<std::u32string>(&iterable.v)) {
          for (char32_t c : *s) items.push_back(Value{c});
        } else if (const auto* l = std::get_if<List>(&iterable.v)) {
          items = *l;
        } else {
          fail(stmt.line, fmt::format("cannot iterate over {}", type_name(iterable)));
        }
        for (std::size_t i = 0;; ++i) {
          const bool more = i < items.size();
          record(stmt.site, more);
          if (!more) break;
          vars_[stmt.target] = items[i];
          exec_block(stmt.body);
          step(stmt.line);
        }
        break;
      }
    }
  }

  std::int64_t as_int(const Value& value, int line) {
    if (const auto* i = std::get_if<std::int64_t>(&value.v)) return *i;
    fail(line, fmt::format("expected int, got {}", type_name(value)));
  }

  Value eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Int: return Value{e.int_value};
      case Expr::Kind::Bool: return Value{e.bool_value};
      case Expr::Kind::Char: return Value{e.text.front()};
      case Expr::Kind::String: return Value{e.text};
      case Expr::Kind::List: {
        List items;
        for (const auto& child : e.children) items.push_back(eval(child));
        return Value{std::move(items)};
      }
      case Expr::Kind::Var: {
        auto it = vars_.find(e.text);
        if (it == vars_.end()) fail(e.line, fmt::format("undefined variable '{}'", encode_utf8(e.text)));
        return it->second;
      }
      case Expr::Kind::Unary: {
        const Value operand = eval(e.children[0]);
        if (e.unary == '!') return Value{!truth(operand, e.line)};
        return Value{-as_int(operand, e.line)};
      }
      case Expr::Kind::Binary:
        if (e.op == BinaryOp::And || e.op == BinaryOp::Or) return Value{logical(e)};
        return binary(e.op, eval(e.children[0]), eval(e.children[1]), e.line);
      case Expr::Kind::Index: return index(eval(e.children[0]), eval(e.children[1]), e.line);
      case Expr::Kind::Call: return call(e);
    }
    fail(e.line, "unknown expression");
  }

  Value index(const Value& target, const Value& at, int line) {
    const std::int64_t i = as_int(at, line);
    auto check = [&](std::size_t size) {
      if (i < 0 || static_cast<std::size_t>(i) >= size) {
        fail(line, fmt::format("index {} out of range for length {}", i, size));
      }
    };
    if (const auto* s = std::get_if<std::u32string>(&target.v)) {
      check(s->size());
      return Value{(*s)[static_cast<std::size_t>(i)]};
    }
    if (const auto* l = std::get_if<List>(&target.v)) {
      check(l->size());
      return (*l)[static_cast<std::size_t>(i)];
    }
    fail(line, fmt::format("cannot index {}", type_name(target)));
  }

  Value call(const Expr& e) {
    std::vector<Value> args;
    for (const auto& child : e.children) args.push_back(eval(child));
    auto arity = [&](std::size_t n) {
      if (args.size() != n) {
        fail(e.line, fmt::format("{}() takes {} argument(s)", encode_utf8(e.text), n));
      }
    };
    if (e.text == U"len") {
      arity(1);
      if (const auto* s = std::get_if<std::u32string>(&args[0].v)) return Value{static_cast<std::int64_t>(s->size())};
      if (const auto* l = std::get_if<List>(&args[0].v)) return Value{static_cast<std::int64_t>(l->size())};
      fail(e.line, fmt::format("len() of {}", type_name(args[0])));
    }
    if (e.text == U"ord") {
      arity(1);
      if (const auto* c = std::get_if<char32_t>(&args[0].v)) return Value{static_cast<std::int64_t>(*c)};
      fail(e.line, fmt::format("ord() of {}", type_name(args[0])));
    }
    if (e.text == U"chr") {
      arity(1);
      const std::int64_t code = as_int(args[0], e.line);
      if (code < 0 || code > 0x10FFFF) fail(e.line, fmt::format("chr() argument {} out of range", code));
      return Value{static_cast<char32_t>(code)};
    }
    if (e.text == U"str") {
      arity(1);
      return Value{render(args[0])};
    }
    fail(e.line, fmt::format("unknown function '{}'", encode_utf8(e.text)));
  }

  static bool contains(const Value& needle, const Value& haystack, int line) {
    if (const auto* l = std::get_if<List>(&haystack.v)) {
      for (const auto& item : *l) {
        if (item == needle) return true;
      }
      return false;
    }
    if (const auto* s = std::get_if<std::u32string>(&haystack.v)) {
      if (const auto* c = std::get_if<char32_t>(&needle.v)) return s->find(*c) != s->npos;
      if (const auto* sub = std::get_if<std::u32string>(&needle.v)) return s->find(*sub) != s->npos;
    }
    fail(line, fmt::format("cannot test {} in {}", type_name(needle), type_name(haystack)));
  }

  Value binary(BinaryOp op, const Value& lhs, const Value& rhs, int line) {
    switch (op) {
      case BinaryOp::Eq: return Value{lhs == rhs};
      case BinaryOp::Ne: return Value{!(lhs == rhs)};
      case BinaryOp::In: return Value{contains(lhs, rhs, line)};
      case BinaryOp::NotIn: return Value{!contains(lhs, rhs, line)};
      case BinaryOp::Lt:
      case BinaryOp::Le:
      case BinaryOp::Gt:
      case BinaryOp::Ge: {
        if (lhs.v.index() != rhs.v.index() || lhs.v.index() == 1 || lhs.v.index() == 4) {
          fail(line, fmt::format("cannot order {} and {}", type_name(lhs), type_name(rhs)));
        }
        bool lt = false;
        if (const auto* a = std::get_if<std::int64_t>(&lhs.v)) {
          lt = *a < std::get<std::int64_t>(rhs.v);
        } else if (const auto* c = std::get_if<char32_t>(&lhs.v)) {
          lt = *c < std::get<char32_t>(rhs.v);
        } else {
          lt = std::get<std::u32string>(lhs.v) < std::get<std::u32string>(rhs.v);
        }
        const bool eq = lhs == rhs;
        switch (op) {
          case BinaryOp::Lt: return Value{lt};
          case BinaryOp::Le: return Value{lt || eq};
          case BinaryOp::Gt: return Value{!lt && !eq};
          default: return Value{!lt};
        }
      }
      case BinaryOp::Add: {
        auto text = [](const Value& v) -> std::optional<std::u32string> {
          if (const auto* s = std::get_if<std::u32string>(&v.v)) return *s;
          if (const auto* c = std::get_if<char32_t>(&v.v)) return std::u32string(1, *c);
          return std::nullopt;
        };
        const bool any_string = std::holds_alternative<std::u32string>(lhs.v) ||
                                std::holds_alternative<std::u32string>(rhs.v);
        if (any_string) {
          auto a = text(lhs);
          auto b = text(rhs);
          if (!a || !b) fail(line, fmt::format("cannot add {} and {}", type_name(lhs), type_name(rhs)));
          return Value{*a + *b};
        }
        if (const auto* a = std::get_if<List>(&lhs.v)) {
          if (const auto* b = std::get_if<List>(&rhs.v)) {
            List joined = *a;
            joined.insert(joined.end(), b->begin(), b->end());
            return Value{std::move(joined)};
          }
        }
        return Value{as_int(lhs, line) + as_int(rhs, line)};
      }
      case BinaryOp::Sub: return Value{as_int(lhs, line) - as_int(rhs, line)};
      case BinaryOp::Mul: return Value{as_int(lhs, line) * as_int(rhs, line)};
      case BinaryOp::Div:
      case BinaryOp::Mod: {
        const std::int64_t a = as_int(lhs, line);
        const std::int64_t b = as_int(rhs, line);
        if (b == 0) fail(line, "division by zero");
        return Value{op == BinaryOp::Div ? a / b : a % b};
      }
      case BinaryOp::And:
      case BinaryOp::Or: break;
    }
    fail(line, "bad operator");
  }

  std::size_t budget_;
  std::size_t steps_ = 0;
  std::map<std::u32string, Value> vars_;
  std::u32string output_;
  Trace trace_;
};

}  // namespace

RunResult run(const Program& program, std::string_view input, std::size_t step_budget) {
  Interpreter interp(input, step_budget);
  try {
    interp.exec_block(program.statements);
  } catch (const RuntimeError& e) {
    return interp.finish(e.message);
  }
  return interp.finish(std::nullopt);
}

}  // namespace ddmin_loc::minilang
