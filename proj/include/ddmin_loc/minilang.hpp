#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ddmin_loc/core.hpp"

// MiniLang: a line-oriented toy language used to build buggy/golden subject
// pairs. One statement per physical line; `{`, `}` and `else` sit alone on
// their lines and are not executable. `input` is bound to the input string.
//
//   word = input
//   count = 0
//   for w in word
//   {
//   if w in ['a','e']
//   {
//   count = count + 1
//   }
//   }
//   print count
namespace ddmin_loc::minilang {

class SyntaxError : public Error {
public:
  SyntaxError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, In, NotIn, And, Or };

struct Expr {
  enum class Kind { Int, Bool, Char, String, List, Var, Unary, Binary, Index, Call };
  Kind kind = Kind::Int;
  std::int64_t int_value = 0;
  bool bool_value = false;
  std::u32string text;  // char / string literal, identifier or builtin name
  BinaryOp op = BinaryOp::Add;
  char unary = '-';  // '-' or '!' (not)
  std::vector<Expr> children;
  int line = 0;
  int column = 0;      // 1-based, in scalar values
  int end_column = 0;  // one past the last scalar value
  // Set on top-level operands of an and/or chain in a condition.
  std::optional<int> operand_site;
};

struct Stmt {
  enum class Kind { Assign, If, While, For, Print };
  Kind kind = Kind::Assign;
  int line = 0;
  std::u32string target;  // Assign target / For loop variable
  Expr expr;              // value, condition or iterable
  int site = -1;          // If / While / For
  std::vector<Stmt> body;
  std::vector<Stmt> else_body;
};

struct Program {
  std::vector<Stmt> statements;
  std::vector<std::string> source_lines;
  std::set<int> executable_lines;
  std::vector<PredicateSite> sites;
};

/// Throws SyntaxError with a 1-based line and column.
Program parse(std::string_view source);

ElementMap element_map(const Program& program);

inline constexpr std::size_t kDefaultStepBudget = 1'000'000;

struct RunResult {
  std::string output;  // UTF-8, one line per print
  Trace trace;         // coverage up to the point execution stopped
  std::optional<std::string> error;
  bool ok() const { return !error; }
};

/// Deterministic evaluation. Runtime errors (type mismatch, bad index,
/// division by zero, step budget) stop execution and are reported in
/// `error`; output and trace up to that point are kept.
RunResult run(const Program& program, std::string_view input,
              std::size_t step_budget = kDefaultStepBudget);

}  // namespace ddmin_loc::minilang
