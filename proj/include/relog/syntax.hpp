#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relog/core.hpp"

// Line-level heuristics over brace-delimited sources. Good enough for
// locating methods and simple statements; not a parser.
namespace relog::syntax {

struct FunctionSpan {
  std::string name;
  std::vector<std::string> params;
  std::size_t signature_line = 0;
  std::size_t open_line = 0;
  std::size_t close_line = 0;

  bool contains(std::size_t line) const { return line >= signature_line && line <= close_line; }
};

/// Outermost function bodies, in source order.
std::vector<FunctionSpan> find_functions(const std::vector<std::string>& lines, const RenderProfile& profile);

std::optional<FunctionSpan> enclosing_function(const std::vector<std::string>& lines, std::size_t line,
                                               const RenderProfile& profile);

/// Identifiers assigned, declared with an initializer, or incremented on a line.
std::vector<std::string> assigned_variables(std::string_view line);

/// Expression of a `return <expr>;` line; empty string for a bare `return;`.
std::optional<std::string> return_expression(std::string_view line);

/// A statement placed on its own line directly after `line` is a complete
/// statement in the same block.
bool safe_after(std::string_view line);

/// Same for a statement placed directly before line `n` (1-based).
bool safe_before(const std::vector<std::string>& lines, std::size_t n);

/// True for identifiers and simple member/index expressions.
bool is_expression_like(std::string_view text);

std::string_view trim(std::string_view s);

}  // namespace relog::syntax
