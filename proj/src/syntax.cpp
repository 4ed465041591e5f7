#include "relog/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

namespace relog::syntax {

namespace {

const std::set<std::string, std::less<>> kControl = {"if",     "for",   "while", "switch", "catch",  "return",
                                                     "sizeof", "do",    "else",  "try",    "static_assert",
                                                     "decltype", "alignof", "noexcept"};

const std::set<std::string, std::less<>> kTypeWords = {
    "int",   "long", "short", "char",   "bool",     "double",   "float", "auto",  "const",   "unsigned",
    "signed", "void", "static", "return", "size_t", "constexpr", "std",  "string", "vector", "volatile"};

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Removes string/char literal contents and // comments so braces and
// operators inside them are not seen.
std::string code_only(std::string_view line, bool keep_literals = false) {
  std::string out;
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quote) {
      if (keep_literals) out += c;
      if (c == '\\') {
        if (keep_literals && i + 1 < line.size()) out += line[i + 1];
        ++i;
      } else if (c == quote) {
        quote = 0;
        if (!keep_literals) out += c;
      }
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
      out += c;
      continue;
    }
    if (c == '/' && i + 1 < line.size() && line[i + 1] == '/') break;
    if (c == '/' && i + 1 < line.size() && line[i + 1] == '*') {
      auto end = line.find("*/", i + 2);
      if (end == std::string_view::npos) break;
      i = end + 1;
      out += ' ';
      continue;
    }
    out += c;
  }
  return out;
}

std::vector<std::string> split_params(std::string_view params) {
  std::vector<std::string> out;
  int depth = 0;
  std::string current;
  auto flush = [&] {
    std::string p(trim(current));
    current.clear();
    if (p.empty() || p == "void") return;
    if (auto eq = p.find('='); eq != std::string::npos) p = std::string(trim(p.substr(0, eq)));
    std::size_t end = p.size();
    while (end > 0 && (p[end - 1] == ']' || p[end - 1] == '[')) --end;
    std::size_t start = end;
    while (start > 0 && ident_char(p[start - 1])) --start;
    if (start == end || start == 0) return;  // unnamed parameter
    std::string name = p.substr(start, end - start);
    if (!kTypeWords.count(name)) out.push_back(name);
  };
  for (char c : params) {
    if (c == '<' || c == '(' || c == '[' || c == '{') ++depth;
    if (c == '>' || c == ')' || c == ']' || c == '}') --depth;
    if (c == ',' && depth == 0) {
      flush();
      continue;
    }
    current += c;
  }
  flush();
  return out;
}

// `x = {` or `f({` open an initializer, not a block.
bool opens_initializer(std::string_view line) {
  auto body = trim(line.substr(0, line.size() - 1));
  return !body.empty() && (body.back() == '=' || body.back() == '(' || body.back() == ',');
}

bool starts_with_word(std::string_view text, std::string_view word) {
  return text.substr(0, word.size()) == word && (text.size() == word.size() || !ident_char(text[word.size()]));
}

}  // namespace

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<FunctionSpan> find_functions(const std::vector<std::string>& lines, const RenderProfile& profile) {
  const char open = profile.block_open.empty() ? '{' : profile.block_open.front();
  const char close = profile.block_close.empty() ? '}' : profile.block_close.front();
  std::vector<FunctionSpan> out;
  std::string header;
  std::vector<std::size_t> header_lines;
  int depth = 0;
  int function_depth = -1;  // depth at which the current function body opened
  bool in_block_comment = false;

  for (std::size_t n = 0; n < lines.size(); ++n) {
    std::string line = lines[n];
    if (in_block_comment) {
      auto end = line.find("*/");
      if (end == std::string::npos) continue;
      line = line.substr(end + 2);
      in_block_comment = false;
    }
    if (auto start = line.find("/*"); start != std::string::npos && line.find("*/", start) == std::string::npos) {
      line = line.substr(0, start);
      in_block_comment = true;
    }
    const auto code = code_only(line);
    if (!trim(code).empty() && trim(code).front() == '#') continue;
    for (char c : code) {
      if (c == open) {
        if (function_depth < 0) {
          // Decide whether the header before this brace is a function signature.
          auto rparen = header.rfind(')');
          auto lparen = std::string::npos;
          if (rparen != std::string::npos) {
            int d = 0;
            for (std::size_t i = rparen + 1; i-- > 0;) {
              if (header[i] == ')') ++d;
              if (header[i] == '(' && --d == 0) {
                lparen = i;
                break;
              }
            }
          }
          if (lparen != std::string::npos) {
            std::size_t e = lparen;
            while (e > 0 && std::isspace(static_cast<unsigned char>(header[e - 1]))) --e;
            std::size_t s = e;
            while (s > 0 && ident_char(header[s - 1])) --s;
            std::string name = header.substr(s, e - s);
            auto head = std::string(trim(header.substr(0, s)));
            bool lambda_or_init = header.substr(0, lparen).find('=') != std::string::npos ||
                                  header.substr(0, lparen).find('[') != std::string::npos;
            bool type_decl = starts_with_word(head, "class") || starts_with_word(head, "struct") ||
                             starts_with_word(head, "namespace") || starts_with_word(head, "enum");
            if (!name.empty() && !std::isdigit(static_cast<unsigned char>(name[0])) && !kControl.count(name) &&
                !lambda_or_init && !type_decl) {
              FunctionSpan f;
              f.name = name;
              f.params = split_params(std::string_view(header).substr(lparen + 1, header.rfind(')') - lparen - 1));
              f.signature_line = header_lines.empty() ? n + 1 : header_lines[std::min(s, header_lines.size() - 1)];
              f.open_line = n + 1;
              out.push_back(std::move(f));
              function_depth = depth;
            }
          }
        }
        ++depth;
        header.clear();
        header_lines.clear();
      } else if (c == close) {
        --depth;
        if (function_depth >= 0 && depth == function_depth) {
          out.back().close_line = n + 1;
          function_depth = -1;
        }
        header.clear();
        header_lines.clear();
      } else if (c == ';') {
        header.clear();
        header_lines.clear();
      } else {
        if (header.empty() && std::isspace(static_cast<unsigned char>(c))) continue;
        header += c;
        header_lines.push_back(n + 1);
      }
    }
    if (!header.empty()) {
      header += ' ';
      header_lines.push_back(n + 1);
    }
  }
  if (function_depth >= 0 && !out.empty() && out.back().close_line == 0) out.back().close_line = lines.size();
  return out;
}

std::optional<FunctionSpan> enclosing_function(const std::vector<std::string>& lines, std::size_t line,
                                               const RenderProfile& profile) {
  for (auto& f : find_functions(lines, profile)) {
    if (f.contains(line)) return f;
  }
  return std::nullopt;
}

std::vector<std::string> assigned_variables(std::string_view raw) {
  const std::string line = code_only(raw);
  std::vector<std::string> vars;
  auto add = [&](const std::string& v) {
    if (v.empty() || std::isdigit(static_cast<unsigned char>(v[0])) || kTypeWords.count(v) || kControl.count(v)) return;
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
  };
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] != '=') continue;
    if (i + 1 < line.size() && line[i + 1] == '=') {
      ++i;
      continue;
    }
    std::size_t j = i;
    if (j > 0 && std::string_view("!<>=").find(line[j - 1]) != std::string_view::npos) {
      // comparison, unless it is a compound <<= / >>=
      if (!(j > 1 && (line.substr(j - 2, 2) == "<<" || line.substr(j - 2, 2) == ">>"))) continue;
      j -= 2;
    } else if (j > 0 && std::string_view("+-*/%&|^").find(line[j - 1]) != std::string_view::npos) {
      --j;
    }
    while (j > 0 && line[j - 1] == ' ') --j;
    std::size_t e = j;
    while (j > 0 && ident_char(line[j - 1])) --j;
    if (j == e) continue;
    // skip member writes like a.b = x and p->b = x
    if (j > 0 && (line[j - 1] == '.' || (j > 1 && line.substr(j - 2, 2) == "->"))) continue;
    add(line.substr(j, e - j));
  }
  static const std::regex inc(R"((\b[A-Za-z_]\w*)\s*(\+\+|--)|(\+\+|--)\s*([A-Za-z_]\w*))");
  for (auto it = std::sregex_iterator(line.begin(), line.end(), inc); it != std::sregex_iterator(); ++it) {
    add((*it)[1].matched ? (*it)[1].str() : (*it)[4].str());
  }
  return vars;
}

std::optional<std::string> return_expression(std::string_view raw) {
  const auto code = code_only(raw, true);
  auto line = trim(code);
  if (!starts_with_word(line, "return")) return std::nullopt;
  if (line.empty() || line.back() != ';') return std::nullopt;
  return std::string(trim(line.substr(6, line.size() - 7)));
}

bool safe_after(std::string_view raw) {
  const auto code = code_only(raw);
  auto line = trim(code);
  if (line.empty()) return false;
  if (starts_with_word(line, "return") || starts_with_word(line, "throw") || starts_with_word(line, "break") ||
      starts_with_word(line, "continue") || line.find("RT_THROW") != std::string_view::npos) {
    return false;
  }
  if (line.back() == '{') {
    // opening a class/struct/namespace body or an initializer is not a statement context
    return !starts_with_word(line, "class") && !starts_with_word(line, "struct") &&
           !starts_with_word(line, "namespace") && !starts_with_word(line, "enum") &&
           !opens_initializer(line) && !starts_with_word(line, "switch");
  }
  if (line.back() != ';') return false;
  // `for (a; b; c)` split over lines or a one-line `if (x) y;` keep the block intact
  return !starts_with_word(line, "for") && !starts_with_word(line, "if") && !starts_with_word(line, "while") &&
         !starts_with_word(line, "else");
}

bool safe_before(const std::vector<std::string>& lines, std::size_t n) {
  if (n == 0 || n > lines.size()) return false;
  const auto self_code = code_only(lines[n - 1]);
  auto self = trim(self_code);
  if (self.empty() || self.front() == '#') return false;
  if (starts_with_word(self, "else") || starts_with_word(self, "catch") || starts_with_word(self, "case") ||
      starts_with_word(self, "default") || self.front() == '{' || self.front() == '.' || self.front() == ')' ||
      self.front() == ':' || self.front() == '?') {
    return false;
  }
  for (std::size_t p = n - 1; p-- > 0;) {
    const auto prev_code = code_only(lines[p]);
    auto prev = trim(prev_code);
    if (prev.empty()) continue;
    if (prev.front() == '#') return false;
    char last = prev.back();
    if (last == '{') {
      return !starts_with_word(prev, "class") && !starts_with_word(prev, "struct") &&
             !starts_with_word(prev, "namespace") && !starts_with_word(prev, "enum") &&
             !starts_with_word(prev, "switch") && !opens_initializer(prev);
    }
    return last == ';' || last == '}';
  }
  return false;
}

bool is_expression_like(std::string_view text) {
  static const std::regex expr(R"(^[A-Za-z_][\w]*(?:(?:\.|->)[A-Za-z_]\w*|\[[^\]]+\]|\(\))*$)");
  return std::regex_match(std::string(text), expr);
}

}  // namespace relog::syntax
