#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "qlint/errors.hpp"

namespace qlint {

enum class TokenKind {
  Name,
  Keyword,
  Number,
  String,
  Op,
  Newline,
  Indent,
  Dedent,
  EndOfFile,
};

struct Token {
  TokenKind kind;
  std::string text;
  int line = 0;      // 1-based
  int col = 0;       // 1-based
  size_t offset = 0; // byte offset into the source
};

inline const std::unordered_set<std::string>& python_keywords() {
  static const std::unordered_set<std::string> kw = {
      "False", "None",   "True",  "and",    "as",     "assert", "async",
      "await", "break",  "class", "continue", "def",  "del",    "elif",
      "else",  "except", "finally", "for",  "from",   "global", "if",
      "import", "in",    "is",    "lambda", "nonlocal", "not",  "or",
      "pass",  "raise",  "return", "try",   "while",  "with",   "yield"};
  return kw;
}

/// Commonly referenced Python builtins. Used by the obfuscator's preserved-name
/// set; completeness beyond what real Qiskit scripts touch is not required.
inline const std::unordered_set<std::string>& python_builtins() {
  static const std::unordered_set<std::string> names = {
      "abs",     "all",     "any",    "bin",      "bool",   "bytes", "callable",
      "chr",     "complex", "dict",   "dir",      "divmod", "enumerate",
      "eval",    "exec",    "filter", "float",    "format", "frozenset",
      "getattr", "hasattr", "hash",   "hex",      "id",     "input", "int",
      "isinstance", "issubclass", "iter", "len",  "list",   "map",   "max",
      "memoryview", "min",  "next",   "object",   "oct",    "open",  "ord",
      "pow",     "print",   "property", "range",  "repr",   "reversed",
      "round",   "set",     "setattr", "slice",   "sorted", "staticmethod",
      "str",     "sum",     "super",  "tuple",    "type",   "vars",  "zip",
      "Exception", "ValueError", "TypeError", "KeyError", "IndexError",
      "RuntimeError", "NotImplementedError", "StopIteration", "ArithmeticError",
      "AttributeError", "ZeroDivisionError", "FileNotFoundError", "OSError",
      "NameError", "__name__", "__main__", "__file__", "__doc__"};
  return names;
}

/// Tokenizer for the analyzed host-language subset. Produces logical-line
/// Newline tokens plus Indent/Dedent pairs; comments and blank lines are
/// skipped. All positions are 1-based with byte offsets into the original
/// text, which the obfuscator relies on for in-place rewriting.
class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> tokenize() {
    tokens_.clear();
    indents_ = {0};
    pos_ = 0;
    line_ = 1;
    col_ = 1;
    at_line_start_ = true;
    brackets_.clear();

    while (pos_ < src_.size()) {
      if (at_line_start_ && brackets_.empty()) {
        if (!handle_indentation()) break;  // hit EOF on blank tail
        at_line_start_ = false;
        continue;
      }
      char c = peek();
      if (c == '#') {
        skip_comment();
      } else if (c == '\n') {
        advance();
        if (brackets_.empty()) {
          emit_newline_if_needed();
          at_line_start_ = true;
        }
      } else if (c == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') {
        advance();
        advance();
      } else if (c == '\\' && pos_ + 2 < src_.size() && src_[pos_ + 1] == '\r' &&
                 src_[pos_ + 2] == '\n') {
        advance();
        advance();
        advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f') {
        advance();
      } else if (is_string_start()) {
        lex_string();
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && pos_ + 1 < src_.size() &&
                  std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        lex_number();
      } else if (is_ident_start(c)) {
        lex_name();
      } else {
        lex_operator();
      }
    }

    if (!brackets_.empty()) {
      const Token& open = brackets_.back();
      throw SyntaxError("'" + open.text + "' was never closed", open.line, open.col);
    }
    emit_newline_if_needed();
    while (indents_.size() > 1) {
      indents_.pop_back();
      push(TokenKind::Dedent, "");
    }
    push(TokenKind::EndOfFile, "");
    return std::move(tokens_);
  }

 private:
  char peek(size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void push(TokenKind kind, std::string text, int line = -1, int col = -1,
            size_t offset = static_cast<size_t>(-1)) {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.line = line < 0 ? line_ : line;
    t.col = col < 0 ? col_ : col;
    t.offset = offset == static_cast<size_t>(-1) ? pos_ : offset;
    tokens_.push_back(std::move(t));
  }

  void emit_newline_if_needed() {
    if (!tokens_.empty() && tokens_.back().kind != TokenKind::Newline &&
        tokens_.back().kind != TokenKind::Indent &&
        tokens_.back().kind != TokenKind::Dedent) {
      push(TokenKind::Newline, "\n");
    }
  }

  void skip_comment() {
    while (pos_ < src_.size() && src_[pos_] != '\n') advance();
  }

  // Measures leading whitespace of the upcoming line and emits Indent/Dedent.
  // Returns false when only blank/comment lines remain.
  bool handle_indentation() {
    while (true) {
      size_t scan = pos_;
      int width = 0;
      while (scan < src_.size() && (src_[scan] == ' ' || src_[scan] == '\t')) {
        width = src_[scan] == '\t' ? (width / 8 + 1) * 8 : width + 1;
        ++scan;
      }
      if (scan >= src_.size()) {
        while (pos_ < src_.size()) advance();
        return false;
      }
      char c = src_[scan];
      if (c == '\n' || c == '\r' || c == '#' || c == '\f') {
        // Blank or comment-only line: consume it without indent bookkeeping.
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        if (pos_ < src_.size()) advance();
        continue;
      }
      if (c == '\\' && scan + 1 < src_.size() && src_[scan + 1] == '\n') {
        while (pos_ <= scan + 1) advance();
        continue;
      }
      while (pos_ < scan) advance();
      if (width > indents_.back()) {
        indents_.push_back(width);
        push(TokenKind::Indent, "");
      } else {
        while (width < indents_.back()) {
          indents_.pop_back();
          push(TokenKind::Dedent, "");
        }
        if (width != indents_.back())
          throw SyntaxError("unindent does not match any outer indentation level", line_, col_);
      }
      return true;
    }
  }

  static bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
           static_cast<unsigned char>(c) >= 0x80;
  }

  static bool is_ident_cont(char c) {
    return is_ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
  }

  bool is_string_start() const {
    char c = peek();
    if (c == '"' || c == '\'') return true;
    // String prefix: up to two of r/b/u/f in either case, then a quote.
    size_t i = 0;
    while (i < 2) {
      char p = peek(i);
      if (p == 'r' || p == 'R' || p == 'b' || p == 'B' || p == 'u' || p == 'U' ||
          p == 'f' || p == 'F') {
        ++i;
      } else {
        break;
      }
    }
    if (i == 0) return false;
    char q = peek(i);
    return q == '"' || q == '\'';
  }

  void lex_string() {
    int start_line = line_, start_col = col_;
    size_t start_off = pos_;
    bool raw = false;
    while (true) {
      char c = peek();
      if (c == 'r' || c == 'R') raw = true;
      if (c == 'r' || c == 'R' || c == 'b' || c == 'B' || c == 'u' || c == 'U' ||
          c == 'f' || c == 'F') {
        advance();
      } else {
        break;
      }
    }
    char quote = peek();
    advance();
    bool triple = false;
    if (peek() == quote && peek(1) == quote) {
      triple = true;
      advance();
      advance();
    }
    while (true) {
      if (pos_ >= src_.size()) {
        throw SyntaxError(triple ? "unterminated triple-quoted string literal"
                                 : "unterminated string literal",
                          start_line, start_col);
      }
      char c = peek();
      if (c == '\\' && pos_ + 1 < src_.size()) {
        // In raw strings the backslash still prevents quote termination.
        advance();
        advance();
        continue;
      }
      (void)raw;
      if (!triple && c == '\n')
        throw SyntaxError("unterminated string literal", start_line, start_col);
      if (c == quote) {
        if (!triple) {
          advance();
          break;
        }
        if (peek(1) == quote && peek(2) == quote) {
          advance();
          advance();
          advance();
          break;
        }
      }
      advance();
    }
    push(TokenKind::String, std::string(src_.substr(start_off, pos_ - start_off)),
         start_line, start_col, start_off);
  }

  void lex_number() {
    int start_line = line_, start_col = col_;
    size_t start_off = pos_;
    auto digit_run = [&](auto pred) {
      while (pos_ < src_.size() && (pred(peek()) || peek() == '_')) advance();
    };
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      advance();
      advance();
      digit_run([](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
    } else if (peek() == '0' && (peek(1) == 'o' || peek(1) == 'O')) {
      advance();
      advance();
      digit_run([](char c) { return c >= '0' && c <= '7'; });
    } else if (peek() == '0' && (peek(1) == 'b' || peek(1) == 'B')) {
      advance();
      advance();
      digit_run([](char c) { return c == '0' || c == '1'; });
    } else {
      digit_run([](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
      if (peek() == '.') {
        advance();
        digit_run([](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
      }
      if (peek() == 'e' || peek() == 'E') {
        size_t save = pos_;
        int save_line = line_, save_col = col_;
        advance();
        if (peek() == '+' || peek() == '-') advance();
        if (std::isdigit(static_cast<unsigned char>(peek()))) {
          digit_run([](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
        } else {
          pos_ = save;
          line_ = save_line;
          col_ = save_col;
        }
      }
    }
    if (peek() == 'j' || peek() == 'J') advance();
    push(TokenKind::Number, std::string(src_.substr(start_off, pos_ - start_off)),
         start_line, start_col, start_off);
  }

  void lex_name() {
    int start_line = line_, start_col = col_;
    size_t start_off = pos_;
    while (pos_ < src_.size() && is_ident_cont(peek())) advance();
    std::string text(src_.substr(start_off, pos_ - start_off));
    TokenKind kind = python_keywords().count(text) ? TokenKind::Keyword : TokenKind::Name;
    push(kind, std::move(text), start_line, start_col, start_off);
  }

  void lex_operator() {
    static const std::vector<std::string> multi = {
        "**=", "//=", ">>=", "<<=", "...", "!=", ">=", "<=", "==", "->", ":=",
        "+=", "-=", "*=", "/=", "%=", "@=", "&=", "|=", "^=", "**", "//", "<<",
        ">>"};
    int start_line = line_, start_col = col_;
    size_t start_off = pos_;
    for (const auto& op : multi) {
      if (src_.compare(pos_, op.size(), op) == 0) {
        for (size_t i = 0; i < op.size(); ++i) advance();
        push(TokenKind::Op, op, start_line, start_col, start_off);
        return;
      }
    }
    char c = peek();
    static const std::string singles = "+-*/%@<>=&|^~()[]{},:.;";
    if (singles.find(c) == std::string::npos)
      throw SyntaxError(std::string("invalid character '") + c + "'", line_, col_);
    advance();
    std::string text(1, c);
    if (c == '(' || c == '[' || c == '{') {
      Token open;
      open.kind = TokenKind::Op;
      open.text = text;
      open.line = start_line;
      open.col = start_col;
      open.offset = start_off;
      brackets_.push_back(open);
    } else if (c == ')' || c == ']' || c == '}') {
      static const std::string openers = "([{", closers = ")]}";
      if (brackets_.empty())
        throw SyntaxError("unmatched '" + text + "'", start_line, start_col);
      char expected = closers[openers.find(brackets_.back().text[0])];
      if (expected != c)
        throw SyntaxError("closing '" + text + "' does not match opening '" +
                              brackets_.back().text + "'",
                          start_line, start_col);
      brackets_.pop_back();
    }
    push(TokenKind::Op, std::move(text), start_line, start_col, start_off);
  }

  std::string_view src_;
  std::vector<Token> tokens_;
  std::vector<int> indents_;
  std::vector<Token> brackets_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  bool at_line_start_ = true;
};

}  // namespace qlint
