#pragma once

// Shared token stream for formula text, signature files, valuation rule
// patterns and proof files. Internal to the library sources.

#include <cctype>
#include <string>
#include <vector>

#include "plt/syntax.hpp"

namespace plt::lexdetail {

enum class Tok {
  Ident, Param, Number,
  LParen, RParen, Comma, Dot, Equals, Bang, Tilde, Amp, Pipe, Arrow,
  Caret, Plus, Colon, Neq, Ge, Le, Gt, Lt, ColonEq, End
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  size_t pos = 0;
};

inline bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

inline std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  size_t i = 0;
  auto push = [&](Tok k, std::string t, size_t p) { out.push_back({k, std::move(t), p}); };
  while (i < s.size()) {
    char c = s[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++i;
      continue;
    }
    if (c == '#') break;  // comment to end of line
    size_t start = i;
    if (ident_start(c)) {
      size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      push(Tok::Ident, s.substr(i, j - i), start);
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      push(Tok::Number, s.substr(i, j - i), start);
      i = j;
      continue;
    }
    if (c == '@') {
      size_t j = i + 1;
      if (j >= s.size() || !ident_start(s[j]))
        throw error("lex error at offset " + std::to_string(i) + ": @ needs a name");
      size_t k = j;
      while (k < s.size() && ident_char(s[k])) ++k;
      push(Tok::Param, s.substr(j, k - j), start);
      i = k;
      continue;
    }
    auto two = [&](char a, char b) { return c == a && i + 1 < s.size() && s[i + 1] == b; };
    if (two('-', '>')) { push(Tok::Arrow, "->", start); i += 2; continue; }
    if (two('!', '=')) { push(Tok::Neq, "!=", start); i += 2; continue; }
    if (two('>', '=')) { push(Tok::Ge, ">=", start); i += 2; continue; }
    if (two('<', '=')) { push(Tok::Le, "<=", start); i += 2; continue; }
    if (two(':', '=')) { push(Tok::ColonEq, ":=", start); i += 2; continue; }
    switch (c) {
      case '(': push(Tok::LParen, "(", start); break;
      case ')': push(Tok::RParen, ")", start); break;
      case ',': push(Tok::Comma, ",", start); break;
      case '.': push(Tok::Dot, ".", start); break;
      case '=': push(Tok::Equals, "=", start); break;
      case '!': push(Tok::Bang, "!", start); break;
      case '~': push(Tok::Tilde, "~", start); break;
      case '&': push(Tok::Amp, "&", start); break;
      case '|': push(Tok::Pipe, "|", start); break;
      case '^': push(Tok::Caret, "^", start); break;
      case '+': push(Tok::Plus, "+", start); break;
      case ':': push(Tok::Colon, ":", start); break;
      case '>': push(Tok::Gt, ">", start); break;
      case '<': push(Tok::Lt, "<", start); break;
      default:
        throw error("lex error at offset " + std::to_string(i) + ": unexpected '" +
                    std::string(1, c) + "'");
    }
    ++i;
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

}  // namespace plt::lexdetail
