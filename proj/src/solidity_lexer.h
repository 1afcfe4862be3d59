// Copyright 2026 The VulnBench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VULNBENCH_SRC_SOLIDITY_LEXER_H_
#define VULNBENCH_SRC_SOLIDITY_LEXER_H_

#include <string_view>
#include <vector>

namespace vulnbench::internal {

enum class TokenKind { kIdentifier, kNumber, kString, kPunct };

struct Token {
  TokenKind kind;
  std::string_view text;
  int line;  // 1-based

  bool is(std::string_view s) const { return text == s; }
  bool is_punct(char c) const {
    return kind == TokenKind::kPunct && text.size() == 1 && text[0] == c;
  }
};

// Just enough of a Solidity lexer to find declarations and match braces.
// Comments are skipped (so un-normalized text works too), string literals
// become a single token, and every other non-identifier character is a
// one-character punctuation token. An unterminated block comment throws
// ParseError.
std::vector<Token> tokenize(std::string_view text);

}  // namespace vulnbench::internal

#endif  // VULNBENCH_SRC_SOLIDITY_LEXER_H_
