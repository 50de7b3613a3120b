#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tag {

// Lower-cases, splits on whitespace and detaches punctuation into its own
// token. A single-quoted span that opens a token ('c', 'new york') stays one
// token including its quotes. Hyphens and apostrophes inside a word, '$' and
// '_' stay attached, as do '.'/',' between digits. Throws ValidationError on
// all-whitespace input.
std::vector<std::string> tokenize_comment(std::string_view text);

std::string join_tokens(const std::vector<std::string>& tokens);

}  // namespace tag
