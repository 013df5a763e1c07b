#pragma once
#include <string>
#include <vector>

#include "csplab/errors.hpp"

namespace csplab {

// One tokenized line of an input file. `#` starts a comment; blank lines are
// dropped before they reach the parsers, but the original line number is kept
// so errors can point at the file.
struct Line {
    int number = 0;
    std::vector<std::string> tokens;

    const std::string& tok(size_t i, const std::string& what) const;
    int num(size_t i, const std::string& what) const;
    [[noreturn]] void fail(const std::string& msg) const;
};

// Splits `text` into comment-stripped, tokenized lines.
std::vector<Line> tokenize_text(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace csplab
