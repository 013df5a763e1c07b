#include "csplab/textio.hpp"

#include <fstream>
#include <sstream>

namespace csplab {

const std::string& Line::tok(size_t i, const std::string& what) const {
    if (i >= tokens.size()) fail("missing " + what);
    return tokens[i];
}

int Line::num(size_t i, const std::string& what) const {
    const std::string& s = tok(i, what);
    try {
        size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail("expected integer for " + what + ", got '" + s + "'");
    }
}

void Line::fail(const std::string& msg) const {
    throw InputError("line " + std::to_string(number) + ": " + msg);
}

std::vector<Line> tokenize_text(const std::string& text) {
    std::vector<Line> out;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        Line line;
        line.number = lineno;
        std::istringstream ls(raw);
        std::string t;
        while (ls >> t) line.tokens.push_back(t);
        if (!line.tokens.empty()) out.push_back(std::move(line));
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << content;
}

} // namespace csplab
