#include "qpr/graph.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "qpr/errors.hpp"

namespace qpr {

namespace {

std::string strip(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool parse_int(const std::string& tok, long& out) {
    if (tok.empty()) return false;
    std::size_t pos = 0;
    try {
        out = std::stol(tok, &pos);
    } catch (...) {
        return false;
    }
    return pos == tok.size();
}

} // namespace

DirectedGraph parse_edge_list(const std::string& text, const std::string& origin) {
    DirectedGraph g;
    std::istringstream in(text);
    std::string line;
    long declared = -1;
    long max_id = 0;
    std::size_t lineno = 0;
    bool saw_content = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;
        if (!saw_content && line.rfind("nodes:", 0) == 0) {
            saw_content = true;
            long n;
            if (!parse_int(strip(line.substr(6)), n) || n < 1)
                throw ParseError(origin + ":" + std::to_string(lineno) + ": invalid node count");
            declared = n;
            continue;
        }
        saw_content = true;
        std::istringstream ls(line);
        std::string a, b, extra;
        ls >> a >> b;
        if (ls >> extra)
            throw ParseError(origin + ":" + std::to_string(lineno) + ": expected 'src<TAB>dst'");
        long src, dst;
        if (!parse_int(a, src) || !parse_int(b, dst))
            throw ParseError(origin + ":" + std::to_string(lineno) + ": non-integer node id");
        if (src < 1 || dst < 1)
            throw ParseError(origin + ":" + std::to_string(lineno) + ": node ids are 1-based");
        g.edges.insert({static_cast<int>(src), static_cast<int>(dst)});
        max_id = std::max({max_id, src, dst});
    }
    if (declared >= 0) {
        if (max_id > declared)
            throw ParseError(origin + ": edge references node " + std::to_string(max_id) +
                             " beyond declared count " + std::to_string(declared));
        g.n = static_cast<std::size_t>(declared);
    } else {
        g.n = static_cast<std::size_t>(max_id);
    }
    if (g.n == 0) throw ParseError(origin + ": empty graph");
    return g;
}

DirectedGraph load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open graph file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_edge_list(buf.str(), path);
}

} // namespace qpr
