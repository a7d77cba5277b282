#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace qpr {

/** Directed graph on nodes 1..n. Duplicate edges collapse to one. */
struct DirectedGraph {
    std::size_t n = 0;
    std::set<std::pair<int, int>> edges;

    std::vector<int> out_neighbors(int src) const {
        std::vector<int> out;
        for (auto it = edges.lower_bound({src, 0}); it != edges.end() && it->first == src; ++it)
            out.push_back(it->second);
        return out;
    }
    std::size_t out_degree(int src) const { return out_neighbors(src).size(); }
};

/** Parse a tab-separated edge list: one "src<TAB>dst" pair per line, '#'
 *  starts a comment, an optional leading "nodes: N" line declares the node
 *  count (otherwise the maximum id seen is used). Node ids are 1-based. */
DirectedGraph load_edge_list(const std::string& path);

/** Same, from an already-read buffer (used by tests). */
DirectedGraph parse_edge_list(const std::string& text, const std::string& origin = "<memory>");

} // namespace qpr
