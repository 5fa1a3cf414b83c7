#pragma once

#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "graph.hpp"

namespace treembed {

enum class GraphFormat { EdgeList, Graph6 };

namespace detail {

inline bool is_uint_token(const std::string& s) {
    if (s.empty() || s.size() > 18) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

inline Graph parse_edge_list(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<int> row_line;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool all_numeric = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        if (tok.size() > 2) throw ParseError("expected 'u v' or a single vertex", "line " + std::to_string(line_no));
        if (tok.size() == 2 && tok[0] == tok[1]) throw ParseError("self-loop", "line " + std::to_string(line_no));
        for (auto& t : tok) all_numeric = all_numeric && is_uint_token(t);
        rows.push_back(std::move(tok));
        row_line.push_back(line_no);
    }
    // Numeric ids keep their relative order; other labels are numbered by first appearance.
    std::unordered_map<std::string, int> id;
    if (all_numeric) {
        std::map<long long, std::string> order;
        for (auto& r : rows)
            for (auto& t : r) order.emplace(std::stoll(t), t);
        int next = 0;
        for (auto& [num, t] : order) id.emplace(t, next++);
        // "007" and "7" name the same vertex
        for (auto& r : rows)
            for (auto& t : r) id.emplace(t, id.at(order.at(std::stoll(t))));
    } else {
        int next = 0;
        for (auto& r : rows)
            for (auto& t : r)
                if (id.emplace(t, next).second) ++next;
    }
    std::vector<std::pair<int, int>> edges;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != 2) continue;
        int u = id.at(rows[i][0]), v = id.at(rows[i][1]);
        if (u == v) throw ParseError("self-loop", "line " + std::to_string(row_line[i]));
        edges.emplace_back(u, v);
    }
    int n = 0;
    for (auto& [t, v] : id) n = std::max(n, v + 1);
    return Graph(n, edges);
}

inline Graph parse_graph6(const std::string& raw) {
    std::string s = raw;
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.pop_back();
    if (s.empty()) return Graph(0);
    if (s.rfind(">>", 0) == 0) throw ParseError("graph6 header lines are not accepted", "byte 0");
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i] < 63 || s[i] > 126) throw ParseError("byte outside graph6 range", "byte " + std::to_string(i));
    std::size_t pos = 0;
    long long n = 0;
    auto need = [&](std::size_t cnt) {
        if (pos + cnt > s.size()) throw ParseError("truncated size field", "byte " + std::to_string(s.size()));
    };
    if (s[0] != 126) {
        n = s[0] - 63;
        pos = 1;
    } else if (s.size() > 1 && s[1] != 126) {
        need(4);
        for (int i = 1; i <= 3; ++i) n = (n << 6) | (s[i] - 63);
        pos = 4;
    } else {
        need(8);
        for (int i = 2; i <= 7; ++i) n = (n << 6) | (s[i] - 63);
        pos = 8;
    }
    if (n > (1 << 20)) throw ParseError("graph too large", "byte 0");
    std::size_t bits = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1 < 0 ? 0 : n - 1) / 2;
    std::size_t bytes = (bits + 5) / 6;
    if (s.size() - pos != bytes)
        throw ParseError("expected " + std::to_string(bytes) + " adjacency bytes", "byte " + std::to_string(pos));
    std::vector<std::pair<int, int>> edges;
    std::size_t k = 0;
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < j; ++i, ++k) {
            int byte = s[pos + k / 6] - 63;
            if ((byte >> (5 - k % 6)) & 1) edges.emplace_back(i, j);
        }
    for (std::size_t b = k; b < bytes * 6; ++b) {
        int byte = s[pos + b / 6] - 63;
        if ((byte >> (5 - b % 6)) & 1) throw ParseError("nonzero padding bit", "byte " + std::to_string(pos + b / 6));
    }
    return Graph(static_cast<int>(n), edges);
}

}  // namespace detail

inline Graph parse_graph(const std::string& text, GraphFormat format) {
    return format == GraphFormat::EdgeList ? detail::parse_edge_list(text) : detail::parse_graph6(text);
}

inline std::string to_graph6(const Graph& G) {
    std::string out;
    long long n = G.n();
    if (n <= 62) {
        out.push_back(static_cast<char>(63 + n));
    } else if (n <= 258047) {
        out.push_back(126);
        for (int sh = 12; sh >= 0; sh -= 6) out.push_back(static_cast<char>(63 + ((n >> sh) & 63)));
    } else {
        out.push_back(126);
        out.push_back(126);
        for (int sh = 30; sh >= 0; sh -= 6) out.push_back(static_cast<char>(63 + ((n >> sh) & 63)));
    }
    int acc = 0, filled = 0;
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < j; ++i) {
            acc = (acc << 1) | (G.adjacent(i, j) ? 1 : 0);
            if (++filled == 6) {
                out.push_back(static_cast<char>(63 + acc));
                acc = filled = 0;
            }
        }
    if (filled > 0) out.push_back(static_cast<char>(63 + (acc << (6 - filled))));
    return out;
}

// One "u v" line per edge in lexicographic order; isolated vertices get a
// line of their own so the vertex count survives a round trip.
inline std::string to_edge_list(const Graph& G) {
    std::string out;
    for (int u = 0; u < G.n(); ++u) {
        if (G.degree(u) == 0) out += std::to_string(u) + "\n";
        for (int v : G.neighbors(u))
            if (u < v) out += std::to_string(u) + " " + std::to_string(v) + "\n";
    }
    return out;
}

}  // namespace treembed
