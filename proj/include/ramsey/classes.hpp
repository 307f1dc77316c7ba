#pragma once

#include <ramsey/amalgam.hpp>
#include <ramsey/budget.hpp>
#include <ramsey/canonical.hpp>
#include <ramsey/catalog.hpp>
#include <ramsey/closure.hpp>
#include <ramsey/morphism.hpp>
#include <ramsey/parallel.hpp>
#include <ramsey/structure.hpp>
#include <ramsey/text_format.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ramsey
{
    // Three classes of combinatorial objects turned into free amalgamation
    // classes of structures with partial functions: digraphs of bounded
    // out-degree, partial Steiner systems, and bowtie-free graphs.

    struct Digraph
    {
        std::vector<std::string> names;
        std::set<std::pair<Vertex, Vertex>> arcs;

        auto size() const -> int { return int(names.size()); }

        auto out_neighbours(Vertex v) const -> VertexSet
        {
            VertexSet out;
            for (auto it = arcs.lower_bound({v, -1}); it != arcs.end() && it->first == v; ++it)
                out.push_back(it->second);
            return out;
        }

        auto operator==(const Digraph &) const -> bool = default;
    };

    struct Hypergraph
    {
        std::vector<std::string> names;
        std::set<VertexSet> edges;

        auto size() const -> int { return int(names.size()); }

        auto operator==(const Hypergraph &) const -> bool = default;
    };

    // Simple undirected graph; edges stored as (u, v) with u < v.
    struct Graph
    {
        std::vector<std::string> names;
        std::set<std::pair<Vertex, Vertex>> edges;

        auto size() const -> int { return int(names.size()); }

        auto add_vertex(const std::string & name) -> Vertex
        {
            names.push_back(name);
            return size() - 1;
        }

        auto add_edge(Vertex u, Vertex v) -> void
        {
            if (u == v)
                throw std::invalid_argument("graph: loop at " + names.at(u));
            edges.insert({std::min(u, v), std::max(u, v)});
        }

        auto adjacent(Vertex u, Vertex v) const -> bool { return edges.count({std::min(u, v), std::max(u, v)}) != 0; }

        auto operator==(const Graph &) const -> bool = default;
    };

    namespace detail
    {
        inline auto vertex_names_of(const std::vector<TextLine> & lines, const char * kind)
            -> std::pair<std::vector<std::string>, std::map<std::string, Vertex>>
        {
            std::vector<std::string> names;
            std::map<std::string, Vertex> index;
            for (auto & l : lines)
                if (l.tokens[0] == "vertex") {
                    if (l.tokens.size() < 2)
                        throw ParseError(l.number, "vertex needs a name");
                    for (std::size_t k = 1; k < l.tokens.size(); ++k) {
                        if (! index.emplace(l.tokens[k], int(names.size())).second)
                            throw ParseError(l.number, std::string(kind) + ": duplicate vertex " + l.tokens[k]);
                        names.push_back(l.tokens[k]);
                    }
                }
            return {names, index};
        }

        inline auto find_vertex(const std::map<std::string, Vertex> & index, const TextLine & l, const std::string & name)
            -> Vertex
        {
            auto it = index.find(name);
            if (it == index.end())
                throw ParseError(l.number, "unknown vertex '" + name + "'");
            return it->second;
        }
    }

    // Text formats: "vertex a b ..." lines, then "arc u v", "edge u v" or
    // "hedge v1 ... vr" lines.
    inline auto parse_digraph(const std::vector<TextLine> & lines) -> Digraph
    {
        auto [names, index] = detail::vertex_names_of(lines, "digraph");
        Digraph g{names, {}};
        for (auto & l : lines) {
            if (l.tokens[0] == "vertex")
                continue;
            if (l.tokens[0] != "arc" || l.tokens.size() != 3)
                throw ParseError(l.number, "expected 'arc u v'");
            auto u = detail::find_vertex(index, l, l.tokens[1]);
            auto v = detail::find_vertex(index, l, l.tokens[2]);
            if (u == v)
                throw ParseError(l.number, "loop at " + l.tokens[1]);
            g.arcs.insert({u, v});
        }
        return g;
    }

    inline auto parse_graph(const std::vector<TextLine> & lines) -> Graph
    {
        auto [names, index] = detail::vertex_names_of(lines, "graph");
        Graph g{names, {}};
        for (auto & l : lines) {
            if (l.tokens[0] == "vertex")
                continue;
            if (l.tokens[0] != "edge" || l.tokens.size() != 3)
                throw ParseError(l.number, "expected 'edge u v'");
            auto u = detail::find_vertex(index, l, l.tokens[1]);
            auto v = detail::find_vertex(index, l, l.tokens[2]);
            if (u == v)
                throw ParseError(l.number, "loop at " + l.tokens[1]);
            g.add_edge(u, v);
        }
        return g;
    }

    inline auto parse_hypergraph(const std::vector<TextLine> & lines) -> Hypergraph
    {
        auto [names, index] = detail::vertex_names_of(lines, "hypergraph");
        Hypergraph h{names, {}};
        for (auto & l : lines) {
            if (l.tokens[0] == "vertex")
                continue;
            if (l.tokens[0] != "hedge" || l.tokens.size() < 2)
                throw ParseError(l.number, "expected 'hedge v1 ... vr'");
            VertexSet e;
            for (std::size_t k = 1; k < l.tokens.size(); ++k)
                e.push_back(detail::find_vertex(index, l, l.tokens[k]));
            auto sorted = make_set(e);
            if (sorted.size() != e.size())
                throw ParseError(l.number, "hyperedge repeats a vertex");
            h.edges.insert(sorted);
        }
        return h;
    }

    namespace detail
    {
        inline auto vertex_line(const std::vector<std::string> & names) -> std::string
        {
            std::string out = "vertex";
            for (auto & n : names)
                out += " " + n;
            return out + "\n";
        }
    }

    inline auto format_digraph(const Digraph & g) -> std::string
    {
        std::string out = detail::vertex_line(g.names);
        for (auto & [u, v] : g.arcs)
            out += "arc " + g.names[u] + " " + g.names[v] + "\n";
        return out;
    }

    inline auto format_graph(const Graph & g) -> std::string
    {
        std::string out = detail::vertex_line(g.names);
        for (auto & [u, v] : g.edges)
            out += "edge " + g.names[u] + " " + g.names[v] + "\n";
        return out;
    }

    inline auto format_hypergraph(const Hypergraph & h) -> std::string
    {
        std::string out = detail::vertex_line(h.names);
        for (auto & e : h.edges) {
            out += "hedge";
            for (auto v : e)
                out += " " + h.names[v];
            out += "\n";
        }
        return out;
    }

    // ---- k-orientations ----

    inline auto orientation_language(int k) -> Language
    {
        Language l;
        for (int i = 1; i <= k; ++i)
            l.add_function("F" + std::to_string(i), 1, i);
        return l;
    }

    // F_i is defined exactly on the vertices of out-degree i and sends them
    // to their out-neighbourhood.
    inline auto encode_k_orientation(const Digraph & g, int k) -> Structure
    {
        if (k < 1)
            throw std::invalid_argument("k-orientation: k must be positive");
        Structure s(orientation_language(k));
        for (auto & n : g.names)
            s.add_vertex(n);
        for (Vertex v = 0; v < g.size(); ++v) {
            auto out = g.out_neighbours(v);
            if (int(out.size()) > k)
                throw std::invalid_argument("k-orientation: " + g.names[v] + " has out-degree " +
                    std::to_string(out.size()) + " > " + std::to_string(k));
            if (std::binary_search(out.begin(), out.end(), v))
                throw std::invalid_argument("k-orientation: loop at " + g.names[v]);
            if (! out.empty())
                s.set_function(int(out.size()) - 1, {v}, out);
        }
        return s;
    }

    // Membership in the encoded class: at most one function per vertex and no
    // vertex in its own image.
    inline auto is_orientation_structure(const Structure & s) -> bool
    {
        std::vector<int> defined(s.size(), 0);
        for (int f = 0; f < int(s.functions.size()); ++f) {
            if (s.language.functions[f].domain_arity != 1 || s.language.functions[f].range_arity != f + 1)
                return false;
            for (auto & [d, img] : s.functions[f]) {
                if (++defined[d[0]] > 1 || std::binary_search(img.begin(), img.end(), d[0]))
                    return false;
            }
        }
        return s.language.relations.empty() && ! s.ordered();
    }

    inline auto decode_k_orientation(const Structure & s) -> Digraph
    {
        if (! is_orientation_structure(s))
            throw std::invalid_argument("k-orientation: structure is not an encoded orientation");
        Digraph g{s.names, {}};
        for (auto & fn : s.functions)
            for (auto & [d, img] : fn)
                for (auto u : img)
                    g.arcs.insert({d[0], u});
        return g;
    }

    inline auto induced_subdigraph(const Digraph & g, const VertexSet & keep) -> Digraph
    {
        Digraph out;
        std::vector<Vertex> where(g.size(), -1);
        for (auto v : keep) {
            where[v] = out.size();
            out.names.push_back(g.names[v]);
        }
        for (auto & [u, v] : g.arcs)
            if (where[u] >= 0 && where[v] >= 0)
                out.arcs.insert({where[u], where[v]});
        return out;
    }

    inline auto is_successor_closed(const Digraph & g, const VertexSet & part) -> bool
    {
        for (auto & [u, v] : g.arcs)
            if (std::binary_search(part.begin(), part.end(), u) && ! std::binary_search(part.begin(), part.end(), v))
                return false;
        return true;
    }

    // One digraph per isomorphism type with out-degrees <= k, up to n vertices.
    inline auto k_orientations_up_to(int k, int n, BudgetMeter * meter = nullptr) -> std::vector<Digraph>
    {
        std::map<std::pair<int, std::string>, Digraph> seen;
        for (int m = 0; m <= n; ++m) {
            std::vector<std::pair<Vertex, Vertex>> pairs;
            for (int u = 0; u < m; ++u)
                for (int v = 0; v < m; ++v)
                    if (u != v)
                        pairs.push_back({u, v});
            if (pairs.size() > 30)
                throw BudgetExceeded("k-orientation catalogue: too many vertices");
            if (meter)
                meter->count_subsets(std::uint64_t(1) << pairs.size(), "k-orientation catalogue");
            for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << pairs.size()); ++mask) {
                Digraph g;
                for (int v = 0; v < m; ++v)
                    g.names.push_back("v" + std::to_string(v));
                std::vector<int> degree(m, 0);
                bool ok = true;
                for (std::size_t i = 0; i < pairs.size() && ok; ++i)
                    if (mask >> i & 1) {
                        g.arcs.insert(pairs[i]);
                        ok = ++degree[pairs[i].first] <= k;
                    }
                if (! ok)
                    continue;
                auto s = encode_k_orientation(g, k);
                seen.emplace(std::make_pair(m, canonical_key(s)), std::move(g));
            }
        }
        std::vector<Digraph> out;
        for (auto & [key, g] : seen)
            out.push_back(g);
        return out;
    }

    // ---- partial Steiner systems ----

    inline auto steiner_language(int r, int t) -> Language
    {
        if (t < 1 || r < t)
            throw std::invalid_argument("steiner: need r >= t >= 1");
        Language l;
        l.add_function("F", t, r);
        return l;
    }

    inline auto is_partial_steiner(const Hypergraph & h, int r, int t) -> bool
    {
        std::set<VertexSet> covered;
        for (auto & e : h.edges) {
            if (int(e.size()) != r)
                return false;
            std::vector<char> pick(e.size(), 0);
            std::fill(pick.begin(), pick.begin() + t, 1);
            do {
                VertexSet sub;
                for (std::size_t i = 0; i < e.size(); ++i)
                    if (pick[i])
                        sub.push_back(e[i]);
                if (! covered.insert(sub).second)
                    return false;
            } while (std::prev_permutation(pick.begin(), pick.end()));
        }
        return true;
    }

    // F is defined on every repetition-free t-tuple inside a hyperedge and
    // returns that hyperedge.
    inline auto encode_steiner(const Hypergraph & h, int r, int t) -> Structure
    {
        if (! is_partial_steiner(h, r, t))
            throw std::invalid_argument("steiner: not a partial (" + std::to_string(r) + "," + std::to_string(t) +
                ")-system");
        Structure s(steiner_language(r, t));
        for (auto & n : h.names)
            s.add_vertex(n);
        for (auto & e : h.edges)
            for (auto & tuple : all_tuples(r, t)) {
                Tuple x;
                for (auto i : tuple)
                    x.push_back(e[i]);
                if (make_set(x).size() == x.size())
                    s.set_function(0, x, e);
            }
        return s;
    }

    // The two axioms of the encoded class: domain tuples are repetition-free,
    // and every repetition-free t-tuple of an image lies in the domain with
    // the same image, the image containing the tuple.
    inline auto steiner_axioms_hold(const Structure & s) -> bool
    {
        if (s.language.functions.size() != 1 || ! s.language.relations.empty() || s.ordered())
            return false;
        auto & sym = s.language.functions[0];
        int t = sym.domain_arity, r = sym.range_arity;
        for (auto & [x, img] : s.functions[0]) {
            if (make_set(x).size() != x.size())
                return false;
            for (auto v : x)
                if (! std::binary_search(img.begin(), img.end(), v))
                    return false;
            for (auto & tuple : all_tuples(r, t)) {
                Tuple y;
                for (auto i : tuple)
                    y.push_back(img[i]);
                if (make_set(y).size() != y.size())
                    continue;
                auto other = s.image(0, y);
                if (! other || *other != img)
                    return false;
            }
        }
        return true;
    }

    inline auto decode_steiner(const Structure & s) -> Hypergraph
    {
        if (! steiner_axioms_hold(s))
            throw std::invalid_argument("steiner: structure violates the axioms");
        Hypergraph h{s.names, {}};
        for (auto & [x, img] : s.functions[0])
            h.edges.insert(img);
        return h;
    }

    inline auto induced_subhypergraph(const Hypergraph & h, const VertexSet & keep) -> Hypergraph
    {
        Hypergraph out;
        std::vector<Vertex> where(h.size(), -1);
        for (auto v : keep) {
            where[v] = out.size();
            out.names.push_back(h.names[v]);
        }
        for (auto & e : h.edges)
            if (std::all_of(e.begin(), e.end(), [&](Vertex v) { return where[v] >= 0; })) {
                VertexSet m;
                for (auto v : e)
                    m.push_back(where[v]);
                out.edges.insert(m);
            }
        return out;
    }

    // Induced on `part`, and every other hyperedge meets `part` in < t vertices.
    inline auto is_strongly_induced(const Hypergraph & h, const VertexSet & part, int t) -> bool
    {
        for (auto & e : h.edges) {
            int inside = 0;
            for (auto v : e)
                inside += std::binary_search(part.begin(), part.end(), v);
            if (inside != int(e.size()) && inside >= t)
                return false;
        }
        return true;
    }

    inline auto steiner_systems_up_to(int r, int t, int n, BudgetMeter * meter = nullptr) -> std::vector<Hypergraph>
    {
        std::map<std::pair<int, std::string>, Hypergraph> seen;
        for (int m = 0; m <= n; ++m) {
            std::vector<VertexSet> blocks;
            for (auto & tuple : all_tuples(m, r))
                if (std::is_sorted(tuple.begin(), tuple.end()) && make_set(tuple).size() == tuple.size())
                    blocks.push_back(tuple);
            auto compatible = [&](const VertexSet & a, const VertexSet & b) {
                VertexSet common;
                std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
                return int(common.size()) < t;
            };
            std::vector<VertexSet> chosen;
            auto grow = [&](auto & self, std::size_t from) -> void {
                if (meter)
                    meter->count_subsets(1, "steiner catalogue");
                Hypergraph h;
                for (int v = 0; v < m; ++v)
                    h.names.push_back("v" + std::to_string(v));
                h.edges.insert(chosen.begin(), chosen.end());
                seen.emplace(std::make_pair(m, canonical_key(encode_steiner(h, r, t))), h);
                for (std::size_t i = from; i < blocks.size(); ++i)
                    if (std::all_of(chosen.begin(), chosen.end(), [&](const VertexSet & c) { return compatible(c, blocks[i]); })) {
                        chosen.push_back(blocks[i]);
                        self(self, i + 1);
                        chosen.pop_back();
                    }
            };
            grow(grow, 0);
        }
        std::vector<Hypergraph> out;
        for (auto & [key, h] : seen)
            out.push_back(h);
        return out;
    }

    // ---- bowtie-free graphs ----

    inline auto graph_structure(const Graph & g) -> Structure
    {
        Structure s(graph_language());
        for (auto & n : g.names)
            s.add_vertex(n);
        for (auto & [u, v] : g.edges) {
            s.add_tuple(0, {u, v});
            s.add_tuple(0, {v, u});
        }
        return s;
    }

    // The graph carried by relation 0 (must be symmetric and irreflexive).
    inline auto graph_of(const Structure & s) -> Graph
    {
        if (s.language.relations.empty() || s.language.relations[0].arity != 2)
            throw std::invalid_argument("graph: needs a binary first relation");
        Graph g{s.names, {}};
        for (auto & t : s.relations[0]) {
            if (t[0] == t[1] || ! s.has_tuple(0, {t[1], t[0]}))
                throw std::invalid_argument("graph: relation is not symmetric and irreflexive");
            g.add_edge(t[0], t[1]);
        }
        return g;
    }

    inline auto bowtie() -> Graph
    {
        Graph g{{"c", "a1", "a2", "b1", "b2"}, {}};
        for (auto [u, v] : std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}, {0, 3}, {0, 4}, {3, 4}})
            g.add_edge(u, v);
        return g;
    }

    // n triangles sharing the base edge b1 b2.
    inline auto chimney(int n) -> Graph
    {
        if (n < 2)
            throw std::invalid_argument("chimney needs at least two triangles");
        Graph g{{"b1", "b2"}, {}};
        g.add_edge(0, 1);
        for (int i = 1; i <= n; ++i) {
            auto t = g.add_vertex("t" + std::to_string(i));
            g.add_edge(0, t);
            g.add_edge(1, t);
        }
        return g;
    }

    inline auto complete_graph(int n) -> Graph
    {
        Graph g;
        for (int v = 0; v < n; ++v)
            g.add_vertex("k" + std::to_string(v + 1));
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                g.add_edge(u, v);
        return g;
    }

    // A monomorphism from the bowtie, if any.
    inline auto detect_bowtie(const Graph & g) -> std::optional<VertexMap>
    {
        return find_map(graph_structure(bowtie()), graph_structure(g), MapKind::monomorphism);
    }

    inline auto triangles(const Graph & g) -> std::vector<VertexSet>
    {
        std::vector<VertexSet> out;
        for (auto & [u, v] : g.edges)
            for (Vertex w = v + 1; w < g.size(); ++w)
                if (g.adjacent(u, w) && g.adjacent(v, w))
                    out.push_back({u, v, w});
        return out;
    }

    namespace detail
    {
        inline auto apexes(const Graph & g, Vertex u, Vertex v) -> VertexSet
        {
            VertexSet out;
            for (Vertex w = 0; w < g.size(); ++w)
                if (w != u && w != v && g.adjacent(u, w) && g.adjacent(v, w))
                    out.push_back(w);
            return out;
        }

        // Base of an induced chimney: two triangles on the edge whose apexes
        // are not adjacent.
        inline auto is_chimney_base(const Graph & g, Vertex u, Vertex v) -> bool
        {
            if (! g.adjacent(u, v))
                return false;
            auto a = apexes(g, u, v);
            for (std::size_t i = 0; i < a.size(); ++i)
                for (std::size_t j = i + 1; j < a.size(); ++j)
                    if (! g.adjacent(a[i], a[j]))
                        return true;
            return false;
        }

        inline auto clique_of_four(const Graph & g, Vertex v) -> std::optional<VertexSet>
        {
            for (auto & t : triangles(g)) {
                if (std::binary_search(t.begin(), t.end(), v))
                    continue;
                if (g.adjacent(v, t[0]) && g.adjacent(v, t[1]) && g.adjacent(v, t[2]))
                    return t;
            }
            return std::nullopt;
        }
    }

    // Bowtie-free, and every vertex lies in an induced chimney or a K4.
    inline auto is_good(const Graph & g) -> bool
    {
        if (detect_bowtie(g))
            return false;
        std::vector<char> covered(g.size(), 0);
        for (auto & [u, v] : g.edges)
            if (detail::is_chimney_base(g, u, v)) {
                covered[u] = covered[v] = 1;
                for (auto w : detail::apexes(g, u, v))
                    covered[w] = 1;
            }
        for (Vertex v = 0; v < g.size(); ++v)
            if (! covered[v] && ! detail::clique_of_four(g, v))
                return false;
        return true;
    }

    namespace detail
    {
        inline auto fresh_vertex(Graph & g, int & counter) -> Vertex
        {
            std::set<std::string> used(g.names.begin(), g.names.end());
            std::string name;
            do
                name = "g" + std::to_string(++counter);
            while (used.count(name));
            return g.add_vertex(name);
        }

        inline auto add_apex(Graph & g, Vertex u, Vertex v, int & counter) -> void
        {
            auto w = fresh_vertex(g, counter);
            g.add_edge(u, w);
            g.add_edge(v, w);
        }
    }

    // Extends a bowtie-free graph to a good one, keeping it induced. Preferred
    // bases first get a second apex; then every vertex outside triangles
    // becomes a base vertex of a new 2-chimney; then every triangle with no
    // edge in another triangle gets a second apex on its preferred edge (or
    // its first edge), repeated until nothing changes.
    inline auto good_completion(Graph g, const std::set<std::pair<Vertex, Vertex>> & bases = {}) -> Graph
    {
        if (detect_bowtie(g))
            throw std::invalid_argument("goodify: the graph contains a bowtie");
        int counter = 0;
        for (auto [u, v] : bases) {
            if (! g.adjacent(u, v))
                throw std::invalid_argument("goodify: preferred base is not an edge");
            while (detail::apexes(g, u, v).size() < 2)
                detail::add_apex(g, u, v, counter);
        }
        int original = g.size();
        for (Vertex v = 0; v < original; ++v) {
            bool in_triangle = false;
            for (Vertex u = 0; u < g.size() && ! in_triangle; ++u)
                in_triangle = g.adjacent(u, v) && ! detail::apexes(g, u, v).empty();
            if (in_triangle)
                continue;
            auto partner = detail::fresh_vertex(g, counter);
            g.add_edge(v, partner);
            detail::add_apex(g, v, partner, counter);
            detail::add_apex(g, v, partner, counter);
        }
        for (bool changed = true; changed;) {
            changed = false;
            for (auto & t : triangles(g)) {
                std::vector<std::pair<Vertex, Vertex>> sides = {{t[0], t[1]}, {t[0], t[2]}, {t[1], t[2]}};
                bool lone = std::all_of(sides.begin(), sides.end(),
                    [&](const std::pair<Vertex, Vertex> & e) { return detail::apexes(g, e.first, e.second).size() == 1; });
                if (! lone)
                    continue;
                auto side = sides[0];
                for (auto & e : sides)
                    if (bases.count(e)) {
                        side = e;
                        break;
                    }
                detail::add_apex(g, side.first, side.second, counter);
                changed = true;
                break;
            }
        }
        if (! is_good(g))
            throw std::logic_error("goodify: result is not good");
        return g;
    }

    inline auto goodify(const Graph & g) -> Graph { return good_completion(g); }

    inline auto bowtie_language() -> Language
    {
        Language l;
        l.add_relation("R", 2);
        l.add_function("F1", 1, 1);
        l.add_function("F2", 1, 2);
        l.add_function("F3", 1, 3);
        return l;
    }

    // R is the edge relation; F1 sends a chimney base vertex to its partner,
    // F2 a chimney apex to its base, F3 a K4 vertex to the other three. With
    // drop_base_partner F1 stays empty (a deliberately broken variant).
    inline auto encode_bowtie_plus(const Graph & g, bool drop_base_partner = false) -> Structure
    {
        if (! is_good(g))
            throw std::invalid_argument("bowtie encoding: the graph is not good and bowtie-free");
        Structure s(bowtie_language());
        for (auto & n : g.names)
            s.add_vertex(n);
        for (auto & [u, v] : g.edges) {
            s.add_tuple(0, {u, v});
            s.add_tuple(0, {v, u});
        }
        std::vector<int> in_triangles(g.size(), 0);
        for (auto & t : triangles(g))
            for (auto v : t)
                ++in_triangles[v];
        for (auto & [u, v] : g.edges)
            if (detail::is_chimney_base(g, u, v)) {
                if (! drop_base_partner) {
                    s.set_function(0, {u}, {v});
                    s.set_function(0, {v}, {u});
                }
                for (auto w : detail::apexes(g, u, v))
                    if (in_triangles[w] == 1)
                        s.set_function(1, {w}, {u, v});
            }
        for (Vertex v = 0; v < g.size(); ++v)
            if (auto k = detail::clique_of_four(g, v))
                s.set_function(2, {v}, *k);
        return s;
    }

    inline auto decode_bowtie_plus(const Structure & s) -> Graph { return graph_of(s); }

    // Whether s is a closed substructure of some encoded good bowtie-free
    // graph: complete the carried graph (second apexes on the bases named by
    // F1 and F2, then goodify) and compare the encoding on the original
    // vertices.
    inline auto is_bowtie_class_member(const Structure & s, bool drop_base_partner = false) -> bool
    {
        if (! (s.language == bowtie_language()))
            return false;
        Graph g;
        try {
            g = graph_of(s);
        }
        catch (const std::invalid_argument &) {
            return false;
        }
        if (detect_bowtie(g))
            return false;
        std::set<std::pair<Vertex, Vertex>> bases;
        for (int f = 0; f < 2; ++f)
            for (auto & [d, img] : s.functions[f]) {
                Vertex u = f == 0 ? d[0] : img[0];
                Vertex v = f == 0 ? img[0] : img[1];
                if (u == v || ! g.adjacent(u, v))
                    return false;
                bases.insert({std::min(u, v), std::max(u, v)});
            }
        Graph full;
        try {
            full = good_completion(g, bases);
        }
        catch (const std::exception &) {
            return false;
        }
        auto h = encode_bowtie_plus(full, drop_base_partner);
        auto keep = all_vertices(s);
        return is_closed(h, keep) && restrict_to(h, keep) == s;
    }

    inline auto bowtie_free_graphs_up_to(int n, BudgetMeter * meter = nullptr) -> std::vector<Graph>
    {
        std::vector<Graph> out;
        for (auto & s : graphs_up_to(n, meter)) {
            auto g = graph_of(s);
            if (! detect_bowtie(g))
                out.push_back(std::move(g));
        }
        return out;
    }

    // Closed vertex sets with at most max_size vertices, grown one vertex
    // closure at a time. Sorted by size, then lexicographically.
    inline auto closed_sets_up_to(const Structure & s, int max_size, BudgetMeter * meter = nullptr) -> std::vector<VertexSet>
    {
        ClosureOperator cl(s);
        std::set<VertexSet> found{cl(VertexSet{})};
        std::vector<VertexSet> frontier(found.begin(), found.end());
        while (! frontier.empty()) {
            std::vector<VertexSet> next;
            for (auto & set : frontier)
                for (Vertex v = 0; v < s.size(); ++v) {
                    if (std::binary_search(set.begin(), set.end(), v))
                        continue;
                    if (meter)
                        meter->count_subsets(1, "closed sets");
                    auto grown = set;
                    grown.insert(std::upper_bound(grown.begin(), grown.end(), v), v);
                    auto u = cl(grown);
                    if (int(u.size()) <= max_size && found.insert(u).second)
                        next.push_back(u);
                }
            frontier = std::move(next);
        }
        std::vector<VertexSet> out;
        for (auto & set : found)
            if (int(set.size()) <= max_size)
                out.push_back(set);
        std::sort(out.begin(), out.end(), [](const VertexSet & a, const VertexSet & b) {
            return a.size() != b.size() ? a.size() < b.size() : a < b;
        });
        return out;
    }

    // Isomorphism types of closed substructures (<= max_size vertices) of the
    // encodings of goodified bowtie-free graphs with <= n vertices.
    inline auto bowtie_class_members(int n, int max_size, bool drop_base_partner = false, BudgetMeter * meter = nullptr)
        -> std::vector<Structure>
    {
        std::map<std::pair<int, std::string>, Structure> seen;
        for (auto & g : bowtie_free_graphs_up_to(n, meter)) {
            auto h = encode_bowtie_plus(goodify(g), drop_base_partner);
            for (auto & set : closed_sets_up_to(h, max_size, meter)) {
                auto sub = restrict_to(h, set);
                seen.emplace(std::make_pair(sub.size(), canonical_key(sub)), sub);
            }
        }
        std::vector<Structure> out;
        for (auto & [key, s] : seen)
            out.push_back(s);
        return out;
    }

    struct AmalgamationReport
    {
        std::size_t members = 0;
        std::size_t amalgams = 0;
        std::vector<std::string> violations;
        bool stopped_early = false;

        auto ok() const -> bool { return violations.empty(); }
    };

    // Every free amalgam of two members over a common closed substructure
    // (all closed subsets of the first, all embeddings into the second) is
    // tested for membership. Stops after max_violations violations. Work is
    // split by first member; the report is the same for any thread count.
    inline auto amalgamation_closure_check(const std::vector<Structure> & members,
        const std::function<bool(const Structure &)> & is_member, BudgetMeter * meter = nullptr,
        std::size_t max_violations = 20, int threads = 1) -> AmalgamationReport
    {
        struct Slot
        {
            std::size_t amalgams = 0;
            std::vector<std::pair<std::size_t, std::string>> violations;   // amalgam count when found
        };
        std::vector<Slot> slots(members.size());
        std::vector<std::atomic<bool>> done(members.size());
        // Slots after a finished prefix that already holds enough violations
        // would be discarded by the merge, so they are skipped.
        auto prefix_full = [&](std::size_t i) {
            std::size_t found = 0;
            for (std::size_t k = 0; k < i; ++k) {
                if (! done[k])
                    return false;
                found += slots[k].violations.size();
            }
            return found >= max_violations;
        };
        parallel_for(members.size(), threads, [&](std::size_t i) {
            auto & slot = slots[i];
            if (prefix_full(i)) {
                done[i] = true;
                return;
            }
            auto & b1 = members[i];
            auto closed = closed_sets_up_to(b1, b1.size(), meter);
            for (std::size_t j = i; j < members.size(); ++j) {
                auto & b2 = members[j];
                for (auto & set : closed) {
                    auto a = restrict_to(b1, set);
                    for (auto & e : enumerate_embeddings(a, b2)) {
                        if (meter)
                            meter->count_subsets(1, "amalgamation sweep");
                        ++slot.amalgams;
                        auto c = free_amalgam(a, b1, b2, set, e).result;
                        if (is_member(c))
                            continue;
                        slot.violations.push_back({slot.amalgams, "amalgam of member " + std::to_string(i) + " and " +
                            std::to_string(j) + " over " + vertex_names(b1, set) + ":\n" + format_structure(c)});
                        if (slot.violations.size() >= max_violations) {
                            done[i] = true;
                            return;
                        }
                    }
                }
            }
            done[i] = true;
        });

        AmalgamationReport out;
        out.members = members.size();
        for (auto & slot : slots) {
            for (auto & [at, text] : slot.violations) {
                out.violations.push_back(text);
                if (out.violations.size() >= max_violations) {
                    out.amalgams += at;
                    out.stopped_early = true;
                    return out;
                }
            }
            out.amalgams += slot.amalgams;
        }
        return out;
    }
}
