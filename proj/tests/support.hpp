#pragma once

// Brute-force oracles and small builders shared by the test binaries. Every
// oracle here works straight from the definitions, without the search code
// of the library.

#include <ramsey/catalog.hpp>
#include <ramsey/classes.hpp>
#include <ramsey/morphism.hpp>
#include <ramsey/structure.hpp>

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace support
{
    using namespace ramsey;

    // Undirected graph as a symmetric binary relation.
    inline auto graph(int n, const std::vector<std::pair<int, int>> & edges) -> Structure
    {
        Structure s(graph_language());
        for (int i = 0; i < n; ++i)
            s.add_vertex("v" + std::to_string(i));
        for (auto [u, v] : edges) {
            s.add_tuple(0, {u, v});
            s.add_tuple(0, {v, u});
        }
        return s;
    }

    // father[v] = parent index or -1.
    inline auto forest(const std::vector<int> & father) -> Structure
    {
        Structure s(forest_language());
        for (int i = 0; i < int(father.size()); ++i)
            s.add_vertex("v" + std::to_string(i));
        for (int i = 0; i < int(father.size()); ++i)
            if (father[i] >= 0)
                s.set_function(0, {i}, {father[i]});
        return s;
    }

    inline auto micro_language() -> Language
    {
        Language l;
        l.add_relation("R", 2);
        l.add_function("F", 1, 1);
        return l;
    }

    inline auto all_subsets(int n) -> std::vector<VertexSet>
    {
        std::vector<VertexSet> out;
        for (std::uint32_t m = 0; m < (1u << n); ++m) {
            VertexSet s;
            for (int v = 0; v < n; ++v)
                if (m >> v & 1)
                    s.push_back(v);
            out.push_back(s);
        }
        return out;
    }

    inline auto subset_of(const VertexSet & a, const VertexSet & b) -> bool
    {
        return std::includes(b.begin(), b.end(), a.begin(), a.end());
    }

    // Closedness straight from the definition.
    inline auto closed_oracle(const Structure & s, const VertexSet & x) -> bool
    {
        for (auto & fun : s.functions)
            for (auto & [d, img] : fun)
                if (subset_of(make_set(d), x) && ! subset_of(make_set(img), x))
                    return false;
        return true;
    }

    // Least closed superset, by scanning every subset.
    inline auto closure_oracle(const Structure & s, const VertexSet & b) -> VertexSet
    {
        VertexSet best = all_vertices(s);
        for (auto & x : all_subsets(s.size()))
            if (subset_of(b, x) && closed_oracle(s, x) && x.size() < best.size())
                best = x;
        return best;
    }

    // All maps of the given kind, by trying every function from a to b.
    inline auto maps_oracle(const Structure & a, const Structure & b, MapKind kind) -> std::vector<VertexMap>
    {
        std::vector<VertexMap> out;
        VertexMap f(a.size(), 0);
        if (b.size() == 0) {
            if (a.size() == 0)
                out.push_back(f);
            return out;
        }
        while (true) {
            auto k = check_map(a, b, f);
            if (at_least(k, kind))
                out.push_back(f);
            int i = a.size() - 1;
            while (i >= 0 && ++f[i] == b.size())
                f[i--] = 0;
            if (i < 0)
                break;
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    // Irreducibility straight from the definition: look for two proper closed
    // subsets covering s whose intersection is closed and such that no
    // relation tuple or function entry meets both private sides.
    inline auto irreducible_oracle(const Structure & s) -> bool
    {
        int n = s.size();
        std::vector<VertexSet> closed;
        for (auto & x : all_subsets(n))
            if (int(x.size()) < n && closed_oracle(s, x))
                closed.push_back(x);
        std::vector<VertexSet> ties;
        for (auto & rel : s.relations)
            for (auto & t : rel)
                ties.push_back(make_set(t));
        for (auto & fun : s.functions)
            for (auto & [d, img] : fun) {
                auto all = d;
                all.insert(all.end(), img.begin(), img.end());
                ties.push_back(make_set(all));
            }
        for (auto & e1 : closed)
            for (auto & e2 : closed) {
                VertexSet uni, inter, only1, only2;
                std::set_union(e1.begin(), e1.end(), e2.begin(), e2.end(), std::back_inserter(uni));
                if (int(uni.size()) != n)
                    continue;
                std::set_intersection(e1.begin(), e1.end(), e2.begin(), e2.end(), std::back_inserter(inter));
                if (! closed_oracle(s, inter))
                    continue;
                std::set_difference(e1.begin(), e1.end(), e2.begin(), e2.end(), std::back_inserter(only1));
                std::set_difference(e2.begin(), e2.end(), e1.begin(), e1.end(), std::back_inserter(only2));
                bool crossing = false;
                for (auto & t : ties) {
                    bool m1 = false, m2 = false;
                    for (auto v : t) {
                        m1 = m1 || std::binary_search(only1.begin(), only1.end(), v);
                        m2 = m2 || std::binary_search(only2.begin(), only2.end(), v);
                    }
                    crossing = crossing || (m1 && m2);
                }
                if (! crossing)
                    return false;
            }
        return true;
    }

    // Random structure over a language, for property tests.
    inline auto random_structure(const Language & lang, int n, std::mt19937 & rng, double density = 0.3) -> Structure
    {
        Structure s(lang);
        for (int i = 0; i < n; ++i)
            s.add_vertex("x" + std::to_string(i));
        if (n == 0)
            return s;
        std::uniform_real_distribution<double> coin(0, 1);
        for (int r = 0; r < int(lang.relations.size()); ++r) {
            int arity = lang.relations[r].arity;
            int tries = 1;
            for (int i = 0; i < arity; ++i)
                tries *= n;
            for (int k = 0; k < tries; ++k)
                if (coin(rng) < density) {
                    Tuple t;
                    int code = k;
                    for (int i = 0; i < arity; ++i) {
                        t.push_back(code % n);
                        code /= n;
                    }
                    s.add_tuple(r, t);
                }
        }
        for (int f = 0; f < int(lang.functions.size()); ++f) {
            auto & sym = lang.functions[f];
            if (sym.range_arity > n)
                continue;
            int tries = 1;
            for (int i = 0; i < sym.domain_arity; ++i)
                tries *= n;
            for (int k = 0; k < tries; ++k)
                if (coin(rng) < density) {
                    Tuple d;
                    int code = k;
                    for (int i = 0; i < sym.domain_arity; ++i) {
                        d.push_back(code % n);
                        code /= n;
                    }
                    std::vector<int> pool(n);
                    for (int i = 0; i < n; ++i)
                        pool[i] = i;
                    std::shuffle(pool.begin(), pool.end(), rng);
                    s.set_function(f, d, Tuple(pool.begin(), pool.begin() + sym.range_arity));
                }
        }
        if (lang.ordered) {
            std::vector<int> seq(n);
            for (int i = 0; i < n; ++i)
                seq[i] = i;
            std::shuffle(seq.begin(), seq.end(), rng);
            s.set_order(seq);
        }
        return s;
    }

    inline auto permutations(int n) -> std::vector<VertexMap>
    {
        VertexMap p(n);
        for (int i = 0; i < n; ++i)
            p[i] = i;
        std::vector<VertexMap> out;
        do
            out.push_back(p);
        while (std::next_permutation(p.begin(), p.end()));
        return out;
    }

    // Arrow relation by trying every colouring of the copies of a in c.
    inline auto arrow_oracle(const Structure & c, const Structure & b, const Structure & a, int k) -> bool
    {
        std::vector<VertexSet> a_copies;
        for (auto & m : maps_oracle(a, c, MapKind::embedding)) {
            auto img = make_set(m);
            if (std::find(a_copies.begin(), a_copies.end(), img) == a_copies.end())
                a_copies.push_back(img);
        }
        auto a_in_b = maps_oracle(a, b, MapKind::embedding);
        std::vector<std::vector<int>> b_copies;
        for (auto & e : maps_oracle(b, c, MapKind::embedding)) {
            std::vector<int> ids;
            for (auto & beta : a_in_b) {
                VertexSet img;
                for (auto v : beta)
                    img.push_back(e[v]);
                img = make_set(img);
                ids.push_back(int(std::find(a_copies.begin(), a_copies.end(), img) - a_copies.begin()));
            }
            b_copies.push_back(ids);
        }
        std::vector<int> colour(a_copies.size(), 0);
        while (true) {
            bool mono = false;
            for (auto & ids : b_copies) {
                bool same = true;
                for (auto i : ids)
                    same = same && colour[i] == colour[ids.empty() ? 0 : ids[0]];
                mono = mono || same;
            }
            if (! mono)
                return false;
            std::size_t i = 0;
            while (i < colour.size() && ++colour[i] == k)
                colour[i++] = 0;
            if (i == colour.size())
                return true;
        }
    }

    inline auto ordered_graph(int n, const std::vector<std::pair<int, int>> & edges) -> Structure
    {
        return with_index_order(graph(n, edges));
    }

    // Bowtie subgraph (not necessarily induced) straight from the picture: a
    // centre with two disjoint adjacent pairs among its neighbours.
    inline auto bowtie_oracle(const Graph & g) -> bool
    {
        int n = g.size();
        for (int c = 0; c < n; ++c)
            for (int a1 = 0; a1 < n; ++a1) {
                if (a1 == c || ! g.adjacent(c, a1))
                    continue;
                for (int a2 = a1 + 1; a2 < n; ++a2) {
                    if (a2 == c || ! g.adjacent(c, a2) || ! g.adjacent(a1, a2))
                        continue;
                    for (int b1 = 0; b1 < n; ++b1) {
                        if (b1 == c || b1 == a1 || b1 == a2 || ! g.adjacent(c, b1))
                            continue;
                        for (int b2 = b1 + 1; b2 < n; ++b2)
                            if (b2 != c && b2 != a1 && b2 != a2 && g.adjacent(c, b2) && g.adjacent(b1, b2))
                                return true;
                    }
                }
            }
        return false;
    }

    // Every vertex lies in a 4-clique or in an induced 2-chimney (two
    // non-adjacent apexes over an edge); with no bowtie that is goodness.
    inline auto good_oracle(const Graph & g) -> bool
    {
        if (bowtie_oracle(g))
            return false;
        int n = g.size();
        std::vector<char> covered(n, 0);
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                if (! g.adjacent(a, b))
                    continue;
                for (int c = 0; c < n; ++c) {
                    if (c == a || c == b || ! g.adjacent(a, c) || ! g.adjacent(b, c))
                        continue;
                    for (int d = c + 1; d < n; ++d)
                        if (d != a && d != b && g.adjacent(a, d) && g.adjacent(b, d))
                            covered[a] = covered[b] = covered[c] = covered[d] = 1;
                }
            }
        return std::all_of(covered.begin(), covered.end(), [](char c) { return c != 0; });
    }
}
