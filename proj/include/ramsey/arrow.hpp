#pragma once

#include <ramsey/budget.hpp>
#include <ramsey/morphism.hpp>
#include <ramsey/structure.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ramsey
{
    // Optional part maps (vertex -> part id) restricting copies to
    // part-preserving embeddings, for arrows between partite systems.
    struct PartMaps
    {
        const std::vector<int> * c = nullptr;
        const std::vector<int> * b = nullptr;
        const std::vector<int> * a = nullptr;
    };

    struct ArrowResult
    {
        bool arrows = false;               // every colouring has a monochromatic copy of B
        std::vector<VertexSet> a_copies;   // copies of A in C, lexicographic
        std::vector<int> coloring;         // witness colouring of a_copies when !arrows
        std::uint64_t nodes = 0;           // search nodes visited
    };

    namespace detail
    {
        inline auto part_allow(const std::vector<int> * from, const std::vector<int> * to)
            -> std::function<bool(Vertex, Vertex)>
        {
            if (! from || ! to)
                return {};
            return [from, to](Vertex v, Vertex w) { return (*from)[v] == (*to)[w]; };
        }

        // Vertex list supporting O(1) insert and erase, used for the set of
        // vertices covered by copies of one colour.
        struct CoverList
        {
            std::vector<int> count;
            std::vector<int> where;
            std::vector<Vertex> items;

            explicit CoverList(int n = 0) :
                count(n, 0),
                where(n, -1)
            {
            }

            auto add(Vertex v) -> void
            {
                if (count[v]++ == 0) {
                    where[v] = int(items.size());
                    items.push_back(v);
                }
            }

            auto remove(Vertex v) -> void
            {
                if (--count[v] == 0) {
                    Vertex last = items.back();
                    items[where[v]] = last;
                    where[last] = where[v];
                    items.pop_back();
                    where[v] = -1;
                }
            }
        };
    }

    // Decides C -> (B)^A_k by a complete backtracking search over colourings
    // of the copies of A in C. Copies are coloured in lexicographic order and
    // colour classes are treated as interchangeable (copy i only takes colours
    // up to one more than the largest used so far). After each assignment the
    // copies of B through the newly coloured copy are searched for one whose
    // copies of A all carry that colour; a hit prunes the branch. The search
    // visits every colouring up to this symmetry unless pruned, so a negative
    // answer comes with a witness colouring and a positive one is exhaustive.
    inline auto verify_arrow(const Structure & c, const Structure & b, const Structure & a, int k,
        BudgetMeter * meter = nullptr, PartMaps parts = {}) -> ArrowResult
    {
        if (k < 1)
            throw std::invalid_argument("verify_arrow: need at least one colour");
        if (! same_signature(a.language, b.language) || ! same_signature(b.language, c.language))
            throw std::invalid_argument("verify_arrow: languages differ");
        ArrowResult out;

        // Copies of A in C, with one embedding onto each.
        std::vector<VertexMap> alpha;
        {
            SearchOptions o;
            o.allow = detail::part_allow(parts.a, parts.c);
            o.meter = meter;
            std::map<VertexSet, VertexMap> first;
            Matcher(a, c).run(o, [&](const VertexMap & m) {
                first.emplace(image_set(m), m);
                return true;
            });
            for (auto & [img, m] : first) {
                out.a_copies.push_back(img);
                alpha.push_back(m);
            }
        }
        std::map<VertexSet, int> copy_index;
        for (int i = 0; i < int(out.a_copies.size()); ++i)
            copy_index.emplace(out.a_copies[i], i);

        SearchOptions ab;
        ab.allow = detail::part_allow(parts.a, parts.b);
        auto beta = Matcher(a, b).all(ab);
        std::set<VertexSet> a_in_b_set;
        for (auto & m : beta)
            a_in_b_set.insert(image_set(m));
        std::vector<VertexSet> a_in_b(a_in_b_set.begin(), a_in_b_set.end());
        std::vector<char> in_a_copy(b.size(), 0);
        for (auto & s : a_in_b)
            for (auto v : s)
                in_a_copy[v] = 1;

        Matcher b_into_c(b, c);
        auto part_ok = detail::part_allow(parts.b, parts.c);

        if (a_in_b.empty()) {
            // Every copy of B is vacuously monochromatic.
            SearchOptions o;
            o.allow = part_ok;
            out.arrows = b_into_c.first(o).has_value();
            if (! out.arrows)
                out.coloring.assign(out.a_copies.size(), 0);
            return out;
        }

        int m = int(out.a_copies.size());
        std::vector<int> color(m, -1);
        std::vector<detail::CoverList> covered(k, detail::CoverList(c.size()));

        // Whether some copy of B through copy x has all its copies of A coloured col.
        auto monochromatic_through = [&](int x, int col) {
            bool found = false;
            SearchOptions o;
            o.pinned.assign(b.size(), -1);
            o.domains.assign(b.size(), nullptr);
            for (int v = 0; v < b.size(); ++v)
                if (in_a_copy[v])
                    o.domains[v] = &covered[col].items;
            o.allow = [&](Vertex v, Vertex w) {
                if (in_a_copy[v] && covered[col].count[w] == 0)
                    return false;
                return ! part_ok || part_ok(v, w);
            };
            for (auto & bm : beta) {
                std::fill(o.pinned.begin(), o.pinned.end(), -1);
                for (int i = 0; i < a.size(); ++i)
                    o.pinned[bm[i]] = alpha[x][i];
                b_into_c.run(o, [&](const VertexMap & e) {
                    for (auto & s : a_in_b) {
                        VertexSet img;
                        for (auto v : s)
                            img.push_back(e[v]);
                        std::sort(img.begin(), img.end());
                        auto it = copy_index.find(img);
                        if (it == copy_index.end() || color[it->second] != col)
                            return true;
                    }
                    found = true;
                    return false;
                });
                if (found)
                    return true;
            }
            return false;
        };

        auto assign = [&](int x, int col) {
            color[x] = col;
            for (auto v : out.a_copies[x])
                covered[col].add(v);
        };
        auto unassign = [&](int x) {
            for (auto v : out.a_copies[x])
                covered[color[x]].remove(v);
            color[x] = -1;
        };

        // Iterative search; max_used[x] = largest colour used among copies < x.
        std::vector<int> max_used(m + 1, -1);
        int x = 0;
        int next_color = 0;
        while (true) {
            if (x == m) {
                out.arrows = false;
                out.coloring = color;
                return out;
            }
            if (x < 0) {
                out.arrows = true;
                return out;
            }
            int limit = std::min(k - 1, max_used[x] + 1);
            bool placed = false;
            for (int col = next_color; col <= limit; ++col) {
                ++out.nodes;
                if (meter)
                    meter->count_coloring("arrow search");
                assign(x, col);
                if (! monochromatic_through(x, col)) {
                    max_used[x + 1] = std::max(max_used[x], col);
                    placed = true;
                    break;
                }
                unassign(x);
            }
            if (placed) {
                ++x;
                next_color = 0;
                continue;
            }
            // Backtrack to the previous copy and try its next colour.
            --x;
            if (x >= 0) {
                next_color = color[x] + 1;
                unassign(x);
            }
        }
    }

    namespace detail
    {
        // Equality-and-order shape of a tuple, used to restrict brute-force
        // candidates to tuples shaped like those of the target structure.
        inline auto tuple_shape(const Structure & s, const Tuple & t) -> std::vector<int>
        {
            std::vector<int> shape;
            for (std::size_t i = 0; i < t.size(); ++i)
                for (std::size_t j = 0; j < t.size(); ++j) {
                    if (t[i] == t[j])
                        shape.push_back(0);
                    else if (s.ordered())
                        shape.push_back(s.less(t[i], t[j]) ? 1 : 2);
                    else
                        shape.push_back(1);
                }
            return shape;
        }

        inline auto subsets_of_size(int n, int r) -> std::vector<Tuple>
        {
            std::vector<Tuple> out;
            for (auto & t : all_tuples(n, r))
                if (std::is_sorted(t.begin(), t.end()) && std::adjacent_find(t.begin(), t.end()) == t.end())
                    out.push_back(t);
            return out;
        }

        inline auto closed_under_permutation(const std::set<Tuple> & rel) -> bool
        {
            for (auto t : rel) {
                std::sort(t.begin(), t.end());
                do
                    if (! rel.count(t))
                        return false;
                while (std::next_permutation(t.begin(), t.end()));
            }
            return true;
        }
    }

    struct BaseSearchResult
    {
        Structure result;
        std::uint64_t candidates_tried = 0;
    };

    // Searches for C with C -> (B)^A_k among structures on |B|, |B|+1, ...,
    // max_vertices vertices, trying candidates in a fixed order and verifying
    // each with verify_arrow. Candidate tuples are limited to the shapes
    // (equality pattern and, if ordered, order pattern) occurring in B, and a
    // relation that is symmetric in B is generated symmetric. Exhausting the
    // budget or the size range makes no claim that no C exists.
    inline auto base_ramsey_bruteforce(const Structure & a, const Structure & b, int k, BudgetMeter & meter,
        int max_vertices = 6) -> BaseSearchResult
    {
        BaseSearchResult out;
        for (int n = b.size(); n <= max_vertices; ++n) {
            Structure empty(b.language);
            for (int v = 0; v < n; ++v)
                empty.add_vertex("c" + std::to_string(v));

            // Choice units: each unit is a list of alternatives, each
            // alternative a list of edits applied to the empty structure.
            struct Edit
            {
                bool function;
                int symbol;
                Tuple tuple;
                Tuple image;
            };
            std::vector<std::vector<std::vector<Edit>>> units;
            for (int r = 0; r < int(b.relations.size()); ++r) {
                std::set<std::vector<int>> shapes;
                for (auto & t : b.relations[r])
                    shapes.insert(detail::tuple_shape(b, t));
                bool symmetric = ! b.relations[r].empty() && detail::closed_under_permutation(b.relations[r]);
                std::set<Tuple> done;
                for (auto & t : all_tuples(n, b.language.relations[r].arity)) {
                    if (done.count(t) || ! shapes.count(detail::tuple_shape(empty, t)))
                        continue;
                    std::vector<Edit> orbit;
                    if (symmetric) {
                        auto p = t;
                        std::sort(p.begin(), p.end());
                        do
                            if (done.insert(p).second)
                                orbit.push_back({false, r, p, {}});
                        while (std::next_permutation(p.begin(), p.end()));
                    }
                    else {
                        done.insert(t);
                        orbit.push_back({false, r, t, {}});
                    }
                    units.push_back({{}, orbit});
                }
            }
            for (int f = 0; f < int(b.functions.size()); ++f) {
                std::set<std::vector<int>> shapes;
                for (auto & [d, img] : b.functions[f])
                    shapes.insert(detail::tuple_shape(b, d));
                auto & sym = b.language.functions[f];
                auto images = detail::subsets_of_size(n, sym.range_arity);
                for (auto & d : all_tuples(n, sym.domain_arity)) {
                    if (! shapes.count(detail::tuple_shape(empty, d)))
                        continue;
                    std::vector<std::vector<Edit>> alternatives{{}};
                    for (auto & img : images)
                        alternatives.push_back({{true, f, d, img}});
                    units.push_back(alternatives);
                }
            }

            std::vector<std::size_t> choice(units.size(), 0);
            while (true) {
                meter.count_subsets(1, "base structure search");
                ++out.candidates_tried;
                Structure cand = empty;
                for (std::size_t u = 0; u < units.size(); ++u)
                    for (auto & e : units[u][choice[u]]) {
                        if (e.function)
                            cand.set_function(e.symbol, e.tuple, e.image);
                        else
                            cand.add_tuple(e.symbol, e.tuple);
                    }
                if (find_embedding(b, cand)) {
                    auto verdict = verify_arrow(cand, b, a, k, &meter);
                    if (verdict.arrows) {
                        out.result = cand;
                        return out;
                    }
                }
                std::size_t u = 0;
                while (u < units.size() && ++choice[u] == units[u].size())
                    choice[u++] = 0;
                if (u == units.size())
                    break;
            }
        }
        throw BudgetExceeded("base structure search: nothing found up to " + std::to_string(max_vertices) + " vertices");
    }
}
