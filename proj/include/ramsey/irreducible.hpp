#pragma once

#include <ramsey/budget.hpp>
#include <ramsey/closure.hpp>
#include <ramsey/structure.hpp>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

namespace ramsey
{
    // Every tuple of s that ties its vertices together for amalgamation
    // purposes: relation tuples and function entries (domain plus image).
    inline auto hyperedges(const Structure & s) -> std::vector<VertexSet>
    {
        std::vector<VertexSet> out;
        for (auto & rel : s.relations)
            for (auto & t : rel)
                out.push_back(make_set(t));
        for (auto & fun : s.functions)
            for (auto & [d, img] : fun) {
                Tuple all = d;
                all.insert(all.end(), img.begin(), img.end());
                out.push_back(make_set(all));
            }
        return out;
    }

    namespace detail
    {
        // Bitmask form of a structure with at most 63 vertices.
        struct MaskForm
        {
            int n = 0;
            std::vector<std::uint64_t> edges;
            std::vector<std::pair<std::uint64_t, std::uint64_t>> entries; // domain, image

            explicit MaskForm(const Structure & s) :
                n(s.size())
            {
                if (n > 63)
                    throw std::invalid_argument("mask form limited to 63 vertices");
                for (auto & e : hyperedges(s)) {
                    std::uint64_t m = 0;
                    for (auto v : e)
                        m |= std::uint64_t(1) << v;
                    edges.push_back(m);
                }
                for (auto & fun : s.functions)
                    for (auto & [d, img] : fun) {
                        std::uint64_t dm = 0, im = 0;
                        for (auto v : d)
                            dm |= std::uint64_t(1) << v;
                        for (auto v : img)
                            im |= std::uint64_t(1) << v;
                        entries.emplace_back(dm, im);
                    }
            }

            auto closed(std::uint64_t x) const -> bool
            {
                for (auto & [d, img] : entries)
                    if ((d & x) == d && (img & x) != img)
                        return false;
                return true;
            }

            // Whether the vertices of `rest` form one component when joined by
            // the parts of hyperedges lying in `rest`.
            auto connected(std::uint64_t rest) const -> bool
            {
                if (rest == 0)
                    return true;
                std::uint64_t reached = rest & (~rest + 1);
                bool grew = true;
                while (grew) {
                    grew = false;
                    for (auto e : edges) {
                        auto part = e & rest;
                        if ((part & reached) && (part & ~reached)) {
                            reached |= part;
                            grew = true;
                        }
                    }
                }
                return reached == rest;
            }
        };
    }

    // Irreducibility by cuts: s is reducible iff removing some closed proper
    // subset I (possibly empty) leaves the rest disconnected by the
    // hyperedges. Exponential in the number of vertices.
    inline auto is_irreducible_by_cuts(const Structure & s, BudgetMeter * meter = nullptr) -> bool
    {
        if (s.ordered() || s.size() <= 1)
            return true;
        detail::MaskForm m(s);
        std::uint64_t full = (m.n == 64) ? ~std::uint64_t(0) : (std::uint64_t(1) << m.n) - 1;
        if (! m.connected(full))
            return false;
        for (std::uint64_t cut = 1; cut < full; ++cut) {
            if (meter && (cut & 0xfff) == 0)
                meter->count_subsets(0x1000, "irreducibility");
            auto rest = full & ~cut;
            if (std::popcount(rest) >= 2 && m.closed(cut) && ! m.connected(rest))
                return false;
        }
        return true;
    }

    // For languages whose functions are all unary: a structure is irreducible
    // iff every pair of vertices lies in the closure of a single vertex or in
    // the closure of a single relation tuple. Polynomial.
    inline auto is_irreducible_unary(const Structure & s) -> bool
    {
        if (! s.language.all_functions_unary())
            throw std::invalid_argument("is_irreducible_unary: non-unary function");
        if (s.ordered() || s.size() <= 1)
            return true;
        int n = s.size();
        ClosureOperator cl(s);
        std::vector<std::vector<char>> covered(n, std::vector<char>(n, 0));
        auto cover = [&](const VertexSet & set) {
            for (auto u : set)
                for (auto v : set)
                    covered[u][v] = 1;
        };
        for (int v = 0; v < n; ++v)
            cover(cl.of_vertex(v));
        for (auto & rel : s.relations)
            for (auto & t : rel)
                cover(cl(make_set(t)));
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v)
                if (! covered[u][v])
                    return false;
        return true;
    }

    inline auto is_irreducible(const Structure & s, BudgetMeter * meter = nullptr) -> bool
    {
        if (s.language.all_functions_unary())
            return is_irreducible_unary(s);
        return is_irreducible_by_cuts(s, meter);
    }

    struct IrreducibleSweep
    {
        std::vector<VertexSet> sets; // sorted by size, then lexicographically
        bool complete = true;        // false if a size cap cut the sweep short
    };

    namespace detail
    {
        inline auto by_size_then_lex(const VertexSet & a, const VertexSet & b) -> bool
        {
            return a.size() != b.size() ? a.size() < b.size() : a < b;
        }
    }

    // All nonempty closed vertex sets of s inducing an irreducible structure,
    // up to max_size vertices (-1 = no cap). Ordered structures are treated by
    // their unordered reduct: with the order every closed set is irreducible.
    inline auto irreducible_substructures(const Structure & input, int max_size = -1, BudgetMeter * meter = nullptr)
        -> IrreducibleSweep
    {
        Structure s = forget_order(input);
        IrreducibleSweep out;
        int n = s.size();
        std::set<VertexSet> found;
        LocalRestrictor local(s);
        if (s.language.all_functions_unary()) {
            // Irreducible sets are cliques of the pair-cover graph whose
            // vertex closures stay inside, so grow cliques in index order.
            ClosureOperator cl(s);
            std::vector<VertexSet> vertex_closure(n);
            std::vector<std::set<Vertex>> adjacent(n);
            auto cover = [&](const VertexSet & set) {
                for (auto u : set)
                    for (auto v : set)
                        if (u != v)
                            adjacent[u].insert(v);
            };
            for (int v = 0; v < n; ++v) {
                vertex_closure[v] = cl.of_vertex(v);
                cover(vertex_closure[v]);
            }
            for (auto & rel : s.relations)
                for (auto & t : rel)
                    cover(cl(make_set(t)));

            std::vector<Vertex> current;
            std::vector<std::vector<Vertex>> adj(n);
            for (int v = 0; v < n; ++v)
                adj[v].assign(adjacent[v].begin(), adjacent[v].end());
            auto grow = [&](auto & self, const std::vector<Vertex> & candidates) -> void {
                if (meter)
                    meter->count_subsets(1, "irreducible substructures");
                auto set = make_set(current);
                bool closed = true;
                for (auto v : set) {
                    for (auto u : vertex_closure[v])
                        if (! std::binary_search(set.begin(), set.end(), u)) {
                            closed = false;
                            break;
                        }
                    if (! closed)
                        break;
                }
                if (closed && is_irreducible_unary(local(set)))
                    found.insert(set);
                if (max_size >= 0 && int(current.size()) >= max_size) {
                    if (! candidates.empty())
                        out.complete = false;
                    return;
                }
                for (std::size_t i = 0; i < candidates.size(); ++i) {
                    Vertex v = candidates[i];
                    std::vector<Vertex> next;
                    for (std::size_t j = i + 1; j < candidates.size(); ++j)
                        if (std::binary_search(adj[v].begin(), adj[v].end(), candidates[j]))
                            next.push_back(candidates[j]);
                    current.push_back(v);
                    self(self, next);
                    current.pop_back();
                }
            };
            for (int v = 0; v < n; ++v) {
                current = {v};
                std::vector<Vertex> next;
                for (auto u : adj[v])
                    if (u > v)
                        next.push_back(u);
                grow(grow, next);
            }
        }
        else {
            if (n > 30)
                throw BudgetExceeded("irreducible substructures: " + std::to_string(n) + " vertices, non-unary language");
            detail::MaskForm m(s);
            for (std::uint64_t x = 1; x < (std::uint64_t(1) << n); ++x) {
                if (meter && (x & 0xfff) == 0)
                    meter->count_subsets(0x1000, "irreducible substructures");
                if (max_size >= 0 && std::popcount(x) > max_size) {
                    out.complete = false;
                    continue;
                }
                if (! m.closed(x))
                    continue;
                VertexSet set;
                for (int v = 0; v < n; ++v)
                    if (x >> v & 1)
                        set.push_back(v);
                if (is_irreducible_by_cuts(local(set), meter))
                    found.insert(set);
            }
        }
        out.sets.assign(found.begin(), found.end());
        std::sort(out.sets.begin(), out.sets.end(), detail::by_size_then_lex);
        return out;
    }
}
