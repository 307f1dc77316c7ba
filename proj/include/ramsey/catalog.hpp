#pragma once

#include <ramsey/budget.hpp>
#include <ramsey/canonical.hpp>
#include <ramsey/structure.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace ramsey
{
    // Small-structure catalogues: every structure of a kind with at most n
    // vertices, one per isomorphism type, sorted by size then canonical key.

    inline auto graph_language() -> Language
    {
        Language l;
        l.add_relation("E", 2);
        return l;
    }

    inline auto forest_language() -> Language
    {
        Language l;
        l.add_function("F", 1, 1);
        return l;
    }

    namespace detail
    {
        inline auto numbered(const Language & lang, int n) -> Structure
        {
            Structure s(lang);
            for (int v = 0; v < n; ++v)
                s.add_vertex("v" + std::to_string(v));
            return s;
        }

        struct IsoCollector
        {
            std::map<std::pair<int, std::string>, Structure> seen;

            auto add(const Structure & s) -> void
            {
                auto key = std::make_pair(s.size(), canonical_key(s));
                seen.emplace(std::move(key), s);
            }

            auto result() const -> std::vector<Structure>
            {
                std::vector<Structure> out;
                for (auto & [key, s] : seen)
                    out.push_back(s);
                return out;
            }
        };
    }

    // Simple undirected graphs (symmetric irreflexive E).
    inline auto graphs_up_to(int n, BudgetMeter * meter = nullptr) -> std::vector<Structure>
    {
        detail::IsoCollector out;
        for (int k = 0; k <= n; ++k) {
            std::vector<std::pair<int, int>> pairs;
            for (int u = 0; u < k; ++u)
                for (int v = u + 1; v < k; ++v)
                    pairs.push_back({u, v});
            if (pairs.size() > 40)
                throw BudgetExceeded("graph catalogue: too many vertices");
            std::uint64_t total = std::uint64_t(1) << pairs.size();
            if (meter)
                meter->count_subsets(total, "graph catalogue");
            for (std::uint64_t mask = 0; mask < total; ++mask) {
                auto g = detail::numbered(graph_language(), k);
                for (std::size_t i = 0; i < pairs.size(); ++i)
                    if (mask >> i & 1) {
                        g.add_tuple(0, {pairs[i].first, pairs[i].second});
                        g.add_tuple(0, {pairs[i].second, pairs[i].first});
                    }
                out.add(g);
            }
        }
        return out.result();
    }

    // Forests as a partial unary function sending each vertex to its father.
    inline auto forests_up_to(int n, BudgetMeter * meter = nullptr) -> std::vector<Structure>
    {
        detail::IsoCollector out;
        for (int k = 0; k <= n; ++k) {
            std::vector<int> father(k, -1);
            while (true) {
                if (meter)
                    meter->count_subsets(1, "forest catalogue");
                bool acyclic = true;
                for (int v = 0; v < k && acyclic; ++v) {
                    int u = v;
                    for (int steps = 0; u >= 0 && steps <= k; ++steps)
                        u = father[u];
                    acyclic = u < 0;
                }
                if (acyclic) {
                    auto f = detail::numbered(forest_language(), k);
                    for (int v = 0; v < k; ++v)
                        if (father[v] >= 0)
                            f.set_function(0, {v}, {father[v]});
                    out.add(f);
                }
                int i = k - 1;
                while (i >= 0 && ++father[i] == k)
                    father[i--] = -1;
                if (i < 0)
                    break;
            }
        }
        return out.result();
    }

    // Every structure over an unordered language on 0..n vertices, optionally
    // filtered. The labelled count is charged to the meter up front.
    inline auto structures_up_to(const Language & lang, int n, const std::function<bool(const Structure &)> & keep = {},
        BudgetMeter * meter = nullptr) -> std::vector<Structure>
    {
        if (lang.ordered)
            throw std::invalid_argument("structure catalogue: language must be unordered");
        detail::IsoCollector out;
        for (int k = 0; k <= n; ++k) {
            // One choice unit per relation tuple (absent/present) and per
            // function domain tuple (undefined or one image).
            std::vector<std::pair<int, Tuple>> rel_units;
            for (int r = 0; r < int(lang.relations.size()); ++r)
                for (auto & t : all_tuples(k, lang.relations[r].arity))
                    rel_units.push_back({r, t});
            struct FunUnit
            {
                int f;
                Tuple domain;
                std::vector<Tuple> images;
            };
            std::vector<FunUnit> fun_units;
            for (int f = 0; f < int(lang.functions.size()); ++f) {
                std::vector<Tuple> images;
                for (auto & t : all_tuples(k, lang.functions[f].range_arity))
                    if (std::is_sorted(t.begin(), t.end()) && std::adjacent_find(t.begin(), t.end()) == t.end())
                        images.push_back(t);
                for (auto & d : all_tuples(k, lang.functions[f].domain_arity))
                    fun_units.push_back({f, d, images});
            }
            double total = std::ldexp(1.0, int(rel_units.size()));
            for (auto & u : fun_units)
                total *= double(u.images.size() + 1);
            if (meter) {
                if (total > 1e15)
                    throw BudgetExceeded("structure catalogue: search space too large");
                meter->count_subsets(std::uint64_t(total), "structure catalogue");
            }
            std::vector<std::size_t> choice(rel_units.size() + fun_units.size(), 0);
            while (true) {
                auto s = detail::numbered(lang, k);
                for (std::size_t i = 0; i < rel_units.size(); ++i)
                    if (choice[i])
                        s.add_tuple(rel_units[i].first, rel_units[i].second);
                for (std::size_t i = 0; i < fun_units.size(); ++i)
                    if (auto c = choice[rel_units.size() + i])
                        s.set_function(fun_units[i].f, fun_units[i].domain, fun_units[i].images[c - 1]);
                if (! keep || keep(s))
                    out.add(s);
                std::size_t i = 0;
                for (; i < choice.size(); ++i) {
                    std::size_t limit = i < rel_units.size() ? 2 : fun_units[i - rel_units.size()].images.size() + 1;
                    if (++choice[i] < limit)
                        break;
                    choice[i] = 0;
                }
                if (i == choice.size())
                    break;
            }
        }
        return out.result();
    }
}
