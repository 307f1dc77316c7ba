#pragma once

#include <ramsey/structure.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace ramsey
{
    namespace detail
    {
        // Relabel-invariant description of every vertex, used to split the
        // vertices into cells before trying permutations.
        inline auto vertex_invariants(const Structure & s) -> std::vector<std::vector<int>>
        {
            int n = s.size();
            std::vector<std::vector<int>> inv(n);
            for (int v = 0; v < n; ++v)
                inv[v].push_back(s.ordered() ? s.rank[v] : 0);
            for (int r = 0; r < int(s.relations.size()); ++r) {
                int arity = s.language.relations[r].arity;
                std::vector<std::vector<int>> count(n, std::vector<int>(arity + 1, 0));
                for (auto & t : s.relations[r]) {
                    for (int i = 0; i < arity; ++i)
                        ++count[t[i]][i];
                    if (make_set(t).size() < t.size())
                        for (auto v : t)
                            ++count[v][arity];
                }
                for (int v = 0; v < n; ++v)
                    inv[v].insert(inv[v].end(), count[v].begin(), count[v].end());
            }
            for (int f = 0; f < int(s.functions.size()); ++f) {
                int arity = s.language.functions[f].domain_arity;
                std::vector<std::vector<int>> count(n, std::vector<int>(arity + 1, 0));
                for (auto & [d, img] : s.functions[f]) {
                    for (int i = 0; i < arity; ++i)
                        ++count[d[i]][i];
                    for (auto v : img)
                        ++count[v][arity];
                }
                for (int v = 0; v < n; ++v)
                    inv[v].insert(inv[v].end(), count[v].begin(), count[v].end());
            }
            return inv;
        }

        // Flat integer description of s with vertex v renamed to position[v].
        inline auto encode(const Structure & s, const std::vector<int> & position) -> std::vector<int>
        {
            std::vector<int> out{s.size()};
            auto mapped = [&](const Tuple & t) {
                Tuple m(t.size());
                for (std::size_t i = 0; i < t.size(); ++i)
                    m[i] = position[t[i]];
                return m;
            };
            for (auto & rel : s.relations) {
                std::vector<Tuple> ts;
                for (auto & t : rel)
                    ts.push_back(mapped(t));
                std::sort(ts.begin(), ts.end());
                out.push_back(int(ts.size()));
                for (auto & t : ts)
                    out.insert(out.end(), t.begin(), t.end());
            }
            for (int f = 0; f < int(s.functions.size()); ++f) {
                std::vector<std::pair<Tuple, Tuple>> es;
                for (auto & [d, img] : s.functions[f]) {
                    auto m = mapped(img);
                    if (! s.language.functions[f].ordered_image)
                        std::sort(m.begin(), m.end());
                    es.emplace_back(mapped(d), m);
                }
                std::sort(es.begin(), es.end());
                out.push_back(int(es.size()));
                for (auto & [d, img] : es) {
                    out.insert(out.end(), d.begin(), d.end());
                    out.insert(out.end(), img.begin(), img.end());
                }
            }
            return out;
        }
    }

    struct Canonical
    {
        std::vector<int> code;     // equal codes <=> isomorphic (same language)
        std::vector<int> position; // vertex -> canonical position
    };

    // Canonical labelling by exhaustive search over the permutations that
    // respect the invariant cells. Ordered structures are labelled by order.
    inline auto canonical(const Structure & s) -> Canonical
    {
        int n = s.size();
        auto inv = detail::vertex_invariants(s);
        std::vector<int> verts(n);
        for (int v = 0; v < n; ++v)
            verts[v] = v;
        std::stable_sort(verts.begin(), verts.end(), [&](int a, int b) { return inv[a] < inv[b]; });
        std::vector<std::pair<int, int>> cells; // [begin, end) in verts
        for (int i = 0; i < n;) {
            int j = i;
            while (j < n && inv[verts[j]] == inv[verts[i]])
                ++j;
            cells.emplace_back(i, j);
            i = j;
        }
        std::vector<int> invariant_code;
        for (auto v : verts)
            invariant_code.insert(invariant_code.end(), inv[v].begin(), inv[v].end());

        Canonical best;
        std::vector<int> position(n);
        for (auto & [b, e] : cells)
            std::sort(verts.begin() + b, verts.begin() + e);
        while (true) {
            for (int i = 0; i < n; ++i)
                position[verts[i]] = i;
            auto code = detail::encode(s, position);
            if (best.code.empty() || code < best.code) {
                best.code = std::move(code);
                best.position = position;
            }
            // Advance the rightmost cell that still has a next permutation.
            int c = int(cells.size()) - 1;
            for (; c >= 0; --c) {
                auto [b, e] = cells[c];
                if (std::next_permutation(verts.begin() + b, verts.begin() + e))
                    break;
            }
            if (c < 0)
                break;
        }
        best.code.insert(best.code.begin(), invariant_code.begin(), invariant_code.end());
        return best;
    }

    inline auto canonical_key(const Structure & s) -> std::string
    {
        auto code = canonical(s).code;
        std::string out;
        for (auto x : code)
            out += std::to_string(x) + ",";
        return out;
    }

    // The canonically relabelled copy of s with vertex names 0..n-1.
    inline auto canonical_form(const Structure & s) -> Structure
    {
        auto c = canonical(s);
        std::vector<std::string> names(s.size());
        for (int i = 0; i < s.size(); ++i)
            names[i] = std::to_string(i);
        return relabel(s, c.position, names);
    }

    // One representative per isomorphism class, in order of first appearance.
    inline auto unique_up_to_iso(const std::vector<Structure> & items) -> std::vector<Structure>
    {
        std::set<std::string> seen;
        std::vector<Structure> out;
        for (auto & s : items)
            if (seen.insert(canonical_key(s)).second)
                out.push_back(s);
        return out;
    }
}
