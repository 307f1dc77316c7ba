#pragma once

#include <ramsey/amalgam.hpp>
#include <ramsey/budget.hpp>
#include <ramsey/canonical.hpp>
#include <ramsey/closure.hpp>
#include <ramsey/morphism.hpp>
#include <ramsey/structure.hpp>

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace ramsey
{
    struct ClosureAnalysis
    {
        std::vector<VertexSet> closure;                 // closure of each vertex
        std::vector<int> component;                     // component id of each vertex
        std::vector<VertexSet> components;              // numbered by least vertex
        std::vector<int> level;
        std::vector<std::pair<int, int>> homologous;    // pairs i < j of distinct components
        int top = -1;                                   // top component of a closure-extension, else -1
        VertexSet core;                                 // vertices outside the top component

        auto is_extension() const -> bool { return top >= 0; }

        auto are_homologous(int i, int j) const -> bool
        {
            if (i == j)
                return true;
            return std::binary_search(homologous.begin(), homologous.end(), std::pair<int, int>(std::min(i, j), std::max(i, j)));
        }
    };

    namespace detail
    {
        inline auto minus(const VertexSet & a, const VertexSet & b) -> VertexSet
        {
            VertexSet out;
            std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
            return out;
        }

        // Closures of two components are isomorphic by a map fixing their
        // common remainder, which must coincide.
        inline auto homologous_closures(const Structure & plain, const VertexSet & cl1, const VertexSet & c1,
            const VertexSet & cl2, const VertexSet & c2) -> bool
        {
            if (cl1.size() != cl2.size() || minus(cl1, c1) != minus(cl2, c2))
                return false;
            auto x = restrict_to(plain, cl1);
            auto y = restrict_to(plain, cl2);
            SearchOptions o;
            o.pinned.assign(x.size(), -1);
            for (int i = 0; i < int(cl1.size()); ++i)
                if (! std::binary_search(c1.begin(), c1.end(), cl1[i]))
                    o.pinned[i] = int(std::lower_bound(cl2.begin(), cl2.end(), cl1[i]) - cl2.begin());
            return Matcher(x, y).first(o).has_value();
        }
    }

    // Closure-components, levels, homologous pairs and the closure-extension
    // shape of s (order ignored).
    inline auto analyze(const Structure & s) -> ClosureAnalysis
    {
        Structure plain = forget_order(s);
        ClosureAnalysis out;
        int n = plain.size();
        ClosureOperator cl(plain);
        out.closure.resize(n);
        for (int v = 0; v < n; ++v)
            out.closure[v] = cl.of_vertex(v);

        out.component.assign(n, -1);
        for (int v = 0; v < n; ++v) {
            if (out.component[v] >= 0)
                continue;
            int id = int(out.components.size());
            out.components.push_back({});
            for (int u = v; u < n; ++u)
                if (out.component[u] < 0 && out.closure[u] == out.closure[v]) {
                    out.component[u] = id;
                    out.components[id].push_back(u);
                }
        }

        std::vector<int> by_size(n);
        for (int v = 0; v < n; ++v)
            by_size[v] = v;
        std::stable_sort(by_size.begin(), by_size.end(),
            [&](int a, int b) { return out.closure[a].size() < out.closure[b].size(); });
        out.level.assign(n, 0);
        for (auto v : by_size) {
            auto below = detail::minus(out.closure[v], out.components[out.component[v]]);
            int level = 0;
            for (auto u : below)
                level = std::max(level, out.level[u] + 1);
            out.level[v] = level;
        }

        for (int i = 0; i < int(out.components.size()); ++i)
            for (int j = i + 1; j < int(out.components.size()); ++j) {
                auto & ci = out.components[i];
                auto & cj = out.components[j];
                if (detail::homologous_closures(plain, out.closure[ci[0]], ci, out.closure[cj[0]], cj))
                    out.homologous.push_back({i, j});
            }

        for (int c = 0; c < int(out.components.size()); ++c) {
            auto & comp = out.components[c];
            if (int(out.closure[comp[0]].size()) != n)
                continue;
            int lvl = out.level[comp[0]];
            bool unique = true;
            for (int d = 0; d < int(out.components.size()); ++d)
                if (d != c && out.level[out.components[d][0]] == lvl)
                    unique = false;
            if (unique) {
                out.top = c;
                out.core = detail::minus(all_vertices(plain), comp);
            }
        }
        return out;
    }

    // Position of an ordered closure-extension in the fixed total order of
    // types: size first, then the unordered type, then the ordered type.
    struct ExtensionKey
    {
        int size = 0;
        std::string plain;
        std::string ordered;

        auto operator<=>(const ExtensionKey &) const = default;
    };

    inline auto extension_key(const Structure & ordered) -> ExtensionKey
    {
        return {ordered.size(), canonical_key(forget_order(ordered)), canonical_key(ordered)};
    }

    // Similarity of ordered closure-extensions: an isomorphism that preserves
    // the order on the vertices outside the top components.
    inline auto similar(const Structure & x, const Structure & y) -> bool
    {
        auto ax = analyze(x);
        auto ay = analyze(y);
        if (! ax.is_extension() || ! ay.is_extension())
            throw std::invalid_argument("similar: not a closure-extension");
        if (x.size() != y.size())
            return false;
        bool found = false;
        Matcher(forget_order(x), forget_order(y)).run({}, [&](const VertexMap & a) {
            for (auto u : ax.core)
                for (auto v : ax.core)
                    if (x.less(u, v) && ! y.less(a[u], a[v]))
                        return true;
            found = true;
            return false;
        });
        return found;
    }

    // The preorder on the vertices of an ordered structure: homologous
    // closures are equivalent; otherwise closures of different ordered types
    // compare by ExtensionKey, and closures of equal type compare their
    // remainders outside the component, listed in increasing order, position
    // by position.
    class VertexPreorder
    {
    public:
        explicit VertexPreorder(const Structure & a) :
            _a(a),
            _info(analyze(a))
        {
            if (! a.ordered())
                throw std::invalid_argument("preorder needs an ordered structure");
            int n = a.size();
            _keys.resize(n);
            _rest.resize(n);
            std::map<VertexSet, ExtensionKey> cache;
            for (int v = 0; v < n; ++v) {
                auto & cl = _info.closure[v];
                auto it = cache.find(cl);
                if (it == cache.end())
                    it = cache.emplace(cl, extension_key(restrict_to(a, cl))).first;
                _keys[v] = it->second;
                for (auto u : detail::minus(cl, _info.components[_info.component[v]]))
                    _rest[v].push_back(a.rank[u]);
                std::sort(_rest[v].begin(), _rest[v].end());
            }
        }

        auto analysis() const -> const ClosureAnalysis & { return _info; }

        auto precedes(Vertex u, Vertex v) const -> bool
        {
            if (u == v || _info.are_homologous(_info.component[u], _info.component[v]))
                return true;
            if (_keys[u] != _keys[v])
                return _keys[u] < _keys[v];
            return _rest[u] < _rest[v];
        }

        auto strictly_precedes(Vertex u, Vertex v) const -> bool { return precedes(u, v) && ! precedes(v, u); }

        // The order refines the preorder and components are intervals.
        auto check(std::string * why = nullptr) const -> bool
        {
            int n = _a.size();
            for (int u = 0; u < n; ++u)
                for (int v = 0; v < n; ++v)
                    if (strictly_precedes(u, v) && ! _a.less(u, v)) {
                        if (why)
                            *why = "order puts " + _a.names[v] + " before " + _a.names[u] + " against the preorder";
                        return false;
                    }
            for (auto & comp : _info.components) {
                int lo = n, hi = -1;
                for (auto v : comp) {
                    lo = std::min(lo, _a.rank[v]);
                    hi = std::max(hi, _a.rank[v]);
                }
                if (hi - lo + 1 != int(comp.size())) {
                    if (why)
                        *why = "closure-component " + vertex_names(_a, comp) + " is not an interval";
                    return false;
                }
            }
            return true;
        }

    private:
        const Structure & _a;
        ClosureAnalysis _info;
        std::vector<ExtensionKey> _keys;
        std::vector<std::vector<int>> _rest;
    };

    inline auto precedes(const Structure & a, Vertex u, Vertex v) -> bool { return VertexPreorder(a).precedes(u, v); }

    inline auto respects_preorder(const Structure & a, std::string * why = nullptr) -> bool
    {
        return VertexPreorder(a).check(why);
    }

    // Distinct orderings of s up to ordered isomorphism, sorted by key.
    inline auto orderings_of(const Structure & s, BudgetMeter * meter = nullptr) -> std::vector<Structure>
    {
        Structure plain = forget_order(s);
        std::map<std::string, Structure> found;
        auto perm = all_vertices(plain);
        do {
            if (meter)
                meter->count_coloring("orderings");
            auto o = with_order(plain, perm);
            found.emplace(canonical_key(o), o);
        } while (std::next_permutation(perm.begin(), perm.end()));
        std::vector<Structure> out;
        for (auto & [k, o] : found)
            out.push_back(o);
        return out;
    }

    namespace detail
    {
        inline auto closed_subsets(const Structure & s) -> std::vector<VertexSet>
        {
            if (s.size() > 20)
                throw BudgetExceeded("closed subsets: too many vertices");
            std::vector<VertexSet> out;
            for (std::uint32_t m = 1; m < (1u << s.size()); ++m) {
                VertexSet x;
                for (int v = 0; v < s.size(); ++v)
                    if (m >> v & 1)
                        x.push_back(v);
                if (is_closed(s, x))
                    out.push_back(x);
            }
            return out;
        }
    }

    struct AdmissibleClass
    {
        std::vector<Structure> universe;      // one per type, sorted by size then key
        std::vector<Structure> members;       // admitted orderings, in decision order
        std::set<std::string> keys;           // ordered keys of members

        auto contains(const Structure & ordered) const -> bool { return keys.count(canonical_key(ordered)) != 0; }

        auto admit(const Structure & ordered) -> void
        {
            if (keys.insert(canonical_key(ordered)).second)
                members.push_back(ordered);
        }
    };

    // Greedy construction over a universe closed under substructures: the
    // structures are taken by size (ties by key) and each ordering is admitted
    // when it respects the preorder with intervals for components, all its
    // proper substructures are admitted, and, for closure-extensions, no
    // similar admitted ordering is of a different type.
    inline auto build_admissible_class(std::vector<Structure> universe, BudgetMeter * meter = nullptr) -> AdmissibleClass
    {
        AdmissibleClass out;
        std::map<std::string, int> types;
        for (auto & s : universe)
            s = forget_order(s);
        std::sort(universe.begin(), universe.end(), [](const Structure & a, const Structure & b) {
            return std::make_pair(a.size(), canonical_key(a)) < std::make_pair(b.size(), canonical_key(b));
        });
        for (auto & s : universe)
            types.emplace(canonical_key(s), 0);
        for (auto & s : universe)
            for (auto & sub : detail::closed_subsets(s))
                if (int(sub.size()) < s.size() && ! types.count(canonical_key(restrict_to(s, sub))))
                    throw std::invalid_argument("universe is not closed under substructures: " +
                        vertex_names(s, sub) + " of a " + std::to_string(s.size()) + "-vertex structure is missing");
        out.universe = universe;

        std::map<std::string, std::vector<int>> extensions_by_type;
        for (auto & s : universe) {
            auto plain_key = canonical_key(s);
            for (auto & c : orderings_of(s, meter)) {
                if (! respects_preorder(c))
                    continue;
                bool subs = true;
                for (auto & sub : detail::closed_subsets(c))
                    if (int(sub.size()) < c.size() && ! out.contains(restrict_to(c, sub))) {
                        subs = false;
                        break;
                    }
                if (! subs)
                    continue;
                bool extension = analyze(c).is_extension();
                if (extension) {
                    bool clash = false;
                    for (auto i : extensions_by_type[plain_key])
                        if (similar(c, out.members[i]) && canonical_key(out.members[i]) != canonical_key(c))
                            clash = true;
                    if (clash)
                        continue;
                    extensions_by_type[plain_key].push_back(int(out.members.size()));
                }
                out.admit(c);
            }
        }
        return out;
    }

    struct AxiomReport
    {
        std::array<std::vector<std::string>, 6> violations;   // index i holds axiom A(i+1)
        std::uint64_t extension_cases = 0;                     // partial orders examined for A5

        auto ok(int axiom) const -> bool { return violations.at(axiom - 1).empty(); }

        auto all_ok() const -> bool
        {
            for (auto & v : violations)
                if (! v.empty())
                    return false;
            return true;
        }
    };

    // Checks A1-A6 for a set of admitted orderings against a universe. A5 is
    // checked for every structure B of the universe, every set U of vertices
    // that is a union of substructures, and every order on U meeting the
    // hypotheses; the conclusion is searched among the orderings of B.
    inline auto check_admissibility_axioms(const std::vector<Structure> & members, const std::vector<Structure> & universe,
        BudgetMeter * meter = nullptr) -> AxiomReport
    {
        AxiomReport report;
        std::set<std::string> keys;
        std::set<std::string> covered_types;
        for (auto & m : members) {
            keys.insert(canonical_key(m));
            covered_types.insert(canonical_key(forget_order(m)));
        }
        auto admitted = [&](const Structure & o) { return keys.count(canonical_key(o)) != 0; };

        for (auto & s : universe)
            if (! covered_types.count(canonical_key(forget_order(s))))
                report.violations[0].push_back("no admitted ordering of a " + std::to_string(s.size()) + "-vertex structure");

        for (auto & m : members) {
            for (auto & sub : detail::closed_subsets(m))
                if (! admitted(restrict_to(m, sub)))
                    report.violations[1].push_back("substructure " + vertex_names(m, sub) + " of an admitted ordering is not admitted");
            VertexPreorder pre(m);
            std::string why;
            if (! pre.check(&why))
                report.violations[why.find("interval") != std::string::npos ? 3 : 2].push_back(why);
        }

        for (auto & b0 : universe) {
            Structure b = forget_order(b0);
            int n = b.size();
            if (n > 8)
                throw BudgetExceeded("A5 check: structure too large");
            ClosureOperator cl(b);
            std::vector<std::vector<Vertex>> b_orders;
            {
                auto perm = all_vertices(b);
                do
                    if (admitted(with_order(b, perm)))
                        b_orders.push_back(perm);
                while (std::next_permutation(perm.begin(), perm.end()));
            }
            for (std::uint32_t m = 1; m < (1u << n); ++m) {
                VertexSet u;
                for (int v = 0; v < n; ++v)
                    if (m >> v & 1)
                        u.push_back(v);
                bool union_of_closed = true;
                for (auto v : u) {
                    auto c = cl.of_vertex(v);
                    if (! std::includes(u.begin(), u.end(), c.begin(), c.end()))
                        union_of_closed = false;
                }
                if (! union_of_closed)
                    continue;
                auto part = restrict_to(b, u);
                auto subs = detail::closed_subsets(part);
                auto seq = all_vertices(part);
                do {
                    if (meter)
                        meter->count_coloring("A5 check");
                    auto ordered = with_order(part, seq);
                    if (! respects_preorder(ordered))
                        continue;
                    bool hypotheses = true;
                    for (auto & sub : subs)
                        if (is_closed(b, detail::apply(u, sub)) && ! admitted(restrict_to(ordered, sub))) {
                            hypotheses = false;
                            break;
                        }
                    if (! hypotheses)
                        continue;
                    ++report.extension_cases;
                    bool extended = false;
                    for (auto & order : b_orders) {
                        std::vector<int> rank(n);
                        for (int i = 0; i < n; ++i)
                            rank[order[i]] = i;
                        bool agrees = true;
                        for (int i = 0; i + 1 < int(seq.size()) && agrees; ++i)
                            agrees = rank[u[seq[i]]] < rank[u[seq[i + 1]]];
                        if (agrees) {
                            extended = true;
                            break;
                        }
                    }
                    if (! extended) {
                        std::string text;
                        for (auto v : seq)
                            text += (text.empty() ? "" : "<") + b.names[u[v]];
                        report.violations[4].push_back("order " + text + " on " + vertex_names(b, u) + " of a " +
                            std::to_string(n) + "-vertex structure has no admitted extension");
                    }
                } while (std::next_permutation(seq.begin(), seq.end()));
            }
        }

        for (std::size_t i = 0; i < members.size(); ++i) {
            if (! analyze(members[i]).is_extension())
                continue;
            for (std::size_t j = i + 1; j < members.size(); ++j)
                if (members[j].size() == members[i].size() && analyze(members[j]).is_extension() &&
                    canonical_key(forget_order(members[i])) == canonical_key(forget_order(members[j])) &&
                    similar(members[i], members[j]))
                    report.violations[5].push_back("two similar admitted closure-extensions of different types");
        }
        return report;
    }

    using OrderingClass = std::function<bool(const Structure &)>;

    inline auto free_orderings() -> OrderingClass
    {
        return [](const Structure &) { return true; };
    }

    // Orderings listing vertices by non-decreasing level.
    inline auto level_orderings() -> OrderingClass
    {
        return [](const Structure & s) {
            auto info = analyze(s);
            auto seq = s.order_sequence();
            for (std::size_t i = 0; i + 1 < seq.size(); ++i)
                if (info.level[seq[i]] > info.level[seq[i + 1]])
                    return false;
            return true;
        };
    }

    inline auto class_orderings(const AdmissibleClass & c) -> OrderingClass
    {
        return [&c](const Structure & s) { return c.contains(s); };
    }

    struct OrderingPropertyResult
    {
        bool holds = true;
        std::uint64_t orderings_checked = 0;
        std::optional<Structure> failing;     // an admitted ordering of B missing a copy
        std::optional<Structure> missing;     // the ordering of A it misses
    };

    // Whether every admitted ordering of b contains an ordered copy of each of
    // the given orderings, by trying every ordering of b.
    inline auto verify_ordering_property(const std::vector<Structure> & a_orderings, const Structure & b,
        const OrderingClass & admitted, BudgetMeter * meter = nullptr) -> OrderingPropertyResult
    {
        OrderingPropertyResult out;
        Structure plain = forget_order(b);
        if (plain.size() > 12)
            throw BudgetExceeded("ordering property: too many orderings");
        auto perm = all_vertices(plain);
        do {
            if (meter)
                meter->count_coloring("ordering property");
            auto o = with_order(plain, perm);
            if (! admitted(o))
                continue;
            ++out.orderings_checked;
            for (auto & a : a_orderings)
                if (! find_embedding(a, o)) {
                    out.holds = false;
                    out.failing = o;
                    out.missing = a;
                    return out;
                }
        } while (std::next_permutation(perm.begin(), perm.end()));
        return out;
    }

    inline auto verify_ordering_property(const Structure & a, const Structure & b, const OrderingClass & admitted,
        BudgetMeter * meter = nullptr) -> OrderingPropertyResult
    {
        return verify_ordering_property(std::vector<Structure>{a}, b, admitted, meter);
    }

    // A reordering y of x (same vertices) keeps the order between vertices
    // of distinct homologous components, and carries the order-isomorphism
    // between any two closures of equal ordered type in x to one in y.
    inline auto keeps_homology_and_types(const Structure & x, const Structure & y) -> bool
    {
        auto info = analyze(x);
        int n = x.size();
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v) {
                int cu = info.component[u], cv = info.component[v];
                if (cu != cv && info.are_homologous(cu, cv) && x.less(u, v) != y.less(u, v))
                    return false;
            }
        std::vector<std::vector<Vertex>> by_rank(n);
        std::vector<std::string> key(n);
        for (int v = 0; v < n; ++v) {
            auto & cl = info.closure[v];
            by_rank[v] = cl;
            std::sort(by_rank[v].begin(), by_rank[v].end(), [&](Vertex a, Vertex b) { return x.less(a, b); });
            key[v] = canonical_key(restrict_to(x, cl));
        }
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) {
                if (key[u] != key[v])
                    continue;
                auto & p = by_rank[u];
                auto & q = by_rank[v];
                for (std::size_t i = 0; i < p.size(); ++i)
                    for (std::size_t j = 0; j < p.size(); ++j)
                        if (y.less(p[i], p[j]) != y.less(q[i], q[j]))
                            return false;
            }
        return true;
    }

    // Admitted reorderings of x keeping homology and closure types, as order
    // sequences sorted lexicographically.
    inline auto qualifying_reorderings(const Structure & x, const OrderingClass & admitted, BudgetMeter * meter = nullptr)
        -> std::vector<Structure>
    {
        if (x.size() > 10)
            throw BudgetExceeded("reorderings: too many vertices");
        std::vector<Structure> out;
        auto perm = all_vertices(x);
        do {
            if (meter)
                meter->count_coloring("reorderings");
            auto y = with_order(forget_order(x), perm);
            if (admitted(y) && keeps_homology_and_types(x, y))
                out.push_back(y);
        } while (std::next_permutation(perm.begin(), perm.end()));
        return out;
    }

    struct OrderingWitness
    {
        Structure b0;
        std::vector<Structure> reorderings;   // the copies, in order
    };

    // Disjoint union of all qualifying reorderings of a. The union is ordered
    // by merging the copies component by component, always taking the least
    // head component under the preorder (ties to the earlier copy), which
    // keeps each copy's order and makes components intervals.
    inline auto ordering_witness_b0(const Structure & a, const OrderingClass & admitted, BudgetMeter * meter = nullptr)
        -> OrderingWitness
    {
        if (! a.ordered() || ! admitted(a))
            throw std::invalid_argument("ordering witness: A is not an admitted ordering");
        OrderingWitness out;
        out.reorderings = qualifying_reorderings(a, admitted, meter);
        int n = a.size();
        int copies_count = int(out.reorderings.size());

        Structure plain(forget_order(a).language);
        for (int i = 0; i < copies_count; ++i)
            for (int v = 0; v < n; ++v)
                plain.add_vertex("r" + std::to_string(i) + "." + a.names[v]);
        for (int i = 0; i < copies_count; ++i) {
            VertexMap shift(n);
            for (int v = 0; v < n; ++v)
                shift[v] = i * n + v;
            detail::copy_tuples(forget_order(a), shift, plain);
        }

        auto info = analyze(a);
        std::vector<ExtensionKey> keys(copies_count * n);
        std::vector<std::vector<std::vector<Vertex>>> heads(copies_count);
        for (int i = 0; i < copies_count; ++i) {
            auto & r = out.reorderings[i];
            for (int v = 0; v < n; ++v)
                keys[i * n + v] = extension_key(restrict_to(r, info.closure[v]));
            for (auto v : r.order_sequence()) {
                auto & comps = heads[i];
                if (comps.empty() || info.component[comps.back().back() - i * n] != info.component[v])
                    comps.push_back({});
                comps.back().push_back(i * n + v);
            }
        }
        std::vector<int> placed(copies_count * n, -1);
        std::vector<Vertex> sequence;
        std::vector<std::size_t> next(copies_count, 0);
        auto rest_ranks = [&](Vertex w) {
            int i = w / n;
            int v = w % n;
            std::vector<int> r;
            for (auto u : detail::minus(info.closure[v], info.components[info.component[v]]))
                r.push_back(placed[i * n + u]);
            std::sort(r.begin(), r.end());
            return r;
        };
        while (int(sequence.size()) < copies_count * n) {
            int best = -1;
            for (int i = 0; i < copies_count; ++i) {
                if (next[i] == heads[i].size())
                    continue;
                if (best < 0) {
                    best = i;
                    continue;
                }
                Vertex w = heads[i][next[i]][0];
                Vertex z = heads[best][next[best]][0];
                if (std::make_tuple(keys[w], rest_ranks(w)) < std::make_tuple(keys[z], rest_ranks(z)))
                    best = i;
            }
            for (auto w : heads[best][next[best]]) {
                placed[w] = int(sequence.size());
                sequence.push_back(w);
            }
            ++next[best];
        }
        out.b0 = with_order(plain, sequence);
        std::string why;
        if (! respects_preorder(out.b0, &why))
            throw std::logic_error("ordering witness: merged order is not admissible: " + why);
        return out;
    }
}
