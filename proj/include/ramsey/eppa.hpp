#pragma once

#include <ramsey/budget.hpp>
#include <ramsey/closure.hpp>
#include <ramsey/irreducible.hpp>
#include <ramsey/morphism.hpp>
#include <ramsey/structure.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace ramsey
{
    // Extension property for partial automorphisms over languages whose
    // functions are all unary. The extension C is built on top of a relational
    // extension B- of the relational reduct A-: its vertices are valuations,
    // closures of A pulled back to B- and decorated with integer labels on the
    // big subsets of B-.

    struct RelationalReduct
    {
        Structure reduct;
        std::vector<int> function_relation; // function of the source -> relation of the reduct
    };

    // Relations are copied; each function F becomes a binary relation holding
    // (t, u) for every u in F(t).
    inline auto relational_reduct(const Structure & a) -> RelationalReduct
    {
        if (! a.language.all_functions_unary())
            throw std::invalid_argument("relational reduct: every function must be unary");
        if (a.ordered())
            throw std::invalid_argument("relational reduct: ordered structures are not supported");
        Language lang;
        for (auto & r : a.language.relations)
            lang.add_relation(r.name, r.arity);
        RelationalReduct out;
        for (auto & f : a.language.functions) {
            std::string name = "R_" + f.name;
            while (lang.relation_index(name) || a.language.function_index(name))
                name += "'";
            out.function_relation.push_back(lang.add_relation(name, 2));
        }
        out.reduct = Structure(lang);
        for (auto & n : a.names)
            out.reduct.add_vertex(n);
        for (int r = 0; r < int(a.relations.size()); ++r)
            out.reduct.relations[r] = a.relations[r];
        for (int f = 0; f < int(a.functions.size()); ++f)
            for (auto & [d, img] : a.functions[f])
                for (auto u : img)
                    out.reduct.add_tuple(out.function_relation[f], {d[0], u});
        return out;
    }

    // A partial map on the vertices of one structure; -1 marks "undefined".
    using PartialMap = VertexMap;

    inline auto partial_domain(const PartialMap & p) -> VertexSet
    {
        VertexSet out;
        for (int v = 0; v < int(p.size()); ++v)
            if (p[v] >= 0)
                out.push_back(v);
        return out;
    }

    inline auto partial_range(const PartialMap & p) -> VertexSet
    {
        VertexSet out;
        for (auto w : p)
            if (w >= 0)
                out.push_back(w);
        return make_set(out);
    }

    inline auto extends(const VertexMap & full, const PartialMap & p) -> bool
    {
        for (int v = 0; v < int(p.size()); ++v)
            if (p[v] >= 0 && full[v] != p[v])
                return false;
        return true;
    }

    // g after f, defined where both steps are.
    inline auto compose_partial(const PartialMap & g, const PartialMap & f) -> PartialMap
    {
        PartialMap h(f.size(), -1);
        for (std::size_t v = 0; v < f.size(); ++v)
            if (f[v] >= 0)
                h[v] = g[f[v]];
        return h;
    }

    // An isomorphism between two closed substructures.
    inline auto is_partial_automorphism(const Structure & s, const PartialMap & p) -> bool
    {
        if (int(p.size()) != s.size())
            return false;
        auto dom = partial_domain(p);
        auto ran = partial_range(p);
        if (dom.size() != ran.size() || ! is_closed(s, dom) || ! is_closed(s, ran))
            return false;
        VertexMap local(dom.size());
        for (std::size_t i = 0; i < dom.size(); ++i)
            local[i] = int(std::lower_bound(ran.begin(), ran.end(), p[dom[i]]) - ran.begin());
        return check_map(restrict_to(s, dom), restrict_to(s, ran), local) == MapKind::embedding;
    }

    // Every partial automorphism, sorted. For relational structures every
    // vertex set is closed, so these are all partial isomorphisms.
    inline auto partial_automorphisms(const Structure & s, BudgetMeter * meter = nullptr) -> std::vector<PartialMap>
    {
        int n = s.size();
        if (n > 20)
            throw BudgetExceeded("partial automorphisms: too many vertices");
        if (meter)
            meter->count_subsets(std::uint64_t(1) << n, "partial automorphisms");
        std::vector<PartialMap> out;
        for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << n); ++mask) {
            VertexSet dom;
            for (int v = 0; v < n; ++v)
                if (mask >> v & 1)
                    dom.push_back(v);
            if (! is_closed(s, dom))
                continue;
            for (auto & e : enumerate_embeddings(restrict_to(s, dom), s)) {
                PartialMap p(n, -1);
                for (std::size_t i = 0; i < dom.size(); ++i)
                    p[dom[i]] = e[i];
                out.push_back(std::move(p));
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    // Index triples (f, g, h) with range f = domain g and h = g o f.
    inline auto coherent_triples(const std::vector<PartialMap> & maps) -> std::vector<std::array<int, 3>>
    {
        std::map<PartialMap, int> index;
        for (int i = 0; i < int(maps.size()); ++i)
            index.emplace(maps[i], i);
        std::vector<VertexSet> dom, ran;
        for (auto & m : maps) {
            dom.push_back(partial_domain(m));
            ran.push_back(partial_range(m));
        }
        std::vector<std::array<int, 3>> out;
        for (int f = 0; f < int(maps.size()); ++f)
            for (int g = 0; g < int(maps.size()); ++g)
                if (ran[f] == dom[g]) {
                    auto it = index.find(compose_partial(maps[g], maps[f]));
                    if (it != index.end())
                        out.push_back({f, g, it->second});
                }
        return out;
    }

    // Picks an extending automorphism for every partial map so that every
    // coherent triple goes to a composing triple. Backtracking.
    inline auto coherent_extension_map(const std::vector<PartialMap> & maps, const std::vector<VertexMap> & autos,
        BudgetMeter * meter = nullptr) -> std::optional<std::vector<int>>
    {
        int m = int(maps.size());
        std::vector<std::vector<int>> candidates(m);
        for (int i = 0; i < m; ++i) {
            for (int g = 0; g < int(autos.size()); ++g)
                if (extends(autos[g], maps[i]))
                    candidates[i].push_back(g);
            if (candidates[i].empty())
                return std::nullopt;
        }
        std::vector<std::vector<std::array<int, 3>>> closing(m);
        for (auto & t : coherent_triples(maps))
            closing[std::max({t[0], t[1], t[2]})].push_back(t);

        std::vector<int> chosen(m, -1);
        auto search = [&](auto & self, int i) -> bool {
            if (i == m)
                return true;
            for (auto g : candidates[i]) {
                if (meter)
                    meter->count_subsets(1, "coherent extension map");
                chosen[i] = g;
                bool ok = true;
                for (auto & t : closing[i])
                    if (compose(autos[chosen[t[1]]], autos[chosen[t[0]]]) != autos[chosen[t[2]]]) {
                        ok = false;
                        break;
                    }
                if (ok && self(self, i + 1))
                    return true;
            }
            chosen[i] = -1;
            return false;
        };
        if (! search(search, 0))
            return std::nullopt;
        return chosen;
    }

    // A relational extension of A- in which every partial isomorphism of A-
    // extends to an automorphism.
    struct EppaBase
    {
        Structure structure;
        VertexMap embedding; // vertex of A- -> vertex of the base
        std::vector<VertexMap> automorphisms;
        std::size_t candidates_tried = 0;
    };

    namespace detail
    {
        inline auto transport(const PartialMap & p, const VertexMap & embedding, int target_size) -> PartialMap
        {
            PartialMap out(target_size, -1);
            for (int v = 0; v < int(p.size()); ++v)
                if (p[v] >= 0)
                    out[embedding[v]] = embedding[p[v]];
            return out;
        }

        inline auto first_unextended(const std::vector<PartialMap> & partials, const VertexMap & embedding,
            const Structure & base, const std::vector<VertexMap> & autos) -> std::optional<PartialMap>
        {
            for (auto & p : partials) {
                auto q = transport(p, embedding, base.size());
                if (std::none_of(autos.begin(), autos.end(), [&](const VertexMap & g) { return extends(g, q); }))
                    return p;
            }
            return std::nullopt;
        }
    }

    // Certifies a supplied base and prunes it to the automorphism orbit of
    // the embedded copy. Throws invalid_argument naming the first failure.
    inline auto make_eppa_base(const Structure & a_minus, const Structure & base, const VertexMap & embedding,
        BudgetMeter * meter = nullptr) -> EppaBase
    {
        if (! same_signature(a_minus.language, base.language))
            throw std::invalid_argument("eppa base: language differs from the reduct");
        if (check_map(a_minus, base, embedding) != MapKind::embedding)
            throw std::invalid_argument("eppa base: the reduct does not embed as given");
        auto autos = automorphisms(base);
        std::set<Vertex> orbit;
        for (auto & g : autos)
            for (auto v : embedding)
                orbit.insert(g[v]);
        EppaBase out;
        if (int(orbit.size()) < base.size()) {
            VertexSet keep(orbit.begin(), orbit.end());
            out.structure = restrict_to(base, keep);
            for (auto v : embedding)
                out.embedding.push_back(int(std::lower_bound(keep.begin(), keep.end(), v) - keep.begin()));
            out.automorphisms = automorphisms(out.structure);
        }
        else {
            out.structure = base;
            out.embedding = embedding;
            out.automorphisms = std::move(autos);
        }
        auto partials = partial_automorphisms(a_minus, meter);
        if (auto bad = detail::first_unextended(partials, out.embedding, out.structure, out.automorphisms)) {
            std::string text;
            for (int v = 0; v < int(bad->size()); ++v)
                if ((*bad)[v] >= 0)
                    text += " " + a_minus.names[v] + "->" + a_minus.names[(*bad)[v]];
            throw std::invalid_argument("eppa base: partial isomorphism" + text + " does not extend");
        }
        return out;
    }

    // Smallest base found by trying every set of extra tuples on |A-|, |A-|+1,
    // ... vertices, the reduct sitting on the first vertices.
    inline auto base_eppa_bruteforce(const Structure & a_minus, BudgetMeter & meter, int max_vertices = 6) -> EppaBase
    {
        if (! a_minus.language.functions.empty() || a_minus.ordered())
            throw std::invalid_argument("eppa base search: needs an unordered relational structure");
        auto partials = partial_automorphisms(a_minus, &meter);
        int k = a_minus.size();
        std::size_t tried = 0;
        VertexMap identity(k);
        for (int v = 0; v < k; ++v)
            identity[v] = v;
        for (int n = k; n <= max_vertices; ++n) {
            Structure seed = a_minus;
            for (int i = 1; seed.size() < n; ++i) {
                std::string name = "x" + std::to_string(i);
                while (seed.vertex(name))
                    name += "'";
                seed.add_vertex(name);
            }
            std::vector<std::pair<int, Tuple>> free;
            for (int r = 0; r < int(seed.relations.size()); ++r)
                for (auto & t : all_tuples(n, seed.language.relations[r].arity))
                    if (std::any_of(t.begin(), t.end(), [&](Vertex v) { return v >= k; }))
                        free.push_back({r, t});
            if (free.size() > 40)
                throw BudgetExceeded("eppa base search: too many candidate tuples");
            for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << free.size()); ++mask) {
                meter.count_subsets(1, "eppa base search");
                ++tried;
                Structure cand = seed;
                for (std::size_t i = 0; i < free.size(); ++i)
                    if (mask >> i & 1)
                        cand.add_tuple(free[i].first, free[i].second);
                auto autos = automorphisms(cand);
                if (detail::first_unextended(partials, identity, cand, autos))
                    continue;
                auto out = make_eppa_base(a_minus, cand, identity, &meter);
                out.candidates_tried = tried;
                return out;
            }
        }
        throw BudgetExceeded("eppa base search: nothing found up to " + std::to_string(max_vertices) + " vertices");
    }

    // Subsets of the base that no automorphism moves into the copy of A.
    class BigSets
    {
    public:
        std::vector<VertexSet> sets; // sorted by size, then lexicographically

        auto size() const -> int { return int(sets.size()); }

        auto contains(int s, Vertex v) const -> bool { return _masks[s] >> v & 1; }

        auto index(const VertexSet & set) const -> int
        {
            auto it = _index.find(mask_of(set));
            return it == _index.end() ? -1 : it->second;
        }

        // Index of g(S); big sets are invariant under automorphisms.
        auto image(const VertexMap & g, int s) const -> int
        {
            VertexSet out;
            for (auto v : sets[s])
                out.push_back(g[v]);
            int i = index(make_set(out));
            if (i < 0)
                throw std::logic_error("big sets: family not invariant");
            return i;
        }

        auto add(VertexSet set) -> void
        {
            _masks.push_back(mask_of(set));
            sets.push_back(std::move(set));
        }

        auto finish() -> void
        {
            std::vector<int> order(sets.size());
            for (int i = 0; i < int(order.size()); ++i)
                order[i] = i;
            std::sort(order.begin(), order.end(),
                [&](int x, int y) { return detail::by_size_then_lex(sets[x], sets[y]); });
            std::vector<VertexSet> sorted;
            _masks.clear();
            _index.clear();
            for (auto i : order)
                sorted.push_back(std::move(sets[i]));
            sets = std::move(sorted);
            for (int i = 0; i < int(sets.size()); ++i) {
                _masks.push_back(mask_of(sets[i]));
                _index.emplace(_masks.back(), i);
            }
        }

    private:
        std::vector<std::uint32_t> _masks;
        std::map<std::uint32_t, int> _index;

        static auto mask_of(const VertexSet & set) -> std::uint32_t
        {
            std::uint32_t m = 0;
            for (auto v : set)
                m |= std::uint32_t(1) << v;
            return m;
        }
    };

    // A set is small when it lies inside the preimage of the copy of A under
    // some automorphism.
    inline auto big_sets(const EppaBase & base, BudgetMeter * meter = nullptr) -> BigSets
    {
        int n = base.structure.size();
        if (n > 20)
            throw BudgetExceeded("big sets: too many vertices");
        if (meter)
            meter->count_subsets(std::uint64_t(1) << n, "big sets");
        std::set<std::uint32_t> preimages;
        for (auto & g : base.automorphisms) {
            auto inverse = inverse_permutation(g);
            std::uint32_t m = 0;
            for (auto v : base.embedding)
                m |= std::uint32_t(1) << inverse[v];
            preimages.insert(m);
        }
        BigSets out;
        for (std::uint32_t mask = 1; mask < (std::uint32_t(1) << n); ++mask) {
            bool small = std::any_of(preimages.begin(), preimages.end(), [&](std::uint32_t t) { return (mask & ~t) == 0; });
            if (small)
                continue;
            VertexSet set;
            for (int v = 0; v < n; ++v)
                if (mask >> v & 1)
                    set.push_back(v);
            out.add(std::move(set));
        }
        out.finish();
        return out;
    }

    // A base vertex with its valuation function, one value per big set.
    struct ValuedVertex
    {
        Vertex vertex = 0;
        std::vector<int> chi;

        auto operator<=>(const ValuedVertex &) const = default;
    };

    inline auto is_valuation_function(const BigSets & big, const ValuedVertex & p) -> bool
    {
        if (int(p.chi.size()) != big.size())
            return false;
        for (int s = 0; s < big.size(); ++s) {
            if (! big.contains(s, p.vertex) ? p.chi[s] != 0
                                            : p.chi[s] < 1 || p.chi[s] >= int(big.sets[s].size()))
                return false;
        }
        return true;
    }

    inline auto generic_pair(const BigSets & big, const ValuedVertex & p, const ValuedVertex & q) -> bool
    {
        if (p == q)
            return true;
        if (p.vertex == q.vertex)
            return false;
        for (int s = 0; s < big.size(); ++s)
            if (big.contains(s, p.vertex) && big.contains(s, q.vertex) && p.chi[s] == q.chi[s])
                return false;
        return true;
    }

    // One vertex of the extension: a closure of A pulled back to the base
    // through an automorphism, every vertex carrying its valuation function.
    struct Valuation
    {
        Vertex base = 0;
        std::vector<ValuedVertex> members; // sorted by base vertex
        Structure structure;               // on members, in the same order

        auto member(Vertex v) const -> int
        {
            for (int i = 0; i < int(members.size()); ++i)
                if (members[i].vertex == v)
                    return i;
            return -1;
        }

        auto operator<(const Valuation & o) const -> bool
        {
            return std::tie(base, members, structure.relations, structure.functions) <
                std::tie(o.base, o.members, o.structure.relations, o.structure.functions);
        }

        auto operator==(const Valuation & o) const -> bool
        {
            return base == o.base && members == o.members && structure.relations == o.structure.relations &&
                structure.functions == o.structure.functions;
        }
    };

    struct EppaExtension
    {
        Structure a;
        RelationalReduct reduct;
        EppaBase base;
        BigSets big;
        std::vector<Valuation> valuations; // vertex i of c
        Structure c;
        VertexMap phi; // vertex of A -> vertex of c
        std::map<Valuation, Vertex> lookup;
        std::vector<std::vector<char>> generic; // pairwise genericity of valuations

        auto base_of_a(Vertex v) const -> Vertex { return base.embedding[v]; }
    };

    namespace detail
    {
        // Pulls the closure of a in A back along an automorphism alpha of the
        // base with alpha(b) = embedding(a); chi per pulled back vertex.
        inline auto pull_back(const Structure & a, const EppaBase & base, const VertexMap & alpha, Vertex b, Vertex a_vertex)
            -> std::pair<VertexSet, Structure>
        {
            auto inverse = inverse_permutation(alpha);
            auto cl = closure_set(a, {a_vertex});
            std::map<Vertex, Vertex> to_base;
            for (auto w : cl)
                to_base[w] = inverse[base.embedding[w]];
            VertexSet members;
            for (auto & [w, u] : to_base)
                members.push_back(u);
            members = make_set(members);
            if (! std::binary_search(members.begin(), members.end(), b))
                throw std::logic_error("valuation: base vertex outside its closure");
            auto position = [&](Vertex w) {
                return Vertex(std::lower_bound(members.begin(), members.end(), to_base.at(w)) - members.begin());
            };
            Structure st(a.language);
            for (auto u : members)
                st.add_vertex(base.structure.names[u]);
            for (int r = 0; r < int(a.relations.size()); ++r)
                for (auto & t : a.relations[r])
                    if (std::all_of(t.begin(), t.end(), [&](Vertex w) { return to_base.count(w); })) {
                        Tuple m;
                        for (auto w : t)
                            m.push_back(position(w));
                        st.add_tuple(r, m);
                    }
            for (int f = 0; f < int(a.functions.size()); ++f)
                for (auto & [d, img] : a.functions[f])
                    if (to_base.count(d[0])) {
                        Tuple m;
                        for (auto w : img)
                            m.push_back(position(w));
                        st.set_function(f, {position(d[0])}, m);
                    }
            return {members, st};
        }

        inline auto closure_part(const Valuation & v, int member)
            -> std::tuple<std::vector<ValuedVertex>, std::vector<std::set<Tuple>>, std::vector<std::map<Tuple, Tuple>>>
        {
            auto cl = closure_set(v.structure, {member});
            std::vector<ValuedVertex> ms;
            for (auto i : cl)
                ms.push_back(v.members[i]);
            auto sub = restrict_to(v.structure, cl);
            return {ms, sub.relations, sub.functions};
        }

        inline auto valuation_name(const Structure & base, const BigSets & big, const Valuation & v) -> std::string
        {
            std::string out = base.names[v.base] + "{";
            for (std::size_t i = 0; i < v.members.size(); ++i) {
                if (i)
                    out += ",";
                out += base.names[v.members[i].vertex];
                std::string values;
                for (int s = 0; s < big.size(); ++s)
                    if (big.contains(s, v.members[i].vertex))
                        values += (values.empty() ? "=" : ".") + std::to_string(v.members[i].chi[s]);
                out += values;
            }
            return out + "}";
        }
    }

    inline auto generic_valuations(const EppaExtension & x, const Valuation & p, const Valuation & q) -> bool
    {
        for (auto & u : p.members)
            for (auto & v : q.members)
                if (! generic_pair(x.big, u, v))
                    return false;
        for (auto rel : x.reduct.function_relation)
            for (auto & u : p.members)
                for (auto & v : q.members) {
                    if (x.base.structure.has_tuple(rel, {u.vertex, v.vertex})) {
                        int i = p.member(v.vertex);
                        if (i < 0 || p.members[i] != v)
                            return false;
                    }
                    if (x.base.structure.has_tuple(rel, {v.vertex, u.vertex})) {
                        int i = q.member(u.vertex);
                        if (i < 0 || q.members[i] != u)
                            return false;
                    }
                }
        for (int i = 0; i < int(p.members.size()); ++i) {
            int j = q.member(p.members[i].vertex);
            if (j >= 0 && q.members[j] == p.members[i] && detail::closure_part(p, i) != detail::closure_part(q, j))
                return false;
        }
        return true;
    }

    inline auto generic_set(const EppaExtension & x, const VertexSet & vs) -> bool
    {
        for (auto u : vs)
            for (auto v : vs)
                if (! x.generic[u][v])
                    return false;
        return true;
    }

    // The valuation with base a in A, every member of Cl(a) valued by ranking
    // A inside each big set from 1.
    inline auto canonical_valuation(const EppaExtension & x, Vertex a_vertex) -> Valuation
    {
        VertexMap identity(x.base.structure.size());
        for (int v = 0; v < int(identity.size()); ++v)
            identity[v] = v;
        Vertex b = x.base_of_a(a_vertex);
        auto [members, st] = detail::pull_back(x.a, x.base, identity, b, a_vertex);
        VertexSet a_image = make_set(x.base.embedding);
        Valuation v;
        v.base = b;
        v.structure = std::move(st);
        for (auto u : members) {
            ValuedVertex p{u, std::vector<int>(x.big.size(), 0)};
            for (int s = 0; s < x.big.size(); ++s)
                if (x.big.contains(s, u)) {
                    int rank = 1;
                    for (auto w : a_image)
                        if (w < u && x.big.contains(s, w))
                            ++rank;
                    p.chi[s] = rank;
                }
            v.members.push_back(std::move(p));
        }
        return v;
    }

    // Builds C from A and a certified base. Throws logic_error when a
    // function of C would not be well defined or phi fails its checks.
    inline auto build_eppa_extension(const Structure & a, const EppaBase & base, BudgetMeter * meter = nullptr)
        -> EppaExtension
    {
        EppaExtension x;
        x.a = a;
        x.reduct = relational_reduct(a);
        if (! same_signature(x.reduct.reduct.language, base.structure.language) ||
            int(base.embedding.size()) != a.size())
            throw std::invalid_argument("eppa extension: base does not match the reduct");
        x.base = base;
        x.big = big_sets(x.base, meter);
        int n = x.base.structure.size();
        std::vector<Vertex> a_of_base(n, -1);
        for (int v = 0; v < a.size(); ++v)
            a_of_base[x.base.embedding[v]] = v;

        std::set<Valuation> all;
        for (Vertex b = 0; b < n; ++b)
            for (auto & alpha : x.base.automorphisms) {
                Vertex av = a_of_base[alpha[b]];
                if (av < 0)
                    continue;
                auto [members, st] = detail::pull_back(a, x.base, alpha, b, av);
                // Injective labels 1..|S|-1 on the members inside each big set.
                std::vector<std::pair<int, std::vector<int>>> slots;
                for (int s = 0; s < x.big.size(); ++s) {
                    std::vector<int> inside;
                    for (int i = 0; i < int(members.size()); ++i)
                        if (x.big.contains(s, members[i]))
                            inside.push_back(i);
                    if (! inside.empty())
                        slots.push_back({s, inside});
                }
                std::vector<std::vector<int>> chi(members.size(), std::vector<int>(x.big.size(), 0));
                auto fill = [&](auto & self, std::size_t slot, std::size_t pos) -> void {
                    if (slot == slots.size()) {
                        if (meter)
                            meter->count_subsets(1, "valuations");
                        Valuation v;
                        v.base = b;
                        v.structure = st;
                        for (std::size_t i = 0; i < members.size(); ++i)
                            v.members.push_back({members[i], chi[i]});
                        all.insert(std::move(v));
                        return;
                    }
                    auto & [s, inside] = slots[slot];
                    if (pos == inside.size())
                        return self(self, slot + 1, 0);
                    int limit = int(x.big.sets[s].size());
                    for (int value = 1; value < limit; ++value) {
                        bool used = false;
                        for (std::size_t k = 0; k < pos; ++k)
                            used = used || chi[inside[k]][s] == value;
                        if (used)
                            continue;
                        chi[inside[pos]][s] = value;
                        self(self, slot, pos + 1);
                        chi[inside[pos]][s] = 0;
                    }
                };
                fill(fill, 0, 0);
            }
        if (meter)
            meter->check_vertices(all.size(), "eppa extension");
        x.valuations.assign(all.begin(), all.end());
        int m = int(x.valuations.size());
        for (int i = 0; i < m; ++i)
            x.lookup.emplace(x.valuations[i], i);
        x.generic.assign(m, std::vector<char>(m, 0));
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j)
                x.generic[i][j] = x.generic[j][i] = generic_valuations(x, x.valuations[i], x.valuations[j]);

        x.c = Structure(a.language);
        std::map<std::string, int> used;
        for (auto & v : x.valuations) {
            auto name = detail::valuation_name(x.base.structure, x.big, v);
            if (int k = used[name]++)
                name += "~" + std::to_string(k);
            x.c.add_vertex(name);
        }
        std::vector<std::vector<Vertex>> by_base(n);
        for (int i = 0; i < m; ++i)
            by_base[x.valuations[i].base].push_back(i);

        for (int r = 0; r < int(a.relations.size()); ++r)
            for (auto & t : x.base.structure.relations[r]) {
                Tuple pick(t.size());
                auto choose = [&](auto & self, std::size_t pos) -> void {
                    if (pos == t.size()) {
                        x.c.add_tuple(r, pick);
                        return;
                    }
                    for (auto v : by_base[t[pos]]) {
                        bool ok = true;
                        for (std::size_t k = 0; k < pos && ok; ++k)
                            ok = x.generic[pick[k]][v];
                        if (! ok)
                            continue;
                        pick[pos] = v;
                        self(self, pos + 1);
                    }
                };
                choose(choose, 0);
            }

        for (int f = 0; f < int(a.functions.size()); ++f) {
            int rel = x.reduct.function_relation[f];
            int arity = a.language.functions[f].range_arity;
            for (int i = 0; i < m; ++i) {
                std::vector<Vertex> cands;
                for (int j = 0; j < m; ++j)
                    if (x.generic[i][j] && x.base.structure.has_tuple(rel, {x.valuations[i].base, x.valuations[j].base}))
                        cands.push_back(j);
                std::vector<Tuple> images;
                Tuple pick;
                auto choose = [&](auto & self, std::size_t from) -> void {
                    if (int(pick.size()) == arity) {
                        images.push_back(pick);
                        return;
                    }
                    for (std::size_t k = from; k < cands.size(); ++k) {
                        bool ok = true;
                        for (auto w : pick)
                            ok = ok && x.generic[w][cands[k]];
                        if (! ok)
                            continue;
                        pick.push_back(cands[k]);
                        self(self, k + 1);
                        pick.pop_back();
                    }
                };
                choose(choose, 0);
                if (images.size() > 1)
                    throw std::logic_error("eppa extension: " + a.language.functions[f].name + " not well defined at " +
                        x.c.names[i]);
                if (images.size() == 1)
                    x.c.set_function(f, {i}, images[0]);
            }
        }

        for (int v = 0; v < a.size(); ++v) {
            auto it = x.lookup.find(canonical_valuation(x, v));
            if (it == x.lookup.end())
                throw std::logic_error("eppa extension: canonical valuation missing");
            x.phi.push_back(it->second);
        }
        if (check_map(a, x.c, x.phi) != MapKind::embedding)
            throw std::logic_error("eppa extension: phi is not an embedding");
        if (! generic_set(x, make_set(x.phi)))
            throw std::logic_error("eppa extension: phi(A) is not generic");
        return x;
    }

    // Extends a partial automorphism p of C, compatible with the base
    // automorphism g and with generic domain and range, to an automorphism:
    // per big set the induced partial permutation of labels is completed
    // order-preservingly, then every valued vertex is moved by g and the
    // labels. Throws invalid_argument when the hypotheses fail and
    // logic_error when the result is not a certified automorphism.
    inline auto extend_partial(const EppaExtension & x, const PartialMap & p, const VertexMap & g) -> VertexMap
    {
        int m = x.c.size();
        if (int(p.size()) != m || int(g.size()) != x.base.structure.size())
            throw std::invalid_argument("extend partial: size mismatch");
        auto dom = partial_domain(p);
        auto ran = partial_range(p);
        if (dom.size() != ran.size())
            throw std::invalid_argument("extend partial: map is not injective");
        if (! generic_set(x, dom) || ! generic_set(x, ran))
            throw std::invalid_argument("extend partial: domain or range is not generic");

        std::map<ValuedVertex, ValuedVertex> q;
        for (auto v : dom) {
            auto & from = x.valuations[v];
            auto & to = x.valuations[p[v]];
            if (to.base != g[from.base] || to.members.size() != from.members.size())
                throw std::invalid_argument("extend partial: not compatible with the base automorphism");
            VertexMap local(from.members.size());
            for (std::size_t i = 0; i < from.members.size(); ++i) {
                int j = to.member(g[from.members[i].vertex]);
                if (j < 0)
                    throw std::invalid_argument("extend partial: not compatible with the base automorphism");
                local[i] = j;
                auto [it, fresh] = q.emplace(from.members[i], to.members[j]);
                if (! fresh && it->second != to.members[j])
                    throw std::invalid_argument("extend partial: valued vertices mapped inconsistently");
            }
            if (check_map(from.structure, to.structure, local) != MapKind::embedding)
                throw std::invalid_argument("extend partial: valuations are not isomorphic");
        }

        int sets = x.big.size();
        std::vector<int> set_image(sets);
        for (int s = 0; s < sets; ++s)
            set_image[s] = x.big.image(g, s);
        std::vector<std::vector<int>> theta(sets);
        for (int s = 0; s < sets; ++s) {
            int size = int(x.big.sets[s].size());
            std::vector<int> forward(size, -1), backward(size, -1);
            forward[0] = backward[0] = 0;
            for (auto & [from, to] : q) {
                int a = from.chi[s], b = to.chi[set_image[s]];
                if ((forward[a] >= 0 && forward[a] != b) || (backward[b] >= 0 && backward[b] != a))
                    throw std::invalid_argument("extend partial: labels do not form a partial permutation");
                forward[a] = b;
                backward[b] = a;
            }
            std::vector<int> free_from, free_to;
            for (int i = 1; i < size; ++i) {
                if (forward[i] < 0)
                    free_from.push_back(i);
                if (backward[i] < 0)
                    free_to.push_back(i);
            }
            for (std::size_t i = 0; i < free_from.size(); ++i)
                forward[free_from[i]] = free_to[i];
            theta[s] = std::move(forward);
        }

        auto move = [&](const ValuedVertex & u) {
            ValuedVertex out{g[u.vertex], std::vector<int>(sets, 0)};
            for (int s = 0; s < sets; ++s)
                out.chi[set_image[s]] = theta[s][u.chi[s]];
            return out;
        };

        VertexMap result(m);
        for (int i = 0; i < m; ++i) {
            auto & v = x.valuations[i];
            Valuation w;
            w.base = g[v.base];
            std::vector<std::pair<ValuedVertex, int>> moved;
            for (int k = 0; k < int(v.members.size()); ++k)
                moved.push_back({move(v.members[k]), k});
            std::sort(moved.begin(), moved.end());
            VertexMap local(moved.size());
            std::vector<std::string> names;
            for (int k = 0; k < int(moved.size()); ++k) {
                w.members.push_back(moved[k].first);
                local[moved[k].second] = k;
            }
            for (auto & mv : w.members)
                names.push_back(x.base.structure.names[mv.vertex]);
            w.structure = relabel(v.structure, local, names);
            auto it = x.lookup.find(w);
            if (it == x.lookup.end())
                throw std::logic_error("extend partial: image of " + x.c.names[i] + " is not a vertex");
            result[i] = it->second;
        }
        if (! extends(result, p))
            throw std::logic_error("extend partial: result does not extend the partial map");
        if (check_map(x.c, x.c, result) != MapKind::embedding)
            throw std::logic_error("extend partial: result is not an automorphism");
        return result;
    }

    struct FaithfulReport
    {
        std::size_t irreducibles = 0;
        std::size_t mapped = 0;
        bool complete = true;
        std::vector<std::string> failures;
    };

    // Every irreducible substructure of C (up to the cap) is moved into
    // phi(A) by an automorphism obtained through extend_partial.
    inline auto certify_faithful(const EppaExtension & x, int max_size = -1, BudgetMeter * meter = nullptr)
        -> FaithfulReport
    {
        FaithfulReport out;
        auto sweep = irreducible_substructures(x.c, max_size, meter);
        out.complete = sweep.complete;
        VertexSet image = make_set(x.phi);
        std::vector<Vertex> a_of_base(x.base.structure.size(), -1);
        for (int v = 0; v < x.a.size(); ++v)
            a_of_base[x.base.embedding[v]] = v;
        for (auto & d : sweep.sets) {
            ++out.irreducibles;
            auto where = vertex_names(x.c, d);
            if (std::includes(image.begin(), image.end(), d.begin(), d.end())) {
                ++out.mapped;
                continue;
            }
            if (! generic_set(x, d)) {
                out.failures.push_back("irreducible " + where + " is not generic");
                continue;
            }
            bool done = false;
            for (auto & g : x.base.automorphisms) {
                PartialMap p(x.c.size(), -1);
                bool inside = true;
                for (auto v : d) {
                    Vertex t = a_of_base[g[x.valuations[v].base]];
                    if (t < 0) {
                        inside = false;
                        break;
                    }
                    p[v] = x.phi[t];
                }
                if (! inside || ! is_partial_automorphism(x.c, p))
                    continue;
                try {
                    auto hat = extend_partial(x, p, g);
                    done = std::all_of(d.begin(), d.end(), [&](Vertex v) {
                        return std::binary_search(image.begin(), image.end(), hat[v]);
                    });
                }
                catch (const std::invalid_argument &) {
                }
                catch (const std::logic_error & e) {
                    out.failures.push_back(std::string(e.what()));
                }
                if (done)
                    break;
            }
            if (done)
                ++out.mapped;
            else
                out.failures.push_back("irreducible " + where + " is not moved into phi(A)");
        }
        return out;
    }

    struct EppaCertificate
    {
        bool phi_embedding = false;
        bool phi_generic = false;
        std::size_t partial_automorphisms = 0;
        std::size_t extended = 0;
        bool coherent_base = false;
        std::size_t coherent_triples = 0;
        std::size_t coherent_lifted = 0;
        FaithfulReport faithful;
        std::vector<std::string> failures;

        auto ok() const -> bool { return failures.empty() && faithful.failures.empty(); }
    };

    // Exhaustive certificate: every partial automorphism of phi(A) extends,
    // the extensions compose along every coherent triple, and irreducible
    // substructures are faithful.
    inline auto certify_eppa(const EppaExtension & x, int irreducible_cap = -1, BudgetMeter * meter = nullptr)
        -> EppaCertificate
    {
        EppaCertificate out;
        out.phi_embedding = check_map(x.a, x.c, x.phi) == MapKind::embedding;
        out.phi_generic = generic_set(x, make_set(x.phi));
        if (! out.phi_embedding)
            out.failures.push_back("phi is not an embedding");
        if (! out.phi_generic)
            out.failures.push_back("phi(A) is not generic");

        auto partials = partial_automorphisms(x.a, meter);
        out.partial_automorphisms = partials.size();
        std::vector<PartialMap> on_base;
        for (auto & p : partials)
            on_base.push_back(detail::transport(p, x.base.embedding, x.base.structure.size()));
        auto choice = coherent_extension_map(on_base, x.base.automorphisms, meter);
        out.coherent_base = choice.has_value();
        if (! choice) {
            out.failures.push_back("no coherent choice of base automorphisms");
            return out;
        }

        std::vector<std::optional<VertexMap>> lifted(partials.size());
        for (std::size_t i = 0; i < partials.size(); ++i) {
            PartialMap on_c(x.c.size(), -1);
            for (int v = 0; v < x.a.size(); ++v)
                if (partials[i][v] >= 0)
                    on_c[x.phi[v]] = x.phi[partials[i][v]];
            try {
                lifted[i] = extend_partial(x, on_c, x.base.automorphisms[(*choice)[i]]);
                ++out.extended;
            }
            catch (const std::exception & e) {
                out.failures.push_back(std::string("partial automorphism not extended: ") + e.what());
            }
        }
        for (auto & t : coherent_triples(partials)) {
            ++out.coherent_triples;
            if (lifted[t[0]] && lifted[t[1]] && lifted[t[2]] && compose(*lifted[t[1]], *lifted[t[0]]) == *lifted[t[2]])
                ++out.coherent_lifted;
            else
                out.failures.push_back("coherent triple does not lift compositionally");
        }
        out.faithful = certify_faithful(x, irreducible_cap, meter);
        return out;
    }
}
