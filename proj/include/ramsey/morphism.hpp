#pragma once

#include <ramsey/budget.hpp>
#include <ramsey/structure.hpp>

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ramsey
{
    enum class MapKind
    {
        none,
        homomorphism,
        monomorphism,
        embedding
    };

    inline auto to_string(MapKind k) -> std::string
    {
        switch (k) {
        case MapKind::none: return "none";
        case MapKind::homomorphism: return "homomorphism";
        case MapKind::monomorphism: return "monomorphism";
        case MapKind::embedding: return "embedding";
        }
        return "none";
    }

    inline auto same_signature(const Language & a, const Language & b) -> bool
    {
        return a.relations == b.relations && a.functions == b.functions && a.ordered == b.ordered;
    }

    namespace detail
    {
        inline auto apply(const VertexMap & f, const Tuple & t) -> Tuple
        {
            Tuple r(t.size());
            for (std::size_t i = 0; i < t.size(); ++i)
                r[i] = f[t[i]];
            return r;
        }

        inline auto image_matches(const FunctionSymbol & sym, const VertexMap & f, const Tuple & source_image,
            const Tuple & target_image) -> bool
        {
            auto m = apply(f, source_image);
            if (! sym.ordered_image)
                std::sort(m.begin(), m.end());
            return m == target_image;
        }
    }

    // Classifies a vertex map by checking the definitions clause by clause.
    inline auto check_map(const Structure & a, const Structure & b, const VertexMap & f) -> MapKind
    {
        if (! same_signature(a.language, b.language) || int(f.size()) != a.size())
            return MapKind::none;
        for (auto w : f)
            if (w < 0 || w >= b.size())
                return MapKind::none;

        for (int r = 0; r < int(a.relations.size()); ++r)
            for (auto & t : a.relations[r])
                if (! b.has_tuple(r, detail::apply(f, t)))
                    return MapKind::none;
        for (int fn = 0; fn < int(a.functions.size()); ++fn)
            for (auto & [d, img] : a.functions[fn]) {
                auto target = b.image(fn, detail::apply(f, d));
                if (! target || ! detail::image_matches(a.language.functions[fn], f, img, *target))
                    return MapKind::none;
            }
        if (a.ordered())
            for (int u = 0; u < a.size(); ++u)
                for (int v = 0; v < a.size(); ++v)
                    if (a.less(u, v) && ! b.less(f[u], f[v]))
                        return MapKind::none;

        std::vector<int> inverse(b.size(), -1);
        for (int v = 0; v < a.size(); ++v) {
            if (inverse[f[v]] != -1)
                return MapKind::homomorphism;
            inverse[f[v]] = v;
        }

        auto preimage = [&](const Tuple & t, Tuple & out) {
            out.clear();
            for (auto w : t) {
                if (inverse[w] < 0)
                    return false;
                out.push_back(inverse[w]);
            }
            return true;
        };
        Tuple buf;
        for (int r = 0; r < int(b.relations.size()); ++r)
            for (auto & t : b.relations[r])
                if (preimage(t, buf) && ! a.has_tuple(r, buf))
                    return MapKind::monomorphism;
        for (int fn = 0; fn < int(b.functions.size()); ++fn)
            for (auto & [d, img] : b.functions[fn])
                if (preimage(d, buf) && ! a.image(fn, buf))
                    return MapKind::monomorphism;
        return MapKind::embedding;
    }

    inline auto at_least(MapKind have, MapKind want) -> bool { return int(have) >= int(want); }

    struct SearchOptions
    {
        MapKind kind = MapKind::embedding;
        // Per source vertex: a fixed target, or -1.
        std::vector<Vertex> pinned;
        // Per source vertex: candidate targets used when no tuple constrains
        // the vertex (nullptr = every target vertex).
        std::vector<const std::vector<Vertex> *> domains;
        // Extra acceptance test applied to every tentative assignment.
        std::function<bool(Vertex, Vertex)> allow;
        BudgetMeter * meter = nullptr;
    };

    // Backtracking search for maps of one source structure into one target.
    // The target is indexed once so that candidates are generated from tuples
    // containing already assigned vertices. Scratch space sized by the target
    // is reused between runs, so a Matcher must not be run re-entrantly or
    // from several threads at once.
    class Matcher
    {
    public:
        Matcher(const Structure & source, const Structure & target) :
            _a(source),
            _b(target)
        {
            if (! same_signature(source.language, target.language))
                throw std::invalid_argument("source and target languages differ");
            index_target();
            reset_scratch();
        }

        auto source() const -> const Structure & { return _a; }
        auto target() const -> const Structure & { return _b; }

        // Calls visit(map) for every map of the requested kind until visit returns false.
        template <typename Visit>
        auto run(const SearchOptions & options, Visit && visit) const -> void
        {
            Plan plan = make_plan(options);
            State & st = _scratch;
            st.map.assign(_a.size(), -1);
            if (_a.size() == 0) {
                visit(static_cast<const VertexMap &>(st.map));
                return;
            }
            try {
                extend(plan, options, st, 0, visit);
            }
            catch (...) {
                reset_scratch();
                throw;
            }
        }

        auto all(const SearchOptions & options = {}) const -> std::vector<VertexMap>
        {
            std::vector<VertexMap> out;
            run(options, [&](const VertexMap & m) {
                out.push_back(m);
                return true;
            });
            std::sort(out.begin(), out.end());
            return out;
        }

        auto first(const SearchOptions & options = {}) const -> std::optional<VertexMap>
        {
            std::optional<VertexMap> out;
            run(options, [&](const VertexMap & m) {
                out = m;
                return false;
            });
            return out;
        }

    private:
        struct Check
        {
            enum Kind
            {
                relation,
                domain,
                image
            } kind;
            int symbol;
            const Tuple * tuple;
            const Tuple * image_tuple;
        };

        struct Generator
        {
            enum Kind
            {
                none,
                image_of,     // v lies in the image of an entry whose domain is assigned
                relation_pos, // v at position i of a relation tuple with an assigned vertex at position j
                domain_pos,   // v at domain position i of an entry with assigned domain position j
                image_member  // v at domain position i of an entry with assigned image member
            } kind = none;
            int symbol = -1;
            const Tuple * tuple = nullptr;
            int i = -1, j = -1;
            Vertex anchor = -1;
        };

        struct Plan
        {
            std::vector<Vertex> sequence;
            std::vector<std::vector<Check>> checks;
            std::vector<Generator> generators;
        };

        struct State
        {
            VertexMap map;
            std::vector<char> used;
            std::vector<int> inverse_count;
            std::vector<Vertex> inverse_of; // meaningful where inverse_count > 0, injective kinds only
        };

        const Structure & _a;
        const Structure & _b;
        mutable State _scratch;

        auto reset_scratch() const -> void
        {
            _scratch.used.assign(_b.size(), 0);
            _scratch.inverse_count.assign(_b.size(), 0);
            _scratch.inverse_of.assign(_b.size(), -1);
        }
        // [symbol][position][vertex] -> tuples of the target
        std::vector<std::vector<std::vector<std::vector<const Tuple *>>>> _rel_index;
        std::vector<std::vector<std::vector<std::vector<const Tuple *>>>> _dom_index;
        // [symbol][vertex] -> domain tuples whose image contains vertex
        std::vector<std::vector<std::vector<const Tuple *>>> _img_index;
        // [vertex] -> relation tuples / domain tuples containing it (for reflection)
        std::vector<std::vector<std::pair<int, const Tuple *>>> _rel_touch, _dom_touch;

        auto index_target() -> void
        {
            int n = _b.size();
            _rel_index.resize(_b.relations.size());
            _rel_touch.resize(n);
            _dom_touch.resize(n);
            for (int r = 0; r < int(_b.relations.size()); ++r) {
                int arity = _b.language.relations[r].arity;
                if (_b.relations[r].empty())
                    continue;
                _rel_index[r].assign(arity, std::vector<std::vector<const Tuple *>>(n));
                for (auto & t : _b.relations[r]) {
                    for (int i = 0; i < arity; ++i)
                        _rel_index[r][i][t[i]].push_back(&t);
                    for (auto v : make_set(t))
                        _rel_touch[v].emplace_back(r, &t);
                }
            }
            _dom_index.resize(_b.functions.size());
            _img_index.resize(_b.functions.size());
            for (int f = 0; f < int(_b.functions.size()); ++f) {
                if (_b.functions[f].empty())
                    continue;
                int arity = _b.language.functions[f].domain_arity;
                _dom_index[f].assign(arity, std::vector<std::vector<const Tuple *>>(n));
                _img_index[f].assign(n, {});
                for (auto & [d, img] : _b.functions[f]) {
                    for (int i = 0; i < arity; ++i)
                        _dom_index[f][i][d[i]].push_back(&d);
                    for (auto v : make_set(img))
                        _img_index[f][v].push_back(&d);
                    for (auto v : make_set(d))
                        _dom_touch[v].emplace_back(f, &d);
                }
            }
        }

        auto make_plan(const SearchOptions & options) const -> Plan
        {
            int n = _a.size();
            std::vector<std::vector<std::pair<const Tuple *, const Tuple *>>> touching(n);
            std::vector<int> degree(n, 0);
            for (auto & rel : _a.relations)
                for (auto & t : rel)
                    for (auto v : make_set(t)) {
                        touching[v].emplace_back(&t, nullptr);
                        ++degree[v];
                    }
            for (auto & fun : _a.functions)
                for (auto & [d, img] : fun) {
                    Tuple all = d;
                    all.insert(all.end(), img.begin(), img.end());
                    for (auto v : make_set(all)) {
                        touching[v].emplace_back(&d, &img);
                        ++degree[v];
                    }
                }

            Plan plan;
            std::vector<int> pos(n, -1);
            std::vector<int> links(n, 0);
            auto place = [&](Vertex v) {
                pos[v] = int(plan.sequence.size());
                plan.sequence.push_back(v);
                for (auto & [t, img] : touching[v]) {
                    Tuple all = *t;
                    if (img)
                        all.insert(all.end(), img->begin(), img->end());
                    for (auto u : make_set(all))
                        if (pos[u] < 0)
                            ++links[u];
                }
            };
            for (Vertex v = 0; v < n; ++v)
                if (! options.pinned.empty() && options.pinned[v] >= 0)
                    place(v);
            while (int(plan.sequence.size()) < n) {
                Vertex best = -1;
                for (Vertex v = 0; v < n; ++v)
                    if (pos[v] < 0 &&
                        (best < 0 || links[v] > links[best] || (links[v] == links[best] && degree[v] > degree[best])))
                        best = v;
                place(best);
            }

            plan.checks.assign(n, {});
            plan.generators.assign(n, {});
            auto max_pos = [&](const Tuple & t) {
                int m = -1;
                for (auto v : t)
                    m = std::max(m, pos[v]);
                return m;
            };
            for (int r = 0; r < int(_a.relations.size()); ++r)
                for (auto & t : _a.relations[r])
                    plan.checks[max_pos(t)].push_back({Check::relation, r, &t, nullptr});
            for (int f = 0; f < int(_a.functions.size()); ++f)
                for (auto & [d, img] : _a.functions[f]) {
                    int pd = max_pos(d);
                    int pf = std::max(pd, max_pos(img));
                    plan.checks[pd].push_back({Check::domain, f, &d, nullptr});
                    plan.checks[pf].push_back({Check::image, f, &d, &img});
                }

            for (int p = 0; p < n; ++p) {
                Vertex v = plan.sequence[p];
                Generator best;
                int best_rank = 99;
                auto offer = [&](Generator g, int rank) {
                    if (rank < best_rank) {
                        best = g;
                        best_rank = rank;
                    }
                };
                for (int f = 0; f < int(_a.functions.size()); ++f)
                    for (auto & [d, img] : _a.functions[f]) {
                        bool d_done = max_pos(d) < p;
                        if (d_done && std::find(img.begin(), img.end(), v) != img.end())
                            offer({Generator::image_of, f, &d, -1, -1, -1}, 0);
                        for (int i = 0; i < int(d.size()); ++i) {
                            if (d[i] != v)
                                continue;
                            for (int j = 0; j < int(d.size()); ++j)
                                if (pos[d[j]] < p)
                                    offer({Generator::domain_pos, f, &d, i, j, -1}, 2);
                            for (auto u : img)
                                if (pos[u] < p)
                                    offer({Generator::image_member, f, &d, i, -1, u}, 3);
                        }
                    }
                for (int r = 0; r < int(_a.relations.size()); ++r)
                    for (auto & t : _a.relations[r])
                        for (int i = 0; i < int(t.size()); ++i) {
                            if (t[i] != v)
                                continue;
                            for (int j = 0; j < int(t.size()); ++j)
                                if (pos[t[j]] < p)
                                    offer({Generator::relation_pos, r, &t, i, j, -1}, 1);
                        }
                plan.generators[p] = best;
            }
            return plan;
        }

        auto candidates(const Plan & plan, const SearchOptions & options, const State & st, int p,
            std::vector<Vertex> & out) const -> void
        {
            out.clear();
            Vertex v = plan.sequence[p];
            if (! options.pinned.empty() && options.pinned[v] >= 0) {
                out.push_back(options.pinned[v]);
                return;
            }
            auto & g = plan.generators[p];
            switch (g.kind) {
            case Generator::image_of: {
                auto img = _b.image(g.symbol, detail::apply(st.map, *g.tuple));
                if (img)
                    out = make_set(*img);
                return;
            }
            case Generator::relation_pos: {
                if (_rel_index[g.symbol].empty())
                    return;
                for (auto t : _rel_index[g.symbol][g.j][st.map[(*g.tuple)[g.j]]])
                    out.push_back((*t)[g.i]);
                break;
            }
            case Generator::domain_pos: {
                if (_dom_index[g.symbol].empty())
                    return;
                for (auto t : _dom_index[g.symbol][g.j][st.map[(*g.tuple)[g.j]]])
                    out.push_back((*t)[g.i]);
                break;
            }
            case Generator::image_member: {
                if (_img_index[g.symbol].empty())
                    return;
                for (auto t : _img_index[g.symbol][st.map[g.anchor]])
                    out.push_back((*t)[g.i]);
                break;
            }
            case Generator::none: {
                if (! options.domains.empty() && options.domains[v]) {
                    out = *options.domains[v];
                    return;
                }
                out.resize(_b.size());
                for (int w = 0; w < _b.size(); ++w)
                    out[w] = w;
                return;
            }
            }
            out = make_set(std::move(out));
        }

        auto consistent(const Plan & plan, const SearchOptions & options, State & st, int p) const -> bool
        {
            Vertex v = plan.sequence[p];
            Vertex w = st.map[v];
            for (auto & c : plan.checks[p]) {
                switch (c.kind) {
                case Check::relation:
                    if (! _b.has_tuple(c.symbol, detail::apply(st.map, *c.tuple)))
                        return false;
                    break;
                case Check::domain:
                    if (! _b.image(c.symbol, detail::apply(st.map, *c.tuple)))
                        return false;
                    break;
                case Check::image: {
                    auto img = _b.image(c.symbol, detail::apply(st.map, *c.tuple));
                    if (! img || ! detail::image_matches(_a.language.functions[c.symbol], st.map, *c.image_tuple, *img))
                        return false;
                    break;
                }
                }
            }
            if (_a.ordered())
                for (int q = 0; q < p; ++q) {
                    Vertex u = plan.sequence[q];
                    if (_a.less(u, v) != _b.less(st.map[u], w) || st.map[u] == w)
                        return false;
                }
            if (options.kind == MapKind::embedding) {
                Tuple buf;
                auto preimage = [&](const Tuple & t) {
                    buf.clear();
                    for (auto x : t) {
                        if (st.inverse_count[x] == 0)
                            return false;
                        buf.push_back(st.inverse_of[x]);
                    }
                    return true;
                };
                for (auto & [r, t] : _rel_touch[w])
                    if (preimage(*t) && ! _a.has_tuple(r, buf))
                        return false;
                for (auto & [f, d] : _dom_touch[w])
                    if (preimage(*d) && ! _a.image(f, buf))
                        return false;
            }
            return true;
        }

        template <typename Visit>
        auto extend(const Plan & plan, const SearchOptions & options, State & st, int p, Visit & visit) const -> bool
        {
            if (options.meter)
                options.meter->tick("embedding search");
            Vertex v = plan.sequence[p];
            std::vector<Vertex> cand;
            candidates(plan, options, st, p, cand);
            bool injective = options.kind != MapKind::homomorphism;
            for (auto w : cand) {
                if (injective && st.used[w])
                    continue;
                if (options.allow && ! options.allow(v, w))
                    continue;
                st.map[v] = w;
                if (injective)
                    st.used[w] = 1;
                ++st.inverse_count[w];
                st.inverse_of[w] = v;
                bool ok = consistent(plan, options, st, p);
                bool go_on = true;
                if (ok)
                    go_on = (p + 1 == int(plan.sequence.size())) ? visit(static_cast<const VertexMap &>(st.map))
                                                                : extend(plan, options, st, p + 1, visit);
                --st.inverse_count[w];
                if (injective)
                    st.used[w] = 0;
                st.map[v] = -1;
                if (! go_on)
                    return false;
            }
            return true;
        }
    };

    inline auto enumerate_maps(const Structure & a, const Structure & b, MapKind kind) -> std::vector<VertexMap>
    {
        SearchOptions o;
        o.kind = kind;
        return Matcher(a, b).all(o);
    }

    inline auto enumerate_embeddings(const Structure & a, const Structure & b) -> std::vector<VertexMap>
    {
        return enumerate_maps(a, b, MapKind::embedding);
    }

    inline auto find_map(const Structure & a, const Structure & b, MapKind kind) -> std::optional<VertexMap>
    {
        if (kind != MapKind::homomorphism && a.size() > b.size())
            return std::nullopt;
        SearchOptions o;
        o.kind = kind;
        return Matcher(a, b).first(o);
    }

    inline auto find_embedding(const Structure & a, const Structure & b) -> std::optional<VertexMap>
    {
        return find_map(a, b, MapKind::embedding);
    }

    inline auto image_set(const VertexMap & f) -> VertexSet
    {
        return make_set(f);
    }

    // Distinct images of embeddings a -> b, sorted lexicographically.
    inline auto copies(const Structure & a, const Structure & b) -> std::vector<VertexSet>
    {
        std::set<VertexSet> out;
        for (auto & e : enumerate_embeddings(a, b))
            out.insert(image_set(e));
        return {out.begin(), out.end()};
    }

    inline auto automorphisms(const Structure & a) -> std::vector<VertexMap>
    {
        return enumerate_embeddings(a, a);
    }

    inline auto is_isomorphic(const Structure & a, const Structure & b) -> bool
    {
        return a.size() == b.size() && tuple_count(a) == tuple_count(b) && find_embedding(a, b).has_value();
    }

    inline auto compose(const VertexMap & outer, const VertexMap & inner) -> VertexMap
    {
        VertexMap r(inner.size());
        for (std::size_t i = 0; i < inner.size(); ++i)
            r[i] = outer[inner[i]];
        return r;
    }

    inline auto inverse_permutation(const VertexMap & p) -> VertexMap
    {
        VertexMap r(p.size());
        for (std::size_t i = 0; i < p.size(); ++i)
            r[p[i]] = int(i);
        return r;
    }
}
