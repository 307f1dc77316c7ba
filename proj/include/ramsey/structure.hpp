#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ramsey
{
    using Vertex = int;
    using Tuple = std::vector<Vertex>;
    using VertexSet = std::vector<Vertex>; // sorted, duplicate free
    using VertexMap = std::vector<Vertex>; // source vertex -> target vertex

    struct RelationSymbol
    {
        std::string name;
        int arity = 0;

        auto operator==(const RelationSymbol &) const -> bool = default;
    };

    struct FunctionSymbol
    {
        std::string name;
        int domain_arity = 0;
        int range_arity = 0;
        // Images are ordered tuples (repetition allowed) instead of sets. Only
        // produced by completion, which needs total functions into tuples.
        bool ordered_image = false;

        auto operator==(const FunctionSymbol &) const -> bool = default;
    };

    class Language
    {
    public:
        std::vector<RelationSymbol> relations;
        std::vector<FunctionSymbol> functions;
        bool ordered = false; // carries the distinguished linear order

        auto operator==(const Language &) const -> bool = default;

        auto add_relation(const std::string & name, int arity) -> int
        {
            check_new_name(name);
            if (arity < 1)
                throw std::invalid_argument("relation " + name + " needs arity >= 1");
            relations.push_back({name, arity});
            return int(relations.size()) - 1;
        }

        auto add_function(const std::string & name, int domain_arity, int range_arity, bool ordered_image = false) -> int
        {
            check_new_name(name);
            if (domain_arity < 1 || range_arity < 1)
                throw std::invalid_argument("function " + name + " needs arities >= 1");
            functions.push_back({name, domain_arity, range_arity, ordered_image});
            return int(functions.size()) - 1;
        }

        auto with_order(bool flag = true) const -> Language
        {
            Language result = *this;
            result.ordered = flag;
            return result;
        }

        auto relation_index(const std::string & name) const -> std::optional<int>
        {
            for (int i = 0; i < int(relations.size()); ++i)
                if (relations[i].name == name)
                    return i;
            return std::nullopt;
        }

        auto function_index(const std::string & name) const -> std::optional<int>
        {
            for (int i = 0; i < int(functions.size()); ++i)
                if (functions[i].name == name)
                    return i;
            return std::nullopt;
        }

        auto all_functions_unary() const -> bool
        {
            return std::all_of(functions.begin(), functions.end(), [](const FunctionSymbol & f) { return f.domain_arity == 1; });
        }

        auto validate() const -> void
        {
            std::set<std::string> seen;
            for (auto & r : relations) {
                if (r.arity < 1)
                    throw std::invalid_argument("relation " + r.name + " needs arity >= 1");
                if (r.name.empty() || ! seen.insert(r.name).second)
                    throw std::invalid_argument("duplicate or empty symbol " + r.name);
            }
            for (auto & f : functions) {
                if (f.domain_arity < 1 || f.range_arity < 1)
                    throw std::invalid_argument("function " + f.name + " needs arities >= 1");
                if (f.name.empty() || ! seen.insert(f.name).second)
                    throw std::invalid_argument("duplicate or empty symbol " + f.name);
            }
        }

    private:
        auto check_new_name(const std::string & name) const -> void
        {
            if (name.empty())
                throw std::invalid_argument("empty symbol name");
            if (relation_index(name) || function_index(name))
                throw std::invalid_argument("duplicate symbol " + name);
        }
    };

    // A finite L-structure. Vertices are dense integers 0..size()-1 carrying
    // opaque string names. Function images are stored sorted unless the symbol
    // has ordered images. When the language is ordered, rank[v] is the position
    // of v in the linear order (0 = least); the order is never materialised as
    // a pair relation.
    class Structure
    {
    public:
        Language language;
        std::vector<std::string> names;
        std::vector<std::set<Tuple>> relations;
        std::vector<std::map<Tuple, Tuple>> functions;
        std::vector<int> rank;

        Structure() = default;

        explicit Structure(Language lang) :
            language(std::move(lang)),
            relations(language.relations.size()),
            functions(language.functions.size())
        {
        }

        auto operator==(const Structure & other) const -> bool
        {
            return language == other.language && names == other.names && relations == other.relations &&
                functions == other.functions && rank == other.rank;
        }

        auto size() const -> int { return int(names.size()); }

        auto ordered() const -> bool { return language.ordered; }

        // Appends a vertex; in an ordered structure it becomes the new maximum.
        auto add_vertex(const std::string & name) -> Vertex
        {
            if (_index.size() != names.size())
                rebuild_index();
            if (name.empty())
                throw std::invalid_argument("empty vertex name");
            if (! _index.emplace(name, int(names.size())).second)
                throw std::invalid_argument("duplicate vertex " + name);
            names.push_back(name);
            if (language.ordered)
                rank.push_back(int(rank.size()));
            return int(names.size()) - 1;
        }

        auto vertex(const std::string & name) const -> std::optional<Vertex>
        {
            if (_index.size() != names.size())
                rebuild_index();
            auto it = _index.find(name);
            if (it == _index.end())
                return std::nullopt;
            return it->second;
        }

        auto add_tuple(int relation, Tuple t) -> void
        {
            check_relation_tuple(relation, t);
            relations[relation].insert(std::move(t));
        }

        auto has_tuple(int relation, const Tuple & t) const -> bool
        {
            return relations[relation].count(t) != 0;
        }

        auto set_function(int function, Tuple domain, Tuple image) -> void
        {
            auto & sym = language.functions.at(function);
            if (int(domain.size()) != sym.domain_arity)
                throw std::invalid_argument("function " + sym.name + ": domain arity mismatch");
            for (auto v : domain)
                check_vertex(v);
            image = normalise_image(function, std::move(image));
            functions[function][std::move(domain)] = std::move(image);
        }

        auto image(int function, const Tuple & domain) const -> const Tuple *
        {
            auto it = functions[function].find(domain);
            return it == functions[function].end() ? nullptr : &it->second;
        }

        auto normalise_image(int function, Tuple image) const -> Tuple
        {
            auto & sym = language.functions.at(function);
            if (int(image.size()) != sym.range_arity)
                throw std::invalid_argument("function " + sym.name + ": image needs exactly " +
                    std::to_string(sym.range_arity) + " elements");
            for (auto v : image)
                check_vertex(v);
            if (! sym.ordered_image) {
                std::sort(image.begin(), image.end());
                if (std::adjacent_find(image.begin(), image.end()) != image.end())
                    throw std::invalid_argument("function " + sym.name + ": image elements must be distinct");
            }
            return image;
        }

        // Sets the linear order from a sequence listing every vertex, least first.
        auto set_order(const std::vector<Vertex> & sequence) -> void
        {
            if (! language.ordered)
                throw std::invalid_argument("language is not ordered");
            if (int(sequence.size()) != size())
                throw std::invalid_argument("order must list every vertex exactly once");
            std::vector<int> r(size(), -1);
            for (int i = 0; i < int(sequence.size()); ++i) {
                check_vertex(sequence[i]);
                if (r[sequence[i]] != -1)
                    throw std::invalid_argument("order lists vertex " + names[sequence[i]] + " twice");
                r[sequence[i]] = i;
            }
            rank = std::move(r);
        }

        auto less(Vertex u, Vertex v) const -> bool { return rank[u] < rank[v]; }

        auto order_sequence() const -> std::vector<Vertex>
        {
            std::vector<Vertex> result(size());
            for (int v = 0; v < size(); ++v)
                result[rank[v]] = v;
            return result;
        }

        auto validate() const -> void
        {
            language.validate();
            if (relations.size() != language.relations.size() || functions.size() != language.functions.size())
                throw std::invalid_argument("structure does not match its language");
            std::set<std::string> seen;
            for (auto & n : names)
                if (n.empty() || ! seen.insert(n).second)
                    throw std::invalid_argument("duplicate or empty vertex name " + n);
            for (int r = 0; r < int(relations.size()); ++r)
                for (auto & t : relations[r])
                    check_relation_tuple(r, t);
            for (int f = 0; f < int(functions.size()); ++f)
                for (auto & [d, img] : functions[f]) {
                    if (int(d.size()) != language.functions[f].domain_arity)
                        throw std::invalid_argument("function " + language.functions[f].name + ": domain arity mismatch");
                    for (auto v : d)
                        check_vertex(v);
                    if (normalise_image(f, img) != img)
                        throw std::invalid_argument("function " + language.functions[f].name + ": image not normalised");
                }
            if (language.ordered) {
                if (int(rank.size()) != size())
                    throw std::invalid_argument("order does not cover every vertex");
                std::vector<char> used(size(), 0);
                for (auto r : rank)
                    if (r < 0 || r >= size() || used[r]++)
                        throw std::invalid_argument("order is not a linear order");
            }
            else if (! rank.empty())
                throw std::invalid_argument("unordered structure carries an order");
        }

        auto check_vertex(Vertex v) const -> void
        {
            if (v < 0 || v >= size())
                throw std::invalid_argument("vertex index out of range");
        }

    private:
        mutable std::unordered_map<std::string, int> _index;

        auto rebuild_index() const -> void
        {
            _index.clear();
            for (int i = 0; i < int(names.size()); ++i)
                _index.emplace(names[i], i);
        }

        auto check_relation_tuple(int relation, const Tuple & t) const -> void
        {
            auto & sym = language.relations.at(relation);
            if (int(t.size()) != sym.arity)
                throw std::invalid_argument("relation " + sym.name + ": arity mismatch");
            for (auto v : t)
                check_vertex(v);
        }
    };

    inline auto make_set(std::vector<Vertex> v) -> VertexSet
    {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    }

    inline auto all_vertices(const Structure & s) -> VertexSet
    {
        VertexSet r(s.size());
        for (int i = 0; i < s.size(); ++i)
            r[i] = i;
        return r;
    }

    inline auto forget_order(Structure s) -> Structure
    {
        s.language.ordered = false;
        s.rank.clear();
        return s;
    }

    inline auto with_order(Structure s, const std::vector<Vertex> & sequence) -> Structure
    {
        s.language.ordered = true;
        s.rank.clear();
        s.set_order(sequence);
        return s;
    }

    // Orders the vertices by index.
    inline auto with_index_order(Structure s) -> Structure
    {
        return with_order(std::move(s), all_vertices(s));
    }

    // Restriction of s to a vertex set, without checking that the set is
    // closed. Vertex i of the result is keep[i]; function entries whose image
    // leaves the set are dropped.
    inline auto restrict_to(const Structure & s, const VertexSet & keep) -> Structure
    {
        std::vector<int> where(s.size(), -1);
        for (int i = 0; i < int(keep.size()); ++i)
            where[keep[i]] = i;
        Structure r(s.language);
        r.names.reserve(keep.size());
        for (auto v : keep)
            r.names.push_back(s.names[v]);
        auto mapped = [&](const Tuple & t, Tuple & out) {
            out.clear();
            for (auto v : t) {
                if (where[v] < 0)
                    return false;
                out.push_back(where[v]);
            }
            return true;
        };
        Tuple buf, buf2;
        for (int rel = 0; rel < int(s.relations.size()); ++rel)
            for (auto & t : s.relations[rel])
                if (mapped(t, buf))
                    r.relations[rel].insert(buf);
        for (int f = 0; f < int(s.functions.size()); ++f)
            for (auto & [d, img] : s.functions[f])
                if (mapped(d, buf) && mapped(img, buf2))
                    r.functions[f].emplace(buf, r.language.functions[f].ordered_image ? buf2 : make_set(buf2));
        if (s.ordered()) {
            std::vector<Vertex> seq(keep.begin(), keep.end());
            std::sort(seq.begin(), seq.end(), [&](Vertex a, Vertex b) { return s.rank[a] < s.rank[b]; });
            for (auto & v : seq)
                v = where[v];
            r.set_order(seq);
        }
        return r;
    }

    // The image of s under an injective vertex relabelling into a fresh
    // structure of the given size; names are taken from `names`.
    inline auto relabel(const Structure & s, const VertexMap & perm, std::vector<std::string> names) -> Structure
    {
        Structure r(s.language);
        r.names = std::move(names);
        auto map_tuple = [&](const Tuple & t) {
            Tuple out(t.size());
            for (std::size_t i = 0; i < t.size(); ++i)
                out[i] = perm[t[i]];
            return out;
        };
        for (int rel = 0; rel < int(s.relations.size()); ++rel)
            for (auto & t : s.relations[rel])
                r.relations[rel].insert(map_tuple(t));
        for (int f = 0; f < int(s.functions.size()); ++f)
            for (auto & [d, img] : s.functions[f]) {
                auto m = map_tuple(img);
                if (! r.language.functions[f].ordered_image)
                    std::sort(m.begin(), m.end());
                r.functions[f].emplace(map_tuple(d), std::move(m));
            }
        if (s.ordered()) {
            r.rank.assign(r.names.size(), 0);
            for (int v = 0; v < s.size(); ++v)
                r.rank[perm[v]] = s.rank[v];
        }
        return r;
    }

    inline auto vertex_names(const Structure & s, const VertexSet & vs) -> std::string
    {
        std::string r = "{";
        for (std::size_t i = 0; i < vs.size(); ++i)
            r += (i ? "," : "") + s.names[vs[i]];
        return r + "}";
    }

    // All tuples of the given arity over 0..n-1, lexicographically.
    inline auto all_tuples(int n, int arity) -> std::vector<Tuple>
    {
        std::vector<Tuple> out;
        if (n == 0 && arity > 0)
            return out;
        Tuple t(arity, 0);
        while (true) {
            out.push_back(t);
            int i = arity - 1;
            while (i >= 0 && ++t[i] == n)
                t[i--] = 0;
            if (i < 0)
                break;
        }
        return out;
    }

    inline auto tuple_count(const Structure & s) -> std::size_t
    {
        std::size_t n = 0;
        for (auto & r : s.relations)
            n += r.size();
        for (auto & f : s.functions)
            n += f.size();
        return n;
    }

    // Restrictions of one large structure to many small vertex sets. Each
    // relation tuple and function entry is filed under its least vertex, so a
    // restriction only looks at tuples touching the kept set.
    class LocalRestrictor
    {
    public:
        explicit LocalRestrictor(const Structure & s) :
            _s(s),
            _relations(s.size()),
            _functions(s.size()),
            _where(s.size(), -1)
        {
            for (int r = 0; r < int(s.relations.size()); ++r)
                for (auto & t : s.relations[r])
                    if (! t.empty())
                        _relations[*std::min_element(t.begin(), t.end())].push_back({r, &t});
            for (int f = 0; f < int(s.functions.size()); ++f)
                for (auto & entry : s.functions[f]) {
                    Vertex low = entry.second.empty() ? s.size() : *std::min_element(entry.second.begin(), entry.second.end());
                    if (! entry.first.empty())
                        low = std::min(low, *std::min_element(entry.first.begin(), entry.first.end()));
                    if (low < s.size())
                        _functions[low].push_back({f, &entry});
                }
        }

        // Same result as restrict_to(s, keep).
        auto operator()(const VertexSet & keep) const -> Structure
        {
            for (int i = 0; i < int(keep.size()); ++i)
                _where[keep[i]] = i;
            Structure r(_s.language);
            for (auto v : keep)
                r.names.push_back(_s.names[v]);
            auto mapped = [&](const Tuple & t, Tuple & out) {
                out.clear();
                for (auto v : t) {
                    if (_where[v] < 0)
                        return false;
                    out.push_back(_where[v]);
                }
                return true;
            };
            Tuple buf, buf2;
            for (auto v : keep) {
                for (auto & [rel, t] : _relations[v])
                    if (mapped(*t, buf))
                        r.relations[rel].insert(buf);
                for (auto & [f, entry] : _functions[v])
                    if (mapped(entry->first, buf) && mapped(entry->second, buf2))
                        r.functions[f].emplace(buf, r.language.functions[f].ordered_image ? buf2 : make_set(buf2));
            }
            if (_s.ordered()) {
                std::vector<Vertex> seq(keep.begin(), keep.end());
                std::sort(seq.begin(), seq.end(), [&](Vertex a, Vertex b) { return _s.rank[a] < _s.rank[b]; });
                for (auto & v : seq)
                    v = _where[v];
                r.set_order(seq);
            }
            for (auto v : keep)
                _where[v] = -1;
            return r;
        }

    private:
        const Structure & _s;
        std::vector<std::vector<std::pair<int, const Tuple *>>> _relations;
        std::vector<std::vector<std::pair<int, const std::pair<const Tuple, Tuple> *>>> _functions;
        mutable std::vector<int> _where;
    };
}
