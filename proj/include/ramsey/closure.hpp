#pragma once

#include <ramsey/structure.hpp>

#include <stdexcept>
#include <vector>

namespace ramsey
{
    // Precomputed function-entry index for repeated closure queries on one
    // structure. Each entry is woken when one of its domain vertices is added.
    class ClosureOperator
    {
    public:
        explicit ClosureOperator(const Structure & s) :
            _size(s.size()),
            _by_vertex(s.size())
        {
            for (int f = 0; f < int(s.functions.size()); ++f)
                for (auto & [d, img] : s.functions[f]) {
                    int id = int(_entries.size());
                    _entries.push_back({&d, &img});
                    auto distinct = make_set(d);
                    for (auto v : distinct)
                        _by_vertex[v].push_back(id);
                }
        }

        auto size() const -> int { return _size; }

        auto operator()(const VertexSet & generators) const -> VertexSet
        {
            std::vector<char> in(_size, 0);
            std::vector<Vertex> queue;
            for (auto v : generators) {
                if (v < 0 || v >= _size)
                    throw std::invalid_argument("closure: unknown vertex");
                if (! in[v]) {
                    in[v] = 1;
                    queue.push_back(v);
                }
            }
            for (std::size_t head = 0; head < queue.size(); ++head)
                for (auto id : _by_vertex[queue[head]]) {
                    auto & [d, img] = _entries[id];
                    bool ready = true;
                    for (auto u : *d)
                        if (! in[u]) {
                            ready = false;
                            break;
                        }
                    if (ready)
                        for (auto u : *img)
                            if (! in[u]) {
                                in[u] = 1;
                                queue.push_back(u);
                            }
                }
            return make_set(std::move(queue));
        }

        auto of_vertex(Vertex v) const -> VertexSet { return (*this)(VertexSet{v}); }

    private:
        struct Entry
        {
            const Tuple * domain;
            const Tuple * image;
        };

        int _size;
        std::vector<Entry> _entries;
        std::vector<std::vector<int>> _by_vertex;
    };

    inline auto closure_set(const Structure & s, const VertexSet & generators) -> VertexSet
    {
        return ClosureOperator(s)(make_set(generators));
    }

    inline auto is_closed(const Structure & s, const VertexSet & x) -> bool
    {
        std::vector<char> in(s.size(), 0);
        for (auto v : x)
            in[v] = 1;
        for (auto & fun : s.functions)
            for (auto & [d, img] : fun) {
                bool inside = true;
                for (auto u : d)
                    inside = inside && in[u];
                if (inside)
                    for (auto u : img)
                        if (! in[u])
                            return false;
            }
        return true;
    }

    // The substructure induced on the closure of the generators.
    inline auto closure(const Structure & s, const VertexSet & generators) -> Structure
    {
        return restrict_to(s, closure_set(s, generators));
    }

    inline auto induced_substructure(const Structure & s, const VertexSet & x) -> Structure
    {
        auto set = make_set(x);
        for (auto v : set)
            s.check_vertex(v);
        if (! is_closed(s, set))
            throw std::invalid_argument("vertex set " + vertex_names(s, set) + " is not closed");
        return restrict_to(s, set);
    }
}
