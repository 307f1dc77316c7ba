#pragma once

#include <ramsey/morphism.hpp>
#include <ramsey/structure.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace ramsey
{
    struct Amalgam
    {
        Structure result;
        VertexMap beta1, beta2;
    };

    // Returns `wanted` if unused in s, otherwise the first of wanted', wanted'', ...
    inline auto fresh_name(const Structure & s, std::string wanted) -> std::string
    {
        while (s.vertex(wanted))
            wanted += "'";
        return wanted;
    }

    namespace detail
    {
        // Appends the tuples of `part` to `into`, relabelled by `f`.
        inline auto copy_tuples(const Structure & part, const VertexMap & f, Structure & into) -> void
        {
            for (int r = 0; r < int(part.relations.size()); ++r)
                for (auto & t : part.relations[r])
                    into.relations[r].insert(apply(f, t));
            for (int fn = 0; fn < int(part.functions.size()); ++fn)
                for (auto & [d, img] : part.functions[fn]) {
                    auto key = apply(f, d);
                    auto value = apply(f, img);
                    if (! part.language.functions[fn].ordered_image)
                        std::sort(value.begin(), value.end());
                    auto [it, inserted] = into.functions[fn].emplace(key, value);
                    if (! inserted && it->second != value)
                        throw std::logic_error("amalgam: conflicting function values");
                }
        }
    }

    // Free amalgam of b1 and b2 over a. Vertices of b1 keep their positions and
    // names; the remaining vertices of b2 follow, renamed only on clashes. In
    // the ordered case, between consecutive vertices of the common part the
    // private vertices of b1 precede those of b2.
    inline auto free_amalgam(const Structure & a, const Structure & b1, const Structure & b2, const VertexMap & alpha1,
        const VertexMap & alpha2) -> Amalgam
    {
        if (check_map(a, b1, alpha1) != MapKind::embedding)
            throw std::invalid_argument("free_amalgam: first map is not an embedding");
        if (check_map(a, b2, alpha2) != MapKind::embedding)
            throw std::invalid_argument("free_amalgam: second map is not an embedding");

        Amalgam out;
        out.result = Structure(b1.language);
        auto & c = out.result;
        for (auto & n : b1.names)
            c.add_vertex(n);
        out.beta1 = all_vertices(b1);
        out.beta2.assign(b2.size(), -1);
        for (int x = 0; x < a.size(); ++x)
            out.beta2[alpha2[x]] = alpha1[x];
        for (int v = 0; v < b2.size(); ++v)
            if (out.beta2[v] < 0)
                out.beta2[v] = c.add_vertex(fresh_name(c, b2.names[v]));

        detail::copy_tuples(b1, out.beta1, c);
        detail::copy_tuples(b2, out.beta2, c);

        if (c.ordered()) {
            std::vector<char> common(c.size(), 0);
            for (auto v : alpha1)
                common[v] = 1;
            // Private vertices of b (as vertices of c), split at each common vertex.
            auto segments = [&](const Structure & b, const VertexMap & beta) {
                std::vector<std::vector<Vertex>> segs(1);
                for (auto v : b.order_sequence()) {
                    if (common[beta[v]])
                        segs.emplace_back();
                    else
                        segs.back().push_back(beta[v]);
                }
                return segs;
            };
            auto s1 = segments(b1, out.beta1);
            auto s2 = segments(b2, out.beta2);
            std::vector<Vertex> anchors;
            for (auto v : b1.order_sequence())
                if (common[v])
                    anchors.push_back(v);
            std::vector<Vertex> seq;
            for (std::size_t k = 0; k < s1.size(); ++k) {
                seq.insert(seq.end(), s1[k].begin(), s1[k].end());
                seq.insert(seq.end(), s2[k].begin(), s2[k].end());
                if (k < anchors.size())
                    seq.push_back(anchors[k]);
            }
            c.set_order(seq);
        }
        return out;
    }

    // Disjoint union; names of later parts are made unique with primes.
    inline auto disjoint_union(const std::vector<Structure> & parts) -> Structure
    {
        if (parts.empty())
            throw std::invalid_argument("disjoint_union: no parts");
        Structure c(parts[0].language);
        std::vector<Vertex> seq;
        for (auto & p : parts) {
            if (! same_signature(p.language, c.language))
                throw std::invalid_argument("disjoint_union: languages differ");
            VertexMap f(p.size());
            for (int v = 0; v < p.size(); ++v)
                f[v] = c.add_vertex(fresh_name(c, p.names[v]));
            detail::copy_tuples(p, f, c);
            if (p.ordered())
                for (auto v : p.order_sequence())
                    seq.push_back(f[v]);
        }
        if (c.ordered())
            c.set_order(seq);
        return c;
    }
}
