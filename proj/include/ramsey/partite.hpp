#pragma once

#include <ramsey/amalgam.hpp>
#include <ramsey/budget.hpp>
#include <ramsey/canonical.hpp>
#include <ramsey/hales_jewett.hpp>
#include <ramsey/irreducible.hpp>
#include <ramsey/morphism.hpp>
#include <ramsey/structure.hpp>
#include <ramsey/text_format.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace ramsey
{
    // A structure (carrier) together with a projection onto a base structure.
    // part[v] is the base vertex whose class contains carrier vertex v.
    struct PartiteSystem
    {
        Structure base;
        Structure carrier;
        std::vector<Vertex> part;

        auto members(Vertex base_vertex) const -> VertexSet
        {
            VertexSet out;
            for (int v = 0; v < carrier.size(); ++v)
                if (part[v] == base_vertex)
                    out.push_back(v);
            return out;
        }
    };

    struct Verdict
    {
        bool ok = true;
        std::string reason;

        explicit operator bool() const { return ok; }

        static auto fail(std::string why) -> Verdict { return {false, std::move(why)}; }
    };

    namespace detail
    {
        // Distinct vertices of the tuple lie in distinct parts.
        inline auto transversal(const std::vector<Vertex> & part, const Tuple & t) -> bool
        {
            for (std::size_t i = 0; i < t.size(); ++i)
                for (std::size_t j = i + 1; j < t.size(); ++j)
                    if (t[i] != t[j] && part[t[i]] == part[t[j]])
                        return false;
            return true;
        }

        inline auto tuple_text(const Structure & s, const Tuple & t) -> std::string
        {
            std::string r = "(";
            for (std::size_t i = 0; i < t.size(); ++i)
                r += (i ? "," : "") + s.names[t[i]];
            return r + ")";
        }
    }

    // Checks that the projection is a homomorphism of the unordered reducts and
    // that every relation tuple and function entry (domain with image) meets
    // each class in at most one vertex. Reports the first violation found.
    inline auto validate_partite(const PartiteSystem & x) -> Verdict
    {
        auto & c = x.carrier;
        if (int(x.part.size()) != c.size())
            return Verdict::fail("projection has " + std::to_string(x.part.size()) + " entries for " +
                std::to_string(c.size()) + " vertices");
        for (int v = 0; v < c.size(); ++v)
            if (x.part[v] < 0 || x.part[v] >= x.base.size())
                return Verdict::fail("vertex " + c.names[v] + " projects outside the base");
        if (! same_signature(c.language, x.base.language))
            return Verdict::fail("carrier and base languages differ");
        for (int r = 0; r < int(c.relations.size()); ++r)
            for (auto & t : c.relations[r]) {
                if (! detail::transversal(x.part, t))
                    return Verdict::fail("tuple " + c.language.relations[r].name + detail::tuple_text(c, t) +
                        " meets a part twice");
                if (! x.base.has_tuple(r, detail::apply(x.part, t)))
                    return Verdict::fail("projection of " + c.language.relations[r].name + detail::tuple_text(c, t) +
                        " is not a tuple of the base");
            }
        for (int f = 0; f < int(c.functions.size()); ++f)
            for (auto & [d, img] : c.functions[f]) {
                auto name = c.language.functions[f].name + detail::tuple_text(c, d);
                auto all = d;
                all.insert(all.end(), img.begin(), img.end());
                if (! detail::transversal(x.part, all))
                    return Verdict::fail("entry " + name + " meets a part twice");
                auto target = x.base.image(f, detail::apply(x.part, d));
                if (! target || ! detail::image_matches(c.language.functions[f], x.part, img, *target))
                    return Verdict::fail("projection does not preserve " + name);
            }
        return {};
    }

    // Embeddings of the (unordered) base into the carrier sending each base
    // vertex into its own class, sorted. These are the transversal copies.
    inline auto base_copies(const PartiteSystem & x, BudgetMeter * meter = nullptr) -> std::vector<VertexMap>
    {
        Structure a = forget_order(x.base);
        Structure b = forget_order(x.carrier);
        SearchOptions o;
        o.allow = [&](Vertex i, Vertex w) { return x.part[w] == i; };
        o.meter = meter;
        return Matcher(a, b).all(o);
    }

    struct PartitePower
    {
        PartiteSystem system;
        int dimension = 0;
        std::vector<Tuple> coords;      // coords[v][i] = coordinate i of v, a vertex of the factor
        std::map<Tuple, Vertex> index;  // inverse of coords
    };

    // N-th partite power of x. The class of base vertex p is (X^p)^N; a tuple
    // (or function entry) is present when every coordinate projection is one
    // in x, all of the same projection pattern. Images of unordered functions
    // are matched class by class, ordered images position by position.
    inline auto partite_power(const PartiteSystem & x, int n, BudgetMeter * meter = nullptr) -> PartitePower
    {
        if (n < 1)
            throw std::invalid_argument("partite power: exponent must be at least 1");
        if (auto v = validate_partite(x); ! v)
            throw std::invalid_argument("partite power: " + v.reason);
        PartitePower out;
        out.dimension = n;
        auto & sys = out.system;
        sys.base = x.base;
        sys.carrier = Structure(x.carrier.language.with_order(false));

        std::vector<VertexSet> classes(x.base.size());
        for (int v = 0; v < x.carrier.size(); ++v)
            classes[x.part[v]].push_back(v);
        std::uint64_t total = 0;
        for (auto & cls : classes) {
            std::uint64_t k = 1;
            for (int i = 0; i < n && k; ++i) {
                k *= cls.size();
                if (k > std::uint64_t(1) << 40)
                    throw BudgetExceeded("partite power: class too large");
            }
            total += k;
        }
        if (meter)
            meter->check_vertices(total, "partite power");

        // Odometer over sequences of length n drawn from 0..size-1.
        auto for_each_sequence = [n](std::size_t size, auto && visit) {
            if (size == 0)
                return;
            std::vector<std::size_t> c(n, 0);
            while (true) {
                visit(c);
                int i = n - 1;
                while (i >= 0 && ++c[i] == size)
                    c[i--] = 0;
                if (i < 0)
                    return;
            }
        };

        for (int p = 0; p < x.base.size(); ++p)
            for_each_sequence(classes[p].size(), [&](const std::vector<std::size_t> & c) {
                Tuple coord(n);
                std::string name = "[";
                for (int i = 0; i < n; ++i) {
                    coord[i] = classes[p][c[i]];
                    name += (i ? "," : "") + x.carrier.names[coord[i]];
                }
                Vertex v = sys.carrier.add_vertex(name + "]");
                sys.part.push_back(p);
                out.index.emplace(coord, v);
                out.coords.push_back(std::move(coord));
            });

        auto vertex_at = [&](const std::vector<const Tuple *> & pick, std::size_t j) {
            Tuple coord(n);
            for (int i = 0; i < n; ++i)
                coord[i] = (*pick[i])[j];
            return out.index.at(coord);
        };
        auto count_group = [&](std::size_t size) {
            std::uint64_t k = 1;
            for (int i = 0; i < n; ++i)
                k *= size;
            if (meter)
                meter->count_subsets(k, "partite power tuples");
        };

        for (int r = 0; r < int(x.carrier.relations.size()); ++r) {
            std::map<Tuple, std::vector<const Tuple *>> groups;
            for (auto & t : x.carrier.relations[r])
                groups[detail::apply(x.part, t)].push_back(&t);
            for (auto & [pattern, members] : groups) {
                count_group(members.size());
                std::vector<const Tuple *> pick(n);
                for_each_sequence(members.size(), [&](const std::vector<std::size_t> & c) {
                    for (int i = 0; i < n; ++i)
                        pick[i] = members[c[i]];
                    Tuple t(pattern.size());
                    for (std::size_t j = 0; j < t.size(); ++j)
                        t[j] = vertex_at(pick, j);
                    sys.carrier.relations[r].insert(std::move(t));
                });
            }
        }

        for (int f = 0; f < int(x.carrier.functions.size()); ++f) {
            bool by_position = x.carrier.language.functions[f].ordered_image;
            std::map<Tuple, std::vector<const std::pair<const Tuple, Tuple> *>> groups;
            for (auto & entry : x.carrier.functions[f])
                groups[detail::apply(x.part, entry.first)].push_back(&entry);
            for (auto & [pattern, members] : groups) {
                count_group(members.size());
                std::vector<const Tuple *> dom(n), img(n);
                for_each_sequence(members.size(), [&](const std::vector<std::size_t> & c) {
                    for (int i = 0; i < n; ++i) {
                        dom[i] = &members[c[i]]->first;
                        img[i] = &members[c[i]]->second;
                    }
                    Tuple d(pattern.size());
                    for (std::size_t j = 0; j < d.size(); ++j)
                        d[j] = vertex_at(dom, j);
                    Tuple image;
                    if (by_position) {
                        for (std::size_t j = 0; j < img[0]->size(); ++j)
                            image.push_back(vertex_at(img, j));
                    }
                    else {
                        // Image classes agree across coordinates since the
                        // projection is a homomorphism.
                        for (auto w : *img[0]) {
                            Tuple coord(n);
                            for (int i = 0; i < n; ++i)
                                for (auto u : *img[i])
                                    if (x.part[u] == x.part[w])
                                        coord[i] = u;
                            image.push_back(out.index.at(coord));
                        }
                    }
                    sys.carrier.set_function(f, std::move(d), std::move(image));
                });
            }
        }
        return out;
    }

    // Embedding of the factor x into its power along a line: vertex v of class
    // p goes to the vertex equal to v on the moving coordinates and, at a
    // fixed coordinate i, to the class-p vertex of copy pattern[i].
    inline auto line_embedding(const PartitePower & power, const PartiteSystem & x, const CombinatorialLine & line,
        const std::vector<VertexMap> & copies) -> VertexMap
    {
        if (line.dimension() != power.dimension)
            throw std::invalid_argument("line dimension differs from the power");
        if (! line.valid(int(copies.size())))
            throw std::invalid_argument("line uses a letter outside the copies");
        VertexMap e(x.carrier.size());
        Tuple coord(power.dimension);
        for (int v = 0; v < x.carrier.size(); ++v) {
            for (int i = 0; i < power.dimension; ++i)
                coord[i] = line.pattern[i] == CombinatorialLine::moving ? v : copies[line.pattern[i]][x.part[v]];
            e[v] = power.index.at(coord);
        }
        return e;
    }

    // The copy of the base in the power spelled by a word over the copies.
    inline auto word_copy(const PartitePower & power, const std::vector<VertexMap> & copies, const Word & w) -> VertexMap
    {
        VertexMap out(power.system.base.size());
        Tuple coord(power.dimension);
        for (int p = 0; p < power.system.base.size(); ++p) {
            for (int i = 0; i < power.dimension; ++i)
                coord[i] = copies.at(w[i])[p];
            out[p] = power.index.at(coord);
        }
        return out;
    }

    // Name of the relation marking the domain of function f in the completion.
    inline auto completion_marker_name(const Language & lang, int f) -> std::string
    {
        std::string name = "Dom_" + lang.functions[f].name;
        while (lang.relation_index(name))
            name += "'";
        return name;
    }

    // Makes every function total with ordered images: a defined image becomes
    // its elements listed in increasing order, an undefined one the least
    // vertex of the argument repeated, and a marker relation records the
    // original domain. Requires an ordered structure.
    inline auto completion(const Structure & s) -> Structure
    {
        if (! s.ordered())
            throw std::invalid_argument("completion needs an ordered structure");
        Language lang;
        lang.ordered = true;
        for (auto & r : s.language.relations)
            lang.add_relation(r.name, r.arity);
        for (int f = 0; f < int(s.language.functions.size()); ++f) {
            if (s.language.functions[f].ordered_image)
                throw std::invalid_argument("completion: function " + s.language.functions[f].name +
                    " already has ordered images");
            lang.add_relation(completion_marker_name(s.language, f), s.language.functions[f].domain_arity);
        }
        for (auto & f : s.language.functions)
            lang.add_function(f.name, f.domain_arity, f.range_arity, true);

        Structure c(lang);
        c.names = s.names;
        c.rank = s.rank;
        c.relations.assign(lang.relations.size(), {});
        for (std::size_t r = 0; r < s.relations.size(); ++r)
            c.relations[r] = s.relations[r];
        auto by_order = [&](Vertex a, Vertex b) { return s.rank[a] < s.rank[b]; };
        auto order_seq = s.order_sequence();
        int first_marker = int(s.relations.size());
        for (int f = 0; f < int(s.functions.size()); ++f) {
            auto & sym = s.language.functions[f];
            for (auto & d : all_tuples(s.size(), sym.domain_arity)) {
                Tuple img;
                if (auto defined = s.image(f, d)) {
                    c.relations[first_marker + f].insert(d);
                    img = *defined;
                    std::sort(img.begin(), img.end(), by_order);
                }
                else {
                    if (d.empty() && order_seq.empty())
                        continue;
                    Vertex least = d.empty() ? order_seq.front() : *std::min_element(d.begin(), d.end(), by_order);
                    img.assign(sym.range_arity, least);
                }
                c.functions[f].emplace(d, std::move(img));
            }
        }
        return c;
    }

    // Inverse of completion: the last relations are the domain markers, one
    // per function, in function order.
    inline auto decompletion(const Structure & c) -> Structure
    {
        int nf = int(c.language.functions.size());
        int nr = int(c.language.relations.size()) - nf;
        if (nr < 0)
            throw std::invalid_argument("decompletion: missing domain markers");
        Language lang;
        lang.ordered = c.language.ordered;
        for (int r = 0; r < nr; ++r)
            lang.add_relation(c.language.relations[r].name, c.language.relations[r].arity);
        for (int f = 0; f < nf; ++f) {
            auto & sym = c.language.functions[f];
            if (! sym.ordered_image || c.language.relations[nr + f].arity != sym.domain_arity)
                throw std::invalid_argument("decompletion: " + sym.name + " is not a completed function");
            lang.add_function(sym.name, sym.domain_arity, sym.range_arity);
        }
        Structure s(lang);
        s.names = c.names;
        s.rank = c.rank;
        for (int r = 0; r < nr; ++r)
            s.relations[r] = c.relations[r];
        for (int f = 0; f < nf; ++f)
            for (auto & d : c.relations[nr + f]) {
                auto img = c.image(f, d);
                if (! img)
                    throw std::invalid_argument("decompletion: marked tuple without a value");
                s.set_function(f, d, *img);
            }
        return s;
    }

    struct ConstructionOptions
    {
        int dimension = 2;                 // exponent of each partite power
        bool check_property = true;        // certify irreducible substructures per stage
        int property_max_size = -1;        // cap on irreducible sets examined (-1 = none)
        std::vector<Structure> forbidden;  // must not embed into the result
        std::function<bool(const Structure &)> member;
        BudgetMeter * meter = nullptr;
    };

    struct StageReport
    {
        int stage = 0;
        VertexSet base_copy;            // the copy of A in C0 handled at this stage
        int restricted_vertices = 0;    // size of the picture restricted to that copy
        int letters = 0;                // copies of A in the restriction
        int power_vertices = 0;
        int lines = 0;
        int vertices = 0;               // picture size after the stage
        std::size_t tuples = 0;
        bool property_checked = false;
        bool property_complete = true;
        bool property_holds = true;
        std::string violation;
    };

    struct ConstructionResult
    {
        Structure result;
        PartiteSystem picture;              // final picture over C0
        std::vector<VertexSet> a_copies;    // copies of A in C0, lexicographic
        std::vector<VertexSet> b_copies;    // copies of B in C0, lexicographic
        std::vector<int> initial_sizes;     // picture size before each stage, then the final size
        std::vector<StageReport> stages;
        bool property_holds = true;
        bool property_complete = true;
        std::vector<std::string> forbidden_found;
        std::optional<bool> member;
    };

    namespace detail
    {
        // Every irreducible substructure of the picture meets each class at
        // most once and embeds into `target` (unordered). Ordered structures
        // only ever appear through their unordered reducts here.
        inline auto certify_irreducibles(const PartiteSystem & p, const Structure & target, int max_size,
            BudgetMeter * meter, StageReport & report) -> void
        {
            report.property_checked = true;
            IrreducibleSweep sweep;
            try {
                sweep = irreducible_substructures(p.carrier, max_size, meter);
            }
            catch (const BudgetExceeded &) {
                report.property_complete = false;
                return;
            }
            report.property_complete = sweep.complete;
            LocalRestrictor local(p.carrier);
            std::map<std::string, bool> embeds;
            for (auto & set : sweep.sets) {
                if (! transversal(p.part, set)) {
                    report.property_holds = false;
                    report.violation = "irreducible " + vertex_names(p.carrier, set) + " meets a class twice";
                    return;
                }
                auto sub = local(set);
                auto key = canonical_key(sub);
                auto it = embeds.find(key);
                if (it == embeds.end())
                    it = embeds.emplace(key, find_embedding(sub, target).has_value()).first;
                if (! it->second) {
                    report.property_holds = false;
                    report.violation = "irreducible " + vertex_names(p.carrier, set) + " does not embed into B";
                    return;
                }
            }
        }
    }

    // Partite construction of C with C -> (B)^A_2 from a base C0 with
    // C0 -> (B)^A_2, all ordered over one language. The picture starts as one
    // disjoint copy of B over each copy of B in C0. Stage k restricts the
    // picture to the classes over the k-th copy of A in C0, takes its partite
    // power, and freely amalgamates a fresh copy of the picture along every
    // line embedding of the restriction into the power. The result orders the
    // final picture by the order of C0 on classes, then by vertex index.
    inline auto partite_construction(const Structure & a, const Structure & b, const Structure & c0,
        const ConstructionOptions & options = {}) -> ConstructionResult
    {
        if (! a.ordered() || ! b.ordered() || ! c0.ordered())
            throw std::invalid_argument("partite construction: A, B and C0 must be ordered");
        if (! same_signature(a.language, b.language) || ! same_signature(b.language, c0.language))
            throw std::invalid_argument("partite construction: languages differ");
        BudgetMeter * meter = options.meter;
        ConstructionResult out;
        out.a_copies = copies(a, c0);
        out.b_copies = copies(b, c0);
        Structure base = forget_order(c0);
        Structure b_plain = forget_order(b);
        Language plain = b.language.with_order(false);

        PartiteSystem pic;
        pic.base = base;
        pic.carrier = Structure(plain);
        for (int j = 0; j < int(out.b_copies.size()); ++j) {
            auto & set = out.b_copies[j];
            auto piece = restrict_to(base, set);
            VertexMap place(piece.size());
            for (int i = 0; i < piece.size(); ++i) {
                place[i] = pic.carrier.add_vertex("b" + std::to_string(j) + "." + piece.names[i]);
                pic.part.push_back(set[i]);
            }
            detail::copy_tuples(piece, place, pic.carrier);
        }

        for (int k = 0; k < int(out.a_copies.size()); ++k) {
            out.initial_sizes.push_back(pic.carrier.size());
            if (meter)
                meter->check_vertices(pic.carrier.size(), "partite construction");
            StageReport report;
            report.stage = k + 1;
            report.base_copy = out.a_copies[k];
            if (options.check_property) {
                detail::certify_irreducibles(pic, b_plain, options.property_max_size, meter, report);
                out.property_holds = out.property_holds && report.property_holds;
                out.property_complete = out.property_complete && report.property_complete;
            }

            auto & copy = out.a_copies[k];
            std::vector<int> slot(base.size(), -1);
            for (int i = 0; i < int(copy.size()); ++i)
                slot[copy[i]] = i;
            VertexSet keep;
            for (int v = 0; v < pic.carrier.size(); ++v)
                if (slot[pic.part[v]] >= 0)
                    keep.push_back(v);
            PartiteSystem sub;
            sub.base = restrict_to(base, copy);
            sub.carrier = restrict_to(pic.carrier, keep);
            for (auto v : keep)
                sub.part.push_back(slot[pic.part[v]]);
            report.restricted_vertices = sub.carrier.size();

            auto letters = base_copies(sub, meter);
            report.letters = int(letters.size());
            if (letters.empty()) {
                report.vertices = pic.carrier.size();
                report.tuples = tuple_count(pic.carrier);
                out.stages.push_back(report);
                continue;
            }
            auto power = partite_power(sub, options.dimension, meter);
            report.power_vertices = power.system.carrier.size();

            PartiteSystem next;
            next.base = base;
            next.carrier = power.system.carrier;
            for (auto p : power.system.part)
                next.part.push_back(copy[p]);
            std::vector<int> where(pic.carrier.size(), -1);
            for (int i = 0; i < int(keep.size()); ++i)
                where[keep[i]] = i;

            int line_no = 0;
            for_each_line(
                options.dimension, int(letters.size()),
                [&](const CombinatorialLine & line) {
                    auto e = line_embedding(power, sub, line, letters);
                    std::string prefix = "s" + std::to_string(k + 1) + "l" + std::to_string(line_no) + ".";
                    VertexMap into(pic.carrier.size());
                    for (int v = 0; v < pic.carrier.size(); ++v) {
                        if (where[v] >= 0)
                            into[v] = e[where[v]];
                        else {
                            into[v] = next.carrier.add_vertex(prefix + pic.carrier.names[v]);
                            next.part.push_back(pic.part[v]);
                        }
                    }
                    if (meter)
                        meter->check_vertices(next.carrier.size(), "partite construction");
                    detail::copy_tuples(pic.carrier, into, next.carrier);
                    ++line_no;
                    return true;
                },
                meter);
            report.lines = line_no;
            pic = std::move(next);
            report.vertices = pic.carrier.size();
            report.tuples = tuple_count(pic.carrier);
            out.stages.push_back(report);
        }
        out.initial_sizes.push_back(pic.carrier.size());

        if (options.check_property) {
            StageReport last;
            last.stage = int(out.a_copies.size()) + 1;
            detail::certify_irreducibles(pic, b_plain, options.property_max_size, meter, last);
            out.property_holds = out.property_holds && last.property_holds;
            out.property_complete = out.property_complete && last.property_complete;
            if (! last.property_holds || ! last.property_complete)
                out.stages.push_back(last);
        }

        Structure result(b.language);
        result.names = pic.carrier.names;
        result.relations = pic.carrier.relations;
        result.functions = pic.carrier.functions;
        std::vector<Vertex> seq(pic.carrier.size());
        for (int v = 0; v < pic.carrier.size(); ++v)
            seq[v] = v;
        std::stable_sort(seq.begin(), seq.end(),
            [&](Vertex u, Vertex v) { return c0.rank[pic.part[u]] < c0.rank[pic.part[v]]; });
        result.rank.assign(result.names.size(), 0);
        result.set_order(seq);
        out.result = std::move(result);
        out.picture = std::move(pic);

        Structure plain_result = forget_order(out.result);
        for (auto & f : options.forbidden)
            if (find_embedding(forget_order(f), plain_result))
                out.forbidden_found.push_back(format_structure(f));
        if (options.member)
            out.member = options.member(out.result);
        return out;
    }

    // Partite systems in text form: a structure (the carrier) followed by
    // `part <base-vertex> <v> ...` lines, and optionally `base ...` lines
    // describing the base with the structure syntax. Without base lines the
    // base is the image of the carrier under the projection.
    inline auto parse_partite(const std::vector<TextLine> & lines) -> PartiteSystem
    {
        std::vector<std::pair<int, std::vector<std::string>>> part_lines;
        std::vector<TextLine> base_lines;
        for (auto & l : lines)
            if (l.tokens[0] == "lang")
                base_lines.push_back(l);
        bool has_base = false;
        auto carrier = parse_structure(lines, [&](const TextLine & l, Structure &) {
            if (l.tokens[0] == "part") {
                if (l.tokens.size() < 2)
                    throw ParseError(l.number, "part line needs a base vertex");
                part_lines.push_back({l.number, l.tokens});
            }
            else if (l.tokens[0] == "base") {
                if (l.tokens.size() < 2)
                    throw ParseError(l.number, "empty base line");
                has_base = true;
                base_lines.push_back({l.number, std::vector<std::string>(l.tokens.begin() + 1, l.tokens.end())});
            }
            else
                throw ParseError(l.number, "unknown keyword '" + l.tokens[0] + "'");
        });

        PartiteSystem x;
        x.carrier = std::move(carrier);
        x.part.assign(x.carrier.size(), -1);
        if (has_base) {
            x.base = parse_structure(base_lines);
            if (! same_signature(x.base.language, x.carrier.language))
                throw ParseError(0, "base and carrier languages differ");
        }
        else {
            x.base = Structure(x.carrier.language.with_order(false));
        }
        for (auto & [number, tokens] : part_lines) {
            auto p = x.base.vertex(tokens[1]);
            if (! p) {
                if (has_base)
                    throw ParseError(number, "unknown base vertex '" + tokens[1] + "'");
                p = x.base.add_vertex(tokens[1]);
            }
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                auto v = x.carrier.vertex(tokens[i]);
                if (! v)
                    throw ParseError(number, "unknown vertex '" + tokens[i] + "'");
                if (x.part[*v] != -1)
                    throw ParseError(number, "vertex '" + tokens[i] + "' is in two parts");
                x.part[*v] = *p;
            }
        }
        for (int v = 0; v < x.carrier.size(); ++v)
            if (x.part[v] == -1)
                throw ParseError(0, "vertex '" + x.carrier.names[v] + "' is in no part");
        if (! has_base) {
            for (int r = 0; r < int(x.carrier.relations.size()); ++r)
                for (auto & t : x.carrier.relations[r])
                    x.base.add_tuple(r, detail::apply(x.part, t));
            for (int f = 0; f < int(x.carrier.functions.size()); ++f)
                for (auto & [d, img] : x.carrier.functions[f]) {
                    auto key = detail::apply(x.part, d);
                    auto value = x.base.normalise_image(f, detail::apply(x.part, img));
                    auto [it, inserted] = x.base.functions[f].emplace(key, value);
                    if (! inserted && it->second != value)
                        throw ParseError(0, "projection is not a function for " + x.carrier.language.functions[f].name);
                }
        }
        return x;
    }

    inline auto parse_partite_string(const std::string & text) -> PartiteSystem
    {
        std::istringstream in(text);
        return parse_partite(read_lines(in));
    }

    inline auto format_partite(const PartiteSystem & x) -> std::string
    {
        std::string out = format_structure(x.carrier);
        for (int p = 0; p < x.base.size(); ++p) {
            out += "part " + x.base.names[p];
            for (int v = 0; v < x.carrier.size(); ++v)
                if (x.part[v] == p)
                    out += " " + x.carrier.names[v];
            out += "\n";
        }
        std::istringstream base_text(format_structure(x.base));
        std::string line;
        while (std::getline(base_text, line))
            if (! line.empty() && line.rfind("lang", 0) != 0)
                out += "base " + line + "\n";
        return out;
    }
}
