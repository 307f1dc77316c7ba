#include <ramsey/ramsey.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

using namespace ramsey;

namespace
{
    // Raised for bad arguments; reported with exit status 2.
    class UsageError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    auto read_text(const std::string & path) -> std::string
    {
        std::ifstream in(path, std::ios::binary);
        if (! in)
            throw UsageError("cannot open " + path);
        std::ostringstream out;
        out << in.rdbuf();
        return out.str();
    }

    auto lines_of(const std::string & text, const std::string & label) -> std::vector<TextLine>
    {
        std::istringstream in(text);
        try {
            return read_lines(in);
        }
        catch (const ParseError & e) {
            throw ParseError(e.line_number, label + ": " + e.what());
        }
    }

    // Documents in one file are separated by lines holding only "---".
    auto split_documents(const std::string & text) -> std::vector<std::string>
    {
        std::vector<std::string> out(1);
        std::istringstream in(text);
        for (std::string line; std::getline(in, line);) {
            if (line == "---")
                out.emplace_back();
            else
                out.back() += line + "\n";
        }
        return out;
    }

    auto join_documents(const std::vector<Structure> & items) -> std::string
    {
        std::string out;
        for (std::size_t i = 0; i < items.size(); ++i)
            out += (i ? "---\n" : "") + format_structure(items[i]);
        return out;
    }

    auto read_budget(const std::string & path) -> Budget
    {
        Budget b;
        auto text = read_text(path);
        for (auto & l : lines_of(text, path)) {
            if (l.tokens.size() != 2)
                throw ParseError(l.number, path + ": expected '<key> <value>'");
            std::uint64_t value = 0;
            try {
                std::size_t used = 0;
                value = std::stoull(l.tokens[1], &used);
                if (used != l.tokens[1].size())
                    throw std::invalid_argument("");
            }
            catch (const std::exception &) {
                throw ParseError(l.number, path + ": bad number '" + l.tokens[1] + "'");
            }
            auto & key = l.tokens[0];
            if (key == "max_vertices")
                b.max_vertices = value;
            else if (key == "max_colorings")
                b.max_colorings = value;
            else if (key == "max_subsets")
                b.max_subsets = value;
            else if (key == "wall_clock_ms")
                b.wall_clock = std::chrono::milliseconds(value);
            else
                throw ParseError(l.number, path + ": unknown budget key '" + key + "'");
        }
        if (! b.valid())
            throw UsageError(path + ": every budget must be positive");
        return b;
    }

    struct Context
    {
        std::string budget_path;
        int threads = -1;
        std::string out_path;
        std::string cert_path;

        std::unique_ptr<BudgetMeter> meter;
        Certificate cert;
        std::string artifact;
        std::string report;

        auto say(const std::string & line) -> void { report += line + "\n"; }

        auto input(const std::string & label, const std::string & path) -> std::string
        {
            auto text = read_text(path);
            cert.add_input(label, text);
            return text;
        }

        auto structure(const std::string & label, const std::string & path) -> Structure
        {
            auto text = input(label, path);
            return parse_structure(lines_of(text, path));
        }

        auto structures(const std::string & label, const std::string & path) -> std::vector<Structure>
        {
            auto text = input(label, path);
            std::vector<Structure> out;
            for (auto & doc : split_documents(text))
                if (doc.find_first_not_of(" \t\n") != std::string::npos)
                    out.push_back(parse_structure(lines_of(doc, path)));
            return out;
        }

        auto partite(const std::string & label, const std::string & path) -> PartiteSystem
        {
            auto text = input(label, path);
            return parse_partite(lines_of(text, path));
        }

        auto finish() -> void
        {
            std::cout << report;
            if (out_path.empty())
                std::cout << artifact;
            else {
                std::ofstream(out_path, std::ios::binary) << artifact;
            }
            cert.add_artifact("output", artifact);
            auto path = ! cert_path.empty() ? cert_path : out_path.empty() ? std::string() : out_path + ".cert";
            if (! path.empty())
                std::ofstream(path, std::ios::binary) << cert.render();
        }
    };

    auto vertex_list(const Structure & s, const std::string & text) -> VertexSet
    {
        VertexSet out;
        std::stringstream in(text);
        for (std::string name; std::getline(in, name, ',');) {
            if (name.empty())
                continue;
            auto v = s.vertex(name);
            if (! v)
                throw UsageError("unknown vertex '" + name + "'");
            out.push_back(*v);
        }
        return make_set(out);
    }

    auto map_text(const Structure & from, const Structure & to, const VertexMap & f) -> std::string
    {
        std::string out;
        for (int v = 0; v < from.size(); ++v)
            out += (v ? " " : "") + from.names[v] + "->" + (f[v] < 0 ? std::string("-") : to.names[f[v]]);
        return out;
    }

    // "a=x,b=y" or, when empty, identity on names.
    auto parse_vertex_map(const Structure & from, const Structure & to, const std::string & text) -> VertexMap
    {
        VertexMap f(from.size(), -1);
        if (text.empty()) {
            for (int v = 0; v < from.size(); ++v) {
                auto w = to.vertex(from.names[v]);
                if (! w)
                    throw UsageError("vertex '" + from.names[v] + "' has no namesake in the target");
                f[v] = *w;
            }
            return f;
        }
        std::stringstream in(text);
        for (std::string pair; std::getline(in, pair, ',');) {
            auto eq = pair.find('=');
            if (eq == std::string::npos)
                throw UsageError("map entry '" + pair + "' is not of the form a=x");
            auto v = from.vertex(pair.substr(0, eq));
            auto w = to.vertex(pair.substr(eq + 1));
            if (! v || ! w)
                throw UsageError("map entry '" + pair + "' names an unknown vertex");
            f[*v] = *w;
        }
        for (auto x : f)
            if (x < 0)
                throw UsageError("map does not cover every vertex");
        return f;
    }

    auto set_text(const Structure & s, const VertexSet & set) -> std::string { return vertex_names(s, set); }

    auto kind_of(const std::string & name) -> MapKind
    {
        if (name == "homomorphism")
            return MapKind::homomorphism;
        if (name == "monomorphism")
            return MapKind::monomorphism;
        if (name == "embedding")
            return MapKind::embedding;
        throw UsageError("unknown map kind '" + name + "'");
    }

    // ---- core ----

    auto core_closure(Context & ctx, const std::string & path, const std::string & of) -> int
    {
        auto s = ctx.structure("structure", path);
        auto set = closure_set(s, vertex_list(s, of));
        ctx.say("closure: " + set_text(s, set));
        ctx.artifact = format_structure(restrict_to(s, set));
        ctx.cert.check("closed", "closure of " + set_text(s, vertex_list(s, of)), is_closed(s, set));
        return 0;
    }

    auto core_induce(Context & ctx, const std::string & path, const std::string & on) -> int
    {
        auto s = ctx.structure("structure", path);
        auto set = vertex_list(s, on);
        bool closed = is_closed(s, set);
        ctx.say(std::string("closed: ") + (closed ? "true" : "false"));
        if (! closed) {
            ctx.say("induced substructure needs a closed set; closure is " + set_text(s, closure_set(s, set)));
            ctx.cert.check("closed", set_text(s, set), false);
            return 1;
        }
        ctx.artifact = format_structure(induced_substructure(s, set));
        ctx.cert.check("closed", set_text(s, set), true);
        return 0;
    }

    auto core_embed(Context & ctx, const std::string & a_path, const std::string & b_path, const std::string & kind)
        -> int
    {
        auto a = ctx.structure("a", a_path);
        auto b = ctx.structure("b", b_path);
        auto maps = enumerate_maps(a, b, kind_of(kind));
        std::sort(maps.begin(), maps.end());
        ctx.say(kind + "s: " + std::to_string(maps.size()));
        for (auto & f : maps)
            ctx.artifact += map_text(a, b, f) + "\n";
        ctx.cert.check("enumerated", "all " + kind + "s", true);
        return 0;
    }

    auto core_amalgam(Context & ctx, const std::vector<std::string> & paths, const std::string & map1,
        const std::string & map2) -> int
    {
        auto a = ctx.structure("a", paths[0]);
        auto b1 = ctx.structure("b1", paths[1]);
        auto b2 = ctx.structure("b2", paths[2]);
        auto alpha1 = parse_vertex_map(a, b1, map1);
        auto alpha2 = parse_vertex_map(a, b2, map2);
        auto am = free_amalgam(a, b1, b2, alpha1, alpha2);
        ctx.artifact = format_structure(am.result);
        ctx.say("vertices: " + std::to_string(am.result.size()));
        ctx.say("beta2: " + map_text(b2, am.result, am.beta2));
        ctx.cert.check("embeddings", "alpha1 and alpha2 certified as embeddings", true);
        return 0;
    }

    auto core_irreducible(Context & ctx, const std::string & path) -> int
    {
        auto s = ctx.structure("structure", path);
        bool cuts = is_irreducible_by_cuts(s, ctx.meter.get());
        ctx.say(std::string("irreducible: ") + (cuts ? "true" : "false"));
        ctx.cert.check("irreducible", "all closed cuts", cuts);
        if (s.language.all_functions_unary()) {
            bool unary = is_irreducible_unary(forget_order(s));
            if (! s.ordered() && unary != cuts)
                throw std::logic_error("irreducibility routes disagree");
        }
        return 0;
    }

    auto core_aut(Context & ctx, const std::string & path) -> int
    {
        auto s = ctx.structure("structure", path);
        auto autos = automorphisms(s);
        std::sort(autos.begin(), autos.end());
        ctx.say("automorphisms: " + std::to_string(autos.size()));
        for (auto & g : autos)
            ctx.artifact += map_text(s, s, g) + "\n";
        ctx.cert.check("group", "all automorphisms", true);
        return 0;
    }

    // ---- partite ----

    auto partite_power_cmd(Context & ctx, const std::string & path, int n) -> int
    {
        auto x = ctx.partite("system", path);
        if (auto v = validate_partite(x); ! v) {
            ctx.say("invalid partite system: " + v.reason);
            ctx.cert.check("valid-input", "projection and transversality", false);
            return 1;
        }
        auto power = partite_power(x, n, ctx.meter.get());
        ctx.artifact = format_partite(power.system);
        bool valid = validate_partite(power.system).ok;
        ctx.say("vertices: " + std::to_string(power.system.carrier.size()));
        ctx.cert.check("valid-power", "projection and transversality of the power", valid);
        return valid ? 0 : 1;
    }

    auto partite_line_cmd(Context & ctx, const std::string & path, int n) -> int
    {
        auto x = ctx.partite("system", path);
        auto copies = base_copies(x, ctx.meter.get());
        auto power = partite_power(x, n, ctx.meter.get());
        auto lines = all_lines(n, int(copies.size()));
        ctx.say("copies: " + std::to_string(copies.size()));
        ctx.say("lines: " + std::to_string(lines.size()));
        bool ok = true;
        for (auto & line : lines) {
            auto e = line_embedding(power, x, line, copies);
            bool embeds = check_map(x.carrier, power.system.carrier, e) == MapKind::embedding;
            for (int v = 0; v < x.carrier.size(); ++v)
                embeds = embeds && power.system.part[e[v]] == x.part[v];
            ok = ok && embeds;
            ctx.artifact += line.to_string() + " | " + map_text(x.carrier, power.system.carrier, e) + "\n";
        }
        ctx.cert.check("line-embeddings", "every line of " + std::to_string(copies.size()) + " letters in dimension " +
            std::to_string(n), ok);
        return ok ? 0 : 1;
    }

    auto partite_verify_arrow(Context & ctx, const std::vector<std::string> & paths, int k) -> int
    {
        auto c = ctx.structure("c", paths[0]);
        auto b = ctx.structure("b", paths[1]);
        auto a = ctx.structure("a", paths[2]);
        auto r = verify_arrow(c, b, a, k, ctx.meter.get());
        ctx.say(std::string("arrow: ") + (r.arrows ? "true" : "false"));
        ctx.say("copies of A: " + std::to_string(r.a_copies.size()));
        ctx.cert.check("arrow", "every " + std::to_string(k) + "-colouring of copies of A", r.arrows);
        if (! r.arrows) {
            std::string witness;
            for (std::size_t i = 0; i < r.a_copies.size(); ++i)
                witness += set_text(c, r.a_copies[i]) + " colour " + std::to_string(r.coloring[i]) + "\n";
            ctx.artifact = witness;
            ctx.cert.counterexamples.push_back(witness);
            return 1;
        }
        return 0;
    }

    auto partite_construct(Context & ctx, const std::vector<std::string> & paths, int n, bool check) -> int
    {
        auto a = ctx.structure("a", paths[0]);
        auto b = ctx.structure("b", paths[1]);
        Structure c0;
        if (paths.size() > 2)
            c0 = ctx.structure("c0", paths[2]);
        else
            c0 = base_ramsey_bruteforce(a, b, 2, *ctx.meter).result;
        ConstructionOptions o;
        o.dimension = n;
        o.check_property = check;
        o.meter = ctx.meter.get();
        auto r = partite_construction(a, b, c0, o);
        ctx.artifact = format_structure(r.result);
        ctx.say("stages: " + std::to_string(r.stages.size()));
        for (auto & s : r.stages)
            ctx.say("stage " + std::to_string(s.stage) + ": vertices " + std::to_string(s.vertices) + " lines " +
                std::to_string(s.lines));
        ctx.say("vertices: " + std::to_string(r.result.size()));
        if (check) {
            if (r.property_complete)
                ctx.cert.check("irreducible-substructures", "every stage picture", r.property_holds);
            else
                ctx.cert.partial("irreducible-substructures", "every stage picture", "sweep cut by budget");
        }
        return r.property_holds ? 0 : 1;
    }

    auto partite_complete(Context & ctx, const std::string & path, bool inverse) -> int
    {
        auto s = ctx.structure("structure", path);
        auto r = inverse ? decompletion(s) : completion(s);
        ctx.artifact = format_structure(r);
        bool round = inverse || decompletion(r) == s;
        ctx.cert.check("round-trip", "decompletion of the completion", round);
        return round ? 0 : 1;
    }

    // ---- order ----

    auto universe_for(Context & ctx, const std::string & kind, const std::string & lang_path, int n)
        -> std::vector<Structure>
    {
        if (kind == "forest")
            return forests_up_to(n, ctx.meter.get());
        if (kind == "graph")
            return graphs_up_to(n, ctx.meter.get());
        if (kind != "any")
            throw UsageError("unknown universe kind '" + kind + "'");
        if (lang_path.empty())
            throw UsageError("--kind any needs a language file");
        auto lang = ctx.structure("language", lang_path).language;
        return structures_up_to(lang, n, {}, ctx.meter.get());
    }

    auto order_analyze(Context & ctx, const std::string & path) -> int
    {
        auto s = ctx.structure("structure", path);
        auto info = analyze(s);
        for (std::size_t i = 0; i < info.components.size(); ++i) {
            auto & comp = info.components[i];
            ctx.artifact += "component " + std::to_string(i) + " " + set_text(s, comp) + " level " +
                std::to_string(info.level[comp[0]]) + " closure " + set_text(s, info.closure[comp[0]]) + "\n";
        }
        for (auto [i, j] : info.homologous)
            ctx.artifact += "homologous " + std::to_string(i) + " " + std::to_string(j) + "\n";
        if (info.is_extension())
            ctx.artifact += "extension top " + std::to_string(info.top) + " core " + set_text(s, info.core) + "\n";
        if (s.ordered()) {
            std::string why;
            bool ok = respects_preorder(s, &why);
            ctx.say(std::string("respects preorder: ") + (ok ? "true" : "false") + (ok ? "" : " (" + why + ")"));
        }
        ctx.say("components: " + std::to_string(info.components.size()));
        return 0;
    }

    auto order_build_class(Context & ctx, const std::string & kind, const std::string & lang_path, int n) -> int
    {
        auto universe = universe_for(ctx, kind, lang_path, n);
        auto c = build_admissible_class(universe, ctx.meter.get());
        auto members = c.members;
        std::sort(members.begin(), members.end(), [](const Structure & x, const Structure & y) {
            auto kx = canonical_key(x), ky = canonical_key(y);
            return x.size() != y.size() ? x.size() < y.size() : kx < ky;
        });
        std::vector<Structure> forms;
        for (auto & m : members)
            forms.push_back(canonical_form(m));
        ctx.artifact = join_documents(forms);
        ctx.say("universe: " + std::to_string(universe.size()));
        ctx.say("admitted: " + std::to_string(members.size()));
        return 0;
    }

    auto admitted_from(Context & ctx, const std::string & class_path) -> OrderingClass
    {
        if (class_path.empty())
            return free_orderings();
        auto keys = std::make_shared<std::set<std::string>>();
        for (auto & s : ctx.structures("class", class_path))
            keys->insert(canonical_key(s));
        return [keys](const Structure & s) { return keys->count(canonical_key(s)) != 0; };
    }

    auto order_check_axioms(Context & ctx, const std::string & class_path, const std::string & kind,
        const std::string & lang_path, int n) -> int
    {
        auto members = ctx.structures("class", class_path);
        auto universe = universe_for(ctx, kind, lang_path, n);
        auto r = check_admissibility_axioms(members, universe, ctx.meter.get());
        bool ok = true;
        for (int i = 1; i <= 6; ++i) {
            bool axiom = r.ok(i);
            ok = ok && axiom;
            ctx.say("A" + std::to_string(i) + ": " + (axiom ? "pass" : "fail"));
            ctx.cert.check("A" + std::to_string(i), i == 5 ? "inside the universe" : "all members", axiom);
            for (auto & v : r.violations[i - 1])
                ctx.cert.counterexamples.push_back("A" + std::to_string(i) + ": " + v);
        }
        return ok ? 0 : 1;
    }

    auto order_verify_op(Context & ctx, const std::string & a_path, const std::string & b_path,
        const std::string & class_path) -> int
    {
        auto a = ctx.structure("a", a_path);
        auto b = ctx.structure("b", b_path);
        auto admitted = admitted_from(ctx, class_path);
        std::vector<Structure> a_orderings;
        if (a.ordered())
            a_orderings.push_back(a);
        else
            for (auto & o : orderings_of(a, ctx.meter.get()))
                if (admitted(o))
                    a_orderings.push_back(o);
        auto r = verify_ordering_property(a_orderings, b, admitted, ctx.meter.get());
        ctx.say(std::string("ordering property: ") + (r.holds ? "true" : "false"));
        ctx.say("orderings of B checked: " + std::to_string(r.orderings_checked));
        ctx.cert.check("ordering-property", "every admitted ordering of B", r.holds);
        if (! r.holds) {
            ctx.artifact = format_structure(*r.failing) + "---\n" + format_structure(*r.missing);
            ctx.cert.counterexamples.push_back(ctx.artifact);
            return 1;
        }
        return 0;
    }

    auto order_witness_b0(Context & ctx, const std::string & a_path, const std::string & class_path) -> int
    {
        auto a = ctx.structure("a", a_path);
        OrderingClass admitted = [](const Structure & s) { return respects_preorder(s); };
        if (! class_path.empty())
            admitted = admitted_from(ctx, class_path);
        auto w = ordering_witness_b0(a, admitted, ctx.meter.get());
        ctx.artifact = format_structure(w.b0);
        ctx.say("reorderings: " + std::to_string(w.reorderings.size()));
        ctx.say("vertices: " + std::to_string(w.b0.size()));
        return 0;
    }

    // ---- eppa ----

    auto eppa_reduct(Context & ctx, const std::string & path) -> int
    {
        auto s = ctx.structure("structure", path);
        auto r = relational_reduct(s);
        ctx.artifact = format_structure(r.reduct);
        bool same = automorphisms(s).size() == automorphisms(r.reduct).size();
        ctx.cert.check("same-automorphisms", "automorphism counts of structure and reduct", same);
        return same ? 0 : 1;
    }

    auto base_for(Context & ctx, const Structure & a, const std::string & base_path, int max_vertices) -> EppaBase
    {
        auto reduct = relational_reduct(a).reduct;
        if (base_path.empty())
            return base_eppa_bruteforce(reduct, *ctx.meter, max_vertices);
        auto given = ctx.structure("base", base_path);
        return make_eppa_base(reduct, given, parse_vertex_map(reduct, given, ""), ctx.meter.get());
    }

    auto eppa_base(Context & ctx, const std::string & path, int max_vertices) -> int
    {
        auto a = ctx.structure("structure", path);
        auto base = base_for(ctx, a, "", max_vertices);
        ctx.artifact = format_structure(base.structure);
        ctx.say("vertices: " + std::to_string(base.structure.size()));
        ctx.say("automorphisms: " + std::to_string(base.automorphisms.size()));
        ctx.say("embedding: " + map_text(relational_reduct(a).reduct, base.structure, base.embedding));
        ctx.cert.check("base-extends-partial-isomorphisms", "every partial isomorphism of the reduct", true);
        return 0;
    }

    auto record_eppa(Context & ctx, const EppaCertificate & c) -> bool
    {
        ctx.cert.check("phi-embedding", "A into C", c.phi_embedding);
        ctx.cert.check("phi-generic", "image of A", c.phi_generic);
        ctx.cert.check("extension", std::to_string(c.partial_automorphisms) + " partial automorphisms of phi(A)",
            c.extended == c.partial_automorphisms);
        ctx.cert.check("coherent-base", "base automorphisms for partial automorphisms of A", c.coherent_base);
        ctx.cert.check("coherence", std::to_string(c.coherent_triples) + " coherent triples",
            c.coherent_lifted == c.coherent_triples);
        auto scope = std::to_string(c.faithful.irreducibles) + " irreducible substructures";
        if (c.faithful.complete)
            ctx.cert.check("faithful", scope, c.faithful.failures.empty() &&
                c.faithful.mapped == c.faithful.irreducibles);
        else
            ctx.cert.partial("faithful", scope, "irreducible substructures above the size cap");
        for (auto & f : c.failures)
            ctx.cert.counterexamples.push_back(f);
        for (auto & f : c.faithful.failures)
            ctx.cert.counterexamples.push_back(f);
        ctx.say("partial automorphisms: " + std::to_string(c.partial_automorphisms) + " extended " +
            std::to_string(c.extended));
        ctx.say("coherent triples: " + std::to_string(c.coherent_triples) + " lifted " +
            std::to_string(c.coherent_lifted));
        ctx.say("irreducibles: " + std::to_string(c.faithful.irreducibles) + " mapped " +
            std::to_string(c.faithful.mapped));
        return c.ok();
    }

    auto eppa_extend(Context & ctx, const std::string & path, const std::string & base_path, int max_vertices,
        const std::string & certify, int cap) -> int
    {
        auto a = ctx.structure("structure", path);
        auto base = base_for(ctx, a, base_path, max_vertices);
        auto x = build_eppa_extension(a, base, ctx.meter.get());
        ctx.artifact = format_structure(x.c);
        ctx.say("vertices: " + std::to_string(x.c.size()));
        ctx.say("phi: " + map_text(a, x.c, x.phi));
        if (certify == "none")
            return 0;
        if (certify != "full" && certify != "sample")
            throw UsageError("--certify takes full, sample or none");
        auto c = certify_eppa(x, certify == "sample" ? std::max(cap, 1) : cap, ctx.meter.get());
        return record_eppa(ctx, c) ? 0 : 1;
    }

    // ---- classes ----

    auto classes_encode(Context & ctx, const std::string & kind, const std::string & path, int k, int r, int t) -> int
    {
        auto text = ctx.input("object", path);
        auto lines = lines_of(text, path);
        Structure s;
        if (kind == "korientation") {
            auto g = parse_digraph(lines);
            s = encode_k_orientation(g, k);
            ctx.cert.check("round-trip", "decode of the encoding", decode_k_orientation(s) == g);
        }
        else if (kind == "steiner") {
            auto h = parse_hypergraph(lines);
            s = encode_steiner(h, r, t);
            ctx.cert.check("round-trip", "decode of the encoding", decode_steiner(s) == h);
        }
        else if (kind == "bowtie") {
            auto g = parse_graph(lines);
            s = encode_bowtie_plus(g);
            ctx.cert.check("round-trip", "decode of the encoding", decode_bowtie_plus(s) == g);
        }
        else
            throw UsageError("unknown kind '" + kind + "'");
        ctx.artifact = format_structure(s);
        return ctx.cert.failed() ? 1 : 0;
    }

    auto classes_decode(Context & ctx, const std::string & kind, const std::string & path) -> int
    {
        auto s = ctx.structure("structure", path);
        if (kind == "korientation")
            ctx.artifact = format_digraph(decode_k_orientation(s));
        else if (kind == "steiner")
            ctx.artifact = format_hypergraph(decode_steiner(s));
        else if (kind == "bowtie")
            ctx.artifact = format_graph(decode_bowtie_plus(s));
        else
            throw UsageError("unknown kind '" + kind + "'");
        return 0;
    }

    auto classes_goodify(Context & ctx, const std::string & path) -> int
    {
        auto text = ctx.input("graph", path);
        auto g = parse_graph(lines_of(text, path));
        if (auto m = detect_bowtie(g)) {
            ctx.say("bowtie: " + map_text(graph_structure(bowtie()), graph_structure(g), *m));
            ctx.cert.check("bowtie-free-input", "monomorphism search", false);
            return 1;
        }
        auto h = goodify(g);
        ctx.artifact = format_graph(h);
        ctx.say("added vertices: " + std::to_string(h.size() - g.size()));
        ctx.cert.check("good", "every vertex in a chimney or a K4", is_good(h));
        ctx.cert.check("bowtie-free", "monomorphism search", ! detect_bowtie(h));
        return ctx.cert.failed() ? 1 : 0;
    }

    auto classes_chimney(Context & ctx, int n) -> int
    {
        ctx.artifact = format_graph(chimney(n));
        return 0;
    }

    auto classes_sweep(Context & ctx, const std::string & kind, int n, int k, int r, int t, int cap, bool drop) -> int
    {
        std::vector<Structure> members;
        std::function<bool(const Structure &)> member;
        std::string scope;
        if (kind == "korientation") {
            for (auto & g : k_orientations_up_to(k, n, ctx.meter.get()))
                members.push_back(encode_k_orientation(g, k));
            member = is_orientation_structure;
            scope = std::to_string(k) + "-orientations up to " + std::to_string(n) + " vertices";
        }
        else if (kind == "steiner") {
            for (auto & h : steiner_systems_up_to(r, t, n, ctx.meter.get()))
                members.push_back(encode_steiner(h, r, t));
            member = steiner_axioms_hold;
            scope = "(" + std::to_string(r) + "," + std::to_string(t) + ")-systems up to " + std::to_string(n) +
                " vertices";
        }
        else if (kind == "bowtie") {
            members = bowtie_class_members(n, cap, drop, ctx.meter.get());
            member = [drop](const Structure & s) { return is_bowtie_class_member(s, drop); };
            scope = "closed substructures up to " + std::to_string(cap) +
                " vertices of encoded goodified bowtie-free graphs up to " + std::to_string(n) + " vertices" +
                (drop ? " without base partners" : "");
        }
        else
            throw UsageError("unknown kind '" + kind + "'");
        auto report = amalgamation_closure_check(members, member, ctx.meter.get(), 20, ctx.threads);
        ctx.say("members: " + std::to_string(report.members));
        ctx.say("amalgams: " + std::to_string(report.amalgams));
        ctx.say("violations: " + std::to_string(report.violations.size()) + (report.stopped_early ? " (stopped)" : ""));
        ctx.artifact = join_documents(members);
        ctx.cert.check("free-amalgamation-closure", scope, report.ok());
        for (auto & v : report.violations)
            ctx.cert.counterexamples.push_back(v);
        return report.ok() ? 0 : 1;
    }
}

auto main(int argc, char ** argv) -> int
{
    CLI::App app{"Structures with functions: closures, partite constructions, orderings, EPPA and class encodings"};
    app.require_subcommand(1);
    Context ctx;
    app.add_option("--budget", ctx.budget_path, "budget file (keys max_vertices, max_colorings, max_subsets, wall_clock_ms)")
        ->envname("RAMSEY_BUDGET");
    app.add_option("--threads", ctx.threads, "worker threads, 0 = all hardware threads");
    app.add_option("-o,--out", ctx.out_path, "write the artifact here instead of stdout");
    app.add_option("--cert", ctx.cert_path, "certificate file (default: <out>.cert when --out is given)");
    app.fallthrough();

    std::function<int()> run;
    std::string path, path2, map1, map2, kind, lang_path, class_path, base_path, of, certify = "full";
    std::vector<std::string> paths;
    int n = 2, k = 2, r = 3, t = 2, cap = -1, max_vertices = 6;
    bool flag = false;

    auto * core = app.add_subcommand("core", "closures, substructures, maps, amalgams, irreducibility");
    core->require_subcommand(1);
    {
        auto * c = core->add_subcommand("closure", "closure of a vertex set");
        c->add_option("file", path)->required();
        c->add_option("--of", of, "comma-separated vertex names")->required();
        c->callback([&] { run = [&] { return core_closure(ctx, path, of); }; });

        c = core->add_subcommand("induce", "substructure induced on a closed vertex set");
        c->add_option("file", path)->required();
        c->add_option("--on", of, "comma-separated vertex names")->required();
        c->callback([&] { run = [&] { return core_induce(ctx, path, of); }; });

        c = core->add_subcommand("embed", "all maps of one kind from A to B");
        c->add_option("a", path)->required();
        c->add_option("b", path2)->required();
        kind = "embedding";
        c->add_option("--kind", kind, "homomorphism, monomorphism or embedding");
        c->callback([&] { run = [&] { return core_embed(ctx, path, path2, kind); }; });

        c = core->add_subcommand("amalgam", "free amalgam of B1 and B2 over A");
        c->add_option("files", paths, "a b1 b2")->required()->expected(3);
        c->add_option("--map1", map1, "embedding of A into B1 as a=x,...; default matches names");
        c->add_option("--map2", map2, "embedding of A into B2");
        c->callback([&] { run = [&] { return core_amalgam(ctx, paths, map1, map2); }; });

        c = core->add_subcommand("irreducible", "decide irreducibility");
        c->add_option("file", path)->required();
        c->callback([&] { run = [&] { return core_irreducible(ctx, path); }; });

        c = core->add_subcommand("aut", "automorphism group");
        c->add_option("file", path)->required();
        c->callback([&] { run = [&] { return core_aut(ctx, path); }; });
    }

    auto * partite = app.add_subcommand("partite", "partite systems, powers, arrows and the partite construction");
    partite->require_subcommand(1);
    {
        auto * c = partite->add_subcommand("power", "partite power");
        c->add_option("file", path)->required();
        c->add_option("--n", n, "dimension")->check(CLI::PositiveNumber);
        c->callback([&] { run = [&] { return partite_power_cmd(ctx, path, n); }; });

        c = partite->add_subcommand("line", "line embeddings into the partite power");
        c->add_option("file", path)->required();
        c->add_option("--n", n, "dimension")->check(CLI::PositiveNumber);
        c->callback([&] { run = [&] { return partite_line_cmd(ctx, path, n); }; });

        c = partite->add_subcommand("verify-arrow", "decide C -> (B)^A_k");
        c->add_option("files", paths, "c b a")->required()->expected(3);
        c->add_option("--k", k, "colours")->check(CLI::PositiveNumber);
        c->callback([&] { run = [&] { return partite_verify_arrow(ctx, paths, k); }; });

        c = partite->add_subcommand("construct", "partite construction from A, B and C0 (searched when omitted)");
        c->add_option("files", paths, "a b [c0]")->required()->expected(2, 3);
        c->add_option("--n", n, "dimension of each partite power")->check(CLI::PositiveNumber);
        c->add_flag("--no-check", flag, "skip the irreducible substructure certificate");
        c->callback([&] { run = [&] { return partite_construct(ctx, paths, n, ! flag); }; });

        c = partite->add_subcommand("complete", "make every function total (or undo with --inverse)");
        c->add_option("file", path)->required();
        c->add_flag("--inverse", flag);
        c->callback([&] { run = [&] { return partite_complete(ctx, path, flag); }; });
    }

    auto * order = app.add_subcommand("order", "closure analysis and admissible orderings");
    order->require_subcommand(1);
    {
        auto * c = order->add_subcommand("analyze", "components, levels and homology");
        c->add_option("file", path)->required();
        c->callback([&] { run = [&] { return order_analyze(ctx, path); }; });

        c = order->add_subcommand("build-class", "greedy admissible class over a universe");
        c->add_option("langfile", lang_path, "language file for --kind any");
        c->add_option("--max-n", n, "largest structure size")->required();
        c->add_option("--kind", kind, "forest, graph or any")->required();
        c->callback([&] { run = [&] { return order_build_class(ctx, kind, lang_path, n); }; });

        c = order->add_subcommand("check-axioms", "check the six admissibility axioms");
        c->add_option("--class", class_path)->required();
        c->add_option("langfile", lang_path);
        c->add_option("--max-n", n)->required();
        c->add_option("--kind", kind, "forest, graph or any")->required();
        c->callback([&] { run = [&] { return order_check_axioms(ctx, class_path, kind, lang_path, n); }; });

        c = order->add_subcommand("verify-op", "every admitted ordering of B contains the orderings of A");
        c->add_option("a", path)->required();
        c->add_option("b", path2)->required();
        c->add_option("--class", class_path, "class file; default admits every ordering");
        c->callback([&] { run = [&] { return order_verify_op(ctx, path, path2, class_path); }; });

        c = order->add_subcommand("witness-b0", "disjoint union of the qualifying reorderings of A");
        c->add_option("a", path)->required();
        c->add_option("--class", class_path, "class file; default admits orderings respecting the preorder");
        c->callback([&] { run = [&] { return order_witness_b0(ctx, path, class_path); }; });
    }

    auto * eppa = app.add_subcommand("eppa", "extension property for partial automorphisms");
    eppa->require_subcommand(1);
    {
        auto * c = eppa->add_subcommand("reduct", "relational reduct");
        c->add_option("file", path)->required();
        c->callback([&] { run = [&] { return eppa_reduct(ctx, path); }; });

        c = eppa->add_subcommand("base", "search a relational base extension");
        c->add_option("file", path)->required();
        c->add_option("--max-vertices", max_vertices)->check(CLI::PositiveNumber);
        c->callback([&] { run = [&] { return eppa_base(ctx, path, max_vertices); }; });

        c = eppa->add_subcommand("extend", "build the extension C and certify it");
        c->add_option("file", path)->required();
        c->add_option("--base", base_path, "base structure; searched when omitted");
        c->add_option("--max-vertices", max_vertices)->check(CLI::PositiveNumber);
        c->add_option("--certify", certify, "full, sample or none");
        c->add_option("--cap", cap, "size cap for irreducible substructures");
        c->callback([&] { run = [&] { return eppa_extend(ctx, path, base_path, max_vertices, certify, cap); }; });

        c = eppa->add_subcommand("certify", "build and fully certify the extension");
        c->add_option("file", path)->required();
        c->add_option("--base", base_path);
        c->add_option("--max-vertices", max_vertices)->check(CLI::PositiveNumber);
        c->add_option("--cap", cap);
        c->callback([&] { run = [&] { return eppa_extend(ctx, path, base_path, max_vertices, "full", cap); }; });
    }

    auto * classes = app.add_subcommand("classes", "k-orientations, Steiner systems and bowtie-free graphs");
    classes->require_subcommand(1);
    {
        auto kinds = CLI::IsMember({"korientation", "steiner", "bowtie"});
        auto * c = classes->add_subcommand("encode", "encode a digraph, hypergraph or graph");
        c->add_option("file", path)->required();
        c->add_option("--kind", kind)->required()->check(kinds);
        c->add_option("--k", k)->check(CLI::PositiveNumber);
        c->add_option("--r", r)->check(CLI::PositiveNumber);
        c->add_option("--t", t)->check(CLI::PositiveNumber);
        c->callback([&] { run = [&] { return classes_encode(ctx, kind, path, k, r, t); }; });

        c = classes->add_subcommand("decode", "decode an encoded structure");
        c->add_option("file", path)->required();
        c->add_option("--kind", kind)->required()->check(kinds);
        c->callback([&] { run = [&] { return classes_decode(ctx, kind, path); }; });

        c = classes->add_subcommand("goodify", "extend a bowtie-free graph to a good one");
        c->add_option("file", path)->required();
        c->callback([&] { run = [&] { return classes_goodify(ctx, path); }; });

        c = classes->add_subcommand("chimney", "the chimney graph with n triangles");
        c->add_option("--n", n)->required();
        c->callback([&] { run = [&] { return classes_chimney(ctx, n); }; });

        c = classes->add_subcommand("sweep", "free amalgamation closure sweep");
        c->add_option("--kind", kind)->required()->check(kinds);
        c->add_option("--max-n", n)->required();
        c->add_option("--k", k)->check(CLI::PositiveNumber);
        c->add_option("--r", r)->check(CLI::PositiveNumber);
        c->add_option("--t", t)->check(CLI::PositiveNumber);
        c->add_option("--cap", cap, "bowtie: largest closed substructure kept")->default_val(6);
        c->add_flag("--drop-base-partner", flag, "bowtie: leave F1 empty");
        c->callback([&] { run = [&] { return classes_sweep(ctx, kind, n, k, r, t, cap, flag); }; });
    }

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError & e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Budget budget;
        if (! ctx.budget_path.empty())
            budget = read_budget(ctx.budget_path);
        ctx.meter = std::make_unique<BudgetMeter>(budget);
        ctx.threads = resolve_threads(ctx.threads);
        ctx.cert.command.clear();
        for (int i = 1; i < argc; ++i) {
            std::string arg = argv[i];
            // Settings that do not change the result stay out of the record.
            bool setting = false;
            for (auto name : {"--threads", "--budget", "--out", "--cert", "-o"})
                setting = setting || arg == name || arg.rfind(std::string(name) + "=", 0) == 0;
            if (setting) {
                if (arg.find('=') == std::string::npos)
                    ++i;
                continue;
            }
            ctx.cert.command += (ctx.cert.command.empty() ? "" : " ") + arg;
        }
        int status = run();
        ctx.finish();
        return status;
    }
    catch (const ParseError & e) {
        std::cerr << "parse error: " << e.what() << "\n";
    }
    catch (const BudgetExceeded & e) {
        std::cerr << e.what() << "\n";
    }
    catch (const UsageError & e) {
        std::cerr << "usage error: " << e.what() << "\n";
    }
    catch (const std::invalid_argument & e) {
        std::cerr << "invalid input: " << e.what() << "\n";
    }
    catch (const std::exception & e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return 2;
}
