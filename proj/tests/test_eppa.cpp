#include "support.hpp"

#include <ramsey/eppa.hpp>
#include <ramsey/text_format.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace ramsey;
using namespace support;

namespace
{
    auto arc() -> Structure
    {
        return parse_structure_string("lang rel E 2\nvertex a b\nrel E a b\n");
    }

    auto forest_edge() -> Structure
    {
        return parse_structure_string("lang fun F 1 1\nvertex a b\nfun F a : b\n");
    }

    auto unary_language() -> Language
    {
        Language l;
        l.add_relation("R", 2);
        l.add_function("F", 1, 1);
        l.add_function("G", 1, 2);
        return l;
    }

    // Partial automorphisms straight from the definition: injective maps
    // between closed sets that are embeddings of the induced structures.
    auto partial_oracle(const Structure & s) -> std::set<PartialMap>
    {
        std::set<PartialMap> out;
        for (auto & dom : all_subsets(s.size())) {
            if (! closed_oracle(s, dom))
                continue;
            for (auto & e : maps_oracle(restrict_to(s, dom), s, MapKind::embedding)) {
                PartialMap p(s.size(), -1);
                for (std::size_t i = 0; i < dom.size(); ++i)
                    p[dom[i]] = e[i];
                out.insert(p);
            }
        }
        return out;
    }

    auto automorphism_oracle(const Structure & s) -> std::vector<VertexMap>
    {
        return maps_oracle(s, s, MapKind::embedding);
    }

    auto extended_by_some(const PartialMap & p, const std::vector<VertexMap> & autos) -> bool
    {
        return std::any_of(autos.begin(), autos.end(), [&](const VertexMap & g) { return extends(g, p); });
    }

    auto build(const Structure & a) -> EppaExtension
    {
        BudgetMeter meter;
        auto base = base_eppa_bruteforce(relational_reduct(a).reduct, meter);
        return build_eppa_extension(a, base, &meter);
    }
}

TEST(Reduct, FunctionFreeIsUnchanged)
{
    auto g = graph(3, {{0, 1}});
    auto r = relational_reduct(g);
    EXPECT_EQ(r.reduct, g);
    EXPECT_TRUE(r.function_relation.empty());
}

TEST(Reduct, FunctionBecomesMembershipRelation)
{
    auto r = relational_reduct(forest_edge());
    ASSERT_EQ(r.function_relation.size(), 1u);
    EXPECT_EQ(r.reduct.language.relations[0].name, "R_F");
    EXPECT_EQ(r.reduct.relations[0], (std::set<Tuple>{{0, 1}}));

    auto s = parse_structure_string("lang fun G 1 2\nvertex v u w\nfun G v : u w\n");
    EXPECT_EQ(relational_reduct(s).reduct.relations[0], (std::set<Tuple>{{0, 1}, {0, 2}}));
}

TEST(Reduct, NameClashGetsPrimed)
{
    auto s = parse_structure_string("lang rel R_F 1\nlang fun F 1 1\nvertex a\n");
    EXPECT_EQ(relational_reduct(s).reduct.language.relations[1].name, "R_F'");
}

TEST(Reduct, RejectsBinaryFunctions)
{
    auto s = parse_structure_string("lang fun F 2 1\nvertex a\n");
    EXPECT_THROW(relational_reduct(s), std::invalid_argument);
}

TEST(Reduct, AutomorphismsAndPartialMapsCarryOver)
{
    std::mt19937 rng(41);
    for (int round = 0; round < 120; ++round) {
        auto s = random_structure(unary_language(), 1 + round % 5, rng, 0.3);
        auto r = relational_reduct(s).reduct;
        auto as = automorphism_oracle(s);
        auto ar = automorphism_oracle(r);
        std::sort(as.begin(), as.end());
        std::sort(ar.begin(), ar.end());
        EXPECT_EQ(as, ar) << format_structure(s);
        // Every partial automorphism of s is a partial isomorphism of r.
        auto pr = partial_oracle(r);
        for (auto & p : partial_oracle(s))
            EXPECT_TRUE(pr.count(p)) << format_structure(s);
    }
}

TEST(PartialAutomorphisms, MatchDefinition)
{
    std::mt19937 rng(43);
    for (int round = 0; round < 120; ++round) {
        auto s = random_structure(micro_language(), 1 + round % 4, rng, 0.35);
        auto mine = partial_automorphisms(s);
        EXPECT_EQ(std::set<PartialMap>(mine.begin(), mine.end()), partial_oracle(s));
        for (auto & p : mine)
            EXPECT_TRUE(is_partial_automorphism(s, p));
    }
}

TEST(PartialAutomorphisms, CoherentTriplesCompose)
{
    auto maps = partial_automorphisms(graph(2, {{0, 1}}));
    EXPECT_EQ(maps.size(), 7u);
    auto triples = coherent_triples(maps);
    for (auto & t : triples)
        EXPECT_EQ(compose_partial(maps[t[1]], maps[t[0]]), maps[t[2]]);
    // Pairs with range f = domain g: empty maps, one-vertex maps into each
    // vertex composed with maps out of it, and the two full maps.
    EXPECT_EQ(triples.size(), 1u + 4 + 4 + 4);
}

TEST(EppaBase, RigidStructureNeedsNothing)
{
    auto s = parse_structure_string("lang rel E 2\nvertex a\nrel E a a\n");
    BudgetMeter meter;
    auto base = base_eppa_bruteforce(s, meter);
    EXPECT_EQ(base.structure, s);
}

TEST(EppaBase, EdgeIsItsOwnExtension)
{
    BudgetMeter meter;
    auto g = graph(2, {{0, 1}});
    EXPECT_EQ(base_eppa_bruteforce(g, meter).structure, g);
}

TEST(EppaBase, ArcNeedsADirectedTriangle)
{
    BudgetMeter meter;
    auto base = base_eppa_bruteforce(arc(), meter);
    auto cycle = parse_structure_string("lang rel E 2\nvertex p q r\nrel E p q\nrel E q r\nrel E r p\n");
    EXPECT_EQ(base.structure.size(), 3);
    EXPECT_TRUE(is_isomorphic(base.structure, cycle));
    auto autos = automorphism_oracle(base.structure);
    for (auto & p : partial_oracle(arc())) {
        PartialMap q(3, -1);
        for (int v = 0; v < 2; ++v)
            if (p[v] >= 0)
                q[base.embedding[v]] = base.embedding[p[v]];
        EXPECT_TRUE(extended_by_some(q, autos));
    }
}

TEST(EppaBase, SuppliedBaseIsCertifiedAndPruned)
{
    auto cycle = parse_structure_string(
        "lang rel E 2\nvertex a b c z\nrel E a b\nrel E b c\nrel E c a\nrel E z z\n");
    auto base = make_eppa_base(arc(), cycle, {0, 1});
    EXPECT_EQ(base.structure.size(), 3);
    auto path = parse_structure_string("lang rel E 2\nvertex a b c\nrel E a b\nrel E b c\n");
    EXPECT_THROW(make_eppa_base(arc(), path, {0, 1}), std::invalid_argument);
}

TEST(EppaBase, BudgetIsReported)
{
    BudgetMeter meter;
    EXPECT_THROW(base_eppa_bruteforce(arc(), meter, 2), BudgetExceeded);
    Budget b;
    b.max_subsets = 3;
    BudgetMeter tight(b);
    EXPECT_THROW(base_eppa_bruteforce(arc(), tight), BudgetExceeded);
}

TEST(BigSets, MatchAutomorphismSearch)
{
    auto base = make_eppa_base(arc(),
        parse_structure_string("lang rel E 2\nvertex a b c\nrel E a b\nrel E b c\nrel E c a\n"), {0, 1});
    auto big = big_sets(base);
    auto autos = automorphism_oracle(base.structure);
    for (auto & s : all_subsets(3)) {
        if (s.empty())
            continue;
        bool small = false;
        for (auto & g : autos) {
            VertexSet image;
            for (auto v : s)
                image.push_back(g[v]);
            small = small || subset_of(make_set(image), make_set(base.embedding));
        }
        EXPECT_EQ(big.index(s) >= 0, ! small);
    }
    EXPECT_EQ(big.size(), 1);
    EXPECT_EQ(big.sets[0], (VertexSet{0, 1, 2}));
}

TEST(BigSets, SupersetsOfBigSetsAreBig)
{
    BudgetMeter meter;
    auto base = base_eppa_bruteforce(arc(), meter);
    auto big = big_sets(base);
    for (auto & s : big.sets)
        for (auto & t : all_subsets(base.structure.size()))
            if (subset_of(s, t)) {
                EXPECT_GE(big.index(t), 0);
            }
    for (int s = 0; s < big.size(); ++s)
        for (auto & g : base.automorphisms)
            EXPECT_GE(big.image(g, s), 0);
}

TEST(Generic, PairDefinition)
{
    BudgetMeter meter;
    auto base = base_eppa_bruteforce(arc(), meter);
    auto big = big_sets(base);
    ValuedVertex a{0, {1}}, a2{0, {2}}, b{1, {1}}, b2{1, {2}};
    EXPECT_TRUE(generic_pair(big, a, a));
    EXPECT_FALSE(generic_pair(big, a, a2));
    EXPECT_FALSE(generic_pair(big, a, b));
    EXPECT_TRUE(generic_pair(big, a, b2));
    EXPECT_TRUE(is_valuation_function(big, a));
    EXPECT_FALSE(is_valuation_function(big, ValuedVertex{0, {3}}));
    EXPECT_FALSE(is_valuation_function(big, ValuedVertex{0, {0}}));
}

TEST(EppaExtension, EdgeGraph)
{
    auto a = graph(2, {{0, 1}});
    auto x = build(a);
    EXPECT_EQ(x.big.size(), 0);
    EXPECT_TRUE(is_isomorphic(x.c, a));
    auto cert = certify_eppa(x);
    EXPECT_TRUE(cert.ok());
    EXPECT_EQ(cert.partial_automorphisms, 7u);
    EXPECT_EQ(cert.extended, 7u);
    EXPECT_EQ(cert.coherent_lifted, cert.coherent_triples);
}

TEST(EppaExtension, ArcGivesDirectedHexagon)
{
    auto x = build(arc());
    EXPECT_EQ(x.c.size(), 6);
    EXPECT_EQ(x.c.relations[0].size(), 6u);
    auto autos = automorphism_oracle(x.c);
    EXPECT_EQ(autos.size(), 6u);
    auto cert = certify_eppa(x);
    EXPECT_TRUE(cert.ok()) << (cert.failures.empty() ? "" : cert.failures[0]);
    EXPECT_GT(cert.coherent_triples, cert.partial_automorphisms);
}

TEST(EppaExtension, ForestEdge)
{
    auto a = forest_edge();
    auto x = build(a);
    x.c.validate();
    EXPECT_EQ(x.base.structure.size(), 3);
    EXPECT_EQ(x.c.size(), 12);
    EXPECT_EQ(check_map(a, x.c, x.phi), MapKind::embedding);
    auto cert = certify_eppa(x);
    EXPECT_TRUE(cert.ok()) << (cert.failures.empty() ? "" : cert.failures[0]);
    EXPECT_TRUE(cert.faithful.complete);
}

// Each valuation projects onto a closure of A pulled back through some
// automorphism; for the forest edge the pull-back depends on that choice, so
// base a carries both the one-vertex and the two-vertex valuations.
TEST(EppaExtension, ValuationsOverEveryEligibleAutomorphism)
{
    auto x = build(forest_edge());
    std::map<std::size_t, int> sizes;
    for (auto & v : x.valuations)
        if (v.base == 0)
            ++sizes[v.members.size()];
    EXPECT_EQ(sizes, (std::map<std::size_t, int>{{1, 2}, {2, 2}}));
    for (auto & v : x.valuations) {
        EXPECT_EQ(closure_set(v.structure, {v.member(v.base)}).size(), v.members.size());
        for (auto & m : v.members)
            EXPECT_TRUE(is_valuation_function(x.big, m));
    }
}

TEST(EppaExtension, ExtensionsAgreeWithAutomorphismOracle)
{
    for (auto a : {graph(2, {{0, 1}}), arc(), forest_edge()}) {
        auto x = build(a);
        auto autos = automorphisms(x.c);
        if (x.c.size() <= 6) {
            auto slow = automorphism_oracle(x.c);
            std::sort(autos.begin(), autos.end());
            std::sort(slow.begin(), slow.end());
            EXPECT_EQ(autos, slow);
        }
        for (auto & p : partial_oracle(a)) {
            PartialMap on_c(x.c.size(), -1);
            for (int v = 0; v < a.size(); ++v)
                if (p[v] >= 0)
                    on_c[x.phi[v]] = x.phi[p[v]];
            EXPECT_TRUE(extended_by_some(on_c, autos));
        }
        // Irreducible faithfulness, by automorphisms of C directly.
        auto image = make_set(x.phi);
        for (auto & d : all_subsets(x.c.size())) {
            if (d.empty() || ! closed_oracle(x.c, d) || ! irreducible_oracle(restrict_to(x.c, d)))
                continue;
            bool moved = false;
            for (auto & g : autos) {
                VertexSet gd;
                for (auto v : d)
                    gd.push_back(g[v]);
                moved = moved || subset_of(make_set(gd), image);
            }
            EXPECT_TRUE(moved) << vertex_names(x.c, d);
        }
    }
}

TEST(ExtendPartial, IdentityStaysIdentity)
{
    auto x = build(arc());
    PartialMap p(x.c.size(), -1);
    for (auto v : x.phi)
        p[v] = v;
    VertexMap id(x.base.structure.size());
    for (int i = 0; i < int(id.size()); ++i)
        id[i] = i;
    auto hat = extend_partial(x, p, id);
    for (int v = 0; v < x.c.size(); ++v)
        EXPECT_EQ(hat[v], v);
}

TEST(ExtendPartial, SwapOfSymmetricEdge)
{
    auto x = build(graph(2, {{0, 1}}));
    PartialMap p = {x.phi[1], x.phi[0]};
    auto hat = extend_partial(x, p, {1, 0});
    EXPECT_EQ(check_map(x.c, x.c, hat), MapKind::embedding);
    EXPECT_TRUE(extends(hat, p));
}

TEST(ExtendPartial, RejectsIncompatibleBaseAutomorphism)
{
    auto x = build(arc());
    PartialMap p(x.c.size(), -1);
    p[x.phi[0]] = x.phi[0];
    VertexMap rotate = x.base.automorphisms[1];
    EXPECT_THROW(extend_partial(x, p, rotate), std::invalid_argument);
}

TEST(ExtendPartial, PreservesGenericity)
{
    auto x = build(forest_edge());
    for (auto & g : x.base.automorphisms) {
        PartialMap empty(x.c.size(), -1);
        auto hat = extend_partial(x, empty, g);
        for (int u = 0; u < x.c.size(); ++u)
            for (int v = 0; v < x.c.size(); ++v)
                EXPECT_EQ(x.generic[u][v], x.generic[hat[u]][hat[v]]);
    }
}

TEST(Certificate, DetectsTamperedExtension)
{
    auto x = build(arc());
    x.c.relations[0].erase(x.c.relations[0].begin());
    auto cert = certify_eppa(x);
    EXPECT_FALSE(cert.ok());
}
