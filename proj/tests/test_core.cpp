#include "support.hpp"

#include <ramsey/amalgam.hpp>
#include <ramsey/canonical.hpp>
#include <ramsey/closure.hpp>
#include <ramsey/irreducible.hpp>
#include <ramsey/morphism.hpp>
#include <ramsey/text_format.hpp>

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace ramsey;
using namespace support;

namespace
{
    // F(c) = {a,b} and G(a,b) = {c}.
    auto pair_closure_example() -> Structure
    {
        return parse_structure_string(R"(
lang fun F 1 2
lang fun G 2 1
vertex a b c d
fun F c : a b
fun G a b : c
)");
    }

    // R(a,b), F(a) = c, F(b) = d.
    auto irreducible_example() -> Structure
    {
        return parse_structure_string(R"(
lang rel R 2
lang fun F 1 1
vertex a b c d
rel R a b
fun F a : c
fun F b : d
)");
    }

    auto closure_test_language() -> Language
    {
        Language l;
        l.add_relation("R", 2);
        l.add_function("F", 1, 1);
        l.add_function("G", 2, 1);
        l.add_function("H", 1, 2);
        return l;
    }

    auto chimney_graph(int n) -> Structure
    {
        std::vector<std::pair<int, int>> edges{{0, 1}};
        for (int i = 0; i < n; ++i) {
            edges.emplace_back(0, 2 + i);
            edges.emplace_back(1, 2 + i);
        }
        return graph(2 + n, edges);
    }

    auto bowtie_graph() -> Structure
    {
        return graph(5, {{0, 1}, {0, 2}, {1, 2}, {0, 3}, {0, 4}, {3, 4}});
    }
}

TEST(Closure, PairGeneratesThirdVertex)
{
    auto s = pair_closure_example();
    EXPECT_EQ(closure_set(s, {0, 1}), (VertexSet{0, 1, 2}));
    EXPECT_EQ(closure_set(s, {2}), (VertexSet{0, 1, 2}));
    EXPECT_EQ(closure_set(s, {3}), (VertexSet{3}));
}

TEST(Closure, EmptyGeneratorsGiveEmptyStructure)
{
    auto s = pair_closure_example();
    EXPECT_EQ(closure(s, {}).size(), 0);
}

TEST(Closure, ForestPathClosesUpwards)
{
    auto s = forest({1, 2, -1});
    EXPECT_EQ(closure_set(s, {0}), (VertexSet{0, 1, 2}));
    EXPECT_EQ(closure_set(s, {0}), closure_oracle(s, {0}));
}

TEST(Closure, UnknownVertexRejected)
{
    auto s = pair_closure_example();
    EXPECT_THROW(closure_set(s, {7}), std::invalid_argument);
}

TEST(Closure, MatchesMinimalClosedSupersetOracle)
{
    std::mt19937 rng(11);
    auto lang = closure_test_language();
    for (int round = 0; round < 200; ++round) {
        int n = 1 + round % 5;
        auto s = random_structure(lang, n, rng, 0.25);
        ClosureOperator cl(s);
        for (auto & b : all_subsets(n)) {
            auto c = cl(b);
            ASSERT_EQ(c, closure_oracle(s, b));
            ASSERT_EQ(cl(c), c);
            ASSERT_TRUE(subset_of(b, c));
            for (auto & b2 : all_subsets(n))
                if (subset_of(b, b2)) {
                    ASSERT_TRUE(subset_of(c, cl(b2)));
                }
        }
    }
}

TEST(Closure, UnaryFunctionsGiveUnaryClosure)
{
    std::mt19937 rng(12);
    Language lang;
    lang.add_relation("R", 2);
    lang.add_function("F", 1, 1);
    lang.add_function("H", 1, 2);
    for (int round = 0; round < 100; ++round) {
        auto s = random_structure(lang, 5, rng, 0.2);
        ClosureOperator cl(s);
        for (auto & b : all_subsets(5)) {
            VertexSet uni;
            for (auto v : b) {
                auto c = cl.of_vertex(v);
                uni.insert(uni.end(), c.begin(), c.end());
            }
            ASSERT_EQ(cl(b), make_set(uni));
        }
    }
}

TEST(InducedSubstructure, RejectsNonClosedSet)
{
    auto s = pair_closure_example();
    EXPECT_THROW(induced_substructure(s, {0, 1}), std::invalid_argument);
    EXPECT_NO_THROW(induced_substructure(s, {0, 1, 2}));
}

TEST(InducedSubstructure, WholeVertexSetIsIdentity)
{
    auto s = irreducible_example();
    EXPECT_EQ(induced_substructure(s, all_vertices(s)), s);
}

TEST(InducedSubstructure, TrianglePairsAreEmbedded)
{
    auto tri = graph(3, {{0, 1}, {1, 2}, {0, 2}});
    for (auto & x : all_subsets(3)) {
        if (x.size() != 2)
            continue;
        auto sub = induced_substructure(tri, x);
        EXPECT_EQ(sub.relations[0].size(), 2u);
        EXPECT_EQ(check_map(sub, tri, x), MapKind::embedding);
    }
}

TEST(CheckMap, ProjectionOntoLoopIsHomomorphismOnly)
{
    auto edge = graph(2, {{0, 1}});
    Structure loop(graph_language());
    loop.add_vertex("x");
    loop.add_tuple(0, {0, 0});
    EXPECT_EQ(check_map(edge, loop, {0, 0}), MapKind::homomorphism);
}

TEST(CheckMap, IdentityIsEmbedding)
{
    auto s = irreducible_example();
    EXPECT_EQ(check_map(s, s, all_vertices(s)), MapKind::embedding);
}

TEST(CheckMap, RootToNonRootIsNotEmbedding)
{
    auto root = forest({-1});
    auto path = forest({1, -1});
    EXPECT_EQ(check_map(root, path, {1}), MapKind::embedding);
    EXPECT_EQ(check_map(root, path, {0}), MapKind::monomorphism);
}

TEST(Embeddings, EdgeIntoTriangle)
{
    auto edge = graph(2, {{0, 1}});
    auto tri = graph(3, {{0, 1}, {1, 2}, {0, 2}});
    auto maps = enumerate_embeddings(edge, tri);
    EXPECT_EQ(maps, maps_oracle(edge, tri, MapKind::embedding));
    EXPECT_EQ(maps.size(), 6u);
    EXPECT_EQ(copies(edge, tri).size(), 3u);
}

TEST(Embeddings, NoBowtieInChimney)
{
    EXPECT_TRUE(enumerate_embeddings(bowtie_graph(), chimney_graph(2)).empty());
    EXPECT_TRUE(enumerate_embeddings(bowtie_graph(), chimney_graph(3)).empty());
    EXPECT_TRUE(enumerate_maps(bowtie_graph(), chimney_graph(3), MapKind::monomorphism).empty());
}

TEST(Embeddings, SearchAgreesWithExhaustiveMaps)
{
    std::mt19937 rng(13);
    std::vector<Language> langs{micro_language(), closure_test_language(), micro_language().with_order()};
    for (auto & lang : langs)
        for (int round = 0; round < 150; ++round) {
            int na = 1 + round % 3, nb = 1 + (round / 3) % 4;
            auto a = random_structure(lang, na, rng, 0.3);
            auto b = random_structure(lang, nb, rng, 0.4);
            for (auto kind : {MapKind::homomorphism, MapKind::monomorphism, MapKind::embedding})
                ASSERT_EQ(enumerate_maps(a, b, kind), maps_oracle(a, b, kind)) << format_structure(a) << format_structure(b);
            // Substructures always embed.
            for (auto & x : all_subsets(nb))
                if (is_closed(b, x)) {
                    auto sub = restrict_to(b, x);
                    auto maps = enumerate_embeddings(sub, b);
                    ASSERT_TRUE(std::find(maps.begin(), maps.end(), VertexMap(x.begin(), x.end())) != maps.end());
                }
        }
}

TEST(Embeddings, CompositionStaysEmbedding)
{
    std::mt19937 rng(14);
    for (int round = 0; round < 60; ++round) {
        auto c = random_structure(micro_language(), 5, rng, 0.3);
        auto b = restrict_to(c, closure_set(c, {0, 1, 2}));
        auto a = restrict_to(b, closure_set(b, {0}));
        auto ac = enumerate_embeddings(a, c);
        std::set<VertexMap> all(ac.begin(), ac.end());
        for (auto & f : enumerate_embeddings(a, b))
            for (auto & g : enumerate_embeddings(b, c))
                ASSERT_TRUE(all.count(compose(g, f)));
    }
}

TEST(Automorphisms, SmallExamples)
{
    auto tri = graph(3, {{0, 1}, {1, 2}, {0, 2}});
    EXPECT_EQ(automorphisms(tri).size(), 6u);

    Language rigid_lang;
    rigid_lang.add_relation("P", 1);
    rigid_lang.add_relation("Q", 1);
    Structure rigid(rigid_lang);
    rigid.add_vertex("p");
    rigid.add_vertex("q");
    rigid.add_tuple(0, {0});
    rigid.add_tuple(1, {1});
    EXPECT_EQ(automorphisms(rigid), (std::vector<VertexMap>{{0, 1}}));

    auto ch2 = chimney_graph(2);
    std::size_t brute = 0;
    for (auto & p : permutations(ch2.size()))
        brute += check_map(ch2, ch2, p) == MapKind::embedding;
    EXPECT_EQ(automorphisms(ch2).size(), brute);
    EXPECT_EQ(brute, 4u);
}

TEST(Automorphisms, FormAGroup)
{
    std::mt19937 rng(15);
    for (int round = 0; round < 40; ++round) {
        auto s = random_structure(micro_language(), 4, rng, 0.2);
        auto aut = automorphisms(s);
        std::set<VertexMap> group(aut.begin(), aut.end());
        ASSERT_TRUE(group.count(all_vertices(s)));
        for (auto & f : aut) {
            ASSERT_TRUE(group.count(inverse_permutation(f)));
            for (auto & g : aut)
                ASSERT_TRUE(group.count(compose(f, g)));
        }
    }
}

TEST(FreeAmalgam, TwoEdgesOverVertexGiveAPath)
{
    auto edge = graph(2, {{0, 1}});
    Structure point(graph_language());
    point.add_vertex("p");
    auto am = free_amalgam(point, edge, edge, {1}, {0});
    auto & c = am.result;
    EXPECT_EQ(c.size(), 3);
    EXPECT_EQ(c.relations[0].size(), 4u);
    EXPECT_EQ(check_map(edge, c, am.beta1), MapKind::embedding);
    EXPECT_EQ(check_map(edge, c, am.beta2), MapKind::embedding);
    EXPECT_TRUE(is_isomorphic(c, graph(3, {{0, 1}, {1, 2}})));
}

TEST(FreeAmalgam, FullOverlapReturnsCopy)
{
    auto s = irreducible_example();
    auto am = free_amalgam(s, s, s, all_vertices(s), all_vertices(s));
    EXPECT_EQ(am.result, s);
}

TEST(FreeAmalgam, ChimneyFromTriangles)
{
    auto tri = graph(3, {{0, 1}, {1, 2}, {0, 2}});
    auto edge = graph(2, {{0, 1}});
    Structure c = tri;
    for (int n = 2; n <= 4; ++n) {
        c = free_amalgam(edge, c, tri, {0, 1}, {0, 1}).result;
        EXPECT_TRUE(is_isomorphic(c, chimney_graph(n)));
    }
}

TEST(FreeAmalgam, NoTupleCrossesSides)
{
    std::mt19937 rng(16);
    Language lang = micro_language().with_order();
    for (int round = 0; round < 100; ++round) {
        auto b1 = random_structure(lang, 4, rng, 0.3);
        auto b2 = random_structure(lang, 4, rng, 0.3);
        auto a = restrict_to(b1, closure_set(b1, {0}));
        auto alpha2 = find_embedding(a, b2);
        if (! alpha2)
            continue;
        auto alpha1 = all_vertices(b1);
        alpha1.resize(0);
        for (auto v : closure_set(b1, {0}))
            alpha1.push_back(v);
        auto am = free_amalgam(a, b1, b2, alpha1, *alpha2);
        ASSERT_NO_THROW(am.result.validate());
        ASSERT_EQ(check_map(b1, am.result, am.beta1), MapKind::embedding);
        ASSERT_EQ(check_map(b2, am.result, am.beta2), MapKind::embedding);
        VertexSet side1 = make_set(am.beta1), side2 = make_set(am.beta2);
        for (auto & e : hyperedges(forget_order(am.result)))
            ASSERT_TRUE(subset_of(e, side1) || subset_of(e, side2));
    }
}

TEST(FreeAmalgam, RejectsNonEmbedding)
{
    auto edge = graph(2, {{0, 1}});
    auto pair = graph(2, {});
    EXPECT_THROW(free_amalgam(pair, edge, edge, {0, 1}, {0, 1}), std::invalid_argument);
}

TEST(Irreducible, Examples)
{
    EXPECT_TRUE(is_irreducible(irreducible_example()));
    EXPECT_TRUE(irreducible_oracle(irreducible_example()));
    EXPECT_TRUE(is_irreducible(graph(1, {})));
    auto two_edges = graph(4, {{0, 1}, {2, 3}});
    EXPECT_FALSE(is_irreducible(two_edges));
    EXPECT_FALSE(irreducible_oracle(two_edges));
    EXPECT_TRUE(is_irreducible(graph(3, {{0, 1}, {1, 2}, {0, 2}})));
    EXPECT_FALSE(is_irreducible(graph(3, {{0, 1}, {1, 2}})));
}

TEST(Irreducible, RoutesAgreeWithOracle)
{
    std::mt19937 rng(17);
    for (auto lang : {micro_language(), closure_test_language()})
        for (int round = 0; round < 400; ++round) {
            auto s = random_structure(lang, 1 + round % 5, rng, 0.15 + 0.1 * (round % 3));
            bool expected = irreducible_oracle(s);
            ASSERT_EQ(is_irreducible_by_cuts(s), expected) << format_structure(s);
            ASSERT_EQ(is_irreducible(s), expected) << format_structure(s);
            if (lang.all_functions_unary()) {
                ASSERT_EQ(is_irreducible_unary(s), expected);
            }
        }
}

TEST(Irreducible, SubstructureSweepMatchesOracle)
{
    std::mt19937 rng(18);
    for (auto lang : {micro_language(), closure_test_language()})
        for (int round = 0; round < 60; ++round) {
            auto s = random_structure(lang, 5, rng, 0.15);
            std::vector<VertexSet> expected;
            for (auto & x : all_subsets(5))
                if (! x.empty() && closed_oracle(s, x) && irreducible_oracle(restrict_to(s, x)))
                    expected.push_back(x);
            std::sort(expected.begin(), expected.end(), [](auto & a, auto & b) {
                return a.size() != b.size() ? a.size() < b.size() : a < b;
            });
            auto sweep = irreducible_substructures(s);
            ASSERT_TRUE(sweep.complete);
            ASSERT_EQ(sweep.sets, expected) << format_structure(s);
        }
}

TEST(TextFormat, RoundTrip)
{
    std::mt19937 rng(19);
    for (auto lang : {micro_language(), closure_test_language().with_order()})
        for (int round = 0; round < 50; ++round) {
            auto s = random_structure(lang, round % 6, rng, 0.3);
            auto text = format_structure(s);
            auto back = parse_structure_string(text);
            ASSERT_EQ(back, s);
            ASSERT_EQ(format_structure(back), text);
        }
}

TEST(TextFormat, DiagnosticsCarryLineNumbers)
{
    try {
        parse_structure_string("lang rel R 2\nvertex a\nrel R a b\n");
        FAIL();
    }
    catch (const ParseError & e) {
        EXPECT_EQ(e.line_number, 3);
    }
    EXPECT_THROW(parse_structure_string(""), ParseError);
    EXPECT_THROW(parse_structure_string("# only a comment\n"), ParseError);
    EXPECT_THROW(parse_structure_string("lang fun F 1 2\nvertex a b\nfun F a : b\n"), ParseError);
    EXPECT_THROW(parse_structure_string("vertex a b\norder a\n"), ParseError);
}

TEST(Canonical, KeysDetectIsomorphism)
{
    std::mt19937 rng(20);
    for (int round = 0; round < 100; ++round) {
        auto s = random_structure(closure_test_language(), 5, rng, 0.2);
        auto t = random_structure(closure_test_language(), 5, rng, 0.2);
        auto perm = permutations(5)[round % 120];
        auto relabelled = relabel(s, perm, s.names);
        ASSERT_EQ(canonical_key(s), canonical_key(relabelled));
        ASSERT_EQ(canonical_key(s) == canonical_key(t), is_isomorphic(s, t));
    }
}
