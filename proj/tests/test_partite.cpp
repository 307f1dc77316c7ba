#include "support.hpp"

#include <ramsey/arrow.hpp>
#include <ramsey/hales_jewett.hpp>
#include <ramsey/irreducible.hpp>
#include <ramsey/partite.hpp>
#include <ramsey/text_format.hpp>

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace ramsey;
using namespace support;

namespace
{
    // Random partite system over a random base in the micro language: every
    // carrier tuple lifts a base tuple and entries meeting a class twice are
    // skipped, so the result is valid by construction.
    auto random_partite(std::mt19937 & rng, int base_size, int max_class) -> PartiteSystem
    {
        PartiteSystem x;
        x.base = random_structure(micro_language(), base_size, rng, 0.4);
        x.carrier = Structure(micro_language());
        std::uniform_int_distribution<int> size(1, max_class);
        std::vector<VertexSet> cls(base_size);
        for (int p = 0; p < base_size; ++p) {
            int k = size(rng);
            for (int i = 0; i < k; ++i) {
                cls[p].push_back(x.carrier.add_vertex(x.base.names[p] + "_" + std::to_string(i)));
                x.part.push_back(p);
            }
        }
        std::bernoulli_distribution coin(0.5);
        auto pick = [&](int p) { return cls[p][std::uniform_int_distribution<int>(0, int(cls[p].size()) - 1)(rng)]; };
        for (auto & t : x.base.relations[0]) {
            for (int tries = 0; tries < 3; ++tries) {
                Tuple lift;
                for (auto p : t)
                    lift.push_back(pick(p));
                if (t[0] == t[1])
                    lift[1] = lift[0];
                if (coin(rng))
                    x.carrier.add_tuple(0, lift);
            }
        }
        for (auto & [d, img] : x.base.functions[0])
            for (auto u : cls[d[0]]) {
                if (! coin(rng))
                    continue;
                Vertex w = img[0] == d[0] ? u : pick(img[0]);
                x.carrier.set_function(0, {u}, {w});
            }
        return x;
    }

    auto vertex_language() -> Language { return graph_language().with_order(); }

    auto ordered_points(int n) -> Structure { return ordered_graph(n, {}); }
}

TEST(PartiteSystem, RandomSystemsValidate)
{
    std::mt19937 rng(7);
    for (int i = 0; i < 50; ++i)
        EXPECT_TRUE(validate_partite(random_partite(rng, 3, 2)));
}

TEST(PartiteSystem, ReportsTupleInsideOneClass)
{
    PartiteSystem x;
    x.base = graph(2, {{0, 1}});
    x.carrier = graph(3, {{0, 1}});
    x.part = {0, 0, 1};
    auto v = validate_partite(x);
    EXPECT_FALSE(v);
    EXPECT_NE(v.reason.find("meets a part twice"), std::string::npos);
}

TEST(PartiteSystem, ReportsNonHomomorphicProjection)
{
    PartiteSystem x;
    x.base = graph(2, {});
    x.carrier = graph(2, {{0, 1}});
    x.part = {0, 1};
    auto v = validate_partite(x);
    EXPECT_FALSE(v);
    EXPECT_NE(v.reason.find("not a tuple of the base"), std::string::npos);
}

TEST(PartiteSystem, TextRoundTrip)
{
    auto x = parse_partite_string("lang rel E 2\nvertex a1 a2 b1\nrel E a1 b1\nrel E b1 a1\npart a a1 a2\npart b b1\n");
    EXPECT_TRUE(validate_partite(x));
    EXPECT_EQ(x.base.size(), 2);
    EXPECT_TRUE(x.base.has_tuple(0, {0, 1}));
    auto again = parse_partite_string(format_partite(x));
    EXPECT_EQ(format_partite(again), format_partite(x));
    EXPECT_EQ(again.part, x.part);
}

TEST(PartiteSystem, TextRejectsUnassignedVertex)
{
    EXPECT_THROW(parse_partite_string("lang rel E 2\nvertex a b\npart p a\n"), ParseError);
}

TEST(PartitePower, ExponentOneIsIsomorphic)
{
    std::mt19937 rng(3);
    for (int i = 0; i < 30; ++i) {
        auto x = random_partite(rng, 3, 2);
        auto p = partite_power(x, 1);
        VertexMap iso(x.carrier.size());
        for (int v = 0; v < x.carrier.size(); ++v)
            iso[v] = p.index.at({v});
        EXPECT_EQ(check_map(x.carrier, p.system.carrier, iso), MapKind::embedding);
        EXPECT_EQ(p.system.carrier.size(), x.carrier.size());
        EXPECT_EQ(tuple_count(p.system.carrier), tuple_count(x.carrier));
        for (int v = 0; v < x.carrier.size(); ++v)
            EXPECT_EQ(p.system.part[iso[v]], x.part[v]);
    }
}

TEST(PartitePower, SingletonClassesGiveBase)
{
    PartiteSystem x;
    x.base = graph(3, {{0, 1}, {1, 2}});
    x.carrier = x.base;
    x.part = {0, 1, 2};
    for (int n = 1; n <= 3; ++n) {
        auto p = partite_power(x, n);
        EXPECT_TRUE(is_isomorphic(p.system.carrier, x.base));
    }
}

TEST(PartitePower, MatchesCoordinatewiseDefinition)
{
    std::mt19937 rng(11);
    for (int round = 0; round < 25; ++round) {
        auto x = random_partite(rng, 1 + round % 3, 2);
        for (int n = 1; n <= 3; ++n) {
            auto p = partite_power(x, n);
            auto & c = p.system.carrier;
            ASSERT_TRUE(validate_partite(p.system)) << validate_partite(p.system).reason;
            for (int v = 0; v < c.size(); ++v)
                for (auto u : p.coords[v])
                    EXPECT_EQ(x.part[u], p.system.part[v]);
            // Every pair of power vertices: present iff present in every coordinate.
            for (int u = 0; u < c.size(); ++u)
                for (int w = 0; w < c.size(); ++w) {
                    bool all = true;
                    for (int i = 0; i < n; ++i)
                        all = all && x.carrier.has_tuple(0, {p.coords[u][i], p.coords[w][i]});
                    EXPECT_EQ(c.has_tuple(0, {u, w}), all);
                }
            for (int u = 0; u < c.size(); ++u) {
                bool defined = true;
                for (int i = 0; i < n; ++i)
                    defined = defined && x.carrier.image(0, {p.coords[u][i]});
                auto img = c.image(0, {u});
                ASSERT_EQ(img != nullptr, defined);
                if (defined) {
                    for (int i = 0; i < n; ++i)
                        EXPECT_EQ(p.coords[(*img)[0]][i], (*x.carrier.image(0, {p.coords[u][i]}))[0]);
                }
            }
        }
    }
}

TEST(PartitePower, LineEmbeddingsAreCertified)
{
    std::mt19937 rng(5);
    for (int round = 0; round < 20; ++round) {
        auto x = random_partite(rng, 2 + round % 2, 2);
        auto letters = base_copies(x);
        if (letters.empty())
            continue;
        for (int n = 1; n <= 3; ++n) {
            auto p = partite_power(x, n);
            for (auto & line : all_lines(n, int(letters.size()))) {
                auto e = line_embedding(p, x, line, letters);
                ASSERT_EQ(check_map(x.carrier, p.system.carrier, e), MapKind::embedding);
                for (int v = 0; v < x.carrier.size(); ++v)
                    EXPECT_EQ(p.system.part[e[v]], x.part[v]);
                for (int a = 0; a < int(letters.size()); ++a)
                    EXPECT_EQ(compose(e, letters[a]), word_copy(p, letters, line.word(a)));
            }
        }
    }
}

TEST(PartitePower, TransversalIrreduciblesArePreserved)
{
    std::mt19937 rng(13);
    for (int round = 0; round < 25; ++round) {
        auto x = random_partite(rng, 3, 2);
        auto transversal_all = [](const PartiteSystem & s) {
            for (auto & set : irreducible_substructures(s.carrier).sets) {
                std::set<int> seen;
                for (auto v : set)
                    if (! seen.insert(s.part[v]).second)
                        return false;
            }
            return true;
        };
        if (! transversal_all(x))
            continue;
        for (int n = 1; n <= 2; ++n) {
            auto p = partite_power(x, n);
            EXPECT_TRUE(transversal_all(p.system));
        }
    }
}

TEST(PartitePower, SweepAgreesWithOracleOnSmallPowers)
{
    std::mt19937 rng(17);
    for (int round = 0; round < 10; ++round) {
        auto x = random_partite(rng, 2, 2);
        auto p = partite_power(x, 2);
        if (p.system.carrier.size() > 10)
            continue;
        std::set<VertexSet> want;
        for (auto & set : all_subsets(p.system.carrier.size()))
            if (! set.empty() && closed_oracle(p.system.carrier, set) &&
                irreducible_oracle(restrict_to(p.system.carrier, set)))
                want.insert(set);
        auto got = irreducible_substructures(p.system.carrier).sets;
        EXPECT_EQ(std::set<VertexSet>(got.begin(), got.end()), want);
    }
}

TEST(Lines, CountMatchesEnumeration)
{
    for (int n = 1; n <= 4; ++n)
        for (int t = 1; t <= 4; ++t) {
            std::set<std::vector<int>> patterns;
            std::vector<int> w(n, 0);
            while (true) {
                bool moving = false;
                std::vector<int> pat = w;
                for (auto & d : pat)
                    if (d == t) {
                        d = CombinatorialLine::moving;
                        moving = true;
                    }
                if (moving)
                    patterns.insert(pat);
                int i = n - 1;
                while (i >= 0 && ++w[i] == t + 1)
                    w[i--] = 0;
                if (i < 0)
                    break;
            }
            auto lines = all_lines(n, t);
            EXPECT_EQ(lines.size(), patterns.size());
            EXPECT_EQ(line_count(n, t), patterns.size());
            std::set<std::vector<int>> got;
            for (auto & l : lines)
                got.insert(l.pattern);
            EXPECT_EQ(got, patterns);
        }
}

TEST(Lines, TwoByTwoHasFiveLines)
{
    auto lines = all_lines(2, 2);
    ASSERT_EQ(lines.size(), 5u);
    EXPECT_EQ(lines.back().to_string(), "* *");
}

TEST(Lines, ParityColouringHasMonochromaticDiagonal)
{
    std::vector<int> colour(4);
    for (std::uint64_t c = 0; c < 4; ++c) {
        auto w = word_from_code(c, 2, 2);
        colour[c] = (w[0] + w[1]) % 2;
    }
    auto line = find_monochromatic_line(2, 2, colour);
    ASSERT_TRUE(line);
    EXPECT_EQ(line->to_string(), "* *");
}

TEST(Lines, EveryTwoColouringOfTheSquareHasALine)
{
    for (int mask = 0; mask < 16; ++mask) {
        std::vector<int> colour(4);
        for (int c = 0; c < 4; ++c)
            colour[c] = mask >> c & 1;
        auto line = find_monochromatic_line(2, 2, colour);
        ASSERT_TRUE(line);
        EXPECT_EQ(colour[word_code(line->word(0), 2)], colour[word_code(line->word(1), 2)]);
    }
}

TEST(Lines, ThreeLettersNeedMoreThanOneCoordinate)
{
    std::vector<int> colour = {0, 1, 0};
    EXPECT_FALSE(find_monochromatic_line(1, 3, colour));
}

TEST(Arrow, PathDoesNotArrowEdge)
{
    auto c = ordered_graph(3, {{0, 1}, {1, 2}});
    auto b = ordered_graph(2, {{0, 1}});
    auto a = ordered_points(1);
    auto r = verify_arrow(c, b, a, 2);
    EXPECT_FALSE(r.arrows);
    ASSERT_EQ(r.coloring.size(), 3u);
    // No edge of the path has both ends coloured alike.
    for (auto & e : enumerate_embeddings(b, c)) {
        int i = int(std::find(r.a_copies.begin(), r.a_copies.end(), VertexSet{e[0]}) - r.a_copies.begin());
        int j = int(std::find(r.a_copies.begin(), r.a_copies.end(), VertexSet{e[1]}) - r.a_copies.begin());
        EXPECT_NE(r.coloring[i], r.coloring[j]);
    }
}

TEST(Arrow, PigeonholeOnThreePoints)
{
    EXPECT_TRUE(verify_arrow(ordered_points(3), ordered_points(2), ordered_points(1), 2).arrows);
    EXPECT_FALSE(verify_arrow(ordered_points(2), ordered_points(2), ordered_points(1), 2).arrows);
    EXPECT_FALSE(verify_arrow(ordered_points(3), ordered_points(2), ordered_points(1), 3).arrows);
    EXPECT_TRUE(verify_arrow(ordered_points(4), ordered_points(2), ordered_points(1), 3).arrows);
    EXPECT_TRUE(verify_arrow(ordered_points(5), ordered_points(2), ordered_points(1), 4).arrows);
}

TEST(Arrow, AgreesWithExhaustiveColourings)
{
    std::mt19937 rng(21);
    std::vector<Structure> smalls = {
        ordered_points(1), ordered_points(2), ordered_graph(2, {{0, 1}}), ordered_graph(3, {{0, 1}, {1, 2}}),
        graph(2, {{0, 1}}), graph(3, {{0, 1}, {1, 2}}), graph(1, {}), graph(2, {})};
    for (int round = 0; round < 40; ++round) {
        bool ordered = round % 2 == 0;
        Structure c = random_structure(ordered ? vertex_language() : graph_language(), 3 + round % 3, rng, 0.5);
        // Symmetrise so that the graph shapes can embed.
        for (auto t : std::set<Tuple>(c.relations[0]))
            c.add_tuple(0, {t[1], t[0]});
        for (auto & a : smalls)
            for (auto & b : smalls) {
                if (a.ordered() != ordered || b.ordered() != ordered || a.size() > b.size())
                    continue;
                auto want = arrow_oracle(c, b, a, 2);
                EXPECT_EQ(verify_arrow(c, b, a, 2).arrows, want)
                    << format_structure(c) << format_structure(b) << format_structure(a);
            }
    }
}

TEST(Arrow, WitnessColouringIsGenuine)
{
    std::mt19937 rng(23);
    auto a = ordered_points(1);
    auto b = ordered_graph(2, {{0, 1}});
    for (int round = 0; round < 20; ++round) {
        auto c = random_structure(vertex_language(), 5, rng, 0.3);
        for (auto t : std::set<Tuple>(c.relations[0]))
            c.add_tuple(0, {t[1], t[0]});
        auto r = verify_arrow(c, b, a, 2);
        if (r.arrows)
            continue;
        for (auto & e : enumerate_embeddings(b, c)) {
            auto i = std::find(r.a_copies.begin(), r.a_copies.end(), VertexSet{e[0]}) - r.a_copies.begin();
            auto j = std::find(r.a_copies.begin(), r.a_copies.end(), VertexSet{e[1]}) - r.a_copies.begin();
            EXPECT_NE(r.coloring[i], r.coloring[j]);
        }
    }
}

TEST(BaseSearch, EqualStructuresReturnACopy)
{
    Budget budget;
    BudgetMeter meter(budget);
    auto b = ordered_graph(2, {{0, 1}});
    auto found = base_ramsey_bruteforce(b, b, 2, meter);
    EXPECT_TRUE(is_isomorphic(found.result, b));
}

TEST(BaseSearch, PointsNeedPigeonhole)
{
    Budget budget;
    BudgetMeter meter(budget);
    auto found = base_ramsey_bruteforce(ordered_points(1), ordered_points(2), 2, meter);
    EXPECT_EQ(found.result.size(), 3);
    EXPECT_TRUE(arrow_oracle(found.result, ordered_points(2), ordered_points(1), 2));
}

TEST(BaseSearch, EdgeFromVertexIsVerified)
{
    Budget budget;
    BudgetMeter meter(budget);
    auto b = ordered_graph(2, {{0, 1}});
    auto found = base_ramsey_bruteforce(ordered_points(1), b, 2, meter);
    EXPECT_TRUE(arrow_oracle(found.result, b, ordered_points(1), 2));
}

TEST(BaseSearch, BudgetStopsTheSearch)
{
    Budget budget;
    budget.max_subsets = 3;
    BudgetMeter meter(budget);
    auto b = ordered_graph(3, {{0, 1}, {1, 2}});
    EXPECT_THROW(base_ramsey_bruteforce(ordered_graph(2, {{0, 1}}), b, 2, meter), BudgetExceeded);
}

TEST(Completion, RoundTripAndTotality)
{
    auto s = parse_structure_string(
        "lang rel R 2\nlang fun F 2 2\nlang order\nvertex a b c d\nrel R a b\nfun F a b : c d\nfun F c a : d b\norder a b c d\n");
    auto c = completion(s);
    EXPECT_EQ(decompletion(c), s);
    EXPECT_EQ(c.functions[0].size(), 16u);
    EXPECT_EQ(c.relations[1].size(), 2u);
    EXPECT_EQ(*c.image(0, {2, 0}), (Tuple{1, 3}));
    EXPECT_EQ(*c.image(0, {3, 2}), (Tuple{2, 2}));
}

TEST(Completion, MarkerNameAvoidsClashes)
{
    Language l;
    l.add_relation("Dom_F", 1);
    l.add_function("F", 1, 1);
    EXPECT_EQ(completion_marker_name(l, 0), "Dom_F'");
}

TEST(Completion, EmbeddingsCorrespond)
{
    std::mt19937 rng(29);
    Language l = micro_language().with_order();
    for (int round = 0; round < 40; ++round) {
        auto a = random_structure(l, 2 + round % 2, rng, 0.4);
        auto b = random_structure(l, 4, rng, 0.4);
        auto ea = maps_oracle(a, b, MapKind::embedding);
        auto ec = maps_oracle(completion(a), completion(b), MapKind::embedding);
        EXPECT_EQ(ea, ec);
    }
}

TEST(Construction, SizesFollowTheLineCount)
{
    auto a = ordered_points(1);
    auto b = ordered_points(2);
    auto r = partite_construction(a, b, b);
    // One class per stage grows: P0 = 2, then 1 + 3 * 1 and 9 + 7 * 1.
    EXPECT_EQ(r.initial_sizes, (std::vector<int>{2, 4, 16}));
    EXPECT_TRUE(r.property_holds);
    EXPECT_TRUE(validate_partite(r.picture));
    EXPECT_EQ(r.result.size(), 16);
}

TEST(Construction, PicturesStayPartiteWithEdges)
{
    auto a = ordered_points(1);
    auto b = ordered_graph(2, {{0, 1}});
    auto r = partite_construction(a, b, b);
    EXPECT_TRUE(validate_partite(r.picture)) << validate_partite(r.picture).reason;
    EXPECT_TRUE(r.property_holds);
    EXPECT_TRUE(r.property_complete);
    // Every copy of B in the result projects onto the unique copy in C0.
    for (auto & e : enumerate_embeddings(b, r.result))
        EXPECT_NE(r.picture.part[e[0]], r.picture.part[e[1]]);
}

TEST(Construction, ForbiddenAndMembershipReported)
{
    ConstructionOptions o;
    o.forbidden = {graph(3, {{0, 1}, {1, 2}, {0, 2}})};
    o.member = [](const Structure & s) { return s.size() > 0; };
    auto b = ordered_graph(2, {{0, 1}});
    auto r = partite_construction(ordered_points(1), b, b, o);
    EXPECT_TRUE(r.forbidden_found.empty());
    ASSERT_TRUE(r.member);
    EXPECT_TRUE(*r.member);
}
