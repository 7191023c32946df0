#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>

#include "../support/fixtures.hpp"
#include "hyperres/core/graph_io.hpp"
#include "hyperres/core/plan.hpp"
#include "hyperres/core/verify.hpp"
#include "hyperres/oracle/enumerate.hpp"

using namespace hyperres;
using namespace fixtures;

namespace
{
    bool has(const VerificationReport& r, Condition c)
    {
        return std::any_of(r.violations.begin(), r.violations.end(), [&](const Violation& v) { return v.condition == c; });
    }

    ValidationErrorKind kind_of(const std::function<void()>& f)
    {
        try
        {
            f();
        }
        catch (const ValidationError& e)
        {
            return e.kind();
        }
        FAIL("no ValidationError");
        return ValidationErrorKind::InvalidEdge;
    }
}

TEST_SUITE("core")
{
    TEST_CASE("package ids print and parse canonically")
    {
        CHECK(A1.str() == "ex:A@1");
        CHECK(PackageId::parse("debian:libc6@2.36-9") == PackageId{"debian", "libc6", "2.36-9"});
        CHECK(PackageId::parse("cargo:~v0@").has_empty_version());
        CHECK(PackageId::parse("opam:ocaml@4.14.1").str() == "opam:ocaml@4.14.1");
        CHECK_THROWS_AS((void)PackageId::parse("no-ecosystem@1"), Error);
        CHECK_THROWS_AS((void)PackageId::parse("ex:noversion"), Error);
    }

    TEST_CASE("relation kinds round trip through text")
    {
        for (auto k : {RelKind::Dependency, RelKind::OptionalDependency, RelKind::Conflict})
        {
            CHECK(rel_kind_from_string(to_string(k)) == k);
        }
        CHECK_THROWS_AS((void)rel_kind_from_string("requires"), Error);
    }

    TEST_CASE("build_hypergraph accepts the shared-dependency instance")
    {
        const auto h = shared_d();
        CHECK(h.size() == 6);
        CHECK(h.edges().size() == 4);
        CHECK(h.warnings().empty());
        const auto b = *h.index_of(B1);
        REQUIRE(h.edges_from(b).size() == 1);
        const auto targets = h.edge_targets(h.edges_from(b)[0]);
        CHECK(targets.size() == 2);
        CHECK(h.packages()[targets[0]] == D1);
        CHECK(h.version_rank(*h.index_of(D3)) == 2);
    }

    TEST_CASE("empty hypergraph is valid")
    {
        const auto h = build_hypergraph({}, {});
        CHECK(h.size() == 0);
        CHECK(h.edges().empty());
    }

    TEST_CASE("validation errors")
    {
        const auto ghost = pkg("ghost", "1");
        CHECK(kind_of([&] { (void)build_hypergraph({A1}, {dep(A1, {ghost})}); }) == ValidationErrorKind::DanglingReference);
        CHECK(kind_of([&] { (void)build_hypergraph({A1, B1}, {dep(A1, {B1}), conflict(A1, {B1})}); })
              == ValidationErrorKind::DuplicateLabel);
        CHECK(kind_of([&] { (void)build_hypergraph({A1}, {}, {{ghost, {"f"}}}); })
              == ValidationErrorKind::DanglingReference);
        CHECK(kind_of([&] { (void)build_hypergraph({A1, B1}, {}, {{A1, {"f"}}}, {{{A1, "g"}, {{B1}}}}); })
              == ValidationErrorKind::UndeclaredFeature);
        CHECK(kind_of([&] { (void)build_hypergraph({D1, D2}, {}, {}, {}, {{{"ex", "D"}, {"2"}}}); })
              == ValidationErrorKind::InvalidVersionOrder);
    }

    TEST_CASE("same-kind duplicates merge; empty dependency sets warn")
    {
        const auto h = build_hypergraph({A1, B1}, {dep(A1, {B1}), dep(A1, {B1}), dep(B1, {})});
        CHECK(h.edges().size() == 2);
        REQUIRE(h.warnings().size() == 1);
        CHECK(h.warnings()[0].find("empty target set") != std::string::npos);
    }

    TEST_CASE("verify_resolution accepts the drawn resolution")
    {
        const auto r = verify_resolution(shared_d(), {A1}, shared_d_meeting());
        CHECK(r.valid());
        CHECK(format_report(r) == "valid\n");
    }

    TEST_CASE("verify_resolution reports each condition")
    {
        SUBCASE("conflicts in the diamond")
        {
            const ResolvedGraph g{{A1, B1, C1, D1, D3}, {{A1, B1}, {A1, C1}, {B1, D1}, {C1, D3}}, {}};
            const auto r = verify_resolution(diamond(true), {A1}, g);
            CHECK(has(r, Condition::Conflicts));
        }
        SUBCASE("query presence")
        {
            const auto r = verify_resolution(shared_d(), {A1}, {});
            CHECK(has(r, Condition::QueryPresence));
            CHECK(format_report(r).rfind("invalid: ", 0) == 0);
        }
        SUBCASE("two satisfiers for one dependency")
        {
            auto g = shared_d_meeting();
            g.vertices.insert(D1);
            g.edges.insert({B1, D1});
            CHECK(has(verify_resolution(shared_d(), {A1}, g), Condition::Dependencies));
        }
        SUBCASE("satisfier edge to an unselected package")
        {
            auto g = shared_d_meeting();
            g.edges.erase({C1, D2});
            g.edges.insert({C1, D3});
            CHECK(has(verify_resolution(shared_d(), {A1}, g), Condition::Dependencies));
        }
        SUBCASE("optional dependency present but unwired")
        {
            const auto h = build_hypergraph({A1, B1}, {opt(A1, {B1}), dep(B1, {})});
            const auto h2 = build_hypergraph({A1, B1, C1}, {opt(A1, {B1}), dep(A1, {C1}), dep(C1, {B1})});
            const ResolvedGraph g{{A1, B1, C1}, {{A1, C1}, {C1, B1}}, {}};
            CHECK(has(verify_resolution(h2, {A1}, g), Condition::OptionalDependencies));
            auto wired = g;
            wired.edges.insert({A1, B1});
            CHECK(verify_resolution(h2, {A1}, wired).valid());
            CHECK(verify_resolution(h, {A1}, {{A1}, {}, {}}).valid());
        }
        SUBCASE("self conflict makes a package unselectable")
        {
            const auto h = build_hypergraph({A1}, {conflict(A1, {A1})});
            CHECK(has(verify_resolution(h, {A1}, {{A1}, {}, {}}), Condition::Conflicts));
        }
    }

    TEST_CASE("verify_resolution is pure")
    {
        const ResolvedGraph g{{A1, B1, C1, D1, D3}, {{A1, B1}, {A1, C1}, {B1, D1}, {C1, D3}}, {}};
        CHECK(verify_resolution(diamond(true), {A1}, g) == verify_resolution(diamond(true), {A1}, g));
    }

    TEST_CASE("verify_features unifies features per satisfier")
    {
        const auto h = feature_pair();
        ResolvedGraph g{{A1, B1, C1, D1}, {{A1, B1}, {A1, C1}, {B1, D1}, {C1, D1}}, {{D1, {"alpha", "beta"}}}};
        CHECK(verify_features(h, {A1}, g).valid());
        g.selected_features[D1] = {"alpha"};
        CHECK(has(verify_features(h, {A1}, g), Condition::FeatureUnification));
    }

    TEST_CASE("verify_features checks feature dependencies")
    {
        const auto X1 = pkg("X", "1");
        const auto h = build_hypergraph({A1, X1}, {}, {{A1, {"f"}}}, {{{A1, "f"}, {{X1}}}});
        CHECK(has(verify_features(h, {A1}, {{A1}, {}, {{A1, {"f"}}}}), Condition::FeatureDependencies));
        CHECK(verify_features(h, {A1}, {{A1, X1}, {{A1, X1}}, {{A1, {"f"}}}}).valid());
    }

    TEST_CASE("verify_features matches verify_resolution without feature tables")
    {
        std::mt19937 rng(11);
        for (int i = 0; i < 40; ++i)
        {
            const auto h = random_hypergraph(rng);
            const PackageSet q{h.packages().front()};
            for (const auto& g : enumerate_resolutions(h, q))
            {
                CHECK(verify_features(h, q, g) == verify_resolution(h, q, g));
            }
            const ResolvedGraph junk{{h.packages().back()}, {}, {}};
            CHECK(verify_features(h, q, junk) == verify_resolution(h, q, junk));
        }
    }

    TEST_CASE("acyclicity is optional and ignores post edges")
    {
        const auto h = build_hypergraph({A1, B1}, {dep(A1, {B1}), dep(B1, {A1}, true)});
        const ResolvedGraph g{{A1, B1}, {{A1, B1}, {B1, A1}}, {}};
        CHECK(verify_resolution(h, {A1}, g).valid());
        CHECK(verify_resolution(h, {A1}, g, {true}).valid());
        CHECK(post_edges(h, g) == EdgeSet{{B1, A1}});

        const auto h2 = build_hypergraph({A1, B1}, {dep(A1, {B1}), dep(B1, {A1})});
        CHECK(has(verify_resolution(h2, {A1}, g, {true}), Condition::Acyclicity));
    }

    TEST_CASE("topo_plan orders dependencies first")
    {
        const auto g = shared_d_meeting();
        const auto plan = topo_plan(g, {}, false);
        CHECK(plan.order == std::vector<PackageId>{D2, B1, C1, A1});
        CHECK(plan.broken_edges.empty());
    }

    TEST_CASE("topo_plan output is one of the topological orders")
    {
        std::mt19937 rng(12);
        for (int i = 0; i < 30; ++i)
        {
            const auto h = random_hypergraph(rng);
            const PackageSet q{h.packages().front()};
            for (const auto& g : enumerate_resolutions(h, q))
            {
                try
                {
                    const auto plan = topo_plan(g, {}, false);
                    std::map<PackageId, std::size_t> at;
                    for (std::size_t k = 0; k < plan.order.size(); ++k)
                    {
                        at[plan.order[k]] = k;
                    }
                    CHECK(plan.order.size() == g.vertices.size());
                    for (const auto& [a, b] : g.edges)
                    {
                        CHECK((a == b || at[b] < at[a]));
                    }
                }
                catch (const CycleError& e)
                {
                    CHECK(!e.cycle().empty());
                }
            }
        }
    }

    TEST_CASE("cycles: post edges, CycleError, deterministic breaking")
    {
        const ResolvedGraph g{{A1, B1}, {{A1, B1}, {B1, A1}}, {}};
        CHECK(topo_plan(g, {{B1, A1}}, false).order == std::vector<PackageId>{B1, A1});
        CHECK_THROWS_AS((void)topo_plan(g, {}, false), CycleError);
        try
        {
            (void)topo_plan(g, {}, false);
        }
        catch (const CycleError& e)
        {
            CHECK(e.cycle().size() == 2);
        }
        const auto broken = topo_plan(g, {}, true);
        CHECK(broken.broken_edges == std::vector<EdgePair>{{A1, B1}});
        CHECK(broken.order == std::vector<PackageId>{A1, B1});
        CHECK(topo_plan(g, {}, true).order == broken.order);
    }

    TEST_CASE("graph JSON round trip")
    {
        auto g = shared_d_meeting();
        g.selected_features[D2] = {"alpha"};
        const EdgeSet post{{C1, D2}};
        const auto text = dump_graph_json(g, post);
        CHECK(text.find("\"post\": true") != std::string::npos);
        CHECK(load_graph_json(text) == g);
        CHECK_THROWS_AS((void)load_graph_json("{\"schema\": \"hyperres-graph/9\"}"), Error);
        CHECK_THROWS_AS((void)load_graph_json("not json"), Error);
    }

    TEST_CASE("DOT output")
    {
        CHECK(dot_label(D2) == "ex-D.2");
        CHECK(dot_label(PackageId::parse("cargo:~v3@")) == "cargo-~v3");
        const auto dot = dump_dot(shared_d_meeting(), {{C1, D2}});
        CHECK(dot.rfind("digraph", 0) == 0);
        CHECK(dot.find("\"ex-C.1\" -> \"ex-D.2\" [style=dashed]") != std::string::npos);
        CHECK(dump_dot(shared_d_meeting()) == dump_dot(shared_d_meeting()));
    }
}
