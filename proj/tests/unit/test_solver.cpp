#include <doctest.h>

#include "../support/fixtures.hpp"
#include "hyperres/core/verify.hpp"
#include "hyperres/oracle/enumerate.hpp"
#include "hyperres/solver/reduction.hpp"
#include "hyperres/solver/solve.hpp"

using namespace fixtures;

TEST_SUITE("solver")
{
    TEST_CASE("encoding of the shared-D instance")
    {
        const auto h = shared_d();
        const auto cnf = encode_cnf(h, {A1});
        CHECK(cnf.formula.num_vars == 12);
        CHECK(cnf.formula.clauses.size() == 13);
        CHECK(expected_clause_count(h, 1) == 13);
        CHECK(cnf.query_units == 1);
        CHECK(cnf.groups.front() == ClauseGroup::Query);
        CHECK(cnf.package_var(*h.index_of(D3)) == 6);
        CHECK(cnf.edge_var(*h.index_of(B1), *h.index_of(D2)) == 10);
        CHECK(cnf.edge_var(*h.index_of(B1), *h.index_of(D3)) == 0);
        CHECK(export_dimacs(cnf.formula) == read_file(data_path("shared_d.cnf")));
        CHECK(export_varmap(h, cnf) == read_file(data_path("shared_d.varmap")));
    }

    TEST_CASE("small encodings")
    {
        CHECK(export_dimacs(encode_cnf(build_hypergraph({}, {}), {}).formula) == "p cnf 0 0\n");
        const auto h = build_hypergraph({A1, B1}, {conflict(A1, {B1})});
        const auto cnf = encode_cnf(h, {});
        REQUIRE(cnf.formula.clauses.size() == 1);
        CHECK(cnf.formula.clauses[0] == Clause{-1, -2});
        CHECK(cnf.groups[0] == ClauseGroup::Conflict);
        CHECK(expected_clause_count(h, 0) == 1);

        const auto o = encode_cnf(build_hypergraph({A1, B1}, {opt(A1, {B1})}), {});
        CHECK(o.formula.num_vars == 3);
        CHECK(std::count(o.groups.begin(), o.groups.end(), ClauseGroup::OptionalTrigger) == 1);
    }

    TEST_CASE("clause counts match the closed form on random instances")
    {
        std::mt19937 rng(7);
        for (int i = 0; i < 200; ++i)
        {
            const auto h = random_hypergraph(rng);
            PackageSet q;
            if (h.size() > 0)
            {
                q.insert(h.packages().front());
            }
            CHECK(encode_cnf(h, q).formula.clauses.size() == expected_clause_count(h, q.size()));
        }
    }

    TEST_CASE("DIMACS parsing")
    {
        const auto f = parse_dimacs("c comment\np cnf 2 1\n-1 2 0\n");
        CHECK(f.num_vars == 2);
        REQUIRE(f.clauses.size() == 1);
        CHECK(f.clauses[0] == Clause{-1, 2});
        CHECK(export_dimacs(f) == "p cnf 2 1\n-1 2 0\n");
        const auto golden = read_file(data_path("shared_d.cnf"));
        CHECK(export_dimacs(parse_dimacs(golden)) == golden);
        CHECK_THROWS_AS((void)parse_dimacs("p cnf 1 1\n3 0\n"), Error);
        CHECK_THROWS_AS((void)parse_dimacs("1 0\n"), Error);
        CHECK_THROWS_AS((void)parse_dimacs("p cnf 1 2\n1 0\n"), Error);
    }

    TEST_CASE("decision order policies")
    {
        const auto h = shared_d();
        const auto high = solve(h, {A1}, {DecisionOrder::HighestVersionFirst});
        REQUIRE(high.satisfiable);
        CHECK(high.graph.vertices == PackageSet{A1, B1, C1, D2, D3});
        const auto low = solve(h, {A1}, {DecisionOrder::LowestVersionFirst});
        REQUIRE(low.satisfiable);
        CHECK(low.graph.vertices == PackageSet{A1, B1, C1, D1, D2});
        CHECK(verify_resolution(h, {A1}, high.graph).valid());
        CHECK(verify_resolution(h, {A1}, low.graph).valid());
        CHECK(decision_order_from_string("declaration") == DecisionOrder::DeclarationOrder);
        CHECK(to_string(DecisionOrder::LowestVersionFirst) == "lowest");
        CHECK_THROWS_AS((void)decision_order_from_string("newest"), Error);
        // Solving twice gives the same graph.
        CHECK(solve(h, {A1}).graph == high.graph);
    }

    TEST_CASE("unsatisfiable queries name the conflicting query packages")
    {
        const auto r = solve(diamond(true), {A1});
        CHECK_FALSE(r.satisfiable);
        CHECK(r.conflicting_queries == std::vector<PackageId>{A1});
        CHECK(r.diagnostic().find("ex:A@1") != std::string::npos);
    }

    TEST_CASE("model decoding")
    {
        const auto h = shared_d();
        const auto cnf = encode_cnf(h, {A1});
        CHECK(decode_model(h, cnf, std::vector<bool>(12, false)) == ResolvedGraph{});
        std::vector<bool> m(12, false);
        for (int v : {1, 2, 3, 5, 7, 8, 10, 11})
        {
            m[v - 1] = true;
        }
        CHECK(decode_model(h, cnf, m) == shared_d_meeting());
    }

    TEST_CASE("policy only reorders satisfier literals")
    {
        const auto h = shared_d();
        const auto cnf = encode_cnf(h, {A1});
        const auto lowest = apply_policy(h, cnf, {DecisionOrder::LowestVersionFirst});
        const auto highest = apply_policy(h, cnf, {DecisionOrder::HighestVersionFirst});
        REQUIRE(lowest.clauses.size() == highest.clauses.size());
        for (std::size_t i = 0; i < lowest.clauses.size(); ++i)
        {
            auto a = lowest.clauses[i];
            auto b = highest.clauses[i];
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            CHECK(a == b);
        }
        CHECK(highest.clauses[5] == Clause{-2, 10, 9});
    }

    TEST_CASE("reduction from SAT")
    {
        CnfFormula f{2, {{1, 2}, {-1}}};
        const auto red = reduce_sat_to_resolution(f);
        const auto q = PackageId{"sat", "q", ""};
        CHECK(red.query == PackageSet{q});
        CHECK(red.hypergraph.contains({"sat", "x1", "TRUE"}));
        CHECK(red.hypergraph.contains({"sat", "c1", ""}));
        const auto r = solve(red.hypergraph, red.query);
        REQUIRE(r.satisfiable);
        CHECK(assignment_from_resolution(2, r.graph) == std::vector<bool>{false, true});

        CHECK_FALSE(solve(reduce_sat_to_resolution({1, {{1}, {-1}}}).hypergraph, {q}).satisfiable);
        CHECK_THROWS_AS((void)reduce_sat_to_resolution({1, {{}}}), EmptyClause);
    }

    TEST_CASE("reduction agrees with the truth table")
    {
        std::mt19937 rng(11);
        for (int i = 0; i < 100; ++i)
        {
            const auto f = random_cnf(rng, 4, 8);
            const auto red = reduce_sat_to_resolution(f);
            const auto r = solve(red.hypergraph, red.query);
            CHECK(r.satisfiable == cnf_truth_table(f));
            if (r.satisfiable)
            {
                const auto a = assignment_from_resolution(f.num_vars, r.graph);
                CHECK(std::all_of(f.clauses.begin(), f.clauses.end(), [&](const Clause& c) {
                    return std::any_of(c.begin(), c.end(), [&](Literal l) { return a[std::abs(l) - 1] == (l > 0); });
                }));
            }
        }
    }

    TEST_CASE("built-in SAT backend")
    {
        CHECK(solve_sat({0, {}}).satisfiable);
        CHECK_FALSE(solve_sat({1, {{1}, {-1}}}).satisfiable);
        const std::vector<Literal> assume{-1};
        const auto r = solve_sat({2, {{1, 2}}}, assume);
        REQUIRE(r.satisfiable);
        CHECK(r.model == std::vector<bool>{false, true});
        const auto u = solve_sat({1, {{1}}}, assume);
        CHECK_FALSE(u.satisfiable);
        CHECK(u.failed_assumptions == std::vector<Literal>{-1});
    }
}
