// One PASS/FAIL line per acceptance criterion; exit status is non-zero when any fails.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "../support/fixtures.hpp"
#include "hyperres/adapters/formats.hpp"
#include "hyperres/adapters/versions.hpp"
#include "hyperres/core/plan.hpp"
#include "hyperres/core/verify.hpp"
#include "hyperres/encodings/features.hpp"
#include "hyperres/encodings/formula.hpp"
#include "hyperres/encodings/transforms.hpp"
#include "hyperres/oracle/enumerate.hpp"
#include "hyperres/solver/reduction.hpp"
#include "hyperres/solver/solve.hpp"

using namespace hyperres;
using namespace fixtures;

namespace
{
    struct Outcome
    {
        bool ok = true;
        std::string detail;

        void require(bool cond, const std::string& what)
        {
            if (!cond && ok)
            {
                ok = false;
                detail = what;
            }
        }
    };

    bool contains(const std::vector<ResolvedGraph>& all, const ResolvedGraph& g)
    {
        return std::binary_search(all.begin(), all.end(), g);
    }

    bool same_graph(const ResolutionHypergraph& h, const PackageSet& q, const ResolvedGraph& g)
    {
        return verify_resolution(h, q, g).valid();
    }

    void c1(Outcome& r)
    {
        const auto h = shared_d();
        const PackageSet q{A1};
        r.require(verify_resolution(h, q, shared_d_meeting()).valid(), "drawn resolution rejected");
        const auto all = enumerate_resolutions(h, q);
        r.require(all.size() == 4, "oracle found " + std::to_string(all.size()) + " resolutions, expected 4");
        const auto s = solve(h, q);
        r.require(s.satisfiable && contains(all, s.graph), "solve result not among the oracle's resolutions");
    }

    void c2(Outcome& r)
    {
        const PackageSet q{A1};
        const auto d = diamond(true);
        r.require(!solve(d, q).satisfiable, "diamond with conflicts reported satisfiable");
        r.require(enumerate_resolutions(d, q).empty(), "oracle found a diamond resolution");

        // The same diamond over semantic versions: distinct majors may coexist.
        const PackageId a{"crates", "a", "1.0.0"}, b{"crates", "b", "1.0.0"}, c{"crates", "c", "1.0.0"};
        const PackageId d1{"crates", "d", "1.0.0"}, d3{"crates", "d", "3.0.0"};
        const auto semver = semver_conflicts(
            build_hypergraph({a, b, c, d1, d3}, {dep(a, {b}), dep(a, {c}), dep(b, {d1}), dep(c, {d3})}),
            "crates"
        );
        const auto s = solve(semver, {a});
        r.require(s.satisfiable, "semver diamond reported unsatisfiable");
        r.require(s.graph.vertices == PackageSet{a, b, c, d1, d3}, "semver diamond lacks one of the d versions");
    }

    void c3(Outcome& r)
    {
        std::mt19937 rng(3);
        int agree = 0;
        for (int i = 0; i < 500; ++i)
        {
            const auto vars = std::uniform_int_distribution<std::size_t>(3, 8)(rng);
            CnfFormula f;
            f.num_vars = vars;
            const auto m = std::uniform_int_distribution<int>(1, 12)(rng);
            for (int j = 0; j < m; ++j)
            {
                std::vector<int> pool(vars);
                std::iota(pool.begin(), pool.end(), 1);
                std::shuffle(pool.begin(), pool.end(), rng);
                Clause c;
                for (int k = 0; k < 3; ++k)
                {
                    c.push_back(std::bernoulli_distribution(0.5)(rng) ? -pool[k] : pool[k]);
                }
                f.clauses.push_back(c);
            }
            const auto red = reduce_sat_to_resolution(f);
            const auto s = solve(red.hypergraph, red.query);
            bool consistent = s.satisfiable == cnf_truth_table(f);
            if (s.satisfiable)
            {
                // The assignment read back must satisfy f.
                const auto model = assignment_from_resolution(f.num_vars, s.graph);
                for (const auto& c : f.clauses)
                {
                    bool sat = false;
                    for (auto lit : c)
                    {
                        sat = sat || model[std::abs(lit) - 1] == (lit > 0);
                    }
                    consistent = consistent && sat;
                }
            }
            agree += consistent ? 1 : 0;
        }
        r.require(agree == 500, std::to_string(agree) + "/500 agree");
    }

    void c4(Outcome& r)
    {
        std::mt19937 rng(4);
        int agree = 0;
        for (int i = 0; i < 300; ++i)
        {
            const auto h = random_hypergraph(rng);
            const PackageSet q{h.packages()[std::uniform_int_distribution<std::size_t>(0, h.size() - 1)(rng)]};
            const auto all = enumerate_resolutions(h, q);
            const auto s = solve(h, q);
            bool ok = s.satisfiable == !all.empty();
            if (s.satisfiable)
            {
                ok = ok && same_graph(h, q, s.graph) && contains(all, s.graph);
            }
            agree += ok ? 1 : 0;
        }
        r.require(agree == 300, std::to_string(agree) + "/300 agree");
    }

    /// Atoms over `universe`; a formula is satisfiable when some subset of the universe makes it true.
    bool formula_satisfiable(const PackageFormula& f, const std::vector<PackageId>& universe)
    {
        for (std::uint32_t mask = 0; mask < (1U << universe.size()); ++mask)
        {
            PackageSet sel;
            for (std::size_t i = 0; i < universe.size(); ++i)
            {
                if (mask >> i & 1U)
                {
                    sel.insert(universe[i]);
                }
            }
            if (f.evaluate(sel))
            {
                return true;
            }
        }
        return false;
    }

    /// Lowers `f` from a root package and compares with brute force. Every oracle resolution must satisfy f.
    bool lowering_agrees(const PackageFormula& f, const std::vector<PackageId>& universe)
    {
        const PackageId root{"ex", "root", "1"};
        VirtualPackageAllocator alloc;
        auto lowered = lower_boolean_formula(root, f, alloc);
        HypergraphParts parts;
        parts.packages = universe;
        parts.packages.push_back(root);
        append(parts, std::move(lowered));
        separate_label_collisions(parts, alloc);
        const auto h = build_hypergraph(std::move(parts));
        const auto all = enumerate_resolutions(h, {root});
        for (const auto& g : all)
        {
            if (!f.evaluate(g.vertices))
            {
                return false;
            }
        }
        const bool sat = formula_satisfiable(f, universe);
        return sat == !all.empty() && sat == solve(h, {root}).satisfiable;
    }

    PackageFormula literal(const PackageId& p, bool positive)
    {
        auto a = PackageFormula::atom({p});
        return positive ? a : PackageFormula::negate(a);
    }

    PackageFormula random_formula(std::mt19937& rng, const std::vector<PackageId>& atoms, int depth)
    {
        std::uniform_int_distribution<int> kind(0, depth == 0 ? 0 : 2);
        const int k = kind(rng);
        if (k == 0)
        {
            const auto& p = atoms[std::uniform_int_distribution<std::size_t>(0, atoms.size() - 1)(rng)];
            return literal(p, std::bernoulli_distribution(0.7)(rng));
        }
        std::vector<PackageFormula> children;
        const int n = std::uniform_int_distribution<int>(1, 3)(rng);
        for (int i = 0; i < n; ++i)
        {
            children.push_back(random_formula(rng, atoms, depth - 1));
        }
        return k == 1 ? PackageFormula::all_of(std::move(children)) : PackageFormula::any_of(std::move(children));
    }

    void c5(Outcome& r)
    {
        const PackageId x{"ex", "x", "1"}, y{"ex", "y", "1"};
        int failures = 0;
        // Truth function t: bit (2*vx + vy) of t is the value at x=vx, y=vy. Built as a DNF of minterms.
        for (int t = 0; t < 16; ++t)
        {
            std::vector<PackageFormula> minterms;
            for (int vx = 0; vx < 2; ++vx)
            {
                for (int vy = 0; vy < 2; ++vy)
                {
                    if (t >> (2 * vx + vy) & 1)
                    {
                        minterms.push_back(PackageFormula::all_of({literal(x, vx == 1), literal(y, vy == 1)}));
                    }
                }
            }
            const auto f = PackageFormula::any_of(std::move(minterms));
            failures += lowering_agrees(f, {x, y}) ? 0 : 1;
        }
        r.require(failures == 0, std::to_string(failures) + " of 16 two-atom truth functions disagree");

        std::mt19937 rng(5);
        const PackageId z1{"ex", "z", "1"}, z2{"ex", "z", "2"};
        const std::vector<PackageId> universe{x, y, z1, z2};
        int sample_failures = 0;
        for (int i = 0; i < 200; ++i)
        {
            sample_failures += lowering_agrees(random_formula(rng, {x, y, z1}, 3), universe) ? 0 : 1;
        }
        r.require(sample_failures == 0, std::to_string(sample_failures) + " of 200 three-atom formulae disagree");
    }

    std::vector<ResolvedGraph> lowered_then_extracted(const ResolutionHypergraph& h, const PackageSet& q)
    {
        EnumerationBudget budget;
        budget.max_packages = 24;
        const auto lowered = lower_features(h);
        std::set<ResolvedGraph> out;
        for (const auto& g : enumerate_resolutions(lowered, q, budget))
        {
            out.insert(extract_feature_solution(h, g));
        }
        return {out.begin(), out.end()};
    }

    void c6(Outcome& r)
    {
        const auto h = feature_pair();
        const PackageSet q{A1};
        const auto direct = enumerate_feature_resolutions(h, q);
        r.require(!direct.empty(), "no feature resolution of the alpha/beta instance");
        r.require(direct == lowered_then_extracted(h, q), "alpha/beta instance: lowered enumeration differs");

        // Draws whose feature dependencies overlap other dependency sets are outside the
        // lowering's domain; they must be refused with FeatureOverlapError, not lowered.
        std::mt19937 rng(6);
        int agree = 0;
        int tried = 0;
        for (int i = 0; i < 100 && tried < 10'000; ++tried)
        {
            const auto hi = random_feature_hypergraph(rng);
            const PackageSet qi{hi.packages()[std::uniform_int_distribution<std::size_t>(0, hi.size() - 1)(rng)]};
            try
            {
                (void)lower_features(hi);
            }
            catch (const FeatureOverlapError&)
            {
                continue;
            }
            ++i;
            agree += enumerate_feature_resolutions(hi, qi) == lowered_then_extracted(hi, qi) ? 1 : 0;
        }
        r.require(agree == 100, std::to_string(agree) + "/100 random feature instances agree");
    }

    void c7(Outcome& r)
    {
        std::mt19937 rng(7);
        int violations = 0;
        for (int i = 0; i < 100; ++i)
        {
            const auto h = apply_single_version_conflicts(random_hypergraph(rng));
            const PackageSet q{h.packages()[std::uniform_int_distribution<std::size_t>(0, h.size() - 1)(rng)]};
            for (const auto& g : enumerate_resolutions(h, q))
            {
                std::map<NameKey, int> per_name;
                for (const auto& p : g.vertices)
                {
                    if (++per_name[{p.ecosystem, p.name}] == 2)
                    {
                        ++violations;
                    }
                }
            }
        }
        r.require(violations == 0, std::to_string(violations) + " violations");
    }

    int sign(int c)
    {
        return (c > 0) - (c < 0);
    }

    bool dpkg_available()
    {
        return std::system("dpkg --compare-versions 1 lt 2 >/dev/null 2>&1") == 0;
    }

    int dpkg_verdict(const std::string& a, const std::string& b)
    {
        auto q = [](const std::string& s) { return "'" + s + "'"; };
        if (std::system(("dpkg --compare-versions " + q(a) + " lt " + q(b)).c_str()) == 0)
        {
            return -1;
        }
        return std::system(("dpkg --compare-versions " + q(a) + " eq " + q(b)).c_str()) == 0 ? 0 : 1;
    }

    void c8(Outcome& r)
    {
        std::istringstream corpus(read_file(data_path("debian_versions.tsv")));
        const bool live = dpkg_available();
        int pairs = 0;
        int mismatches = 0;
        for (std::string line; std::getline(corpus, line);)
        {
            std::istringstream fields(line);
            std::string a, op, b;
            std::getline(fields, a, '\t');
            std::getline(fields, op, '\t');
            std::getline(fields, b, '\t');
            const int golden = op == "<" ? -1 : op == "=" ? 0 : 1;
            const int ours = sign(compare_debian(a, b));
            ++pairs;
            mismatches += ours != golden ? 1 : 0;
            if (live)
            {
                mismatches += ours != dpkg_verdict(a, b) ? 1 : 0;
            }
        }
        r.require(pairs == 200, "corpus has " + std::to_string(pairs) + " pairs");
        r.require(mismatches == 0, std::to_string(mismatches) + " Debian mismatches");

        // Each step is strictly increasing in precedence.
        const std::vector<std::string> ladder = {
            "1.0.0-alpha", "1.0.0-alpha.1", "1.0.0-alpha.beta", "1.0.0-beta", "1.0.0-beta.2",
            "1.0.0-beta.11", "1.0.0-rc.1", "1.0.0", "2.0.0", "2.1.0", "2.1.1",
        };
        for (std::size_t i = 0; i + 1 < ladder.size(); ++i)
        {
            r.require(
                semver_precedence(parse_semver(ladder[i]), parse_semver(ladder[i + 1])) < 0,
                ladder[i] + " is not below " + ladder[i + 1]
            );
        }
        r.require(semver_precedence(parse_semver("1.0.0+20130313144700"), parse_semver("1.0.0")) == 0,
                  "build metadata changed precedence");
        r.require(semver_precedence(parse_semver("1.0.0-alpha+001"), parse_semver("1.0.0-alpha")) == 0,
                  "build metadata on a prerelease changed precedence");
        r.require(semver_precedence(parse_semver("1.6.1"), parse_semver("1.13.0")) < 0, "minor compared lexically");
    }

    std::vector<std::size_t> ecosystem_runs(const std::vector<PackageId>& order)
    {
        std::vector<std::size_t> runs;
        for (std::size_t i = 0; i < order.size(); ++i)
        {
            if (i == 0 || order[i].ecosystem != order[i - 1].ecosystem)
            {
                runs.push_back(i);
            }
        }
        return runs;
    }

    void c9(Outcome& r)
    {
        const auto text = read_file(data_path("cross_ecosystem.json"));
        const auto repo = load_interchange(text);
        const auto& h = repo.hypergraph;
        const PackageSet q{PackageId::parse("cargo:polars@0.35.0"), PackageId::parse("cargo:os-distribution@debian")};
        const auto s = solve(h, q);
        r.require(s.satisfiable, "cross-ecosystem query unsatisfiable");
        if (!s.satisfiable)
        {
            return;
        }
        r.require(s.graph.vertices.contains(PackageId::parse("debian:libssl-dev@3.0.11-1~deb12u2")),
                  "os-distribution condition did not pull in the Debian library");
        const auto post = post_edges(h, s.graph);
        try
        {
            const auto plan = topo_plan(s.graph, post, false);
            std::vector<PackageId> concrete;
            std::map<PackageId, std::size_t> at;
            for (const auto& p : plan.order)
            {
                at[p] = at.size();
                if (!h.is_virtual(p))
                {
                    concrete.push_back(p);
                }
            }
            bool ordered = plan.broken_edges.empty();
            for (const auto& e : s.graph.edges)
            {
                ordered = ordered && (post.contains(e) || at[e.second] < at[e.first]);
            }
            r.require(ordered, "plan violates dependency order");
            r.require(ecosystem_runs(concrete).size() >= 3, "plan does not interleave the two ecosystems");
        }
        catch (const CycleError& e)
        {
            r.require(false, std::string("post-marked cycle raised: ") + e.what());
        }

        // Without the post mark the same cycle must be rejected unless breaking is allowed.
        const auto post_free = load_interchange(
            std::string(text).replace(text.find(", \"post\": true"), std::string(", \"post\": true").size(), "")
        );
        const auto s2 = solve(post_free.hypergraph, q);
        r.require(s2.satisfiable, "unmarked variant unsatisfiable");
        const auto post2 = post_edges(post_free.hypergraph, s2.graph);
        bool raised = false;
        try
        {
            (void)topo_plan(s2.graph, post2, false);
        }
        catch (const CycleError&)
        {
            raised = true;
        }
        r.require(raised, "unmarked cycle did not raise CycleError");
        try
        {
            const auto broken = topo_plan(s2.graph, post2, true);
            r.require(broken.broken_edges.size() == 1, "expected exactly one broken edge");
        }
        catch (const CycleError&)
        {
            r.require(false, "break_all_cycles still raised CycleError");
        }
    }

    /// 2,500 names with 4 versions each; every version takes any version of the next name, and
    /// every 25th name also needs one of three later names.
    ResolutionHypergraph chain_and_fanout()
    {
        const int names = 2500;
        const int versions = 4;
        auto id = [](int n, int v) { return PackageId{"scale", "p" + std::to_string(n), std::to_string(v)}; };
        HypergraphParts parts;
        for (int n = 0; n < names; ++n)
        {
            for (int v = 1; v <= versions; ++v)
            {
                parts.packages.push_back(id(n, v));
            }
        }
        for (int n = 0; n + 1 < names; ++n)
        {
            std::vector<PackageId> next;
            for (int v = 1; v <= versions; ++v)
            {
                next.push_back(id(n + 1, v));
            }
            for (int v = 1; v <= versions; ++v)
            {
                parts.edges.push_back(dep(id(n, v), next));
                if (n % 25 == 0 && n + 40 < names)
                {
                    parts.edges.push_back(dep(id(n, v), {id(n + 10, 1), id(n + 20, 2), id(n + 40, 3)}));
                }
            }
        }
        return apply_single_version_conflicts(build_hypergraph(std::move(parts)));
    }

    void c10(Outcome& r)
    {
        const auto h = chain_and_fanout();
        const PackageSet q{{"scale", "p0", "1"}};
        r.require(h.size() == 10'000, "instance has " + std::to_string(h.size()) + " packages");
        const auto d1 = export_dimacs(encode_cnf(h, q).formula);
        const auto d2 = export_dimacs(encode_cnf(h, q).formula);
        r.require(d1 == d2, "DIMACS differs between runs");
        const auto s1 = solve(h, q);
        const auto s2 = solve(h, q);
        r.require(s1.satisfiable && s2.satisfiable, "scale instance unsatisfiable");
        r.require(s1.graph == s2.graph, "resolved graph differs between runs");
        r.require(verify_resolution(h, q, s1.graph).valid(), "scale resolution rejected by the verifier");
    }

    struct Criterion
    {
        int number;
        std::string name;
        double limit_seconds;  // 0: no limit
        std::function<void(Outcome&)> check;
    };
}

int main()
{
    const std::vector<Criterion> criteria = {
        {1, "shared-dependency fixture: verifier, oracle count, solver", 1, c1},
        {2, "diamond unsatisfiable; semver variant keeps both majors", 1, c2},
        {3, "SAT reduction equisatisfiable on 500 random 3-CNF", 30, c3},
        {4, "solver matches oracle on 300 random hypergraphs", 60, c4},
        {5, "boolean lowering exhaustive over 2 atoms, sampled over 3", 10, c5},
        {6, "feature lowering round trip, fixture plus 100 random", 60, c6},
        {7, "single-version conflicts hold on 100 random instances", 0, c7},
        {8, "Debian and semver comparators against oracles", 0, c8},
        {9, "two-ecosystem fixture: one-pass resolve, interleaved plan, cycles", 0, c9},
        {10, "10,000-package determinism and scale", 5, c10},
    };
    int failed = 0;
    for (const auto& c : criteria)
    {
        Outcome r;
        const auto start = std::chrono::steady_clock::now();
        try
        {
            c.check(r);
        }
        catch (const std::exception& e)
        {
            r.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_seconds > 0)
        {
            std::ostringstream lim;
            lim << "took " << secs << " s, limit " << c.limit_seconds << " s";
            r.require(secs < c.limit_seconds, lim.str());
        }
        failed += r.ok ? 0 : 1;
        std::cout << (r.ok ? "PASS" : "FAIL") << " criterion " << c.number << ": " << c.name;
        std::cout << " (" << secs << " s)";
        if (!r.ok)
        {
            std::cout << " -- " << r.detail;
        }
        std::cout << '\n';
    }
    return failed == 0 ? 0 : 1;
}
