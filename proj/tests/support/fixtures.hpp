#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "hyperres/core/hypergraph.hpp"
#include "hyperres/core/resolved_graph.hpp"
#include "hyperres/solver/cnf.hpp"

namespace fixtures
{
    using namespace hyperres;

    inline PackageId pkg(const std::string& name, const std::string& version, const std::string& eco = "ex")
    {
        return {eco, name, version};
    }

    inline Hyperedge dep(PackageId src, std::vector<PackageId> targets, bool post = false)
    {
        return {std::move(src), std::move(targets), RelKind::Dependency, {}, post};
    }

    inline Hyperedge opt(PackageId src, std::vector<PackageId> targets)
    {
        return {std::move(src), std::move(targets), RelKind::OptionalDependency, {}, false};
    }

    inline Hyperedge conflict(PackageId src, std::vector<PackageId> targets)
    {
        return {std::move(src), std::move(targets), RelKind::Conflict, {}, false};
    }

    inline const PackageId A1 = pkg("A", "1");
    inline const PackageId B1 = pkg("B", "1");
    inline const PackageId C1 = pkg("C", "1");
    inline const PackageId D1 = pkg("D", "1");
    inline const PackageId D2 = pkg("D", "2");
    inline const PackageId D3 = pkg("D", "3");

    /// A1 needs B1 and C1; B1 takes D1 or D2; C1 takes D2 or D3.
    inline ResolutionHypergraph shared_d()
    {
        return build_hypergraph(
            {A1, B1, C1, D1, D2, D3},
            {dep(A1, {B1}), dep(A1, {C1}), dep(B1, {D1, D2}), dep(C1, {D2, D3})}
        );
    }

    /// B1 and C1 meet at D2.
    inline ResolvedGraph shared_d_meeting()
    {
        return {{A1, B1, C1, D2}, {{A1, B1}, {A1, C1}, {B1, D2}, {C1, D2}}, {}};
    }

    /// Diamond: B1 pins D1, C1 pins D3. With `conflicts` the two D versions exclude each other.
    inline ResolutionHypergraph diamond(bool conflicts)
    {
        std::vector<Hyperedge> edges = {dep(A1, {B1}), dep(A1, {C1}), dep(B1, {D1}), dep(C1, {D3})};
        if (conflicts)
        {
            edges.push_back(conflict(D1, {D3}));
            edges.push_back(conflict(D3, {D1}));
        }
        return build_hypergraph({A1, B1, C1, D1, D3}, std::move(edges));
    }

    /// B1 and C1 both need D1, with features alpha and beta respectively.
    inline ResolutionHypergraph feature_pair()
    {
        auto b = dep(B1, {D1});
        b.required_features = {"alpha"};
        auto c = dep(C1, {D1});
        c.required_features = {"beta"};
        return build_hypergraph(
            {A1, B1, C1, D1},
            {dep(A1, {B1}), dep(A1, {C1}), b, c},
            {{D1, {"alpha", "beta"}}}
        );
    }

    struct RandomShape
    {
        int max_names = 5;
        int max_versions = 3;
        int max_packages = 12;
        int max_edges_per_package = 2;
        int max_targets = 3;
        double p_optional = 0.2;
        double p_conflict = 0.2;
    };

    /// Random ex-ecosystem hypergraph: names n0.., versions 1..k, mixed edge kinds.
    inline ResolutionHypergraph random_hypergraph(std::mt19937& rng, const RandomShape& shape = {})
    {
        std::uniform_int_distribution<int> names(1, shape.max_names);
        std::vector<PackageId> all;
        const int n = names(rng);
        for (int i = 0; i < n && static_cast<int>(all.size()) < shape.max_packages; ++i)
        {
            const int k = std::uniform_int_distribution<int>(1, shape.max_versions)(rng);
            for (int v = 1; v <= k && static_cast<int>(all.size()) < shape.max_packages; ++v)
            {
                all.push_back(pkg("n" + std::to_string(i), std::to_string(v)));
            }
        }
        std::uniform_real_distribution<double> coin(0, 1);
        std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
        std::vector<Hyperedge> edges;
        for (const auto& p : all)
        {
            const int m = std::uniform_int_distribution<int>(0, shape.max_edges_per_package)(rng);
            for (int j = 0; j < m; ++j)
            {
                std::vector<PackageId> targets;
                const int t = std::uniform_int_distribution<int>(1, shape.max_targets)(rng);
                for (int x = 0; x < t; ++x)
                {
                    auto c = all[pick(rng)];
                    if (std::find(targets.begin(), targets.end(), c) == targets.end())
                    {
                        targets.push_back(c);
                    }
                }
                const double r = coin(rng);
                const RelKind kind = r < shape.p_conflict ? RelKind::Conflict
                                     : r < shape.p_conflict + shape.p_optional ? RelKind::OptionalDependency
                                                                               : RelKind::Dependency;
                edges.push_back({p, targets, kind, {}, false});
            }
        }
        // Drop edges that would give one target set two kinds.
        std::vector<Hyperedge> kept;
        for (auto& e : edges)
        {
            auto sorted = e.targets;
            std::sort(sorted.begin(), sorted.end());
            bool clash = false;
            for (const auto& k : kept)
            {
                auto ks = k.targets;
                std::sort(ks.begin(), ks.end());
                clash = clash || (k.source == e.source && ks == sorted && k.kind != e.kind);
            }
            if (!clash)
            {
                kept.push_back(std::move(e));
            }
        }
        return build_hypergraph(all, kept);
    }

    /// Random feature instance: at most 8 packages, at most 2 features each.
    inline ResolutionHypergraph random_feature_hypergraph(std::mt19937& rng)
    {
        RandomShape shape;
        shape.max_names = 4;
        shape.max_versions = 2;
        shape.max_packages = 6;
        shape.max_targets = 2;
        shape.p_conflict = 0.15;
        shape.p_optional = 0.0;
        auto base = random_hypergraph(rng, shape).parts();
        std::uniform_real_distribution<double> coin(0, 1);
        const std::vector<std::string> pool = {"f", "g"};
        for (const auto& p : base.packages)
        {
            std::set<std::string> fs;
            for (const auto& f : pool)
            {
                if (coin(rng) < 0.4)
                {
                    fs.insert(f);
                }
            }
            if (!fs.empty())
            {
                base.features[p] = fs;
            }
        }
        std::uniform_int_distribution<std::size_t> pick(0, base.packages.size() - 1);
        for (const auto& [p, fs] : base.features)
        {
            for (const auto& f : fs)
            {
                if (coin(rng) < 0.4)
                {
                    base.feature_deps[{p, f}].push_back({base.packages[pick(rng)]});
                }
            }
        }
        for (auto& e : base.edges)
        {
            if (e.kind != RelKind::Dependency || coin(rng) < 0.5)
            {
                continue;
            }
            const auto& t = e.targets.front();
            auto it = base.features.find(t);
            if (it != base.features.end())
            {
                e.required_features = {*it->second.begin()};
            }
        }
        return build_hypergraph(std::move(base));
    }

    /// Random CNF with `vars` variables, up to `max_clauses` clauses of 1..3 literals.
    inline CnfFormula random_cnf(std::mt19937& rng, std::size_t vars, std::size_t max_clauses)
    {
        CnfFormula f;
        f.num_vars = vars;
        const auto m = std::uniform_int_distribution<std::size_t>(1, max_clauses)(rng);
        std::uniform_int_distribution<int> var(1, static_cast<int>(vars));
        std::uniform_int_distribution<int> width(1, 3);
        std::bernoulli_distribution neg(0.5);
        for (std::size_t i = 0; i < m; ++i)
        {
            Clause c;
            const int w = width(rng);
            for (int j = 0; j < w; ++j)
            {
                c.push_back(neg(rng) ? -var(rng) : var(rng));
            }
            f.clauses.push_back(std::move(c));
        }
        return f;
    }

    inline std::string data_path(const std::string& name)
    {
        return std::string(HYPERRES_TEST_DATA) + "/" + name;
    }

    inline std::string read_file(const std::string& path)
    {
        std::ifstream f(path, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }

    struct RunResult
    {
        int code;
        std::string out;
    };

    /// Runs a shell command, capturing stdout.
    inline RunResult run(const std::string& cmd)
    {
        RunResult r{-1, {}};
        FILE* pipe = ::popen(cmd.c_str(), "r");
        if (pipe == nullptr)
        {
            return r;
        }
        char buf[4096];
        std::size_t n;
        while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0)
        {
            r.out.append(buf, n);
        }
        const int status = ::pclose(pipe);
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        return r;
    }
}
