#include "hyperres/solver/reduction.hpp"

#include <cstdlib>

namespace hyperres
{
    namespace
    {
        PackageId var_package(std::size_t var, bool value)
        {
            return {"sat", "x" + std::to_string(var), value ? "TRUE" : "FALSE"};
        }
    }

    Reduction reduce_sat_to_resolution(const CnfFormula& cnf)
    {
        HypergraphParts parts;
        for (std::size_t v = 1; v <= cnf.num_vars; ++v)
        {
            const auto t = var_package(v, true);
            const auto f = var_package(v, false);
            parts.packages.push_back(t);
            parts.packages.push_back(f);
            parts.edges.push_back({t, {f}, RelKind::Conflict, {}, false});
            parts.edges.push_back({f, {t}, RelKind::Conflict, {}, false});
        }
        const PackageId q{"sat", "q", ""};
        parts.packages.push_back(q);
        parts.virtual_packages.insert(q);
        for (std::size_t j = 0; j < cnf.clauses.size(); ++j)
        {
            const auto& clause = cnf.clauses[j];
            if (clause.empty())
            {
                throw EmptyClause("clause " + std::to_string(j + 1) + " is empty");
            }
            const PackageId c{"sat", "c" + std::to_string(j + 1), ""};
            parts.packages.push_back(c);
            parts.virtual_packages.insert(c);
            std::vector<PackageId> targets;
            for (auto lit : clause)
            {
                const auto var = static_cast<std::size_t>(std::abs(lit));
                if (lit == 0 || var > cnf.num_vars)
                {
                    throw Error("clause " + std::to_string(j + 1) + " has an out-of-range literal");
                }
                targets.push_back(var_package(var, lit > 0));
            }
            parts.edges.push_back({c, std::move(targets), RelKind::Dependency, {}, false});
            parts.edges.push_back({q, {c}, RelKind::Dependency, {}, false});
        }
        return {build_hypergraph(std::move(parts)), {q}};
    }

    std::vector<bool> assignment_from_resolution(std::size_t num_vars, const ResolvedGraph& g)
    {
        std::vector<bool> out(num_vars, false);
        for (std::size_t v = 1; v <= num_vars; ++v)
        {
            out[v - 1] = g.vertices.contains(var_package(v, true));
        }
        return out;
    }
}
