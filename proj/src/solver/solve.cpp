#include "hyperres/solver/solve.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

#include "hyperres/core/verify.hpp"

namespace hyperres
{
    std::string_view to_string(DecisionOrder order) noexcept
    {
        switch (order)
        {
            case DecisionOrder::HighestVersionFirst:
                return "highest";
            case DecisionOrder::LowestVersionFirst:
                return "lowest";
            case DecisionOrder::DeclarationOrder:
                return "declaration";
        }
        return "highest";
    }

    DecisionOrder decision_order_from_string(std::string_view text)
    {
        if (text == "highest")
        {
            return DecisionOrder::HighestVersionFirst;
        }
        if (text == "lowest")
        {
            return DecisionOrder::LowestVersionFirst;
        }
        if (text == "declaration")
        {
            return DecisionOrder::DeclarationOrder;
        }
        throw Error("unknown solve policy '" + std::string(text) + "' (expected highest, lowest or declaration)");
    }

    std::string SolveResult::diagnostic() const
    {
        if (satisfiable)
        {
            return "satisfiable";
        }
        if (conflicting_queries.empty())
        {
            return "unsatisfiable: the hypergraph has no resolution for any query";
        }
        std::string out = "unsatisfiable: final conflict involves query units";
        for (const auto& q : conflicting_queries)
        {
            out += " (X_" + q.str() + ")";
        }
        return out;
    }

    ResolvedGraph decode_model(const ResolutionHypergraph& h, const CnfInstance& cnf, const std::vector<bool>& model)
    {
        ResolvedGraph g;
        const auto& pkgs = h.packages();
        for (std::size_t i = 0; i < cnf.varmap.size() && i < model.size(); ++i)
        {
            if (!model[i])
            {
                continue;
            }
            const auto& info = cnf.varmap[i];
            if (info.kind == VarInfo::Kind::Package)
            {
                g.vertices.insert(pkgs[info.package]);
            }
            else
            {
                g.edges.emplace(pkgs[info.package], pkgs[info.target]);
            }
        }
        return g;
    }

    namespace
    {
        /// Targets reordered so preferred satisfiers come first.
        std::vector<std::size_t> preference(
            const ResolutionHypergraph& h,
            std::span<const std::size_t> targets,
            DecisionOrder order
        )
        {
            std::vector<std::size_t> out(targets.begin(), targets.end());
            if (order == DecisionOrder::DeclarationOrder)
            {
                return out;
            }
            const auto& pkgs = h.packages();
            std::map<NameKey, std::size_t> group;
            for (auto t : out)
            {
                group.try_emplace({pkgs[t].ecosystem, pkgs[t].name}, group.size());
            }
            std::stable_sort(
                out.begin(),
                out.end(),
                [&](std::size_t a, std::size_t b)
                {
                    const auto ga = group.at({pkgs[a].ecosystem, pkgs[a].name});
                    const auto gb = group.at({pkgs[b].ecosystem, pkgs[b].name});
                    if (ga != gb)
                    {
                        return ga < gb;
                    }
                    return order == DecisionOrder::HighestVersionFirst ? h.version_rank(a) > h.version_rank(b)
                                                                       : h.version_rank(a) < h.version_rank(b);
                }
            );
            return out;
        }

        ResolvedGraph tree_walk(const ResolutionHypergraph& h, const PackageSet& query)
        {
            ResolvedGraph g;
            std::deque<std::size_t> todo;
            std::vector<char> seen(h.size(), 0);
            for (const auto& q : query)
            {
                auto i = h.index_of(q);
                if (!i)
                {
                    throw Error("query package " + q.str() + " is not in the hypergraph");
                }
                if (!seen[*i])
                {
                    seen[*i] = 1;
                    todo.push_back(*i);
                }
            }
            const auto& pkgs = h.packages();
            while (!todo.empty())
            {
                const auto p = todo.front();
                todo.pop_front();
                g.vertices.insert(pkgs[p]);
                for (auto eid : h.edges_from(p))
                {
                    for (auto t : h.edge_targets(eid))
                    {
                        g.edges.emplace(pkgs[p], pkgs[t]);
                        if (!seen[t])
                        {
                            seen[t] = 1;
                            todo.push_back(t);
                        }
                    }
                }
            }
            return g;
        }

        /// Drops edges out of unselected packages and everything unreachable from Q.
        ResolvedGraph prune(const ResolvedGraph& raw, const PackageSet& query)
        {
            std::map<PackageId, std::vector<PackageId>> out;
            for (const auto& [a, b] : raw.edges)
            {
                if (raw.vertices.contains(a) && raw.vertices.contains(b))
                {
                    out[a].push_back(b);
                }
            }
            ResolvedGraph g;
            std::deque<PackageId> todo;
            for (const auto& q : query)
            {
                if (raw.vertices.contains(q) && g.vertices.insert(q).second)
                {
                    todo.push_back(q);
                }
            }
            while (!todo.empty())
            {
                const auto p = todo.front();
                todo.pop_front();
                auto it = out.find(p);
                if (it == out.end())
                {
                    continue;
                }
                for (const auto& t : it->second)
                {
                    g.edges.emplace(p, t);
                    if (g.vertices.insert(t).second)
                    {
                        todo.push_back(t);
                    }
                }
            }
            return g;
        }
    }

    CnfFormula apply_policy(const ResolutionHypergraph& h, const CnfInstance& cnf, SolvePolicy policy)
    {
        CnfFormula f = cnf.formula;
        for (std::size_t ci = 0; ci < f.clauses.size(); ++ci)
        {
            const auto group = cnf.groups[ci];
            if (group != ClauseGroup::DependencyAtLeastOne && group != ClauseGroup::OptionalTrigger)
            {
                continue;
            }
            const auto eid = cnf.origins[ci];
            const auto p = h.edge_source(eid);
            const auto order = preference(h, h.edge_targets(eid), policy.decision_order);
            auto& clause = f.clauses[ci];
            Clause rebuilt;
            std::vector<Literal> satisfiers;
            for (auto t : order)
            {
                satisfiers.push_back(cnf.edge_var(p, t));
            }
            for (auto lit : clause)
            {
                if (lit < 0)
                {
                    rebuilt.push_back(lit);
                }
            }
            if (group == ClauseGroup::OptionalTrigger)
            {
                // The guard's own edge wires an already-present satisfier.
                const auto guard_pkg = rebuilt.size() > 1 ? static_cast<std::size_t>(-rebuilt[1] - 1) : p;
                const auto guard = cnf.edge_var(p, guard_pkg);
                auto it = std::find(satisfiers.begin(), satisfiers.end(), guard);
                if (it != satisfiers.end())
                {
                    std::rotate(satisfiers.begin(), it, it + 1);
                }
            }
            for (auto lit : satisfiers)
            {
                if (std::find(rebuilt.begin(), rebuilt.end(), lit) == rebuilt.end())
                {
                    rebuilt.push_back(lit);
                }
            }
            clause = std::move(rebuilt);
        }
        return f;
    }

    SolveResult solve(const ResolutionHypergraph& h, const PackageSet& query, SolvePolicy policy, SatBackend* backend)
    {
        SolveResult result;
        auto checked = [&](ResolvedGraph g)
        {
            const auto report = verify_resolution(h, query, g);
            if (!report.valid())
            {
                throw std::logic_error("solver produced an invalid resolution:\n" + format_report(report));
            }
            result.graph = std::move(g);
            result.satisfiable = true;
            return result;
        };
        if (h.tree_walk())
        {
            return checked(tree_walk(h, query));
        }

        const auto cnf = encode_cnf(h, query);
        auto formula = apply_policy(h, cnf, policy);
        std::vector<Literal> assumptions;
        for (std::size_t i = 0; i < cnf.query_units; ++i)
        {
            assumptions.push_back(formula.clauses[i][0]);
        }
        formula.clauses.erase(formula.clauses.begin(), formula.clauses.begin() + static_cast<std::ptrdiff_t>(cnf.query_units));

        CdclBackend builtin;
        SatBackend& sat = backend ? *backend : builtin;
        const auto outcome = sat.solve(formula, assumptions);
        if (!outcome.satisfiable)
        {
            for (auto lit : outcome.failed_assumptions)
            {
                if (lit > 0)
                {
                    result.conflicting_queries.push_back(h.packages()[static_cast<std::size_t>(lit - 1)]);
                }
            }
            return result;
        }

        return checked(prune(decode_model(h, cnf, outcome.model), query));
    }
}
