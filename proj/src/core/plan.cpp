#include "hyperres/core/plan.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace hyperres
{
    namespace
    {
        std::string describe_cycle(const std::vector<PackageId>& cycle)
        {
            std::string out = "dependency cycle: ";
            for (const auto& p : cycle)
            {
                out += p.str() + " -> ";
            }
            if (!cycle.empty())
            {
                out += cycle.front().str();
            }
            return out;
        }
    }

    CycleError::CycleError(std::vector<PackageId> cycle)
        : Error(describe_cycle(cycle))
        , m_cycle(std::move(cycle))
    {
    }

    DeploymentPlan topo_plan(const ResolvedGraph& g, const EdgeSet& post_edges, bool break_all_cycles)
    {
        const std::vector<PackageId> vertices(g.vertices.begin(), g.vertices.end());
        const std::size_t n = vertices.size();
        auto index = [&](const PackageId& p) -> std::size_t
        {
            auto it = std::lower_bound(vertices.begin(), vertices.end(), p);
            if (it == vertices.end() || *it != p)
            {
                throw Error("plan edge endpoint " + p.str() + " is not a vertex of the resolved graph");
            }
            return static_cast<std::size_t>(it - vertices.begin());
        };

        // deps[v]: packages v still waits for; users[t]: packages waiting on t.
        std::vector<std::set<std::size_t>> deps(n);
        std::vector<std::vector<std::size_t>> users(n);
        for (const auto& edge : g.edges)
        {
            const auto a = index(edge.first);
            const auto b = index(edge.second);
            if (post_edges.contains(edge))
            {
                continue;
            }
            if (deps[a].insert(b).second)
            {
                users[b].push_back(a);
            }
        }

        DeploymentPlan plan;
        plan.order.reserve(n);
        std::vector<char> placed(n, 0);
        std::set<std::size_t> ready;
        for (std::size_t v = 0; v < n; ++v)
        {
            if (deps[v].empty())
            {
                ready.insert(v);
            }
        }

        auto drop_edge = [&](std::size_t a, std::size_t b)
        {
            deps[a].erase(b);
            if (deps[a].empty() && !placed[a])
            {
                ready.insert(a);
            }
        };

        // Shortest cycle through `start` over unplaced vertices, if any.
        auto cycle_through = [&](std::size_t start) -> std::vector<std::size_t>
        {
            std::vector<std::size_t> parent(n, n);
            std::vector<char> seen(n, 0);
            std::deque<std::size_t> todo{start};
            while (!todo.empty())
            {
                const auto v = todo.front();
                todo.pop_front();
                for (auto w : deps[v])
                {
                    if (w == start)
                    {
                        std::vector<std::size_t> path{v};
                        for (auto u = v; u != start; u = parent[u])
                        {
                            path.push_back(parent[u]);
                        }
                        std::reverse(path.begin(), path.end());
                        return path;
                    }
                    if (!seen[w])
                    {
                        seen[w] = 1;
                        parent[w] = v;
                        todo.push_back(w);
                    }
                }
            }
            return {};
        };

        while (plan.order.size() < n)
        {
            if (ready.empty())
            {
                std::vector<std::size_t> cycle;
                for (std::size_t v = 0; v < n && cycle.empty(); ++v)
                {
                    if (!placed[v])
                    {
                        cycle = cycle_through(v);
                    }
                }
                if (!break_all_cycles)
                {
                    std::vector<PackageId> ids;
                    for (auto v : cycle)
                    {
                        ids.push_back(vertices[v]);
                    }
                    throw CycleError(std::move(ids));
                }
                std::size_t best = 0;
                for (std::size_t i = 1; i < cycle.size(); ++i)
                {
                    const auto& a = cycle[i];
                    const auto& a_next = cycle[(i + 1) % cycle.size()];
                    const auto& b = cycle[best];
                    const auto& b_next = cycle[(best + 1) % cycle.size()];
                    if (std::tie(vertices[a], vertices[a_next]) < std::tie(vertices[b], vertices[b_next]))
                    {
                        best = i;
                    }
                }
                const auto src = cycle[best];
                const auto dst = cycle[(best + 1) % cycle.size()];
                plan.broken_edges.emplace_back(vertices[src], vertices[dst]);
                drop_edge(src, dst);
                continue;
            }
            const auto v = *ready.begin();
            ready.erase(ready.begin());
            placed[v] = 1;
            plan.order.push_back(vertices[v]);
            for (auto u : users[v])
            {
                if (deps[u].contains(v))
                {
                    drop_edge(u, v);
                }
            }
        }
        return plan;
    }
}
