#pragma once

#include <vector>

#include "hyperres/core/resolved_graph.hpp"

namespace hyperres
{
    class CycleError : public Error
    {
    public:
        explicit CycleError(std::vector<PackageId> cycle);

        /// Vertices of the cycle in edge order; the first vertex is not repeated.
        [[nodiscard]] const std::vector<PackageId>& cycle() const noexcept
        {
            return m_cycle;
        }

    private:
        std::vector<PackageId> m_cycle;
    };

    struct DeploymentPlan
    {
        /// Build order: every package appears after the packages it depends on.
        std::vector<PackageId> order;
        /// Non-post edges dropped to break cycles, in the order they were dropped.
        std::vector<EdgePair> broken_edges;
    };

    /**
     * Orders the vertices of G so dependencies come first, ignoring post
     * edges. Ties are resolved by canonical package order.
     *
     * A remaining cycle raises CycleError unless `break_all_cycles` is set,
     * in which case the cycle through the smallest stuck vertex is broken at
     * its canonically smallest edge and the edge is recorded.
     */
    [[nodiscard]] DeploymentPlan topo_plan(const ResolvedGraph& g, const EdgeSet& post_edges, bool break_all_cycles);
}
