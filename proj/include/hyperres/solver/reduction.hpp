#pragma once

#include <utility>
#include <vector>

#include "hyperres/core/hypergraph.hpp"
#include "hyperres/core/resolved_graph.hpp"
#include "hyperres/solver/cnf.hpp"

namespace hyperres
{
    class EmptyClause : public Error
    {
    public:
        using Error::Error;
    };

    struct Reduction
    {
        ResolutionHypergraph hypergraph;
        PackageSet query;
    };

    /**
     * Builds a resolution instance that is resolvable iff `cnf` is
     * satisfiable. In ecosystem `sat`: packages `x<i>@TRUE` and `x<i>@FALSE`
     * conflicting with each other, a package `c<j>@` per clause depending on
     * its literal packages, and `q@` depending on every clause package.
     */
    [[nodiscard]] Reduction reduce_sat_to_resolution(const CnfFormula& cnf);

    /// Reads the assignment off a resolution of a reduced instance; unselected variables are false.
    [[nodiscard]] std::vector<bool> assignment_from_resolution(std::size_t num_vars, const ResolvedGraph& g);
}
