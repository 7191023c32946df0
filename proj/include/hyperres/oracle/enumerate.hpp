#pragma once

#include <chrono>
#include <cstddef>
#include <vector>

#include "hyperres/core/hypergraph.hpp"
#include "hyperres/core/resolved_graph.hpp"
#include "hyperres/solver/cnf.hpp"

namespace hyperres
{
    class BudgetExceeded : public Error
    {
    public:
        using Error::Error;
    };

    struct EnumerationBudget
    {
        std::size_t max_packages = 15;
        /// Cap on candidate graphs handed to the verifier.
        std::size_t max_candidates = 5'000'000;
        std::chrono::milliseconds timeout{60'000};
    };

    /**
     * Every resolved graph accepted by verify_resolution, by brute force:
     * each vertex set containing Q, crossed with each choice of one selected
     * satisfier per dependency and per optional dependency with a selected
     * target. Sorted and free of duplicates.
     */
    [[nodiscard]] std::vector<ResolvedGraph> enumerate_resolutions(
        const ResolutionHypergraph& h,
        const PackageSet& query,
        EnumerationBudget budget = {}
    );

    /// As enumerate_resolutions, also ranging over every feature labelling of the selected vertices.
    [[nodiscard]] std::vector<ResolvedGraph> enumerate_feature_resolutions(
        const ResolutionHypergraph& h,
        const PackageSet& query,
        EnumerationBudget budget = {}
    );

    /// Exhaustive satisfiability check; at most 20 variables.
    [[nodiscard]] bool cnf_truth_table(const CnfFormula& cnf);
}
