#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hyperres/core/hypergraph.hpp"
#include "hyperres/core/resolved_graph.hpp"
#include "hyperres/solver/cnf.hpp"
#include "hyperres/solver/sat.hpp"

namespace hyperres
{
    enum class DecisionOrder
    {
        HighestVersionFirst,
        LowestVersionFirst,
        DeclarationOrder,
    };

    [[nodiscard]] std::string_view to_string(DecisionOrder order) noexcept;

    /// Accepts `highest`, `lowest` and `declaration`; throws Error otherwise.
    [[nodiscard]] DecisionOrder decision_order_from_string(std::string_view text);

    struct SolvePolicy
    {
        DecisionOrder decision_order = DecisionOrder::HighestVersionFirst;
    };

    struct SolveResult
    {
        bool satisfiable = false;
        ResolvedGraph graph;
        /// Query packages whose unit clauses take part in the final conflict.
        std::vector<PackageId> conflicting_queries;

        [[nodiscard]] std::string diagnostic() const;
    };

    /// Graph named by a model: true package variables and true edge variables.
    [[nodiscard]] ResolvedGraph decode_model(
        const ResolutionHypergraph& h,
        const CnfInstance& cnf,
        const std::vector<bool>& model
    );

    /// Copy of the encoding with the satisfier literals of each clause reordered by `policy`.
    [[nodiscard]] CnfFormula apply_policy(const ResolutionHypergraph& h, const CnfInstance& cnf, SolvePolicy policy);

    /**
     * Resolves Q on H. The SAT model is trimmed to the part reachable from Q
     * and checked with verify_resolution before it is returned. Hypergraphs
     * flagged for tree walking are resolved by transitive closure instead.
     */
    [[nodiscard]] SolveResult solve(
        const ResolutionHypergraph& h,
        const PackageSet& query,
        SolvePolicy policy = {},
        SatBackend* backend = nullptr
    );
}
