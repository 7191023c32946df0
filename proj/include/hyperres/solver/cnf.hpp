#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hyperres/core/hypergraph.hpp"

namespace hyperres
{
    using Literal = std::int32_t;
    using Clause = std::vector<Literal>;

    struct CnfFormula
    {
        std::size_t num_vars = 0;
        std::vector<Clause> clauses;

        bool operator==(const CnfFormula&) const = default;
    };

    /// What a propositional variable stands for: X_p or X_(p,e).
    struct VarInfo
    {
        enum class Kind : std::uint8_t
        {
            Package,
            Edge,
        };

        Kind kind = Kind::Package;
        std::size_t package = 0;  // p, as a package index
        std::size_t target = 0;   // e, for edge variables

        bool operator==(const VarInfo&) const = default;
    };

    enum class ClauseGroup : std::uint8_t
    {
        Query,
        DependencyAtLeastOne,
        Implication,
        AtMostOne,
        OptionalTrigger,
        Conflict,
    };

    struct CnfInstance
    {
        CnfFormula formula;
        /// varmap[i - 1] describes variable i.
        std::vector<VarInfo> varmap;
        /// Per clause: its group and the hyperedge it came from (unused for query units).
        std::vector<ClauseGroup> groups;
        std::vector<std::size_t> origins;
        std::size_t query_units = 0;
        /// Per source package: (target, variable) pairs sorted by target.
        std::vector<std::vector<std::pair<std::size_t, Literal>>> edge_index;

        [[nodiscard]] Literal package_var(std::size_t pkg) const
        {
            return static_cast<Literal>(pkg + 1);
        }

        /// Variable of X_(p,e), or 0 when no hyperedge of p targets e.
        [[nodiscard]] Literal edge_var(std::size_t p, std::size_t e) const;
    };

    /**
     * Encodes resolution of Q on H as CNF.
     *
     * Variables 1..|P| are X_p in canonical package order; edge variables
     * follow, one per (source, target) pair in edge order and target order.
     * Clauses come in this order: query units, then per hyperedge of each
     * package its dependency, optional or conflict clauses.
     */
    [[nodiscard]] CnfInstance encode_cnf(const ResolutionHypergraph& h, const PackageSet& query);

    /// Clause count predicted by the closed form over H's hyperedges and |Q|.
    [[nodiscard]] std::size_t expected_clause_count(const ResolutionHypergraph& h, std::size_t query_size);

    [[nodiscard]] std::string export_dimacs(const CnfFormula& cnf);

    /// Parses DIMACS CNF text. Throws Error on malformed input.
    [[nodiscard]] CnfFormula parse_dimacs(const std::string& text);

    /// Sidecar describing each variable: `<i> pkg <id>` or `<i> edge <src> -> <dst>`.
    [[nodiscard]] std::string export_varmap(const ResolutionHypergraph& h, const CnfInstance& cnf);
}
