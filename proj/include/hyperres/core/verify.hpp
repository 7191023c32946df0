#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hyperres/core/hypergraph.hpp"
#include "hyperres/core/resolved_graph.hpp"

namespace hyperres
{
    enum class Condition
    {
        QueryPresence,
        Dependencies,
        OptionalDependencies,
        Conflicts,
        FeatureUnification,
        FeatureDependencies,
        Acyclicity,
    };

    [[nodiscard]] std::string_view to_string(Condition c) noexcept;

    struct Violation
    {
        Condition condition;
        std::string subject;  // offending package or edge, canonical text
        std::string message;

        bool operator==(const Violation&) const = default;
    };

    struct VerificationReport
    {
        std::vector<Violation> violations;

        [[nodiscard]] bool valid() const noexcept
        {
            return violations.empty();
        }

        bool operator==(const VerificationReport&) const = default;
    };

    struct VerifyOptions
    {
        /// Also require E(G) minus post edges to be acyclic.
        bool require_acyclic = false;
    };

    /**
     * Checks a candidate resolved graph against the resolution conditions:
     * query presence, exactly-one satisfier per dependency, exactly-one
     * satisfier per optional dependency whose targets are present, and
     * conflict freedom.
     *
     * Independent of those, every edge must be justified by a dependency set
     * of its source and every vertex must be reachable from the query, so G
     * is the dependency cone of Q rather than an arbitrary superset.
     */
    [[nodiscard]] VerificationReport verify_resolution(
        const ResolutionHypergraph& h,
        const PackageSet& query,
        const ResolvedGraph& g,
        VerifyOptions options = {}
    );

    /// verify_resolution plus feature unification and feature dependencies.
    [[nodiscard]] VerificationReport verify_features(
        const ResolutionHypergraph& h,
        const PackageSet& query,
        const ResolvedGraph& g,
        VerifyOptions options = {}
    );

    /// Edges of G that realize only post-flagged dependencies of their source.
    [[nodiscard]] EdgeSet post_edges(const ResolutionHypergraph& h, const ResolvedGraph& g);

    [[nodiscard]] std::string format_report(const VerificationReport& report);
}
