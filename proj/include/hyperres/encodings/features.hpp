#pragma once

#include <optional>
#include <string>
#include <utility>

#include "hyperres/core/hypergraph.hpp"
#include "hyperres/core/resolved_graph.hpp"

namespace hyperres
{
    class CollisionError : public Error
    {
    public:
        using Error::Error;
    };

    /// A feature's dependencies overlap the package's other dependency sets, which the lowering cannot keep apart.
    class FeatureOverlapError : public Error
    {
    public:
        using Error::Error;
    };

    /// Encodes (version, feature) pairs as `version+feature`.
    struct FeatureVersionCodec
    {
        static constexpr char separator = '+';

        [[nodiscard]] static std::string encode(const std::string& version, const std::string& feature)
        {
            return version + separator + feature;
        }

        /// Splits at the last separator; nullopt when there is none.
        [[nodiscard]] static std::optional<std::pair<std::string, std::string>> decode(const std::string& encoded);
    };

    /**
     * Rewrites a hypergraph with feature tables into one without.
     *
     * Every package (n,v) with feature f gets a virtual feature version
     * (n,v+f) that depends on {(n,v)} and on each set of fdeps((n,v),f), and
     * (n,v) gets an optional dependency on {(n,v+f)}. A dependency requiring
     * features R additionally depends on {(t,v+f)} for each f in R when it has
     * a single target t. With several targets each target t carrying all of R
     * is replaced by a coupling virtual depending on {t} and on each {t+f};
     * targets missing a feature of R are dropped from the set.
     *
     * Throws CollisionError when an encoded version equals a declared version
     * of the same name. Resolved graphs record one edge per (source, target)
     * pair, so the lowering is only exact when the feature-dependency targets
     * of a package avoid the package itself, its other dependency sets and the
     * feature-dependency targets of its other features, and when the targets
     * of a multi-target edge requiring features appear in no other dependency
     * set of its source. FeatureOverlapError is thrown otherwise.
     */
    [[nodiscard]] ResolutionHypergraph lower_features(const ResolutionHypergraph& h_ext);

    /**
     * Maps a resolved graph over lower_features(h_ext) back to h_ext. Feature
     * versions become selected features of their base package, their
     * dependency edges move to the base, and edges into coupling virtuals are
     * redirected to the coupled target.
     */
    [[nodiscard]] ResolvedGraph extract_feature_solution(const ResolutionHypergraph& h_ext, const ResolvedGraph& lowered);
}
