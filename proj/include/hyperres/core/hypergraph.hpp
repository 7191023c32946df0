#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hyperres/core/package_id.hpp"

namespace hyperres
{
    using NameKey = std::pair<std::string, std::string>;  // (ecosystem, name)
    using FeatureTable = std::map<PackageId, std::set<std::string>>;
    using FeatureDeps = std::map<std::pair<PackageId, std::string>, std::vector<std::vector<PackageId>>>;
    using VersionOrder = std::map<NameKey, std::vector<std::string>>;

    enum class ValidationErrorKind
    {
        DanglingReference,
        DuplicateLabel,
        UndeclaredFeature,
        InvalidEdge,
        InvalidVersionOrder,
        Restriction,
    };

    class ValidationError : public Error
    {
    public:
        ValidationError(ValidationErrorKind kind, const std::string& what)
            : Error(what)
            , m_kind(kind)
        {
        }

        [[nodiscard]] ValidationErrorKind kind() const noexcept
        {
            return m_kind;
        }

    private:
        ValidationErrorKind m_kind;
    };

    /// Unvalidated contents of a hypergraph, used to stage transforms.
    struct HypergraphParts
    {
        std::vector<PackageId> packages;
        std::vector<Hyperedge> edges;
        FeatureTable features;
        FeatureDeps feature_deps;
        /// Ascending version order per name. Names left out get lexicographic order.
        VersionOrder version_order;
        /// Packages synthesized by a transform rather than declared by a repository.
        PackageSet virtual_packages;
        bool tree_walk = false;
        std::vector<std::string> warnings;
    };

    class ResolutionHypergraph;

    ResolutionHypergraph build_hypergraph(HypergraphParts parts);

    ResolutionHypergraph build_hypergraph(
        std::vector<PackageId> packages,
        std::vector<Hyperedge> edges,
        FeatureTable features = {},
        FeatureDeps feature_deps = {},
        VersionOrder version_order = {}
    );

    /**
     * A validated hyperedge-labelled directed hypergraph.
     *
     * Packages are kept in canonical (sorted) order and edges are sorted by
     * source, so the package index doubles as a stable identifier for
     * encodings. Instances are immutable once built.
     */
    class ResolutionHypergraph
    {
    public:
        ResolutionHypergraph() = default;

        [[nodiscard]] const std::vector<PackageId>& packages() const noexcept
        {
            return m_packages;
        }

        [[nodiscard]] const std::vector<Hyperedge>& edges() const noexcept
        {
            return m_edges;
        }

        [[nodiscard]] const FeatureTable& features() const noexcept
        {
            return m_features;
        }

        [[nodiscard]] const FeatureDeps& feature_deps() const noexcept
        {
            return m_feature_deps;
        }

        [[nodiscard]] const VersionOrder& version_order() const noexcept
        {
            return m_version_order;
        }

        [[nodiscard]] const PackageSet& virtual_packages() const noexcept
        {
            return m_virtuals;
        }

        [[nodiscard]] bool tree_walk() const noexcept
        {
            return m_tree_walk;
        }

        [[nodiscard]] const std::vector<std::string>& warnings() const noexcept
        {
            return m_warnings;
        }

        [[nodiscard]] bool has_feature_tables() const noexcept;

        [[nodiscard]] std::size_t size() const noexcept
        {
            return m_packages.size();
        }

        [[nodiscard]] std::optional<std::size_t> index_of(const PackageId& id) const;

        [[nodiscard]] bool contains(const PackageId& id) const
        {
            return index_of(id).has_value();
        }

        [[nodiscard]] bool is_virtual(const PackageId& id) const
        {
            return m_virtuals.contains(id);
        }

        /// Indices into edges() of the hyperedges whose source is package `pkg`.
        [[nodiscard]] std::span<const std::size_t> edges_from(std::size_t pkg) const;

        /// Package indices of the targets of edge `edge`, in declaration order.
        [[nodiscard]] std::span<const std::size_t> edge_targets(std::size_t edge) const;

        [[nodiscard]] std::size_t edge_source(std::size_t edge) const
        {
            return m_edge_source[edge];
        }

        /// Position of the package's version within its name's ascending order.
        [[nodiscard]] std::size_t version_rank(std::size_t pkg) const
        {
            return m_version_rank[pkg];
        }

        /// Declared features of a package (empty when it has none).
        [[nodiscard]] const std::set<std::string>& features_of(const PackageId& id) const;

        /// Copy of the contents, the starting point for a transform.
        [[nodiscard]] HypergraphParts parts() const;

        /// Structural equality; warnings are not compared.
        bool operator==(const ResolutionHypergraph& other) const;

    private:
        friend ResolutionHypergraph build_hypergraph(HypergraphParts parts);

        std::vector<PackageId> m_packages;
        std::vector<Hyperedge> m_edges;
        FeatureTable m_features;
        FeatureDeps m_feature_deps;
        VersionOrder m_version_order;
        PackageSet m_virtuals;
        bool m_tree_walk = false;
        std::vector<std::string> m_warnings;

        std::vector<std::size_t> m_edge_offsets;  // size() + 1 entries
        std::vector<std::size_t> m_edge_ids;
        std::vector<std::size_t> m_edge_source;
        std::vector<std::size_t> m_target_offsets;
        std::vector<std::size_t> m_target_ids;
        std::vector<std::size_t> m_version_rank;
    };
}
