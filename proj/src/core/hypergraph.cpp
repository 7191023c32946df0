#include "hyperres/core/hypergraph.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace hyperres
{
    namespace
    {
        std::vector<PackageId> sorted_unique(std::vector<PackageId> v)
        {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
            return v;
        }

        std::vector<PackageId> dedupe_keep_order(const std::vector<PackageId>& targets)
        {
            std::vector<PackageId> out;
            out.reserve(targets.size());
            PackageSet seen;
            for (const auto& t : targets)
            {
                if (seen.insert(t).second)
                {
                    out.push_back(t);
                }
            }
            return out;
        }

        class Index
        {
        public:
            explicit Index(const std::vector<PackageId>& packages)
                : m_packages(packages)
            {
            }

            [[nodiscard]] std::optional<std::size_t> find(const PackageId& id) const
            {
                auto it = std::lower_bound(m_packages.begin(), m_packages.end(), id);
                if (it == m_packages.end() || *it != id)
                {
                    return std::nullopt;
                }
                return static_cast<std::size_t>(it - m_packages.begin());
            }

            std::size_t require(const PackageId& id, const std::string& context) const
            {
                auto i = find(id);
                if (!i)
                {
                    throw ValidationError(
                        ValidationErrorKind::DanglingReference,
                        context + " references undeclared package " + id.str()
                    );
                }
                return *i;
            }

        private:
            const std::vector<PackageId>& m_packages;
        };
    }

    ResolutionHypergraph build_hypergraph(
        std::vector<PackageId> packages,
        std::vector<Hyperedge> edges,
        FeatureTable features,
        FeatureDeps feature_deps,
        VersionOrder version_order
    )
    {
        HypergraphParts parts;
        parts.packages = std::move(packages);
        parts.edges = std::move(edges);
        parts.features = std::move(features);
        parts.feature_deps = std::move(feature_deps);
        parts.version_order = std::move(version_order);
        return build_hypergraph(std::move(parts));
    }

    ResolutionHypergraph build_hypergraph(HypergraphParts parts)
    {
        ResolutionHypergraph g;
        g.m_packages = sorted_unique(std::move(parts.packages));
        g.m_warnings = std::move(parts.warnings);
        g.m_tree_walk = parts.tree_walk;
        const Index index(g.m_packages);

        for (const auto& v : parts.virtual_packages)
        {
            index.require(v, "virtual package list");
        }
        g.m_virtuals = std::move(parts.virtual_packages);

        for (const auto& p : g.m_packages)
        {
            if (p.ecosystem.empty() || p.name.empty())
            {
                throw ValidationError(
                    ValidationErrorKind::InvalidEdge,
                    "package with empty ecosystem or name: '" + p.str() + "'"
                );
            }
        }

        // Edges: validate, dedupe targets and merge repeated declarations.
        std::map<std::pair<PackageId, std::vector<PackageId>>, std::size_t> by_target_set;
        std::vector<Hyperedge> merged;
        merged.reserve(parts.edges.size());
        for (auto& e : parts.edges)
        {
            const std::string ctx = std::string(to_string(e.kind)) + " edge from " + e.source.str();
            index.require(e.source, ctx);
            for (const auto& t : e.targets)
            {
                index.require(t, ctx);
            }
            if (e.post && e.kind != RelKind::Dependency)
            {
                throw ValidationError(ValidationErrorKind::InvalidEdge, ctx + " is marked post but is not a dependency");
            }
            if (!e.required_features.empty() && e.kind != RelKind::Dependency)
            {
                throw ValidationError(
                    ValidationErrorKind::InvalidEdge,
                    ctx + " requires features but is not a dependency"
                );
            }
            e.targets = dedupe_keep_order(e.targets);
            auto key_set = e.targets;
            std::sort(key_set.begin(), key_set.end());
            auto key = std::make_pair(e.source, std::move(key_set));
            auto it = by_target_set.find(key);
            if (it == by_target_set.end())
            {
                if (e.targets.empty() && e.kind == RelKind::Dependency)
                {
                    auto w = ctx + " has an empty target set; " + e.source.str() + " cannot be selected";
                    if (std::find(g.m_warnings.begin(), g.m_warnings.end(), w) == g.m_warnings.end())
                    {
                        g.m_warnings.push_back(std::move(w));
                    }
                }
                by_target_set.emplace(std::move(key), merged.size());
                merged.push_back(std::move(e));
                continue;
            }
            auto& existing = merged[it->second];
            if (existing.kind != e.kind)
            {
                throw ValidationError(
                    ValidationErrorKind::DuplicateLabel,
                    "package " + e.source.str() + " has both a " + std::string(to_string(existing.kind))
                        + " and a " + std::string(to_string(e.kind)) + " edge on the same target set"
                );
            }
            existing.required_features.insert(e.required_features.begin(), e.required_features.end());
            existing.post = existing.post && e.post;
        }
        std::sort(merged.begin(), merged.end(), canonical_less);
        g.m_edges = std::move(merged);

        // Feature tables.
        for (auto& [pkg, feats] : parts.features)
        {
            index.require(pkg, "feature table");
            if (!feats.empty())
            {
                g.m_features.emplace(pkg, std::move(feats));
            }
        }
        for (auto& [key, sets] : parts.feature_deps)
        {
            const auto& [pkg, feature] = key;
            index.require(pkg, "feature dependency table");
            auto fit = g.m_features.find(pkg);
            if (fit == g.m_features.end() || !fit->second.contains(feature))
            {
                throw ValidationError(
                    ValidationErrorKind::UndeclaredFeature,
                    "feature dependencies reference undeclared feature '" + feature + "' of " + pkg.str()
                );
            }
            for (auto& set : sets)
            {
                for (const auto& t : set)
                {
                    index.require(t, "feature '" + feature + "' of " + pkg.str());
                }
                set = dedupe_keep_order(set);
            }
            if (!sets.empty())
            {
                g.m_feature_deps.emplace(key, std::move(sets));
            }
        }

        // Version order: one entry per declared name, a permutation of its versions.
        std::map<NameKey, std::vector<std::string>> declared;
        for (const auto& p : g.m_packages)
        {
            declared[{p.ecosystem, p.name}].push_back(p.version);
        }
        for (const auto& [key, order] : parts.version_order)
        {
            auto dit = declared.find(key);
            if (dit == declared.end())
            {
                throw ValidationError(
                    ValidationErrorKind::InvalidVersionOrder,
                    "version order given for undeclared name " + key.first + ":" + key.second
                );
            }
            auto sorted_order = order;
            std::sort(sorted_order.begin(), sorted_order.end());
            if (sorted_order != dit->second)  // declared versions are already sorted
            {
                throw ValidationError(
                    ValidationErrorKind::InvalidVersionOrder,
                    "version order for " + key.first + ":" + key.second
                        + " must list each declared version exactly once"
                );
            }
        }
        for (auto& [key, versions] : declared)
        {
            auto oit = parts.version_order.find(key);
            if (oit != parts.version_order.end())
            {
                g.m_version_order.emplace(key, std::move(oit->second));
            }
            else
            {
                g.m_version_order.emplace(key, std::move(versions));
            }
        }

        // Index structures.
        const std::size_t n = g.m_packages.size();
        g.m_version_rank.assign(n, 0);
        for (const auto& [key, order] : g.m_version_order)
        {
            for (std::size_t r = 0; r < order.size(); ++r)
            {
                g.m_version_rank[*index.find({key.first, key.second, order[r]})] = r;
            }
        }
        g.m_edge_offsets.assign(n + 1, 0);
        g.m_edge_ids.resize(g.m_edges.size());
        std::iota(g.m_edge_ids.begin(), g.m_edge_ids.end(), std::size_t{0});
        g.m_edge_source.reserve(g.m_edges.size());
        g.m_target_offsets.reserve(g.m_edges.size() + 1);
        g.m_target_offsets.push_back(0);
        for (const auto& e : g.m_edges)
        {
            const auto src = *index.find(e.source);
            g.m_edge_source.push_back(src);
            ++g.m_edge_offsets[src + 1];
            for (const auto& t : e.targets)
            {
                g.m_target_ids.push_back(*index.find(t));
            }
            g.m_target_offsets.push_back(g.m_target_ids.size());
        }
        std::partial_sum(g.m_edge_offsets.begin(), g.m_edge_offsets.end(), g.m_edge_offsets.begin());
        return g;
    }

    bool ResolutionHypergraph::has_feature_tables() const noexcept
    {
        if (!m_features.empty() || !m_feature_deps.empty())
        {
            return true;
        }
        return std::any_of(
            m_edges.begin(),
            m_edges.end(),
            [](const Hyperedge& e) { return !e.required_features.empty(); }
        );
    }

    std::optional<std::size_t> ResolutionHypergraph::index_of(const PackageId& id) const
    {
        auto it = std::lower_bound(m_packages.begin(), m_packages.end(), id);
        if (it == m_packages.end() || *it != id)
        {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - m_packages.begin());
    }

    std::span<const std::size_t> ResolutionHypergraph::edges_from(std::size_t pkg) const
    {
        const auto begin = m_edge_offsets[pkg];
        const auto end = m_edge_offsets[pkg + 1];
        return std::span<const std::size_t>(m_edge_ids).subspan(begin, end - begin);
    }

    std::span<const std::size_t> ResolutionHypergraph::edge_targets(std::size_t edge) const
    {
        const auto begin = m_target_offsets[edge];
        const auto end = m_target_offsets[edge + 1];
        return std::span<const std::size_t>(m_target_ids).subspan(begin, end - begin);
    }

    const std::set<std::string>& ResolutionHypergraph::features_of(const PackageId& id) const
    {
        static const std::set<std::string> none;
        auto it = m_features.find(id);
        return it == m_features.end() ? none : it->second;
    }

    HypergraphParts ResolutionHypergraph::parts() const
    {
        HypergraphParts p;
        p.packages = m_packages;
        p.edges = m_edges;
        p.features = m_features;
        p.feature_deps = m_feature_deps;
        p.version_order = m_version_order;
        p.virtual_packages = m_virtuals;
        p.tree_walk = m_tree_walk;
        p.warnings = m_warnings;
        return p;
    }

    bool ResolutionHypergraph::operator==(const ResolutionHypergraph& other) const
    {
        return std::tie(m_packages, m_edges, m_features, m_feature_deps, m_version_order, m_virtuals, m_tree_walk)
               == std::tie(
                   other.m_packages,
                   other.m_edges,
                   other.m_features,
                   other.m_feature_deps,
                   other.m_version_order,
                   other.m_virtuals,
                   other.m_tree_walk
               );
    }
}
