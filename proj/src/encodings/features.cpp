#include "hyperres/encodings/features.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "hyperres/encodings/allocator.hpp"
#include "hyperres/encodings/formula.hpp"

namespace hyperres
{
    std::optional<std::pair<std::string, std::string>> FeatureVersionCodec::decode(const std::string& encoded)
    {
        const auto pos = encoded.rfind(separator);
        if (pos == std::string::npos)
        {
            return std::nullopt;
        }
        return std::make_pair(encoded.substr(0, pos), encoded.substr(pos + 1));
    }

    namespace
    {
        PackageId feature_version(const PackageId& p, const std::string& f)
        {
            return {p.ecosystem, p.name, FeatureVersionCodec::encode(p.version, f)};
        }

        /// Feature version -> (base package, feature) for every declared feature.
        std::map<PackageId, std::pair<PackageId, std::string>> feature_versions(const ResolutionHypergraph& h)
        {
            std::map<PackageId, std::pair<PackageId, std::string>> out;
            for (const auto& [p, feats] : h.features())
            {
                for (const auto& f : feats)
                {
                    out.emplace(feature_version(p, f), std::make_pair(p, f));
                }
            }
            return out;
        }

        /// Feature-dependency targets of p must be disjoint from p itself, from p's other
        /// dependency sets and from the feature-dependency targets of p's other features.
        void check_disjoint(const ResolutionHypergraph& h)
        {
            // Couplings re-source the targets of a multi-target featured edge, so those targets
            // may not be shared with another dependency set of the same source.
            std::map<std::pair<PackageId, PackageId>, int> uses;
            for (const auto& e : h.edges())
            {
                if (e.kind != RelKind::Conflict)
                {
                    for (const auto& t : e.targets)
                    {
                        ++uses[{e.source, t}];
                    }
                }
            }
            for (const auto& e : h.edges())
            {
                if (e.kind == RelKind::Conflict || e.required_features.empty() || e.targets.size() < 2)
                {
                    continue;
                }
                for (const auto& t : e.targets)
                {
                    if (uses[{e.source, t}] > 1)
                    {
                        throw FeatureOverlapError(
                            "dependency of " + e.source.str() + " requiring features shares target " + t.str()
                            + " with another dependency set"
                        );
                    }
                }
            }

            std::map<PackageId, std::map<PackageId, std::string>> owner;  // p -> target -> what claims it
            for (const auto& e : h.edges())
            {
                if (e.kind == RelKind::Conflict || !h.features().contains(e.source))
                {
                    continue;
                }
                for (const auto& t : e.targets)
                {
                    owner[e.source].emplace(t, "a dependency set");
                }
            }
            for (const auto& [key, sets] : h.feature_deps())
            {
                const auto& [p, f] = key;
                auto& claims = owner[p];
                std::set<PackageId> mine;
                for (const auto& set : sets)
                {
                    mine.insert(set.begin(), set.end());
                }
                for (const auto& t : mine)
                {
                    if (t == p)
                    {
                        throw FeatureOverlapError("feature '" + f + "' of " + p.str() + " depends on the package itself");
                    }
                    auto [it, fresh] = claims.emplace(t, "feature '" + f + "'");
                    if (!fresh)
                    {
                        throw FeatureOverlapError(
                            "feature '" + f + "' of " + p.str() + " shares target " + t.str() + " with " + it->second
                        );
                    }
                }
            }
        }
    }

    ResolutionHypergraph lower_features(const ResolutionHypergraph& h)
    {
        const auto fvs = feature_versions(h);
        for (const auto& [fv, base] : fvs)
        {
            if (h.contains(fv))
            {
                throw CollisionError(
                    "feature version " + fv.str() + " of feature '" + base.second + "' collides with a declared version"
                );
            }
        }

        check_disjoint(h);

        HypergraphParts parts;
        parts.packages = h.packages();
        parts.virtual_packages = h.virtual_packages();
        parts.warnings = h.warnings();
        auto alloc = VirtualPackageAllocator::after(parts.packages);

        // Feature versions follow their base version in the name's order.
        for (const auto& [key, order] : h.version_order())
        {
            std::vector<std::string> lowered;
            for (const auto& v : order)
            {
                lowered.push_back(v);
                const PackageId p{key.first, key.second, v};
                for (const auto& f : h.features_of(p))
                {
                    lowered.push_back(FeatureVersionCodec::encode(v, f));
                }
            }
            parts.version_order.emplace(key, std::move(lowered));
        }

        for (const auto& [p, feats] : h.features())
        {
            for (const auto& f : feats)
            {
                const auto fv = feature_version(p, f);
                parts.packages.push_back(fv);
                parts.virtual_packages.insert(fv);
                parts.edges.push_back({fv, {p}, RelKind::Dependency, {}, false});
                parts.edges.push_back({p, {fv}, RelKind::OptionalDependency, {}, false});
                auto it = h.feature_deps().find({p, f});
                if (it != h.feature_deps().end())
                {
                    for (const auto& set : it->second)
                    {
                        parts.edges.push_back({fv, set, RelKind::Dependency, {}, false});
                    }
                }
            }
        }

        for (const auto& e : h.edges())
        {
            if (e.required_features.empty())
            {
                parts.edges.push_back(e);
                continue;
            }
            auto has_all = [&](const PackageId& t)
            {
                const auto& declared = h.features_of(t);
                return std::includes(
                    declared.begin(), declared.end(), e.required_features.begin(), e.required_features.end()
                );
            };
            if (e.targets.size() == 1)
            {
                const auto& t = e.targets.front();
                parts.edges.push_back({e.source, {t}, RelKind::Dependency, {}, e.post});
                for (const auto& f : e.required_features)
                {
                    if (h.features_of(t).contains(f))
                    {
                        parts.edges.push_back({e.source, {feature_version(t, f)}, RelKind::Dependency, {}, e.post});
                    }
                    else
                    {
                        parts.edges.push_back({e.source, {}, RelKind::Dependency, {}, e.post});
                        parts.warnings.push_back(
                            e.source.str() + " requires feature '" + f + "' which " + t.str() + " does not declare"
                        );
                    }
                }
                continue;
            }
            std::vector<PackageId> couplings;
            for (const auto& t : e.targets)
            {
                if (!has_all(t))
                {
                    continue;
                }
                const auto w = alloc.next(e.source.ecosystem);
                parts.packages.push_back(w);
                parts.virtual_packages.insert(w);
                parts.edges.push_back({w, {t}, RelKind::Dependency, {}, false});
                for (const auto& f : e.required_features)
                {
                    parts.edges.push_back({w, {feature_version(t, f)}, RelKind::Dependency, {}, false});
                }
                couplings.push_back(w);
            }
            parts.edges.push_back({e.source, std::move(couplings), RelKind::Dependency, {}, e.post});
        }
        // A package requiring its own feature repeats its optional edge as a dependency.
        separate_label_collisions(parts, alloc);
        return build_hypergraph(std::move(parts));
    }

    ResolvedGraph extract_feature_solution(const ResolutionHypergraph& h, const ResolvedGraph& lowered)
    {
        const auto fvs = feature_versions(h);
        // Coupling virtuals stand for their one successor declared in h.
        std::map<PackageId, PackageId> image;
        for (const auto& [a, b] : lowered.edges)
        {
            if (!h.contains(a) && !fvs.contains(a) && h.contains(b))
            {
                image[a] = b;
            }
        }

        ResolvedGraph g;
        for (const auto& v : lowered.vertices)
        {
            if (h.contains(v))
            {
                g.vertices.insert(v);
            }
            else if (auto it = fvs.find(v); it != fvs.end())
            {
                g.selected_features[it->second.first].insert(it->second.second);
            }
        }
        for (const auto& [a, b] : lowered.edges)
        {
            if (auto it = fvs.find(a); it != fvs.end())
            {
                const auto& base = it->second.first;
                if (b != base && h.contains(b))
                {
                    g.edges.insert({base, b});
                }
                continue;
            }
            if (!h.contains(a) || fvs.contains(b))
            {
                continue;
            }
            if (auto it = image.find(b); it != image.end())
            {
                g.edges.insert({a, it->second});
            }
            else if (h.contains(b))
            {
                g.edges.insert({a, b});
            }
        }
        return g;
    }
}
