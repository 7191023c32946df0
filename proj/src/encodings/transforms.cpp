#include "hyperres/encodings/transforms.hpp"

#include <algorithm>

#include "hyperres/adapters/versions.hpp"
#include "hyperres/encodings/allocator.hpp"
#include "hyperres/encodings/formula.hpp"

namespace hyperres
{
    namespace
    {
        NameKey key_of(const PackageId& p)
        {
            return {p.ecosystem, p.name};
        }

        bool has_package(const HypergraphParts& parts, const PackageId& id)
        {
            return std::find(parts.packages.begin(), parts.packages.end(), id) != parts.packages.end();
        }

        /// Registers `id` unless present; `lowest` places it first in its name's order.
        void add_package(HypergraphParts& parts, const PackageId& id, bool is_virtual, bool lowest)
        {
            if (!has_package(parts, id))
            {
                parts.packages.push_back(id);
            }
            if (is_virtual)
            {
                parts.virtual_packages.insert(id);
            }
            auto it = parts.version_order.find(key_of(id));
            if (it == parts.version_order.end())
            {
                return;
            }
            auto& order = it->second;
            if (std::find(order.begin(), order.end(), id.version) == order.end())
            {
                if (lowest)
                {
                    order.insert(order.begin(), id.version);
                }
                else
                {
                    order.push_back(id.version);
                }
            }
        }

        /// Pairwise singleton conflicts in both directions.
        void mutual_conflicts(HypergraphParts& parts, const std::vector<PackageId>& group)
        {
            for (const auto& a : group)
            {
                for (const auto& b : group)
                {
                    if (a != b)
                    {
                        parts.edges.push_back({a, {b}, RelKind::Conflict, {}, false});
                    }
                }
            }
        }

        ResolutionHypergraph finish(HypergraphParts parts)
        {
            auto alloc = VirtualPackageAllocator::after(parts.packages);
            (void)separate_label_collisions(parts, alloc);
            return build_hypergraph(std::move(parts));
        }

        /// Versions of a name in ascending order, as recorded by a built hypergraph.
        const std::vector<std::string>& order_of(const ResolutionHypergraph& h, const NameKey& key)
        {
            static const std::vector<std::string> none;
            auto it = h.version_order().find(key);
            return it == h.version_order().end() ? none : it->second;
        }
    }

    ResolutionHypergraph apply_single_version_conflicts(const ResolutionHypergraph& h)
    {
        auto parts = h.parts();
        std::map<NameKey, std::vector<PackageId>> by_name;
        for (const auto& p : h.packages())
        {
            if (!h.is_virtual(p))
            {
                by_name[key_of(p)].push_back(p);
            }
        }
        for (const auto& [key, group] : by_name)
        {
            mutual_conflicts(parts, group);
        }
        return finish(std::move(parts));
    }

    void expand_virtual_provides(
        HypergraphParts& parts,
        const std::map<PackageId, std::set<std::string>>& provides,
        const std::set<NameKey>& referenced
    )
    {
        std::map<NameKey, std::vector<PackageId>> providers;
        for (const auto& [pkg, names] : provides)
        {
            for (const auto& n : names)
            {
                providers[{pkg.ecosystem, n}].push_back(pkg);
            }
        }
        for (auto& [key, list] : providers)
        {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
            const PackageId v{key.first, key.second, ""};
            add_package(parts, v, true, true);
            parts.edges.push_back({v, list, RelKind::Dependency, {}, false});
        }
        for (const auto& key : referenced)
        {
            if (providers.contains(key))
            {
                continue;
            }
            const bool declared = std::any_of(
                parts.packages.begin(),
                parts.packages.end(),
                [&](const PackageId& p) { return key_of(p) == key; }
            );
            if (declared)
            {
                continue;
            }
            const PackageId v{key.first, key.second, ""};
            add_package(parts, v, true, true);
            parts.edges.push_back({v, {}, RelKind::Dependency, {}, false});
            parts.warnings.push_back("virtual " + key.first + ":" + key.second + " has no provider");
        }
    }

    ResolutionHypergraph expand_virtual_provides(
        const ResolutionHypergraph& h,
        const std::map<PackageId, std::set<std::string>>& provides,
        const std::set<NameKey>& referenced
    )
    {
        auto parts = h.parts();
        expand_virtual_provides(parts, provides, referenced);
        return finish(std::move(parts));
    }

    ResolutionHypergraph encode_architecture(
        const ResolutionHypergraph& h,
        const std::string& ecosystem,
        const std::vector<std::string>& arches,
        const std::map<PackageId, std::string>& per_package_arch
    )
    {
        auto base = encode_variable(h, ecosystem, "arch", arches);
        auto parts = base.parts();
        for (const auto& [pkg, a] : per_package_arch)
        {
            if (a == "all")
            {
                continue;
            }
            const PackageId target{ecosystem, "arch", a};
            if (std::find(arches.begin(), arches.end(), a) == arches.end())
            {
                parts.edges.push_back({pkg, {}, RelKind::Dependency, {}, false});
                parts.warnings.push_back(pkg.str() + " is built for unknown architecture " + a);
                continue;
            }
            parts.edges.push_back({pkg, {target}, RelKind::Dependency, {}, false});
        }
        return finish(std::move(parts));
    }

    ResolutionHypergraph encode_variable(
        const ResolutionHypergraph& h,
        const std::string& ecosystem,
        const std::string& name,
        const std::vector<std::string>& values
    )
    {
        auto parts = h.parts();
        std::vector<PackageId> group;
        for (const auto& p : h.packages())
        {
            if (p.ecosystem == ecosystem && p.name == name)
            {
                group.push_back(p);
            }
        }
        for (const auto& v : values)
        {
            PackageId id{ecosystem, name, v};
            add_package(parts, id, true, false);
            if (std::find(group.begin(), group.end(), id) == group.end())
            {
                group.push_back(std::move(id));
            }
        }
        if (!parts.version_order.contains({ecosystem, name}))
        {
            std::vector<std::string> order;
            for (const auto& p : group)
            {
                order.push_back(p.version);
            }
            parts.version_order[{ecosystem, name}] = std::move(order);
        }
        mutual_conflicts(parts, group);
        return finish(std::move(parts));
    }

    UpgradeQuery make_upgrade_query(
        const ResolutionHypergraph& h,
        const PackageSet& installed,
        const std::set<NameKey>& upgrade_names,
        const std::string& ecosystem
    )
    {
        for (const auto& p : installed)
        {
            if (!h.contains(p))
            {
                throw Error("installed package " + p.str() + " is not in the hypergraph");
            }
        }
        auto parts = h.parts();
        auto alloc = VirtualPackageAllocator::after(parts.packages);
        const auto q = alloc.next(ecosystem);
        add_package(parts, q, true, true);

        auto installed_of = [&](const NameKey& key) -> const PackageId*
        {
            for (const auto& p : installed)
            {
                if (key_of(p) == key)
                {
                    return &p;
                }
            }
            return nullptr;
        };
        // Versions above `from` (all concrete versions when `from` is null), ascending.
        auto greater = [&](const NameKey& key, const PackageId* from)
        {
            std::vector<PackageId> out;
            const auto& order = order_of(h, key);
            auto it = order.begin();
            if (from != nullptr)
            {
                it = std::find(order.begin(), order.end(), from->version);
                if (it != order.end())
                {
                    ++it;
                }
            }
            for (; it != order.end(); ++it)
            {
                PackageId p{key.first, key.second, *it};
                if (!h.is_virtual(p))
                {
                    out.push_back(std::move(p));
                }
            }
            return out;
        };

        for (const auto& key : upgrade_names)
        {
            auto targets = greater(key, installed_of(key));
            if (targets.empty())
            {
                parts.warnings.push_back("no version of " + key.first + ":" + key.second + " to upgrade to");
            }
            parts.edges.push_back({q, std::move(targets), RelKind::Dependency, {}, false});
        }
        for (const auto& p : installed)
        {
            if (upgrade_names.contains(key_of(p)))
            {
                continue;
            }
            std::vector<PackageId> targets{p};
            auto up = greater(key_of(p), &p);
            targets.insert(targets.end(), up.begin(), up.end());
            parts.edges.push_back({q, std::move(targets), RelKind::Dependency, {}, false});
        }
        return {finish(std::move(parts)), q};
    }

    ResolutionHypergraph semver_conflicts(const ResolutionHypergraph& h, const std::string& ecosystem, bool cargo_compat)
    {
        auto parts = h.parts();
        std::map<std::pair<NameKey, std::vector<std::uint64_t>>, std::vector<PackageId>> bands;
        for (const auto& p : h.packages())
        {
            if (p.ecosystem != ecosystem || h.is_virtual(p))
            {
                continue;
            }
            const auto sv = parse_semver(p.version);
            std::vector<std::uint64_t> band{sv.major};
            if (cargo_compat && sv.major == 0)
            {
                band.push_back(sv.minor);
                if (sv.minor == 0)
                {
                    band.push_back(sv.patch);
                }
            }
            bands[{key_of(p), band}].push_back(p);
        }
        for (const auto& [band, group] : bands)
        {
            mutual_conflicts(parts, group);
        }
        return finish(std::move(parts));
    }

    ResolutionHypergraph restrict_nix(const ResolutionHypergraph& h)
    {
        for (const auto& e : h.edges())
        {
            if (e.kind != RelKind::Dependency)
            {
                throw ValidationError(
                    ValidationErrorKind::Restriction,
                    e.source.str() + " has a " + std::string(to_string(e.kind)) + " edge; only dependencies are allowed"
                );
            }
            if (e.targets.size() != 1)
            {
                throw ValidationError(
                    ValidationErrorKind::Restriction,
                    e.source.str() + " has a dependency on " + std::to_string(e.targets.size())
                        + " alternatives; exactly one is required"
                );
            }
            if (!e.required_features.empty())
            {
                throw ValidationError(
                    ValidationErrorKind::Restriction,
                    e.source.str() + " has a dependency requiring features"
                );
            }
        }
        auto parts = h.parts();
        parts.tree_walk = true;
        return build_hypergraph(std::move(parts));
    }
}
