#include "hyperres/adapters/bundle.hpp"

#include <algorithm>

#include "hyperres/encodings/allocator.hpp"
#include "hyperres/encodings/formula.hpp"
#include "hyperres/encodings/transforms.hpp"

namespace hyperres
{
    namespace
    {
        void register_ecosystem(
            std::map<std::string, EcosystemInfo>& known,
            const std::string& eco,
            const EcosystemInfo& info,
            bool& shared
        )
        {
            shared = false;
            auto it = known.find(eco);
            if (it == known.end())
            {
                known.emplace(eco, info);
                return;
            }
            if (info.snapshot.empty() || it->second.snapshot != info.snapshot)
            {
                throw Error(
                    "ecosystem '" + eco + "' is provided by more than one repository without a shared snapshot id"
                );
            }
            if (it->second.scheme != info.scheme)
            {
                throw Error("ecosystem '" + eco + "' is declared with two version schemes");
            }
            shared = true;
        }

        bool is_any(const VersionConstraint& c)
        {
            return c.kind == VersionConstraint::Kind::And && c.children.empty();
        }

        class Materializer
        {
        public:
            Materializer(HypergraphParts& parts, const std::map<std::string, EcosystemInfo>& ecosystems)
                : m_parts(parts)
                , m_ecosystems(ecosystems)
                , m_alloc(VirtualPackageAllocator::after(parts.packages))
            {
                for (const auto& p : parts.packages)
                {
                    m_by_variable[p.name].push_back(p);
                }
            }

            void record(const Bundle& b, const PackageRecord& r)
            {
                const PackageId src{b.ecosystem, r.name, r.version};
                std::vector<PackageFormula> deps;
                for (const auto& d : r.depends)
                {
                    deps.push_back(convert(b.ecosystem, d));
                }
                if (!deps.empty())
                {
                    append(m_parts, lower_boolean_formula(src, PackageFormula::all_of(std::move(deps)), m_alloc));
                }
                for (const auto& d : r.depopts)
                {
                    flat_edge(b.ecosystem, src, d, RelKind::OptionalDependency);
                }
                for (const auto& d : r.conflicts)
                {
                    flat_edge(b.ecosystem, src, d, RelKind::Conflict);
                }
                if (!r.test_depends.empty())
                {
                    std::vector<PackageFormula> tests;
                    for (const auto& d : r.test_depends)
                    {
                        tests.push_back(convert(b.ecosystem, d));
                    }
                    append(m_parts, lower_with_test(src, PackageFormula::all_of(std::move(tests)), m_alloc));
                }
                for (const auto& [f, extra] : r.features)
                {
                    m_parts.features[src].insert(f);
                    for (const auto& d : extra)
                    {
                        if (d.kind != Requirement::Kind::Atom || !d.variable.empty() || !d.features.empty())
                        {
                            throw Error(src.str() + ": feature '" + f + "' must list plain package requirements");
                        }
                        m_parts.feature_deps[{src, f}].push_back(targets(b.ecosystem, d));
                    }
                }
            }

            VirtualPackageAllocator& alloc()
            {
                return m_alloc;
            }

        private:
            std::vector<PackageId> targets(const std::string& eco, const Requirement& atom)
            {
                const NameKey key{atom.ecosystem.empty() ? eco : atom.ecosystem, atom.name};
                auto it = m_parts.version_order.find(key);
                if (it == m_parts.version_order.end())
                {
                    m_parts.warnings.push_back(key.first + ":" + key.second + " is not in any loaded repository");
                    return {};
                }
                auto eit = m_ecosystems.find(key.first);
                const auto scheme = eit == m_ecosystems.end() ? VersionScheme::OpaqueLexicographic : eit->second.scheme;
                std::vector<PackageId> out;
                for (const auto& v : it->second)
                {
                    if (v.empty() ? is_any(atom.constraint) : atom.constraint.matches(scheme, v))
                    {
                        out.push_back({key.first, key.second, v});
                    }
                }
                return out;
            }

            PackageFormula convert(const std::string& eco, const Requirement& r)
            {
                PackageFormula f;
                switch (r.kind)
                {
                    case Requirement::Kind::Atom:
                        f = PackageFormula::atom(targets(eco, r), r.post, r.features);
                        break;
                    case Requirement::Kind::And:
                    case Requirement::Kind::Or:
                    {
                        std::vector<PackageFormula> children;
                        for (const auto& c : r.children)
                        {
                            children.push_back(convert(eco, c));
                        }
                        f = r.kind == Requirement::Kind::And ? PackageFormula::all_of(std::move(children))
                                                              : PackageFormula::any_of(std::move(children));
                        break;
                    }
                    case Requirement::Kind::Not:
                        f = PackageFormula::negate(convert(eco, r.children.at(0)));
                        break;
                }
                if (r.variable.empty())
                {
                    return f;
                }
                // Holds when the variable takes the value, and vacuously under any other value.
                std::vector<PackageId> when;
                std::vector<PackageId> otherwise;
                for (const auto& p : m_by_variable[r.variable])
                {
                    (p.version == r.value ? when : otherwise).push_back(p);
                }
                if (when.empty())
                {
                    m_parts.warnings.push_back(
                        "variable " + r.variable + " has no value '" + r.value + "'; the condition never holds"
                    );
                }
                return PackageFormula::any_of(
                    {conditioned(std::move(f), std::move(when)), PackageFormula::atom(std::move(otherwise))}
                );
            }

            void flat_edge(const std::string& eco, const PackageId& src, const Requirement& r, RelKind kind)
            {
                std::vector<PackageId> set;
                auto add = [&](const Requirement& a)
                {
                    if (a.kind != Requirement::Kind::Atom || !a.variable.empty() || !a.features.empty())
                    {
                        throw Error(
                            src.str() + ": " + std::string(to_string(kind))
                            + " entries must be packages or alternations of packages"
                        );
                    }
                    auto t = targets(eco, a);
                    set.insert(set.end(), t.begin(), t.end());
                };
                if (r.kind == Requirement::Kind::Or && r.variable.empty())
                {
                    for (const auto& c : r.children)
                    {
                        add(c);
                    }
                }
                else
                {
                    add(r);
                }
                if (kind == RelKind::Conflict)
                {
                    std::erase(set, src);
                }
                if (!set.empty())
                {
                    m_parts.edges.push_back({src, std::move(set), kind, {}, false});
                }
            }

            HypergraphParts& m_parts;
            const std::map<std::string, EcosystemInfo>& m_ecosystems;
            VirtualPackageAllocator m_alloc;
            std::map<std::string, std::vector<PackageId>> m_by_variable;
        };
    }

    void order_versions(HypergraphParts& parts, const std::map<std::string, EcosystemInfo>& ecosystems)
    {
        std::map<NameKey, std::vector<std::string>> declared;
        for (const auto& p : parts.packages)
        {
            declared[{p.ecosystem, p.name}].push_back(p.version);
        }
        for (auto& [key, versions] : declared)
        {
            std::sort(versions.begin(), versions.end());
            auto it = parts.version_order.find(key);
            if (it != parts.version_order.end())
            {
                auto recorded = it->second;
                std::sort(recorded.begin(), recorded.end());
                if (recorded == versions)
                {
                    continue;
                }
            }
            auto eit = ecosystems.find(key.first);
            const auto scheme = eit == ecosystems.end() ? VersionScheme::OpaqueLexicographic : eit->second.scheme;
            std::vector<std::string> concrete;
            bool has_empty = false;
            for (const auto& v : versions)
            {
                if (v.empty())
                {
                    has_empty = true;
                }
                else
                {
                    concrete.push_back(v);
                }
            }
            sort_versions(scheme, concrete);
            if (has_empty)
            {
                concrete.insert(concrete.begin(), "");
            }
            parts.version_order[key] = std::move(concrete);
        }
    }

    Repository materialize(const std::vector<Bundle>& bundles, const Repository& base)
    {
        Repository out;
        out.metadata = base.metadata;
        auto parts = base.hypergraph.parts();
        PackageSet present(parts.packages.begin(), parts.packages.end());

        std::map<PackageId, std::set<std::string>> provides;
        for (const auto& b : bundles)
        {
            bool shared = false;
            register_ecosystem(out.metadata.ecosystems, b.ecosystem, {b.scheme, b.snapshot}, shared);
            for (const auto& r : b.packages)
            {
                check_version(b.scheme, r.version);
                const PackageId id{b.ecosystem, r.name, r.version};
                if (!present.insert(id).second)
                {
                    throw Error("duplicate package " + id.str());
                }
                parts.packages.push_back(id);
                if (!r.provides.empty())
                {
                    provides[id].insert(r.provides.begin(), r.provides.end());
                }
                if (!r.architecture.empty())
                {
                    out.metadata.architectures[id] = r.architecture;
                }
            }
            parts.warnings.insert(parts.warnings.end(), b.warnings.begin(), b.warnings.end());
        }
        expand_virtual_provides(parts, provides);
        order_versions(parts, out.metadata.ecosystems);

        Materializer m(parts, out.metadata.ecosystems);
        for (const auto& b : bundles)
        {
            for (const auto& r : b.packages)
            {
                m.record(b, r);
            }
        }
        (void)separate_label_collisions(parts, m.alloc());
        order_versions(parts, out.metadata.ecosystems);  // test packages join their name
        out.hypergraph = build_hypergraph(std::move(parts));
        return out;
    }

    Repository merge_repositories(const std::vector<Repository>& repos)
    {
        Repository out;
        HypergraphParts parts;
        PackageSet present;
        std::set<NameKey> split;
        for (const auto& repo : repos)
        {
            auto ecosystems = repo.metadata.ecosystems;
            for (const auto& p : repo.hypergraph.packages())
            {
                ecosystems.try_emplace(p.ecosystem);
            }
            for (const auto& [eco, info] : ecosystems)
            {
                bool shared = false;
                register_ecosystem(out.metadata.ecosystems, eco, info, shared);
            }
            auto rp = repo.hypergraph.parts();
            for (auto& p : rp.packages)
            {
                if (!present.insert(p).second)
                {
                    throw Error("package " + p.str() + " is declared by two repositories of the same snapshot");
                }
                parts.packages.push_back(std::move(p));
            }
            parts.edges.insert(parts.edges.end(), rp.edges.begin(), rp.edges.end());
            parts.features.insert(rp.features.begin(), rp.features.end());
            parts.feature_deps.insert(rp.feature_deps.begin(), rp.feature_deps.end());
            for (auto& [key, order] : rp.version_order)
            {
                auto& dst = parts.version_order[key];
                if (!dst.empty())
                {
                    split.insert(key);
                }
                dst.insert(dst.end(), order.begin(), order.end());
            }
            parts.virtual_packages.insert(rp.virtual_packages.begin(), rp.virtual_packages.end());
            parts.tree_walk = parts.tree_walk || rp.tree_walk;
            parts.warnings.insert(parts.warnings.end(), rp.warnings.begin(), rp.warnings.end());
            out.metadata.architectures.insert(
                repo.metadata.architectures.begin(), repo.metadata.architectures.end()
            );
        }
        // A name split across two halves of one snapshot is re-sorted under its scheme.
        for (const auto& key : split)
        {
            auto& order = parts.version_order[key];
            const auto scheme = out.metadata.ecosystems[key.first].scheme;
            std::vector<std::string> concrete;
            bool has_empty = false;
            for (const auto& v : order)
            {
                if (v.empty())
                {
                    has_empty = true;
                }
                else
                {
                    concrete.push_back(v);
                }
            }
            sort_versions(scheme, concrete);
            if (has_empty)
            {
                concrete.insert(concrete.begin(), "");
            }
            order = std::move(concrete);
        }
        out.hypergraph = build_hypergraph(std::move(parts));
        return out;
    }
}
