#include "hyperres/encodings/formula.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace hyperres
{
    bool PackageFormula::evaluate(const PackageSet& selected) const
    {
        switch (kind)
        {
            case Kind::Atom:
                return std::any_of(packages.begin(), packages.end(), [&](const auto& p) { return selected.contains(p); });
            case Kind::And:
                return std::all_of(children.begin(), children.end(), [&](const auto& c) { return c.evaluate(selected); });
            case Kind::Or:
                return std::any_of(children.begin(), children.end(), [&](const auto& c) { return c.evaluate(selected); });
            case Kind::Not:
                return !children.front().evaluate(selected);
        }
        return false;
    }

    std::vector<std::string> separate_label_collisions(
        std::vector<Hyperedge>& edges,
        const std::function<PackageId(const std::string&)>& fresh
    )
    {
        std::vector<std::string> notes;
        auto key = [](const Hyperedge& e)
        {
            auto t = e.targets;
            std::sort(t.begin(), t.end());
            t.erase(std::unique(t.begin(), t.end()), t.end());
            return std::make_pair(e.source, std::move(t));
        };
        std::map<std::pair<PackageId, std::vector<PackageId>>, std::set<RelKind>> kinds;
        for (const auto& e : edges)
        {
            kinds[key(e)].insert(e.kind);
        }
        std::vector<Hyperedge> out;
        out.reserve(edges.size());
        for (auto& e : edges)
        {
            const auto& ks = kinds[key(e)];
            if (ks.size() < 2)
            {
                out.push_back(std::move(e));
                continue;
            }
            if (e.kind == RelKind::OptionalDependency && ks.contains(RelKind::Dependency))
            {
                notes.push_back(
                    "optional dependency of " + e.source.str() + " duplicates a dependency on the same set; dropped"
                );
                continue;
            }
            if (e.kind == RelKind::Conflict)
            {
                const auto c = fresh(e.source.ecosystem);
                notes.push_back(
                    "conflict of " + e.source.str() + " shares its target set with a dependency; routed through "
                    + c.str()
                );
                out.push_back({e.source, {c}, RelKind::Dependency, {}, false});
                out.push_back({c, std::move(e.targets), RelKind::Conflict, {}, false});
                continue;
            }
            out.push_back(std::move(e));
        }
        edges = std::move(out);
        return notes;
    }

    std::vector<std::string> separate_label_collisions(HypergraphParts& parts, VirtualPackageAllocator& alloc)
    {
        auto notes = separate_label_collisions(
            parts.edges,
            [&](const std::string& eco)
            {
                auto v = alloc.next(eco);
                parts.packages.push_back(v);
                parts.virtual_packages.insert(v);
                return v;
            }
        );
        parts.warnings.insert(parts.warnings.end(), notes.begin(), notes.end());
        return notes;
    }

    namespace
    {
        class Lowering
        {
        public:
            explicit Lowering(VirtualPackageAllocator& alloc)
                : m_alloc(alloc)
            {
            }

            void top(const PackageId& src, const PackageFormula& f)
            {
                using K = PackageFormula::Kind;
                switch (f.kind)
                {
                    case K::Atom:
                        m_out.edges.push_back({src, f.packages, RelKind::Dependency, f.features, f.post});
                        break;
                    case K::And:
                        for (const auto& c : f.children)
                        {
                            top(src, c);
                        }
                        break;
                    case K::Or:
                    {
                        std::vector<PackageId> targets;
                        bool post = !f.children.empty();
                        union_of(src, f, targets, post);
                        m_out.edges.push_back({src, std::move(targets), RelKind::Dependency, {}, post});
                        break;
                    }
                    case K::Not:
                    {
                        const auto& child = negated_atom(f);
                        m_out.edges.push_back({src, child.packages, RelKind::Conflict, {}, false});
                        break;
                    }
                }
            }

            /// Finished edges. A satisfier shared between a multi-target
            /// dependency and another edge of the same source would be counted
            /// twice, so inside the multi-target edge it is reached through
            /// its own carrier instead.
            LoweredFormula take()
            {
                auto edges = std::move(m_out.edges);
                m_out.edges.clear();
                for (std::size_t i = 0; i < edges.size(); ++i)
                {
                    auto& e = edges[i];
                    if (e.kind == RelKind::Conflict || e.targets.size() < 2)
                    {
                        continue;
                    }
                    for (auto& t : e.targets)
                    {
                        const bool shared = std::any_of(
                            edges.begin(),
                            edges.end(),
                            [&](const Hyperedge& other)
                            {
                                return &other != &e && other.kind != RelKind::Conflict && other.source == e.source
                                       && std::find(other.targets.begin(), other.targets.end(), t)
                                              != other.targets.end();
                            }
                        );
                        if (!shared)
                        {
                            continue;
                        }
                        const auto c = carrier(e.source.ecosystem);
                        m_out.edges.push_back({c, {t}, RelKind::Dependency, {}, e.post});
                        t = c;
                    }
                }
                for (auto& e : edges)
                {
                    m_out.edges.push_back(std::move(e));
                }
                (void)separate_label_collisions(m_out.edges, [&](const std::string& eco) { return carrier(eco); });
                return std::move(m_out);
            }

            PackageId carrier(const std::string& ecosystem)
            {
                auto v = m_alloc.next(ecosystem);
                m_out.virtuals.push_back(v);
                return v;
            }

        private:
            static const PackageFormula& negated_atom(const PackageFormula& f)
            {
                const auto& child = f.children.front();
                if (child.kind != PackageFormula::Kind::Atom)
                {
                    throw UnrepresentableNegation("negation is only supported directly above a package atom");
                }
                return child;
            }

            void union_of(const PackageId& src, const PackageFormula& f, std::vector<PackageId>& targets, bool& post)
            {
                using K = PackageFormula::Kind;
                for (const auto& c : f.children)
                {
                    switch (c.kind)
                    {
                        case K::Atom:
                            if (!c.features.empty())
                            {
                                const auto v = carrier(src.ecosystem);
                                top(v, c);
                                targets.push_back(v);
                                post = false;
                                break;
                            }
                            targets.insert(targets.end(), c.packages.begin(), c.packages.end());
                            post = post && c.post;
                            break;
                        case K::Or:
                            union_of(src, c, targets, post);
                            break;
                        case K::And:
                        case K::Not:
                        {
                            if (c.kind == K::Not)
                            {
                                (void)negated_atom(c);
                            }
                            const auto v = carrier(src.ecosystem);
                            top(v, c);
                            targets.push_back(v);
                            post = false;
                            break;
                        }
                    }
                }
            }

            VirtualPackageAllocator& m_alloc;
            LoweredFormula m_out;
        };
    }

    LoweredFormula lower_boolean_formula(
        const PackageId& source,
        const PackageFormula& formula,
        VirtualPackageAllocator& alloc
    )
    {
        Lowering l(alloc);
        l.top(source, formula);
        return l.take();
    }

    PackageFormula conditioned(PackageFormula dep, std::vector<PackageId> variable_packages)
    {
        return PackageFormula::all_of({PackageFormula::atom(std::move(variable_packages)), std::move(dep)});
    }

    LoweredFormula lower_variable_constraint(
        const PackageId& source,
        const PackageFormula& dep,
        std::vector<PackageId> variable_packages,
        VirtualPackageAllocator& alloc
    )
    {
        Lowering l(alloc);
        const auto v = l.carrier(source.ecosystem);
        l.top(v, conditioned(dep, std::move(variable_packages)));
        auto out = l.take();
        out.edges.push_back({source, {v}, RelKind::Dependency, {}, false});
        return out;
    }

    PackageId test_package(const PackageId& source)
    {
        return {source.ecosystem, source.name, source.version + "+test"};
    }

    LoweredFormula lower_with_test(const PackageId& source, const PackageFormula& test_deps, VirtualPackageAllocator& alloc)
    {
        const auto t = test_package(source);
        auto out = lower_boolean_formula(t, test_deps, alloc);
        out.virtuals.push_back(t);
        out.edges.push_back({source, {t}, RelKind::OptionalDependency, {}, false});
        return out;
    }

    void append(HypergraphParts& parts, LoweredFormula lowered)
    {
        for (auto& v : lowered.virtuals)
        {
            parts.virtual_packages.insert(v);
            parts.packages.push_back(std::move(v));
        }
        for (auto& e : lowered.edges)
        {
            parts.edges.push_back(std::move(e));
        }
    }
}
