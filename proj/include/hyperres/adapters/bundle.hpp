#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hyperres/adapters/versions.hpp"
#include "hyperres/core/hypergraph.hpp"

namespace hyperres
{
    /**
     * A dependency formula over names, before materialization. Atoms name a
     * package and a version constraint; `ecosystem` empty means the
     * bundle's own. A node with `variable` set only applies when that
     * variable package takes `value`.
     */
    struct Requirement
    {
        enum class Kind
        {
            Atom,
            And,
            Or,
            Not,
        };

        Kind kind = Kind::And;
        std::string ecosystem;
        std::string name;
        VersionConstraint constraint;
        bool post = false;
        std::set<std::string> features;
        std::vector<Requirement> children;
        std::string variable;
        std::string value;

        static Requirement atom(std::string name, VersionConstraint c = VersionConstraint::any())
        {
            Requirement r;
            r.kind = Kind::Atom;
            r.name = std::move(name);
            r.constraint = std::move(c);
            return r;
        }

        static Requirement node(Kind kind, std::vector<Requirement> children)
        {
            Requirement r;
            r.kind = kind;
            r.children = std::move(children);
            return r;
        }
    };

    struct PackageRecord
    {
        std::string name;
        std::string version;
        std::vector<Requirement> depends;
        std::vector<Requirement> depopts;
        std::vector<Requirement> conflicts;
        std::vector<Requirement> test_depends;
        std::vector<std::string> provides;
        /// Feature name -> extra dependencies it pulls in.
        std::map<std::string, std::vector<Requirement>> features;
        std::string architecture;
        std::size_t line = 0;  // where the record starts, for diagnostics
    };

    struct Bundle
    {
        std::string ecosystem;
        VersionScheme scheme = VersionScheme::OpaqueLexicographic;
        std::string snapshot;
        std::vector<PackageRecord> packages;
        std::vector<std::string> warnings;
    };

    struct EcosystemInfo
    {
        VersionScheme scheme = VersionScheme::OpaqueLexicographic;
        std::string snapshot;

        bool operator==(const EcosystemInfo&) const = default;
    };

    /// What an interchange document carries besides the hypergraph.
    struct RepoMetadata
    {
        std::map<std::string, EcosystemInfo> ecosystems;
        /// Architecture tag per package, for the architecture stage.
        std::map<PackageId, std::string> architectures;

        bool operator==(const RepoMetadata&) const = default;
    };

    struct Repository
    {
        ResolutionHypergraph hypergraph;
        RepoMetadata metadata;
    };

    /// Fills the version order of every name whose recorded order no longer
    /// lists exactly its versions, sorting under the ecosystem's scheme with
    /// the empty version first.
    void order_versions(HypergraphParts& parts, const std::map<std::string, EcosystemInfo>& ecosystems);

    /**
     * Materializes bundles against the closed world made of the bundles
     * themselves plus `base`. Atoms become explicit target sets; names
     * missing from every ecosystem give empty dependency sets with a
     * warning. Provided names become empty-version packages depending on
     * their providers.
     */
    [[nodiscard]] Repository materialize(const std::vector<Bundle>& bundles, const Repository& base = {});

    /**
     * Merges repositories. Ecosystems must be distinct across inputs unless
     * both declare the same non-empty snapshot id, in which case their
     * packages must be disjoint.
     */
    [[nodiscard]] Repository merge_repositories(const std::vector<Repository>& repos);
}
