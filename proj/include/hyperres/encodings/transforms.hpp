#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hyperres/core/hypergraph.hpp"

namespace hyperres
{
    /// Adds conflicts between every pair of versions of a name in the same
    /// ecosystem. Virtual packages are left alone. Idempotent.
    [[nodiscard]] ResolutionHypergraph apply_single_version_conflicts(const ResolutionHypergraph& h);

    /**
     * Turns every provided name into an empty-version package depending on
     * the set of its providers. When the name also has concrete versions the
     * empty version joins them as the lowest one. Names in `referenced` with
     * no provider get an empty dependency set and a warning.
     */
    [[nodiscard]] ResolutionHypergraph expand_virtual_provides(
        const ResolutionHypergraph& h,
        const std::map<PackageId, std::set<std::string>>& provides,
        const std::set<NameKey>& referenced = {}
    );

    /// In-place form used by adapters before materializing formulae.
    void expand_virtual_provides(
        HypergraphParts& parts,
        const std::map<PackageId, std::set<std::string>>& provides,
        const std::set<NameKey>& referenced = {}
    );

    /**
     * Adds a package `arch` with one version per architecture, pairwise
     * conflicting, and a dependency from each package in `per_package_arch`
     * to its architecture. The tag `all` is architecture independent and
     * gets no edge.
     */
    [[nodiscard]] ResolutionHypergraph encode_architecture(
        const ResolutionHypergraph& h,
        const std::string& ecosystem,
        const std::vector<std::string>& arches,
        const std::map<PackageId, std::string>& per_package_arch
    );

    /// A variable package `name` with one pairwise-conflicting version per value.
    [[nodiscard]] ResolutionHypergraph encode_variable(
        const ResolutionHypergraph& h,
        const std::string& ecosystem,
        const std::string& name,
        const std::vector<std::string>& values
    );

    struct UpgradeQuery
    {
        ResolutionHypergraph hypergraph;
        PackageId query;
    };

    /**
     * Adds a virtual package q for an upgrade. For every upgraded name q
     * depends on the versions strictly greater than the installed one (all
     * versions when nothing is installed); for every other installed name on
     * the installed version followed by the greater ones. Under the
     * declaration-order policy the installed version is tried first.
     */
    [[nodiscard]] UpgradeQuery make_upgrade_query(
        const ResolutionHypergraph& h,
        const PackageSet& installed,
        const std::set<NameKey>& upgrade_names,
        const std::string& ecosystem
    );

    /**
     * Conflicts among same-name versions of `ecosystem` that share a major
     * component. With `cargo_compat` a zero major is refined by the minor
     * (and 0.0.z by the patch), matching Cargo compatibility bands.
     */
    [[nodiscard]] ResolutionHypergraph semver_conflicts(
        const ResolutionHypergraph& h,
        const std::string& ecosystem,
        bool cargo_compat = false
    );

    /// Checks every edge is a single-target dependency and marks H for tree-walk resolution.
    [[nodiscard]] ResolutionHypergraph restrict_nix(const ResolutionHypergraph& h);
}
