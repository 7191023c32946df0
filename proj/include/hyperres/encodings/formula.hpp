#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "hyperres/core/hypergraph.hpp"
#include "hyperres/encodings/allocator.hpp"

namespace hyperres
{
    class UnrepresentableNegation : public Error
    {
    public:
        using Error::Error;
    };

    /**
     * A package formula over materialized atoms. An Atom holds the concrete
     * packages its version constraint admits and is true when one of them is
     * selected. Negation is only supported directly above an Atom.
     */
    struct PackageFormula
    {
        enum class Kind
        {
            Atom,
            And,
            Or,
            Not,
        };

        Kind kind = Kind::And;
        std::vector<PackageId> packages;
        std::vector<PackageFormula> children;
        bool post = false;                 // atoms only
        std::set<std::string> features;    // atoms only: features required of the satisfier

        static PackageFormula atom(std::vector<PackageId> packages, bool post = false, std::set<std::string> features = {})
        {
            PackageFormula f;
            f.kind = Kind::Atom;
            f.packages = std::move(packages);
            f.post = post;
            f.features = std::move(features);
            return f;
        }

        static PackageFormula all_of(std::vector<PackageFormula> children)
        {
            PackageFormula f;
            f.kind = Kind::And;
            f.children = std::move(children);
            return f;
        }

        static PackageFormula any_of(std::vector<PackageFormula> children)
        {
            PackageFormula f;
            f.kind = Kind::Or;
            f.children = std::move(children);
            return f;
        }

        static PackageFormula negate(PackageFormula child)
        {
            PackageFormula f;
            f.kind = Kind::Not;
            f.children.push_back(std::move(child));
            return f;
        }

        /// Truth value when exactly the packages in `selected` are installed.
        [[nodiscard]] bool evaluate(const PackageSet& selected) const;

        bool operator==(const PackageFormula&) const = default;
    };

    struct LoweredFormula
    {
        std::vector<Hyperedge> edges;
        std::vector<PackageId> virtuals;
    };

    /**
     * Lowers `formula` to hyperedges out of `source`. A top-level And
     * becomes one set of edges per child, an Or becomes a single dependency
     * on the union of its children, and any nested And or negation inside an
     * Or is carried by a fresh virtual package. Not over an Atom becomes a
     * conflict.
     */
    [[nodiscard]] LoweredFormula lower_boolean_formula(
        const PackageId& source,
        const PackageFormula& formula,
        VirtualPackageAllocator& alloc
    );

    /// `dep` guarded by a variable: And(variable atom, dep).
    [[nodiscard]] PackageFormula conditioned(PackageFormula dep, std::vector<PackageId> variable_packages);

    /**
     * A dependency that only holds under a global variable value: a virtual
     * package depending on the variable package and on `dep`, required by
     * `source`.
     */
    [[nodiscard]] LoweredFormula lower_variable_constraint(
        const PackageId& source,
        const PackageFormula& dep,
        std::vector<PackageId> variable_packages,
        VirtualPackageAllocator& alloc
    );

    /// Virtual `(name, version+test)` package of `source`.
    [[nodiscard]] PackageId test_package(const PackageId& source);

    /**
     * Test-only dependencies: an optional edge from `source` to its test
     * package, which depends on `test_deps`. Adding the test package to the
     * query enables them.
     */
    [[nodiscard]] LoweredFormula lower_with_test(
        const PackageId& source,
        const PackageFormula& test_deps,
        VirtualPackageAllocator& alloc
    );

    /**
     * Rewrites edges so no source carries two kinds on one target set. A
     * conflict sharing its set with a dependency is moved onto a fresh
     * virtual the source depends on; an optional dependency duplicating a
     * dependency is dropped, since the dependency already wires the set.
     * Returns one note per rewrite.
     */
    std::vector<std::string> separate_label_collisions(
        std::vector<Hyperedge>& edges,
        const std::function<PackageId(const std::string&)>& fresh
    );

    /// As above on staged parts; fresh virtuals are registered and notes become warnings.
    std::vector<std::string> separate_label_collisions(HypergraphParts& parts, VirtualPackageAllocator& alloc);

    /// Appends lowered edges and their virtual packages to `parts`.
    void append(HypergraphParts& parts, LoweredFormula lowered);
}
