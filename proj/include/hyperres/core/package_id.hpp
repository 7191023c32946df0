#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hyperres
{
    /// Base class of every error raised by the library.
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /**
     * An ecosystem-qualified package: one vertex of the resolution hypergraph.
     *
     * The version may be the empty string, which stands for the empty version
     * carried by synthesized (virtual) packages.
     */
    struct PackageId
    {
        std::string ecosystem;
        std::string name;
        std::string version;

        auto operator<=>(const PackageId&) const = default;
        bool operator==(const PackageId&) const = default;

        [[nodiscard]] bool has_empty_version() const noexcept
        {
            return version.empty();
        }

        /// Canonical text form `<ecosystem>:<name>@<version>`.
        [[nodiscard]] std::string str() const;

        /// Parses the canonical text form; throws Error on malformed input.
        static PackageId parse(std::string_view text);
    };

    using PackageSet = std::set<PackageId>;

    enum class RelKind : std::uint8_t
    {
        Dependency,
        OptionalDependency,
        Conflict,
    };

    [[nodiscard]] std::string_view to_string(RelKind kind) noexcept;
    [[nodiscard]] RelKind rel_kind_from_string(std::string_view text);

    /**
     * A labelled hyperedge with a single source.
     *
     * `targets` has set semantics but keeps the order it was declared in; the
     * solver uses that order to break ties under the declaration-order policy.
     */
    struct Hyperedge
    {
        PackageId source;
        std::vector<PackageId> targets;
        RelKind kind = RelKind::Dependency;
        std::set<std::string> required_features;
        bool post = false;

        bool operator==(const Hyperedge&) const = default;
    };

    [[nodiscard]] bool canonical_less(const Hyperedge& a, const Hyperedge& b);

    struct PackageIdHash
    {
        std::size_t operator()(const PackageId& id) const noexcept;
    };
}
