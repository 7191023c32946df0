#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hyperres/core/package_id.hpp"

namespace hyperres
{
    class MalformedVersion : public Error
    {
    public:
        using Error::Error;
    };

    enum class VersionScheme
    {
        Debian,
        Semver,
        OpaqueLexicographic,
    };

    [[nodiscard]] std::string_view to_string(VersionScheme scheme) noexcept;
    [[nodiscard]] VersionScheme version_scheme_from_string(std::string_view text);

    /// Debian ordering: epoch, then upstream and revision by the dpkg algorithm.
    [[nodiscard]] int compare_debian(std::string_view a, std::string_view b);

    struct SemVer
    {
        std::uint64_t major = 0;
        std::uint64_t minor = 0;
        std::uint64_t patch = 0;
        std::vector<std::string> prerelease;
        std::string build;

        [[nodiscard]] bool is_prerelease() const noexcept
        {
            return !prerelease.empty();
        }
    };

    [[nodiscard]] SemVer parse_semver(std::string_view text);

    /// Semantic-versioning precedence; build metadata is ignored.
    [[nodiscard]] int semver_precedence(const SemVer& a, const SemVer& b);

    /**
     * Total order per scheme. Semver breaks precedence ties on the build
     * metadata string so that distinct strings never compare equal.
     * Throws MalformedVersion on ill-formed input.
     */
    [[nodiscard]] std::strong_ordering compare_versions(VersionScheme scheme, std::string_view a, std::string_view b);

    /// Throws MalformedVersion unless `v` is well formed for `scheme`.
    void check_version(VersionScheme scheme, std::string_view v);

    enum class CmpOp
    {
        Eq,
        Ne,
        Lt,
        Le,
        Gt,
        Ge,
    };

    /// Comparator tree; an And with no children matches everything.
    struct VersionConstraint
    {
        enum class Kind
        {
            Compare,
            And,
            Or,
        };

        Kind kind = Kind::And;
        CmpOp op = CmpOp::Eq;
        std::string version;
        std::vector<VersionConstraint> children;
        /// When set, a semver prerelease only matches if its major.minor.patch
        /// is listed in `prerelease_bases` (Cargo's opt-in rule).
        bool prerelease_opt_in = false;
        std::vector<std::string> prerelease_bases;

        static VersionConstraint any()
        {
            return {};
        }

        static VersionConstraint compare(CmpOp op, std::string version)
        {
            VersionConstraint c;
            c.kind = Kind::Compare;
            c.op = op;
            c.version = std::move(version);
            return c;
        }

        static VersionConstraint all_of(std::vector<VersionConstraint> children)
        {
            VersionConstraint c;
            c.kind = Kind::And;
            c.children = std::move(children);
            return c;
        }

        static VersionConstraint any_of(std::vector<VersionConstraint> children)
        {
            VersionConstraint c;
            c.kind = Kind::Or;
            c.children = std::move(children);
            return c;
        }

        [[nodiscard]] bool matches(VersionScheme scheme, std::string_view v) const;

        [[nodiscard]] std::string str() const;
    };

    /// Members of `universe` (sorted under `scheme`) satisfying `c`, in universe order.
    [[nodiscard]] std::vector<std::string> materialize_formula(
        const VersionConstraint& c,
        VersionScheme scheme,
        const std::vector<std::string>& universe
    );

    /// Sorts ascending under `scheme`; throws MalformedVersion on ill-formed input.
    void sort_versions(VersionScheme scheme, std::vector<std::string>& versions);

    /// Cargo version requirement (caret default, tilde, wildcard, comparators, comma conjunction).
    [[nodiscard]] VersionConstraint parse_cargo_requirement(std::string_view text);
}
