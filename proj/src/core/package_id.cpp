#include "hyperres/core/package_id.hpp"

#include <functional>
#include <tuple>

namespace hyperres
{
    std::string PackageId::str() const
    {
        std::string out;
        out.reserve(ecosystem.size() + name.size() + version.size() + 2);
        out += ecosystem;
        out += ':';
        out += name;
        out += '@';
        out += version;
        return out;
    }

    PackageId PackageId::parse(std::string_view text)
    {
        const auto colon = text.find(':');
        const auto at = text.rfind('@');
        if (colon == std::string_view::npos || at == std::string_view::npos || at < colon)
        {
            throw Error("malformed package id '" + std::string(text)
                        + "': expected <ecosystem>:<name>@<version>");
        }
        PackageId id{
            std::string(text.substr(0, colon)),
            std::string(text.substr(colon + 1, at - colon - 1)),
            std::string(text.substr(at + 1)),
        };
        if (id.ecosystem.empty() || id.name.empty())
        {
            throw Error("malformed package id '" + std::string(text) + "': empty ecosystem or name");
        }
        return id;
    }

    std::string_view to_string(RelKind kind) noexcept
    {
        switch (kind)
        {
            case RelKind::Dependency:
                return "dependency";
            case RelKind::OptionalDependency:
                return "optional";
            case RelKind::Conflict:
                return "conflict";
        }
        return "dependency";
    }

    RelKind rel_kind_from_string(std::string_view text)
    {
        if (text == "dependency")
        {
            return RelKind::Dependency;
        }
        if (text == "optional")
        {
            return RelKind::OptionalDependency;
        }
        if (text == "conflict")
        {
            return RelKind::Conflict;
        }
        throw Error("unknown relation kind '" + std::string(text) + "'");
    }

    bool canonical_less(const Hyperedge& a, const Hyperedge& b)
    {
        return std::tie(a.source, a.kind, a.targets, a.required_features, a.post)
               < std::tie(b.source, b.kind, b.targets, b.required_features, b.post);
    }

    std::size_t PackageIdHash::operator()(const PackageId& id) const noexcept
    {
        const std::hash<std::string> h;
        std::size_t seed = h(id.ecosystem);
        seed ^= h(id.name) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
        seed ^= h(id.version) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
        return seed;
    }
}
