#include "hyperres/adapters/versions.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace hyperres
{
    std::string_view to_string(VersionScheme scheme) noexcept
    {
        switch (scheme)
        {
            case VersionScheme::Debian:
                return "debian";
            case VersionScheme::Semver:
                return "semver";
            case VersionScheme::OpaqueLexicographic:
                return "opaque";
        }
        return "opaque";
    }

    VersionScheme version_scheme_from_string(std::string_view text)
    {
        if (text == "debian")
        {
            return VersionScheme::Debian;
        }
        if (text == "semver")
        {
            return VersionScheme::Semver;
        }
        if (text == "opaque")
        {
            return VersionScheme::OpaqueLexicographic;
        }
        throw Error("unknown version scheme '" + std::string(text) + "'");
    }

    namespace
    {
        bool is_digit(char c)
        {
            return c >= '0' && c <= '9';
        }

        bool is_alpha(char c)
        {
            return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
        }

        int deb_order(int c)
        {
            if (c == '~')
            {
                return -1;
            }
            if (c == 0 || is_digit(static_cast<char>(c)))
            {
                return 0;
            }
            if (is_alpha(static_cast<char>(c)))
            {
                return c;
            }
            return c + 256;
        }

        // The dpkg comparison of one version component.
        int verrevcmp(std::string_view a, std::string_view b)
        {
            std::size_t i = 0;
            std::size_t j = 0;
            auto at = [](std::string_view s, std::size_t k) -> int
            { return k < s.size() ? static_cast<unsigned char>(s[k]) : 0; };
            while (i < a.size() || j < b.size())
            {
                int first_diff = 0;
                while ((i < a.size() && !is_digit(a[i])) || (j < b.size() && !is_digit(b[j])))
                {
                    const int ac = deb_order(at(a, i));
                    const int bc = deb_order(at(b, j));
                    if (ac != bc)
                    {
                        return ac - bc;
                    }
                    ++i;
                    ++j;
                }
                while (i < a.size() && a[i] == '0')
                {
                    ++i;
                }
                while (j < b.size() && b[j] == '0')
                {
                    ++j;
                }
                while (i < a.size() && j < b.size() && is_digit(a[i]) && is_digit(b[j]))
                {
                    if (!first_diff)
                    {
                        first_diff = a[i] - b[j];
                    }
                    ++i;
                    ++j;
                }
                if (i < a.size() && is_digit(a[i]))
                {
                    return 1;
                }
                if (j < b.size() && is_digit(b[j]))
                {
                    return -1;
                }
                if (first_diff)
                {
                    return first_diff;
                }
            }
            return 0;
        }

        struct DebVersion
        {
            std::uint64_t epoch = 0;
            std::string_view upstream;
            std::string_view revision;
        };

        DebVersion parse_debian(std::string_view v)
        {
            auto bad = [&](const std::string& why)
            { return MalformedVersion("debian version '" + std::string(v) + "': " + why); };
            DebVersion out;
            std::string_view rest = v;
            if (auto colon = v.find(':'); colon != std::string_view::npos)
            {
                const auto epoch = v.substr(0, colon);
                auto [ptr, ec] = std::from_chars(epoch.data(), epoch.data() + epoch.size(), out.epoch);
                if (epoch.empty() || ec != std::errc{} || ptr != epoch.data() + epoch.size())
                {
                    throw bad("epoch is not a number");
                }
                rest = v.substr(colon + 1);
            }
            if (auto dash = rest.rfind('-'); dash != std::string_view::npos)
            {
                out.upstream = rest.substr(0, dash);
                out.revision = rest.substr(dash + 1);
                if (out.revision.empty())
                {
                    throw bad("empty revision");
                }
            }
            else
            {
                out.upstream = rest;
            }
            if (out.upstream.empty())
            {
                throw bad("empty upstream version");
            }
            if (!is_digit(out.upstream.front()))
            {
                throw bad("upstream version does not start with a digit");
            }
            for (char c : out.upstream)
            {
                if (!is_digit(c) && !is_alpha(c) && c != '.' && c != '+' && c != '-' && c != '~' && c != ':')
                {
                    throw bad(std::string("invalid character '") + c + "' in upstream version");
                }
            }
            for (char c : out.revision)
            {
                if (!is_digit(c) && !is_alpha(c) && c != '.' && c != '+' && c != '~')
                {
                    throw bad(std::string("invalid character '") + c + "' in revision");
                }
            }
            return out;
        }

        std::uint64_t parse_numeric(std::string_view s, std::string_view whole)
        {
            if (s.empty() || (s.size() > 1 && s[0] == '0'))
            {
                throw MalformedVersion("semver '" + std::string(whole) + "': bad numeric component '" + std::string(s) + "'");
            }
            std::uint64_t out = 0;
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
            if (ec != std::errc{} || ptr != s.data() + s.size())
            {
                throw MalformedVersion("semver '" + std::string(whole) + "': bad numeric component '" + std::string(s) + "'");
            }
            return out;
        }

        std::vector<std::string_view> split(std::string_view s, char sep)
        {
            std::vector<std::string_view> out;
            std::size_t start = 0;
            while (true)
            {
                auto pos = s.find(sep, start);
                out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
                if (pos == std::string_view::npos)
                {
                    return out;
                }
                start = pos + 1;
            }
        }

        bool all_digits(std::string_view s)
        {
            return !s.empty() && std::all_of(s.begin(), s.end(), is_digit);
        }

        bool identifier_chars(std::string_view s)
        {
            return !s.empty()
                   && std::all_of(s.begin(), s.end(), [](char c) { return is_digit(c) || is_alpha(c) || c == '-'; });
        }

        int compare_numeric_text(std::string_view a, std::string_view b)
        {
            if (a.size() != b.size())
            {
                return a.size() < b.size() ? -1 : 1;
            }
            return a.compare(b) < 0 ? -1 : (a == b ? 0 : 1);
        }

        int sign(int x)
        {
            return (x > 0) - (x < 0);
        }

        std::strong_ordering to_ordering(int c)
        {
            return c < 0 ? std::strong_ordering::less : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
        }
    }

    int compare_debian(std::string_view a, std::string_view b)
    {
        const auto x = parse_debian(a);
        const auto y = parse_debian(b);
        if (x.epoch != y.epoch)
        {
            return x.epoch < y.epoch ? -1 : 1;
        }
        if (int c = verrevcmp(x.upstream, y.upstream))
        {
            return sign(c);
        }
        return sign(verrevcmp(x.revision, y.revision));
    }

    SemVer parse_semver(std::string_view text)
    {
        SemVer v;
        std::string_view core = text;
        if (auto plus = core.find('+'); plus != std::string_view::npos)
        {
            v.build = std::string(core.substr(plus + 1));
            for (auto id : split(v.build, '.'))
            {
                if (!identifier_chars(id))
                {
                    throw MalformedVersion("semver '" + std::string(text) + "': bad build metadata");
                }
            }
            core = core.substr(0, plus);
        }
        if (auto dash = core.find('-'); dash != std::string_view::npos)
        {
            for (auto id : split(core.substr(dash + 1), '.'))
            {
                if (!identifier_chars(id) || (all_digits(id) && id.size() > 1 && id[0] == '0'))
                {
                    throw MalformedVersion("semver '" + std::string(text) + "': bad prerelease identifier");
                }
                v.prerelease.emplace_back(id);
            }
            core = core.substr(0, dash);
        }
        const auto parts = split(core, '.');
        if (parts.size() != 3)
        {
            throw MalformedVersion("semver '" + std::string(text) + "': expected MAJOR.MINOR.PATCH");
        }
        v.major = parse_numeric(parts[0], text);
        v.minor = parse_numeric(parts[1], text);
        v.patch = parse_numeric(parts[2], text);
        return v;
    }

    int semver_precedence(const SemVer& a, const SemVer& b)
    {
        for (auto [x, y] : {std::pair{a.major, b.major}, std::pair{a.minor, b.minor}, std::pair{a.patch, b.patch}})
        {
            if (x != y)
            {
                return x < y ? -1 : 1;
            }
        }
        if (a.prerelease.empty() || b.prerelease.empty())
        {
            if (a.prerelease.empty() == b.prerelease.empty())
            {
                return 0;
            }
            return a.prerelease.empty() ? 1 : -1;
        }
        const auto n = std::min(a.prerelease.size(), b.prerelease.size());
        for (std::size_t i = 0; i < n; ++i)
        {
            const auto& x = a.prerelease[i];
            const auto& y = b.prerelease[i];
            const bool xn = all_digits(x);
            const bool yn = all_digits(y);
            int c = 0;
            if (xn && yn)
            {
                c = compare_numeric_text(x, y);
            }
            else if (xn != yn)
            {
                c = xn ? -1 : 1;
            }
            else
            {
                c = sign(x.compare(y));
            }
            if (c)
            {
                return c;
            }
        }
        if (a.prerelease.size() == b.prerelease.size())
        {
            return 0;
        }
        return a.prerelease.size() < b.prerelease.size() ? -1 : 1;
    }

    std::strong_ordering compare_versions(VersionScheme scheme, std::string_view a, std::string_view b)
    {
        switch (scheme)
        {
            case VersionScheme::Debian:
                return to_ordering(compare_debian(a, b));
            case VersionScheme::Semver:
            {
                const auto x = parse_semver(a);
                const auto y = parse_semver(b);
                if (int c = semver_precedence(x, y))
                {
                    return to_ordering(c);
                }
                return x.build <=> y.build;
            }
            case VersionScheme::OpaqueLexicographic:
                break;
        }
        return a <=> b;
    }

    void check_version(VersionScheme scheme, std::string_view v)
    {
        switch (scheme)
        {
            case VersionScheme::Debian:
                (void)parse_debian(v);
                break;
            case VersionScheme::Semver:
                (void)parse_semver(v);
                break;
            case VersionScheme::OpaqueLexicographic:
                break;
        }
    }

    bool VersionConstraint::matches(VersionScheme scheme, std::string_view v) const
    {
        if (prerelease_opt_in && scheme == VersionScheme::Semver)
        {
            const auto sv = parse_semver(v);
            if (sv.is_prerelease())
            {
                const auto base = std::to_string(sv.major) + "." + std::to_string(sv.minor) + "." + std::to_string(sv.patch);
                const bool allowed
                    = std::find(prerelease_bases.begin(), prerelease_bases.end(), base) != prerelease_bases.end();
                if (!allowed)
                {
                    return false;
                }
            }
        }
        switch (kind)
        {
            case Kind::Compare:
            {
                const auto c = compare_versions(scheme, v, version);
                switch (op)
                {
                    case CmpOp::Eq:
                        return c == 0;
                    case CmpOp::Ne:
                        return c != 0;
                    case CmpOp::Lt:
                        return c < 0;
                    case CmpOp::Le:
                        return c <= 0;
                    case CmpOp::Gt:
                        return c > 0;
                    case CmpOp::Ge:
                        return c >= 0;
                }
                return false;
            }
            case Kind::And:
                return std::all_of(
                    children.begin(), children.end(), [&](const auto& c) { return c.matches(scheme, v); }
                );
            case Kind::Or:
                return std::any_of(
                    children.begin(), children.end(), [&](const auto& c) { return c.matches(scheme, v); }
                );
        }
        return false;
    }

    std::string VersionConstraint::str() const
    {
        switch (kind)
        {
            case Kind::Compare:
            {
                static constexpr const char* ops[] = {"=", "!=", "<", "<=", ">", ">="};
                return std::string(ops[static_cast<int>(op)]) + " " + version;
            }
            case Kind::And:
            case Kind::Or:
            {
                if (children.empty())
                {
                    return kind == Kind::And ? "*" : "none";
                }
                std::string out = "(";
                for (std::size_t i = 0; i < children.size(); ++i)
                {
                    out += (i ? (kind == Kind::And ? " & " : " | ") : "") + children[i].str();
                }
                return out + ")";
            }
        }
        return "";
    }

    std::vector<std::string> materialize_formula(
        const VersionConstraint& c,
        VersionScheme scheme,
        const std::vector<std::string>& universe
    )
    {
        std::vector<std::string> out;
        for (const auto& v : universe)
        {
            if (c.matches(scheme, v))
            {
                out.push_back(v);
            }
        }
        return out;
    }

    void sort_versions(VersionScheme scheme, std::vector<std::string>& versions)
    {
        std::sort(
            versions.begin(),
            versions.end(),
            [&](const std::string& a, const std::string& b) { return compare_versions(scheme, a, b) < 0; }
        );
    }

    namespace
    {
        struct Partial
        {
            std::uint64_t part[3] = {0, 0, 0};
            int given = 0;  // number of numeric components written
            std::string pre;
        };

        Partial parse_partial(std::string_view s, std::string_view whole)
        {
            Partial p;
            std::string_view core = s;
            if (auto plus = core.find('+'); plus != std::string_view::npos)
            {
                core = core.substr(0, plus);
            }
            if (auto dash = core.find('-'); dash != std::string_view::npos)
            {
                p.pre = std::string(core.substr(dash + 1));
                core = core.substr(0, dash);
            }
            const auto parts = split(core, '.');
            if (parts.empty() || parts.size() > 3)
            {
                throw MalformedVersion("cargo requirement '" + std::string(whole) + "': bad version");
            }
            for (const auto& part : parts)
            {
                if (part == "*" || part == "x" || part == "X")
                {
                    break;
                }
                p.part[p.given] = parse_numeric(part, whole);
                ++p.given;
            }
            if (!p.pre.empty() && p.given != 3)
            {
                throw MalformedVersion("cargo requirement '" + std::string(whole) + "': prerelease needs a full version");
            }
            return p;
        }

        std::string text(std::uint64_t a, std::uint64_t b, std::uint64_t c, const std::string& pre = {})
        {
            auto out = std::to_string(a) + "." + std::to_string(b) + "." + std::to_string(c);
            return pre.empty() ? out : out + "-" + pre;
        }

        /// The smallest version greater than every version with this prefix.
        std::string bump(const Partial& p, int keep)
        {
            if (keep <= 0)
            {
                return "";
            }
            if (keep == 1)
            {
                return text(p.part[0] + 1, 0, 0, "0");
            }
            if (keep == 2)
            {
                return text(p.part[0], p.part[1] + 1, 0, "0");
            }
            return text(p.part[0], p.part[1], p.part[2] + 1, "0");
        }

        std::vector<VersionConstraint> range(const Partial& p, int keep)
        {
            std::vector<VersionConstraint> out;
            out.push_back(VersionConstraint::compare(CmpOp::Ge, text(p.part[0], p.part[1], p.part[2], p.pre)));
            if (const auto upper = bump(p, keep); !upper.empty())
            {
                out.push_back(VersionConstraint::compare(CmpOp::Lt, upper));
            }
            return out;
        }
    }

    VersionConstraint parse_cargo_requirement(std::string_view req)
    {
        std::vector<VersionConstraint> all;
        std::vector<std::string> bases;
        for (auto piece : split(req, ','))
        {
            while (!piece.empty() && std::isspace(static_cast<unsigned char>(piece.front())))
            {
                piece.remove_prefix(1);
            }
            while (!piece.empty() && std::isspace(static_cast<unsigned char>(piece.back())))
            {
                piece.remove_suffix(1);
            }
            if (piece.empty())
            {
                throw MalformedVersion("cargo requirement '" + std::string(req) + "': empty comparator");
            }
            std::string op;
            while (!piece.empty() && std::string_view("<>=^~").find(piece.front()) != std::string_view::npos)
            {
                op += piece.front();
                piece.remove_prefix(1);
            }
            while (!piece.empty() && piece.front() == ' ')
            {
                piece.remove_prefix(1);
            }
            if (piece == "*" || piece == "x" || piece == "X")
            {
                if (!op.empty())
                {
                    throw MalformedVersion("cargo requirement '" + std::string(req) + "': operator on wildcard");
                }
                continue;
            }
            const auto p = parse_partial(piece, req);
            if (!p.pre.empty())
            {
                bases.push_back(text(p.part[0], p.part[1], p.part[2]));
            }
            const bool wildcard = piece.find_first_of("*xX") != std::string_view::npos;
            if (op.empty() && wildcard)
            {
                op = "=";
            }
            if (op.empty() || op == "^")
            {
                // Caret: the leftmost non-zero written component is fixed.
                int keep = p.given;
                for (int i = 0; i < p.given; ++i)
                {
                    if (p.part[i] != 0)
                    {
                        keep = i + 1;
                        break;
                    }
                }
                if (p.given == 0)
                {
                    keep = 0;
                }
                auto r = range(p, keep);
                all.insert(all.end(), r.begin(), r.end());
            }
            else if (op == "~")
            {
                auto r = range(p, p.given >= 2 ? 2 : p.given);
                all.insert(all.end(), r.begin(), r.end());
            }
            else if (op == "=")
            {
                if (p.given == 3)
                {
                    all.push_back(VersionConstraint::compare(CmpOp::Eq, text(p.part[0], p.part[1], p.part[2], p.pre)));
                }
                else
                {
                    auto r = range(p, p.given);
                    all.insert(all.end(), r.begin(), r.end());
                }
            }
            else if (op == ">=")
            {
                all.push_back(VersionConstraint::compare(CmpOp::Ge, text(p.part[0], p.part[1], p.part[2], p.pre)));
            }
            else if (op == ">")
            {
                if (p.given == 3)
                {
                    all.push_back(VersionConstraint::compare(CmpOp::Gt, text(p.part[0], p.part[1], p.part[2], p.pre)));
                }
                else
                {
                    all.push_back(VersionConstraint::compare(CmpOp::Ge, bump(p, p.given)));
                }
            }
            else if (op == "<")
            {
                all.push_back(VersionConstraint::compare(
                    CmpOp::Lt, text(p.part[0], p.part[1], p.part[2], p.pre.empty() && p.given < 3 ? "0" : p.pre)
                ));
            }
            else if (op == "<=")
            {
                if (p.given == 3)
                {
                    all.push_back(VersionConstraint::compare(CmpOp::Le, text(p.part[0], p.part[1], p.part[2], p.pre)));
                }
                else
                {
                    all.push_back(VersionConstraint::compare(CmpOp::Lt, bump(p, p.given)));
                }
            }
            else
            {
                throw MalformedVersion("cargo requirement '" + std::string(req) + "': unknown operator '" + op + "'");
            }
        }
        auto out = VersionConstraint::all_of(std::move(all));
        out.prerelease_opt_in = true;
        out.prerelease_bases = std::move(bases);
        return out;
    }
}
