#include <algorithm>
#include <map>
#include <sstream>

#include "hyperres/adapters/formats.hpp"

namespace hyperres
{
    std::string read_all(std::istream& in)
    {
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    namespace
    {
        std::string trim(std::string_view s)
        {
            const auto b = s.find_first_not_of(" \t\r\n");
            if (b == std::string_view::npos)
            {
                return {};
            }
            const auto e = s.find_last_not_of(" \t\r\n");
            return std::string(s.substr(b, e - b + 1));
        }

        std::vector<std::string> split(std::string_view s, char sep)
        {
            std::vector<std::string> out;
            std::size_t start = 0;
            for (;;)
            {
                const auto pos = s.find(sep, start);
                out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
                if (pos == std::string_view::npos)
                {
                    return out;
                }
                start = pos + 1;
            }
        }

        struct Field
        {
            std::string value;
            std::size_t line;
        };

        struct Stanza
        {
            std::map<std::string, Field> fields;
            std::size_t line = 0;
        };

        CmpOp debian_op(const std::string& op, std::size_t line)
        {
            if (op == "<<")
            {
                return CmpOp::Lt;
            }
            if (op == "<=" || op == "<")
            {
                return CmpOp::Le;
            }
            if (op == "=")
            {
                return CmpOp::Eq;
            }
            if (op == ">=" || op == ">")
            {
                return CmpOp::Ge;
            }
            if (op == ">>")
            {
                return CmpOp::Gt;
            }
            throw MalformedStanza("unknown relation operator '" + op + "'", line);
        }

        /// `name[:arch] [(op version)] [[arches]] [<profiles>]`
        Requirement relation(const std::string& text, const Field& f, bool& qualified)
        {
            std::string rest = text;
            // Architecture lists anywhere; build profiles only after the version
            // restriction, whose operators also use '<'.
            for (auto [open, close] : {std::pair{'[', ']'}, std::pair{'<', '>'}})
            {
                const auto paren = rest.find(')');
                const auto from = open == '<' && paren != std::string::npos ? paren : 0;
                const auto pos = rest.find(open, from);
                if (pos == std::string::npos || (open == '<' && paren == std::string::npos && rest.find('(') != std::string::npos))
                {
                    continue;
                }
                const auto end = rest.find(close, pos);
                if (end == std::string::npos)
                {
                    throw MalformedStanza("unterminated '" + std::string(1, open) + "' in relation", f.line);
                }
                qualified = true;
                rest.erase(pos, end - pos + 1);
            }
            VersionConstraint c = VersionConstraint::any();
            if (const auto lp = rest.find('('); lp != std::string::npos)
            {
                const auto rp = rest.find(')', lp);
                if (rp == std::string::npos)
                {
                    throw MalformedStanza("unterminated version restriction", f.line);
                }
                const auto inner = trim(std::string_view(rest).substr(lp + 1, rp - lp - 1));
                const auto split_at = inner.find_first_not_of("<>=");
                if (split_at == 0 || split_at == std::string::npos)
                {
                    throw MalformedStanza("malformed version restriction '(" + inner + ")'", f.line);
                }
                const auto version = trim(std::string_view(inner).substr(split_at));
                try
                {
                    check_version(VersionScheme::Debian, version);
                }
                catch (const MalformedVersion& e)
                {
                    throw MalformedStanza(e.what(), f.line);
                }
                c = VersionConstraint::compare(debian_op(inner.substr(0, split_at), f.line), version);
                rest.erase(lp);
            }
            auto name = trim(rest);
            if (const auto colon = name.find(':'); colon != std::string::npos)
            {
                name.erase(colon);
            }
            if (name.empty() || name.find_first_of(" \t()") != std::string::npos)
            {
                throw MalformedStanza("malformed package relation '" + trim(text) + "'", f.line);
            }
            return Requirement::atom(std::move(name), std::move(c));
        }

        /// Comma-separated groups of `|` alternatives.
        std::vector<Requirement> relations(const Field& f, bool& qualified)
        {
            std::vector<Requirement> out;
            if (trim(f.value).empty())
            {
                return out;
            }
            for (const auto& group : split(f.value, ','))
            {
                if (group.empty())
                {
                    throw MalformedStanza("empty relation in list", f.line);
                }
                std::vector<Requirement> alts;
                for (const auto& alt : split(group, '|'))
                {
                    alts.push_back(relation(alt, f, qualified));
                }
                out.push_back(alts.size() == 1 ? std::move(alts.front())
                                               : Requirement::node(Requirement::Kind::Or, std::move(alts)));
            }
            return out;
        }

        std::vector<Stanza> stanzas(std::string_view text)
        {
            std::vector<Stanza> out;
            Stanza cur;
            std::string last;
            std::size_t lineno = 0;
            auto flush = [&]
            {
                if (!cur.fields.empty())
                {
                    out.push_back(std::move(cur));
                }
                cur = {};
                last.clear();
            };
            std::istringstream in{std::string(text)};
            std::string line;
            while (std::getline(in, line))
            {
                ++lineno;
                if (!line.empty() && line.back() == '\r')
                {
                    line.pop_back();
                }
                if (trim(line).empty())
                {
                    flush();
                    continue;
                }
                if (line.front() == '#')
                {
                    continue;
                }
                if (line.front() == ' ' || line.front() == '\t')
                {
                    if (last.empty())
                    {
                        throw MalformedStanza("continuation line without a field", lineno);
                    }
                    cur.fields[last].value += "\n" + trim(line);
                    continue;
                }
                const auto colon = line.find(':');
                if (colon == std::string::npos || colon == 0)
                {
                    throw MalformedStanza("expected 'Field: value'", lineno);
                }
                auto key = line.substr(0, colon);
                if (key.find_first_of(" \t") != std::string::npos)
                {
                    throw MalformedStanza("malformed field name '" + key + "'", lineno);
                }
                if (cur.fields.empty())
                {
                    cur.line = lineno;
                }
                if (!cur.fields.emplace(key, Field{trim(std::string_view(line).substr(colon + 1)), lineno}).second)
                {
                    throw MalformedStanza("duplicate field " + key, lineno);
                }
                last = std::move(key);
            }
            flush();
            return out;
        }
    }

    Bundle parse_debian_packages(std::string_view text, const std::string& ecosystem)
    {
        Bundle b;
        b.ecosystem = ecosystem;
        b.scheme = VersionScheme::Debian;
        for (auto& s : stanzas(text))
        {
            auto field = [&](const char* name) -> const Field*
            {
                auto it = s.fields.find(name);
                return it == s.fields.end() ? nullptr : &it->second;
            };
            const auto* pkg = field("Package");
            const auto* ver = field("Version");
            if (pkg == nullptr || pkg->value.empty())
            {
                throw MalformedStanza("stanza without a Package field", s.line);
            }
            if (ver == nullptr || ver->value.empty())
            {
                throw MalformedStanza("package " + pkg->value + " has no Version field", s.line);
            }
            PackageRecord r;
            r.name = pkg->value;
            r.version = ver->value;
            r.line = s.line;
            try
            {
                check_version(VersionScheme::Debian, r.version);
            }
            catch (const MalformedVersion& e)
            {
                throw MalformedStanza(e.what(), ver->line);
            }
            bool qualified = false;
            for (const char* name : {"Pre-Depends", "Depends"})
            {
                if (const auto* f = field(name))
                {
                    auto rel = relations(*f, qualified);
                    r.depends.insert(r.depends.end(), rel.begin(), rel.end());
                }
            }
            if (const auto* f = field("Recommends"))
            {
                r.depopts = relations(*f, qualified);
            }
            for (const char* name : {"Conflicts", "Breaks"})
            {
                if (const auto* f = field(name))
                {
                    auto rel = relations(*f, qualified);
                    r.conflicts.insert(r.conflicts.end(), rel.begin(), rel.end());
                }
            }
            if (const auto* f = field("Provides"))
            {
                bool versioned = false;
                for (const auto& p : relations(*f, qualified))
                {
                    if (p.kind != Requirement::Kind::Atom)
                    {
                        throw MalformedStanza("alternatives are not allowed in Provides", f->line);
                    }
                    versioned = versioned || p.constraint.kind != VersionConstraint::Kind::And;
                    r.provides.push_back(p.name);
                }
                if (versioned)
                {
                    b.warnings.push_back(r.name + " " + r.version + ": versioned Provides treated as unversioned");
                }
            }
            if (field("Suggests") != nullptr)
            {
                b.warnings.push_back(r.name + " " + r.version + ": Suggests dropped");
            }
            if (qualified)
            {
                b.warnings.push_back(r.name + " " + r.version + ": architecture and profile qualifiers ignored");
            }
            if (const auto* f = field("Architecture"))
            {
                r.architecture = f->value;
            }
            b.packages.push_back(std::move(r));
        }
        return b;
    }
}
