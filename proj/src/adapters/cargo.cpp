#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hyperres/adapters/formats.hpp"

namespace hyperres
{
    namespace
    {
        using json = nlohmann::json;

        struct CargoDep
        {
            std::string alias;
            std::string package;
            std::string req;
            std::vector<std::string> features;
            bool optional = false;
            std::string kind = "normal";
            bool targeted = false;
        };

        struct CargoRecord
        {
            std::string name;
            std::string version;
            std::vector<CargoDep> deps;
            std::vector<std::pair<std::string, std::vector<std::string>>> features;
            std::size_t line = 0;
        };

        Requirement requirement(const CargoDep& d, std::size_t line)
        {
            try
            {
                auto r = Requirement::atom(d.package, parse_cargo_requirement(d.req));
                r.features.insert(d.features.begin(), d.features.end());
                return r;
            }
            catch (const MalformedVersion& e)
            {
                throw MalformedManifest("dependency " + d.alias + ": " + e.what(), line);
            }
        }

        PackageRecord lower(const CargoRecord& c, Bundle& b)
        {
            if (c.name.empty() || c.version.empty())
            {
                throw MalformedManifest("package without name or version", c.line);
            }
            try
            {
                check_version(VersionScheme::Semver, c.version);
            }
            catch (const MalformedVersion& e)
            {
                throw MalformedManifest(e.what(), c.line);
            }
            PackageRecord r;
            r.name = c.name;
            r.version = c.version;
            r.line = c.line;
            const std::string where = c.name + " " + c.version + ": ";

            std::map<std::string, const CargoDep*> optional;
            for (const auto& d : c.deps)
            {
                if (d.targeted)
                {
                    b.warnings.push_back(where + "platform-specific dependency " + d.alias + " treated as unconditional");
                }
                if (d.kind == "dev")
                {
                    r.test_depends.push_back(requirement(d, c.line));
                }
                else if (d.optional)
                {
                    optional.emplace(d.alias, &d);
                }
                else
                {
                    r.depends.push_back(requirement(d, c.line));
                }
            }

            std::set<std::string> feature_names;
            std::set<std::string> explicit_dep;  // optional deps named through `dep:`
            for (const auto& [f, items] : c.features)
            {
                feature_names.insert(f);
                for (const auto& item : items)
                {
                    if (item.starts_with("dep:"))
                    {
                        explicit_dep.insert(item.substr(4));
                    }
                }
            }
            auto optional_req = [&](const std::string& alias)
            {
                auto d = *optional.at(alias);
                if (!d.features.empty())
                {
                    b.warnings.push_back(where + "features of optional dependency " + alias + " dropped");
                    d.features.clear();
                }
                return requirement(d, c.line);
            };
            for (const auto& [f, items] : c.features)
            {
                auto& extra = r.features[f];
                for (const auto& item : items)
                {
                    const auto alias = item.starts_with("dep:") ? item.substr(4) : item;
                    if (item.find('/') != std::string::npos)
                    {
                        b.warnings.push_back(where + "feature '" + f + "' item '" + item + "' dropped");
                    }
                    else if (optional.contains(alias) && (item.starts_with("dep:") || !feature_names.contains(item)))
                    {
                        extra.push_back(optional_req(alias));
                    }
                    else if (feature_names.contains(item))
                    {
                        b.warnings.push_back(where + "feature '" + f + "' enabling feature '" + item + "' dropped");
                    }
                    else
                    {
                        throw MalformedManifest("feature '" + f + "' names unknown item '" + item + "'", c.line);
                    }
                }
            }
            // Optional dependencies never named through `dep:` get an implicit feature.
            for (const auto& [alias, d] : optional)
            {
                if (!explicit_dep.contains(alias) && !feature_names.contains(alias))
                {
                    r.features[alias].push_back(optional_req(alias));
                }
            }
            return r;
        }

        // Registry index: one JSON object per line.
        std::vector<CargoRecord> parse_index(std::string_view text, Bundle& b)
        {
            std::vector<CargoRecord> out;
            std::istringstream in{std::string(text)};
            std::string line;
            std::size_t lineno = 0;
            while (std::getline(in, line))
            {
                ++lineno;
                if (line.find_first_not_of(" \t\r") == std::string::npos)
                {
                    continue;
                }
                try
                {
                    const auto j = json::parse(line);
                    CargoRecord c;
                    c.line = lineno;
                    c.name = j.at("name").get<std::string>();
                    c.version = j.at("vers").get<std::string>();
                    if (j.value("yanked", false))
                    {
                        b.warnings.push_back(c.name + " " + c.version + ": yanked, skipped");
                        continue;
                    }
                    for (const auto& d : j.value("deps", json::array()))
                    {
                        CargoDep dep;
                        dep.alias = d.at("name").get<std::string>();
                        dep.package = d.contains("package") && d["package"].is_string() ? d["package"].get<std::string>()
                                                                                         : dep.alias;
                        dep.req = d.at("req").get<std::string>();
                        dep.features = d.value("features", std::vector<std::string>{});
                        dep.optional = d.value("optional", false);
                        dep.kind = d.contains("kind") && d["kind"].is_string() ? d["kind"].get<std::string>() : "normal";
                        dep.targeted = d.contains("target") && !d["target"].is_null();
                        c.deps.push_back(std::move(dep));
                    }
                    for (const char* key : {"features", "features2"})
                    {
                        if (j.contains(key))
                        {
                            for (const auto& [f, items] : j[key].items())
                            {
                                c.features.emplace_back(f, items.get<std::vector<std::string>>());
                            }
                        }
                    }
                    out.push_back(std::move(c));
                }
                catch (const json::exception& e)
                {
                    throw MalformedManifest(e.what(), lineno);
                }
            }
            return out;
        }

        /// Values of the manifest subset: strings, booleans, integers, arrays, inline tables.
        class TomlValue
        {
        public:
            TomlValue(std::string_view text, std::size_t line)
                : m_text(text)
                , m_line(line)
            {
            }

            json parse()
            {
                auto v = value();
                skip();
                if (m_pos != m_text.size() && m_text[m_pos] != '#')
                {
                    fail("trailing characters after value");
                }
                return v;
            }

        private:
            [[noreturn]] void fail(const std::string& what) const
            {
                throw MalformedManifest(what, m_line);
            }

            void skip()
            {
                while (m_pos < m_text.size() && (m_text[m_pos] == ' ' || m_text[m_pos] == '\t' || m_text[m_pos] == '\n'))
                {
                    ++m_pos;
                }
            }

            json value()
            {
                skip();
                if (m_pos >= m_text.size())
                {
                    fail("missing value");
                }
                const char c = m_text[m_pos];
                if (c == '"' || c == '\'')
                {
                    return string();
                }
                if (c == '[')
                {
                    ++m_pos;
                    json arr = json::array();
                    for (;;)
                    {
                        skip();
                        if (m_pos < m_text.size() && m_text[m_pos] == ']')
                        {
                            ++m_pos;
                            return arr;
                        }
                        arr.push_back(value());
                        skip();
                        if (m_pos < m_text.size() && m_text[m_pos] == ',')
                        {
                            ++m_pos;
                        }
                        else if (m_pos >= m_text.size() || m_text[m_pos] != ']')
                        {
                            fail("expected ',' or ']' in array");
                        }
                    }
                }
                if (c == '{')
                {
                    ++m_pos;
                    json obj = json::object();
                    for (;;)
                    {
                        skip();
                        if (m_pos < m_text.size() && m_text[m_pos] == '}')
                        {
                            ++m_pos;
                            return obj;
                        }
                        const auto k = key();
                        skip();
                        if (m_pos >= m_text.size() || m_text[m_pos] != '=')
                        {
                            fail("expected '=' in inline table");
                        }
                        ++m_pos;
                        obj[k] = value();
                        skip();
                        if (m_pos < m_text.size() && m_text[m_pos] == ',')
                        {
                            ++m_pos;
                        }
                        else if (m_pos >= m_text.size() || m_text[m_pos] != '}')
                        {
                            fail("expected ',' or '}' in inline table");
                        }
                    }
                }
                const auto start = m_pos;
                while (m_pos < m_text.size() && std::string_view(",]} \t\n#").find(m_text[m_pos]) == std::string_view::npos)
                {
                    ++m_pos;
                }
                const auto word = m_text.substr(start, m_pos - start);
                if (word == "true" || word == "false")
                {
                    return word == "true";
                }
                if (!word.empty() && word.find_first_not_of("0123456789-+_") == std::string_view::npos)
                {
                    return std::string(word);
                }
                fail("unsupported value '" + std::string(word) + "'");
            }

            std::string string()
            {
                const char q = m_text[m_pos++];
                std::string out;
                while (m_pos < m_text.size() && m_text[m_pos] != q)
                {
                    if (q == '"' && m_text[m_pos] == '\\' && m_pos + 1 < m_text.size())
                    {
                        ++m_pos;
                    }
                    out += m_text[m_pos++];
                }
                if (m_pos >= m_text.size())
                {
                    fail("unterminated string");
                }
                ++m_pos;
                return out;
            }

            std::string key()
            {
                skip();
                if (m_pos < m_text.size() && (m_text[m_pos] == '"' || m_text[m_pos] == '\''))
                {
                    return string();
                }
                const auto start = m_pos;
                while (m_pos < m_text.size()
                       && (std::isalnum(static_cast<unsigned char>(m_text[m_pos])) || m_text[m_pos] == '-'
                           || m_text[m_pos] == '_'))
                {
                    ++m_pos;
                }
                if (start == m_pos)
                {
                    fail("expected a key");
                }
                return std::string(m_text.substr(start, m_pos - start));
            }

            std::string_view m_text;
            std::size_t m_line;
            std::size_t m_pos = 0;
        };

        int depth(std::string_view s)
        {
            int d = 0;
            char quote = 0;
            for (char c : s)
            {
                if (quote != 0)
                {
                    quote = c == quote ? 0 : quote;
                }
                else if (c == '"' || c == '\'')
                {
                    quote = c;
                }
                else if (c == '#')
                {
                    break;
                }
                else if (c == '[' || c == '{')
                {
                    ++d;
                }
                else if (c == ']' || c == '}')
                {
                    --d;
                }
            }
            return d;
        }

        std::vector<CargoRecord> parse_manifests(std::string_view text, Bundle& b)
        {
            std::vector<CargoRecord> out;
            std::istringstream in{std::string(text)};
            std::string line;
            std::size_t lineno = 0;
            std::string section;
            bool targeted = false;
            while (std::getline(in, line))
            {
                ++lineno;
                if (!line.empty() && line.back() == '\r')
                {
                    line.pop_back();
                }
                const auto first = line.find_first_not_of(" \t");
                if (first == std::string::npos || line[first] == '#')
                {
                    continue;
                }
                if (line[first] == '[')
                {
                    const auto close = line.rfind(']');
                    if (close == std::string::npos || line.compare(first, 2, "[[") == 0)
                    {
                        section = "ignored";
                        if (close == std::string::npos)
                        {
                            throw MalformedManifest("malformed section header", lineno);
                        }
                        continue;
                    }
                    section = line.substr(first + 1, close - first - 1);
                    targeted = false;
                    if (section.starts_with("target."))
                    {
                        const auto dot = section.rfind('.');
                        section = section.substr(dot + 1);
                        targeted = true;
                    }
                    if (section == "package")
                    {
                        out.emplace_back();
                        out.back().line = lineno;
                    }
                    continue;
                }
                const std::size_t start_line = lineno;
                std::string stmt = line;
                while (depth(stmt) > 0 && std::getline(in, line))
                {
                    ++lineno;
                    stmt += "\n" + line;
                }
                const auto eq = stmt.find('=');
                if (eq == std::string::npos)
                {
                    throw MalformedManifest("expected 'key = value'", start_line);
                }
                auto key = stmt.substr(0, eq);
                key.erase(0, key.find_first_not_of(" \t"));
                key.erase(key.find_last_not_of(" \t") + 1);
                if (key.size() >= 2 && (key.front() == '"' || key.front() == '\''))
                {
                    key = key.substr(1, key.size() - 2);
                }
                else if (key.find('.') != std::string::npos)
                {
                    throw MalformedManifest("dotted keys are not supported", start_line);
                }
                const auto v = TomlValue(std::string_view(stmt).substr(eq + 1), start_line).parse();
                const bool deps = section == "dependencies" || section == "dev-dependencies"
                                  || section == "build-dependencies";
                if (section != "package" && section != "features" && !deps)
                {
                    continue;
                }
                if (out.empty())
                {
                    throw MalformedManifest("entry before any [package] section", start_line);
                }
                auto& rec = out.back();
                if (section == "package")
                {
                    if (key == "name" || key == "version")
                    {
                        if (!v.is_string())
                        {
                            throw MalformedManifest("package " + key + " must be a string", start_line);
                        }
                        (key == "name" ? rec.name : rec.version) = v.get<std::string>();
                    }
                }
                else if (section == "features")
                {
                    if (!v.is_array())
                    {
                        throw MalformedManifest("feature " + key + " must be an array", start_line);
                    }
                    rec.features.emplace_back(key, v.get<std::vector<std::string>>());
                }
                else
                {
                    CargoDep d;
                    d.alias = key;
                    d.package = key;
                    d.kind = section == "dev-dependencies" ? "dev" : "normal";
                    d.targeted = targeted;
                    if (v.is_string())
                    {
                        d.req = v.get<std::string>();
                    }
                    else if (v.is_object())
                    {
                        if (!v.contains("version"))
                        {
                            b.warnings.push_back(key + ": path or git dependency without version, treated as any version");
                        }
                        d.req = v.value("version", std::string("*"));
                        d.package = v.value("package", key);
                        d.optional = v.value("optional", false);
                        d.features = v.value("features", std::vector<std::string>{});
                    }
                    else
                    {
                        throw MalformedManifest("dependency " + key + " must be a string or table", start_line);
                    }
                    rec.deps.push_back(std::move(d));
                }
            }
            return out;
        }
    }

    Bundle parse_cargo_metadata(std::string_view text, const std::string& ecosystem)
    {
        Bundle b;
        b.ecosystem = ecosystem;
        b.scheme = VersionScheme::Semver;
        const auto first = text.find_first_not_of(" \t\r\n");
        if (first == std::string_view::npos)
        {
            return b;
        }
        const auto records = text[first] == '{' ? parse_index(text, b) : parse_manifests(text, b);
        for (const auto& c : records)
        {
            b.packages.push_back(lower(c, b));
        }
        return b;
    }
}
