#include "hyperres/cli/pipeline.hpp"

#include <set>
#include <sstream>

#include "hyperres/adapters/formats.hpp"
#include "hyperres/encodings/transforms.hpp"

namespace hyperres
{
    namespace
    {
        struct StageKeys
        {
            std::set<std::string> required;
            std::set<std::string> optional;
        };

        const std::map<std::string, StageKeys>& registry()
        {
            static const std::map<std::string, StageKeys> r = {
                {"single-version", {}},
                {"semver-conflicts", {{"ecosystem"}, {"cargo-compat"}}},
                {"architecture", {{"arches"}, {"ecosystem"}}},
                {"variable", {{"ecosystem", "name", "values"}, {}}},
                {"upgrade", {{"ecosystem"}, {"installed", "upgrade"}}},
                {"restrict-nix", {}},
            };
            return r;
        }

        std::vector<std::string> list(const std::string& s)
        {
            std::vector<std::string> out;
            std::stringstream ss(s);
            std::string item;
            while (std::getline(ss, item, ','))
            {
                if (!item.empty())
                {
                    out.push_back(item);
                }
            }
            return out;
        }

        bool boolean(const std::string& v, std::size_t line)
        {
            if (v == "true")
            {
                return true;
            }
            if (v == "false")
            {
                return false;
            }
            throw ParseError("expected true or false, got '" + v + "'", line);
        }

        std::string param(const StageSpec& s, const std::string& key, const std::string& fallback = "")
        {
            auto it = s.params.find(key);
            return it == s.params.end() ? fallback : it->second;
        }
    }

    const std::vector<std::string>& stage_names()
    {
        static const std::vector<std::string> names = {
            "single-version", "semver-conflicts", "architecture", "variable", "upgrade", "restrict-nix",
        };
        return names;
    }

    PipelineConfig parse_pipeline(std::string_view text)
    {
        PipelineConfig cfg;
        std::istringstream in{std::string(text)};
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line))
        {
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string::npos)
            {
                line.erase(hash);
            }
            std::istringstream words(line);
            std::string directive;
            if (!(words >> directive))
            {
                continue;
            }
            std::vector<std::string> args;
            for (std::string w; words >> w;)
            {
                args.push_back(w);
            }
            auto single = [&]() -> const std::string&
            {
                if (args.size() != 1)
                {
                    throw ParseError(directive + " takes exactly one argument", lineno);
                }
                return args.front();
            };
            if (directive == "stage")
            {
                if (args.empty())
                {
                    throw ParseError("stage needs a name", lineno);
                }
                StageSpec s;
                s.name = args.front();
                s.line = lineno;
                auto it = registry().find(s.name);
                if (it == registry().end())
                {
                    throw ParseError("unknown stage '" + s.name + "'", lineno);
                }
                for (std::size_t i = 1; i < args.size(); ++i)
                {
                    const auto eq = args[i].find('=');
                    if (eq == std::string::npos)
                    {
                        throw ParseError("stage parameter '" + args[i] + "' is not key=value", lineno);
                    }
                    auto key = args[i].substr(0, eq);
                    if (!it->second.required.contains(key) && !it->second.optional.contains(key))
                    {
                        throw ParseError("stage " + s.name + " has no parameter '" + key + "'", lineno);
                    }
                    s.params[key] = args[i].substr(eq + 1);
                }
                for (const auto& key : it->second.required)
                {
                    if (!s.params.contains(key))
                    {
                        throw ParseError("stage " + s.name + " needs parameter '" + key + "'", lineno);
                    }
                }
                if (s.params.contains("cargo-compat"))
                {
                    (void)boolean(s.params["cargo-compat"], lineno);
                }
                cfg.stages.push_back(std::move(s));
            }
            else if (directive == "query")
            {
                const auto& arg = single();
                try
                {
                    cfg.query.push_back(PackageId::parse(arg));
                }
                catch (const Error& e)
                {
                    throw ParseError(e.what(), lineno);
                }
            }
            else if (directive == "policy")
            {
                const auto& arg = single();
                try
                {
                    cfg.policy = decision_order_from_string(arg);
                }
                catch (const Error& e)
                {
                    throw ParseError(e.what(), lineno);
                }
            }
            else if (directive == "format")
            {
                const auto& f = single();
                if (f != "json" && f != "dot" && f != "plan")
                {
                    throw ParseError("unknown format '" + f + "'", lineno);
                }
                cfg.format = f;
            }
            else if (directive == "break-cycles")
            {
                cfg.break_cycles = boolean(single(), lineno);
            }
            else
            {
                throw ParseError("unknown directive '" + directive + "'", lineno);
            }
        }
        return cfg;
    }

    PipelineOutput apply_pipeline(const Repository& repo, const PipelineConfig& config)
    {
        PipelineOutput out{repo.hypergraph, {}};
        auto& h = out.hypergraph;
        for (const auto& s : config.stages)
        {
            if (s.name == "single-version")
            {
                h = apply_single_version_conflicts(h);
            }
            else if (s.name == "semver-conflicts")
            {
                h = semver_conflicts(h, param(s, "ecosystem"), boolean(param(s, "cargo-compat", "false"), s.line));
            }
            else if (s.name == "architecture")
            {
                const auto eco = param(s, "ecosystem", "debian");
                std::map<PackageId, std::string> per_package;
                for (const auto& [p, a] : repo.metadata.architectures)
                {
                    if (h.contains(p))
                    {
                        per_package.emplace(p, a);
                    }
                }
                h = encode_architecture(h, eco, list(param(s, "arches")), per_package);
            }
            else if (s.name == "variable")
            {
                h = encode_variable(h, param(s, "ecosystem"), param(s, "name"), list(param(s, "values")));
            }
            else if (s.name == "upgrade")
            {
                PackageSet installed;
                for (const auto& id : list(param(s, "installed")))
                {
                    installed.insert(PackageId::parse(id));
                }
                std::set<NameKey> names;
                for (const auto& n : list(param(s, "upgrade")))
                {
                    const auto colon = n.find(':');
                    if (colon == std::string::npos)
                    {
                        throw ParseError("upgrade names are written <ecosystem>:<name>, got '" + n + "'", s.line);
                    }
                    names.insert({n.substr(0, colon), n.substr(colon + 1)});
                }
                auto up = make_upgrade_query(h, installed, names, param(s, "ecosystem"));
                h = std::move(up.hypergraph);
                out.query.insert(up.query);
            }
            else if (s.name == "restrict-nix")
            {
                h = restrict_nix(h);
            }
        }
        return out;
    }
}
