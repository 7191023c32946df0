#include <algorithm>
#include <set>

#include <json.hpp>

#include "hyperres/adapters/formats.hpp"

namespace hyperres
{
    namespace
    {
        using json = nlohmann::json;

        std::vector<std::string> id_strings(const std::vector<PackageId>& ids)
        {
            std::vector<std::string> out;
            out.reserve(ids.size());
            for (const auto& p : ids)
            {
                out.push_back(p.str());
            }
            return out;
        }

        const json& member(const json& j, const char* key)
        {
            if (!j.is_object() || !j.contains(key))
            {
                throw MalformedDocument(std::string("missing member '") + key + "'", 0);
            }
            return j.at(key);
        }

        PackageId id_of(const json& j)
        {
            if (!j.is_string())
            {
                throw MalformedDocument("package ids must be strings", 0);
            }
            try
            {
                return PackageId::parse(j.get<std::string>());
            }
            catch (const Error& e)
            {
                throw MalformedDocument(e.what(), 0);
            }
        }

        std::vector<PackageId> ids_of(const json& j)
        {
            if (!j.is_array())
            {
                throw MalformedDocument("expected an array of package ids", 0);
            }
            std::vector<PackageId> out;
            for (const auto& x : j)
            {
                out.push_back(id_of(x));
            }
            return out;
        }

        std::size_t line_of(std::string_view text, std::size_t byte)
        {
            byte = std::min(byte, text.size());
            return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
        }
    }

    std::string dump_interchange(const Repository& repo)
    {
        const auto& h = repo.hypergraph;
        json doc;
        doc["schema"] = interchange_schema;
        json ecos = json::object();
        std::set<std::string> names_seen;
        for (const auto& p : h.packages())
        {
            names_seen.insert(p.ecosystem);
        }
        for (const auto& [eco, info] : repo.metadata.ecosystems)
        {
            names_seen.insert(eco);
        }
        for (const auto& eco : names_seen)
        {
            auto it = repo.metadata.ecosystems.find(eco);
            const EcosystemInfo info = it == repo.metadata.ecosystems.end() ? EcosystemInfo{} : it->second;
            ecos[eco] = {{"scheme", std::string(to_string(info.scheme))}, {"snapshot", info.snapshot}};
        }
        doc["ecosystems"] = std::move(ecos);
        doc["packages"] = id_strings(h.packages());
        doc["virtual"] = id_strings({h.virtual_packages().begin(), h.virtual_packages().end()});
        json edges = json::array();
        for (const auto& e : h.edges())
        {
            json je{{"from", e.source.str()}, {"kind", std::string(to_string(e.kind))}, {"targets", id_strings(e.targets)}};
            if (!e.required_features.empty())
            {
                je["features"] = e.required_features;
            }
            if (e.post)
            {
                je["post"] = true;
            }
            edges.push_back(std::move(je));
        }
        doc["edges"] = std::move(edges);
        json features = json::object();
        for (const auto& [p, fs] : h.features())
        {
            features[p.str()] = fs;
        }
        doc["features"] = std::move(features);
        json fdeps = json::array();
        for (const auto& [key, sets] : h.feature_deps())
        {
            json js = json::array();
            for (const auto& s : sets)
            {
                js.push_back(id_strings(s));
            }
            fdeps.push_back({{"package", key.first.str()}, {"feature", key.second}, {"sets", std::move(js)}});
        }
        doc["feature_deps"] = std::move(fdeps);
        json orders = json::array();
        for (const auto& [key, versions] : h.version_order())
        {
            orders.push_back({{"ecosystem", key.first}, {"name", key.second}, {"versions", versions}});
        }
        doc["version_order"] = std::move(orders);
        json arches = json::object();
        for (const auto& [p, a] : repo.metadata.architectures)
        {
            arches[p.str()] = a;
        }
        doc["architectures"] = std::move(arches);
        doc["tree_walk"] = h.tree_walk();
        doc["warnings"] = h.warnings();
        return doc.dump(2) + "\n";
    }

    Repository load_interchange(std::string_view text)
    {
        json doc;
        try
        {
            doc = json::parse(text.begin(), text.end());
        }
        catch (const json::parse_error& e)
        {
            throw MalformedDocument(e.what(), line_of(text, e.byte));
        }
        if (!doc.is_object())
        {
            throw MalformedDocument("document must be a JSON object", 1);
        }
        const auto& schema = member(doc, "schema");
        if (!schema.is_string())
        {
            throw MalformedDocument("schema must be a string", 0);
        }
        if (schema.get<std::string>() != interchange_schema)
        {
            throw SchemaVersionMismatch(
                "unsupported schema '" + schema.get<std::string>() + "', expected '" + interchange_schema + "'"
            );
        }
        try
        {
            Repository repo;
            HypergraphParts parts;
            if (doc.contains("ecosystems"))
            {
                for (const auto& [eco, info] : doc["ecosystems"].items())
                {
                    EcosystemInfo ei;
                    if (info.contains("scheme"))
                    {
                        ei.scheme = version_scheme_from_string(info["scheme"].get<std::string>());
                    }
                    ei.snapshot = info.value("snapshot", std::string{});
                    repo.metadata.ecosystems[eco] = ei;
                }
            }
            parts.packages = ids_of(member(doc, "packages"));
            if (doc.contains("virtual"))
            {
                for (auto& v : ids_of(doc["virtual"]))
                {
                    parts.virtual_packages.insert(std::move(v));
                }
            }
            for (const auto& je : doc.value("edges", json::array()))
            {
                Hyperedge e;
                e.source = id_of(member(je, "from"));
                const auto& kind = member(je, "kind");
                if (!kind.is_string())
                {
                    throw MalformedDocument("edge kind must be a string", 0);
                }
                try
                {
                    e.kind = rel_kind_from_string(kind.get<std::string>());
                }
                catch (const Error& err)
                {
                    throw MalformedDocument(err.what(), 0);
                }
                e.targets = ids_of(member(je, "targets"));
                if (je.contains("features"))
                {
                    e.required_features = je["features"].get<std::set<std::string>>();
                }
                e.post = je.value("post", false);
                parts.edges.push_back(std::move(e));
            }
            if (doc.contains("features"))
            {
                for (const auto& [p, fs] : doc["features"].items())
                {
                    parts.features[id_of(p)] = fs.get<std::set<std::string>>();
                }
            }
            for (const auto& jf : doc.value("feature_deps", json::array()))
            {
                auto& sets = parts.feature_deps[{id_of(member(jf, "package")), member(jf, "feature").get<std::string>()}];
                for (const auto& s : member(jf, "sets"))
                {
                    sets.push_back(ids_of(s));
                }
            }
            for (const auto& jo : doc.value("version_order", json::array()))
            {
                parts.version_order[{member(jo, "ecosystem").get<std::string>(), member(jo, "name").get<std::string>()}] =
                    member(jo, "versions").get<std::vector<std::string>>();
            }
            if (doc.contains("architectures"))
            {
                for (const auto& [p, a] : doc["architectures"].items())
                {
                    repo.metadata.architectures[id_of(p)] = a.get<std::string>();
                }
            }
            parts.tree_walk = doc.value("tree_walk", false);
            parts.warnings = doc.value("warnings", std::vector<std::string>{});
            // Names without a recorded order are sorted under their scheme; recorded ones are validated as given.
            const auto recorded = parts.version_order;
            order_versions(parts, repo.metadata.ecosystems);
            for (const auto& [key, order] : recorded)
            {
                parts.version_order[key] = order;
            }
            repo.hypergraph = build_hypergraph(std::move(parts));
            return repo;
        }
        catch (const json::exception& e)
        {
            throw MalformedDocument(e.what(), 0);
        }
    }
}
