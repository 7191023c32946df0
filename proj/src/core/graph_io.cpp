#include "hyperres/core/graph_io.hpp"

#include <map>
#include <sstream>

#include <json.hpp>

namespace hyperres
{
    using nlohmann::json;

    std::string dump_graph_json(const ResolvedGraph& g, const EdgeSet& post)
    {
        json doc;
        doc["schema"] = graph_schema;
        json vertices = json::array();
        for (const auto& v : g.vertices)
        {
            vertices.push_back(v.str());
        }
        doc["vertices"] = std::move(vertices);
        json edges = json::array();
        for (const auto& e : g.edges)
        {
            json item = {{"from", e.first.str()}, {"to", e.second.str()}};
            if (post.contains(e))
            {
                item["post"] = true;
            }
            edges.push_back(std::move(item));
        }
        doc["edges"] = std::move(edges);
        json features = json::object();
        for (const auto& [p, fs] : g.selected_features)
        {
            if (!fs.empty())
            {
                features[p.str()] = fs;
            }
        }
        doc["features"] = std::move(features);
        return doc.dump(2) + "\n";
    }

    ResolvedGraph load_graph_json(std::string_view text)
    {
        ResolvedGraph g;
        try
        {
            const auto doc = json::parse(text);
            if (!doc.is_object() || doc.value("schema", std::string{}) != graph_schema)
            {
                throw Error("graph document lacks schema \"" + std::string(graph_schema) + "\"");
            }
            for (const auto& v : doc.at("vertices"))
            {
                g.vertices.insert(PackageId::parse(v.get<std::string>()));
            }
            for (const auto& e : doc.value("edges", json::array()))
            {
                g.edges.emplace(
                    PackageId::parse(e.at("from").get<std::string>()),
                    PackageId::parse(e.at("to").get<std::string>())
                );
            }
            const auto features = doc.value("features", json::object());
            for (const auto& [key, fs] : features.items())
            {
                g.selected_features[PackageId::parse(key)] = fs.get<std::set<std::string>>();
            }
        }
        catch (const json::exception& e)
        {
            throw Error(std::string("malformed graph document: ") + e.what());
        }
        return g;
    }

    std::string dot_label(const PackageId& p)
    {
        std::string out = p.ecosystem + "-" + p.name;
        if (!p.version.empty())
        {
            out += "." + p.version;
        }
        return out;
    }

    namespace
    {
        std::string quoted(const std::string& s)
        {
            std::string out = "\"";
            for (char c : s)
            {
                if (c == '"' || c == '\\')
                {
                    out += '\\';
                }
                out += c;
            }
            return out + "\"";
        }

        std::string colour_of(const std::string& ecosystem)
        {
            static const std::map<std::string, std::string> known = {
                {"opam", "#bfffbf"},
                {"cargo", "#ffbfbf"},
                {"debian", "#bfffff"},
                {"deb", "#bfffff"},
                {"alpine", "#ffffbf"},
                {"nix", "#dfbfff"},
            };
            auto it = known.find(ecosystem);
            return it == known.end() ? "#e0e0e0" : it->second;
        }
    }

    std::string dump_dot(const ResolvedGraph& g, const EdgeSet& post)
    {
        std::ostringstream os;
        os << "digraph resolved {\n";
        os << "  node [shape=box, style=filled];\n";
        for (const auto& v : g.vertices)
        {
            os << "  " << quoted(dot_label(v)) << " [fillcolor=" << quoted(colour_of(v.ecosystem)) << "];\n";
        }
        for (const auto& e : g.edges)
        {
            os << "  " << quoted(dot_label(e.first)) << " -> " << quoted(dot_label(e.second));
            if (post.contains(e))
            {
                os << " [style=dashed]";
            }
            os << ";\n";
        }
        os << "}\n";
        return os.str();
    }
}
