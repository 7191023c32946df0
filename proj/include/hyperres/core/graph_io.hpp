#pragma once

#include <string>
#include <string_view>

#include "hyperres/core/resolved_graph.hpp"

namespace hyperres
{
    inline constexpr std::string_view graph_schema = "hyperres-graph/1";

    /// Serializes G as graph-JSON; `post` edges carry `"post": true`.
    [[nodiscard]] std::string dump_graph_json(const ResolvedGraph& g, const EdgeSet& post = {});

    /// Parses graph-JSON. Throws Error on malformed input.
    [[nodiscard]] ResolvedGraph load_graph_json(std::string_view text);

    /// Display label `<ecosystem>-<name>.<version>`, or `<ecosystem>-<name>` for the empty version.
    [[nodiscard]] std::string dot_label(const PackageId& p);

    /// DOT rendering: one node per vertex coloured by ecosystem, post edges dashed.
    [[nodiscard]] std::string dump_dot(const ResolvedGraph& g, const EdgeSet& post = {});
}
