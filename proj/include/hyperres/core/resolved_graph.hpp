#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>

#include "hyperres/core/package_id.hpp"

namespace hyperres
{
    using EdgePair = std::pair<PackageId, PackageId>;
    using EdgeSet = std::set<EdgePair>;

    /// A concrete dependency graph: selected packages, the edge chosen for
    /// each satisfied dependency, and the features selected per package.
    struct ResolvedGraph
    {
        PackageSet vertices;
        EdgeSet edges;
        std::map<PackageId, std::set<std::string>> selected_features;

        bool operator==(const ResolvedGraph&) const = default;
        auto operator<=>(const ResolvedGraph&) const = default;
    };
}
