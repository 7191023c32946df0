#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hyperres/adapters/bundle.hpp"
#include "hyperres/solver/solve.hpp"

namespace hyperres
{
    struct StageSpec
    {
        std::string name;
        std::map<std::string, std::string> params;
        std::size_t line = 0;
    };

    /**
     * Parsed pipeline file. One directive per line, `#` starts a comment:
     *
     *     stage <name> [key=value ...]
     *     query <package id>
     *     policy highest|lowest|declaration
     *     format json|dot|plan
     *     break-cycles true|false
     *
     * Stage names and their keys are checked while parsing.
     */
    struct PipelineConfig
    {
        std::vector<StageSpec> stages;
        std::vector<PackageId> query;
        std::optional<DecisionOrder> policy;
        std::optional<std::string> format;
        std::optional<bool> break_cycles;
    };

    /// Registered stage names, in the order they are documented.
    [[nodiscard]] const std::vector<std::string>& stage_names();

    [[nodiscard]] PipelineConfig parse_pipeline(std::string_view text);

    struct PipelineOutput
    {
        ResolutionHypergraph hypergraph;
        /// Packages a stage adds to the query, such as an upgrade's virtual.
        PackageSet query;
    };

    [[nodiscard]] PipelineOutput apply_pipeline(const Repository& repo, const PipelineConfig& config);
}
