#include "hyperres/core/verify.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace hyperres
{
    std::string_view to_string(Condition c) noexcept
    {
        switch (c)
        {
            case Condition::QueryPresence:
                return "QueryPresence";
            case Condition::Dependencies:
                return "Dependencies";
            case Condition::OptionalDependencies:
                return "OptionalDependencies";
            case Condition::Conflicts:
                return "Conflicts";
            case Condition::FeatureUnification:
                return "FeatureUnification";
            case Condition::FeatureDependencies:
                return "FeatureDependencies";
            case Condition::Acyclicity:
                return "Acyclicity";
        }
        return "Dependencies";
    }

    namespace
    {
        std::string edge_text(const PackageId& a, const PackageId& b)
        {
            return a.str() + " -> " + b.str();
        }

        class Checker
        {
        public:
            Checker(const ResolutionHypergraph& h, const ResolvedGraph& g, bool with_features)
                : m_h(h)
                , m_g(g)
                , m_features(with_features)
                , m_in(h.size(), 0)
                , m_out(h.size())
            {
            }

            VerificationReport run(const PackageSet& query, VerifyOptions options)
            {
                index_graph();
                check_query(query);
                check_relations();
                if (m_features)
                {
                    check_features();
                }
                check_justified();
                check_reachable(query);
                if (options.require_acyclic)
                {
                    check_acyclic();
                }
                return std::move(m_report);
            }

        private:
            void add(Condition c, std::string subject, std::string message)
            {
                m_report.violations.push_back({c, std::move(subject), std::move(message)});
            }

            [[nodiscard]] bool has_edge(std::size_t a, std::size_t b) const
            {
                const auto& out = m_out[a];
                return std::binary_search(out.begin(), out.end(), b);
            }

            [[nodiscard]] const std::set<std::string>& selected(const PackageId& p) const
            {
                static const std::set<std::string> none;
                if (!m_features)
                {
                    return none;
                }
                auto it = m_g.selected_features.find(p);
                return it == m_g.selected_features.end() ? none : it->second;
            }

            void index_graph()
            {
                for (const auto& v : m_g.vertices)
                {
                    if (auto i = m_h.index_of(v))
                    {
                        m_in[*i] = 1;
                    }
                    else
                    {
                        add(Condition::Dependencies, v.str(), "vertex is not a package of the hypergraph");
                    }
                }
                for (const auto& [a, b] : m_g.edges)
                {
                    auto ia = m_h.index_of(a);
                    auto ib = m_h.index_of(b);
                    if (!ia || !ib || !m_in[*ia] || !m_in[*ib])
                    {
                        add(Condition::Dependencies, edge_text(a, b), "edge endpoint is not a selected vertex");
                        continue;
                    }
                    m_out[*ia].push_back(*ib);
                }
                for (auto& out : m_out)
                {
                    std::sort(out.begin(), out.end());
                }
            }

            void check_query(const PackageSet& query)
            {
                for (const auto& q : query)
                {
                    auto i = m_h.index_of(q);
                    if (!i || !m_in[*i])
                    {
                        add(Condition::QueryPresence, q.str(), "query package is not in the resolved graph");
                    }
                }
            }

            /// Number of targets of a set that are wired from `p` and selected.
            [[nodiscard]] std::size_t wired(std::size_t p, std::span<const std::size_t> targets) const
            {
                std::size_t count = 0;
                for (auto t : targets)
                {
                    if (m_in[t] && has_edge(p, t))
                    {
                        ++count;
                    }
                }
                return count;
            }

            void check_relations()
            {
                const auto& pkgs = m_h.packages();
                for (std::size_t p = 0; p < pkgs.size(); ++p)
                {
                    if (!m_in[p])
                    {
                        continue;
                    }
                    for (auto eid : m_h.edges_from(p))
                    {
                        const auto targets = m_h.edge_targets(eid);
                        const auto& edge = m_h.edges()[eid];
                        switch (edge.kind)
                        {
                            case RelKind::Dependency:
                            {
                                const auto n = wired(p, targets);
                                if (n != 1)
                                {
                                    add(Condition::Dependencies,
                                        pkgs[p].str(),
                                        "dependency " + describe(targets) + " has " + std::to_string(n)
                                            + " selected satisfiers, expected exactly one");
                                }
                                break;
                            }
                            case RelKind::OptionalDependency:
                            {
                                const bool present = std::any_of(
                                    targets.begin(),
                                    targets.end(),
                                    [&](std::size_t t) { return m_in[t] != 0; }
                                );
                                const auto n = wired(p, targets);
                                if (present && n != 1)
                                {
                                    add(Condition::OptionalDependencies,
                                        pkgs[p].str(),
                                        "optional dependency " + describe(targets) + " is present but has "
                                            + std::to_string(n) + " wired satisfiers, expected exactly one");
                                }
                                break;
                            }
                            case RelKind::Conflict:
                                for (auto t : targets)
                                {
                                    if (m_in[t])
                                    {
                                        add(Condition::Conflicts,
                                            edge_text(pkgs[p], pkgs[t]),
                                            "conflicting packages are both selected");
                                    }
                                }
                                break;
                        }
                    }
                }
            }

            void check_features()
            {
                const auto& pkgs = m_h.packages();
                for (const auto& [pkg, feats] : m_g.selected_features)
                {
                    if (feats.empty())
                    {
                        continue;
                    }
                    auto i = m_h.index_of(pkg);
                    if (!i || !m_in[*i])
                    {
                        add(Condition::FeatureUnification, pkg.str(), "features selected for an unselected package");
                        continue;
                    }
                    const auto& declared = m_h.features_of(pkg);
                    for (const auto& f : feats)
                    {
                        if (!declared.contains(f))
                        {
                            add(Condition::FeatureUnification,
                                pkg.str(),
                                "selected feature '" + f + "' is not declared by the package");
                        }
                    }
                }

                for (std::size_t p = 0; p < pkgs.size(); ++p)
                {
                    if (!m_in[p])
                    {
                        continue;
                    }
                    for (auto eid : m_h.edges_from(p))
                    {
                        const auto& edge = m_h.edges()[eid];
                        if (edge.kind != RelKind::Dependency || edge.required_features.empty())
                        {
                            continue;
                        }
                        for (auto t : m_h.edge_targets(eid))
                        {
                            if (!m_in[t] || !has_edge(p, t))
                            {
                                continue;
                            }
                            const auto& have = selected(pkgs[t]);
                            for (const auto& f : edge.required_features)
                            {
                                if (!have.contains(f))
                                {
                                    add(Condition::FeatureUnification,
                                        edge_text(pkgs[p], pkgs[t]),
                                        "dependency requires feature '" + f + "' which is not selected on "
                                            + pkgs[t].str());
                                }
                            }
                        }
                    }
                }
                for (std::size_t p = 0; p < pkgs.size(); ++p)
                {
                    if (!m_in[p])
                    {
                        continue;
                    }
                    const auto& have = selected(pkgs[p]);
                    for (const auto& f : have)
                    {
                        auto fit = m_h.feature_deps().find({pkgs[p], f});
                        if (fit == m_h.feature_deps().end())
                        {
                            continue;
                        }
                        for (const auto& set : fit->second)
                        {
                            std::size_t n = 0;
                            for (const auto& t : set)
                            {
                                auto ti = *m_h.index_of(t);
                                if (m_in[ti] && has_edge(p, ti))
                                {
                                    ++n;
                                }
                            }
                            if (n != 1)
                            {
                                add(Condition::FeatureDependencies,
                                    pkgs[p].str(),
                                    "feature '" + f + "' dependency " + describe(set) + " has " + std::to_string(n)
                                        + " selected satisfiers, expected exactly one");
                            }
                        }
                    }
                }
            }

            void check_justified()
            {
                const auto& pkgs = m_h.packages();
                for (std::size_t p = 0; p < pkgs.size(); ++p)
                {
                    if (m_out[p].empty())
                    {
                        continue;
                    }
                    std::vector<std::size_t> allowed;
                    for (auto eid : m_h.edges_from(p))
                    {
                        if (m_h.edges()[eid].kind == RelKind::Conflict)
                        {
                            continue;
                        }
                        auto ts = m_h.edge_targets(eid);
                        allowed.insert(allowed.end(), ts.begin(), ts.end());
                    }
                    for (const auto& f : selected(pkgs[p]))
                    {
                        auto fit = m_h.feature_deps().find({pkgs[p], f});
                        if (fit == m_h.feature_deps().end())
                        {
                            continue;
                        }
                        for (const auto& set : fit->second)
                        {
                            for (const auto& t : set)
                            {
                                allowed.push_back(*m_h.index_of(t));
                            }
                        }
                    }
                    std::sort(allowed.begin(), allowed.end());
                    for (auto t : m_out[p])
                    {
                        if (!std::binary_search(allowed.begin(), allowed.end(), t))
                        {
                            add(Condition::Dependencies,
                                edge_text(pkgs[p], pkgs[t]),
                                "edge does not satisfy any dependency of its source");
                        }
                    }
                }
            }

            void check_reachable(const PackageSet& query)
            {
                std::vector<char> seen(m_h.size(), 0);
                std::deque<std::size_t> todo;
                for (const auto& q : query)
                {
                    auto i = m_h.index_of(q);
                    if (i && m_in[*i] && !seen[*i])
                    {
                        seen[*i] = 1;
                        todo.push_back(*i);
                    }
                }
                while (!todo.empty())
                {
                    auto p = todo.front();
                    todo.pop_front();
                    for (auto t : m_out[p])
                    {
                        if (!seen[t])
                        {
                            seen[t] = 1;
                            todo.push_back(t);
                        }
                    }
                }
                const auto& pkgs = m_h.packages();
                for (std::size_t p = 0; p < pkgs.size(); ++p)
                {
                    if (m_in[p] && !seen[p])
                    {
                        add(Condition::Dependencies, pkgs[p].str(), "vertex is not required by the query");
                    }
                }
            }

            void check_acyclic()
            {
                const auto posts = post_edges(m_h, m_g);
                const auto& pkgs = m_h.packages();
                const std::size_t n = pkgs.size();
                std::vector<int> color(n, 0);
                for (std::size_t root = 0; root < n; ++root)
                {
                    if (!m_in[root] || color[root] != 0)
                    {
                        continue;
                    }
                    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
                    color[root] = 1;
                    while (!stack.empty())
                    {
                        auto& [v, next] = stack.back();
                        if (next == m_out[v].size())
                        {
                            color[v] = 2;
                            stack.pop_back();
                            continue;
                        }
                        const auto w = m_out[v][next++];
                        if (posts.contains({pkgs[v], pkgs[w]}))
                        {
                            continue;
                        }
                        if (color[w] == 1)
                        {
                            std::string cycle;
                            bool on = false;
                            for (const auto& frame : stack)
                            {
                                on = on || frame.first == w;
                                if (on)
                                {
                                    cycle += pkgs[frame.first].str() + " -> ";
                                }
                            }
                            cycle += pkgs[w].str();
                            add(Condition::Acyclicity, pkgs[w].str(), "cycle " + cycle);
                            return;
                        }
                        if (color[w] == 0)
                        {
                            color[w] = 1;
                            stack.emplace_back(w, 0);
                        }
                    }
                }
            }

            [[nodiscard]] std::string describe(std::span<const std::size_t> targets) const
            {
                std::string out = "{";
                for (std::size_t i = 0; i < targets.size(); ++i)
                {
                    out += (i ? ", " : "") + m_h.packages()[targets[i]].str();
                }
                return out + "}";
            }

            [[nodiscard]] static std::string describe(const std::vector<PackageId>& targets)
            {
                std::string out = "{";
                for (std::size_t i = 0; i < targets.size(); ++i)
                {
                    out += (i ? ", " : "") + targets[i].str();
                }
                return out + "}";
            }

            const ResolutionHypergraph& m_h;
            const ResolvedGraph& m_g;
            bool m_features;
            std::vector<char> m_in;
            std::vector<std::vector<std::size_t>> m_out;
            VerificationReport m_report;
        };
    }

    VerificationReport verify_resolution(
        const ResolutionHypergraph& h,
        const PackageSet& query,
        const ResolvedGraph& g,
        VerifyOptions options
    )
    {
        return Checker(h, g, false).run(query, options);
    }

    VerificationReport verify_features(
        const ResolutionHypergraph& h,
        const PackageSet& query,
        const ResolvedGraph& g,
        VerifyOptions options
    )
    {
        return Checker(h, g, true).run(query, options);
    }

    EdgeSet post_edges(const ResolutionHypergraph& h, const ResolvedGraph& g)
    {
        EdgeSet out;
        for (const auto& [a, b] : g.edges)
        {
            auto ia = h.index_of(a);
            auto ib = h.index_of(b);
            if (!ia || !ib)
            {
                continue;
            }
            bool any = false;
            bool all_post = true;
            for (auto eid : h.edges_from(*ia))
            {
                const auto& e = h.edges()[eid];
                if (e.kind != RelKind::Dependency)
                {
                    continue;
                }
                auto ts = h.edge_targets(eid);
                if (std::find(ts.begin(), ts.end(), *ib) != ts.end())
                {
                    any = true;
                    all_post = all_post && e.post;
                }
            }
            if (any && all_post)
            {
                out.insert({a, b});
            }
        }
        return out;
    }

    std::string format_report(const VerificationReport& report)
    {
        std::ostringstream os;
        if (report.valid())
        {
            os << "valid\n";
            return os.str();
        }
        os << "invalid: " << report.violations.size() << " violation(s)\n";
        for (const auto& v : report.violations)
        {
            os << "  [" << to_string(v.condition) << "] " << v.subject << ": " << v.message << '\n';
        }
        return os.str();
    }
}
