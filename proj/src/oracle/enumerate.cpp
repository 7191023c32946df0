#include "hyperres/oracle/enumerate.hpp"

#include <cstdint>
#include <cstdlib>
#include <set>
#include <string>

#include "hyperres/core/verify.hpp"

namespace hyperres
{
    namespace
    {
        class Enumerator
        {
        public:
            Enumerator(const ResolutionHypergraph& h, const PackageSet& query, EnumerationBudget budget, bool features)
                : m_h(h)
                , m_query(query)
                , m_budget(budget)
                , m_features(features)
                , m_start(std::chrono::steady_clock::now())
                , m_in(h.size(), 0)
                , m_labels(h.size())
            {
            }

            std::vector<ResolvedGraph> run()
            {
                const auto n = m_h.size();
                if (n > m_budget.max_packages)
                {
                    throw BudgetExceeded(
                        "enumeration limited to " + std::to_string(m_budget.max_packages) + " packages, instance has "
                        + std::to_string(n)
                    );
                }
                std::vector<char> fixed(n, 0);
                for (const auto& q : m_query)
                {
                    auto i = m_h.index_of(q);
                    if (!i)
                    {
                        throw Error("query package " + q.str() + " is not in the hypergraph");
                    }
                    fixed[*i] = 1;
                }
                std::vector<std::size_t> free;
                for (std::size_t p = 0; p < n; ++p)
                {
                    if (!fixed[p])
                    {
                        free.push_back(p);
                    }
                }
                const std::uint64_t subsets = std::uint64_t{1} << free.size();
                for (std::uint64_t mask = 0; mask < subsets; ++mask)
                {
                    m_in = fixed;
                    for (std::size_t b = 0; b < free.size(); ++b)
                    {
                        if (mask >> b & 1U)
                        {
                            m_in[free[b]] = 1;
                        }
                    }
                    m_selected.clear();
                    for (std::size_t p = 0; p < n; ++p)
                    {
                        if (m_in[p])
                        {
                            m_selected.push_back(p);
                        }
                    }
                    if (!plausible())
                    {
                        continue;
                    }
                    label(0);
                }
                return {m_found.begin(), m_found.end()};
            }

        private:
            /// A vertex set fails early on a selected conflict or a dependency with no selected target.
            [[nodiscard]] bool plausible() const
            {
                for (auto p : m_selected)
                {
                    for (auto eid : m_h.edges_from(p))
                    {
                        const auto kind = m_h.edges()[eid].kind;
                        bool any = false;
                        for (auto t : m_h.edge_targets(eid))
                        {
                            any = any || m_in[t];
                        }
                        if (kind == RelKind::Conflict && any)
                        {
                            return false;
                        }
                        if (kind == RelKind::Dependency && !any)
                        {
                            return false;
                        }
                    }
                }
                return true;
            }

            void label(std::size_t k)
            {
                if (!m_features || k == m_selected.size())
                {
                    choose();
                    return;
                }
                const auto p = m_selected[k];
                const auto& declared = m_h.features_of(m_h.packages()[p]);
                const std::vector<std::string> feats(declared.begin(), declared.end());
                const std::uint64_t count = std::uint64_t{1} << feats.size();
                for (std::uint64_t mask = 0; mask < count; ++mask)
                {
                    m_labels[p].clear();
                    for (std::size_t b = 0; b < feats.size(); ++b)
                    {
                        if (mask >> b & 1U)
                        {
                            m_labels[p].insert(feats[b]);
                        }
                    }
                    label(k + 1);
                }
                m_labels[p].clear();
            }

            /// Odometer over one selected satisfier per constraint.
            void choose()
            {
                std::vector<std::pair<std::size_t, std::vector<std::size_t>>> slots;
                auto restrict = [&](auto&& targets)
                {
                    std::vector<std::size_t> out;
                    for (auto t : targets)
                    {
                        if (m_in[t])
                        {
                            out.push_back(t);
                        }
                    }
                    return out;
                };
                for (auto p : m_selected)
                {
                    for (auto eid : m_h.edges_from(p))
                    {
                        const auto kind = m_h.edges()[eid].kind;
                        if (kind == RelKind::Conflict)
                        {
                            continue;
                        }
                        auto options = restrict(m_h.edge_targets(eid));
                        if (!options.empty())
                        {
                            slots.emplace_back(p, std::move(options));
                        }
                    }
                    for (const auto& f : m_labels[p])
                    {
                        auto fit = m_h.feature_deps().find({m_h.packages()[p], f});
                        if (fit == m_h.feature_deps().end())
                        {
                            continue;
                        }
                        for (const auto& set : fit->second)
                        {
                            std::vector<std::size_t> ids;
                            for (const auto& t : set)
                            {
                                ids.push_back(*m_h.index_of(t));
                            }
                            auto options = restrict(ids);
                            if (options.empty())
                            {
                                return;
                            }
                            slots.emplace_back(p, std::move(options));
                        }
                    }
                }

                std::vector<std::size_t> pick(slots.size(), 0);
                const auto& pkgs = m_h.packages();
                while (true)
                {
                    ResolvedGraph g;
                    for (auto p : m_selected)
                    {
                        g.vertices.insert(pkgs[p]);
                        if (!m_labels[p].empty())
                        {
                            g.selected_features[pkgs[p]] = m_labels[p];
                        }
                    }
                    for (std::size_t s = 0; s < slots.size(); ++s)
                    {
                        g.edges.emplace(pkgs[slots[s].first], pkgs[slots[s].second[pick[s]]]);
                    }
                    consider(std::move(g));

                    std::size_t s = 0;
                    while (s < slots.size() && ++pick[s] == slots[s].second.size())
                    {
                        pick[s++] = 0;
                    }
                    if (s == slots.size())
                    {
                        return;
                    }
                }
            }

            void consider(ResolvedGraph g)
            {
                if (++m_candidates > m_budget.max_candidates)
                {
                    throw BudgetExceeded("enumeration exceeded " + std::to_string(m_budget.max_candidates) + " candidates");
                }
                if ((m_candidates & 0x3FF) == 0 && std::chrono::steady_clock::now() - m_start > m_budget.timeout)
                {
                    throw BudgetExceeded("enumeration timed out");
                }
                if (m_found.contains(g))
                {
                    return;
                }
                const auto report = m_features ? verify_features(m_h, m_query, g) : verify_resolution(m_h, m_query, g);
                if (report.valid())
                {
                    m_found.insert(std::move(g));
                }
            }

            const ResolutionHypergraph& m_h;
            const PackageSet& m_query;
            EnumerationBudget m_budget;
            bool m_features;
            std::chrono::steady_clock::time_point m_start;
            std::size_t m_candidates = 0;
            std::vector<char> m_in;
            std::vector<std::size_t> m_selected;
            std::vector<std::set<std::string>> m_labels;
            std::set<ResolvedGraph> m_found;
        };
    }

    std::vector<ResolvedGraph> enumerate_resolutions(
        const ResolutionHypergraph& h,
        const PackageSet& query,
        EnumerationBudget budget
    )
    {
        return Enumerator(h, query, budget, false).run();
    }

    std::vector<ResolvedGraph> enumerate_feature_resolutions(
        const ResolutionHypergraph& h,
        const PackageSet& query,
        EnumerationBudget budget
    )
    {
        return Enumerator(h, query, budget, true).run();
    }

    bool cnf_truth_table(const CnfFormula& cnf)
    {
        if (cnf.num_vars > 20)
        {
            throw BudgetExceeded("truth table limited to 20 variables");
        }
        std::vector<std::pair<std::uint32_t, std::uint32_t>> masks;  // (positive, negative)
        for (const auto& clause : cnf.clauses)
        {
            std::uint32_t pos = 0;
            std::uint32_t negs = 0;
            for (auto lit : clause)
            {
                const auto bit = std::uint32_t{1} << (std::abs(lit) - 1);
                (lit > 0 ? pos : negs) |= bit;
            }
            masks.emplace_back(pos, negs);
        }
        const std::uint32_t total = std::uint32_t{1} << cnf.num_vars;
        for (std::uint32_t a = 0; a < total; ++a)
        {
            bool all = true;
            for (const auto& [pos, negs] : masks)
            {
                if ((a & pos) == 0 && (~a & negs) == 0)
                {
                    all = false;
                    break;
                }
            }
            if (all)
            {
                return true;
            }
        }
        return false;
    }
}
