#include "hyperres/solver/cnf.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace hyperres
{
    Literal CnfInstance::edge_var(std::size_t p, std::size_t e) const
    {
        if (p >= edge_index.size())
        {
            return 0;
        }
        const auto& row = edge_index[p];
        auto it = std::lower_bound(
            row.begin(), row.end(), e, [](const auto& entry, std::size_t key) { return entry.first < key; }
        );
        return it != row.end() && it->first == e ? it->second : 0;
    }

    namespace
    {
        class Encoder
        {
        public:
            Encoder(const ResolutionHypergraph& h, CnfInstance& out)
                : m_h(h)
                , m_out(out)
            {
            }

            void run(const PackageSet& query)
            {
                const std::size_t n = m_h.size();
                m_out.formula.num_vars = n;
                m_out.varmap.reserve(n);
                for (std::size_t p = 0; p < n; ++p)
                {
                    m_out.varmap.push_back({VarInfo::Kind::Package, p, 0});
                }
                allocate_edge_vars();

                for (const auto& q : query)
                {
                    auto i = m_h.index_of(q);
                    if (!i)
                    {
                        throw Error("query package " + q.str() + " is not in the hypergraph");
                    }
                    emit({x(*i)}, ClauseGroup::Query, 0);
                }
                m_out.query_units = m_out.formula.clauses.size();

                for (std::size_t eid = 0; eid < m_h.edges().size(); ++eid)
                {
                    switch (m_h.edges()[eid].kind)
                    {
                        case RelKind::Dependency:
                            dependency(eid);
                            break;
                        case RelKind::OptionalDependency:
                            optional(eid);
                            break;
                        case RelKind::Conflict:
                            conflict(eid);
                            break;
                    }
                }
            }

        private:
            [[nodiscard]] static Literal x(std::size_t pkg)
            {
                return static_cast<Literal>(pkg + 1);
            }

            void allocate_edge_vars()
            {
                m_out.edge_index.assign(m_h.size(), {});
                std::vector<std::vector<std::pair<std::size_t, Literal>>> rows(m_h.size());
                for (std::size_t eid = 0; eid < m_h.edges().size(); ++eid)
                {
                    if (m_h.edges()[eid].kind == RelKind::Conflict)
                    {
                        continue;
                    }
                    const auto p = m_h.edge_source(eid);
                    for (auto t : m_h.edge_targets(eid))
                    {
                        auto& row = rows[p];
                        auto seen = std::find_if(row.begin(), row.end(), [&](const auto& e) { return e.first == t; });
                        if (seen != row.end())
                        {
                            continue;
                        }
                        const auto var = static_cast<Literal>(++m_out.formula.num_vars);
                        row.emplace_back(t, var);
                        m_out.varmap.push_back({VarInfo::Kind::Edge, p, t});
                    }
                }
                for (std::size_t p = 0; p < rows.size(); ++p)
                {
                    std::sort(rows[p].begin(), rows[p].end());
                    m_out.edge_index[p] = std::move(rows[p]);
                }
            }

            void emit(Clause clause, ClauseGroup group, std::size_t origin)
            {
                // A literal may repeat when an edge targets its own source.
                Clause unique;
                unique.reserve(clause.size());
                for (auto lit : clause)
                {
                    if (std::find(unique.begin(), unique.end(), lit) == unique.end())
                    {
                        unique.push_back(lit);
                    }
                }
                m_out.formula.clauses.push_back(std::move(unique));
                m_out.groups.push_back(group);
                m_out.origins.push_back(origin);
            }

            void implications_and_at_most_one(std::size_t eid, std::span<const std::size_t> targets)
            {
                const auto p = m_h.edge_source(eid);
                for (auto t : targets)
                {
                    emit({-m_out.edge_var(p, t), x(t)}, ClauseGroup::Implication, eid);
                }
                for (std::size_t i = 0; i < targets.size(); ++i)
                {
                    for (std::size_t j = i + 1; j < targets.size(); ++j)
                    {
                        emit(
                            {-m_out.edge_var(p, targets[i]), -m_out.edge_var(p, targets[j])},
                            ClauseGroup::AtMostOne,
                            eid
                        );
                    }
                }
            }

            void dependency(std::size_t eid)
            {
                const auto p = m_h.edge_source(eid);
                const auto targets = m_h.edge_targets(eid);
                Clause alo{-x(p)};
                for (auto t : targets)
                {
                    alo.push_back(m_out.edge_var(p, t));
                }
                emit(std::move(alo), ClauseGroup::DependencyAtLeastOne, eid);
                implications_and_at_most_one(eid, targets);
            }

            void optional(std::size_t eid)
            {
                const auto p = m_h.edge_source(eid);
                const auto targets = m_h.edge_targets(eid);
                for (auto e : targets)
                {
                    Clause trigger{-x(p), -x(e)};
                    for (auto t : targets)
                    {
                        trigger.push_back(m_out.edge_var(p, t));
                    }
                    emit(std::move(trigger), ClauseGroup::OptionalTrigger, eid);
                }
                implications_and_at_most_one(eid, targets);
            }

            void conflict(std::size_t eid)
            {
                const auto p = m_h.edge_source(eid);
                for (auto t : m_h.edge_targets(eid))
                {
                    emit({-x(p), -x(t)}, ClauseGroup::Conflict, eid);
                }
            }

            const ResolutionHypergraph& m_h;
            CnfInstance& m_out;
        };
    }

    CnfInstance encode_cnf(const ResolutionHypergraph& h, const PackageSet& query)
    {
        CnfInstance out;
        Encoder(h, out).run(query);
        return out;
    }

    std::size_t expected_clause_count(const ResolutionHypergraph& h, std::size_t query_size)
    {
        std::size_t total = query_size;
        for (std::size_t eid = 0; eid < h.edges().size(); ++eid)
        {
            const std::size_t k = h.edge_targets(eid).size();
            const std::size_t pairs = k * (k - (k > 0 ? 1 : 0)) / 2;
            switch (h.edges()[eid].kind)
            {
                case RelKind::Dependency:
                    total += 1 + k + pairs;
                    break;
                case RelKind::OptionalDependency:
                    total += 2 * k + pairs;
                    break;
                case RelKind::Conflict:
                    total += k;
                    break;
            }
        }
        return total;
    }

    std::string export_dimacs(const CnfFormula& cnf)
    {
        std::string out = "p cnf " + std::to_string(cnf.num_vars) + " " + std::to_string(cnf.clauses.size()) + "\n";
        for (const auto& clause : cnf.clauses)
        {
            for (auto lit : clause)
            {
                out += std::to_string(lit);
                out += ' ';
            }
            out += "0\n";
        }
        return out;
    }

    CnfFormula parse_dimacs(const std::string& text)
    {
        CnfFormula cnf;
        std::istringstream in(text);
        std::string line;
        bool header = false;
        std::size_t declared = 0;
        Clause current;
        std::size_t lineno = 0;
        while (std::getline(in, line))
        {
            ++lineno;
            if (line.empty() || line[0] == 'c' || line[0] == '%')
            {
                continue;
            }
            std::istringstream ls(line);
            if (line[0] == 'p')
            {
                std::string p, fmt;
                if (header || !(ls >> p >> fmt >> cnf.num_vars >> declared) || fmt != "cnf")
                {
                    throw Error("dimacs line " + std::to_string(lineno) + ": bad problem line");
                }
                header = true;
                continue;
            }
            if (!header)
            {
                throw Error("dimacs line " + std::to_string(lineno) + ": clause before problem line");
            }
            std::string tok;
            while (ls >> tok)
            {
                Literal lit = 0;
                auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), lit);
                if (ec != std::errc{} || ptr != tok.data() + tok.size())
                {
                    throw Error("dimacs line " + std::to_string(lineno) + ": bad literal '" + tok + "'");
                }
                if (lit == 0)
                {
                    cnf.clauses.push_back(std::move(current));
                    current.clear();
                    continue;
                }
                if (static_cast<std::size_t>(lit < 0 ? -lit : lit) > cnf.num_vars)
                {
                    throw Error("dimacs line " + std::to_string(lineno) + ": variable out of range");
                }
                current.push_back(lit);
            }
        }
        if (!current.empty())
        {
            cnf.clauses.push_back(std::move(current));
        }
        if (!header || cnf.clauses.size() != declared)
        {
            throw Error("dimacs: clause count does not match problem line");
        }
        return cnf;
    }

    std::string export_varmap(const ResolutionHypergraph& h, const CnfInstance& cnf)
    {
        std::string out;
        const auto& pkgs = h.packages();
        for (std::size_t i = 0; i < cnf.varmap.size(); ++i)
        {
            const auto& info = cnf.varmap[i];
            out += std::to_string(i + 1);
            if (info.kind == VarInfo::Kind::Package)
            {
                out += " pkg " + pkgs[info.package].str();
            }
            else
            {
                out += " edge " + pkgs[info.package].str() + " -> " + pkgs[info.target].str();
            }
            out += '\n';
        }
        return out;
    }
}
