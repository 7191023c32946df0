#include "hyperres/solver/sat.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>

namespace hyperres
{
    namespace
    {
        // Internal literal: 2 * (var - 1) + (negative ? 1 : 0).
        using Lit = std::uint32_t;
        constexpr std::int32_t no_reason = -1;
        constexpr std::int8_t l_false = 0;
        constexpr std::int8_t l_true = 1;
        constexpr std::int8_t l_undef = 2;

        Lit to_lit(Literal l)
        {
            const auto v = static_cast<Lit>(std::abs(l)) - 1;
            return 2 * v + (l < 0 ? 1 : 0);
        }

        Literal to_literal(Lit l)
        {
            const auto v = static_cast<Literal>(l >> 1) + 1;
            return (l & 1) ? -v : v;
        }

        Lit neg(Lit l)
        {
            return l ^ 1U;
        }

        std::size_t var_of(Lit l)
        {
            return l >> 1;
        }

        class Solver
        {
        public:
            explicit Solver(const CnfFormula& cnf)
                : m_nvars(cnf.num_vars)
                , m_value(cnf.num_vars, l_undef)
                , m_level(cnf.num_vars, 0)
                , m_reason(cnf.num_vars, no_reason)
                , m_seen(cnf.num_vars, 0)
                , m_watches(2 * cnf.num_vars)
                , m_neg_occurs(cnf.num_vars)
            {
                for (const auto& clause : cnf.clauses)
                {
                    add_input(clause);
                    if (m_unsat)
                    {
                        return;
                    }
                }
            }

            SatResult run(std::span<const Literal> assumptions)
            {
                SatResult result;
                if (m_unsat)
                {
                    return result;
                }
                std::vector<Lit> assume;
                for (auto a : assumptions)
                {
                    if (a == 0 || static_cast<std::size_t>(std::abs(a)) > m_nvars)
                    {
                        throw Error("assumption literal out of range");
                    }
                    assume.push_back(to_lit(a));
                }

                while (true)
                {
                    const auto confl = propagate();
                    if (confl != no_reason)
                    {
                        if (decision_level() == 0)
                        {
                            return result;
                        }
                        std::vector<Lit> learnt;
                        int back = 0;
                        analyze(confl, learnt, back);
                        cancel_until(back);
                        if (learnt.size() == 1)
                        {
                            enqueue(learnt[0], no_reason);
                        }
                        else
                        {
                            const auto ci = static_cast<std::int32_t>(m_clauses.size());
                            m_clauses.push_back(learnt);
                            watch(ci);
                            enqueue(learnt[0], ci);
                        }
                        continue;
                    }

                    std::optional<Lit> next;
                    while (decision_level() < static_cast<int>(assume.size()))
                    {
                        const auto p = assume[static_cast<std::size_t>(decision_level())];
                        if (value(p) == l_true)
                        {
                            new_level();
                        }
                        else if (value(p) == l_false)
                        {
                            for (auto l : analyze_final(neg(p)))
                            {
                                result.failed_assumptions.push_back(to_literal(neg(l)));
                            }
                            std::sort(result.failed_assumptions.begin(), result.failed_assumptions.end());
                            return result;
                        }
                        else
                        {
                            next = p;
                            break;
                        }
                    }
                    if (!next)
                    {
                        next = pick_branch();
                        if (!next)
                        {
                            result.satisfiable = true;
                            result.model.resize(m_nvars);
                            for (std::size_t v = 0; v < m_nvars; ++v)
                            {
                                result.model[v] = m_value[v] == l_true;
                            }
                            return result;
                        }
                    }
                    new_level();
                    enqueue(*next, no_reason);
                }
            }

        private:
            [[nodiscard]] std::int8_t value(Lit l) const
            {
                const auto v = m_value[var_of(l)];
                if (v == l_undef)
                {
                    return l_undef;
                }
                return static_cast<std::int8_t>((l & 1) ? v ^ 1 : v);
            }

            [[nodiscard]] int decision_level() const
            {
                return static_cast<int>(m_trail_lim.size());
            }

            void new_level()
            {
                m_trail_lim.push_back(m_trail.size());
            }

            void add_input(const Clause& clause)
            {
                std::vector<Lit> lits;
                for (auto l : clause)
                {
                    if (l == 0 || static_cast<std::size_t>(std::abs(l)) > m_nvars)
                    {
                        throw Error("clause literal out of range");
                    }
                    const auto lit = to_lit(l);
                    if (std::find(lits.begin(), lits.end(), neg(lit)) != lits.end())
                    {
                        return;  // tautology
                    }
                    if (std::find(lits.begin(), lits.end(), lit) == lits.end())
                    {
                        lits.push_back(lit);
                    }
                }
                if (lits.empty())
                {
                    m_unsat = true;
                    return;
                }
                register_agenda(lits);
                if (lits.size() == 1)
                {
                    if (value(lits[0]) == l_false)
                    {
                        m_unsat = true;
                    }
                    else if (value(lits[0]) == l_undef)
                    {
                        enqueue(lits[0], no_reason);
                    }
                    return;
                }
                const auto ci = static_cast<std::int32_t>(m_clauses.size());
                m_clauses.push_back(std::move(lits));
                watch(ci);
            }

            /// Records a clause with two or more positive literals for branching.
            void register_agenda(const std::vector<Lit>& lits)
            {
                std::vector<Lit> pos;
                std::size_t negs = 0;
                for (auto l : lits)
                {
                    if (l & 1)
                    {
                        ++negs;
                    }
                    else
                    {
                        pos.push_back(l);
                    }
                }
                if (pos.size() < 2)
                {
                    return;
                }
                const auto id = m_agenda_pos.size();
                m_agenda_pos.push_back(std::move(pos));
                m_agenda_need.push_back(negs);
                m_agenda_count.push_back(0);
                for (auto l : lits)
                {
                    if (l & 1)
                    {
                        m_neg_occurs[var_of(l)].push_back(id);
                    }
                }
                // Level-0 units are already on the trail; account for them.
                for (auto l : lits)
                {
                    if ((l & 1) && m_value[var_of(l)] == l_true)
                    {
                        ++m_agenda_count[id];
                    }
                }
                if (m_agenda_count[id] == negs)
                {
                    m_queue.push_back({id, -1});
                }
            }

            void watch(std::int32_t ci)
            {
                const auto& c = m_clauses[static_cast<std::size_t>(ci)];
                m_watches[neg(c[0])].push_back(ci);
                m_watches[neg(c[1])].push_back(ci);
            }

            void enqueue(Lit l, std::int32_t reason)
            {
                const auto v = var_of(l);
                m_value[v] = (l & 1) ? l_false : l_true;
                m_level[v] = decision_level();
                m_reason[v] = reason;
                const auto stamp = static_cast<std::ptrdiff_t>(m_trail.size());
                m_trail.push_back(l);
                if (m_value[v] == l_true)
                {
                    for (auto id : m_neg_occurs[v])
                    {
                        if (++m_agenda_count[id] == m_agenda_need[id])
                        {
                            m_queue.push_back({id, stamp});
                        }
                    }
                }
            }

            void cancel_until(int level)
            {
                if (decision_level() <= level)
                {
                    return;
                }
                const auto keep = m_trail_lim[static_cast<std::size_t>(level)];
                for (auto i = m_trail.size(); i-- > keep;)
                {
                    const auto v = var_of(m_trail[i]);
                    if (m_value[v] == l_true)
                    {
                        for (auto id : m_neg_occurs[v])
                        {
                            --m_agenda_count[id];
                        }
                    }
                    m_value[v] = l_undef;
                    m_reason[v] = no_reason;
                }
                m_trail.resize(keep);
                m_trail_lim.resize(static_cast<std::size_t>(level));
                m_qhead = std::min(m_qhead, keep);
                while (!m_queue.empty() && m_queue.back().stamp >= static_cast<std::ptrdiff_t>(keep))
                {
                    m_queue.pop_back();
                }
                m_agenda_head = 0;
                m_fallback = 0;
            }

            std::int32_t propagate()
            {
                while (m_qhead < m_trail.size())
                {
                    const Lit p = m_trail[m_qhead++];  // p is true; clauses watching ~p
                    auto& ws = m_watches[p];
                    const Lit false_lit = neg(p);
                    std::size_t i = 0;
                    std::size_t j = 0;
                    while (i < ws.size())
                    {
                        const auto ci = ws[i++];
                        auto& c = m_clauses[static_cast<std::size_t>(ci)];
                        if (c[0] == false_lit)
                        {
                            std::swap(c[0], c[1]);
                        }
                        if (value(c[0]) == l_true)
                        {
                            ws[j++] = ci;
                            continue;
                        }
                        bool moved = false;
                        for (std::size_t k = 2; k < c.size(); ++k)
                        {
                            if (value(c[k]) != l_false)
                            {
                                std::swap(c[1], c[k]);
                                m_watches[neg(c[1])].push_back(ci);
                                moved = true;
                                break;
                            }
                        }
                        if (moved)
                        {
                            continue;
                        }
                        ws[j++] = ci;
                        if (value(c[0]) == l_false)
                        {
                            while (i < ws.size())
                            {
                                ws[j++] = ws[i++];
                            }
                            ws.resize(j);
                            m_qhead = m_trail.size();
                            return ci;
                        }
                        enqueue(c[0], ci);
                    }
                    ws.resize(j);
                }
                return no_reason;
            }

            void analyze(std::int32_t confl, std::vector<Lit>& learnt, int& back)
            {
                learnt.assign(1, 0);
                int path = 0;
                std::optional<Lit> p;
                auto idx = m_trail.size();
                while (true)
                {
                    const auto& c = m_clauses[static_cast<std::size_t>(confl)];
                    for (std::size_t k = p ? 1 : 0; k < c.size(); ++k)
                    {
                        const auto q = c[k];
                        const auto v = var_of(q);
                        if (m_seen[v] || m_level[v] == 0)
                        {
                            continue;
                        }
                        m_seen[v] = 1;
                        if (m_level[v] >= decision_level())
                        {
                            ++path;
                        }
                        else
                        {
                            learnt.push_back(q);
                        }
                    }
                    do
                    {
                        --idx;
                    } while (!m_seen[var_of(m_trail[idx])]);
                    p = m_trail[idx];
                    confl = m_reason[var_of(*p)];
                    m_seen[var_of(*p)] = 0;
                    if (--path == 0)
                    {
                        break;
                    }
                }
                learnt[0] = neg(*p);

                back = 0;
                std::size_t max_i = 1;
                for (std::size_t k = 1; k < learnt.size(); ++k)
                {
                    const auto lv = m_level[var_of(learnt[k])];
                    if (lv > back)
                    {
                        back = lv;
                        max_i = k;
                    }
                }
                if (learnt.size() > 1)
                {
                    std::swap(learnt[1], learnt[max_i]);
                }
                for (auto l : learnt)
                {
                    m_seen[var_of(l)] = 0;
                }
            }

            /// Decision literals (assumptions) implying `p`; `p` itself included.
            std::vector<Lit> analyze_final(Lit p)
            {
                std::vector<Lit> out{p};
                if (decision_level() == 0)
                {
                    return out;
                }
                m_seen[var_of(p)] = 1;
                for (auto i = m_trail.size(); i-- > m_trail_lim[0];)
                {
                    const auto v = var_of(m_trail[i]);
                    if (!m_seen[v])
                    {
                        continue;
                    }
                    if (m_reason[v] == no_reason)
                    {
                        if (m_level[v] > 0)
                        {
                            out.push_back(neg(m_trail[i]));
                        }
                    }
                    else
                    {
                        const auto& c = m_clauses[static_cast<std::size_t>(m_reason[v])];
                        for (std::size_t k = 1; k < c.size(); ++k)
                        {
                            if (m_level[var_of(c[k])] > 0)
                            {
                                m_seen[var_of(c[k])] = 1;
                            }
                        }
                    }
                    m_seen[v] = 0;
                }
                m_seen[var_of(p)] = 0;
                return out;
            }

            std::optional<Lit> pick_branch()
            {
                while (m_agenda_head < m_queue.size())
                {
                    const auto& pos = m_agenda_pos[m_queue[m_agenda_head].id];
                    bool satisfied = false;
                    std::optional<Lit> first;
                    for (auto l : pos)
                    {
                        const auto val = value(l);
                        if (val == l_true)
                        {
                            satisfied = true;
                            break;
                        }
                        if (val == l_undef && !first)
                        {
                            first = l;
                        }
                    }
                    if (!satisfied && first)
                    {
                        return first;
                    }
                    ++m_agenda_head;
                }
                while (m_fallback < m_nvars)
                {
                    if (m_value[m_fallback] == l_undef)
                    {
                        return static_cast<Lit>(2 * m_fallback + 1);
                    }
                    ++m_fallback;
                }
                return std::nullopt;
            }

            struct QueueEntry
            {
                std::size_t id;
                std::ptrdiff_t stamp;  // trail index that completed the clause, -1 for always
            };

            std::size_t m_nvars;
            bool m_unsat = false;
            std::vector<std::vector<Lit>> m_clauses;
            std::vector<std::int8_t> m_value;
            std::vector<int> m_level;
            std::vector<std::int32_t> m_reason;
            std::vector<char> m_seen;
            std::vector<std::vector<std::int32_t>> m_watches;
            std::vector<Lit> m_trail;
            std::vector<std::size_t> m_trail_lim;
            std::size_t m_qhead = 0;

            std::vector<std::vector<Lit>> m_agenda_pos;
            std::vector<std::size_t> m_agenda_need;
            std::vector<std::size_t> m_agenda_count;
            std::vector<std::vector<std::size_t>> m_neg_occurs;
            std::vector<QueueEntry> m_queue;
            std::size_t m_agenda_head = 0;
            std::size_t m_fallback = 0;
        };
    }

    SatResult CdclBackend::solve(const CnfFormula& cnf, std::span<const Literal> assumptions)
    {
        Solver solver(cnf);
        return solver.run(assumptions);
    }
}
