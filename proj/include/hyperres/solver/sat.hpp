#pragma once

#include <span>
#include <vector>

#include "hyperres/solver/cnf.hpp"

namespace hyperres
{
    struct SatResult
    {
        bool satisfiable = false;
        /// model[v - 1] is the value of variable v; empty when unsatisfiable.
        std::vector<bool> model;
        /// Assumptions that take part in the final conflict (unsatisfiable only).
        std::vector<Literal> failed_assumptions;
    };

    /// Minimal solver interface so an external solver can stand in for the built-in one.
    class SatBackend
    {
    public:
        virtual ~SatBackend() = default;

        [[nodiscard]] virtual SatResult solve(const CnfFormula& cnf, std::span<const Literal> assumptions) = 0;
    };

    /**
     * Built-in conflict-driven DPLL: two watched literals, first-UIP
     * learning, no restarts.
     *
     * Branching follows clause order. Once every negative literal of a clause
     * with two or more positive literals is false, the clause joins an agenda
     * and its first unassigned positive literal is tried first; with nothing
     * on the agenda the lowest unassigned variable is set false. Reordering
     * the positive literals of a clause therefore expresses a preference.
     */
    class CdclBackend final : public SatBackend
    {
    public:
        [[nodiscard]] SatResult solve(const CnfFormula& cnf, std::span<const Literal> assumptions) override;
    };

    [[nodiscard]] inline SatResult solve_sat(const CnfFormula& cnf, std::span<const Literal> assumptions = {})
    {
        return CdclBackend{}.solve(cnf, assumptions);
    }
}
