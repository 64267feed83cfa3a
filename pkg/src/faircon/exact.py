"""Globally optimal solvers by enumeration over allocations.

Feasible at desk scale (n^m allocations, each solved as an LP); these are
the oracles the approximate solvers are tested against.  Budgets count LP
solves, not wall time, so runs are reproducible.
"""

from __future__ import annotations

import itertools
import logging
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from . import ext
from .core import (
    Allocation,
    Contract,
    Instance,
    SolveResult,
    minimum_wage,
    revenue,
    verify_ef1,
    verify_efs,
)
from .errors import BudgetExceededError, FairconError
from .lp import (
    alphas_from_solution,
    build_ef_lp,
    build_ef1_lp,
    build_efs_lp,
    solve_lp,
)
from .numeric import INF_WAGE, Num, ONE, ZERO, as_fraction

log = logging.getLogger("faircon")

DEFAULT_LP_BUDGET = 10**7

__all__ = [
    "minimum_wage",
    "assignments",
    "solve_opt_ef",
    "solve_opt_ef1",
    "enumerate_case4_bounds",
    "solve_opt_efs",
]


def assignments(n: int, m: int) -> Iterator[tuple[int, ...]]:
    """All full allocations in lexicographic (mixed-radix) order."""
    return itertools.product(range(n), repeat=m)


def _check_allocation_budget(inst: Instance, budget: int) -> int:
    count = inst.n**inst.m
    if count > budget:
        raise BudgetExceededError("lps", budget, count)
    return count


def _assignment_feasible(inst: Instance, assignment: tuple[int, ...]) -> bool:
    """Every assigned pair must admit an IR contract (wage <= 1)."""
    for j, i in enumerate(assignment):
        w = minimum_wage(inst, i, j)
        if w is INF_WAGE or w > 1:
            return False
    return True


class _LpCounter:
    def __init__(self, budget: int):
        self.budget = budget
        self.count = 0

    def tick(self) -> None:
        self.count += 1
        if self.count > self.budget:
            raise BudgetExceededError("lps", self.budget)


def solve_opt_ef(
    inst: Instance, eps: Num = 0, budget_lps: int = DEFAULT_LP_BUDGET
) -> SolveResult:
    """Optimal (eps-)envy-free contract by enumerating all allocations and
    solving the fixed-allocation LP for each."""
    eps = as_fraction(eps)
    _check_allocation_budget(inst, budget_lps)
    counter = _LpCounter(budget_lps)
    best: Optional[tuple[Fraction, tuple[int, ...], tuple[Fraction, ...]]] = None
    for assignment in assignments(inst.n, inst.m):
        if not _assignment_feasible(inst, assignment):
            continue
        alloc = Allocation(assignment, inst.n)
        model = build_ef_lp(inst, alloc, eps)
        counter.tick()
        sol = solve_lp(model)
        if not sol.optimal:
            continue
        if best is None or sol.objective > best[0]:
            best = (sol.objective, assignment, alphas_from_solution(model, sol, inst.m))
    if best is None:
        raise FairconError("no feasible allocation; Assumption 1 should prevent this")
    value, assignment, alphas = best
    contract = Contract(Allocation(assignment, inst.n), alphas)
    method = "exact-ef" if eps == 0 else "exact-eps-ef"
    return SolveResult(
        contract,
        value,
        method,
        {"eps": eps, "lp_solves": counter.count, "allocations": inst.n**inst.m},
    )


def enumerate_case4_bounds(
    inst: Instance, tasks: Iterable[int], empty_agents: Iterable[int]
) -> list[dict[int, Fraction]]:
    """Contract upper bounds making a bundle envy-free-up-to-one-task for
    every agent that holds nothing.

    Per task, agents are sorted by minimum wage with a zero sentinel at the
    head and a top sentinel at the tail; an index vector cuts each list at a
    wage threshold.  A vector is feasible when no agent sits strictly below
    the cut in two lists (that agent would need two removable tasks).
    Returns the feasible vectors as task -> wage-threshold maps.
    """
    tasks = list(tasks)
    agents = list(empty_agents)
    if not agents:
        return []
    lists: list[list[tuple[Optional[int], Fraction]]] = []
    for k in tasks:
        entries = []
        for a in agents:
            pr = inst.p[a][k] * inst.r[k]
            # pr = 0 means the agent can never gain from the task: sort last.
            wage = inst.c[a][k] / pr if pr > 0 else None
            entries.append((a, wage))
        entries.sort(key=lambda e: (e[1] is None, e[1], e[0]))
        ranked: list[tuple[Optional[int], Fraction]] = [(None, ZERO)]
        ranked += [(a, ONE if w is None else min(w, ONE)) for a, w in entries]
        ranked.append((None, ONE))
        lists.append(ranked)

    out: list[dict[int, Fraction]] = []
    for cuts in itertools.product(*(range(len(lst)) for lst in lists)):
        seen: set[int] = set()
        feasible = True
        for lst, cut in zip(lists, cuts):
            for pos in range(1, cut):
                agent = lst[pos][0]
                if agent is None:
                    continue
                if agent in seen:
                    feasible = False
                    break
                seen.add(agent)
            if not feasible:
                break
        if feasible:
            out.append({k: lst[cut][1] for k, lst, cut in zip(tasks, lists, cuts)})
    return out


def _witness_candidates(inst: Instance, i: int, bundle: list[int]) -> list[int]:
    """Removable tasks worth trying for the pair: only tasks agent i could
    ever gain from; when there are none the choice cannot matter."""
    positive = [k for k in bundle if inst.welfare(i, k) > 0]
    return positive if positive else [bundle[0]]


def solve_opt_ef1(inst: Instance, budget_lps: int = DEFAULT_LP_BUDGET) -> SolveResult:
    """Optimal EF1 contract: per allocation, enumerate removable-task
    choices for nonempty pairs and wage upper-bound vectors for agents with
    empty bundles, solving an LP per combination."""
    _check_allocation_budget(inst, budget_lps)
    counter = _LpCounter(budget_lps)
    best: Optional[tuple[Fraction, tuple[int, ...], tuple[Fraction, ...]]] = None
    for assignment in assignments(inst.n, inst.m):
        if not _assignment_feasible(inst, assignment):
            continue
        alloc = Allocation(assignment, inst.n)
        bundles = alloc.bundles()
        nonempty = [i for i in range(inst.n) if bundles[i]]
        empty = [i for i in range(inst.n) if not bundles[i]]

        pair_options: list[tuple[tuple[int, int], list[int]]] = []
        for i in nonempty:
            for j in nonempty:
                if i != j:
                    pair_options.append(((i, j), _witness_candidates(inst, i, bundles[j])))

        bound_options: list[list[dict[int, Fraction]]] = []
        if empty:
            for j in nonempty:
                vectors = enumerate_case4_bounds(inst, bundles[j], empty)
                # Equal wages can repeat a threshold map; one LP each suffices.
                unique = list({tuple(sorted(v.items())): v for v in vectors}.values())
                bound_options.append(unique)

        witness_product = itertools.product(*(opts for _, opts in pair_options))
        for witness_choice in witness_product:
            witnesses = {
                pair: task for (pair, _), task in zip(pair_options, witness_choice)
            }
            for bound_choice in itertools.product(*bound_options):
                upper: dict[int, Fraction] = {}
                for chunk in bound_choice:
                    upper.update(chunk)
                model = build_ef1_lp(inst, alloc, witnesses, upper)
                counter.tick()
                sol = solve_lp(model)
                if not sol.optimal:
                    continue
                if best is None or sol.objective > best[0]:
                    best = (
                        sol.objective,
                        assignment,
                        alphas_from_solution(model, sol, inst.m),
                    )
    if best is None:
        raise FairconError("no feasible allocation; Assumption 1 should prevent this")
    value, assignment, alphas = best
    contract = Contract(Allocation(assignment, inst.n), alphas)
    ok, _ = verify_ef1(inst, contract)
    if not ok:
        raise FairconError("internal error: EF1 optimum failed verification")
    return SolveResult(
        contract, value, "exact-ef1", {"lp_solves": counter.count}
    )


def solve_opt_efs(inst: Instance, budget_lps: int = DEFAULT_LP_BUDGET) -> SolveResult:
    """Optimal envy-free contract with subsidies, via the reduction that adds
    unit tasks whose payments play the role of subsidies.

    The added tasks are identical for all agents, so allocations of the
    original tasks are enumerated and the added-task placements are folded
    into per-agent subsidy variables of one LP; the winning solution is then
    materialized on the augmented instance and mapped back, which recovers
    the subsidies as the payments on added tasks.
    """
    _check_allocation_budget(inst, budget_lps)
    counter = _LpCounter(budget_lps)
    best = None
    for assignment in assignments(inst.n, inst.m):
        if not _assignment_feasible(inst, assignment):
            continue
        alloc = Allocation(assignment, inst.n)
        model = build_efs_lp(inst, alloc)
        counter.tick()
        sol = solve_lp(model)
        if not sol.optimal:
            continue
        if best is None or sol.objective > best[0]:
            subs = tuple(sol.values[f"s[{i}]"] for i in range(inst.n))
            best = (
                sol.objective,
                assignment,
                alphas_from_solution(model, sol, inst.m),
                subs,
            )
    if best is None:
        raise FairconError("no feasible allocation; Assumption 1 should prevent this")
    value, assignment, alphas, subsidies = best
    aug_inst, mapping = ext.efs_augment(inst)
    aug_contract = ext.embed_subsidized(
        Contract(Allocation(assignment, inst.n), alphas, subsidies), mapping
    )
    contract = ext.extract_subsidies(aug_contract, mapping)
    if revenue(inst, contract) != value:
        raise FairconError("internal error: EFS reduction round-trip changed revenue")
    if not verify_efs(inst, contract):
        raise FairconError("internal error: EFS optimum failed verification")
    return SolveResult(
        contract,
        value,
        "exact-efs",
        {"lp_solves": counter.count, "augmented_tasks": aug_inst.m},
    )
