"""Instance/contract data model, exact utility arithmetic, and fairness verifiers.

The model: a principal delegates m tasks to n agents.  Task j assigned to
agent i succeeds with probability p[i][j] after the agent sinks cost c[i][j];
success pays the principal r[j], of which a fraction alpha[j] goes to the
agent.  A full-allocation contract assigns every task and keeps every
assigned pair individually rational (IR).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .errors import DimensionMismatchError, InvalidInstanceError, NoViableAgentError
from .numeric import INF_WAGE, Num, ZERO, as_fraction


def _rational_row(row: Iterable[Num]) -> tuple[Fraction, ...]:
    return tuple(as_fraction(x) for x in row)


@dataclass(frozen=True)
class Instance:
    """Agents x tasks with success probabilities, costs, and rewards.

    All entries must lie in [0, 1], and every task must have at least one
    agent with nonnegative welfare p*r - c (otherwise the task could never
    be allocated; construction raises NoViableAgentError).
    """

    r: tuple[Fraction, ...]
    p: tuple[tuple[Fraction, ...], ...]
    c: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "r", _rational_row(self.r))
        object.__setattr__(self, "p", tuple(_rational_row(row) for row in self.p))
        object.__setattr__(self, "c", tuple(_rational_row(row) for row in self.c))
        n, m = len(self.p), len(self.r)
        if n < 1 or m < 1:
            raise InvalidInstanceError("need at least one agent and one task")
        if len(self.c) != n or any(len(row) != m for row in self.p) or any(
            len(row) != m for row in self.c
        ):
            raise InvalidInstanceError("p and c must be n x m, r length m")
        for vec in (self.r, *self.p, *self.c):
            for x in vec:
                if not (0 <= x <= 1):
                    raise InvalidInstanceError(f"entry {x} outside [0, 1]")
        for j in range(m):
            if all(self.p[i][j] * self.r[j] - self.c[i][j] < 0 for i in range(n)):
                raise NoViableAgentError(j)

    @property
    def n(self) -> int:
        return len(self.p)

    @property
    def m(self) -> int:
        return len(self.r)

    def welfare(self, i: int, j: int) -> Fraction:
        """p*r - c for the pair: the surplus the pair can generate."""
        return self.p[i][j] * self.r[j] - self.c[i][j]

    def viable_agents(self, j: int) -> list[int]:
        """Agents with nonnegative welfare on task j (nonempty by construction)."""
        return [i for i in range(self.n) if self.welfare(i, j) >= 0]


def minimum_wage(inst: Instance, i: int, j: int) -> Fraction | float:
    """Smallest alpha making task j individually rational for agent i.

    c/(p*r) when p*r > 0; 0 when the cost is already 0; otherwise the
    INF_WAGE sentinel (the agent can never be incentivized).
    """
    pr = inst.p[i][j] * inst.r[j]
    if inst.c[i][j] == 0:
        return ZERO
    if pr > 0:
        return inst.c[i][j] / pr
    return INF_WAGE


@dataclass(frozen=True)
class Allocation:
    """Full allocation: task j is assigned to agent assignment[j]."""

    assignment: tuple[int, ...]
    n_agents: int

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(a) for a in self.assignment))
        if self.n_agents < 1:
            raise InvalidInstanceError("n_agents must be positive")
        for j, a in enumerate(self.assignment):
            if not (0 <= a < self.n_agents):
                raise InvalidInstanceError(f"task {j} assigned to invalid agent {a}")

    @property
    def m(self) -> int:
        return len(self.assignment)

    def bundles(self) -> list[list[int]]:
        """Tasks per agent (the sets S_i)."""
        out: list[list[int]] = [[] for _ in range(self.n_agents)]
        for j, a in enumerate(self.assignment):
            out[a].append(j)
        return out


@dataclass(frozen=True)
class Contract:
    """An allocation plus a per-task linear contract, optionally subsidies."""

    allocation: Allocation
    alpha: tuple[Fraction, ...]
    subsidies: Optional[tuple[Fraction, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", _rational_row(self.alpha))
        if len(self.alpha) != self.allocation.m:
            raise DimensionMismatchError("alpha length must equal task count")
        for j, a in enumerate(self.alpha):
            if not (0 <= a <= 1):
                raise InvalidInstanceError(f"alpha[{j}]={a} outside [0, 1]")
        if self.subsidies is not None:
            subs = _rational_row(self.subsidies)
            object.__setattr__(self, "subsidies", subs)
            if len(subs) != self.allocation.n_agents:
                raise DimensionMismatchError("subsidies length must equal agent count")
            if any(s < 0 for s in subs):
                raise InvalidInstanceError("subsidies must be nonnegative")

    @property
    def assignment(self) -> tuple[int, ...]:
        return self.allocation.assignment


@dataclass(frozen=True)
class FairnessReport:
    """Verification results with slack values; slacks >= -tolerance pass."""

    tolerance: Fraction
    epsilon: Fraction = ZERO
    ir_ok: bool = True
    ir_slacks: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)
    ef_ok: Optional[bool] = None
    ef_slacks: Optional[tuple[tuple[Fraction, ...], ...]] = None
    eps_ef_ok: Optional[bool] = None
    ef1_ok: Optional[bool] = None
    ef1_witnesses: Optional[Mapping[tuple[int, int], Optional[int]]] = None
    efs_ok: Optional[bool] = None
    lhs_form: str = "simplified"


@dataclass(frozen=True)
class SolveResult:
    """A contract with its exact revenue and solver metadata."""

    contract: Contract
    revenue: Fraction
    method: str
    meta: dict = field(default_factory=dict)


def _check_dims(inst: Instance, k: Contract) -> None:
    if k.allocation.m != inst.m or k.allocation.n_agents != inst.n:
        raise DimensionMismatchError(
            f"contract is {k.allocation.n_agents}x{k.allocation.m}, "
            f"instance is {inst.n}x{inst.m}"
        )


def agent_task_utility(inst: Instance, i: int, j: int, alpha: Num) -> Fraction:
    """alpha * p[i][j] * r[j] - c[i][j]; may be negative, callers clamp."""
    if not (0 <= i < inst.n and 0 <= j < inst.m):
        raise IndexError(f"agent {i} / task {j} out of range")
    a = as_fraction(alpha)
    if not (0 <= a <= 1):
        raise InvalidInstanceError(f"alpha={a} outside [0, 1]")
    return a * inst.p[i][j] * inst.r[j] - inst.c[i][j]


def revenue(inst: Instance, k: Contract) -> Fraction:
    """Expected principal revenue sum (1-alpha_j) p r, net of subsidies."""
    _check_dims(inst, k)
    total = ZERO
    for j, i in enumerate(k.assignment):
        total += (1 - k.alpha[j]) * inst.p[i][j] * inst.r[j]
    if k.subsidies is not None:
        total -= sum(k.subsidies, ZERO)
    return total


def verify_ir(inst: Instance, k: Contract, tol: Num = 0) -> tuple[bool, dict[tuple[int, int], Fraction]]:
    """Check alpha_j p r - c >= 0 for every assigned pair; returns slacks."""
    _check_dims(inst, k)
    tol = as_fraction(tol)
    slacks: dict[tuple[int, int], Fraction] = {}
    ok = True
    for j, i in enumerate(k.assignment):
        s = agent_task_utility(inst, i, j, k.alpha[j])
        slacks[(i, j)] = s
        if s < -tol:
            ok = False
    return ok, slacks


def _bundle_utilities(inst: Instance, k: Contract, clamp_lhs: bool):
    """Own-bundle utility per agent and clamped switch utility matrix.

    own[i]  = sum over S_i of (alpha p r - c), clamped per task when
              clamp_lhs (the general envy form, used when IR fails).
    switch[i][j] = sum over S_j of max(alpha p r - c, 0).
    """
    n = inst.n
    bundles = k.allocation.bundles()
    own = [ZERO] * n
    switch = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = ZERO
            for task in bundles[j]:
                u = agent_task_utility(inst, i, task, k.alpha[task])
                if i == j and not clamp_lhs:
                    acc += u
                else:
                    acc += max(u, ZERO)
            if i == j:
                own[i] = acc
            switch[i][j] = acc if i != j else ZERO
    return own, switch


def verify_ef(
    inst: Instance, k: Contract, tol: Num = 0
) -> tuple[bool, tuple[tuple[Fraction, ...], ...]]:
    """Envy-freeness: every agent prefers its own bundle to any other's.

    Under IR the left side is the plain sum alpha p r - c over the own
    bundle; if IR fails the general clamped form is used instead (the
    report from fairness_report records which).  Returns (ok, slack
    matrix) with slack[i][j] = LHS_i - RHS_{i->j} and slack[i][i] = 0.
    """
    ok, _, slacks = _ef_slack_matrix(inst, k, as_fraction(tol), eps=ZERO)
    return ok, slacks


def _ef_slack_matrix(inst: Instance, k: Contract, tol: Fraction, eps: Fraction):
    _check_dims(inst, k)
    ir_ok, _ = verify_ir(inst, k, tol)
    own, switch = _bundle_utilities(inst, k, clamp_lhs=not ir_ok)
    n = inst.n
    ok = True
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                row.append(ZERO)
                continue
            slack = own[i] - switch[i][j]
            row.append(slack)
            if slack < -eps - tol:
                ok = False
        rows.append(tuple(row))
    form = "simplified" if ir_ok else "clamped"
    return ok, form, tuple(rows)


def verify_eps_ef(inst: Instance, k: Contract, eps: Num, tol: Num = 0) -> bool:
    """Envy-freeness with the right side relaxed by eps >= 0."""
    eps = as_fraction(eps)
    if eps < 0:
        raise InvalidInstanceError("eps must be nonnegative")
    ok, _, _ = _ef_slack_matrix(inst, k, as_fraction(tol), eps)
    return ok


def verify_ef1(
    inst: Instance, k: Contract, tol: Num = 0
) -> tuple[bool, dict[tuple[int, int], Optional[int]]]:
    """Envy-free up to one task: for each pair, dropping the single most
    attractive task of the envied bundle must remove the envy.

    Empty envied bundles are vacuously fine (witness None).  Witnesses are
    the dropped tasks, always members of the envied bundle.
    """
    _check_dims(inst, k)
    tol = as_fraction(tol)
    ir_ok, _ = verify_ir(inst, k, tol)
    own, switch = _bundle_utilities(inst, k, clamp_lhs=not ir_ok)
    bundles = k.allocation.bundles()
    witnesses: dict[tuple[int, int], Optional[int]] = {}
    ok = True
    for i in range(inst.n):
        for j in range(inst.n):
            if i == j:
                continue
            if not bundles[j]:
                witnesses[(i, j)] = None
                continue
            best_task = bundles[j][0]
            best_gain = ZERO
            for task in bundles[j]:
                gain = max(agent_task_utility(inst, i, task, k.alpha[task]), ZERO)
                if gain > best_gain:
                    best_gain, best_task = gain, task
            witnesses[(i, j)] = best_task
            if own[i] < switch[i][j] - best_gain - tol:
                ok = False
    return ok, witnesses


def verify_efs(inst: Instance, k: Contract, tol: Num = 0) -> bool:
    """Envy-freeness with per-agent subsidies added to both sides."""
    _check_dims(inst, k)
    if k.subsidies is None:
        raise InvalidInstanceError("contract has no subsidies; EFS needs them")
    tol = as_fraction(tol)
    ir_ok, _ = verify_ir(inst, k, tol)
    own, switch = _bundle_utilities(inst, k, clamp_lhs=not ir_ok)
    s = k.subsidies
    for i in range(inst.n):
        for j in range(inst.n):
            if i == j:
                continue
            if own[i] + s[i] < switch[i][j] + s[j] - tol:
                return False
    return True


def fairness_report(inst: Instance, k: Contract, eps: Num = 0, tol: Num = 0) -> FairnessReport:
    """Run all applicable verifiers and collect slacks into one report."""
    tol = as_fraction(tol)
    eps = as_fraction(eps)
    ir_ok, ir_slacks = verify_ir(inst, k, tol)
    ef_ok, form, slacks = _ef_slack_matrix(inst, k, tol, ZERO)
    eps_ok = verify_eps_ef(inst, k, eps, tol) if eps > 0 else ef_ok
    ef1_ok, witnesses = verify_ef1(inst, k, tol)
    efs_ok = verify_efs(inst, k, tol) if k.subsidies is not None else None
    return FairnessReport(
        tolerance=tol,
        epsilon=eps,
        ir_ok=ir_ok,
        ir_slacks=ir_slacks,
        ef_ok=ef_ok,
        ef_slacks=slacks,
        eps_ef_ok=eps_ok,
        ef1_ok=ef1_ok,
        ef1_witnesses=witnesses,
        efs_ok=efs_ok,
        lhs_form=form,
    )


def greedy_ef(inst: Instance) -> Contract:
    """Always-feasible envy-free contract: give each task to the agent with
    the smallest incentive wage c/(p r) among nonnegative-welfare agents and
    pay exactly that wage.

    Every agent then earns exactly zero from any bundle, so the contract is
    envy-free with all slacks zero, and IR holds with equality.
    """
    assignment = []
    alphas = []
    for j in range(inst.m):
        best_i, best_w = None, None
        for i in inst.viable_agents(j):
            w = minimum_wage(inst, i, j)
            if best_w is None or w < best_w:
                best_i, best_w = i, w
        assignment.append(best_i)
        # p*r = 0 inside the viable set forces c = 0; alpha 0 maximizes revenue.
        alphas.append(ZERO if inst.p[best_i][j] * inst.r[j] == 0 else as_fraction(best_w))
    alloc = Allocation(tuple(assignment), inst.n)
    return Contract(alloc, tuple(alphas))


def unconstrained_opt(inst: Instance) -> Fraction:
    """Best revenue with no fairness constraints: each task goes to the
    welfare-maximizing agent at the IR-binding contract."""
    total = ZERO
    for j in range(inst.m):
        best = max(inst.welfare(i, j) for i in range(inst.n))
        if best > 0:
            total += best
    return total
