"""Construction of the zero-forcing code for one (assignment, cost) point.

The master recovers the stacked coefficient matrix [task; virtual demand]
applied to the message pieces. Worker n transmits its p rows of
selector_n @ F @ W, so two things must hold:

  encodability: selector_n @ F vanishes on every piece column the worker
                does not hold (it can only combine what it stores);
  decodability: the pN x pN stack of all selectors is invertible, so the
                master can undo it and read off the task rows.

Workers inside the bottleneck union get i.i.d. random selectors and the
virtual-demand rows of F are solved column by column to zero them out;
workers outside it take their selector rows from the left null space of the
relevant F columns, which the structure guarantees is wide enough. Failures
(singular intermediate systems, a rank-deficient stack) have probability
O(poly/modulus); the whole attempt is rerolled from a derived seed, and the
retry cap is a safety net rather than a tuning knob.

certificate_realization builds the deterministic identity/MDS variant whose
stack is exactly a (block-)identity: its existence certifies that the
randomized construction's determinant polynomial is not identically zero, so
random draws succeed with high probability on this instance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .assignment import Assignment, Cost
from .linalg import (
    Matrix,
    SingularMatrixError,
    block_diag,
    cauchy_mds,
    invert,
    left_null_space,
    matmul,
    random_matrix,
    rank,
    solve,
    vstack,
)
from .prime_field import FieldSpec, make_rng
from .structure import analyze, hall_transversal

logger = logging.getLogger(__name__)

DEFAULT_MAX_RETRIES = 16

# rng spawn-key domains, so build and certificate never share streams
_DOM_BUILD = 1
_DOM_CERT = 2


class ConstructionError(RuntimeError):
    """All retry attempts failed; carries the last failing stage."""

    def __init__(self, stage: str, seed: int, attempts: int):
        super().__init__(
            f"construction failed at stage {stage!r} after {attempts} attempts "
            f"(seed {seed}); the field may be too small for this instance"
        )
        self.stage = stage
        self.seed = seed
        self.attempts = attempts


class HallInfeasibleError(RuntimeError):
    """No system of distinct representatives for a worker's constraint
    columns. This contradicts the structural feasibility argument, so it is
    surfaced with its witness instead of being retried."""

    def __init__(self, worker: int, deficient_columns: tuple[int, ...]):
        super().__init__(
            f"worker {worker}: piece columns {sorted(deficient_columns)} have "
            "fewer available rows than columns"
        )
        self.worker = worker
        self.deficient_columns = deficient_columns


class SingularSystemError(ValueError):
    """A column-solving submatrix was singular (retriable by reroll)."""


class _Retry(Exception):
    def __init__(self, stage: str):
        self.stage = stage


def column_solver(
    s_prime: Matrix,
    fixed_rows: Sequence[int],
    fixed_values: Sequence[int],
    var_rows: Sequence[int],
) -> list[int]:
    """Values on var_rows making s_prime @ column = 0, where the column is
    already pinned to fixed_values on fixed_rows.

    s_prime must have exactly len(var_rows) rows so the system is square;
    the unique solution exists iff s_prime restricted to var_rows is
    nonsingular (otherwise the caller rerolls).
    """
    if len(fixed_rows) != len(fixed_values):
        raise ValueError("fixed_rows and fixed_values length mismatch")
    if not var_rows:
        return []
    if s_prime.rows != len(var_rows):
        raise ValueError(
            f"system is not square: {s_prime.rows} constraints, {len(var_rows)} unknowns"
        )
    fld = s_prime.field
    # rhs = -(s_prime restricted to fixed rows) @ fixed column part
    m = fld.modulus
    rhs_vals = []
    for r in range(s_prime.rows):
        acc = 0
        for row_idx, val in zip(fixed_rows, fixed_values):
            acc += s_prime[r, row_idx] * val
        rhs_vals.append([fld.neg(acc % m)])
    sub = s_prime.take_columns(var_rows)
    try:
        x = solve(sub, Matrix(fld, rhs_vals, cols=1))
    except SingularMatrixError as exc:
        raise SingularSystemError(str(exc)) from None
    return [x[i, 0] for i in range(len(var_rows))]


@dataclass(frozen=True)
class Scheme:
    """A constructed code: coefficients, per-worker selectors/encoders and
    the master's decoder, plus everything needed to replay the build."""

    assignment: Assignment
    cost: Cost
    field: FieldSpec
    task_rows: int                 # row count of the task coefficient block
    task_coeffs: Matrix            # task_rows x qK, the drawn task
    virtual_coeffs: Matrix         # (pN - task_rows) x qK virtual demand
    selectors: tuple[Matrix, ...]  # per worker, p x pN
    encoders: tuple[Matrix, ...]   # per worker, selector @ F, p x qK
    decoder: Matrix                # first task_rows rows of the stack inverse
    stack_inverse: Matrix          # full pN x pN inverse, used by recovery
    seed: int
    retries_used: int

    @property
    def full_coeffs(self) -> Matrix:
        return vstack(self.task_coeffs, self.virtual_coeffs)

    @property
    def selector_stack(self) -> Matrix:
        return vstack(*self.selectors)

    def to_json(self, include_matrices: bool = True) -> dict:
        n, k = self.assignment.n_workers, self.assignment.n_datasets
        out = {
            "modulus": str(self.field.modulus),
            "seed": self.seed,
            "cost": {"p": self.cost.p, "q": self.cost.q},
            "n_workers": n,
            "n_datasets": k,
            "task_rows": self.task_rows,
            "retries_used": self.retries_used,
            "assignment_sha256": self.assignment.sha256(),
        }
        if include_matrices:
            out["matrices"] = {
                "task_coeffs": self.task_coeffs.to_json_rows(),
                "virtual_coeffs": self.virtual_coeffs.to_json_rows(),
                "selectors": [s.to_json_rows() for s in self.selectors],
                "encoders": [e.to_json_rows() for e in self.encoders],
                "decoder": self.decoder.to_json_rows(),
            }
        return out


def build(
    assignment: Assignment,
    cost: Cost,
    seed: int,
    field: FieldSpec | None = None,
    max_retries: int = DEFAULT_MAX_RETRIES,
) -> Scheme:
    """Randomized construction; deterministic for a fixed
    (assignment, cost, seed, modulus)."""
    fld = field or FieldSpec()
    cost.validate_for(assignment)
    report = analyze(assignment, cost)
    g_prime = report.bottleneck_workers
    t = report.max_column_zeros
    task_rows = report.achievable_pieces
    last_stage = "start"
    for attempt in range(max_retries + 1):
        rng = make_rng(seed, _DOM_BUILD, attempt)
        try:
            scheme = _build_attempt(
                assignment, cost, fld, rng, g_prime, t, task_rows, seed, attempt
            )
        except _Retry as r:
            last_stage = r.stage
            logger.warning(
                "build retry %d (stage %s) for seed %d", attempt + 1, r.stage, seed
            )
            continue
        return scheme
    raise ConstructionError(last_stage, seed, max_retries + 1)


def _build_attempt(a, cost, fld, rng, g_prime, t, task_rows, seed, attempt) -> Scheme:
    n, kk = a.n_workers, a.n_datasets
    p, q = cost.p, cost.q
    pn, qk = p * n, q * kk

    task = random_matrix(fld, task_rows, qk, rng)
    sel: dict[int, Matrix] = {}
    for w in sorted(g_prime):
        sel[w] = random_matrix(fld, p, pn, rng)

    # rows between the task block and the solved tail exist only when the
    # task dimension is capped by qK; they are plain i.i.d. virtual demand
    mid = random_matrix(fld, p * (n - t) - task_rows, qk, rng)
    head_rows = task.to_rows() + mid.to_rows()

    tail = [[0] * qk for _ in range(p * t)]
    tail_start = p * (n - t)
    for j in range(qk):
        k = (j % kk) + 1
        constrainers = sorted(a.non_holders(k) & g_prime)
        m = len(constrainers)
        var_local = _sample_subset(rng, p * t, p * m)
        var_set = set(var_local)
        fixed_local = [r for r in range(p * t) if r not in var_set]
        fixed_tail_vals = fld.sample_many(rng, len(fixed_local))
        for r, v in zip(fixed_local, fixed_tail_vals):
            tail[r][j] = v
        if m == 0:
            continue
        s_prime = vstack(*(sel[w] for w in constrainers))
        fixed_rows = list(range(tail_start)) + [tail_start + r for r in fixed_local]
        fixed_vals = [head_rows[r][j] for r in range(tail_start)] + fixed_tail_vals
        var_rows = [tail_start + r for r in var_local]
        try:
            solved = column_solver(s_prime, fixed_rows, fixed_vals, var_rows)
        except SingularSystemError:
            raise _Retry("column solve")
        for r, v in zip(var_local, solved):
            tail[r][j] = v

    virtual = vstack(mid, Matrix(fld, tail, cols=qk))
    coeffs = vstack(task, virtual)

    for w in range(1, n + 1):
        if w in g_prime:
            continue
        cols = sorted(piece - 1 for piece in a.unassigned_pieces(w, q))
        basis = left_null_space(coeffs.take_columns(cols))
        if basis.rows < p:
            raise _Retry("null-space dimension")
        candidate = matmul(random_matrix(fld, p, basis.rows, rng), basis)
        if rank(candidate) < p:
            raise _Retry("selector rank")
        sel[w] = candidate

    selectors = tuple(sel[w] for w in range(1, n + 1))
    stack = vstack(*selectors)
    try:
        stack_inv = invert(stack)
    except SingularMatrixError:
        raise _Retry("selector stack rank")
    decoder = stack_inv.take_rows(range(task_rows))
    encoders = tuple(matmul(s, coeffs) for s in selectors)
    return Scheme(
        assignment=a,
        cost=cost,
        field=fld,
        task_rows=task_rows,
        task_coeffs=task,
        virtual_coeffs=virtual,
        selectors=selectors,
        encoders=encoders,
        decoder=decoder,
        stack_inverse=stack_inv,
        seed=seed,
        retries_used=attempt,
    )


@dataclass(frozen=True)
class EncodabilityReport:
    violations: tuple[tuple[int, int], ...]   # (worker, 1-based piece column)
    checked_columns: int

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "checked_columns": self.checked_columns,
            "violations": [list(v) for v in self.violations],
        }


def verify_encodability(scheme: Scheme) -> EncodabilityReport:
    """Every worker's encoder must be zero on every piece column it does not
    hold; any nonzero cell is reported as (worker, piece column)."""
    a, q = scheme.assignment, scheme.cost.q
    violations = []
    checked = 0
    for w in range(1, a.n_workers + 1):
        enc = scheme.encoders[w - 1]
        for piece in sorted(a.unassigned_pieces(w, q)):
            checked += 1
            if any(enc[i, piece - 1] for i in range(enc.rows)):
                violations.append((w, piece))
    return EncodabilityReport(tuple(violations), checked)


@dataclass(frozen=True)
class DecodabilityReport:
    stack_rank: int
    required_rank: int
    recovers_task: bool

    @property
    def ok(self) -> bool:
        return self.stack_rank == self.required_rank and self.recovers_task

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "stack_rank": self.stack_rank,
            "required_rank": self.required_rank,
            "recovers_task": self.recovers_task,
        }


def verify_decodability(scheme: Scheme) -> DecodabilityReport:
    """The selector stack must have full rank pN and the decoder composed
    with it must reproduce the task rows exactly."""
    stack = scheme.selector_stack
    required = scheme.cost.p * scheme.assignment.n_workers
    got = rank(stack)
    recovered = matmul(matmul(scheme.decoder, stack), scheme.full_coeffs)
    return DecodabilityReport(got, required, recovered == scheme.task_coeffs)


@dataclass(frozen=True)
class CertificateWitness:
    """Deterministic realization whose selector stack is exactly the identity
    (bottleneck union size == max column zeros) or blockdiag(I, MDS)."""

    assignment: Assignment
    cost: Cost
    field: FieldSpec
    seed: int
    case: str                        # "identity" or "mds"
    worker_order: tuple[int, ...]    # non-bottleneck workers first
    selectors: tuple[Matrix, ...]    # per worker (worker order 1..N)
    coeffs: Matrix
    ordered_stack: Matrix            # selectors stacked in worker_order
    stack_rank: int
    transversals: dict[int, tuple[int, ...]]
    mds: Matrix | None
    retries_used: int

    def to_json(self, include_matrices: bool = True) -> dict:
        out = {
            "modulus": str(self.field.modulus),
            "seed": self.seed,
            "cost": {"p": self.cost.p, "q": self.cost.q},
            "case": self.case,
            "worker_order": list(self.worker_order),
            "stack_rank": self.stack_rank,
            "full_rank": self.stack_rank == self.ordered_stack.rows,
            "identity_stack": self.ordered_stack
            == Matrix.identity(self.field, self.ordered_stack.rows),
            "transversals": {str(w): list(rows) for w, rows in self.transversals.items()},
            "retries_used": self.retries_used,
            "assignment_sha256": self.assignment.sha256(),
        }
        if include_matrices:
            out["matrices"] = {
                "coeffs": self.coeffs.to_json_rows(),
                "selectors": [s.to_json_rows() for s in self.selectors],
                "ordered_stack": self.ordered_stack.to_json_rows(),
            }
        return out


def certificate_realization(
    assignment: Assignment,
    cost: Cost,
    seed: int = 0,
    field: FieldSpec | None = None,
    max_retries: int = DEFAULT_MAX_RETRIES,
) -> CertificateWitness:
    fld = field or FieldSpec()
    cost.validate_for(assignment)
    report = analyze(assignment, cost)
    g_prime = sorted(report.bottleneck_workers)
    rest = [w for w in range(1, assignment.n_workers + 1) if w not in report.bottleneck_workers]
    t = report.max_column_zeros
    last_stage = "start"
    for attempt in range(max_retries + 1):
        rng = make_rng(seed, _DOM_CERT, attempt)
        try:
            return _certificate_attempt(
                assignment, cost, fld, rng, g_prime, rest, t, seed, attempt
            )
        except _Retry as r:
            last_stage = r.stage
            logger.warning(
                "certificate retry %d (stage %s) for seed %d", attempt + 1, r.stage, seed
            )
            continue
    raise ConstructionError(last_stage, seed, max_retries + 1)


def _certificate_attempt(a, cost, fld, rng, g_prime, rest, t, seed, attempt):
    n, kk = a.n_workers, a.n_datasets
    p, q = cost.p, cost.q
    pn, qk = p * n, q * kk
    sigma = rest + g_prime
    gsz = len(g_prime)
    top_rows = p * (n - gsz)

    # stacked assignment pattern in sigma order, each worker row repeated p
    # times across the q piece blocks; stars are fresh i.i.d. draws
    pattern_free = []   # True where the cell is a free draw (structurally nonzero)
    pattern_rows = []
    for w in sigma:
        base = [a.assigned(w, (j % kk) + 1) for j in range(qk)]
        for _ in range(p):
            pattern_free.append(base)
            pattern_rows.append([fld.sample(rng) if f else 0 for f in base])
    pattern = Matrix(fld, pattern_rows, cols=qk)

    if gsz == t:
        case = "identity"
        mds = None
        coeffs = pattern
    else:
        case = "mds"
        mds = cauchy_mds(fld, p * gsz, p * gsz, rng)
        mixer = block_diag(Matrix.identity(fld, top_rows), invert(mds))
        coeffs = matmul(mixer, pattern)

    sel: dict[int, Matrix] = {}
    for i, w in enumerate(g_prime):
        if case == "identity":
            rows = [[0] * pn for _ in range(p)]
            for r in range(p):
                rows[r][top_rows + p * i + r] = 1
            sel[w] = Matrix(fld, rows, cols=pn)
        else:
            rows = [
                [0] * top_rows + list(mds.row(p * i + r)) for r in range(p)
            ]
            sel[w] = Matrix(fld, rows, cols=pn)

    # column j of coeffs is structurally zero iff no contributing pattern row
    # is free there; in the mds case the bottom rows are mixed together, so a
    # bottom cell is only guaranteed zero when every bottleneck worker misses
    # the dataset
    def guaranteed_zero(r: int, j: int) -> bool:
        if case == "identity" or r < top_rows:
            return not pattern_free[r][j]
        return not any(pattern_free[rr][j] for rr in range(top_rows, pn))

    transversals: dict[int, tuple[int, ...]] = {}
    for i, w in enumerate(rest):
        own = list(range(p * i, p * (i + 1)))
        cols = sorted(piece - 1 for piece in a.unassigned_pieces(w, q))
        rows = [[0] * pn for _ in range(p)]
        for r in range(p):
            rows[r][own[r]] = 1
        if cols:
            table = [[guaranteed_zero(r, j) for j in cols] for r in range(pn)]
            tr = hall_transversal(table)
            if not tr.found:
                raise HallInfeasibleError(
                    w, tuple(cols[pos - 1] + 1 for pos in tr.deficient_columns)
                )
            picked = [r - 1 for r in tr.rows]
            sub = coeffs.take_rows(picked).take_columns(cols)
            rhs = -coeffs.take_rows(own).take_columns(cols)
            try:
                x = solve(sub.transpose(), rhs.transpose()).transpose()
            except SingularMatrixError:
                raise _Retry("transversal submatrix rank")
            # transversal rows never touch the worker's own identity block:
            # its own pattern rows are zero on all constraint columns
            for r in range(p):
                for c_idx, row_idx in enumerate(picked):
                    rows[r][row_idx] = x[r, c_idx]
            transversals[w] = tr.rows
        else:
            transversals[w] = ()
        sel[w] = Matrix(fld, rows, cols=pn)

    ordered = vstack(*(sel[w] for w in sigma)) if sigma else Matrix.zeros(fld, 0, 0)
    got_rank = rank(ordered)
    if got_rank != pn:
        raise _Retry("certificate stack rank")
    for w in range(1, n + 1):
        enc = matmul(sel[w], coeffs)
        for piece in a.unassigned_pieces(w, q):
            if any(enc[r, piece - 1] for r in range(p)):
                raise _Retry("certificate encodability")
    return CertificateWitness(
        assignment=a,
        cost=cost,
        field=fld,
        seed=seed,
        case=case,
        worker_order=tuple(sigma),
        selectors=tuple(sel[w] for w in range(1, n + 1)),
        coeffs=coeffs,
        ordered_stack=ordered,
        stack_rank=got_rank,
        transversals=transversals,
        mds=mds,
        retries_used=attempt,
    )


def _sample_subset(rng: np.random.Generator, size: int, take: int) -> list[int]:
    """Uniform k-subset of range(size) via partial Fisher-Yates on the
    caller's stream (stable across platforms); returned ascending."""
    pool = list(range(size))
    for i in range(take):
        j = i + int(rng.integers(0, size - i, dtype=np.int64))
        pool[i], pool[j] = pool[j], pool[i]
    return sorted(pool[:take])
