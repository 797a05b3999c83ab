"""End-to-end simulation of the computing and decoding phases.

Messages are split into q equal pieces, every worker emits its p coded rows,
and the master inverts the selector stack to read the task rows back. Over a
finite field recovery is symbol-exact, so the pass criterion is equality, not
tolerance. The comparison target is the task coefficients applied to the
pieces by a straight multiply, independent of the scheme's decode path.

The simulator is in-process: the model has no channel behavior beyond load
counting, so function calls stand in for the uplink.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .assignment import Assignment, Cost
from .linalg import Matrix, matmul, vstack
from .prime_field import FieldSpec, make_rng
from .scheme import Scheme, build

_DOM_MESSAGES = 3
_DOM_TRIALS = 4


class ProtocolError(RuntimeError):
    """Responses missing or dimensionally inconsistent with the scheme."""


@dataclass(frozen=True)
class MessageSet:
    """K messages of `length` symbols each, plus the piece view used by the
    fractional path: piece i of message k sits at piece-row (i-1)*K + k.

    If length is not divisible by q, messages are zero-padded up to the next
    multiple; `length` stays the logical length.
    """

    field: FieldSpec
    n_messages: int
    length: int
    symbols: tuple[tuple[int, ...], ...]

    def padded_length(self, q: int) -> int:
        return -(-self.length // q) * q

    def pieces(self, q: int) -> Matrix:
        """qK x (padded length / q) matrix of message pieces."""
        lp = self.padded_length(q)
        seg = lp // q
        rows = []
        for i in range(q):
            for sym in self.symbols:
                padded = list(sym) + [0] * (lp - len(sym))
                rows.append(padded[i * seg:(i + 1) * seg])
        return Matrix(self.field, rows, cols=seg)

    def flat(self) -> Matrix:
        return Matrix(self.field, [list(s) for s in self.symbols], cols=self.length)


def generate_messages(
    field: FieldSpec, n_messages: int, length: int, rng
) -> MessageSet:
    if length < 1:
        raise ValueError("message length must be >= 1")
    rows = tuple(
        tuple(field.sample_many(rng, length)) for _ in range(n_messages)
    )
    return MessageSet(field, n_messages, length, rows)


def worker_encode(scheme: Scheme, n: int, messages: MessageSet) -> Matrix:
    """X_n = encoder_n applied to the pieces the worker actually holds.

    Unassigned piece rows are zeroed before the multiply, so a defective
    encoder with leakage onto unassigned columns would change the output
    rather than silently reading data the worker does not store.
    """
    a = scheme.assignment
    if messages.n_messages != a.n_datasets:
        raise ValueError(
            f"message set has {messages.n_messages} messages, assignment expects {a.n_datasets}"
        )
    q = scheme.cost.q
    pieces = messages.pieces(q)
    masked = pieces.to_rows()
    for piece in a.unassigned_pieces(n, q):
        masked[piece - 1] = [0] * pieces.cols
    return matmul(scheme.encoders[n - 1], Matrix(scheme.field, masked, cols=pieces.cols))


def master_decode(scheme: Scheme, responses: list[Matrix]) -> Matrix:
    """Recover the task rows from all N worker responses."""
    n = scheme.assignment.n_workers
    if len(responses) != n:
        raise ProtocolError(f"expected {n} responses, got {len(responses)}")
    p = scheme.cost.p
    for i, x in enumerate(responses, start=1):
        if x.rows != p:
            raise ProtocolError(f"worker {i} sent {x.rows} rows, expected {p}")
    received = vstack(*responses)
    return matmul(scheme.decoder, received)


@dataclass(frozen=True)
class SimulationResult:
    success: bool
    per_worker_symbols: tuple[int, ...]
    max_load_symbols: int
    mismatch_positions: tuple[tuple[int, int], ...]
    elapsed_s: float
    seed: int
    retries_used: int
    task_rows: int

    def to_json(self) -> dict:
        return {
            "success": self.success,
            "per_worker_symbols": list(self.per_worker_symbols),
            "max_load_symbols": self.max_load_symbols,
            "mismatch_positions": [list(m) for m in self.mismatch_positions],
            "elapsed_s": self.elapsed_s,
            "seed": self.seed,
            "retries_used": self.retries_used,
            "task_rows": self.task_rows,
        }


def run_trial(
    assignment: Assignment,
    cost: Cost,
    length: int,
    seed: int,
    field: FieldSpec | None = None,
    scheme: Scheme | None = None,
) -> SimulationResult:
    """Build (or reuse) a scheme, push one random message set through it and
    compare the recovery symbol-for-symbol against the direct product."""
    fld = field or FieldSpec()
    start = time.perf_counter()
    sch = scheme if scheme is not None else build(assignment, cost, seed, fld)
    msg_rng = make_rng(seed, _DOM_MESSAGES)
    messages = generate_messages(fld, assignment.n_datasets, length, msg_rng)
    responses = [
        worker_encode(sch, n, messages) for n in range(1, assignment.n_workers + 1)
    ]
    recovered = master_decode(sch, responses)
    expected = matmul(sch.task_coeffs, messages.pieces(cost.q))
    mismatches = tuple(
        (i + 1, j + 1)
        for i in range(expected.rows)
        for j in range(expected.cols)
        if recovered[i, j] != expected[i, j]
    )
    loads = tuple(x.rows * x.cols for x in responses)
    return SimulationResult(
        success=not mismatches,
        per_worker_symbols=loads,
        max_load_symbols=max(loads),
        mismatch_positions=mismatches,
        elapsed_s=time.perf_counter() - start,
        seed=seed,
        retries_used=sch.retries_used,
        task_rows=sch.task_rows,
    )


@dataclass(frozen=True)
class MonteCarloResult:
    trials: int
    failures: int
    failed_seeds: tuple[int, ...]
    total_retries: int
    max_load_symbols: int
    elapsed_s: float
    seed: int

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def summary(self) -> str:
        return (
            f"{self.trials - self.failures}/{self.trials} exact recoveries, "
            f"{self.total_retries} build retries, max load {self.max_load_symbols} "
            f"symbols/worker, {self.elapsed_s:.3f} s"
        )

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "failures": self.failures,
            "failed_seeds": list(self.failed_seeds),
            "total_retries": self.total_retries,
            "max_load_symbols": self.max_load_symbols,
            "elapsed_s": self.elapsed_s,
            "seed": self.seed,
        }


def run_monte_carlo(
    assignment: Assignment,
    cost: Cost,
    length: int,
    trials: int,
    seed: int,
    field: FieldSpec | None = None,
) -> MonteCarloResult:
    """Independent trials under per-trial derived seeds; the expected failure
    count at the default modulus is zero."""
    if trials < 1:
        raise ValueError("need at least one trial")
    fld = field or FieldSpec()
    start = time.perf_counter()
    failures = 0
    failed = []
    retries = 0
    max_load = 0
    for i in range(trials):
        trial_seed = _trial_seed(seed, i)
        res = run_trial(assignment, cost, length, trial_seed, fld)
        retries += res.retries_used
        max_load = max(max_load, res.max_load_symbols)
        if not res.success:
            failures += 1
            failed.append(trial_seed)
    return MonteCarloResult(
        trials=trials,
        failures=failures,
        failed_seeds=tuple(failed),
        total_retries=retries,
        max_load_symbols=max_load,
        elapsed_s=time.perf_counter() - start,
        seed=seed,
    )


def _trial_seed(seed: int, index: int) -> int:
    rng = make_rng(seed, _DOM_TRIALS, index)
    return int(rng.integers(0, 2**62))
