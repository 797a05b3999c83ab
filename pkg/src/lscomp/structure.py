"""Combinatorial structure of an assignment under a fixed communication cost.

The recoverability bottlenecks of an assignment are its all-zero submatrices
(worker set G, dataset set Q) for which the workers outside G cannot carry
enough symbols to cover Q: with cost p/q the qualifying condition is
p*|G| + q*|Q| > p*N, evaluated with exact integers. From the family of such
pairs come the converse and achievable computable dimensions, the optimality
certificate, and the repetition baseline.

Only inclusion-maximal dataset sets are enumerated: any qualifying (G, Q) has
Q inside the full common-zero column set of G, and enlarging Q preserves the
inequality, so G belongs to some qualifying pair iff it qualifies with its
maximal Q. A literal all-pairs oracle (brute_force_bottlenecks) exists to
check exactly that shortcut.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .assignment import Assignment, Cost

ENUMERATION_CAP = 24      # 2^N subset walk beyond this is refused
BRUTE_FORCE_CAP = 12


class EnumerationLimitError(ValueError):
    pass


def common_zero_columns(a: Assignment, workers) -> frozenset[int]:
    """Datasets held by none of the given workers: the unique inclusion-maximal
    dataset set forming an all-zero block with this worker set."""
    ws = sorted(workers)
    if not ws:
        raise ValueError("worker set must be nonempty")
    mask = (1 << a.n_datasets) - 1
    for n in ws:
        mask &= ~a.star_mask(n)
    return _mask_to_set(mask)


def bottleneck_family(a: Assignment, cost: Cost) -> list[tuple[frozenset[int], frozenset[int]]]:
    """All worker sets G whose maximal zero-column set Q satisfies
    p|G| + q|Q| > pN, each paired with that Q; canonically ordered.

    Subsets are walked depth-first in ascending worker order; any G with an
    empty zero-column set prunes its whole superset subtree (adding workers
    only shrinks the zero-column set).
    """
    n = a.n_workers
    if n > ENUMERATION_CAP:
        raise EnumerationLimitError(
            f"{n} workers exceeds the 2^N enumeration cap ({ENUMERATION_CAP})"
        )
    zero_masks = [(~a.star_mask(w + 1)) & ((1 << a.n_datasets) - 1) for w in range(n)]
    p, q = cost.p, cost.q
    threshold = p * n
    found: list[tuple[frozenset[int], frozenset[int]]] = []

    def walk(start: int, members: list[int], mask: int):
        for w in range(start, n):
            nm = mask & zero_masks[w]
            if nm == 0:
                continue
            members.append(w + 1)
            if p * len(members) + q * _popcount(nm) > threshold:
                found.append((frozenset(members), _mask_to_set(nm)))
            walk(w + 1, members, nm)
            members.pop()

    walk(0, [], (1 << a.n_datasets) - 1)
    found.sort(key=lambda gq: (len(gq[0]), sorted(gq[0])))
    return found


@dataclass(frozen=True)
class StructureReport:
    """Analysis of one (assignment, cost) point.

    bottlenecks        qualifying (worker set, maximal dataset set) pairs
    max_bottleneck_size   largest worker-set size among them (0 if none)
    bottleneck_workers    union of all bottleneck worker sets
    max_column_zeros      largest per-dataset count of bottleneck workers
                          missing that dataset (0 when no bottlenecks)
    replication           minimum holders over datasets
    dimension_converse    upper bound min{C(N - max_bottleneck_size), K}
    dimension_achievable  constructed value min{C(N - max_column_zeros), K}
    achievable_pieces     the integer piece count q * dimension_achievable
    dimension_repetition  baseline min{C * replication, K}
    optimal               True iff max_column_zeros == max_bottleneck_size,
                          in which case the two dimensions provably coincide
    """

    cost: Cost
    bottlenecks: tuple[tuple[frozenset[int], frozenset[int]], ...]
    max_bottleneck_size: int
    bottleneck_workers: frozenset[int]
    max_column_zeros: int
    replication: int
    dimension_converse: Fraction
    dimension_achievable: Fraction
    achievable_pieces: int
    dimension_repetition: Fraction
    optimal: bool

    def to_json(self) -> dict:
        return {
            "cost": _rational_json(self.cost.as_fraction()),
            "bottlenecks": [
                {"workers": sorted(g), "datasets": sorted(qs)}
                for g, qs in self.bottlenecks
            ],
            "max_bottleneck_size": self.max_bottleneck_size,
            "bottleneck_workers": sorted(self.bottleneck_workers),
            "max_column_zeros": self.max_column_zeros,
            "replication": self.replication,
            "dimension_converse": _rational_json(self.dimension_converse),
            "dimension_achievable": _rational_json(self.dimension_achievable),
            "achievable_pieces": self.achievable_pieces,
            "dimension_repetition": _rational_json(self.dimension_repetition),
            "optimal": self.optimal,
        }


def analyze(a: Assignment, cost: Cost) -> StructureReport:
    cost.validate_for(a)
    family = bottleneck_family(a, cost)
    alpha = max((len(g) for g, _ in family), default=0)
    union: frozenset[int] = frozenset().union(*(g for g, _ in family)) if family else frozenset()
    if union:
        col_zeros = max(
            len(a.non_holders(k) & union) for k in range(1, a.n_datasets + 1)
        )
    else:
        col_zeros = 0
    n, k = a.n_workers, a.n_datasets
    c = cost.as_fraction()
    converse = min(c * (n - alpha), Fraction(k))
    achievable = min(c * (n - col_zeros), Fraction(k))
    rep = repetition_dimension(a, cost)
    return StructureReport(
        cost=cost,
        bottlenecks=tuple(family),
        max_bottleneck_size=alpha,
        bottleneck_workers=union,
        max_column_zeros=col_zeros,
        replication=a.replication(),
        dimension_converse=converse,
        dimension_achievable=achievable,
        achievable_pieces=min(cost.p * (n - col_zeros), cost.q * k),
        dimension_repetition=rep,
        optimal=(col_zeros == alpha),
    )


def repetition_dimension(a: Assignment, cost: Cost) -> Fraction:
    """Dimension the repeat-the-unit-task baseline reaches at this cost: each
    recovered combination costs 1/replication, capped by the K messages."""
    return min(cost.as_fraction() * a.replication(), Fraction(a.n_datasets))


def brute_force_bottlenecks(a: Assignment, cost: Cost) -> tuple[int, frozenset[int]]:
    """Literal enumeration of every (worker set, dataset set) pair; returns
    (max worker-set size, union of qualifying worker sets).

    Independent oracle for the maximal-dataset-set shortcut in
    bottleneck_family / analyze: tests every pair's all-zero and inequality
    conditions directly via bitmask broadcasting, no pruning, no maximality
    reasoning. Capped at 12x12 (2^N * 2^K pairs).
    """
    n, k = a.n_workers, a.n_datasets
    if n > BRUTE_FORCE_CAP or k > BRUTE_FORCE_CAP:
        raise EnumerationLimitError(
            f"brute force capped at {BRUTE_FORCE_CAP}x{BRUTE_FORCE_CAP}, got {n}x{k}"
        )
    star = [a.star_mask(w + 1) for w in range(n)]
    g_masks = np.arange(1 << n, dtype=np.uint32)
    star_union = np.zeros(1 << n, dtype=np.uint32)
    for g in range(1, 1 << n):
        low = g & -g
        star_union[g] = star_union[g ^ low] | star[low.bit_length() - 1]
    q_masks = np.arange(1 << k, dtype=np.uint32)
    g_sizes = np.bitwise_count(g_masks).astype(np.int64)
    q_sizes = np.bitwise_count(q_masks).astype(np.int64)
    all_zero = (star_union[:, None] & q_masks[None, :]) == 0
    qualifies = all_zero & (
        cost.p * g_sizes[:, None] + cost.q * q_sizes[None, :] > cost.p * n
    )
    g_any = qualifies.any(axis=1)
    if not g_any.any():
        return 0, frozenset()
    alpha = int(g_sizes[g_any].max())
    union_mask = int(np.bitwise_or.reduce(g_masks[g_any]))
    return alpha, _mask_to_set(union_mask)


@dataclass(frozen=True)
class Transversal:
    """One distinct row per column avoiding guaranteed-zero cells, or the
    deficient column set witnessing that no such system of distinct
    representatives exists. Exactly one of the two fields is set."""

    rows: tuple[int, ...] | None = None
    deficient_columns: tuple[int, ...] | None = None

    @property
    def found(self) -> bool:
        return self.rows is not None


def hall_transversal(zero_pattern: Sequence[Sequence[bool]]) -> Transversal:
    """Pick pairwise distinct row indices z_j, one per column j, with cell
    (z_j, j) not marked guaranteed-zero; maximum bipartite matching via
    augmenting paths, columns and rows tried in ascending order so the result
    is canonical. Indices are 1-based."""
    n_rows = len(zero_pattern)
    n_cols = len(zero_pattern[0]) if n_rows else 0
    match_col_of_row = [-1] * n_rows

    def augment(j: int, visited: list[bool]) -> bool:
        for i in range(n_rows):
            if visited[i] or zero_pattern[i][j]:
                continue
            visited[i] = True
            if match_col_of_row[i] == -1 or augment(match_col_of_row[i], visited):
                match_col_of_row[i] = j
                return True
        return False

    for j in range(n_cols):
        visited = [False] * n_rows
        if not augment(j, visited):
            # alternating tree from the failed column is a Hall violator:
            # those columns' allowed rows are exactly the visited rows
            deficient = {j + 1}
            deficient.update(
                match_col_of_row[i] + 1 for i in range(n_rows) if visited[i]
            )
            return Transversal(deficient_columns=tuple(sorted(deficient)))
    row_of_col = [0] * n_cols
    for i, j in enumerate(match_col_of_row):
        if j != -1:
            row_of_col[j] = i + 1
    return Transversal(rows=tuple(row_of_col))


@dataclass(frozen=True)
class TradeoffPoint:
    cost: Cost
    dimension_converse: Fraction
    dimension_achievable: Fraction
    dimension_repetition: Fraction
    max_bottleneck_size: int
    max_column_zeros: int

    def to_json(self) -> dict:
        return {
            "cost": _rational_json(self.cost.as_fraction()),
            "dimension_converse": _rational_json(self.dimension_converse),
            "dimension_achievable": _rational_json(self.dimension_achievable),
            "dimension_repetition": _rational_json(self.dimension_repetition),
            "max_bottleneck_size": self.max_bottleneck_size,
            "max_column_zeros": self.max_column_zeros,
        }


def tradeoff_curve(a: Assignment, costs: Sequence[Cost]) -> list[TradeoffPoint]:
    """One row per distinct cost, ascending; dimensions are non-decreasing in
    cost on a fixed assignment."""
    if not costs:
        raise ValueError("need at least one cost")
    unique = sorted({c.as_fraction() for c in costs})
    points = []
    for fr in unique:
        cost = Cost.from_fraction(fr)
        rep = analyze(a, cost)
        points.append(
            TradeoffPoint(
                cost=cost,
                dimension_converse=rep.dimension_converse,
                dimension_achievable=rep.dimension_achievable,
                dimension_repetition=rep.dimension_repetition,
                max_bottleneck_size=rep.max_bottleneck_size,
                max_column_zeros=rep.max_column_zeros,
            )
        )
    return points


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


def _mask_to_set(mask: int) -> frozenset[int]:
    out = set()
    i = 1
    while mask:
        if mask & 1:
            out.add(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def _rational_json(fr: Fraction) -> dict:
    return {"p": fr.numerator, "q": fr.denominator, "decimal": fraction_decimal(fr)}


def fraction_decimal(fr: Fraction, places: int = 6) -> str:
    """Decimal string for display; exact when the expansion terminates."""
    num, den = fr.numerator, fr.denominator
    if den == 1:
        return str(num)
    d = den
    for b in (2, 5):
        while d % b == 0:
            d //= b
    if d == 1:  # terminating expansion: scale to an exact fixed-point string
        digits = 0
        scaled = fr
        while scaled.denominator != 1:
            scaled *= 10
            digits += 1
        text = str(abs(scaled.numerator)).rjust(digits + 1, "0")
        sign = "-" if num < 0 else ""
        return f"{sign}{text[:-digits]}.{text[-digits:]}"
    return f"{num / den:.{places}g}"
