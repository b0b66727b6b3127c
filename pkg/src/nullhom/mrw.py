"""Finite-state Markov random walks and their null-homology.

The walk is driven by an irreducible chain ``M_n`` on ``{0, ..., n-1}`` and
moves by a deterministic increment ``f(M_{n-1}, M_n)`` attached to each
positive-probability transition.  It is null-homologous when
``f(s, t) = xi(t) - xi(s)`` for some per-state potential ``xi``; then the sums
``S_n = xi(M_n) - xi(M_0)`` stay bounded.

Deciding this is a cycle-consistency problem on the transition digraph:
propagate a potential along a breadth-first spanning tree and check every
remaining edge.  The same residues give the lattice span (the largest ``d``
with all increments in ``xi(t) - xi(s) + dZ``) as a rational gcd.

Exact arithmetic is used whenever increments are rational: values are then
stored as ``Fraction`` in object arrays, and trajectories accumulate scaled
integers so bounds can be checked without rounding.
"""
from __future__ import annotations

import bisect
import json
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Mapping

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import (
    DimensionMismatch,
    NotIrreducible,
    NotStochastic,
    RequiresExactScalars,
)
from .rng import RandomSource

DEFAULT_TOL = 1e-9

Edge = tuple[int, int]


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True, eq=False)
class MarkovChainSpec:
    """Validated irreducible transition matrix with its stationary law."""

    transition: np.ndarray
    stationary: np.ndarray
    labels: tuple[str, ...] = ()

    @property
    def n_states(self) -> int:
        return self.transition.shape[0]

    def edges(self) -> list[Edge]:
        """Positive-probability transitions in ascending ``(s, t)`` order."""
        s, t = np.nonzero(self.transition > 0)
        return list(zip(s.tolist(), t.tolist()))

    def label(self, s: int) -> str:
        return self.labels[s] if self.labels else str(s)


def _exact(v) -> bool:
    return isinstance(v, (Fraction, int, np.integer)) and not isinstance(v, bool)


def _vec(value, exact: bool) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=object if exact else float))
    if exact:
        arr = np.array([Fraction(v) for v in arr], dtype=object)
    return arr


@dataclass(frozen=True, eq=False)
class IncrementFunction:
    """Deterministic vector increment on each positive edge.

    ``edge_values[(s, t)]`` is a length-``dim`` array, of ``Fraction`` when
    ``exact`` is true.
    """

    dim: int
    edge_values: Mapping[Edge, np.ndarray]
    exact: bool = False

    @classmethod
    def from_mapping(cls, chain: MarkovChainSpec, values: Mapping[Edge, object],
                     exact: bool | None = None) -> "IncrementFunction":
        vals = {(int(s), int(t)): v for (s, t), v in values.items()}
        if exact is None:
            exact = all(_exact(x) for v in vals.values() for x in np.atleast_1d(np.asarray(v, dtype=object)))
        ev = {e: _vec(v, exact) for e, v in sorted(vals.items())}
        dims = {len(v) for v in ev.values()}
        if len(dims) != 1:
            raise DimensionMismatch(f"increments have inconsistent dimensions {sorted(dims)}")
        f = cls(dims.pop(), ev, bool(exact))
        f.check_edges(chain)
        return f

    @classmethod
    def from_function(cls, chain: MarkovChainSpec, fn: Callable[[int, int], object],
                      exact: bool | None = None) -> "IncrementFunction":
        return cls.from_mapping(chain, {e: fn(*e) for e in chain.edges()}, exact)

    @classmethod
    def zeros(cls, chain: MarkovChainSpec, dim: int = 1) -> "IncrementFunction":
        return cls.from_function(chain, lambda s, t: [0] * dim, exact=True)

    def check_edges(self, chain: MarkovChainSpec) -> None:
        have, want = set(self.edge_values), set(chain.edges())
        if have != want:
            missing = sorted(want - have)[:5]
            extra = sorted(have - want)[:5]
            raise DimensionMismatch(
                f"increments must cover exactly the positive edges; missing {missing}, extra {extra}"
            )

    def __call__(self, s: int, t: int) -> np.ndarray:
        return self.edge_values[(s, t)]

    def dense(self, n_states: int) -> np.ndarray:
        """Float array ``F[s, t, :]``; zero off the edge set."""
        out = np.zeros((n_states, n_states, self.dim))
        for (s, t), v in self.edge_values.items():
            out[s, t] = np.asarray(v, dtype=float)
        return out

    def common_denominator(self) -> int:
        if not self.exact:
            raise RequiresExactScalars("increments are not rational")
        den = 1
        for v in self.edge_values.values():
            for x in v:
                den = math.lcm(den, Fraction(x).denominator)
        return den

    def scaled_integers(self, n_states: int) -> tuple[np.ndarray, int]:
        """Integer array ``F[s, t, :] * den`` and ``den``."""
        den = self.common_denominator()
        out = np.zeros((n_states, n_states, self.dim), dtype=np.int64)
        for (s, t), v in self.edge_values.items():
            out[s, t] = [int(Fraction(x) * den) for x in v]
        return out, den

    def perturbed(self, edge: Edge, delta) -> "IncrementFunction":
        """Copy with ``delta`` added to the increment on one edge."""
        exact = self.exact and all(_exact(x) for x in np.atleast_1d(np.asarray(delta, dtype=object)))
        vals = {e: _vec(v, exact) for e, v in self.edge_values.items()}
        vals[edge] = vals[edge] + _vec(np.broadcast_to(np.asarray(delta, dtype=object), (self.dim,)), exact)
        return IncrementFunction(self.dim, vals, exact)


@dataclass(frozen=True, eq=False)
class ShiftFunction:
    """Per-state potential with the gauge ``values[0] == 0``."""

    values: np.ndarray
    additive_gauge: str = "state0"

    @classmethod
    def from_values(cls, values) -> "ShiftFunction":
        arr = np.asarray(values)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.dtype == object or arr.dtype.kind in "iu":
            arr = np.array([[Fraction(x) for x in row] for row in arr], dtype=object)
        arr = arr - arr[0]
        return cls(arr)

    def __post_init__(self):
        if np.any(self.values[0] != 0):
            raise ValueError("ShiftFunction gauge requires values[0] == 0")

    @property
    def n_states(self) -> int:
        return self.values.shape[0]

    @property
    def exact(self) -> bool:
        return self.values.dtype == object

    def differences(self) -> np.ndarray:
        """Matrix of pairwise differences ``xi(t) - xi(s)`` indexed ``[s, t]``."""
        return self.values[None, :, :] - self.values[:, None, :]


@dataclass(frozen=True)
class CounterexampleCycle:
    """A fundamental cycle whose increments do not telescope.

    ``states`` is closed (first == last).  ``signs[k]`` is ``+1`` when step
    ``k`` follows a transition forwards and ``-1`` when it traverses a tree
    edge against its direction.
    """

    states: tuple[int, ...]
    signs: tuple[int, ...]
    edge: Edge
    cycle_sum: np.ndarray


@dataclass(frozen=True, eq=False)
class SpanningTree:
    root: int
    parent: tuple[int, ...]           # -1 at the root
    tree_edges: tuple[Edge, ...]      # directed transition used to reach each child
    order: tuple[int, ...]            # BFS visiting order

    def path_to_root(self, s: int) -> list[int]:
        out = [s]
        while self.parent[out[-1]] >= 0:
            out.append(self.parent[out[-1]])
        return out


@dataclass(frozen=True, eq=False)
class LatticeReport:
    span: Fraction
    shift_mod: tuple[Fraction, ...] | None
    nonarithmetic: bool
    witness_cycles: tuple[CounterexampleCycle, ...]
    potential: tuple[Fraction, ...]

    @property
    def degenerate(self) -> bool:
        return self.span == 0

    def to_dict(self) -> dict:
        return {
            "span": str(self.span),
            "degenerate_null_homologous": self.degenerate,
            "nonarithmetic": self.nonarithmetic,
            "shift_mod": None if self.shift_mod is None else [str(x) for x in self.shift_mod],
            "tree_potential": [str(x) for x in self.potential],
            "witness_cycles": [_cycle_dict(c) for c in self.witness_cycles],
        }


@dataclass(frozen=True, eq=False)
class MRWTrajectory:
    """States ``M_0..M_n`` and sums ``S_0..S_n``.

    For exact increments ``sums`` holds integers scaled by ``denominator``;
    otherwise it holds floats and ``denominator`` is ``None``.
    """

    states: np.ndarray
    sums: np.ndarray
    denominator: int | None
    seed: dict = field(default_factory=dict)

    @property
    def values(self) -> np.ndarray:
        if self.denominator is None:
            return self.sums
        return self.sums / self.denominator

    def check(self, f: IncrementFunction) -> bool:
        """Trajectory invariant ``S_0 = 0`` and ``S_k - S_{k-1} = f(M_{k-1}, M_k)``."""
        if np.any(self.sums[0] != 0):
            return False
        steps = np.diff(self.sums, axis=0)
        n = 1 + max(max(e) for e in f.edge_values)
        if self.denominator is None:
            table = f.dense(n)
            return bool(np.allclose(steps, table[self.states[:-1], self.states[1:]], rtol=0, atol=1e-12))
        table, den = f.scaled_integers(n)
        return den == self.denominator and bool(np.all(steps == table[self.states[:-1], self.states[1:]]))


# ---------------------------------------------------------------------------
# Chain validation


def validate_chain(transition, labels=None, atol: float = 1e-12) -> MarkovChainSpec:
    """Check a transition matrix and compute its stationary law.

    Raises
    ------
    NotStochastic
        Non-square, negative entries, or a row sum off by more than ``atol``.
    NotIrreducible
        The positive-entry digraph is not strongly connected.
    """
    P = np.array(transition, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] == 0:
        raise NotStochastic(f"transition must be a nonempty square matrix, got shape {P.shape}")
    if not np.all(np.isfinite(P)) or np.any(P < 0):
        raise NotStochastic("transition entries must be finite and nonnegative")
    rows = P.sum(axis=1)
    bad = np.abs(rows - 1) > atol
    if np.any(bad):
        raise NotStochastic(f"row {int(np.argmax(bad))} sums to {rows[bad][0]!r}")
    n = P.shape[0]
    ncomp, _ = connected_components(P > 0, directed=True, connection="strong")
    if ncomp != 1:
        raise NotIrreducible(f"positive-edge digraph has {ncomp} strongly connected components")

    # stationarity with the normalization replacing one redundant equation
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    mu = np.linalg.solve(A, rhs)
    if np.any(mu <= 0) or np.max(np.abs(mu @ P - mu)) > 1e-10:
        raise NotIrreducible("could not compute a positive stationary distribution")
    mu = mu / mu.sum()
    P.setflags(write=False)
    mu.setflags(write=False)
    lab = tuple(str(x) for x in labels) if labels is not None else ()
    if lab and len(lab) != n:
        raise DimensionMismatch(f"{len(lab)} labels for {n} states")
    return MarkovChainSpec(P, mu, lab)


def spectral_radius_second(chain: MarkovChainSpec) -> float:
    """Second largest eigenvalue modulus of the transition matrix."""
    ev = np.sort(np.abs(np.linalg.eigvals(chain.transition)))[::-1]
    return float(ev[1]) if len(ev) > 1 else 0.0


def mean_increment(chain: MarkovChainSpec, f: IncrementFunction) -> np.ndarray:
    """Stationary one-step mean ``sum_s mu(s) sum_t P(s,t) f(s,t)``."""
    F = f.dense(chain.n_states)
    return np.einsum("s,st,std->d", chain.stationary, chain.transition, F)


# ---------------------------------------------------------------------------
# Null-homology decision


def spanning_tree(chain: MarkovChainSpec, root: int = 0) -> SpanningTree:
    """Breadth-first tree of the symmetrized positive-edge graph.

    Neighbours are scanned in ascending order; a child reached through an edge
    present in both directions uses the forward transition ``(s, t)``.
    """
    adj = chain.transition > 0
    sym = adj | adj.T
    n = chain.n_states
    parent = [-1] * n
    seen = [False] * n
    seen[root] = True
    order, tree = [root], []
    queue = deque([root])
    while queue:
        s = queue.popleft()
        for t in np.flatnonzero(sym[s]).tolist():
            if not seen[t]:
                seen[t] = True
                parent[t] = s
                tree.append((s, t) if adj[s, t] else (t, s))
                order.append(t)
                queue.append(t)
    if not all(seen):
        raise NotIrreducible("positive-edge graph is disconnected")
    return SpanningTree(root, tuple(parent), tuple(tree), tuple(order))


def _zero(f: IncrementFunction) -> np.ndarray:
    if f.exact:
        return np.array([Fraction(0)] * f.dim, dtype=object)
    return np.zeros(f.dim)


def tree_potential(chain: MarkovChainSpec, f: IncrementFunction,
                   tree: SpanningTree | None = None) -> tuple[np.ndarray, SpanningTree]:
    """Potential forced by the tree edges, zero at the root."""
    tree = tree or spanning_tree(chain)
    xi = np.empty((chain.n_states, f.dim), dtype=object if f.exact else float)
    xi[tree.root] = _zero(f)
    via = {}
    for s, t in tree.tree_edges:
        child = t if tree.parent[t] == s else s
        via[child] = (s, t)
    for v in tree.order[1:]:
        s, t = via[v]
        if v == t:
            xi[t] = xi[s] + f(s, t)
        else:
            xi[s] = xi[t] - f(s, t)
    return xi, tree


def _fundamental_cycle(tree: SpanningTree, edge: Edge, residue) -> CounterexampleCycle:
    s, t = edge
    up_t = tree.path_to_root(t)
    up_s = tree.path_to_root(s)
    common = set(up_s)
    lca = next(v for v in up_t if v in common)
    down = up_t[: up_t.index(lca) + 1]               # t -> ... -> lca
    rise = up_s[: up_s.index(lca)][::-1]              # lca -> ... -> s (exclusive of lca)
    states = [s, t] + down[1:] + rise
    # the first step follows the transition, the rest traverse tree edges
    tree_set = set(tree.tree_edges)
    signs = [1]
    for a, b in zip(states[1:-1], states[2:]):
        signs.append(1 if (a, b) in tree_set else -1)
    return CounterexampleCycle(tuple(states), tuple(signs), edge, residue)


def _residues(chain, f, xi, tree):
    tree_set = set(tree.tree_edges)
    for e in chain.edges():
        if e in tree_set:
            continue
        s, t = e
        yield e, f(s, t) - (xi[t] - xi[s])


def decide_null_homology(chain: MarkovChainSpec, f: IncrementFunction,
                         tol: float = DEFAULT_TOL) -> ShiftFunction | CounterexampleCycle:
    """Return the potential ``xi`` with ``f(s, t) = xi(t) - xi(s)``, or a witness that none exists.

    Rational increments are compared exactly and ``tol`` is ignored; real
    increments pass when every component of every non-tree residue is within
    ``tol``.  The witness is the fundamental cycle of the first violating
    non-tree edge in ascending order; its ``cycle_sum`` equals that edge's
    residue.
    """
    f.check_edges(chain)
    xi, tree = tree_potential(chain, f)
    for e, r in _residues(chain, f, xi, tree):
        bad = np.any(r != 0) if f.exact else np.any(np.abs(r.astype(float)) > tol)
        if bad:
            return _fundamental_cycle(tree, e, r)
    return ShiftFunction(xi)


def make_null_homologous(chain: MarkovChainSpec, xi) -> IncrementFunction:
    """Coboundary increments ``f(s, t) = xi(t) - xi(s)`` on every positive edge."""
    vals = xi.values if isinstance(xi, ShiftFunction) else np.asarray(xi)
    if vals.ndim == 1:
        vals = vals[:, None]
    if vals.shape[0] != chain.n_states:
        raise DimensionMismatch(f"xi has {vals.shape[0]} states, chain has {chain.n_states}")
    exact = vals.dtype == object or vals.dtype.kind in "iu"
    if exact:
        vals = np.array([[Fraction(x) for x in row] for row in vals], dtype=object)
    return IncrementFunction.from_function(chain, lambda s, t: vals[t] - vals[s], exact=exact)


def recover_shift_function(chain: MarkovChainSpec, f: IncrementFunction, horizon: int) -> ShiftFunction:
    """Estimate ``xi`` from conditional means of the walk.

    With ``h_n(s) = E[S_n | M_0 = s]`` computed by the exact recursion
    ``h_n = r + P h_{n-1}`` (``r`` the one-step mean increment), a coboundary
    gives ``h_n(s) = E[xi(M_n) | M_0 = s] - xi(s)``, so
    ``h_n(0) - h_n(s)`` approaches ``xi(s) - xi(0)`` at the mixing rate.
    Non-coboundary input yields a drift-contaminated potential.
    """
    if horizon < 1:
        raise ValueError("horizon must be positive")
    P = chain.transition
    r = np.einsum("st,std->sd", P, f.dense(chain.n_states))
    h = np.zeros_like(r)
    for _ in range(int(horizon)):
        h = r + P @ h
    xi = h[0] - h
    return ShiftFunction(xi)


# ---------------------------------------------------------------------------
# Lattice type


def _rational_gcd(values) -> Fraction:
    g = Fraction(0)
    for v in values:
        v = abs(Fraction(v))
        if v == 0:
            continue
        if g == 0:
            g = v
            continue
        den = math.lcm(g.denominator, v.denominator)
        g = Fraction(math.gcd(g.numerator * (den // g.denominator), v.numerator * (den // v.denominator)), den)
    return g


def lattice_span(chain: MarkovChainSpec, f: IncrementFunction) -> LatticeReport:
    """Lattice span and shift function of a scalar rational walk.

    The span is the gcd of all fundamental-cycle residues, which generate every
    cycle sum; span 0 means every cycle sum vanishes (null-homologous).  For
    span ``d > 0`` the tree potential reduced into ``[0, d)`` is a shift
    function.  The report's defining properties are checked before returning.

    Raises
    ------
    RequiresExactScalars
        For vector or real-valued increments.
    """
    if f.dim != 1 or not f.exact:
        raise RequiresExactScalars("lattice analysis needs scalar rational increments")
    f.check_edges(chain)
    xi, tree = tree_potential(chain, f)
    witnesses, residues = [], []
    for e, r in _residues(chain, f, xi, tree):
        if r[0] != 0:
            residues.append(r[0])
            witnesses.append(_fundamental_cycle(tree, e, r))
    d = _rational_gcd(residues)
    pot = tuple(Fraction(x) for x in xi[:, 0])
    shift = None if d == 0 else tuple(x % d for x in pot)
    report = LatticeReport(d, shift, False, tuple(witnesses), pot)
    verify_lattice_report(chain, f, report)
    return report


def verify_lattice_report(chain: MarkovChainSpec, f: IncrementFunction, report: LatticeReport) -> None:
    """Assert that all edge residues lie in ``dZ`` and that ``2d`` fails somewhere."""
    d = report.span
    if d == 0:
        xi = report.potential
        for s, t in chain.edges():
            if f(s, t)[0] - (xi[t] - xi[s]) != 0:
                raise AssertionError(f"span 0 reported but edge {(s, t)} does not telescope")
        return
    xi = report.shift_mod
    if any(not (0 <= x < d) for x in xi):
        raise AssertionError("shift function leaves [0, d)")
    res = [f(s, t)[0] - (xi[t] - xi[s]) for s, t in chain.edges()]
    if any((r / d).denominator != 1 for r in res):
        raise AssertionError(f"an edge residue is not a multiple of d={d}")
    if all((r / (2 * d)).denominator == 1 for r in res):
        raise AssertionError(f"d={d} is not maximal: all residues lie in 2dZ")


# ---------------------------------------------------------------------------
# Simulation


def _initial_states(chain, start, size, gen):
    if isinstance(start, str):
        if start != "stationary":
            raise ValueError(f"start must be a state index or 'stationary', got {start!r}")
        return gen.choice(chain.n_states, size=size, p=chain.stationary)
    s = int(start)
    if not 0 <= s < chain.n_states:
        raise ValueError(f"start state {s} out of range")
    return np.full(size, s, dtype=np.int64)


def simulate_states(chain: MarkovChainSpec, n: int, reps: int, gen: np.random.Generator,
                    start="stationary") -> np.ndarray:
    """``(reps, n + 1)`` array of driving-chain paths."""
    cum = np.cumsum(chain.transition, axis=1)
    cum[:, -1] = np.inf
    states = np.empty((reps, n + 1), dtype=np.int64)
    states[:, 0] = _initial_states(chain, start, reps, gen)
    u = gen.random((n, reps))
    if reps == 1:
        # a single path: plain bisection beats per-step array overhead
        rows = [list(r) for r in cum]
        path, s = [int(states[0, 0])], int(states[0, 0])
        for x in u[:, 0].tolist():
            s = bisect.bisect_right(rows[s], x)
            path.append(s)
        states[0] = path
        return states
    for k in range(n):
        states[:, k + 1] = (cum[states[:, k]] <= u[k][:, None]).sum(axis=1)
    return states


def accumulate(chain: MarkovChainSpec, f: IncrementFunction, states: np.ndarray):
    """Partial sums along paths: ``(sums, denominator)`` as in :class:`MRWTrajectory`."""
    if f.exact:
        table, den = f.scaled_integers(chain.n_states)
    else:
        table, den = f.dense(chain.n_states), None
    steps = table[states[..., :-1], states[..., 1:]]
    zero = np.zeros(steps.shape[:-2] + (1, f.dim), dtype=steps.dtype)
    return np.concatenate([zero, np.cumsum(steps, axis=-2)], axis=-2), den


def simulate_mrw(chain: MarkovChainSpec, f: IncrementFunction, n: int, src: RandomSource,
                 start="stationary") -> MRWTrajectory:
    """Simulate ``(M_k, S_k)`` for ``k = 0..n``.

    ``start`` is a state index or ``"stationary"`` (``M_0 ~ mu``).
    """
    states = simulate_states(chain, int(n), 1, src.generator(), start)[0]
    sums, den = accumulate(chain, f, states)
    return MRWTrajectory(states, sums, den, src.record())


# ---------------------------------------------------------------------------
# JSON interchange


def _value_json(v) -> dict:
    out = {"value": [float(x) for x in v]}
    if all(isinstance(x, Fraction) for x in v):
        out["rational"] = [{"num": x.numerator, "den": x.denominator} for x in v]
    return out


def chain_to_dict(chain: MarkovChainSpec, f: IncrementFunction | None = None) -> dict:
    labels = list(chain.labels) if chain.labels else [str(i) for i in range(chain.n_states)]
    out = {"states": labels, "transition": chain.transition.tolist()}
    if f is not None:
        out["increments"] = [
            {"from": labels[s], "to": labels[t], **_value_json(v)} for (s, t), v in f.edge_values.items()
        ]
    return out


def _parse_rational(obj):
    if isinstance(obj, list):
        return [Fraction(int(r["num"]), int(r["den"])) for r in obj]
    return [Fraction(int(obj["num"]), int(obj["den"]))]


def chain_from_dict(data: dict) -> tuple[MarkovChainSpec, IncrementFunction | None]:
    """Parse ``{"states", "transition", "increments"}`` into validated objects.

    Each increment is ``{"from", "to", "value": [...]}`` with an optional
    ``"rational"`` (one ``{"num", "den"}`` or a list of them) that, when given
    on every increment, makes the increments exact.
    """
    labels = [str(x) for x in data["states"]]
    chain = validate_chain(data["transition"], labels)
    index = {lab: i for i, lab in enumerate(labels)}

    def state(x):
        if str(x) in index:
            return index[str(x)]
        raise KeyError(f"unknown state label {x!r}")

    incs = data.get("increments")
    if incs is None:
        return chain, None
    exact = all("rational" in item for item in incs)
    values = {}
    for item in incs:
        e = (state(item["from"]), state(item["to"]))
        if e in values:
            raise ValueError(f"duplicate increment for edge {e}")
        values[e] = _parse_rational(item["rational"]) if exact else [float(x) for x in item["value"]]
    return chain, IncrementFunction.from_mapping(chain, values, exact=exact)


def load_chain(path) -> tuple[MarkovChainSpec, IncrementFunction | None]:
    return chain_from_dict(json.loads(Path(path).read_text()))


def save_chain(path, chain: MarkovChainSpec, f: IncrementFunction | None = None) -> None:
    Path(path).write_text(json.dumps(chain_to_dict(chain, f), indent=2) + "\n")


def _num(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return repr(float(x))


def _cycle_dict(c: CounterexampleCycle) -> dict:
    return {
        "states": list(c.states),
        "signs": list(c.signs),
        "edge": list(c.edge),
        "cycle_sum": [_num(x) for x in c.cycle_sum],
    }


def decision_to_dict(chain: MarkovChainSpec, decision) -> dict:
    if isinstance(decision, ShiftFunction):
        return {
            "null_homologous": True,
            "shift_function": {
                chain.label(s): [_num(x) for x in row] for s, row in enumerate(decision.values)
            },
            "gauge": decision.additive_gauge,
        }
    return {"null_homologous": False, "counterexample": _cycle_dict(decision)}


def trajectory_to_csv(traj: MRWTrajectory) -> str:
    m = traj.sums.shape[1]
    lines = ["k,state," + ",".join(f"s{i}" for i in range(m))]
    for k, (s, row) in enumerate(zip(traj.states, traj.sums)):
        if traj.denominator is None:
            cells = [repr(float(x)) for x in row]
        else:
            cells = [str(Fraction(int(x), traj.denominator)) for x in row]
        lines.append(f"{k},{int(s)}," + ",".join(cells))
    return "\n".join(lines) + "\n"
