"""Two-qubit gate sets, circuits, simple effects, and circuit-complexity
measures.

A gate is always a 4x4 unitary or a 4x4-Kraus channel; single-qubit actions
are carried as u (x) I factors.  Placing a gate on an ordered edge (i, j)
embeds it into the full register.  Circuit cost counts placed non-identity
gates.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetExceededError
from .registers import DensityOperator, PovmEffect, register

DEFAULT_BUDGET = 10 ** 7
MATRIX_HASH_DECIMALS = 10


def enumeration_budget(budget: int | None = None) -> int:
    if budget is not None:
        return int(budget)
    return int(os.environ.get("CXTHERM_BUDGET", DEFAULT_BUDGET))


# ---------------------------------------------------------------------------
# gates and gate sets

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
T = np.diag([1.0, np.exp(1j * math.pi / 4)]).astype(complex)

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CNOT_R = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


@dataclass(frozen=True, eq=False)
class Gate:
    """A 4x4 unitary gate or Kraus channel acting on one edge.

    Identity-based equality: matrices make value equality ill-defined."""

    name: str
    unitary: np.ndarray | None = field(default=None, repr=False)
    kraus: tuple[np.ndarray, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        if (self.unitary is None) == (self.kraus is None):
            raise ValueError("gate needs exactly one of unitary / kraus")
        if self.unitary is not None:
            u = np.asarray(self.unitary, dtype=complex)
            if u.shape != (4, 4):
                raise ValueError("gate unitary must be 4x4")
            if np.linalg.norm(u @ u.conj().T - np.eye(4), ord=2) > 1e-10:
                raise ValueError(f"gate {self.name!r} is not unitary")
            object.__setattr__(self, "unitary", u)
        else:
            ks = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
            if any(k.shape != (4, 4) for k in ks):
                raise ValueError("kraus operators must be 4x4")
            tp = sum(k.conj().T @ k for k in ks)
            if np.linalg.norm(tp - np.eye(4), ord=2) > 1e-9:
                raise ValueError(f"channel {self.name!r} is not trace-preserving")
            object.__setattr__(self, "kraus", ks)

    @property
    def is_unitary(self) -> bool:
        return self.unitary is not None

    @property
    def is_identity(self) -> bool:
        return self.is_unitary and bool(np.allclose(self.unitary, np.eye(4), atol=1e-12))


def unitary_gate(name: str, matrix: np.ndarray) -> Gate:
    return Gate(name, unitary=np.asarray(matrix, dtype=complex))


def channel_gate(name: str, kraus: Sequence[np.ndarray]) -> Gate:
    return Gate(name, kraus=tuple(kraus))


@dataclass(frozen=True)
class GateSet:
    """Finite alphabet (or the continuous SU(4) family) plus connectivity.

    The identity is always available and never counts toward circuit cost.
    `placed_extra` holds edge-specific gates (e.g. thermal channels whose
    Kraus operators depend on the qubit energies of that edge).
    """

    kind: str  # "finite" | "continuous_su4"
    gates: tuple[Gate, ...] = ()
    connectivity: str = "all-to-all"
    placed_extra: tuple[tuple[Gate, tuple[int, int]], ...] = ()

    def __post_init__(self):
        if self.kind not in ("finite", "continuous_su4"):
            raise ValueError(f"unknown gate-set kind {self.kind!r}")
        if self.connectivity not in ("all-to-all", "chain"):
            raise ValueError(f"unknown connectivity {self.connectivity!r}")

    @property
    def includes_identity(self) -> bool:
        return True

    @property
    def is_unitary_only(self) -> bool:
        return all(g.is_unitary for g in self.gates) and all(
            g.is_unitary for g, _ in self.placed_extra
        )


def edges(connectivity: str, n: int) -> list[tuple[int, int]]:
    """Unordered edges (i < j) of the connectivity graph on n qubits."""
    if connectivity == "chain":
        return [(i, i + 1) for i in range(n - 1)]
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def default_gate_set(connectivity: str = "all-to-all") -> GateSet:
    """Small universal-ish set used for exact enumerations.

    Closed under adjoints (T and its inverse are both present), so every
    circuit's inverse is again a circuit of the same length.
    """
    gates = (
        unitary_gate("cnot", CNOT),
        unitary_gate("cnot_r", CNOT_R),
        unitary_gate("cz", CZ),
        unitary_gate("swap", SWAP),
        unitary_gate("xx", np.kron(X, X)),
        unitary_gate("x_a", np.kron(X, I2)),
        unitary_gate("x_b", np.kron(I2, X)),
        unitary_gate("h_a", np.kron(H, I2)),
        unitary_gate("h_b", np.kron(I2, H)),
        unitary_gate("t_a", np.kron(T, I2)),
        unitary_gate("t_b", np.kron(I2, T)),
        unitary_gate("tdg_a", np.kron(T.conj().T, I2)),
        unitary_gate("tdg_b", np.kron(I2, T.conj().T)),
    )
    return GateSet("finite", gates, connectivity)


def continuous_su4_gate_set(connectivity: str = "all-to-all") -> GateSet:
    return GateSet("continuous_su4", (), connectivity)


# ---------------------------------------------------------------------------
# embedding into the full register


def expand_operator(mat: np.ndarray, n: int, positions: Sequence[int]) -> np.ndarray:
    """Embed an operator on the given qubit positions (in that order) into the
    full 2^n register, acting as identity elsewhere."""
    positions = [int(p) for p in positions]
    k = len(positions)
    if len(set(positions)) != k or not all(0 <= p < n for p in positions):
        raise ValueError(f"invalid qubit positions {positions} on {n} qubits")
    mat = np.asarray(mat, dtype=complex)
    if mat.shape != (2 ** k, 2 ** k):
        raise ValueError("operator dimension does not match position count")
    if positions == list(range(n)):
        return mat
    rest = [q for q in range(n) if q not in positions]
    order = positions + rest
    big = np.kron(mat, np.eye(2 ** (n - k), dtype=complex)) if rest else mat
    t = big.reshape((2,) * (2 * n))
    perm = [0] * n
    for pos, q in enumerate(order):
        perm[q] = pos
    axes = perm + [p + n for p in perm]
    return np.ascontiguousarray(t.transpose(axes).reshape(2 ** n, 2 ** n))


def expand_two_qubit(mat4: np.ndarray, n: int, i: int, j: int) -> np.ndarray:
    """Embed a 4x4 operator acting on ordered qubits (i, j) into 2^n x 2^n."""
    if i == j:
        raise ValueError(f"invalid edge ({i}, {j})")
    return expand_operator(mat4, n, [i, j])


class PlacedGate:
    """A gate bound to an edge of an n-qubit register, with cached embeddings."""

    __slots__ = ("gate", "edge", "n", "unitary_full", "kraus_full", "superop")

    def __init__(self, gate: Gate, edge: tuple[int, int], n: int):
        self.gate = gate
        self.edge = (int(edge[0]), int(edge[1]))
        self.n = n
        if gate.is_unitary:
            self.unitary_full = expand_two_qubit(gate.unitary, n, *self.edge)
            self.kraus_full = (self.unitary_full,)
        else:
            self.unitary_full = None
            self.kraus_full = tuple(expand_two_qubit(k, n, *self.edge) for k in gate.kraus)
        self.superop = None  # built on demand

    def apply_matrix(self, sigma: np.ndarray) -> np.ndarray:
        if self.unitary_full is not None:
            u = self.unitary_full
            return u @ sigma @ u.conj().T
        out = None
        for k in self.kraus_full:
            term = k @ sigma @ k.conj().T
            out = term if out is None else out + term
        return out

    def apply_vector(self, vec: np.ndarray) -> np.ndarray:
        return self.unitary_full @ vec

    def pullback(self, effect: np.ndarray) -> np.ndarray:
        """Heisenberg-picture adjoint applied to an effect matrix."""
        if self.unitary_full is not None:
            u = self.unitary_full
            return u.conj().T @ effect @ u
        out = None
        for k in self.kraus_full:
            term = k.conj().T @ effect @ k
            out = term if out is None else out + term
        return out

    def superoperator(self) -> np.ndarray:
        # row-major vec convention: vec(K rho K^dag) = (K (x) conj(K)) vec(rho)
        if self.superop is None:
            s = sum(np.kron(k, k.conj()) for k in self.kraus_full)
            self.superop = np.ascontiguousarray(s)
        return self.superop

    def matrix_key(self) -> bytes:
        mats = self.kraus_full if self.unitary_full is None else (self.unitary_full,)
        return b"".join(np.round(m, MATRIX_HASH_DECIMALS).tobytes() for m in mats)


def placed_alphabet(gate_set: GateSet, n: int) -> list[PlacedGate]:
    """All distinct placed gates on the connectivity graph, identity excluded.

    Gates whose full-register action coincides (e.g. H (x) I on edges (0,1)
    and (0,2)) are deduplicated.
    """
    if gate_set.kind != "finite":
        raise ValueError("placed alphabet requires a finite gate set")
    out: list[PlacedGate] = []
    seen: set[bytes] = set()
    pairs = list(edges(gate_set.connectivity, n))
    for gate in gate_set.gates:
        if gate.is_identity:
            continue
        for e in pairs:
            pg = PlacedGate(gate, e, n)
            key = pg.matrix_key()
            if key not in seen:
                seen.add(key)
                out.append(pg)
    for gate, e in gate_set.placed_extra:
        if max(e) >= n:
            continue
        pg = PlacedGate(gate, e, n)
        key = pg.matrix_key()
        if key not in seen:
            seen.add(key)
            out.append(pg)
    return out


# ---------------------------------------------------------------------------
# circuits


@dataclass(frozen=True)
class Circuit:
    """Ordered placed operations; cost counts non-identity gates."""

    n: int
    ops: tuple[tuple[Gate, tuple[int, int]], ...] = ()

    @property
    def complexity(self) -> int:
        return sum(1 for g, _ in self.ops if not g.is_identity)

    def placed(self) -> list[PlacedGate]:
        return [PlacedGate(g, e, self.n) for g, e in self.ops]

    @property
    def is_unitary(self) -> bool:
        return all(g.is_unitary for g, _ in self.ops)


def apply_circuit(circuit: Circuit, rho: DensityOperator) -> DensityOperator:
    if rho.register.n != circuit.n:
        raise ValueError("register size does not match circuit")
    sigma = rho.matrix
    for pg in circuit.placed():
        sigma = pg.apply_matrix(sigma)
    return DensityOperator(rho.register, sigma)


def compose_unitary(circuit: Circuit) -> np.ndarray:
    """Full-register unitary of a unitary circuit, gates applied left to right."""
    if not circuit.is_unitary:
        raise ValueError("circuit contains non-unitary operations")
    u = np.eye(2 ** circuit.n, dtype=complex)
    for pg in circuit.placed():
        u = pg.unitary_full @ u
    return u


@dataclass(frozen=True)
class SimpleEffect:
    """Tensor product of |0><0| (masked qubits) and identity factors."""

    mask: tuple[bool, ...]

    @property
    def n(self) -> int:
        return len(self.mask)

    @property
    def trace(self) -> float:
        return float(2 ** sum(1 for m in self.mask if not m))

    def matrix(self) -> np.ndarray:
        diag = mask_matrix(self.n)[mask_bits(self.mask)]
        return np.diag(diag.astype(complex))

    def as_effect(self) -> PovmEffect:
        return PovmEffect(register(self.n), self.matrix())


def mask_bits(mask: Sequence[bool]) -> int:
    """Mask as an integer whose bit layout matches basis-state indices."""
    n = len(mask)
    return sum(1 << (n - 1 - i) for i, m in enumerate(mask) if m)


def simple_effect_from_bits(n: int, bits: int) -> SimpleEffect:
    return SimpleEffect(tuple(bool((bits >> (n - 1 - i)) & 1) for i in range(n)))


def iter_simple_effects(n: int) -> Iterator[SimpleEffect]:
    for bits in range(2 ** n):
        yield simple_effect_from_bits(n, bits)


@lru_cache(maxsize=16)
def mask_matrix(n: int) -> np.ndarray:
    """Row m, column b: 1.0 iff basis state b is accepted by mask m.

    With bit-aligned masks this is just b & m == 0, so mask traces of a state
    are mask_matrix(n) @ diag(sigma).
    """
    d = 2 ** n
    b = np.arange(d)
    return ((b[None, :] & b[:, None]) == 0).astype(float)


@lru_cache(maxsize=16)
def mask_traces_identity(n: int) -> np.ndarray:
    """tr(P_m) for every mask m."""
    return mask_matrix(n).sum(axis=1)


def pullback_effect(circuit: Circuit, effect: SimpleEffect | PovmEffect) -> PovmEffect:
    """Q = E_1^dag ... E_r^dag(P) for the circuit E_r ... E_1."""
    if isinstance(effect, SimpleEffect):
        p = effect.matrix()
        prov_simple = effect
    else:
        p = effect.matrix
        prov_simple = None
    for pg in reversed(circuit.placed()):
        p = pg.pullback(p)
    return PovmEffect(register(circuit.n), p, provenance=(circuit, prov_simple))


def inverse_circuit(circuit: Circuit, gate_set: GateSet | None = None) -> Circuit | None:
    """The reversed-adjoint circuit, or None when some adjoint gate is not in
    the gate set.  For a state psi = V|0^n>, pulling a simple projector back
    through this circuit yields the rank-1 certificate V P V^dag in M_r."""
    ops = []
    pool: list[Gate] | None = None
    if gate_set is not None:
        pool = [g for g in gate_set.gates if g.is_unitary]
        pool.extend(g for g, _ in gate_set.placed_extra if g.is_unitary)
    for gate, edge in reversed(circuit.ops):
        if not gate.is_unitary:
            return None
        adj = gate.unitary.conj().T
        if pool is None:
            ops.append((unitary_gate(gate.name + "_inv", adj), edge))
            continue
        match = next((g for g in pool if np.allclose(g.unitary, adj, atol=1e-12)), None)
        if match is None:
            return None
        ops.append((match, edge))
    return Circuit(circuit.n, tuple(ops))


# ---------------------------------------------------------------------------
# exhaustive enumeration of complexity-restricted effects


def iter_circuits(
    gate_set: GateSet,
    n: int,
    r: int,
    budget: int | None = None,
    shard: tuple[int, int] | None = None,
) -> Iterator[Circuit]:
    """Every circuit of at most r placed gates, in lexicographic order.

    With the identity in the alphabet, length <= r is equivalent to exactly-r
    compositions, so identity padding is never emitted.  `shard = (k, K)`
    restricts to first gates with index = k mod K (the empty circuit belongs
    to shard 0), enabling order-independent parallel reduction.
    """
    alphabet = placed_alphabet(gate_set, n)
    cap = enumeration_budget(budget)
    count = 0

    def emit(ops_idx: tuple[int, ...]) -> Circuit:
        return Circuit(n, tuple((alphabet[i].gate, alphabet[i].edge) for i in ops_idx))

    stack: list[tuple[tuple[int, ...]]] = []
    if shard is None or shard[0] == 0:
        yield emit(())
    count += 1
    first = range(len(alphabet)) if shard is None else range(shard[0], len(alphabet), shard[1])
    if r <= 0:
        return
    for f in first:
        stack.append((f,))
        while stack:
            ops = stack.pop()
            count += 1
            if count > cap:
                raise BudgetExceededError(count, cap)
            yield emit(ops)
            if len(ops) < r:
                for i in reversed(range(len(alphabet))):
                    stack.append(ops + (i,))


def enumerate_effects(
    gate_set: GateSet,
    r: int,
    n: int,
    budget: int | None = None,
    dedup: bool = True,
) -> Iterator[PovmEffect]:
    """All effects in M_r = {pullbacks of simple effects through <= r gates}.

    Deduplication hashes matrices rounded to 1e-10; it affects only the number
    of items yielded, never the set realized.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    if gate_set.kind != "finite":
        raise ValueError("exact enumeration requires a finite gate set")
    seen: set[bytes] = set()
    simple = list(iter_simple_effects(n))
    for circuit in iter_circuits(gate_set, n, r, budget=budget):
        placed = circuit.placed()
        pulled: list[np.ndarray] = []
        for eff in simple:
            p = eff.matrix()
            for pg in reversed(placed):
                p = pg.pullback(p)
            pulled.append(p)
        for eff, p in zip(simple, pulled):
            if dedup:
                key = np.round(p, MATRIX_HASH_DECIMALS).tobytes()
                if key in seen:
                    continue
                seen.add(key)
            yield PovmEffect(register(n), p, provenance=(circuit, eff))


# ---------------------------------------------------------------------------
# complexity measures


def circuit_complexity(
    gate_set: GateSet, target: np.ndarray, r_max: int, n: int | None = None
) -> int | float:
    """Least number of placed gates composing to `target` within 1e-8 in
    operator norm; math.inf when r_max is exhausted."""
    target = np.asarray(target, dtype=complex)
    d = target.shape[0]
    n = n if n is not None else int(round(math.log2(d)))
    alphabet = placed_alphabet(gate_set, n)
    if any(pg.unitary_full is None for pg in alphabet):
        raise ValueError("circuit complexity is defined for unitary gate sets")

    def matches(u):
        return np.linalg.norm(u - target, ord=2) <= 1e-8

    frontier = [np.eye(d, dtype=complex)]
    seen = {np.round(frontier[0], MATRIX_HASH_DECIMALS).tobytes()}
    if matches(frontier[0]):
        return 0
    for level in range(1, r_max + 1):
        nxt = []
        for u in frontier:
            for pg in alphabet:
                v = pg.unitary_full @ u
                key = np.round(v, MATRIX_HASH_DECIMALS).tobytes()
                if key in seen:
                    continue
                seen.add(key)
                if matches(v):
                    return level
                nxt.append(v)
        frontier = nxt
        if not frontier:
            break
    return math.inf


def _phase_canonical(vec: np.ndarray) -> np.ndarray:
    idx = int(np.argmax(np.abs(vec) > 1e-12))
    ph = vec[idx] / abs(vec[idx])
    return vec / ph


def approx_state_complexity(
    psi: DensityOperator | np.ndarray, gate_set: GateSet, eps: float, r_max: int
) -> int | float:
    """Least gate count preparing a state within trace distance eps of psi,
    starting from |0^n>; math.inf when r_max is exhausted."""
    if isinstance(psi, DensityOperator):
        w, v = np.linalg.eigh(psi.matrix)
        if w[-1] < 1.0 - 1e-9:
            raise ValueError("approximate state complexity is defined for pure states")
        target = v[:, -1]
    else:
        target = np.asarray(psi, dtype=complex).ravel()
        target = target / np.linalg.norm(target)
    d = target.size
    n = int(round(math.log2(d)))
    alphabet = placed_alphabet(gate_set, n)
    if any(pg.unitary_full is None for pg in alphabet):
        raise ValueError("state complexity is defined for unitary gate sets")

    def close(vec):
        # trace distance between pure states; near zero it carries
        # sqrt(machine-eps) noise, so the slack sits at 1e-7, not finer
        overlap = abs(np.vdot(target, vec)) ** 2
        return math.sqrt(max(0.0, 1.0 - overlap)) <= eps + 1e-7

    start = np.zeros(d, dtype=complex)
    start[0] = 1.0
    if close(start):
        return 0
    frontier = [start]
    seen = {np.round(_phase_canonical(start), MATRIX_HASH_DECIMALS).tobytes()}
    for level in range(1, r_max + 1):
        nxt = []
        for vec in frontier:
            for pg in alphabet:
                w = pg.apply_vector(vec)
                key = np.round(_phase_canonical(w), MATRIX_HASH_DECIMALS).tobytes()
                if key in seen:
                    continue
                seen.add(key)
                if close(w):
                    return level
                nxt.append(w)
        frontier = nxt
        if not frontier:
            break
    return math.inf


# ---------------------------------------------------------------------------
# unitary geometry


def entangling_power(u: np.ndarray) -> tuple[float, float]:
    """(e(U), half diamond distance to the identity process).

    e(U) is the half-angle of the shortest arc on the unit circle containing
    every eigenphase of U; the distance is sin(min(e, pi/2)).
    """
    u = np.asarray(u, dtype=complex)
    if np.linalg.norm(u @ u.conj().T - np.eye(u.shape[0]), ord=2) > 1e-9:
        raise ValueError("input is not unitary")
    phases = np.sort(np.angle(np.linalg.eigvals(u)))
    gaps = np.diff(phases, append=phases[0] + 2.0 * math.pi)
    arc = 2.0 * math.pi - float(gaps.max())
    e = 0.5 * arc
    dist = math.sin(min(e, 0.5 * math.pi))
    if dist > np.linalg.norm(u - np.eye(u.shape[0]), ord=2) + 1e-9:
        raise AssertionError("diamond distance exceeded ||U - I||")
    return e, dist


# ---------------------------------------------------------------------------
# channels


def choi_matrix(kraus: Sequence[np.ndarray]) -> np.ndarray:
    vs = [np.asarray(k, dtype=complex).reshape(-1) for k in kraus]
    return sum(np.outer(v, v.conj()) for v in vs)


def kraus_from_choi(choi: np.ndarray, tol: float = 1e-12) -> list[np.ndarray]:
    d = int(round(math.sqrt(choi.shape[0])))
    w, v = np.linalg.eigh(choi)
    out = []
    for wi, col in zip(w, v.T):
        if wi > tol * max(w.max(), 1e-300):
            out.append(math.sqrt(wi) * col.reshape(d, d))
    return out


def is_cptp(kraus: Sequence[np.ndarray], tol: float = 1e-9) -> bool:
    c = choi_matrix(kraus)
    if np.linalg.eigvalsh(c).min() < -tol:
        return False
    d = int(round(math.sqrt(c.shape[0])))
    tp = sum(np.asarray(k).conj().T @ np.asarray(k) for k in kraus)
    return bool(np.linalg.norm(tp - np.eye(d), ord=2) <= tol)


def gibbs_check(channel: Gate | Sequence[np.ndarray], gamma_pair: np.ndarray) -> bool:
    """True iff the two-qubit CPTP map leaves the Gibbs weight invariant."""
    if isinstance(channel, Gate):
        kraus = (channel.unitary,) if channel.is_unitary else channel.kraus
    else:
        kraus = tuple(np.asarray(k, dtype=complex) for k in channel)
    if not is_cptp(kraus):
        raise ValueError("input map is not CPTP")
    gamma_pair = np.asarray(gamma_pair, dtype=complex)
    image = sum(k @ gamma_pair @ k.conj().T for k in kraus)
    w = np.linalg.eigvalsh(image - gamma_pair)
    return bool(np.abs(w).sum() <= 1e-9)


# ---------------------------------------------------------------------------
# gate-set files

_COMPLEX_FMT = "%.17g %.17g"


def _format_matrix(m: np.ndarray) -> list[str]:
    return [_COMPLEX_FMT % (z.real, z.imag) for z in np.asarray(m, dtype=complex).ravel()]


def _parse_matrix(lines: list[str], dim: int) -> np.ndarray:
    vals = []
    for ln in lines:
        re_s, im_s = ln.split()
        vals.append(complex(float(re_s), float(im_s)))
    return np.array(vals, dtype=complex).reshape(dim, dim)


def format_gate_set(gate_set: GateSet) -> str:
    if gate_set.kind != "finite" or gate_set.placed_extra:
        raise ValueError("only uniform finite gate sets can be serialized")
    lines = [f"connectivity {gate_set.connectivity}"]
    for gate in gate_set.gates:
        if gate.is_unitary:
            lines.append(f"gate {gate.name} unitary")
            lines.extend(_format_matrix(gate.unitary))
        else:
            lines.append(f"gate {gate.name} channel {len(gate.kraus)}")
            for k in gate.kraus:
                lines.extend(_format_matrix(k))
    return "\n".join(lines) + "\n"


def parse_gate_set(text: str) -> GateSet:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith("connectivity"):
        raise ValueError("gate-set file must start with a connectivity line")
    connectivity = lines[0].split()[1]
    gates: list[Gate] = []
    pos = 1
    while pos < len(lines):
        parts = lines[pos].split()
        if parts[0] != "gate":
            raise ValueError(f"expected gate declaration, got {lines[pos]!r}")
        name, kind = parts[1], parts[2]
        pos += 1
        if kind == "unitary":
            gates.append(unitary_gate(name, _parse_matrix(lines[pos : pos + 16], 4)))
            pos += 16
        elif kind == "channel":
            count = int(parts[3])
            kraus = []
            for _ in range(count):
                kraus.append(_parse_matrix(lines[pos : pos + 16], 4))
                pos += 16
            gates.append(channel_gate(name, kraus))
        else:
            raise ValueError(f"unknown gate kind {kind!r}")
    return GateSet("finite", tuple(gates), connectivity)
