"""Navigation in oriented ell-isogeny volcanoes.

For an O-oriented curve (E, theta) and an ell-isogeny phi: E -> E', the
pushed endomorphism phi theta phi-dual has discriminant ell^2 disc(O). The
primitive order of E' at ell is read off from divisibility:

* phi theta phi-dual not divisible by ell: the edge descends (the rank of
  phi theta phi-dual on E'[ell] is at most one, so no integer shift of it is
  divisible either);
* q = phi theta phi-dual / ell an endomorphism: E' is O-oriented, and the
  edge ascends exactly when (q - c) / ell is also one, with c chosen so that
  theta - c = ell omega' for the generator omega' of the larger order.
"""
from __future__ import annotations

import json

from .arith.modlin import kernel_2x2
from .curve import torsion_basis
from .division import divide_by_integer, is_divisible
from .errors import AtCrater, InvalidOrientation, NotDivisible, VerificationFailed
from .isogeny import IsogenyChain, VeluStep, action_matrix, as_expr, conjugate
from .orientation import OrientedCurve, enc, from_endomorphism
from .arith.integers import kronecker, factor

ASCENDING, HORIZONTAL, DESCENDING = "ascending", "horizontal", "descending"
_DOT_DIR = {ASCENDING: "up", HORIZONTAL: "flat", DESCENDING: "down"}


class VolcanoEdge:
    def __init__(self, source: OrientedCurve, target: OrientedCurve, ell: int, direction: str,
                 step: VeluStep):
        self.source_curve = source
        self.target_curve = target
        self.ell = ell
        self.direction = direction
        self.step = step
        self._keys = None

    @property
    def kernel(self):
        return self.step.kernel

    @property
    def source(self):
        return self._pair()[0]

    @property
    def target(self):
        return self._pair()[1]

    def _pair(self):
        if self._keys is None:
            self._keys = (enc(self.source_curve), enc(self.target_curve))
        return self._keys

    def __repr__(self):
        return f"Edge({self.ell}, {self.direction}, {self.target_curve.order.disc})"


class WalkTranscript:
    def __init__(self, start: OrientedCurve):
        self.start = start
        self.steps: list[tuple[int, object, OrientedCurve]] = []
        self._velu: list[VeluStep] = []

    @property
    def end(self) -> OrientedCurve:
        return self.steps[-1][2] if self.steps else self.start

    def __len__(self):
        return len(self.steps)

    def append(self, edge: VolcanoEdge):
        self.steps.append((edge.ell, edge.kernel, edge.target_curve))
        self._velu.append(edge.step)

    def extend(self, other: "WalkTranscript"):
        for (ell, K, X), st in zip(other.steps, other._velu):
            self.steps.append((ell, K, X))
            self._velu.append(st)

    def degree(self) -> int:
        d = 1
        for ell, _, _ in self.steps:
            d *= ell
        return d

    def chain(self) -> IsogenyChain:
        return IsogenyChain(list(self._velu), self.start.curve)

    def to_json(self):
        return {"start": enc(self.start).to_json(), "end": enc(self.end).to_json(),
                "steps": [{"ell": ell, "kernel": K.to_json(), "disc": X.order.disc}
                          for ell, K, X in self.steps]}


def _line_kernels(E, ell: int):
    """The ell + 1 cyclic subgroups of E[ell], in a fixed order."""
    B = torsion_basis(E, ell)
    out = [B.Q]
    for c in range(ell):
        out.append(B.P + B.Q * c)
    return out


def _ascending_shift(X: OrientedCurve, ell: int) -> int:
    O = X.order
    O1 = O.superorder(ell)
    return (O.t_omega - ell * O1.t_omega) // 2


def ascending_kernel(X: OrientedCurve, ell: int):
    """Generator of ker(theta - c) on E[ell], the kernel of the ascending step."""
    c = _ascending_shift(X, ell)
    beta = X.theta - c
    M, B, _ = action_matrix(beta, ell)
    gens = [B.combine(a, b) for a, b in kernel_2x2(M, ell)]
    gens = [P for P in gens if not P.is_zero()]
    if len(gens) != 1:
        raise InvalidOrientation(f"orientation is not primitive at {ell}")
    return gens[0]


def ascend(X: OrientedCurve, ell: int, verify: bool | None = None):
    """The unique ascending ell-step, as (oriented codomain, edge).

    Raises AtCrater when the order is already maximal at ell."""
    O = X.order
    if O.conductor % ell:
        raise AtCrater(f"order of discriminant {O.disc} is maximal at {ell}")
    O1 = O.superorder(ell)
    c = _ascending_shift(X, ell)
    K = ascending_kernel(X, ell)
    step = VeluStep(X.curve, K, ell)
    beta = X.theta - c
    pushed = conjugate(IsogenyChain([step], X.curve), beta)
    try:
        q = as_expr(divide_by_integer(pushed, ell, verify))
        q = as_expr(divide_by_integer(q, ell, verify))
    except NotDivisible as exc:  # pragma: no cover - contradicts the kernel choice
        raise VerificationFailed("ascending push-forward is not divisible by ell^2") from exc
    q._degree, q._trace = O1.n_omega, O1.t_omega
    Y = OrientedCurve(step.codomain, O1, q, primitive=True)
    return Y, VolcanoEdge(X, Y, ell, ASCENDING, step)


def classify(X: OrientedCurve, ell: int, K, verify: bool | None = None) -> VolcanoEdge:
    """The edge with kernel <K>, its direction found from the primitive
    order of the codomain."""
    step = VeluStep(X.curve, K, ell)
    phi = IsogenyChain([step], X.curve)
    pushed = conjugate(phi, X.theta)
    E2 = step.codomain
    if not is_divisible(pushed, ell):
        O2, theta2 = from_endomorphism(E2, pushed)
        Y = OrientedCurve(E2, O2, theta2, primitive=X.primitive)
        return VolcanoEdge(X, Y, ell, DESCENDING, step)
    q = as_expr(divide_by_integer(pushed, ell, verify))
    O = X.order
    q._degree, q._trace = O.n_omega, O.t_omega
    if O.conductor % ell == 0:
        c = _ascending_shift(X, ell)
        if is_divisible(q - c, ell):
            O1 = O.superorder(ell)
            q1 = as_expr(divide_by_integer(q - c, ell, verify))
            q1._degree, q1._trace = O1.n_omega, O1.t_omega
            Y = OrientedCurve(E2, O1, q1, primitive=X.primitive)
            return VolcanoEdge(X, Y, ell, ASCENDING, step)
    Y = OrientedCurve(E2, O, q, primitive=X.primitive)
    return VolcanoEdge(X, Y, ell, HORIZONTAL, step)


def neighbors(X: OrientedCurve, ell: int, verify: bool | None = None) -> list[VolcanoEdge]:
    """All ell + 1 edges from X, classified."""
    return [classify(X, ell, K, verify) for K in _line_kernels(X.curve, ell)]


def census(edges: list[VolcanoEdge]) -> dict[str, int]:
    out = {ASCENDING: 0, HORIZONTAL: 0, DESCENDING: 0}
    for e in edges:
        out[e.direction] += 1
    return out


def expected_census(X: OrientedCurve, ell: int) -> dict[str, int]:
    """Edge counts predicted by the volcano structure."""
    O = X.order
    if O.conductor % ell == 0:
        return {ASCENDING: 1, HORIZONTAL: 0, DESCENDING: ell}
    # maximal at ell: the symbol of the local order decides
    D = O.disc
    s = kronecker(D, ell)
    return {ASCENDING: 0, HORIZONTAL: s + 1, DESCENDING: ell - s}


def descend(X: OrientedCurve, ell: int, index: int = 0, verify: bool | None = None) -> OrientedCurve:
    return descend_edge(X, ell, index, verify).target_curve


def descend_edge(X: OrientedCurve, ell: int, index: int = 0, verify: bool | None = None) -> VolcanoEdge:
    """The index-th descending edge (kernels in their fixed order, cyclically)."""
    found = []
    for K in _line_kernels(X.curve, ell):
        step = VeluStep(X.curve, K, ell)
        pushed = conjugate(IsogenyChain([step], X.curve), X.theta)
        if is_divisible(pushed, ell):
            continue
        O2, theta2 = from_endomorphism(step.codomain, pushed)
        Y = OrientedCurve(step.codomain, O2, theta2, primitive=X.primitive)
        found.append(VolcanoEdge(X, Y, ell, DESCENDING, step))
        if len(found) > index:
            return found[index]
    if not found:  # pragma: no cover - every vertex has descending edges
        raise VerificationFailed("no descending edge")
    return found[index % len(found)]


def walk_to_crater(X: OrientedCurve, ell: int, verify: bool | None = None) -> WalkTranscript:
    """Ascend until the order is maximal at ell."""
    tr = WalkTranscript(X)
    cur = X
    while True:
        try:
            cur, edge = ascend(cur, ell, verify)
        except AtCrater:
            return tr
        tr.append(edge)


def depth(X: OrientedCurve, ell: int) -> int:
    f, d = X.order.conductor, 0
    while f % ell == 0:
        f //= ell
        d += 1
    return d


def reduce_cO(X: OrientedCurve, c_factorization=None, verify: bool | None = None):
    """Walk to the order whose conductor is that of X divided by the c-part,
    one prime of c at a time. Returns (endpoint, transcript)."""
    f = X.order.conductor
    if c_factorization is None:
        c_factorization = factor(f) if f > 1 else []
    tr = WalkTranscript(X)
    cur = X
    for ell, e in c_factorization:
        for _ in range(e):
            cur, edge = ascend(cur, ell, verify)
            tr.append(edge)
    return cur, tr


# ---------------------------------------------------------------------------
# export


def explore(X: OrientedCurve, ell: int, depth_cap: int, verify: bool | None = None) -> dict:
    """Breadth-first exploration of the volcano component containing X.

    Nodes are keyed by ClassKey; X should be on the crater. Horizontal
    edges are followed on the crater, descending edges down to depth_cap."""
    if X.order.conductor % ell == 0:
        raise ValueError("start the exploration on the crater")
    nodes: dict = {}
    edges = []
    start_key = enc(X)
    nodes[start_key] = (X, 0)
    frontier = [start_key]
    while frontier:
        nxt = []
        for key in frontier:
            Y, dep = nodes[key]
            for edge in neighbors(Y, ell, verify):
                if edge.direction == ASCENDING:
                    continue
                if edge.direction == DESCENDING and dep >= depth_cap:
                    continue
                tkey = enc(edge.target_curve)
                ndep = dep + (1 if edge.direction == DESCENDING else 0)
                edges.append((key, tkey, edge.direction))
                if tkey not in nodes:
                    nodes[tkey] = (edge.target_curve, ndep)
                    nxt.append(tkey)
        frontier = nxt
    return {"nodes": nodes, "edges": edges, "ell": ell, "root": start_key}


def graph_json(g: dict) -> dict:
    nodes = [{"id": k.hex(), "depth": d, "disc": Y.order.disc, "j": list(Y.curve.j_invariant().c)}
             for k, (Y, d) in g["nodes"].items()]
    nodes.sort(key=lambda n: (n["depth"], n["id"]))
    edges = [{"source": a.hex(), "target": b.hex(), "dir": _DOT_DIR[d]} for a, b, d in g["edges"]]
    edges.sort(key=lambda e: (e["source"], e["target"], e["dir"]))
    return {"ell": g["ell"], "root": g["root"].hex(), "nodes": nodes, "edges": edges}


def graph_dot(g: dict) -> str:
    js = graph_json(g)
    lines = [f"digraph volcano_{js['ell']} {{"]
    for n in js["nodes"]:
        lines.append(f'  "{n["id"]}" [label="d{n["depth"]} D={n["disc"]}"];')
    for e in js["edges"]:
        lines.append(f'  "{e["source"]}" -> "{e["target"]}" [dir="{e["dir"]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_volcano(X: OrientedCurve, ell: int, depth_cap: int, fmt: str = "json",
                   verify: bool | None = None) -> str:
    g = explore(X, ell, depth_cap, verify)
    if fmt == "dot":
        return graph_dot(g)
    return json.dumps(graph_json(g), sort_keys=True, indent=1) + "\n"
