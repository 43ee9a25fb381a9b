"""Structural cost model: multiplierless adder graphs vs. the multiplier
datapath, and the throughput-to-frame-rate estimator.

The multiplierless side synthesizes constant sets into shift/add networks
drawn from one canonical universal graph: every odd value below 2**8 gets
a fixed route built greedily in ascending order, each route chosen to
minimize its dependency closure.  A constant set then costs the union of
its closures, so counts are deterministic upper bounds on the optimum,
never exceed the canonical-signed-digit bound, and are monotone under set
union by construction (closures only accumulate).  Shifts and output
negation are free; only add/subtract nodes count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coeff import ROM_TARGET_BITS, pack_rom, rom_input_set

MAX_CONSTANT_MAGNITUDE = 1 << 8
_VALUE_BOUND = 1 << 11  # partner magnitude bound during route search
_SHIFT_BOUND = 12
_TARGET_LIFT = 3  # match t, 2t, 4t, 8t when pairing shifted forms

RM_MULTIPLIERS = 32
RM_ACCUMULATE_ADDERS = 32  # one feedback adder per multiplier lane
RM_RECOMBINE_ADDERS = 8 + 16 + 32 + 64  # butterfly fold stages up to order 64


def csd_digits(value: int) -> list[int]:
    """Canonical signed-digit (non-adjacent form) digits, LSB first."""
    if value <= 0:
        raise ValueError("CSD defined here for positive integers")
    digits = []
    x = value
    while x:
        if x & 1:
            d = 2 - (x & 3)  # 1 if x % 4 == 1 else -1
            digits.append(d)
            x -= d
        else:
            digits.append(0)
        x >>= 1
    return digits


def odd_reduce(value: int) -> tuple[int, int]:
    """Split |value| into (odd part, power-of-two shift)."""
    v = abs(value)
    if v == 0:
        raise ValueError("zero has no odd part")
    shift = (v & -v).bit_length() - 1
    return v >> shift, shift


@dataclass(frozen=True)
class AdderNode:
    """value = |(lhs << lhs_shift) op (rhs << rhs_shift)| >> down_shift."""

    value: int
    op: str  # "add" | "sub"
    lhs: int
    lhs_shift: int
    rhs: int
    rhs_shift: int
    down_shift: int = 0

    def compute(self) -> int:
        a = self.lhs << self.lhs_shift
        b = self.rhs << self.rhs_shift
        raw = a + b if self.op == "add" else a - b
        return abs(raw) >> self.down_shift


@dataclass
class AdderGraph:
    """Shift/add network realizing a set of constants from the input 1."""

    target_constants: tuple[int, ...]
    nodes: list[AdderNode] = field(default_factory=list)
    target_map: dict[int, tuple[int, int, bool]] = field(default_factory=dict)

    @property
    def adder_count(self) -> int:
        return len(self.nodes)

    @property
    def max_shift(self) -> int:
        shifts = [0]
        for node in self.nodes:
            shifts.extend((node.lhs_shift, node.rhs_shift))
        shifts.extend(shift for _odd, shift, _neg in self.target_map.values())
        return max(shifts)

    def evaluate(self) -> dict[int, int]:
        """Recompute every target from the node list; raises on breakage."""
        values = {1}
        for node in self.nodes:
            if node.lhs not in values or node.rhs not in values:
                raise ValueError("adder node uses an unbuilt operand")
            if node.compute() != node.value:
                raise ValueError("adder node does not compute its value")
            values.add(node.value)
        out = {}
        for target, (odd, shift, negate) in self.target_map.items():
            if odd not in values:
                raise ValueError(f"target {target} not reachable")
            out[target] = (odd << shift) * (-1 if negate else 1)
        return out


def _route_candidates(t: int, pool: dict[int, frozenset[int]]):
    """All one-adder realizations of t from pool values, as AdderNodes."""
    for down in range(_TARGET_LIFT + 1):
        v = t << down
        if v > 2 * _VALUE_BOUND:
            break
        for a in pool:
            for sa in range(_SHIFT_BOUND):
                hi = a << sa
                if hi > 2 * _VALUE_BOUND:
                    break
                for partner, op, swap in (
                    (v - hi, "add", False),
                    (hi - v, "sub", False),
                    (v + hi, "sub", True),
                ):
                    if partner <= 0:
                        continue
                    podd, pshift = odd_reduce(partner)
                    if podd not in pool:
                        continue
                    if swap:  # (podd << pshift) - (a << sa) = v
                        yield AdderNode(t, op, podd, pshift, a, sa, down)
                    else:
                        yield AdderNode(t, op, a, sa, podd, pshift, down)


_universal_cache: dict[int, tuple[AdderNode, frozenset[int]]] | None = None


def _universal_graph() -> dict[int, tuple[AdderNode, frozenset[int]]]:
    """Canonical route and dependency closure for every odd < 2**8.

    Built once, ascending; each value takes the candidate whose operand
    closures union smallest (ties broken by node field order).  Closures
    include the value itself; the input 1 has an empty closure.
    """
    global _universal_cache
    if _universal_cache is not None:
        return _universal_cache
    closures: dict[int, frozenset[int]] = {1: frozenset()}
    graph: dict[int, tuple[AdderNode, frozenset[int]]] = {}
    for t in range(3, MAX_CONSTANT_MAGNITUDE, 2):
        best: tuple[int, tuple, AdderNode, frozenset[int]] | None = None
        for node in _route_candidates(t, closures):
            closure = closures[node.lhs] | closures[node.rhs] | {t}
            key = (
                len(closure),
                (node.lhs, node.lhs_shift, node.rhs, node.rhs_shift,
                 node.op, node.down_shift),
            )
            if best is None or key < (best[0], best[1]):
                best = (len(closure), key[1], node, closure)
        if best is None:
            raise AssertionError(f"no adder route found for {t}")
        closures[t] = best[3]
        graph[t] = (best[2], best[3])
    _universal_cache = graph
    return graph


def mcm_adder_graph(constants) -> AdderGraph:
    """Adder graph covering every constant in the set.

    Constants must be nonzero with magnitude below 2**8.  The empty set
    yields an empty graph.  Common subexpressions are shared through the
    canonical routes, so adder_count is monotone under set union.
    """
    consts = tuple(sorted(set(int(c) for c in constants)))
    for c in consts:
        if c == 0:
            raise ValueError("constants must be nonzero")
        if abs(c) >= MAX_CONSTANT_MAGNITUDE:
            raise ValueError(f"constant {c} exceeds 8-bit magnitude")
    graph = AdderGraph(consts)
    if not consts:
        return graph
    universal = _universal_graph()
    needed: set[int] = set()
    for c in consts:
        odd, shift = odd_reduce(c)
        graph.target_map[c] = (odd, shift, c < 0)
        if odd != 1:
            needed |= universal[odd][1]
    graph.nodes = [universal[v][0] for v in sorted(needed)]
    graph.evaluate()
    return graph


# --- architecture comparison ------------------------------------------------


def _coefficient_lines() -> list[tuple[int, ...]]:
    """Distinct per-sample constant sets across all stored submatrices."""
    lines: list[tuple[int, ...]] = []
    seen = set()
    for kind, n, block in rom_input_set():
        if kind.endswith("_rep"):
            continue  # replicas hold identical constants
        for row in np.asarray(block):
            consts = frozenset(odd_reduce(int(v))[0] for v in row if v != 0)
            if consts and consts not in seen:
                seen.add(consts)
                lines.append(tuple(sorted(consts)))
    return lines


@dataclass
class CostReport:
    architecture: str
    adders: int
    multipliers: int
    rom_bits: int
    notes: str

    def as_dict(self) -> dict:
        return {
            "architecture": self.architecture,
            "adders": self.adders,
            "multipliers": self.multipliers,
            "rom_bits": self.rom_bits,
            "notes": self.notes,
        }


def architecture_cost(arch: str) -> CostReport:
    """Structural counts for the full transform configuration.

    These are structural proxies (adders, multipliers, ROM bits), not gate
    counts; synthesis-level figures are out of scope.
    """
    arch = arch.lower()
    if arch == "rm":
        packed = pack_rom()
        notes = (
            f"32 shared multipliers; {RM_ACCUMULATE_ADDERS} accumulate + "
            f"{RM_RECOMBINE_ADDERS} butterfly recombine adders; ROM budget "
            f"{ROM_TARGET_BITS} bits (canonical packed layout: {packed.total_bits} bits "
            f"in {packed.column_count} columns)."
        )
        return CostReport("rm", RM_ACCUMULATE_ADDERS + RM_RECOMBINE_ADDERS, RM_MULTIPLIERS,
                          ROM_TARGET_BITS, notes)
    if arch == "mcm":
        total = 0
        for line in _coefficient_lines():
            total += mcm_adder_graph(line).adder_count
        total += RM_RECOMBINE_ADDERS  # butterfly recombination is common to both
        notes = (
            "Shift/add synthesis per distinct coefficient line via canonical "
            "shared routes; counts are upper bounds on the optimum (the exact "
            "multiplierless search is substituted by a documented heuristic). "
            "No coefficient ROM."
        )
        return CostReport("mcm", total, 0, 0, notes)
    raise ValueError("architecture must be 'mcm' or 'rm'")


def fps_estimate(
    clock_hz: float,
    width: int,
    height: int,
    chroma_factor: float = 1.5,
    passes: int = 2,
) -> float:
    """Frames per second at 2 px/cycle: 2*clock / (w*h*chroma*passes)."""
    if clock_hz <= 0 or width <= 0 or height <= 0 or chroma_factor <= 0 or passes <= 0:
        raise ValueError("all fps parameters must be positive")
    return (2.0 * clock_hz) / (width * height * chroma_factor * passes)


def fps_report(clock_hz: float = 600e6) -> dict:
    """Estimator output for the 4K operating point, with both the
    arithmetic estimate and the more conservative published rate."""
    est = fps_estimate(clock_hz, 3840, 2160, 1.5, 2)
    return {
        "clock_hz": clock_hz,
        "width": 3840,
        "height": 2160,
        "chroma_factor": 1.5,
        "passes": 2,
        "fps_estimate": est,
        "fps_luma_single_pass": fps_estimate(clock_hz, 3840, 2160, 1.0, 1),
        "reported_conservative_fps": 30,
        "note": (
            "Estimate assumes 4:2:0 chroma (x1.5) and two folded 1-D passes; "
            "the conservative 30 fps figure includes unmodeled system overhead."
        ),
    }
