"""Netlist parser and ideal-opamp nodal analysis over polynomials in s.

This is the toolkit's independent route to a transfer function: instead
of substituting into a closed form, it stamps conductances, sC terms,
and ideal-opamp constraints into a matrix of degree<=1 polynomials and
eliminates it fraction-free (Bareiss).  Arithmetic runs over exact
dyadic rationals — every float element value converts to Fraction
without loss — so intermediate divisions are exact over the polynomial
ring, structural zeros stay exactly zero, degrees never inflate, and
each reported coefficient is the correctly rounded float of the exact
rational answer.  Cross-checking this engine against the closed forms
is what the test suite leans on.

Netlist text format, one element per line::

    # comment
    R<name> nodeA nodeB value     resistor (ohms)
    C<name> nodeA nodeB value     capacitor (farads)
    O<name> in+ in- out           ideal opamp
    .in node                      driven input node (exactly one)
    .out node                     observed output node

Node ``0`` is ground.  Values take engineering suffixes k/M/m/u/n/p.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ToolkitError
from .ratfunc import Polynomial, RationalFunction

MAX_DEGREE = 8  # entries beyond this mean a circuit outside this tool's scope

# Internal ring: polynomials as tuples of Fractions, ascending powers of s.
_FZERO: tuple[Fraction, ...] = (Fraction(0),)
_FONE: tuple[Fraction, ...] = (Fraction(1),)


class NetlistSyntaxError(ToolkitError):
    """Malformed netlist text; message carries the 1-based line number."""


class NetlistValidationError(ToolkitError):
    """Structurally well-formed netlist that violates a circuit rule."""


class SingularSystemError(ToolkitError):
    """The nodal system has an identically zero determinant."""


class UnsupportedCircuitError(ToolkitError):
    """Polynomial degree exceeded MAX_DEGREE during elimination."""


class TopologyMismatchError(ToolkitError):
    """The netlist is not the bandpass twin-T shape the op requires."""


@dataclass(frozen=True)
class Resistor:
    name: str
    node_a: str
    node_b: str
    ohms: float


@dataclass(frozen=True)
class Capacitor:
    name: str
    node_a: str
    node_b: str
    farads: float


@dataclass(frozen=True)
class IdealOpamp:
    name: str
    in_plus: str
    in_minus: str
    out: str


@dataclass(frozen=True)
class VoltageInput:
    node: str


@dataclass(frozen=True)
class PolyMatrix:
    """Square MNA system matrix; every stamp entry has degree <= 1."""

    entries: tuple[tuple[Polynomial, ...], ...]
    unknowns: tuple[str, ...]


@dataclass(frozen=True)
class Netlist:
    elements: tuple
    output_node: str
    nodes: frozenset = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(self.elements))
        nodes = {"0"}
        seen_names = set()
        inputs = []
        opamp_outputs = set()
        for el in self.elements:
            if isinstance(el, VoltageInput):
                if el.node == "0":
                    raise NetlistValidationError(
                        "the input cannot drive ground")
                inputs.append(el)
                nodes.add(el.node)
                continue
            if el.name in seen_names:
                raise NetlistValidationError(f"duplicate element {el.name!r}")
            seen_names.add(el.name)
            if isinstance(el, (Resistor, Capacitor)):
                nodes.update((el.node_a, el.node_b))
            elif isinstance(el, IdealOpamp):
                nodes.update((el.in_plus, el.in_minus, el.out))
                if el.out in opamp_outputs:
                    raise NetlistValidationError(
                        f"node {el.out!r} driven by more than one opamp")
                opamp_outputs.add(el.out)
            else:
                raise NetlistValidationError(f"unknown element {el!r}")
        if len(inputs) != 1:
            raise NetlistValidationError(
                f"need exactly one input, found {len(inputs)}")
        if self.output_node not in nodes:
            raise NetlistValidationError(
                f"output node {self.output_node!r} is not connected")
        object.__setattr__(self, "nodes", frozenset(nodes))

    @property
    def input_node(self) -> str:
        for el in self.elements:
            if isinstance(el, VoltageInput):
                return el.node
        raise AssertionError("validated netlist lost its input")


_VALUE_RE = re.compile(
    r"([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)([kMmunp])?\Z")
_SUFFIX = {"k": 1e3, "M": 1e6, "m": 1e-3, "u": 1e-6, "n": 1e-9, "p": 1e-12}


def _parse_value(token: str, lineno: int) -> float:
    m = _VALUE_RE.match(token)
    if m is None:
        raise NetlistSyntaxError(f"line {lineno}: bad value {token!r}")
    value = float(m.group(1))
    if m.group(2):
        value *= _SUFFIX[m.group(2)]
    if not value > 0.0:
        raise NetlistSyntaxError(
            f"line {lineno}: element values must be positive, got {token!r}")
    return value


def parse_netlist(text: str) -> Netlist:
    """Parse netlist text into a validated Netlist."""
    elements: list = []
    input_node: str | None = None
    input_line = 0
    output_node: str | None = None
    output_line = 0
    referenced: set[str] = {"0"}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        if head.startswith("."):
            if head == ".in":
                if len(tokens) != 2:
                    raise NetlistSyntaxError(
                        f"line {lineno}: .in takes exactly one node")
                if input_node is not None:
                    raise NetlistSyntaxError(
                        f"line {lineno}: duplicate .in "
                        f"(first on line {input_line})")
                input_node, input_line = tokens[1], lineno
            elif head == ".out":
                if len(tokens) != 2:
                    raise NetlistSyntaxError(
                        f"line {lineno}: .out takes exactly one node")
                if output_node is not None:
                    raise NetlistSyntaxError(
                        f"line {lineno}: duplicate .out "
                        f"(first on line {output_line})")
                output_node, output_line = tokens[1], lineno
            else:
                raise NetlistSyntaxError(
                    f"line {lineno}: unknown directive {head!r}")
            continue
        kind = head[0].upper()
        if kind in ("R", "C"):
            if len(tokens) != 4:
                raise NetlistSyntaxError(
                    f"line {lineno}: {head!r} needs 'name nodeA nodeB value'")
            value = _parse_value(tokens[3], lineno)
            cls = Resistor if kind == "R" else Capacitor
            elements.append(cls(head, tokens[1], tokens[2], value))
            referenced.update(tokens[1:3])
        elif kind == "O":
            if len(tokens) != 4:
                raise NetlistSyntaxError(
                    f"line {lineno}: {head!r} needs 'name in+ in- out'")
            elements.append(IdealOpamp(head, tokens[1], tokens[2], tokens[3]))
            referenced.update(tokens[1:4])
        else:
            raise NetlistSyntaxError(
                f"line {lineno}: unknown element type {head!r}")
    if input_node is None:
        raise NetlistSyntaxError("missing .in directive")
    if output_node is None:
        raise NetlistSyntaxError("missing .out directive")
    for label, node in ((".in", input_node), (".out", output_node)):
        if node not in referenced:
            raise NetlistValidationError(
                f"{label} names node {node!r}, which no element touches")
    elements.append(VoltageInput(input_node))
    return Netlist(tuple(elements), output_node)


# ---------------------------------------------------------------------------
# Polynomial-matrix elimination over tuples of Fractions


def _ftrim(cs: list[Fraction]) -> tuple[Fraction, ...]:
    while len(cs) > 1 and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


def _fmul(a: tuple[Fraction, ...], b: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    if a == _FZERO or b == _FZERO:
        return _FZERO
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _ftrim(out)


def _fsub(a: tuple[Fraction, ...], b: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    n = max(len(a), len(b))
    zero = Fraction(0)
    out = [(a[i] if i < len(a) else zero) - (b[i] if i < len(b) else zero)
           for i in range(n)]
    return _ftrim(out)


def _fadd(a: tuple[Fraction, ...], b: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    n = max(len(a), len(b))
    zero = Fraction(0)
    out = [(a[i] if i < len(a) else zero) + (b[i] if i < len(b) else zero)
           for i in range(n)]
    return _ftrim(out)


def _fdiv_exact(u: tuple[Fraction, ...], v: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    """Division known to be exact by the Bareiss identity."""
    if v == _FONE or u == _FZERO:
        return u
    vd = len(v) - 1
    qd = len(u) - 1 - vd
    if qd < 0:
        raise AssertionError("Bareiss division degree underflow")
    vl = v[-1]
    rem = list(u)
    quot = [Fraction(0)] * (qd + 1)
    for k in range(qd, -1, -1):
        c = rem[vd + k] / vl
        quot[k] = c
        if c:
            for j in range(vd + 1):
                rem[j + k] -= c * v[j]
    return _ftrim(quot)


def _solve_last_unknown(
        matrix: list[list[tuple[Fraction, ...]]],
) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Fraction-free elimination of an n x (n+1) augmented system.

    Returns (num, den) for the last unknown: after eliminating the first
    n-1 columns, the final row reads den*x_last = num.  Row swaps leave
    that ratio untouched (both entries live in the same row).
    """
    n = len(matrix)
    prev = _FONE
    for k in range(n - 1):
        pivot_row = -1
        pivot_degree = MAX_DEGREE + 2
        for i in range(k, n):
            entry = matrix[i][k]
            if entry == _FZERO:
                continue
            if len(entry) - 1 < pivot_degree:
                pivot_row, pivot_degree = i, len(entry) - 1
        if pivot_row < 0:
            raise SingularSystemError(
                "system determinant is identically zero")
        if pivot_row != k:
            matrix[k], matrix[pivot_row] = matrix[pivot_row], matrix[k]
        pivot = matrix[k][k]
        for i in range(k + 1, n):
            row_i = matrix[i]
            head = row_i[k]
            for j in range(k + 1, n + 1):
                num = _fsub(_fmul(pivot, row_i[j]), _fmul(head, matrix[k][j]))
                entry = _fdiv_exact(num, prev)
                if len(entry) - 1 > MAX_DEGREE:
                    raise UnsupportedCircuitError(
                        f"intermediate degree {len(entry) - 1} exceeds "
                        f"{MAX_DEGREE}; circuit too large for this engine")
                row_i[j] = entry
            row_i[k] = _FZERO
        prev = pivot
    den = matrix[n - 1][n - 1]
    num = matrix[n - 1][n]
    if den == _FZERO:
        raise SingularSystemError("system determinant is identically zero")
    return num, den


def _stamp_system(n: Netlist) -> tuple[list[list[tuple[Fraction, ...]]], list[str]]:
    """Assemble the augmented MNA system with V(output) ordered last.

    Unknowns: node voltages (output last), then the input-source branch
    current, then one branch current per opamp.  Rows: KCL per non-ground
    node, the source constraint, and one V+ = V- row per opamp.
    """
    non_ground = sorted(n.nodes - {"0"})
    node_order = [x for x in non_ground if x != n.output_node]
    opamps = [el for el in n.elements if isinstance(el, IdealOpamp)]
    currents = ["i(input)"] + [f"i({op.name})" for op in opamps]
    unknowns = node_order + currents + [n.output_node]
    col = {name: i for i, name in enumerate(unknowns)}
    dim = len(unknowns)
    matrix = [[_FZERO] * (dim + 1) for _ in range(dim)]
    kcl = {node: i for i, node in enumerate(non_ground)}

    def add(row: int, column: int, p: tuple[Fraction, ...]) -> None:
        matrix[row][column] = _fadd(matrix[row][column], p)

    for el in n.elements:
        if isinstance(el, (Resistor, Capacitor)):
            if isinstance(el, Resistor):
                admittance = (Fraction(1) / Fraction(el.ohms),)
            else:
                admittance = (Fraction(0), Fraction(el.farads))
            for this, other in ((el.node_a, el.node_b),
                                (el.node_b, el.node_a)):
                if this == "0":
                    continue
                add(kcl[this], col[this], admittance)
                if other != "0":
                    add(kcl[this], col[other], tuple(-c for c in admittance))
    source_row = len(non_ground)
    for el in n.elements:
        if isinstance(el, VoltageInput):
            add(source_row, col[el.node], _FONE)
            matrix[source_row][dim] = _FONE         # V(input) = 1
            add(kcl[el.node], col["i(input)"], _FONE)
    for k, op in enumerate(opamps):
        row = source_row + 1 + k
        if op.in_plus != "0":
            add(row, col[op.in_plus], _FONE)
        if op.in_minus != "0":
            add(row, col[op.in_minus], (Fraction(-1),))  # V(in+) = V(in-)
        if op.out != "0":
            add(kcl[op.out], col[f"i({op.name})"], _FONE)
    return matrix, unknowns


def stamp_system(n: Netlist) -> tuple[PolyMatrix, tuple[Polynomial, ...]]:
    """The assembled square system and right-hand side, as float views."""
    matrix, unknowns = _stamp_system(n)
    as_poly = [
        [Polynomial(tuple(float(c) for c in entry)) for entry in row]
        for row in matrix
    ]
    rhs = tuple(row[-1] for row in as_poly)
    entries = tuple(tuple(row[:-1]) for row in as_poly)
    return PolyMatrix(entries, tuple(unknowns)), rhs


def _to_ratfunc(num: tuple[Fraction, ...],
                den: tuple[Fraction, ...]) -> RationalFunction:
    """Normalize in exact arithmetic, then round each coefficient once."""
    if num == _FZERO:
        return RationalFunction(Polynomial((0.0,)), Polynomial((1.0,)), 1)
    pivot = den[0] if den[0] != 0 else den[-1]
    num = tuple(c / pivot for c in num)
    den = tuple(c / pivot for c in den)
    sign = 1
    if num[-1] < 0:
        sign = -1
        num = tuple(-c for c in num)
    return RationalFunction(Polynomial(tuple(float(c) for c in num)),
                            Polynomial(tuple(float(c) for c in den)), sign)


def transfer_function(n: Netlist) -> RationalFunction:
    """H(s) = V(output)/V(input) by fraction-free elimination."""
    if n.output_node == "0":
        return RationalFunction(Polynomial((0.0,)), Polynomial((1.0,)), 1)
    matrix, _ = _stamp_system(n)
    num, den = _solve_last_unknown(matrix)
    return _to_ratfunc(num, den)


def noninverting_variant(n: Netlist) -> Netlist:
    """Exchange the input node and ground across the passive network.

    Only defined for the bandpass twin-T shape (3 R, 3 C, one opamp whose
    noninverting input sits at ground or at the driven node).  Applying
    the op twice returns the original netlist.
    """
    resistors = [el for el in n.elements if isinstance(el, Resistor)]
    capacitors = [el for el in n.elements if isinstance(el, Capacitor)]
    opamps = [el for el in n.elements if isinstance(el, IdealOpamp)]
    src = n.input_node
    if (len(resistors), len(capacitors), len(opamps)) != (3, 3, 1):
        raise TopologyMismatchError(
            "expected 3 resistors, 3 capacitors, and one opamp, got "
            f"{len(resistors)}R/{len(capacitors)}C/{len(opamps)}O")
    if opamps[0].in_plus not in ("0", src):
        raise TopologyMismatchError(
            "opamp noninverting input must sit at ground or at the input")

    def swap(node: str) -> str:
        if node == src:
            return "0"
        if node == "0":
            return src
        return node

    swapped: list = []
    for el in n.elements:
        if isinstance(el, Resistor):
            swapped.append(Resistor(el.name, swap(el.node_a),
                                    swap(el.node_b), el.ohms))
        elif isinstance(el, Capacitor):
            swapped.append(Capacitor(el.name, swap(el.node_a),
                                     swap(el.node_b), el.farads))
        elif isinstance(el, IdealOpamp):
            swapped.append(IdealOpamp(el.name, swap(el.in_plus),
                                      swap(el.in_minus), swap(el.out)))
        else:
            swapped.append(el)  # the VoltageInput stays on the driven node
    return Netlist(tuple(swapped), swap(n.output_node))
