"""Structured observable sets G1-G4, the full set and custom lists.

Nearest neighbours are taken on an open chain. The G4 extension adds every
XX/YY/ZZ pair at distance >= 2 plus Z on all sites; this gives 21, 33 and 48
operators for n = 3, 4, 5.
"""
from dataclasses import dataclass
import json

from .pauli import MAX_QUBITS, PauliError, PauliString, enumerate_paulis, parse_label

TAGS = ("G1", "G2", "G3", "G4", "FULL", "CUSTOM")
STRUCTURED = ("G1", "G2", "G3", "G4")


@dataclass(frozen=True)
class OperatorSet:
    n: int
    operators: tuple
    tag: str

    def __post_init__(self):
        object.__setattr__(self, "operators", tuple(self.operators))
        if self.tag not in TAGS:
            raise PauliError(f"unknown operator-set tag {self.tag!r}")
        seen = set()
        for p in self.operators:
            if p.n != self.n:
                raise PauliError(f"operator {p.label} has length {p.n}, expected {self.n}")
            if p.is_identity:
                raise PauliError(f"operator set may not contain the identity {p.label}")
            if p in seen:
                raise PauliError(f"duplicate operator {p.label}")
            seen.add(p)

    def __len__(self):
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)

    def __contains__(self, p):
        return p in set(self.operators)

    @property
    def labels(self) -> list:
        return [p.label for p in self.operators]


def _site_op(n, sites, axis):
    chars = ["I"] * n
    for s in sites:
        chars[s] = axis
    return PauliString("".join(chars))


def _singles(n):
    return [_site_op(n, [i], a) for i in range(n) for a in "XYZ"]


def _pairs(n, pairs):
    return [_site_op(n, [i, j], a) for i, j in pairs for a in "XYZ"]


def g1(n: int) -> OperatorSet:
    if n < 1:
        raise PauliError("G1 needs n >= 1")
    return OperatorSet(n, _singles(n), "G1")


def g2(n: int) -> OperatorSet:
    if n < 2:
        raise PauliError("G2 needs n >= 2")
    ops = _singles(n) + _pairs(n, [(i, i + 1) for i in range(n - 1)])
    return OperatorSet(n, ops, "G2")


def g3(n: int) -> OperatorSet:
    if n < 2:
        raise PauliError("G3 needs n >= 2")
    ops = list(g2(n).operators)
    # at n = 2 the global strings XX and YY are already nearest-neighbour pairs
    ops += [p for p in (PauliString("X" * n), PauliString("Y" * n)) if p not in ops]
    return OperatorSet(n, ops, "G3")


def g4(n: int) -> OperatorSet:
    if n < 3:
        raise PauliError("G4 needs n >= 3")
    far = [(i, j) for i in range(n) for j in range(i + 2, n)]
    ops = list(g3(n).operators) + _pairs(n, far) + [PauliString("Z" * n)]
    return OperatorSet(n, ops, "G4")


def full_set(n: int) -> OperatorSet:
    if n > MAX_QUBITS:
        raise PauliError(f"{n} qubits exceeds the cap of {MAX_QUBITS}")
    return OperatorSet(n, enumerate_paulis(n), "FULL")


def parse_custom(labels, n: int) -> OperatorSet:
    """CUSTOM set from label strings, keeping their order."""
    ops, seen = [], set()
    for text in labels:
        try:
            p = parse_label(text, n)
        except PauliError as exc:
            raise PauliError(f"bad operator {text!r}: {exc}") from None
        if p.is_identity:
            raise PauliError(f"bad operator {text!r}: identity is not allowed")
        if p in seen:
            raise PauliError(f"bad operator {text!r}: duplicate")
        seen.add(p)
        ops.append(p)
    return OperatorSet(n, ops, "CUSTOM")


def load_custom(path, n: int) -> OperatorSet:
    """Read a JSON array of labels."""
    with open(path) as fh:
        labels = json.load(fh)
    if not isinstance(labels, list):
        raise PauliError(f"{path}: expected a JSON array of Pauli labels")
    return parse_custom(labels, n)


_BUILDERS = {"G1": g1, "G2": g2, "G3": g3, "G4": g4, "FULL": full_set}


def by_tag(tag: str, n: int) -> OperatorSet:
    """Build a named set; ``tag`` is case-insensitive (``"g3"``, ``"full"``)."""
    key = tag.upper()
    if key not in _BUILDERS:
        raise PauliError(f"unknown operator set {tag!r}; choose from {', '.join(_BUILDERS)}")
    return _BUILDERS[key](n)


def param_count(tag: str, n: int) -> int:
    """Number of model parameters: |set| for G-models, 4**n - 1 for full methods."""
    key = tag.upper()
    if key in ("MLE", "PSD", "FULL"):
        return 4 ** n - 1
    return len(by_tag(key, n))
