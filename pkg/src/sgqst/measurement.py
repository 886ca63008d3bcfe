"""Synthetic finite-shot Pauli measurement data.

Random numbers come from numpy's Philox4x64-10 counter-based generator.
Record ``i`` of a dataset with seed ``s`` is drawn from the stream keyed by
the 128-bit pair ``(s, i)`` with the counter starting at zero, so records
are independent of generation order and of each other.
"""
from dataclasses import asdict, dataclass, field

import numpy as np

from .pauli import PauliString, expectations, pauli_masks, parse_label
from .states import DensityMatrix

SEED_MASK = (1 << 64) - 1
REALIZABLE_TOL = 1e-9


class MeasurementError(ValueError):
    pass


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for the (seed, index) pair."""
    if not 0 <= seed <= SEED_MASK or not 0 <= index <= SEED_MASK:
        raise MeasurementError("seed and stream index must be unsigned 64-bit integers")
    key = np.array([seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class NoiseModel:
    depolarizing_p: float = 0.0
    dephasing_p: float = 0.0
    readout_eps: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.depolarizing_p <= 1.0:
            raise MeasurementError(f"depolarizing_p={self.depolarizing_p} outside [0, 1]")
        if not 0.0 <= self.dephasing_p <= 1.0:
            raise MeasurementError(f"dephasing_p={self.dephasing_p} outside [0, 1]")
        if not 0.0 <= self.readout_eps <= 0.5:
            raise MeasurementError(f"readout_eps={self.readout_eps} outside [0, 0.5]")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: float(v) for k, v in d.items()})


def calibrated_depolarizing(n: int, target_fidelity: float) -> float:
    """Depolarizing strength p with (1 - p) + p / 2**n equal to ``target_fidelity``."""
    return (1.0 - target_fidelity) / (1.0 - 2.0 ** -n)


@dataclass(frozen=True)
class MeasurementRecord:
    pauli: PauliString
    shots: int
    estimate: float

    def __post_init__(self):
        if self.shots < 1:
            raise MeasurementError("shots must be positive")
        k = self.shots * (1.0 + self.estimate) / 2.0
        if abs(k - round(k)) > REALIZABLE_TOL or not -1.0 <= self.estimate <= 1.0:
            raise MeasurementError(
                f"estimate {self.estimate!r} for {self.pauli.label} is not realizable with {self.shots} shots")

    @property
    def plus_count(self) -> int:
        return int(round(self.shots * (1.0 + self.estimate) / 2.0))


@dataclass(frozen=True)
class Dataset:
    n: int
    records: tuple
    seed: int = 0
    noise: NoiseModel = field(default_factory=NoiseModel)
    state_tag: str = "ghz"

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        seen = set()
        for r in self.records:
            if r.pauli.n != self.n:
                raise MeasurementError(f"record {r.pauli.label} has length {r.pauli.n}, expected {self.n}")
            if r.pauli in seen:
                raise MeasurementError(f"duplicate record for {r.pauli.label}")
            seen.add(r.pauli)

    def estimates(self) -> dict:
        """Mapping PauliString -> estimate."""
        return {r.pauli: r.estimate for r in self.records}

    def labels(self) -> list:
        return [r.pauli.label for r in self.records]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "state": self.state_tag,
            "noise": self.noise.to_dict(),
            "records": [{"pauli": r.pauli.label, "shots": r.shots, "estimate": r.estimate}
                        for r in self.records],
        }

    @classmethod
    def from_dict(cls, d) -> "Dataset":
        n = int(d["n"])
        records = [MeasurementRecord(parse_label(r["pauli"], n), int(r["shots"]), float(r["estimate"]))
                   for r in d["records"]]
        return cls(n=n, records=records, seed=int(d.get("seed", 0)),
                   noise=NoiseModel.from_dict(d.get("noise", {})), state_tag=str(d.get("state", "")))


def apply_noise(rho, noise: NoiseModel) -> DensityMatrix:
    """Per-qubit phase flips followed by global depolarizing.

    Readout error is not a state channel; it is applied when sampling.
    """
    m = np.array(getattr(rho, "matrix", rho), dtype=complex)
    d = m.shape[0]
    n = d.bit_length() - 1
    pz = noise.dephasing_p
    if pz > 0:
        idx = np.arange(d)
        for q in range(n):
            s = 1.0 - 2.0 * ((idx >> (n - 1 - q)) & 1)
            m = (1.0 - pz) * m + pz * (s[:, None] * s[None, :]) * m
    p = noise.depolarizing_p
    m = (1.0 - p) * m + p * np.eye(d) / d
    return DensityMatrix(m)


def _draw(m, shots, rng):
    prob = min(max((1.0 + m) / 2.0, 0.0), 1.0)
    k = rng.binomial(shots, prob)
    return 2.0 * k / shots - 1.0


def sample_expectation(rho, p: PauliString, shots: int, rng: np.random.Generator,
                       readout_eps: float = 0.0) -> MeasurementRecord:
    """Binomial shot estimate of Tr(rho P), with parity damping (1 - 2 eps)**weight."""
    if p.is_identity:
        raise MeasurementError("the identity expectation is fixed at 1 and cannot be sampled")
    if shots < 1:
        raise MeasurementError("shots must be positive")
    m = (1.0 - 2.0 * readout_eps) ** p.weight * float(expectations(rho, [p])[0])
    return MeasurementRecord(p, int(shots), _draw(m, shots, rng))


def generate_dataset(state, operators, shots: int, noise: NoiseModel = None, seed: int = 0,
                     state_tag: str = "ghz") -> Dataset:
    """Noisy state -> one binomial record per operator, record i on substream (seed, i)."""
    noise = noise or NoiseModel()
    ops = list(getattr(operators, "operators", operators))
    if not ops:
        raise MeasurementError("operator list is empty")
    if len(set(ops)) != len(ops):
        dup = next(p for p in ops if ops.count(p) > 1)
        raise MeasurementError(f"duplicate operator {dup.label}")
    if any(p.is_identity for p in ops):
        raise MeasurementError("the identity cannot be sampled")
    noisy = apply_noise(state, noise)
    if any(p.n != noisy.n for p in ops):
        raise MeasurementError(f"operators must all act on {noisy.n} qubits")
    exact = expectations(noisy, ops, pauli_masks(ops))
    damp = (1.0 - 2.0 * noise.readout_eps) ** np.array([p.weight for p in ops])
    records = [MeasurementRecord(p, int(shots), _draw(m, shots, substream(seed, i)))
               for i, (p, m) in enumerate(zip(ops, exact * damp))]
    return Dataset(n=noisy.n, records=records, seed=seed, noise=noise, state_tag=state_tag)


def exact_dataset(state, operators, shots: int = 1 << 20, state_tag: str = "exact") -> Dataset:
    """Dataset holding exact expectations rather than sampled ones.

    The estimates are rounded to the nearest multiple of 2/shots so records
    stay realizable; with the default 2**20 shots the rounding is below 1e-6.
    """
    ops = list(getattr(operators, "operators", operators))
    exact = expectations(state, ops, pauli_masks(ops))
    est = np.round((1.0 + exact) * shots / 2.0) * 2.0 / shots - 1.0
    return Dataset(n=ops[0].n, records=[MeasurementRecord(p, shots, float(e)) for p, e in zip(ops, est)],
                   state_tag=state_tag)
