"""Three-level (qutrit) density-matrix pulse simulator with decoherence.

Drive samples act through the transmon-ladder control Hamiltonian

    H_k = alpha |2><2| + (w_I/2)(X01 + sqrt2 X12) + (w_Q/2)(Y01 + sqrt2 Y12)

with w_{I,Q} = 4*pi * rabi_coefficient * sample (rad/s); the 4*pi matches the
cos^2 Rabi-fit convention, so a fit at amplitude a returns rabi_coefficient*a
in Hz.  Decoherence is applied per whole gate/idle segment as the exact
exponential of a Lindblad generator (amplitude damping 1->0 and 2->1 at the
same T1, pure dephasing on the 0-1 subspace at 1/Tphi = 1/T2 - 1/(2 T1)); the
dissipative generator commutes with the bare anharmonicity term, so segment
granularity loses nothing.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import NoiseConfigError, SimulationError
from .pulses import Waveform
from .schedule import FrameShift, PulsePlacement, Schedule

# ---------------------------------------------------------------------------
# operators

X01 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex)
X12 = np.array([[0, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=complex)
Y01 = np.array([[0, -1j, 0], [1j, 0, 0], [0, 0, 0]], dtype=complex)
Y12 = np.array([[0, 0, 0], [0, 0, -1j], [0, 1j, 0]], dtype=complex)
P2 = np.diag([0.0, 0.0, 1.0]).astype(complex)

_I3 = np.eye(3, dtype=complex)

#: ideal echoed cross-resonance unitary on the two-qubit subspace,
#: (1/sqrt2) (I(x)X - X(x)Y), control qubit in the first tensor slot.
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
ECR_2Q = (np.kron(np.eye(2), _X) - np.kron(_X, _Y)) / math.sqrt(2)


def ideal_rx(theta: float) -> np.ndarray:
    """2x2 x-rotation, the fine-tune target for drive pulses."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def embed_qubit_pair(u4: np.ndarray) -> np.ndarray:
    """Embed a two-qubit unitary into the qutrit pair space, identity on leakage."""
    out = np.eye(9, dtype=complex)
    idx = [0, 1, 3, 4]  # |00>,|01>,|10>,|11> in base-3 pair labels
    out[np.ix_(idx, idx)] = u4
    return out


# ---------------------------------------------------------------------------
# noise model


def _per_qubit(value, qubit):
    if value is None:
        return None
    if np.isscalar(value):
        return float(value)
    return None if value[qubit] is None else float(value[qubit])


@dataclass(frozen=True)
class NoiseModel:
    """Per-qubit decoherence and drive parameters.

    T1/T2 are in ns; ``None`` (or inf) disables the corresponding decay.
    ``rabi_coefficient_hz`` is the fitted Rabi frequency per unit drive
    amplitude.  ``ecr_fidelity`` sets the depolarizing strength proxy
    1 - fidelity applied around the ideal two-qubit unitary.
    """

    t1_ns: object = 180_000.0
    t2_ns: object = 120_000.0
    anharmonicity_hz: object = -330e6
    rabi_coefficient_hz: object = 1.05e8
    ecr_fidelity: float = 0.99

    def __post_init__(self):
        if not 0.0 <= self.ecr_fidelity <= 1.0:
            raise NoiseConfigError("ecr_fidelity must lie in [0, 1]")
        n = 1
        for v in (self.t1_ns, self.t2_ns, self.anharmonicity_hz, self.rabi_coefficient_hz):
            if v is not None and not np.isscalar(v):
                n = max(n, len(v))
        for q in range(n):
            t1, t2 = self.t1(q), self.t2(q)
            if math.isfinite(t2) and t2 > 2.0 * t1 + 1e-9:
                raise NoiseConfigError(f"qubit {q}: T2={t2} exceeds 2*T1={2*t1}")
            if self.anharmonicity(q) == 0.0:
                raise NoiseConfigError("anharmonicity must be nonzero")

    def t1(self, qubit: int) -> float:
        v = _per_qubit(self.t1_ns, qubit)
        return math.inf if v is None else v

    def t2(self, qubit: int) -> float:
        v = _per_qubit(self.t2_ns, qubit)
        return math.inf if v is None else v

    def anharmonicity(self, qubit: int) -> float:
        return _per_qubit(self.anharmonicity_hz, qubit)

    def rabi_coefficient(self, qubit: int) -> float:
        return _per_qubit(self.rabi_coefficient_hz, qubit)

    @classmethod
    def noiseless(cls, anharmonicity_hz=-330e6, rabi_coefficient_hz=1.05e8):
        return cls(
            t1_ns=None,
            t2_ns=None,
            anharmonicity_hz=anharmonicity_hz,
            rabi_coefficient_hz=rabi_coefficient_hz,
            ecr_fidelity=1.0,
        )

    @classmethod
    def from_json(cls, data) -> "NoiseModel":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            t1_ns=data.get("t1_ns", 180_000.0),
            t2_ns=data.get("t2_ns", 120_000.0),
            anharmonicity_hz=data.get("anharmonicity_hz", -330e6),
            rabi_coefficient_hz=data.get("rabi_coefficient_hz", 1.05e8),
            ecr_fidelity=data.get("ecr_fidelity", 0.99),
        )

    def to_json(self) -> dict:
        def plain(v):
            return v if (v is None or np.isscalar(v)) else list(v)

        return {
            "t1_ns": plain(self.t1_ns),
            "t2_ns": plain(self.t2_ns),
            "anharmonicity_hz": plain(self.anharmonicity_hz),
            "rabi_coefficient_hz": plain(self.rabi_coefficient_hz),
            "ecr_fidelity": self.ecr_fidelity,
        }


# ---------------------------------------------------------------------------
# unitary propagation

_SQRT2 = math.sqrt(2)
_HX = X01 + _SQRT2 * X12
_HY = Y01 + _SQRT2 * Y12


def hamiltonian_sample(sample: complex, rabi_coefficient_hz: float, anharmonicity_hz: float):
    w_i = 4.0 * math.pi * rabi_coefficient_hz * sample.real
    w_q = 4.0 * math.pi * rabi_coefficient_hz * sample.imag
    return (
        2.0 * math.pi * anharmonicity_hz * P2 + 0.5 * w_i * _HX + 0.5 * w_q * _HY
    )


def propagate_waveform(w: Waveform, nm: NoiseModel, qubit: int = 0) -> np.ndarray:
    """Product of per-sample matrix exponentials; exact for piecewise-constant drive."""
    kappa = nm.rabi_coefficient(qubit)
    alpha = nm.anharmonicity(qubit)
    dt_s = w.dt_ns * 1e-9
    u = _I3.copy()
    for s in w.samples:
        h = hamiltonian_sample(s, kappa, alpha)
        evals, evecs = np.linalg.eigh(h)
        u = (evecs * np.exp(-1j * evals * dt_s)) @ evecs.conj().T @ u
    return u


# ---------------------------------------------------------------------------
# superoperators (row-major vec: vec(A X B) = kron(A, B.T) vec(X))


def unitary_superop(u: np.ndarray) -> np.ndarray:
    return np.kron(u, u.conj())


def _lindblad_superop(hamiltonian, jumps, dim=3):
    ident = np.eye(dim, dtype=complex)
    gen = np.zeros((dim * dim, dim * dim), dtype=complex)
    if hamiltonian is not None:
        gen += -1j * (np.kron(hamiltonian, ident) - np.kron(ident, hamiltonian.T))
    for L in jumps:
        ldl = L.conj().T @ L
        gen += np.kron(L, L.conj())
        gen -= 0.5 * (np.kron(ldl, ident) + np.kron(ident, ldl.T))
    return gen


def _jump_operators(t1_ns: float, t2_ns: float):
    jumps = []
    if math.isfinite(t1_ns):
        t1_s = t1_ns * 1e-9
        l10 = np.zeros((3, 3), dtype=complex)
        l10[0, 1] = 1.0
        l21 = np.zeros((3, 3), dtype=complex)
        l21[1, 2] = 1.0
        jumps += [l10 / math.sqrt(t1_s), l21 / math.sqrt(t1_s)]
    gamma_phi = 0.0
    if math.isfinite(t2_ns):
        gamma_phi = 1.0 / (t2_ns * 1e-9)
        if math.isfinite(t1_ns):
            gamma_phi -= 1.0 / (2.0 * t1_ns * 1e-9)
    if gamma_phi > 0:
        jumps.append(math.sqrt(gamma_phi / 2.0) * np.diag([1.0, -1.0, 0.0]).astype(complex))
    return jumps


def dissipative_generator(nm: NoiseModel, qubit: int) -> np.ndarray:
    """Decoherence-only Lindblad generator: amplitude damping down the ladder
    plus pure dephasing.  Both idle periods and the in-gate decay use it, so
    idle channels form an exact one-parameter semigroup in the duration."""
    return _lindblad_superop(None, _jump_operators(nm.t1(qubit), nm.t2(qubit)))


@dataclass(frozen=True)
class Channel:
    """A completely positive map on 1 or 2 qutrits, stored as a superoperator."""

    superop: np.ndarray
    n_qubits: int = 1

    @property
    def dim(self) -> int:
        return 3**self.n_qubits

    def compose(self, other: "Channel") -> "Channel":
        """self after other."""
        return Channel(self.superop @ other.superop, self.n_qubits)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        d = self.dim
        return (self.superop @ rho.reshape(d * d)).reshape(d, d)

    def choi(self) -> np.ndarray:
        d = self.dim
        return self.superop.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)


def idle_channel(duration_dt: float, nm: NoiseModel, qubit: int = 0, dt_ns: float = 0.5) -> Channel:
    """Pure decoherence over duration_dt samples."""
    if duration_dt < 0:
        raise ValueError("idle duration must be non-negative")
    t_s = duration_dt * dt_ns * 1e-9
    return Channel(expm(t_s * dissipative_generator(nm, qubit)), 1)


#: in-gate decay applies the same decoherence-only channel as idling
decoherence_channel = idle_channel


def gate_channel(w: Waveform, nm: NoiseModel, qubit: int = 0) -> Channel:
    """Unitary conjugation by the propagated waveform, then segment decoherence."""
    u = propagate_waveform(w, nm, qubit)
    dec = decoherence_channel(w.duration, nm, qubit, w.dt_ns)
    return Channel(dec.superop @ unitary_superop(u), 1)


def _pair_superop(s_a: np.ndarray, s_b: np.ndarray) -> np.ndarray:
    """Tensor two single-qutrit superops into one pair superop."""
    ra = s_a.reshape(3, 3, 3, 3)
    rb = s_b.reshape(3, 3, 3, 3)
    return np.einsum("abij,cdkl->acbdikjl", ra, rb).reshape(81, 81)


def _frame_unitary(angle: float) -> np.ndarray:
    """Virtual Rz on the transmon ladder: level n advances by n*angle."""
    return np.diag([1.0, np.exp(1j * angle), np.exp(2j * angle)]).astype(complex)


_PAULI3 = [
    np.diag([1.0, 1.0, 1.0]).astype(complex),
    np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex),
    np.array([[0, -1j, 0], [1j, 0, 0], [0, 0, 1]], dtype=complex),
    np.diag([1.0, -1.0, 1.0]).astype(complex),
]


def _depolarizing_pair_superop(strength: float) -> np.ndarray:
    """Two-qubit Pauli twirl of given strength, identity on leakage levels."""
    mix = np.zeros((81, 81), dtype=complex)
    for pa in _PAULI3:
        for pb in _PAULI3:
            p = np.kron(pa, pb)
            mix += np.kron(p, p.conj())
    return (1.0 - strength) * np.eye(81) + (strength / 16.0) * mix


def ecr_channel(nm: NoiseModel, qubits: tuple[int, int], duration_dt: int = 1320, dt_ns: float = 0.5) -> Channel:
    """Ideal embedded ECR unitary, depolarizing proxy, and segment decoherence."""
    unit = unitary_superop(embed_qubit_pair(ECR_2Q))
    dep = _depolarizing_pair_superop(1.0 - nm.ecr_fidelity)
    dec = _pair_superop(
        decoherence_channel(duration_dt, nm, qubits[0], dt_ns).superop,
        decoherence_channel(duration_dt, nm, qubits[1], dt_ns).superop,
    )
    return Channel(dec @ dep @ unit, 2)


# ---------------------------------------------------------------------------
# state and schedule execution


@dataclass
class DensityState:
    """Density operator over the tensor product of per-qubit 3-level spaces."""

    width: int
    data: np.ndarray = None

    def __post_init__(self):
        if self.data is None:
            d = 3**self.width
            self.data = np.zeros((d, d), dtype=complex)
            self.data[0, 0] = 1.0

    @classmethod
    def ground(cls, width: int) -> "DensityState":
        return cls(width)

    def validate(self, herm_tol=1e-10, psd_tol=1e-8, trace_tol=1e-10):
        rho = self.data
        if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
            raise SimulationError("state lost Hermiticity")
        evals = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
        if evals.min() < -psd_tol:
            raise SimulationError(f"state not PSD (min eigenvalue {evals.min():.3e})")
        if rho.trace().real > 1.0 + trace_tol:
            raise SimulationError("state trace exceeds 1")

    def apply_local_unitary(self, u: np.ndarray, qubits: tuple[int, ...]):
        w = self.width
        rho = self.data.reshape((3,) * (2 * w))
        row_axes = [q for q in qubits]
        col_axes = [w + q for q in qubits]
        k = len(qubits)
        uk = u.reshape((3,) * (2 * k))
        rho = np.tensordot(uk, rho, axes=(list(range(k, 2 * k)), row_axes))
        # tensordot put the new row axes first; restore layout
        rho = np.moveaxis(rho, list(range(k)), row_axes)
        ukc = u.conj().reshape((3,) * (2 * k))
        rho = np.tensordot(rho, ukc, axes=(col_axes, list(range(k, 2 * k))))
        rho = np.moveaxis(rho, list(range(-k, 0)), col_axes)
        self.data = rho.reshape(3**w, 3**w)

    def apply_local_superop(self, superop: np.ndarray, qubits: tuple[int, ...]):
        w = self.width
        k = len(qubits)
        rho = self.data.reshape((3,) * (2 * w))
        s = superop.reshape((3,) * (4 * k))
        # superop indices: out-rows (k), out-cols (k), in-rows (k), in-cols (k)
        in_axes = [q for q in qubits] + [w + q for q in qubits]
        rho = np.tensordot(s, rho, axes=(list(range(2 * k, 4 * k)), in_axes))
        rho = np.moveaxis(rho, list(range(2 * k)), in_axes)
        self.data = rho.reshape(3**w, 3**w)

    def probabilities(self) -> dict[str, float]:
        """Bitstring distribution; leakage level 2 reads out as 'not |0>' = 1."""
        w = self.width
        diag = np.real(np.diagonal(self.data)).reshape((3,) * w)
        probs: dict[str, float] = {}
        for levels in np.ndindex(*(3,) * w):
            bits = "".join("0" if l == 0 else "1" for l in levels)
            probs[bits] = probs.get(bits, 0.0) + float(diag[levels])
        return probs

    def p_zero(self) -> float:
        return float(np.real(self.data[0, 0]))


@dataclass(frozen=True)
class RunResult:
    p0: float
    probabilities: dict[str, float]
    counts: dict[str, int]
    shots: int


class ScheduleSimulator:
    """Caches per-waveform and per-gap channels across many run_schedule calls.

    With ideal_pulses=True every drive pulse acts as its exact nominal
    rotation (decoherence still applies); this isolates decoherence and
    scheduling effects from pulse-integration error, and makes noiseless
    randomized-benchmarking sequences compose to the identity exactly.
    """

    def __init__(self, nm: NoiseModel, dt_ns: float = 0.5, ideal_pulses: bool = False):
        self.nm = nm
        self.dt_ns = dt_ns
        self.ideal_pulses = ideal_pulses
        self._pulse_cache: dict = {}
        self._idle_cache: dict = {}
        self._ecr_cache: dict = {}

    def _pulse_superop(self, wid: str, w: Waveform, qubit: int, angle: float) -> np.ndarray:
        key = (wid, qubit)
        if key not in self._pulse_cache:
            if self.ideal_pulses:
                u = np.eye(3, dtype=complex)
                u[:2, :2] = ideal_rx(angle)
                dec = decoherence_channel(w.duration, self.nm, qubit, self.dt_ns)
                self._pulse_cache[key] = dec.superop @ unitary_superop(u)
            else:
                self._pulse_cache[key] = gate_channel(w, self.nm, qubit).superop
        return self._pulse_cache[key]

    def _idle_superop(self, gap: int, qubit: int) -> np.ndarray:
        key = (gap, qubit)
        if key not in self._idle_cache:
            self._idle_cache[key] = idle_channel(gap, self.nm, qubit, self.dt_ns).superop
        return self._idle_cache[key]

    def _ecr_superop(self, qubits, duration) -> np.ndarray:
        key = (qubits, duration)
        if key not in self._ecr_cache:
            self._ecr_cache[key] = ecr_channel(self.nm, qubits, duration, self.dt_ns).superop
        return self._ecr_cache[key]

    def run(self, sch: Schedule, shots: int = 1024, seed=None, validate_states: bool = False) -> RunResult:
        if sch.width > 3:
            raise SimulationError(f"dense qutrit simulation capped at 3 qubits, got {sch.width}")
        if sch.width == 0:
            return RunResult(p0=1.0, probabilities={"": 1.0}, counts={"": shots}, shots=shots)
        state = DensityState.ground(sch.width)
        t_last = [0] * sch.width

        def idle_to(q, t):
            gap = t - t_last[q]
            if gap > 0:
                state.apply_local_superop(self._idle_superop(gap, q), (q,))
            t_last[q] = t

        for ev in sch.events():
            if isinstance(ev, FrameShift):
                state.apply_local_unitary(_frame_unitary(ev.angle), (ev.qubit,))
                continue
            assert isinstance(ev, PulsePlacement)
            for q in ev.qubits:
                idle_to(q, ev.start)
            if ev.kind == "ecr":
                s = self._ecr_superop(ev.qubits, ev.duration)
                state.apply_local_superop(s, ev.qubits)
            else:
                w = sch.waveforms[ev.waveform_id]
                s = self._pulse_superop(ev.waveform_id, w, ev.qubits[0], ev.angle)
                state.apply_local_superop(s, (ev.qubits[0],))
            for q in ev.qubits:
                t_last[q] = ev.start + ev.duration
            if validate_states:
                state.validate()
        for q in range(sch.width):
            idle_to(q, sch.makespan)
        if validate_states:
            state.validate()

        probs = state.probabilities()
        p0 = state.p_zero()
        keys = sorted(probs)
        pvec = np.clip(np.array([probs[k] for k in keys]), 0.0, None)
        total = pvec.sum()
        if total <= 0:
            raise SimulationError("state has no measurable population")
        rng = np.random.default_rng(seed)
        draws = rng.multinomial(shots, pvec / total)
        counts = {k: int(n) for k, n in zip(keys, draws) if n > 0}
        return RunResult(p0=p0, probabilities=probs, counts=counts, shots=shots)


def run_schedule(
    sch: Schedule,
    nm: NoiseModel,
    shots: int = 1024,
    seed=None,
    validate_states: bool = False,
    ideal_pulses: bool = False,
) -> RunResult:
    """Propagate a schedule in global time order and sample measurement outcomes."""
    return ScheduleSimulator(nm, sch.dt_ns, ideal_pulses).run(sch, shots, seed, validate_states)


def write_histogram_csv(result: RunResult, path):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["bitstring", "count", "probability"])
        for bits in sorted(result.probabilities):
            out.writerow([bits, result.counts.get(bits, 0), repr(result.probabilities[bits])])


# ---------------------------------------------------------------------------
# Rabi characterization data


@dataclass(frozen=True)
class RabiData:
    amplitude: float
    times_s: np.ndarray
    p0: np.ndarray


def simulate_rabi(amplitudes, nm: NoiseModel, qubit: int = 0, window_dt: int | None = None, points: int = 201, dt_ns: float = 0.5) -> list[RabiData]:
    """Drive a square pulse at each amplitude and record the |0> population.

    Without an explicit window each amplitude is observed over its own
    4*pi-rotation time (two full population oscillations).
    """
    dt_s = dt_ns * 1e-9
    out = []
    gen = dissipative_generator(nm, qubit)
    kappa = nm.rabi_coefficient(qubit)
    alpha = nm.anharmonicity(qubit)
    for a in amplitudes:
        if window_dt is not None:
            n_dt = int(window_dt)
        elif a > 0:
            n_dt = max(int(math.ceil(1.0 / (kappa * a * dt_s))), points)
        else:
            n_dt = points
        ts_dt = np.linspace(0.0, n_dt, points)
        h = hamiltonian_sample(complex(a), kappa, alpha)
        evals, evecs = np.linalg.eigh(h)
        p0s = np.empty(points)
        for i, t_dt in enumerate(ts_dt):
            t_s = t_dt * dt_s
            u = (evecs * np.exp(-1j * evals * t_s)) @ evecs.conj().T
            rho = np.outer(u[:, 0], u[:, 0].conj())
            rho = (expm(t_s * gen) @ rho.reshape(9)).reshape(3, 3)
            p0s[i] = rho[0, 0].real
        out.append(RabiData(amplitude=float(a), times_s=ts_dt * dt_s, p0=p0s))
    return out


def write_rabi_csv(datasets: list[RabiData], path):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["amplitude", "time_ns", "p0"])
        for d in datasets:
            for t, y in zip(d.times_s, d.p0):
                out.writerow([repr(d.amplitude), repr(t * 1e9), repr(float(y))])
