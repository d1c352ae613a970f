"""Two-level atom plus auxiliary excitations that do not see the reservoir."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from ..core import ConfigurationError, TlaParams, ValidationError

DEFAULT_DIM_CAP = 4096

# atom ordering (g, e), same convention as the emission module
_SM = np.array([[0, 1], [0, 0]], dtype=complex)   # sigma^- = |g><e|
_SP = _SM.T.copy()


class AuxKind(enum.Enum):
    TWO_LEVEL = "two-level"
    OSCILLATOR = "oscillator"


@dataclass(frozen=True)
class AuxMode:
    frequency: float
    kind: AuxKind = AuxKind.TWO_LEVEL
    truncation: int = 1   # oscillator: highest retained excitation number

    def __post_init__(self):
        object.__setattr__(self, "kind", AuxKind(self.kind))
        if self.frequency <= 0:
            raise ValidationError(f"aux frequency must be positive, got {self.frequency}")
        if self.kind is AuxKind.OSCILLATOR and self.truncation < 1:
            raise ValidationError("oscillator truncation must be >= 1")

    @property
    def levels(self) -> int:
        return 2 if self.kind is AuxKind.TWO_LEVEL else self.truncation + 1

    def lowering(self) -> np.ndarray:
        n = self.levels
        return np.diag(np.sqrt(np.arange(1, n)), k=1).astype(complex)


# -- coupling specifications --------------------------------------------------

@dataclass(frozen=True)
class ExchangeCoupling:
    """sum_j g_j (sigma^+ A_j + A_j^dag sigma^-)."""

    strengths: tuple   # ((aux_index, g), ...)

    @classmethod
    def single(cls, aux_index: int, g: float) -> "ExchangeCoupling":
        return cls(((int(aux_index), float(g)),))


@dataclass(frozen=True, eq=False)
class GeneralHermitian:
    matrix: np.ndarray


class RandomStructure(enum.Enum):
    FULL = "full"                    # arbitrary Hermitian on the full space
    AUX_ONLY = "aux-only"            # identity on the atom
    EXCHANGE_LIKE = "exchange-like"  # sigma^+ B + sigma^- B^dag


@dataclass(frozen=True)
class RandomHermitian:
    seed: int
    scale: float = 0.1               # spectral norm of V in units of omega0
    structure: RandomStructure = RandomStructure.FULL

    def __post_init__(self):
        object.__setattr__(self, "structure", RandomStructure(self.structure))


@dataclass(frozen=True, eq=False)
class SystemModel:
    tla: TlaParams
    aux: tuple
    v_spec: object
    h0: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)

    @property
    def h_s(self) -> np.ndarray:
        return self.h0 + self.v

    @property
    def dim(self) -> int:
        return self.h0.shape[0]

    @property
    def aux_dim(self) -> int:
        return self.dim // 2

    def sigma(self, which: str) -> np.ndarray:
        """Atomic operator lifted to the full space ('x', 'y', 'z', '+', '-', 'pe')."""
        ops = {"+": _SP, "-": _SM, "x": _SP + _SM, "y": -1j * _SP + 1j * _SM,
               "z": np.diag([-1.0, 1.0]).astype(complex), "pe": np.diag([0.0, 1.0]).astype(complex)}
        return np.kron(ops[which], np.eye(self.aux_dim))

    def aux_operator(self, j: int, op: np.ndarray) -> np.ndarray:
        """Single-aux operator embedded as 1_atom x ... x op_j x ..."""
        mats = [np.eye(2)] + [op if i == j else np.eye(a.levels) for i, a in enumerate(self.aux)]
        return reduce(np.kron, mats)

    def top_level_projectors(self) -> dict:
        """Projectors onto the truncation edge of each oscillator (leakage check)."""
        out = {}
        for j, a in enumerate(self.aux):
            if a.kind is AuxKind.OSCILLATOR:
                p = np.zeros((a.levels, a.levels))
                p[-1, -1] = 1.0
                out[j] = self.aux_operator(j, p)
        return out


def _exchange(aux, spec: ExchangeCoupling, lift) -> np.ndarray:
    v = 0
    for j, g in spec.strengths:
        if not 0 <= j < len(aux):
            raise ValidationError(f"exchange coupling refers to aux {j}, but only {len(aux)} exist")
        a = lift(j, aux[j].lowering())
        sp_ = lift(None, _SP)
        term = g * sp_ @ a
        v = v + term + term.conj().T
    return v


def _random_hermitian(spec: RandomHermitian, aux_dim: int) -> np.ndarray:
    rng = np.random.default_rng(spec.seed)

    def gue(n):
        m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        return 0.5 * (m + m.conj().T)

    if spec.structure is RandomStructure.FULL:
        v = gue(2 * aux_dim)
    elif spec.structure is RandomStructure.AUX_ONLY:
        v = np.kron(np.eye(2), gue(aux_dim))
    else:
        b = rng.normal(size=(aux_dim, aux_dim)) + 1j * rng.normal(size=(aux_dim, aux_dim))
        v = np.kron(_SP, b)
        v = v + v.conj().T
    norm = np.linalg.norm(v, 2)
    return v * (spec.scale / norm) if norm > 0 else v


def build_system(tla: TlaParams, aux=(), v_spec=None, dim_cap: int = DEFAULT_DIM_CAP,
                 ) -> SystemModel:
    aux = tuple(a if isinstance(a, AuxMode) else AuxMode(**a) for a in aux)
    aux_dim = int(np.prod([a.levels for a in aux])) if aux else 1
    dim = 2 * aux_dim
    if dim > dim_cap:
        raise ConfigurationError(f"system dimension {dim} exceeds the cap {dim_cap}")

    # diagonal h0 = omega0 n_tla + sum_j omega_j n_j in the product basis
    n_aux = np.zeros(aux_dim)
    stride = aux_dim
    for a in aux:
        stride //= a.levels
        n_aux += a.frequency * ((np.arange(aux_dim) // stride) % a.levels)
    h0 = np.diag(np.concatenate([n_aux, tla.omega0 + n_aux])).astype(complex)

    def lift(j, op):
        if j is None:
            return np.kron(op, np.eye(aux_dim))
        mats = [np.eye(2)] + [op if i == j else np.eye(x.levels) for i, x in enumerate(aux)]
        return reduce(np.kron, mats)

    if v_spec is None:
        v = np.zeros((dim, dim), dtype=complex)
    elif isinstance(v_spec, ExchangeCoupling):
        v = np.asarray(_exchange(aux, v_spec, lift), dtype=complex)
        if v.ndim == 0:
            v = np.zeros((dim, dim), dtype=complex)
    elif isinstance(v_spec, GeneralHermitian):
        v = np.asarray(v_spec.matrix, dtype=complex)
        if v.shape != (dim, dim):
            raise ValidationError(f"coupling matrix has shape {v.shape}, expected {(dim, dim)}")
        err = np.abs(v - v.conj().T).max()
        if err > 1e-12 * max(1.0, np.abs(v).max()):
            raise ValidationError(f"coupling matrix is not Hermitian (max |V - V^dag| = {err:.3e})")
        v = 0.5 * (v + v.conj().T)
    elif isinstance(v_spec, RandomHermitian):
        v = _random_hermitian(v_spec, aux_dim) * tla.omega0
    else:
        raise ValidationError(f"unsupported coupling specification {type(v_spec).__name__}")
    for arr in (h0, v):
        arr.setflags(write=False)
    return SystemModel(tla, aux, v_spec, h0, v)


def random_system(rng: np.random.Generator, tla: TlaParams, max_dim: int = 64,
                  structure: str = "full", scale: float = 0.3) -> SystemModel:
    """Random auxiliary content and coupling with total dimension <= max_dim.

    ``structure`` is "exchange" for a random exchange coupling, otherwise one
    of the RandomHermitian structures.
    """
    aux = []
    dim = 2
    for _ in range(int(rng.integers(1, 4))):
        if rng.random() < 0.5:
            mode = AuxMode(float(rng.uniform(0.5, 1.5)) * tla.omega0)
        else:
            mode = AuxMode(float(rng.uniform(0.5, 1.5)) * tla.omega0, AuxKind.OSCILLATOR,
                           int(rng.integers(1, 5)))
        if dim * mode.levels > max_dim:
            break
        aux.append(mode)
        dim *= mode.levels
    if not aux:
        aux.append(AuxMode(float(rng.uniform(0.5, 1.5)) * tla.omega0))
    if structure == "exchange":
        spec = ExchangeCoupling(tuple((j, float(rng.uniform(-scale, scale)) * tla.omega0)
                                      for j in range(len(aux))))
    else:
        spec = RandomHermitian(int(rng.integers(2**31)), scale, RandomStructure(structure))
    return build_system(tla, aux, spec)
