"""Evolution operators for discrete and continuous nonautonomous linear
systems, in overflow-safe scaled form.

A propagator value is held as a ``ScaledMatrix``: a unit-scale matrix times
``exp(log_norm)``.  Every product is renormalized factor by factor, so the
catalog systems, whose propagators reach e^(+-10^4) on ordinary windows,
never leave double range.  Scalar and diagonal structures additionally keep
their per-component logs exactly (sums of per-step log-magnitudes, or the
time integral of the coefficient in continuous time).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import exprparse, rates
from .params import CONTINUOUS, DISCRETE, Params, DEFAULT


SCALAR = "scalar"
DIAGONAL = "diagonal"
FULL = "full"

_MAX_DIM = 16
_MIN_ABS_DET = 1e-300


class EvolutionError(ValueError):
    """Invalid system construction or propagation request."""


# ---------------------------------------------------------------------------
# Scaled matrices


@dataclass(frozen=True, eq=False)
class ScaledMatrix:
    """A matrix split as exp(log_norm) * unit with ||unit|| in [0.5, 2].

    For scalar systems the unit is the 1x1 sign matrix and log_norm is the
    log-magnitude of the propagator.  Diagonal values additionally carry the
    exact per-component log-magnitudes and signs: products of diagonal
    factors compose componentwise in log space, so a component whose
    relative size underflows the dense unit is never lost.
    """

    unit: np.ndarray
    log_norm: float
    diag_logs: np.ndarray | None = None
    diag_signs: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.unit.shape[0]

    @staticmethod
    def identity(d: int) -> "ScaledMatrix":
        return ScaledMatrix(np.eye(d), 0.0, np.zeros(d), np.ones(d))

    @staticmethod
    def from_matrix(m: np.ndarray, extra_log: float = 0.0) -> "ScaledMatrix":
        m = np.asarray(m, dtype=float)
        nrm = float(np.linalg.norm(m, 2))
        if nrm == 0.0:
            return ScaledMatrix(np.zeros_like(m), -math.inf)
        return ScaledMatrix(m / nrm, extra_log + math.log(nrm))

    @staticmethod
    def from_diag_logs(log_abs: np.ndarray, signs: np.ndarray) -> "ScaledMatrix":
        log_abs = np.asarray(log_abs, dtype=float)
        signs = np.asarray(signs, dtype=float)
        top = float(np.max(log_abs))
        if top == -math.inf:
            return ScaledMatrix(np.zeros((len(log_abs), len(log_abs))), -math.inf)
        with np.errstate(under="ignore"):
            unit = np.diag(signs * np.exp(log_abs - top))
        return ScaledMatrix(unit, top, log_abs.copy(), signs.copy())

    def shifted(self, delta: float) -> "ScaledMatrix":
        """Same unit factor with the log scale moved by delta."""
        logs = None if self.diag_logs is None else self.diag_logs + delta
        return ScaledMatrix(self.unit, self.log_norm + delta, logs, self.diag_signs)

    def compose(self, other: "ScaledMatrix") -> "ScaledMatrix":
        if self.diag_logs is not None and other.diag_logs is not None:
            return ScaledMatrix.from_diag_logs(self.diag_logs + other.diag_logs,
                                               self.diag_signs * other.diag_signs)
        return ScaledMatrix.from_matrix(self.unit @ other.unit,
                                        self.log_norm + other.log_norm)

    def inverse(self) -> "ScaledMatrix":
        if self.diag_logs is not None:
            return ScaledMatrix.from_diag_logs(-self.diag_logs, self.diag_signs)
        try:
            inv = np.linalg.inv(self.unit)
        except np.linalg.LinAlgError as exc:
            raise EvolutionError("singular scaled matrix has no inverse") from exc
        return ScaledMatrix.from_matrix(inv, -self.log_norm)

    def value(self) -> np.ndarray:
        return math.exp(self.log_norm) * self.unit

    def definitely_close(self, other: "ScaledMatrix", tol: float) -> bool:
        """Relative closeness in scaled form: log scales within tol and unit
        factors within tol entrywise."""
        if self.diag_logs is not None and other.diag_logs is not None:
            if not np.array_equal(np.sign(self.diag_signs), np.sign(other.diag_signs)):
                return False
            gap = np.abs(self.diag_logs - other.diag_logs)
            scale = np.maximum(1.0, np.abs(other.diag_logs))
            return bool(np.all(gap <= tol * scale))
        if self.log_norm == other.log_norm == -math.inf:
            return True
        if abs(self.log_norm - other.log_norm) > tol * max(1.0, abs(self.log_norm)):
            return False
        return bool(np.max(np.abs(self.unit - other.unit)) <= tol * max(1.0, float(np.max(np.abs(self.unit)))))


def operator_norm_bounds(m: ScaledMatrix) -> tuple[float, float]:
    """(log sigma_max, log sigma_min) of the represented matrix.  A singular
    unit yields -inf for the lower bound."""
    if m.dim > _MAX_DIM:
        raise EvolutionError(f"dimension {m.dim} exceeds the supported bound {_MAX_DIM}")
    if m.diag_logs is not None:
        # singular values of a diagonal matrix are the entry magnitudes
        return (float(np.max(m.diag_logs)), float(np.min(m.diag_logs)))
    if m.dim == 1:
        v = abs(float(m.unit[0, 0]))
        if v == 0.0:
            return (-math.inf, -math.inf)
        return (m.log_norm + math.log(v), m.log_norm + math.log(v))
    sv = np.linalg.svd(m.unit, compute_uv=False)
    hi = -math.inf if sv[0] == 0.0 else m.log_norm + math.log(float(sv[0]))
    lo = -math.inf if sv[-1] == 0.0 else m.log_norm + math.log(float(sv[-1]))
    return (hi, lo)


# ---------------------------------------------------------------------------
# Coefficient sources


@dataclass(frozen=True, eq=False)
class ExprSource:
    """Per-entry expressions; diagonal systems store only the diagonal."""

    diag: tuple | None
    entries: tuple | None
    diag_text: tuple | None
    entries_text: tuple | None

    @staticmethod
    def from_diag(texts) -> "ExprSource":
        asts = tuple(exprparse.parse(t) for t in texts)
        return ExprSource(diag=asts, entries=None, diag_text=tuple(texts), entries_text=None)

    @staticmethod
    def from_entries(rows) -> "ExprSource":
        asts = tuple(tuple(exprparse.parse(t) for t in row) for row in rows)
        texts = tuple(tuple(row) for row in rows)
        return ExprSource(diag=None, entries=asts, diag_text=None, entries_text=texts)


@dataclass(frozen=True, eq=False)
class TableSource:
    """Tabulated discrete coefficients on an explicit index range; queries
    outside the range are errors, not extrapolations."""

    k0: int
    matrices: np.ndarray  # (count, d, d)

    def matrix(self, k: int) -> np.ndarray:
        idx = k - self.k0
        if idx < 0 or idx >= len(self.matrices):
            raise EvolutionError(
                f"time {k} outside the tabulated range "
                f"[{self.k0}, {self.k0 + len(self.matrices) - 1}]")
        return self.matrices[idx]


@dataclass(frozen=True, eq=False)
class RateQuotientSource:
    """Diagonal system whose propagator is a growth-rate quotient raised to
    per-component slopes: discrete steps are (nu(k+1)/nu(k))^s_i, continuous
    coefficients are s_i * d/dt log nu(t)."""

    rate: rates.GrowthRate
    slopes: tuple


Source = ExprSource | TableSource | RateQuotientSource


@dataclass(frozen=True, eq=False)
class LinearSystem:
    time_domain: str
    dim: int
    structure: str
    source: Source
    descriptor: dict | None = None

    def __post_init__(self):
        if self.structure not in (SCALAR, DIAGONAL, FULL):
            raise EvolutionError(f"unknown structure {self.structure!r}")
        if self.dim < 1 or self.dim > _MAX_DIM:
            raise EvolutionError(f"dimension must be in [1, {_MAX_DIM}]")
        if self.structure == SCALAR and self.dim != 1:
            raise EvolutionError("scalar systems have dimension 1")

    @property
    def components(self) -> int:
        return 1 if self.structure == SCALAR else self.dim


@dataclass(frozen=True, eq=False)
class WeightedSystem:
    """System whose propagator is the base propagator divided by
    (mu(to)/mu(from))^gamma.  In continuous time this is the coefficient
    shift A(t) - gamma * (d/dt log mu)(t) Id."""

    base: LinearSystem
    rate: rates.GrowthRate
    gamma: float

    def __post_init__(self):
        if self.base.time_domain != self.rate.time_domain:
            raise EvolutionError("weighted system needs rate and base on one time domain")


# ---------------------------------------------------------------------------
# Construction helpers


def scalar_system(time_domain: str, text: str, descriptor: dict | None = None) -> LinearSystem:
    return LinearSystem(time_domain, 1, SCALAR, ExprSource.from_diag((text,)),
                        descriptor=descriptor)


def diagonal_system(time_domain: str, texts, descriptor: dict | None = None) -> LinearSystem:
    texts = tuple(texts)
    return LinearSystem(time_domain, len(texts), DIAGONAL, ExprSource.from_diag(texts),
                        descriptor=descriptor)


def full_system(time_domain: str, rows, descriptor: dict | None = None) -> LinearSystem:
    rows = tuple(tuple(r) for r in rows)
    d = len(rows)
    if any(len(r) != d for r in rows):
        raise EvolutionError("full coefficient matrix must be square")
    return LinearSystem(time_domain, d, FULL, ExprSource.from_entries(rows),
                        descriptor=descriptor)


def quotient_system(rate: rates.GrowthRate, slopes) -> LinearSystem:
    slopes = tuple(float(s) for s in slopes)
    if not slopes:
        raise EvolutionError("need at least one slope")
    structure = SCALAR if len(slopes) == 1 else DIAGONAL
    descriptor = {
        "generated": "rate_quotient",
        "rate": rates.rate_to_descriptor(rate),
        "slopes": list(slopes),
    }
    return LinearSystem(rate.time_domain, len(slopes), structure,
                        RateQuotientSource(rate, slopes), descriptor=descriptor)


def tabulated_system(k0: int, matrices: np.ndarray, structure: str = FULL,
                     descriptor: dict | None = None) -> LinearSystem:
    matrices = np.asarray(matrices, dtype=float)
    d = matrices.shape[1]
    return LinearSystem(DISCRETE, d, structure, TableSource(k0, matrices),
                        descriptor=descriptor)


# ---------------------------------------------------------------------------
# Coefficient evaluation


def _var_env(system: LinearSystem, t: float) -> dict:
    return {"t": t, "k": t}


def coefficient_matrix(system: LinearSystem, t: float) -> np.ndarray:
    """A(t) in linear scale.  Entries of expression-backed systems must be
    representable as doubles at the queried time."""
    src = system.source
    env = _var_env(system, t)
    if isinstance(src, TableSource):
        return src.matrix(int(round(t)))
    if isinstance(src, ExprSource):
        if src.entries is not None:
            return np.array([[exprparse.evaluate_env(e, env) for e in row]
                             for row in src.entries])
        vals = [exprparse.evaluate_env(e, env) for e in src.diag]
        return np.diag(vals)
    if isinstance(src, RateQuotientSource):
        if system.time_domain == DISCRETE:
            la, sg = _diag_step_logs(system, int(round(t)))
            return np.diag(sg * np.exp(la))
        return np.diag(_diag_values(system, t))
    raise EvolutionError(f"unsupported source {type(src).__name__}")


def _diag_step_logs(system: LinearSystem, k: int) -> tuple[np.ndarray, np.ndarray]:
    """(log|a_ii(k)|, sign a_ii(k)) for discrete scalar/diagonal systems."""
    src = system.source
    if isinstance(src, ExprSource) and src.diag is not None:
        la, sg = [], []
        env = _var_env(system, float(k))
        for e in src.diag:
            l, s = exprparse.evaluate_log_abs(e, env)
            la.append(l)
            sg.append(s)
        return np.array(la), np.array(sg, dtype=float)
    if isinstance(src, RateQuotientSource):
        step = rates.log_rate(src.rate, k + 1) - rates.log_rate(src.rate, k)
        la = np.array([s * step for s in src.slopes])
        return la, np.ones(len(src.slopes))
    if isinstance(src, TableSource):
        m = src.matrix(k)
        diag = np.diag(m)
        with np.errstate(divide="ignore"):
            return np.where(diag == 0, -np.inf, np.log(np.abs(diag))), np.sign(diag)
    raise EvolutionError("diagonal step logs need a scalar or diagonal system")


def _diag_values(system: LinearSystem, t: float) -> np.ndarray:
    """Continuous-time integrand a_ii(t) for scalar/diagonal systems."""
    src = system.source
    if isinstance(src, ExprSource) and src.diag is not None:
        env = _var_env(system, t)
        return np.array([exprparse.evaluate_env(e, env) for e in src.diag])
    if isinstance(src, RateQuotientSource):
        d = rates.log_rate_derivative(src.rate, t)
        return np.array([s * d for s in src.slopes])
    raise EvolutionError("continuous diagonal values need expression or quotient sources")


# ---------------------------------------------------------------------------
# Quadrature and integration


def _simpson_segment(system: LinearSystem, a: float, b: float, h: float) -> np.ndarray:
    """Componentwise integral of the diagonal coefficients over [a, b]
    (composite Simpson, even panel count, no interior kink handling)."""
    if a == b:
        return np.zeros(system.components)
    n = max(2, int(math.ceil(abs(b - a) / h)))
    if n % 2:
        n += 1
    xs = np.linspace(a, b, n + 1)
    vals = np.stack([_diag_values(system, x) for x in xs])
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    step = (b - a) / n
    return (step / 3.0) * (w[:, None] * vals).sum(axis=0)


def _diag_log_integral(system: LinearSystem, frm: float, to: float, h: float) -> np.ndarray:
    """log Psi_ii(to, frm) = integral of a_ii; split at 0 where the catalog
    coefficients may have a kink."""
    if frm == to:
        return np.zeros(system.components)
    sign = 1.0
    a, b = frm, to
    if a > b:
        a, b = b, a
        sign = -1.0
    if a < 0.0 < b:
        total = _simpson_segment(system, a, 0.0, h) + _simpson_segment(system, 0.0, b, h)
    else:
        total = _simpson_segment(system, a, b, h)
    return sign * total


def _rk4_propagate(system: LinearSystem, frm: float, to: float, h: float) -> ScaledMatrix:
    if frm == to:
        return ScaledMatrix.identity(system.dim)
    steps = max(1, int(math.ceil(abs(to - frm) / h)))
    dt = (to - frm) / steps
    x = np.eye(system.dim)
    log_acc = 0.0
    t = frm
    for _ in range(steps):
        k1 = coefficient_matrix(system, t) @ x
        k2 = coefficient_matrix(system, t + dt / 2) @ (x + dt / 2 * k1)
        k3 = coefficient_matrix(system, t + dt / 2) @ (x + dt / 2 * k2)
        k4 = coefficient_matrix(system, t + dt) @ (x + dt * k3)
        x = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += dt
        nrm = float(np.linalg.norm(x, 2))
        if nrm == 0.0:
            raise EvolutionError("propagator collapsed to zero during integration")
        x /= nrm
        log_acc += math.log(nrm)
    return ScaledMatrix(x, log_acc)


# ---------------------------------------------------------------------------
# Propagation


def propagate(system: LinearSystem, to: float, frm: float,
              params: Params = DEFAULT) -> ScaledMatrix:
    """Evolution operator value mapping the state at ``frm`` to ``to``.

    Discrete: left-ordered coefficient product (identity when to == frm,
    inverses when to < frm), renormalized after every factor.  Continuous:
    Simpson quadrature of the coefficient integral for scalar/diagonal
    structure, classical fixed-step 4th-order integration otherwise.
    """
    if system.time_domain == DISCRETE:
        ki, ni = int(round(to)), int(round(frm))
        if abs(to - ki) > 1e-9 or abs(frm - ni) > 1e-9:
            raise EvolutionError("discrete systems are propagated between integers")
        if system.structure in (SCALAR, DIAGONAL):
            la, sg = _diag_range_logs(system, ki, ni)
            return ScaledMatrix.from_diag_logs(la, sg)
        return _full_discrete(system, ki, ni)
    if system.structure in (SCALAR, DIAGONAL):
        logs = _diag_log_integral(system, frm, to, params.ode_step)
        return ScaledMatrix.from_diag_logs(logs, np.ones(system.components))
    return _rk4_propagate(system, frm, to, params.ode_step)


def _diag_range_logs(system: LinearSystem, k: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    comp = system.components
    la = np.zeros(comp)
    sg = np.ones(comp)
    if k == n:
        return la, sg
    lo, hi = (n, k) if k > n else (k, n)
    for j in range(lo, hi):
        step_la, step_sg = _diag_step_logs(system, j)
        if np.any(step_sg == 0):
            raise EvolutionError(f"coefficient matrix is singular at time {j}")
        la += step_la
        sg *= step_sg
    if k < n:
        la = -la  # product of inverses; diagonal signs are self-inverse
    return la, sg


def _full_discrete(system: LinearSystem, k: int, n: int) -> ScaledMatrix:
    if k == n:
        return ScaledMatrix.identity(system.dim)
    acc = ScaledMatrix.identity(system.dim)
    if k > n:
        for j in range(n, k):
            a = coefficient_matrix(system, j)
            _check_invertible(a, j)
            acc = ScaledMatrix.from_matrix(a @ acc.unit, acc.log_norm)
    else:
        for j in range(n - 1, k - 1, -1):
            a = coefficient_matrix(system, j)
            _check_invertible(a, j)
            acc = ScaledMatrix.from_matrix(np.linalg.solve(a, acc.unit), acc.log_norm)
    return acc


def _check_invertible(a: np.ndarray, j: int):
    sign, logdet = np.linalg.slogdet(a)
    if sign == 0 or logdet == -math.inf:
        raise EvolutionError(f"coefficient matrix is singular at time {j}")
    scale = float(np.max(np.abs(a)))
    if scale > 0 and logdet - a.shape[0] * math.log(scale) < math.log(_MIN_ABS_DET):
        raise EvolutionError(f"coefficient matrix is numerically singular at time {j}")


def weighted_propagate(w: WeightedSystem, to: float, frm: float,
                       params: Params = DEFAULT) -> ScaledMatrix:
    """Propagator of the weighted system: the base propagator with log-norm
    decreased by gamma * log(mu(to)/mu(frm)); the unit factor is unchanged."""
    base = propagate(w.base, to, frm, params)
    shift = w.gamma * (rates.log_rate(w.rate, to) - rates.log_rate(w.rate, frm))
    return base.shifted(-shift)


# ---------------------------------------------------------------------------
# Grids for the spectral estimator


def component_log_grid(obj, window: int, params: Params = DEFAULT) -> tuple[np.ndarray, np.ndarray]:
    """Integer-time grid of per-component propagator log-magnitudes.

    Returns (times, logs) with times = -window..window and logs of shape
    (components, len(times)); logs[i][m] = log |Phi_ii(times[m], 0)|.
    """
    if isinstance(obj, WeightedSystem):
        times, logs = component_log_grid(obj.base, window, params)
        mu = rates.log_rate_values(obj.rate, times)
        return times, logs - obj.gamma * mu[None, :]
    system: LinearSystem = obj
    if system.structure == FULL:
        raise EvolutionError("full systems use the scaled-matrix grid")
    times = np.arange(-window, window + 1, dtype=float)
    comp = system.components
    logs = np.zeros((comp, len(times)))
    center = window
    if system.time_domain == DISCRETE:
        for m in range(center, len(times) - 1):
            la, sg = _diag_step_logs(system, int(times[m]))
            if np.any(sg == 0) or np.any(la == -math.inf):
                raise EvolutionError(f"coefficient matrix is singular at time {int(times[m])}")
            logs[:, m + 1] = logs[:, m] + la
        for m in range(center, 0, -1):
            la, sg = _diag_step_logs(system, int(times[m - 1]))
            if np.any(sg == 0) or np.any(la == -math.inf):
                raise EvolutionError(f"coefficient matrix is singular at time {int(times[m - 1])}")
            logs[:, m - 1] = logs[:, m] - la
    else:
        h = params.ode_step
        for m in range(center, len(times) - 1):
            logs[:, m + 1] = logs[:, m] + _simpson_segment(system, times[m], times[m + 1], h)
        for m in range(center, 0, -1):
            logs[:, m - 1] = logs[:, m] - _simpson_segment(system, times[m - 1], times[m], h)
    return times, logs


def scaled_grids(obj, window: int, params: Params = DEFAULT) -> tuple[np.ndarray, list, list]:
    """Integer-time grids of scaled propagators for full systems.

    Returns (times, forward, backward) with forward[m] = Phi(t_m, 0) and
    backward[m] = Phi(0, t_m).  Both are accumulated one factor at a time
    (each factor inverted at the coefficient level), never by inverting a
    long product, so the dominant singular direction of each grid entry
    stays reliable on windows whose propagators are astronomically
    ill-conditioned.
    """
    if isinstance(obj, WeightedSystem):
        times, fwd, bwd = scaled_grids(obj.base, window, params)
        mu = rates.log_rate_values(obj.rate, times)
        fwd = [m.shifted(-obj.gamma * float(mu[i])) for i, m in enumerate(fwd)]
        bwd = [m.shifted(obj.gamma * float(mu[i])) for i, m in enumerate(bwd)]
        return times, fwd, bwd
    system: LinearSystem = obj
    times = np.arange(-window, window + 1, dtype=float)
    center = window
    fwd: list = [None] * len(times)
    bwd: list = [None] * len(times)
    fwd[center] = ScaledMatrix.identity(system.dim)
    bwd[center] = ScaledMatrix.identity(system.dim)
    for m in range(center, len(times) - 1):
        step = propagate(system, times[m + 1], times[m], params)
        fwd[m + 1] = step.compose(fwd[m])
        back = propagate(system, times[m], times[m + 1], params)
        bwd[m + 1] = bwd[m].compose(back)
    for m in range(center, 0, -1):
        step = propagate(system, times[m - 1], times[m], params)
        fwd[m - 1] = step.compose(fwd[m])
        back = propagate(system, times[m], times[m - 1], params)
        bwd[m - 1] = bwd[m].compose(back)
    return times, fwd, bwd


# ---------------------------------------------------------------------------
# Descriptors and tables


def load_table(path: str | Path) -> tuple[int, np.ndarray]:
    """Tabulated CSV: header k,a_1_1,...,a_d_d, one row per integer k,
    row-major entries in plain decimal."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EvolutionError(f"{path}: empty table") from None
        if not header or header[0].strip() != "k":
            raise EvolutionError(f"{path}: first column must be 'k'")
        d = int(math.isqrt(len(header) - 1))
        if d * d != len(header) - 1:
            raise EvolutionError(f"{path}: expected d*d entry columns, got {len(header) - 1}")
        expected = [f"a_{i}_{j}" for i in range(1, d + 1) for j in range(1, d + 1)]
        got = [h.strip() for h in header[1:]]
        if got != expected:
            raise EvolutionError(f"{path}: entry columns must be {','.join(expected)}")
        ks, rows = [], []
        for line in reader:
            if not line:
                continue
            ks.append(int(line[0]))
            rows.append([float(v) for v in line[1:]])
    if not ks:
        raise EvolutionError(f"{path}: no rows")
    if ks != list(range(ks[0], ks[0] + len(ks))):
        raise EvolutionError(f"{path}: rows must cover consecutive integers")
    mats = np.array(rows).reshape(len(ks), d, d)
    return ks[0], mats


def system_to_descriptor(system: LinearSystem) -> dict:
    if system.descriptor is not None:
        return dict(system.descriptor)
    src = system.source
    desc = {
        "time_domain": system.time_domain,
        "dimension": system.dim,
        "structure": system.structure,
    }
    if isinstance(src, ExprSource):
        if src.diag_text is not None:
            desc["coefficients"] = {"diagonal": list(src.diag_text)}
        else:
            desc["coefficients"] = {"entries": [list(r) for r in src.entries_text]}
    elif isinstance(src, RateQuotientSource):
        desc["coefficients"] = {
            "rate_quotient": {
                "rate": rates.rate_to_descriptor(src.rate),
                "slopes": list(src.slopes),
            }
        }
    else:
        desc["coefficients"] = {"table": "<in-memory>"}
    return desc


def system_from_descriptor(desc: dict, base_dir: str | Path | None = None) -> LinearSystem:
    if not isinstance(desc, dict):
        raise EvolutionError(f"system: expected an object, got {type(desc).__name__}")
    domain = desc.get("time_domain")
    if domain not in (DISCRETE, CONTINUOUS):
        raise EvolutionError("system.time_domain: expected 'discrete' or 'continuous'")
    structure = desc.get("structure")
    if structure not in (SCALAR, DIAGONAL, FULL):
        raise EvolutionError("system.structure: expected scalar, diagonal or full")
    dim = desc.get("dimension")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise EvolutionError("system.dimension: expected a positive integer")
    coeffs = desc.get("coefficients")
    if not isinstance(coeffs, dict):
        raise EvolutionError("system.coefficients: expected an object")
    try:
        if "table" in coeffs:
            if domain != DISCRETE:
                raise EvolutionError("system.coefficients.table: tables are discrete-time")
            path = Path(coeffs["table"])
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            k0, mats = load_table(path)
            if mats.shape[1] != dim:
                raise EvolutionError(
                    f"system.coefficients.table: table dimension {mats.shape[1]} "
                    f"does not match dimension {dim}")
            return LinearSystem(domain, dim, structure, TableSource(k0, mats),
                                descriptor=dict(desc))
        if "diagonal" in coeffs:
            texts = coeffs["diagonal"]
            if structure == FULL:
                raise EvolutionError("system.coefficients.diagonal: needs scalar or diagonal structure")
            if not isinstance(texts, list) or len(texts) != dim:
                raise EvolutionError(
                    f"system.coefficients.diagonal: expected {dim} expression strings")
            return LinearSystem(domain, dim, structure, ExprSource.from_diag(texts),
                                descriptor=dict(desc))
        if "entries" in coeffs:
            rows = coeffs["entries"]
            if structure != FULL:
                raise EvolutionError("system.coefficients.entries: needs full structure")
            if (not isinstance(rows, list) or len(rows) != dim
                    or any(not isinstance(r, list) or len(r) != dim for r in rows)):
                raise EvolutionError(
                    f"system.coefficients.entries: expected a {dim}x{dim} grid of expressions")
            return LinearSystem(domain, dim, FULL, ExprSource.from_entries(rows),
                                descriptor=dict(desc))
        if "rate_quotient" in coeffs:
            spec = coeffs["rate_quotient"]
            rate = rates.rate_from_descriptor(spec.get("rate"), domain,
                                              path="system.coefficients.rate_quotient.rate")
            return quotient_system(rate, spec.get("slopes", ()))
    except exprparse.ParseError as exc:
        raise EvolutionError(f"system.coefficients: {exc}") from exc
    raise EvolutionError(
        "system.coefficients: expected one of diagonal, entries, table, rate_quotient")
