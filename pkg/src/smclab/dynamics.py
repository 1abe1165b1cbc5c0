"""Control-affine SISO plants, sliding surfaces, and disturbance signals.

The plant family is ``xdot = f(x,t) + b(x)*u + b(x)*d(t) + w_u(x,t)`` with a
scalar control ``u``, a scalar matched disturbance ``d`` entering through the
same input vector ``b``, and an unmatched disturbance vector ``w_u``.  The
scalar output ``s(x)`` (the switching function) and its analytic gradient are
carried by :class:`SlidingSurface`.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from .errors import DimensionError, NumericsError, ParameterError

Vector = tuple[float, ...]

DISTURBANCE_KINDS = ("zero", "constant", "sinusoid", "seeded-bounded-random")

# seeded-bounded-random signals are a normalized sum of fixed harmonics so the
# value is a pure function of (seed, t) and |kernel| <= 1 holds analytically
_RANDOM_HARMONICS = 8
_RANDOM_FREQ_RANGE = (0.5, 10.0)


def sgn(v: float) -> int:
    """Three-valued sign: -1 for v < 0, 0 for v == 0 exactly, +1 for v > 0."""
    if not math.isfinite(v):
        raise ParameterError(f"sgn requires a finite argument, got {v!r}")
    if v > 0.0:
        return 1
    if v < 0.0:
        return -1
    return 0


@dataclass(frozen=True)
class StateVector:
    """Immutable state coordinates; dimension >= 1, all entries finite."""

    values: Vector

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) < 1:
            raise ParameterError("state vector needs at least one coordinate")
        for i, v in enumerate(vals):
            if not math.isfinite(v):
                raise ParameterError(f"state coordinate {i} is not finite: {v!r}")
        object.__setattr__(self, "values", vals)

    @property
    def dimension(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)


StateLike = Union[StateVector, Sequence[float]]


def state_coords(x: StateLike, expected_dim: Optional[int] = None) -> Vector:
    """Normalize a state-like argument to a validated tuple of floats."""
    if isinstance(x, StateVector):
        vals = x.values
    else:
        vals = tuple(float(v) for v in x)
        if len(vals) < 1:
            raise ParameterError("state vector needs at least one coordinate")
        for i, v in enumerate(vals):
            if not math.isfinite(v):
                raise ParameterError(f"state coordinate {i} is not finite: {v!r}")
    if expected_dim is not None and len(vals) != expected_dim:
        raise DimensionError(
            f"state has dimension {len(vals)}, expected {expected_dim}"
        )
    return vals


@dataclass(frozen=True)
class DisturbanceSignal:
    """Scalar disturbance d(t) with a known analytic supremum of |d|.

    value(t) = offset + amplitude * kernel(t) where the kernel is 0 ("zero"),
    1 ("constant"), sin(frequency*t) ("sinusoid"), or a seeded band-limited
    noise with |kernel| <= 1 ("seeded-bounded-random").  ``sup_abs`` defaults
    to the tight bound |offset| + |amplitude| (0 for the zero kind) and may
    only be widened.
    """

    kind: str
    amplitude: float = 0.0
    frequency: float = 0.0
    offset: float = 0.0
    seed: int = 0
    sup_abs: Optional[float] = None
    _harmonics: tuple = field(
        init=False, repr=False, compare=False, default=()
    )

    def __post_init__(self):
        if self.kind not in DISTURBANCE_KINDS:
            raise ParameterError(
                f"unknown disturbance kind {self.kind!r} "
                f"(known: {', '.join(DISTURBANCE_KINDS)})"
            )
        for name in ("amplitude", "frequency", "offset"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"disturbance {name} must be finite")
        if self.kind == "zero" and (self.amplitude != 0.0 or self.offset != 0.0):
            raise ParameterError("zero disturbance must have amplitude = offset = 0")
        tight = abs(self.offset) + abs(self.amplitude)
        if self.sup_abs is None:
            object.__setattr__(self, "sup_abs", tight)
        elif self.sup_abs < tight - 1e-12:
            raise ParameterError(
                f"sup_abs = {self.sup_abs} is below the attained bound {tight}"
            )
        if self.kind == "seeded-bounded-random":
            rng = random.Random(self.seed)
            raw = []
            for _ in range(_RANDOM_HARMONICS):
                a = rng.uniform(0.2, 1.0) * (1.0 if rng.random() < 0.5 else -1.0)
                w = rng.uniform(*_RANDOM_FREQ_RANGE)
                p = rng.uniform(0.0, 2.0 * math.pi)
                raw.append((a, w, p))
            norm = sum(abs(a) for a, _, _ in raw)
            object.__setattr__(
                self, "_harmonics", tuple((a / norm, w, p) for a, w, p in raw)
            )

    @classmethod
    def zero(cls) -> "DisturbanceSignal":
        return cls(kind="zero")

    def value(self, t: float) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind == "constant":
            return self.offset + self.amplitude
        if self.kind == "sinusoid":
            return self.offset + self.amplitude * math.sin(self.frequency * t)
        acc = 0.0
        for a, w, p in self._harmonics:
            acc += a * math.sin(w * t + p)
        return self.offset + self.amplitude * acc

    def as_callable(self) -> Callable[[float], float]:
        """Specialized closure for tight integration loops."""
        if self.kind == "zero":
            return lambda t: 0.0
        if self.kind == "constant":
            c = self.offset + self.amplitude
            return lambda t: c
        if self.kind == "sinusoid":
            amp, freq, off, sin = self.amplitude, self.frequency, self.offset, math.sin
            return lambda t: off + amp * sin(freq * t)
        harmonics, amp, off, sin = self._harmonics, self.amplitude, self.offset, math.sin
        return lambda t: off + amp * sum(a * sin(w * t + p) for a, w, p in harmonics)


@dataclass(frozen=True)
class SlidingSurface:
    """Scalar switching function s(x) with its analytic row gradient.

    ``dimension`` is optional metadata; when set, the surface operations check
    state lengths against it.  The gradient must match central finite
    differences of ``value`` (see :func:`surface_gradient_fd`).
    """

    value: Callable[[Sequence[float]], float]
    gradient: Callable[[Sequence[float]], Vector]
    description: str = ""
    dimension: Optional[int] = None


def _zero_unmatched(dim: int) -> Callable[[Sequence[float], float], Vector]:
    zeros = (0.0,) * dim
    return lambda x, t: zeros


@dataclass(frozen=True)
class SystemModel:
    """Control-affine plant: xdot = drift + b*u + b*d + w_u.

    ``input_vector`` is the single channel through which both the control and
    the matched disturbance enter.  ``unmatched_bound_vector`` holds
    elementwise bounds on |w_u| and defaults to all zeros.
    """

    dimension: int
    drift: Callable[[Sequence[float], float], Vector]
    input_vector: Callable[[Sequence[float]], Vector]
    matched_disturbance: DisturbanceSignal = field(
        default_factory=DisturbanceSignal.zero
    )
    unmatched_disturbance: Optional[Callable[[Sequence[float], float], Vector]] = None
    unmatched_bound_vector: Optional[Vector] = None

    def __post_init__(self):
        if not isinstance(self.dimension, int) or self.dimension < 1:
            raise ParameterError(f"dimension must be a positive integer, got {self.dimension!r}")
        if self.unmatched_disturbance is None:
            object.__setattr__(
                self, "unmatched_disturbance", _zero_unmatched(self.dimension)
            )
        if self.unmatched_bound_vector is None:
            object.__setattr__(
                self, "unmatched_bound_vector", (0.0,) * self.dimension
            )
        else:
            bounds = tuple(float(b) for b in self.unmatched_bound_vector)
            if len(bounds) != self.dimension:
                raise DimensionError(
                    f"unmatched_bound_vector has length {len(bounds)}, "
                    f"expected {self.dimension}"
                )
            if any(b < 0.0 or not math.isfinite(b) for b in bounds):
                raise ParameterError("unmatched bounds must be finite and nonnegative")
            object.__setattr__(self, "unmatched_bound_vector", bounds)


def _check_vector(v, dim: int, what: str) -> Vector:
    vals = tuple(float(c) for c in v)
    if len(vals) != dim:
        raise DimensionError(f"{what} has length {len(vals)}, expected {dim}")
    for c in vals:
        if not math.isfinite(c):
            raise NumericsError(f"{what} produced a non-finite entry: {c!r}")
    return vals


def surface_value(surface: SlidingSurface, x: StateLike) -> float:
    """Evaluate the switching function s(x)."""
    xs = state_coords(x, surface.dimension)
    v = float(surface.value(xs))
    if not math.isfinite(v):
        raise NumericsError(f"surface value at {xs} is not finite: {v!r}")
    return v


def surface_gradient(surface: SlidingSurface, x: StateLike) -> Vector:
    """Evaluate the analytic row gradient of s at x."""
    xs = state_coords(x, surface.dimension)
    return _check_vector(surface.gradient(xs), len(xs), "surface gradient")


def surface_gradient_fd(surface: SlidingSurface, x: StateLike, h: float = 1e-5) -> Vector:
    """Central-difference gradient of s, the independent oracle for the analytic one."""
    if not (math.isfinite(h) and h > 0.0):
        raise ParameterError(f"finite-difference step must be positive, got {h!r}")
    xs = state_coords(x, surface.dimension)
    sval = surface.value
    grad = []
    for i in range(len(xs)):
        plus = list(xs)
        minus = list(xs)
        plus[i] = xs[i] + h
        minus[i] = xs[i] - h
        grad.append((float(sval(plus)) - float(sval(minus))) / (2.0 * h))
    return _check_vector(grad, len(xs), "finite-difference gradient")


def eval_plant_derivative(model: SystemModel, x: StateLike, t: float, u: float) -> Vector:
    """Full plant derivative f(x,t) + b(x)*u + b(x)*d(t) + w_u(x,t)."""
    xs = state_coords(x, model.dimension)
    if not math.isfinite(u):
        raise ParameterError(f"control input must be finite, got {u!r}")
    if not math.isfinite(t):
        raise ParameterError(f"time must be finite, got {t!r}")
    f = _check_vector(model.drift(xs, t), model.dimension, "drift")
    b = _check_vector(model.input_vector(xs), model.dimension, "input vector")
    w = _check_vector(model.unmatched_disturbance(xs, t), model.dimension, "unmatched disturbance")
    ud = u + model.matched_disturbance.value(t)
    out = tuple(f[i] + b[i] * ud + w[i] for i in range(model.dimension))
    return _check_vector(out, model.dimension, "plant derivative")
