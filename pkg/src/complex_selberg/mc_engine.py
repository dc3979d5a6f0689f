"""Importance-sampling Monte Carlo for integrals over C^N.

Coordinates are drawn one after another.  Coordinate ``k`` is written as
``z_k = origin + unit * zeta`` where ``origin`` and ``unit`` are affine in the
coordinates drawn before it, and ``zeta`` comes from a mixture of

* power-law anchors ``(p / (pi R^(2p))) |zeta - c|^(2p-2)`` on ``|zeta - c| < R``,
  whose centers ``c`` may also depend on earlier coordinates, and
* a heavy tail ``((s-1)/pi) (1 + |zeta|^2)^(-s)``.

The density of ``z_k`` given the earlier coordinates is then
``q(zeta) / |unit|^2``, and the sample weight is ``f(z) / prod_k q_k``.  With
fixed anchors at 0 and 1, unit frame and no dependence on earlier coordinates
this is exactly the per-coordinate :class:`SamplerSpec` mixture.

Each chunk has its own Philox stream keyed by ``(seed, chunk)``; chunk
statistics are merged in chunk order, so results do not depend on how many
worker processes ran the chunks.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .closed_form import (
    BetaParams,
    DfaParams,
    DirichletParams,
    DualParams,
    LemmaParams,
    TrapezoidParams,
    TriangularParams,
    domain_check,
)
from .errors import NonFiniteSample
from .exponents import FieldExponent
from .identities import IdentitySpec, evaluate_rhs
from .integrands import Affine, ProductIntegrand, build_integrand, const, trapezoid_index, var

__all__ = [
    "SamplerSpec",
    "Component",
    "CoordinateProposal",
    "Proposal",
    "MonteCarloEstimate",
    "VerificationReport",
    "sample_coordinate",
    "mixture_density",
    "integrate",
    "verify",
    "default_proposal",
    "chunk_rng",
    "Draw",
]

DEFAULT_BATCH = 1 << 16
MIN_SHAPE = 0.05
MIN_TAIL = 1.05


# ------------------------------------------------------------------ specs


@dataclass(frozen=True)
class SamplerSpec:
    """Per-coordinate mixture: power law at 0, power law at 1, heavy tail."""

    w0: float = 1 / 3
    p0: float = 1.0
    w1: float = 1 / 3
    p1: float = 1.0
    winf: float = 1 / 3
    s: float = 2.0

    def __post_init__(self):
        if min(self.w0, self.w1, self.winf) <= 0:
            raise ValueError("mixture weights must be positive")
        if abs(self.w0 + self.w1 + self.winf - 1.0) > 1e-12:
            raise ValueError("mixture weights must sum to 1")
        if self.p0 <= 0 or self.p1 <= 0:
            raise ValueError("power-law shapes must be positive")
        if self.s <= 1:
            raise ValueError("tail exponent must exceed 1")

    def as_coordinate(self) -> CoordinateProposal:
        return CoordinateProposal(
            (
                Component(self.winf, self.s),
                Component(self.w0, self.p0, const(0)),
                Component(self.w1, self.p1, const(1)),
            )
        )

    @classmethod
    def from_dict(cls, data: dict) -> SamplerSpec:
        return cls(**{k: float(v) for k, v in data.items()})


_ZERO = const(0)
_ONE = const(1)


@dataclass(frozen=True)
class Component:
    """One mixture component for a coordinate, in the frame ``z = origin + unit * zeta``.

    With ``center`` set it is a power law of shape ``shape`` on the disk of
    ``radius`` around ``center``; with ``center=None`` it is the heavy tail
    with exponent ``s = shape``.  ``center``, ``origin`` and ``unit`` are
    affine in the coordinates drawn earlier.
    """

    weight: float
    shape: float
    center: Affine | None = None
    origin: Affine = _ZERO
    unit: Affine = _ONE
    radius: float = 1.0

    @property
    def is_tail(self) -> bool:
        return self.center is None

    def absolute_center(self) -> Affine | None:
        """``origin + unit * center`` as an affine form, when it is one."""
        center = _ZERO if self.center is None else self.center
        if not self.unit.terms:
            shifted = _affine_scaled(center, self.unit.const)
        elif not center.terms:
            shifted = _affine_scaled(self.unit, center.const)
        else:
            return None
        return None if shifted is None else _affine_add(self.origin, shifted)


@dataclass(frozen=True)
class CoordinateProposal:
    """Mixture of :class:`Component` densities for one coordinate."""

    components: tuple[Component, ...]
    _centers: tuple = field(init=False, repr=False, compare=False)
    _same: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("a coordinate proposal needs at least one component")
        total = sum(c.weight for c in comps)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"mixture weights sum to {total}, not 1")
        if not any(c.is_tail for c in comps):
            raise ValueError("a heavy-tail component is required for a density positive on all of C")
        for c in comps:
            if c.weight <= 0 or c.radius <= 0:
                raise ValueError("component weights and radii must be positive")
            if c.is_tail and c.shape <= 1:
                raise ValueError("tail exponent must exceed 1")
            if not c.is_tail and c.shape <= 0:
                raise ValueError("power-law shapes must be positive")
        centers = tuple(c.absolute_center() for c in comps)
        n = len(comps)
        same = np.zeros((n, n), dtype=bool)
        for i in range(n):
            for j in range(n):
                same[i, j] = centers[i] is not None and centers[i] == centers[j]
        object.__setattr__(self, "_centers", centers)
        object.__setattr__(self, "_same", same)
        # components sharing a center (and unit) share distance computations
        keys, group = [], []
        for c, a in zip(comps, centers):
            key = (a, c.unit) if a is not None else (c.origin, c.unit, c.center)
            if key not in keys:
                keys.append(key)
            group.append(keys.index(key))
        object.__setattr__(self, "_group", tuple(group))
        object.__setattr__(self, "_shapes", np.array([c.shape for c in comps]))
        object.__setattr__(self, "_radii", np.array([c.radius for c in comps]))
        object.__setattr__(self, "_tails", np.array([c.is_tail for c in comps]))

    @property
    def depends_on(self) -> int:
        """Largest earlier coordinate index referenced (-1 if none)."""
        idx = [-1]
        for c in self.components:
            for form in (c.origin, c.unit, c.center or _ZERO):
                idx += [i for i, _ in form.terms]
        return max(idx)

    # -- frames

    def _frames(self, z_prev, size) -> _Frames:
        centers, units, done = [], [], {}
        for c, a, g in zip(self.components, self._centers, self._group):
            if g not in done:
                u = c.unit(z_prev) if c.unit.terms else c.unit.const
                if a is not None:
                    ctr = a(z_prev) if a.terms else a.const
                else:
                    ctr = c.origin(z_prev) + u * c.center(z_prev)
                done[g] = (ctr, u)
            ctr, u = done[g]
            centers.append(ctr)
            units.append(u)
        weights = np.array([c.weight for c in self.components])
        if all(np.ndim(u) == 0 for u in units):
            log_w = np.log(weights)[:, None]
        else:
            valid = np.array([np.broadcast_to(np.isfinite(u) & (u != 0), (size,)) for u in units])
            if valid.all():
                log_w = np.log(weights)[:, None]
            else:
                w = np.where(valid, weights[:, None], 0.0)
                with np.errstate(divide="ignore"):
                    log_w = np.log(w / w.sum(axis=0))
        log_scale = {}
        for g, u in zip(self._group, units):
            if g not in log_scale:
                with np.errstate(divide="ignore", invalid="ignore"):
                    log_scale[g] = np.log(np.abs(u))
        return _Frames(centers, units, log_w, [log_scale[g] for g in self._group])

    def _log_density(self, z, fr: _Frames, chosen=None, disp=None):
        parts = np.empty((len(self.components), z.shape[0]))
        log_disp = None
        if disp is not None:
            with np.errstate(divide="ignore"):
                log_disp = np.log(np.abs(disp))
        rho_cache, tail_cache, mask_cache = {}, {}, {}
        for j, c in enumerate(self.components):
            g = self._group[j]
            if g not in rho_cache:
                d = z - fr.centers[j]
                with np.errstate(divide="ignore"):
                    log_dist = 0.5 * np.log(d.real * d.real + d.imag * d.imag)
                if chosen is not None and self._centers[j] is not None:
                    log_dist = np.where(self._same[chosen, j], log_disp, log_dist)
                with np.errstate(invalid="ignore"):
                    rho_cache[g] = log_dist - fr.log_scale[j]
            log_rho = rho_cache[g]
            if c.is_tail:
                if g not in tail_cache:
                    with np.errstate(over="ignore"):
                        tail_cache[g] = np.log1p(np.exp(2 * log_rho))
                kern = math.log((c.shape - 1) / math.pi) - c.shape * tail_cache[g]
            else:
                key = (g, c.radius)
                if key not in mask_cache:
                    mask_cache[key] = log_rho >= math.log(c.radius)
                kern = math.log(c.shape / math.pi) - 2 * c.shape * math.log(c.radius) + (2 * c.shape - 2) * log_rho
                kern[mask_cache[key]] = -np.inf
            with np.errstate(invalid="ignore"):
                parts[j] = fr.log_w[j] + kern - 2 * fr.log_scale[j]
        parts[np.isnan(parts)] = -np.inf
        top = parts.max(axis=0)
        finite = np.isfinite(top)
        safe_top = np.where(finite, top, 0.0)
        parts -= safe_top
        np.exp(parts, out=parts)
        with np.errstate(divide="ignore"):
            out = safe_top + np.log(parts.sum(axis=0))
        return np.where(finite, out, top)

    # -- sampling

    def sample(self, z_prev, rng: np.random.Generator, size: int, frames: _Frames | None = None):
        """Draw one coordinate for each row of ``z_prev``.

        Returns ``(z, disp, chosen, log_q)`` where ``disp`` is the exact
        displacement of ``z`` from the chosen component's absolute center.
        """
        fr = self._frames(z_prev, size) if frames is None else frames
        n_comp = len(self.components)
        r = rng.random(size)
        if fr.log_w.shape[1] == 1:
            cum = np.cumsum(np.exp(fr.log_w[:, 0]))
            chosen = np.searchsorted(cum, r * cum[-1], side="right")
        else:
            cum = np.cumsum(np.exp(fr.log_w), axis=0)
            chosen = (r[None, :] * cum[-1] >= cum).sum(axis=0)
        chosen = np.minimum(chosen, n_comp - 1)
        u = 1.0 - rng.random(size)  # in (0, 1]
        direction = np.exp(2j * math.pi * rng.random(size))
        shape = self._shapes[chosen]
        tail = self._tails[chosen]
        rho = np.empty(size)
        # heavy tail: |zeta|^2 = U^(-1/(s-1)) - 1; power law: |zeta - c| = R U^(1/(2p))
        with np.errstate(divide="ignore", over="ignore"):
            rho[tail] = np.sqrt(np.expm1(-np.log(u[tail]) / (shape[tail] - 1)))
        body = ~tail
        rho[body] = self._radii[chosen[body]] * u[body] ** (0.5 / shape[body])
        if all(np.ndim(v) == 0 for v in fr.centers) and all(np.ndim(v) == 0 for v in fr.units):
            center = np.asarray(fr.centers, dtype=complex)[chosen]
            unit = np.asarray(fr.units, dtype=complex)[chosen]
        else:
            center = np.empty(size, dtype=complex)
            unit = np.empty(size, dtype=complex)
            for j in range(n_comp):
                sel = chosen == j
                if not sel.any():
                    continue
                ctr, un = fr.centers[j], fr.units[j]
                center[sel] = ctr if np.ndim(ctr) == 0 else ctr[sel]
                unit[sel] = un if np.ndim(un) == 0 else un[sel]
        disp = unit * rho * direction
        z = center + disp
        log_q = self._log_density(z, fr, chosen, disp)
        return z, disp, chosen, log_q

    def log_density(self, z, z_prev=None):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if z_prev is None:
            z_prev = np.zeros(z.shape + (0,), dtype=complex)
        return self._log_density(z, self._frames(z_prev, z.shape[0]))


@dataclass
class _Frames:
    centers: list
    units: list
    log_w: np.ndarray
    log_scale: list


@dataclass(frozen=True)
class Proposal:
    coords: tuple[CoordinateProposal, ...]

    @property
    def dim(self) -> int:
        return len(self.coords)

    @classmethod
    def product(cls, spec: SamplerSpec | CoordinateProposal, dim: int) -> Proposal:
        c = spec.as_coordinate() if isinstance(spec, SamplerSpec) else spec
        return cls((c,) * dim)

    def sample(self, rng: np.random.Generator, size: int) -> Draw:
        """Draw ``size`` configurations together with their log densities."""
        z = np.zeros((size, self.dim), dtype=complex)
        disp = np.zeros((size, self.dim), dtype=complex)
        chosen = np.zeros((size, self.dim), dtype=np.int64)
        log_q = np.zeros(size)
        frames, last = None, None
        for k, c in enumerate(self.coords):
            # coordinates sharing a proposal that ignores the previous coordinate share its frames
            if c is not last or c.depends_on >= k - 1:
                frames = c._frames(z[:, :k], size)
            last = c
            z[:, k], disp[:, k], chosen[:, k], lq = c.sample(z[:, :k], rng, size, frames)
            log_q += lq
        return Draw(z, log_q, chosen, disp)

    def log_density(self, z) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        out = np.zeros(z.shape[0])
        for k, c in enumerate(self.coords):
            out += c.log_density(z[:, k], z[:, :k])
        return out


@dataclass
class Draw:
    """A batch of samples.

    ``chosen[:, k]`` is the mixture component used for coordinate ``k`` and
    ``disp[:, k]`` the displacement of ``z[:, k]`` from that component's
    absolute center.  The displacement stays exact even when it is far below
    the resolution of ``z`` itself.
    """

    z: np.ndarray
    log_q: np.ndarray
    chosen: np.ndarray
    disp: np.ndarray


# ------------------------------------------------------------ mixtures


def _as_coordinate(spec) -> CoordinateProposal:
    return spec.as_coordinate() if isinstance(spec, SamplerSpec) else spec


def mixture_density(spec: SamplerSpec | CoordinateProposal, z) -> np.ndarray:
    """Density of a single-coordinate mixture (no dependence on other coordinates)."""
    z = np.asarray(z, dtype=complex)
    return np.exp(_as_coordinate(spec).log_density(z.reshape(-1))).reshape(z.shape)


def sample_coordinate(spec: SamplerSpec | CoordinateProposal, rng: np.random.Generator, size: int | None = None):
    """Draw from a single-coordinate mixture; return ``(z, density)``.

    With ``size=None`` scalars are returned, otherwise arrays of length ``size``.
    """
    n = 1 if size is None else size
    z, _, _, log_q = _as_coordinate(spec).sample(np.zeros((n, 0), dtype=complex), rng, n)
    dens = np.exp(log_q)
    if size is None:
        return complex(z[0]), float(dens[0])
    return z, dens


# ------------------------------------------------------------ affine forms


def _affine_scaled(form: Affine, c: complex) -> Affine | None:
    """``c * form`` when the coefficients stay integers, else ``None``."""
    c = complex(c)
    terms = []
    for i, coef in form.terms:
        v = coef * c
        if v.imag != 0 or v.real != round(v.real):
            return None
        if v.real:
            terms.append((i, int(round(v.real))))
    return Affine(complex(form.const * c), tuple(sorted(terms)))


def _affine_add(x: Affine, y: Affine, sign: int = 1) -> Affine:
    acc = dict(x.terms)
    for i, coef in y.terms:
        acc[i] = acc.get(i, 0) + sign * coef
    return Affine(complex(x.const + sign * y.const), tuple(sorted((i, c) for i, c in acc.items() if c)))


# ------------------------------------------------------------- statistics


@dataclass
class _Moments:
    """Running count, means and centered second moments of Re and Im."""

    n: int = 0
    mean: np.ndarray = field(default_factory=lambda: np.zeros(2))
    m2: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def add_batch(self, values: np.ndarray) -> None:
        x = np.stack([values.real, values.imag])
        nb = x.shape[1]
        if nb == 0:
            return
        mb = x.mean(axis=1)
        m2b = ((x - mb[:, None]) ** 2).sum(axis=1)
        self.merge(_Moments(nb, mb, m2b))

    def merge(self, other: _Moments) -> None:
        if other.n == 0:
            return
        n = self.n + other.n
        delta = other.mean - self.mean
        self.mean = self.mean + delta * (other.n / n)
        self.m2 = self.m2 + other.m2 + delta**2 * (self.n * other.n / n)
        self.n = n


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: complex
    stderr_re: float
    stderr_im: float
    n_samples: int
    seed: int
    chunks: int
    max_weight_share: float = 0.0

    def to_dict(self) -> dict:
        return {
            "mean_re": self.mean.real,
            "mean_im": self.mean.imag,
            "stderr_re": self.stderr_re,
            "stderr_im": self.stderr_im,
            "n": self.n_samples,
            "seed": self.seed,
            "chunks": self.chunks,
        }


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    """Independent counter-based stream for one chunk."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def _run_chunk(args):
    integrand, proposal, seed, chunk, size, batch = args
    rng = chunk_rng(seed, chunk)
    overrides = _center_overrides(integrand, proposal) if isinstance(integrand, ProductIntegrand) else ()
    moments = _Moments()
    abs_sum = 0.0
    abs_max = 0.0
    done = 0
    while done < size:
        b = min(batch, size - done)
        draw = proposal.sample(rng, b)
        w = _weights(integrand, draw, overrides)
        moments.add_batch(w)
        a = np.abs(w)
        abs_sum += float(a.sum())
        abs_max = max(abs_max, float(a.max(initial=0.0)))
        done += b
    return moments, abs_sum, abs_max


def _center_overrides(integrand: ProductIntegrand, proposal: Proposal):
    """``(factor, coordinate, component, scale)`` for factors vanishing at a component's center.

    Such a factor equals ``scale * (z_k - center)``, which is ``scale * disp``
    exactly whenever that component produced ``z_k``.
    """
    out = []
    forms = [(i, dict(f.form.terms), f.form) for i, f in enumerate(integrand.factors)]
    for k, c in enumerate(proposal.coords):
        for j, center in enumerate(c._centers):
            if center is None:
                continue
            ref = _affine_add(Affine(0j, ((k, 1),)), center, sign=-1)
            for i, terms, form in forms:
                lam = terms.get(k)
                if not lam:
                    continue
                cand = _affine_scaled(ref, lam)
                if cand is not None and cand.terms == tuple(sorted(form.terms)) and cand.const == form.const:
                    out.append((i, k, j, lam))
    return tuple(out)


def _weights(integrand, draw: Draw, overrides=()):
    z, log_q = draw.z, draw.log_q
    if isinstance(integrand, ProductIntegrand):
        bases = integrand.bases(z)
        for i, k, j, lam in overrides:
            sel = draw.chosen[:, k] == j
            if sel.any():
                bases[i] = np.where(sel, lam * draw.disp[:, k], bases[i])
        log_f = integrand.log_value(z, bases)
        with np.errstate(over="ignore", invalid="ignore"):
            w = integrand.scale * np.exp(log_f - log_q)
        w = np.where(np.isneginf(log_f.real), 0j, w)
    else:
        with np.errstate(over="ignore", invalid="ignore"):
            w = np.asarray(integrand(z), dtype=complex) * np.exp(-log_q)
    bad = ~np.isfinite(w)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise NonFiniteSample(f"non-finite weight {w[i]} at sample {z[i]}")
    return w


def integrate(
    integrand,
    dim: int,
    proposal: Proposal | SamplerSpec | CoordinateProposal | None = None,
    n_samples: int = 100_000,
    seed: int = 0,
    chunks: int = 1,
    workers: int = 1,
    batch: int = DEFAULT_BATCH,
) -> MonteCarloEstimate:
    """Estimate ``int f`` over ``C^dim`` by importance sampling.

    ``integrand`` is a :class:`ProductIntegrand` or any vectorized callable
    mapping ``(B, dim)`` complex arrays to ``B`` values.  ``n_samples`` must be
    a multiple of ``chunks``.

    Raises:
        NonFiniteSample: a sample produced a non-finite weight.
    """
    if chunks < 1 or n_samples % chunks:
        raise ValueError(f"n_samples={n_samples} must be a positive multiple of chunks={chunks}")
    if proposal is None:
        proposal = SamplerSpec()
    if not isinstance(proposal, Proposal):
        proposal = Proposal.product(proposal, dim)
    if proposal.dim != dim:
        raise ValueError(f"proposal has {proposal.dim} coordinates, integrand {dim}")
    size = n_samples // chunks
    jobs = [(integrand, proposal, seed, c, size, batch) for c in range(chunks)]
    if workers > 1 and chunks > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk, jobs))
    else:
        results = [_run_chunk(j) for j in jobs]
    total = _Moments()
    abs_sum = abs_max = 0.0
    for moments, s, m in results:
        total.merge(moments)
        abs_sum += s
        abs_max = max(abs_max, m)
    n = total.n
    var = total.m2 / (n - 1) if n > 1 else np.full(2, np.inf)
    se = np.sqrt(var / n)
    return MonteCarloEstimate(
        mean=complex(total.mean[0], total.mean[1]),
        stderr_re=float(se[0]),
        stderr_im=float(se[1]),
        n_samples=n,
        seed=seed,
        chunks=chunks,
        max_weight_share=abs_max / abs_sum if abs_sum else 0.0,
    )


# --------------------------------------------------------- default shapes

CLUSTER_SHARE = 0.5


def _shape(floor: float) -> float:
    return min(max(floor, MIN_SHAPE), 1.0)


def _tail(floor_sum: float) -> float:
    return max(2.0 - floor_sum, MIN_TAIL)


def _mixture(points, s, clusters=(), origin=_ZERO, unit=_ONE) -> CoordinateProposal:
    """Tail plus one anchor per singular point, optionally with pair-cluster frames.

    ``points`` are ``(center, floor)`` pairs in the ``zeta`` frame.  A cluster
    ``(A, pA, B, pB)`` adds a frame with origin ``A`` and unit ``B - A``,
    anchored at both ends, which keeps the proposal matched to the integrand
    when two singular points are much closer than 1.
    """
    plain_share = 1.0 - CLUSTER_SHARE if clusters else 1.0
    w = plain_share / (len(points) + 1)
    comps = [Component(w, s, None, origin, unit)]
    comps += [Component(w, _shape(p), c, origin, unit) for c, p in points]
    if clusters:
        wc = CLUSTER_SHARE / (3 * len(clusters))
        for a, pa, b, pb in clusters:
            frame = {"origin": a, "unit": _affine_add(b, a, sign=-1)}
            comps += [
                Component(wc, _tail(pa + pb), None, **frame),
                Component(wc, _shape(pa), _ZERO, **frame),
                Component(wc, _shape(pb), _ONE, **frame),
            ]
    return CoordinateProposal(tuple(comps))


def _sum_floor(exps) -> float:
    return sum(e.floor for e in exps)


def _beta_proposal(p: BetaParams) -> Proposal:
    c = _mixture([(_ZERO, p.a.floor), (_ONE, p.b.floor)], _tail(p.a.floor + p.b.floor))
    return Proposal((c,))


def _dfa_proposal(p: DfaParams) -> Proposal:
    s = _tail(p.sigma.floor + p.tau.floor + 2 * (p.n - 1) * p.theta.floor)
    c = _mixture([(_ZERO, p.sigma.floor), (_ONE, p.tau.floor)], s)
    return Proposal((c,) * p.n)


def _dirichlet_proposal(p: DirichletParams) -> Proposal:
    # stick breaking: t_k = (1 - t_1 - ... - t_{k-1}) zeta_k, so zeta_k sees a beta(a_k, a_{k+1} + ...) shape
    coords = []
    for k in range(p.n):
        ak, rest = p.a[k].floor, _sum_floor(p.a[k + 1 :])
        remaining = Affine(1 + 0j, tuple((i, -1) for i in range(k)))
        coords.append(_mixture([(_ZERO, ak), (_ONE, rest)], _tail(ak + rest), unit=remaining))
    return Proposal(tuple(coords))


def _lemma_proposal(p: LemmaParams) -> Proposal:
    points = [(_ZERO, p.sigma.floor), (_ONE, p.tau.floor)]
    points += [(const(z), th.floor) for th, z in zip(p.theta, p.z)]
    s = _tail(p.sigma.floor + p.tau.floor + _sum_floor(p.theta))
    return Proposal((_mixture(points, s),) * p.n)


def _dual_proposal(p: DualParams) -> Proposal:
    points = [(const(u), p.theta.floor) for u in p.u]
    return Proposal((_mixture(points, _tail((p.n + 1) * p.theta.floor)),) * p.n)


def _rows_proposal(m, n, sig, ta, th, row_sum) -> Proposal:
    """Row-by-row proposal for configurations ``C^m x ... x C^n``.

    Row ``j > m`` is anchored at 0, 1 and each point of row ``j - 1``, with a
    cluster frame for every pair of those points that involves a row point.
    """
    coords = []
    for j in range(m, n + 1):
        s = _tail(sig(j).floor + ta(j).floor + row_sum(j - 1).floor)
        points = [(_ZERO, sig(j).floor), (_ONE, ta(j).floor)]
        clusters = []
        if j > m:
            row = [(var(trapezoid_index(m, j - 1, a + 1)), t.floor) for a, t in enumerate(th(j - 1))]
            for a in range(len(points)):
                clusters += [points[a] + r for r in row]
            clusters += [row[a] + row[b] for a, b in combinations(range(len(row)), 2)]
            points += row
        coords += [_mixture(points, s, clusters)] * j
    return Proposal(tuple(coords))


def _triangular_proposal(p: TriangularParams) -> Proposal:
    return _rows_proposal(1, p.n, lambda j: p.sigma[j - 1], lambda j: p.tau[j - 1], lambda j: p.theta[j - 1], p.theta_sum)


def _trapezoid_proposal(p: TrapezoidParams) -> Proposal:
    # row m sees 2(m-1) nu through its pair factors
    def row_sum(j):
        return p.nu * (2 * (p.m - 1)) if j == p.m - 1 else p.theta_sum(j)

    return _rows_proposal(p.m, p.n, p.sig, p.ta, p.th, row_sum)


_PROPOSALS = {
    BetaParams: _beta_proposal,
    DfaParams: _dfa_proposal,
    DirichletParams: _dirichlet_proposal,
    LemmaParams: _lemma_proposal,
    DualParams: _dual_proposal,
    TriangularParams: _triangular_proposal,
    TrapezoidParams: _trapezoid_proposal,
}


def default_proposal(params) -> Proposal:
    """Proposal shaped by the integrand's singular and tail exponents."""
    params = getattr(params, "params", params)
    return _PROPOSALS[type(params)](params)


# ------------------------------------------------------------ verification


def _z_score(diff: float, stderr: float, scale: float) -> float:
    if stderr > 0:
        return diff / stderr
    return 0.0 if abs(diff) <= 1e-12 * max(1.0, scale) else math.copysign(math.inf, diff)


@dataclass(frozen=True)
class VerificationReport:
    spec: IdentitySpec
    domain: list
    domain_passed: bool
    estimate: MonteCarloEstimate | None
    rhs: complex | None
    z_re: float | None
    z_im: float | None
    wall_seconds: float

    @property
    def z_abs(self) -> float | None:
        if self.z_re is None:
            return None
        return math.hypot(self.z_re, self.z_im)

    def passed(self, gate: float = 4.0) -> bool:
        return self.domain_passed and self.z_abs is not None and self.z_abs < gate

    def to_dict(self, include_timing: bool = True) -> dict:
        out = {
            "identity": self.spec.identity,
            "params": self.spec.to_dict()["params"],
            "domain": self.domain if self.domain_passed else "failed",
            "mc": self.estimate.to_dict() if self.estimate else None,
            "rhs": {"re": self.rhs.real, "im": self.rhs.imag} if self.rhs is not None else None,
            "z": {"re": self.z_re, "im": self.z_im, "abs": self.z_abs} if self.z_re is not None else None,
        }
        if not self.domain_passed:
            out["domain_checks"] = self.domain
        if include_timing:
            out["wall_seconds"] = self.wall_seconds
        return out


def verify(
    spec,
    n_samples: int = 1_000_000,
    seed: int = 0,
    chunks: int = 1,
    workers: int = 1,
    proposal: Proposal | SamplerSpec | None = None,
) -> VerificationReport:
    """Monte Carlo estimate of an identity's LHS compared with its closed form.

    When the parameters fail the convergence inequalities the Monte Carlo
    run is skipped and the report carries the verdicts only.
    """
    if not isinstance(spec, IdentitySpec):
        spec = IdentitySpec.from_params(spec)
    start = time.perf_counter()
    verdict = domain_check(spec)
    if not verdict.passed:
        return VerificationReport(spec, verdict.to_list(), False, None, None, None, None, time.perf_counter() - start)
    integrand = build_integrand(spec.params)
    if proposal is None:
        proposal = default_proposal(spec.params)
    est = integrate(integrand, integrand.dim, proposal, n_samples, seed, chunks, workers)
    rhs = evaluate_rhs(spec)
    scale = abs(rhs)
    z_re = _z_score(est.mean.real - rhs.real, est.stderr_re, scale)
    z_im = _z_score(est.mean.imag - rhs.imag, est.stderr_im, scale)
    return VerificationReport(spec, verdict.to_list(), True, est, rhs, z_re, z_im, time.perf_counter() - start)
