"""Kernels k: [0,1]^2 -> [0, inf), scaling sequences and the extremal
connection probabilities used by the couplings.

Kernel values above 1 are allowed as long as ``k / lambda_n <= 1`` at every
simulated n; that range check happens in :func:`p_max` and in the samplers.
"""
from dataclasses import dataclass, field
import math

import numpy as np


TOL = 1e-12


class KernelError(ValueError):
    pass


class ValueOutOfRange(KernelError):
    pass


class AsymmetricBlockMatrix(KernelError):
    pass


class ProbabilityExceedsOne(KernelError):
    pass


class EmptyRegion(KernelError):
    pass


FAMILIES = ("constant", "rank1", "block", "bump", "custom")


@dataclass(frozen=True, eq=False)
class Kernel:
    family: str
    evaluator: object
    declared_max: tuple
    params: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    def __call__(self, x, y):
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        return np.asarray(self.evaluator(x, y), dtype=np.float64)

    @property
    def m(self):
        return self.declared_max[0]

    @property
    def peak(self):
        return self.declared_max[1]

    def describe(self):
        """JSON-friendly description (callables are named, not serialized)."""
        out = {"family": self.family}
        for key, val in self.params.items():
            if callable(val):
                out[key] = getattr(val, "__name__", "callable")
            elif isinstance(val, np.ndarray):
                out[key] = val.tolist()
            else:
                out[key] = val
        out["declared_max"] = [float(self.declared_max[0]), float(self.declared_max[1])]
        return out


def _check_value(name, value, upper=None):
    if not np.isfinite(value) or value < 0:
        raise ValueOutOfRange(f"{name}={value} must be finite and non-negative")
    if upper is not None and value > upper:
        raise ValueOutOfRange(f"{name}={value} exceeds {upper}")


def _check_point(name, x):
    if not 0.0 <= x <= 1.0:
        raise ValueOutOfRange(f"{name}={x} must lie in [0, 1]")


def make_constant(p):
    p = float(p)
    _check_value("p", p)

    def constant(x, y):
        return np.full(np.broadcast(x, y).shape, p)

    # any m maximizes a constant kernel; 0.5 keeps R_n unclipped longest
    return Kernel("constant", constant, (0.5, p), {"p": p})


def make_rank1(g1, g2=None, m=None, resolution=10001):
    """Symmetric rank-1 kernel ``g(x) g(y)``.

    Only the symmetric product is supported; passing a different ``g2``
    raises.  The diagonal maximizer is located by a grid scan of ``g`` unless
    ``m`` is given.
    """
    if g2 is not None and g2 is not g1:
        raise KernelError("rank-1 kernels must use the symmetric product g(x) g(y)")

    def rank1(x, y):
        return np.asarray(g1(x), dtype=np.float64) * np.asarray(g1(y), dtype=np.float64)

    xs = np.linspace(0.0, 1.0, resolution)
    gx = np.asarray(g1(xs), dtype=np.float64)
    if np.any(gx < 0) or not np.all(np.isfinite(gx)):
        raise ValueOutOfRange("g must be finite and non-negative on [0, 1]")
    if m is None:
        m = float(xs[int(np.argmax(gx))])
    _check_point("m", m)
    value = float(rank1(m, m))
    return Kernel("rank1", rank1, (m, value), {"g": g1, "m": m})


def block_index(breakpoints, x):
    """Block of each point: block b covers [bp[b-1], bp[b]), the last one is closed."""
    return np.searchsorted(breakpoints, x, side="right")


def make_block(grid, breakpoints=None):
    grid = np.array(grid, dtype=np.float64)
    if grid.ndim != 2 or grid.shape[0] != grid.shape[1] or grid.shape[0] == 0:
        raise KernelError("block matrix must be square and non-empty")
    if not np.array_equal(grid, grid.T):
        raise AsymmetricBlockMatrix("block matrix must be symmetric")
    if np.any(grid < 0) or not np.all(np.isfinite(grid)):
        raise ValueOutOfRange("block values must be finite and non-negative")
    nb = grid.shape[0]
    if breakpoints is None:
        bp = np.arange(1, nb, dtype=np.float64) / nb
    else:
        bp = np.atleast_1d(np.asarray(breakpoints, dtype=np.float64))
    if bp.size != nb - 1:
        raise KernelError(f"{nb} blocks need {nb - 1} breakpoints, got {bp.size}")
    if bp.size and (np.any(np.diff(bp) <= 0) or bp[0] <= 0 or bp[-1] >= 1):
        raise KernelError("breakpoints must be strictly increasing inside (0, 1)")
    grid.flags.writeable = False
    bp.flags.writeable = False

    def block(x, y):
        return grid[block_index(bp, x), block_index(bp, y)]

    diag = np.diag(grid)
    b = int(np.argmax(diag))
    edges = np.concatenate([[0.0], bp, [1.0]])
    m = 0.5 * (edges[b] + edges[b + 1])
    return Kernel("block", block, (float(m), float(diag[b])),
                  {"grid": grid, "breakpoints": bp})


def make_bump(m, peak, width):
    """``peak * exp(-((x - m)^2 + (y - m)^2) / width^2)``."""
    m, peak, width = float(m), float(peak), float(width)
    _check_point("m", m)
    _check_value("peak", peak)
    if not width > 0:
        raise ValueOutOfRange("width must be positive")
    w2 = width * width

    def bump(x, y):
        return peak * np.exp(-((x - m) ** 2 + (y - m) ** 2) / w2)

    return Kernel("bump", bump, (m, peak), {"m": m, "peak": peak, "width": width})


def make_custom(func, m, value=None):
    """User kernel; the maximizer must be declared (validate it afterwards)."""
    m = float(m)
    _check_point("m", m)
    if value is None:
        value = float(np.asarray(func(np.float64(m), np.float64(m))))
    return Kernel("custom", func, (m, float(value)), {"m": m})


def load_block_grid(path):
    """Whitespace-separated square matrix, one row per line."""
    return np.loadtxt(path, dtype=np.float64, ndmin=2)


# -- validation ---------------------------------------------------------------

OSCILLATION_BOXES = (0.1, 0.05, 0.01, 0.005)


@dataclass
class ValidationReport:
    symmetry_violation: float
    max_excess: float
    min_value: float
    oscillations: list
    symmetric: bool
    bounded: bool
    nonnegative: bool
    continuous: bool
    argmax_grid: tuple

    @property
    def passed(self):
        return self.symmetric and self.bounded and self.nonnegative and self.continuous


def _box_oscillation(k, m, h, points=33):
    lo, hi = max(0.0, m - h), min(1.0, m + h)
    xs = np.linspace(lo, hi, points)
    if not lo <= m <= hi:
        xs = np.append(xs, m)
    x, y = np.meshgrid(xs, xs, indexing="ij")
    vals = k(x, y)
    return float(vals.max() - vals.min())


def validate_kernel(k, grid_resolution=101, continuity_threshold=0.05, tol=TOL):
    """Grid checks of symmetry, the declared diagonal maximum, and continuity at (m, m)."""
    if grid_resolution < 2:
        raise ValueError("grid_resolution must be >= 2")
    xs = np.linspace(0.0, 1.0, grid_resolution)
    xs = np.unique(np.append(xs, k.m))
    x, y = np.meshgrid(xs, xs, indexing="ij")
    vals = k(x, y)
    sym = float(np.max(np.abs(vals - vals.T)))
    excess = float(np.max(vals) - k.peak)
    arg = np.unravel_index(int(np.argmax(vals)), vals.shape)
    osc = [_box_oscillation(k, k.m, h) for h in OSCILLATION_BOXES]
    mono = all(osc[i + 1] <= osc[i] + tol for i in range(len(osc) - 1))
    return ValidationReport(
        symmetry_violation=sym,
        max_excess=excess,
        min_value=float(vals.min()),
        oscillations=osc,
        symmetric=sym <= tol,
        bounded=excess <= tol,
        nonnegative=float(vals.min()) >= 0.0,
        continuous=mono and osc[-1] < continuity_threshold,
        argmax_grid=(float(xs[arg[0]]), float(xs[arg[1]])),
    )


# -- scaling sequences and extremal probabilities ------------------------------

@dataclass(frozen=True)
class ScalingSequence:
    rule: str = "constant"
    C: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        if self.rule not in ("constant", "linear", "power"):
            raise ValueError(f"unknown scaling rule {self.rule!r}")
        if not self.C > 0:
            raise ValueError("scaling constant must be positive")

    def __call__(self, n):
        if self.rule == "constant":
            return float(self.C)
        if self.rule == "linear":
            return float(self.C * n)
        return float(self.C * float(n) ** self.alpha)

    def describe(self):
        out = {"rule": self.rule, "C": self.C}
        if self.rule == "power":
            out["alpha"] = self.alpha
        return out


def scaling_from_config(spec):
    if isinstance(spec, (int, float)):
        return ScalingSequence("constant", float(spec))
    if isinstance(spec, str):
        if spec in ("n", "linear"):
            return ScalingSequence("linear", 1.0)
        return ScalingSequence("constant", float(spec))
    return ScalingSequence(spec.get("rule", "constant"), float(spec.get("C", 1.0)),
                           float(spec.get("alpha", 1.0)))


def p_max(k, lam, n):
    p = k.peak / lam(n)
    if p > 1.0:
        raise ProbabilityExceedsOne(f"k(m,m)/lambda_n = {p} > 1 at n={n}")
    return p


@dataclass(frozen=True)
class Region:
    lo: float
    hi: float
    clipped: bool = False

    def __post_init__(self):
        if self.lo > self.hi:
            raise EmptyRegion(f"[{self.lo}, {self.hi}] is empty")

    @classmethod
    def around(cls, m, r):
        lo, hi = m - r, m + r
        clipped = lo < 0.0 or hi > 1.0
        return cls(max(0.0, lo), min(1.0, hi), clipped)

    @property
    def length(self):
        return self.hi - self.lo

    def contains(self, x):
        x = np.asarray(x)
        return (x >= self.lo) & (x <= self.hi)


def _grid_infimum(k, region, points=64, rtol=1e-9, max_iter=200):
    """Adaptive grid minimum of k over region^2; returns (value, last change)."""
    lo_x = lo_y = region.lo
    hi_x = hi_y = region.hi
    best = math.inf
    change = math.inf
    for _ in range(max_iter):
        xs = np.linspace(lo_x, hi_x, points)
        ys = np.linspace(lo_y, hi_y, points)
        x, y = np.meshgrid(xs, ys, indexing="ij")
        vals = k(x, y)
        i, j = np.unravel_index(int(np.argmin(vals)), vals.shape)
        cur = min(best, float(vals[i, j]))
        change = abs(best - cur) / max(abs(cur), 1e-300) if math.isfinite(best) else math.inf
        best = cur
        if change < rtol:
            break
        # zoom on the cell neighbourhood of the current minimum
        dx = (hi_x - lo_x) / (points - 1)
        dy = (hi_y - lo_y) / (points - 1)
        cx, cy = xs[i], ys[j]
        lo_x, hi_x = max(region.lo, cx - 2 * dx), min(region.hi, cx + 2 * dx)
        lo_y, hi_y = max(region.lo, cy - 2 * dy), min(region.hi, cy + 2 * dy)
        if hi_x - lo_x == 0 and hi_y - lo_y == 0:
            break
    return best, change


def kernel_infimum(k, region):
    """inf of k over region^2 (unscaled); exact for closed-form families."""
    key = (region.lo, region.hi)
    if key in k._cache:
        return k._cache[key]
    if k.family == "constant":
        val = k.params["p"]
    elif k.family == "block":
        bp = k.params["breakpoints"]
        a = int(block_index(bp, region.lo))
        b = int(block_index(bp, region.hi))
        val = float(k.params["grid"][a:b + 1, a:b + 1].min())
    elif k.family == "bump":
        m = k.params["m"]
        corner = region.lo if (m - region.lo) >= (region.hi - m) else region.hi
        # same evaluator as the sampler, so the bound is consistent in floating point
        val = float(k(corner, corner))
    else:
        val, _ = _grid_infimum(k, region)
    k._cache[key] = val
    return val


def p_inf_over_region(k, region, lam, n):
    if region.hi < region.lo:
        raise EmptyRegion("region is empty")
    return kernel_infimum(k, region) / lam(n)


def kernel_from_config(spec):
    """Build a kernel from a config mapping ``{"family": ..., params...}``."""
    fam = spec.get("family")
    if fam == "constant":
        return make_constant(spec["p"])
    if fam == "bump":
        return make_bump(spec.get("m", 0.5), spec["peak"], spec["width"])
    if fam == "block":
        grid = spec.get("grid")
        if grid is None and "grid_file" in spec:
            grid = load_block_grid(spec["grid_file"])
        if grid is None:
            raise KernelError("block kernel needs 'grid' or 'grid_file'")
        return make_block(grid, spec.get("breakpoints"))
    if fam == "rank1":
        # config-driven rank-1 kernels use a power profile g(x) = a * x^b
        a = float(spec.get("a", 1.0))
        b = float(spec.get("b", 1.0))

        def power_profile(x):
            return a * np.asarray(x, dtype=np.float64) ** b

        return make_rank1(power_profile, m=spec.get("m"))
    raise KernelError(f"unsupported kernel family {fam!r} in config")
