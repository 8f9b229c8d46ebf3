"""Closed-form predictions for the chromatic and quasi-clique numbers.

Natural logarithms throughout.
"""
from dataclasses import dataclass, field
import math


class DomainError(ValueError):
    pass


class DegenerateProduct(ValueError):
    pass


class HypothesisViolation(ValueError):
    pass


REFINEMENT_EPS = 1e-6
DIVERGENCE_THRESHOLD = 1e-6


@dataclass
class PredictionWindow:
    kind: str
    members: tuple = ()
    interval: tuple = ()
    refined: tuple = ()
    center: float = math.nan
    params: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.members and min(self.members) <= 0:
            raise ValueError("window members must be positive")
        for lo_hi in (self.interval, self.refined):
            if lo_hi and lo_hi[0] > lo_hi[1]:
                raise ValueError("interval lower bound exceeds upper bound")

    def contains(self, value, which="coarse"):
        if self.members:
            return value in self.members
        lo, hi = self.refined if which == "refined" else self.interval
        return lo <= value <= hi

    def bracket_inside(self, lo, hi, which="coarse"):
        """Every integer in [lo, hi] lies in the window."""
        return all(self.contains(v, which) for v in range(lo, hi + 1))

    def bracket_outside(self, lo, hi, which="coarse"):
        """No integer in [lo, hi] lies in the window."""
        return not any(self.contains(v, which) for v in range(lo, hi + 1))

    def bounds(self, which="coarse"):
        if self.members:
            return float(min(self.members)), float(max(self.members))
        lo, hi = self.refined if which == "refined" else self.interval
        return float(lo), float(hi)

    def record(self):
        out = {"kind": self.kind, "params": dict(self.params), "flags": dict(self.flags)}
        if self.members:
            out["members"] = list(self.members)
        if self.interval:
            out["interval"] = list(self.interval)
            out["refined"] = list(self.refined)
            out["center"] = self.center
        return out


def kl_divergence_bernoulli(gamma, p):
    """D(gamma, p) between Ber(gamma) and Ber(p), with 0 log 0 = 0."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"p={p} must lie strictly inside (0, 1)")
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"gamma={gamma} must lie in [0, 1]")
    if gamma == 1.0:
        return math.log(1.0 / p)
    if gamma == 0.0:
        return math.log(1.0 / (1.0 - p))
    return gamma * math.log(gamma / p) + (1.0 - gamma) * math.log((1.0 - gamma) / (1.0 - p))


def _g(l):
    """2 (l-1) log(l-1), with the l = 1 value taken as 0."""
    if l - 1 == 0:
        return 0.0
    return 2 * (l - 1) * math.log(l - 1)


def ell_from_product(x):
    """max{l : 2 (l-1) log(l-1) <= x}; l = 2 is always feasible."""
    if not x > 0:
        raise DegenerateProduct(f"p_max (n-1) = {x} must be positive")
    l = 2
    while _g(l + 1) <= x:
        l += 1
    return l


def predict_chromatic_sparse_ell(p_max, n, epsilon=REFINEMENT_EPS, scaling=None):
    x = p_max * (n - 1)
    ell = ell_from_product(x)
    narrow = (2 * ell - 1) * math.log(ell) + epsilon < x < 2 * ell * math.log(ell)
    members = (ell, ell + 1) if narrow else (ell, ell + 1, ell + 2)
    flags = {"narrowed": narrow}
    if scaling is not None:
        flags.update(sparse_regime(scaling))
    win = PredictionWindow("chromatic_sparse", members=members,
                           params={"n": n, "p_max": p_max, "product": x, "epsilon": epsilon},
                           flags=flags)
    return ell, win


def sparse_regime(scaling):
    """Regime flags for lambda_n: power laws n^a need 3/4 < a < 1."""
    if scaling.rule == "power":
        delta = scaling.alpha - 0.75
        return {"delta": delta, "in_regime": 0.0 < delta <= 0.25 and scaling.alpha < 1.0}
    if scaling.rule == "linear":
        return {"delta": 0.25, "in_regime": False, "note": "lambda_n = C n is the dense-d regime"}
    return {"delta": None, "in_regime": False, "note": "constant lambda_n is not sparse"}


def d_from_peak(k_mm):
    if not k_mm > 0:
        raise DomainError("k(m,m) must be positive")
    c = 2
    while not k_mm < 2 * c * math.log(c):
        c += 1
    return c


def predict_chromatic_dense_d(k_mm):
    """d = min{c : k(m,m) < 2 c log c}; window {d, d+1} or {d}.

    The narrowing condition is read as k(m,m) in ((2d-1) log d, 2d log d);
    the printed statement leaves its variable unbound, which is flagged.
    """
    d = d_from_peak(k_mm)
    narrow = (2 * d - 1) * math.log(d) < k_mm < 2 * d * math.log(d)
    members = (d,) if narrow else (d, d + 1)
    win = PredictionWindow("chromatic_lambda_n", members=members,
                           params={"k_mm": k_mm},
                           flags={"narrowed": narrow, "narrowing_condition_ambiguous": True})
    return d, win


def quasi_clique_center(n, gamma, p_max):
    return 2.0 * math.log(n) / kl_divergence_bernoulli(gamma, p_max)


def refined_center(n, gamma, p_max):
    D = kl_divergence_bernoulli(gamma, p_max)
    return (2.0 / D) * (math.log(n) - math.log(math.log(n)) + math.log(math.e * D / 2.0))


def predict_quasi_clique(n, gamma, p_max, epsilon, refined_epsilon=None):
    """Coarse window (1 +- eps) omega_n and refined window [B - eps', B + 1 + eps']."""
    if not p_max < gamma <= 1.0:
        raise HypothesisViolation(f"need p_max < gamma <= 1, got p_max={p_max}, gamma={gamma}")
    if n < 3:
        raise ValueError("n must be >= 3 so that log log n is defined")
    if refined_epsilon is None:
        refined_epsilon = epsilon
    D = kl_divergence_bernoulli(gamma, p_max)
    omega = 2.0 * math.log(n) / D
    B = (2.0 / D) * (math.log(n) - math.log(math.log(n)) + math.log(math.e * D / 2.0))
    return PredictionWindow(
        "quasi_clique",
        interval=((1 - epsilon) * omega, (1 + epsilon) * omega),
        refined=(B - refined_epsilon, B + 1 + refined_epsilon),
        center=omega,
        params={"n": n, "gamma": gamma, "p_max": p_max, "epsilon": epsilon,
                "refined_epsilon": refined_epsilon, "D": D, "refined_center": B},
        flags={"diverging": D < DIVERGENCE_THRESHOLD, "gamma_one": gamma == 1.0},
    )


def slowly_varying_ratio(n, r):
    """omega_{n r(n)} / omega_n = log(n r(n)) / log(n) (independent of gamma, p)."""
    rn = r(n) if callable(r) else float(r)
    return math.log(n * rn) / math.log(n)
