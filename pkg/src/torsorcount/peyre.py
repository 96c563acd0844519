"""The leading constant alpha * prod_p omega_p * omega_inf and its pieces.

alpha is the exact volume of a rational polytope.  omega_p is an Euler
product.  omega_inf is the volume of

    {0 <= u <= 1, |u v w| <= 1, |u^2 v| <= 1, |u^3 v^2| <= 1, |v w^2 + u^2 v^2 w| <= 1}

in (u, v, w) = (eta6, eta7, eta8), the real density of the surface written in
torsor coordinates with eta1 = ... = eta5 = 1 and B = 1.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import integrate, optimize

from .local_factors import OMEGA_P_POLY, average_all, euler_tail, theta1_qa1a3
from .numtheory import primes_upto

# ---------------------------------------------------------------------------
# exact polytope volumes


@dataclass(frozen=True)
class HalfSpace:
    coeffs: tuple[Fraction, ...]
    rel: str  # "<=", ">=", "="
    const: Fraction

    def __post_init__(self):
        if self.rel not in ("<=", ">=", "="):
            raise ValueError(f"bad relation {self.rel!r}")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        object.__setattr__(self, "const", Fraction(self.const))

    def as_le(self) -> list[tuple[tuple[Fraction, ...], Fraction]]:
        """Rewrite as a list of a.x <= c."""
        neg = (tuple(-c for c in self.coeffs), -self.const)
        if self.rel == "<=":
            return [(self.coeffs, self.const)]
        if self.rel == ">=":
            return [neg]
        return [(self.coeffs, self.const), neg]


@dataclass(frozen=True)
class RationalPolytope:
    dim: int
    constraints: tuple[HalfSpace, ...]

    @classmethod
    def from_rows(cls, dim: int, rows: Sequence[tuple[Sequence, str, object]]) -> "RationalPolytope":
        hs = tuple(HalfSpace(tuple(c), rel, k) for c, rel, k in rows)
        if any(len(h.coeffs) != dim for h in hs):
            raise ValueError("coefficient vector has the wrong length")
        return cls(dim, hs)

    def eliminate_equalities(self) -> "RationalPolytope":
        """Solve each equality for one variable and substitute it away."""
        P = self
        while True:
            eq = next((h for h in P.constraints if h.rel == "="), None)
            if eq is None:
                return P
            P = P._eliminate(eq)

    def _eliminate(self, eq: HalfSpace) -> "RationalPolytope":
        nz = [i for i, c in enumerate(eq.coeffs) if c != 0]
        if not nz:
            if eq.const != 0:
                raise ValueError("inconsistent equality")
            return RationalPolytope(self.dim, tuple(h for h in self.constraints if h is not eq))
        # prefer a unit coefficient so the projection keeps Lebesgue measure
        j = next((i for i in nz if abs(eq.coeffs[i]) == 1), nz[-1])
        cj = eq.coeffs[j]
        out = []
        for h in self.constraints:
            if h is eq:
                continue
            f = h.coeffs[j] / cj
            coeffs = tuple(h.coeffs[i] - f * eq.coeffs[i] for i in range(self.dim) if i != j)
            out.append(HalfSpace(coeffs, h.rel, h.const - f * eq.const))
        return RationalPolytope(self.dim - 1, tuple(out))

    def le_rows(self) -> list[tuple[tuple[Fraction, ...], Fraction]]:
        rows = []
        for h in self.constraints:
            rows.extend(h.as_le())
        return rows


def _solve(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    n = len(A)
    M = [row[:] + [bi] for row, bi in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def _rank(vectors: list[list[Fraction]]) -> int:
    M = [v[:] for v in vectors]
    rank, cols = 0, len(M[0]) if M else 0
    for col in range(cols):
        piv = next((r for r in range(rank, len(M)) if M[r][col] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for r in range(len(M)):
            if r != rank and M[r][col] != 0:
                f = M[r][col] / M[rank][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[rank])]
        rank += 1
    return rank


def _det(M: list[list[Fraction]]) -> Fraction:
    M = [row[:] for row in M]
    n, det = len(M), Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        det *= M[col][col]
        for r in range(col + 1, n):
            f = M[r][col] / M[col][col]
            if f:
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return det


def _check_bounded(rows, dim: int) -> None:
    A = np.array([[float(c) for c in a] for a, _ in rows])
    b = np.array([float(c) for _, c in rows])
    for i in range(dim):
        for sign in (1.0, -1.0):
            c = np.zeros(dim)
            c[i] = -sign
            res = optimize.linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * dim, method="highs")
            if res.status == 3:
                raise ValueError("polytope is unbounded")
            if res.status == 2:
                raise ValueError("polytope is empty")


def vertices(P: RationalPolytope) -> tuple[list[tuple[Fraction, ...]], list[frozenset[int]]]:
    """Exact vertices, and for each vertex the set of tight inequality rows."""
    rows = P.le_rows()
    d = P.dim
    found: dict[tuple[Fraction, ...], set[int]] = {}
    for idx in itertools.combinations(range(len(rows)), d):
        x = _solve([list(rows[i][0]) for i in idx], [rows[i][1] for i in idx])
        if x is None:
            continue
        if all(sum(a * xi for a, xi in zip(rows[k][0], x)) <= rows[k][1] for k in range(len(rows))):
            key = tuple(x)
            found.setdefault(key, set())
    verts = sorted(found)
    tight = [
        frozenset(k for k, (a, c) in enumerate(rows) if sum(ai * xi for ai, xi in zip(a, v)) == c) for v in verts
    ]
    return verts, tight


def _affine_dim(pts: list[tuple[Fraction, ...]]) -> int:
    if not pts:
        return -1
    base = pts[0]
    return _rank([[a - b for a, b in zip(p, base)] for p in pts[1:]]) if len(pts) > 1 else 0


def _triangulate(face: frozenset[int], k: int, verts, tight, nrows: int, memo) -> list[tuple[int, ...]]:
    """Pulling triangulation of a k-face given by its vertex indices."""
    if face in memo:
        return memo[face]
    if k == 0:
        memo[face] = [tuple(face)]
        return memo[face]
    v0 = min(face)
    simplices = []
    seen = set()
    for row in range(nrows):
        sub = frozenset(i for i in face if row in tight[i])
        if v0 in sub or sub in seen or len(sub) < k:
            continue
        if _affine_dim([verts[i] for i in sub]) != k - 1:
            continue
        seen.add(sub)
        for s in _triangulate(sub, k - 1, verts, tight, nrows, memo):
            simplices.append(s + (v0,))
    memo[face] = simplices
    return simplices


def polytope_volume_exact(P: RationalPolytope) -> Fraction:
    """Lebesgue volume, exactly, by vertex enumeration and a pulling triangulation."""
    if any(h.rel == "=" for h in P.constraints):
        P = P.eliminate_equalities()
    rows = P.le_rows()
    _check_bounded(rows, P.dim)
    verts, tight = vertices(P)
    if _affine_dim(verts) < P.dim:
        return Fraction(0)
    simplices = _triangulate(frozenset(range(len(verts))), P.dim, verts, tight, len(rows), {})
    total = Fraction(0)
    for s in simplices:
        base = verts[s[-1]]
        total += abs(_det([[a - b for a, b in zip(verts[i], base)] for i in s[:-1]]))
    return total / math.factorial(P.dim)


def polytope_volume_float(P: RationalPolytope) -> float:
    """Cross-check via scipy's convex hull."""
    from scipy.spatial import ConvexHull

    if any(h.rel == "=" for h in P.constraints):
        P = P.eliminate_equalities()
    verts, _ = vertices(P)
    return float(ConvexHull(np.array([[float(c) for c in v] for v in verts])).volume)


def nef_polytope_5d() -> RationalPolytope:
    """t >= 0, 2t1+2t2+3t3+2t4 <= 1, 3t1+3t2+4t3+2t4-2t5 >= 1."""
    rows = [(tuple(int(i == j) for j in range(5)), ">=", 0) for i in range(5)]
    rows += [((2, 2, 3, 2, 0), "<=", 1), ((3, 3, 4, 2, -2), ">=", 1)]
    return RationalPolytope.from_rows(5, rows)


def nef_polytope_6d() -> RationalPolytope:
    """t >= 0, t1+t2+t3-2t5-t6 >= 0, 2t1+2t2+3t3+2t4+t6 = 1."""
    rows = [(tuple(int(i == j) for j in range(6)), ">=", 0) for i in range(6)]
    rows += [((1, 1, 1, 0, -2, -1), ">=", 0), ((2, 2, 3, 2, 0, 1), "=", 1)]
    return RationalPolytope.from_rows(6, rows)


def alpha() -> Fraction:
    return polytope_volume_exact(nef_polytope_5d())


# ---------------------------------------------------------------------------
# omega_p


@dataclass(frozen=True)
class EulerValue:
    value: float
    tail: float
    prime_limit: int


def omega_p_factor(p) -> float:
    x = 1.0 / p
    return (1 - x) ** 6 * (1 + 6 * x + x * x)


def omega_p_factor_exact(p: int) -> Fraction:
    x = Fraction(1, p)
    return (1 - x) ** 6 * (1 + 6 * x + x * x)


def omega_p_product(prime_limit: int = 10**7) -> EulerValue:
    """prod_{p <= limit} (1-1/p)^6 (1+6/p+1/p^2), with a tail bound."""
    if prime_limit < 2:
        raise ValueError("prime_limit must be >= 2")
    ps = primes_upto(prime_limit).astype(np.float64)
    value = float(np.exp(np.sum(6 * np.log1p(-1 / ps) + np.log1p(6 / ps + 1 / ps**2))))
    return EulerValue(value, value * euler_tail(OMEGA_P_POLY, prime_limit), prime_limit)


def omega_p_local_route(prime_limit: int = 10**7) -> EulerValue:
    """The same product, from averaging the first-summation local factors."""
    res = average_all(theta1_qa1a3(), prime_limit)
    return EulerValue(res.value, res.tail, prime_limit)


# ---------------------------------------------------------------------------
# omega_inf


class BudgetExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class Estimate:
    value: float
    sigma: float
    method: str
    samples: int
    seed: int | None


def _w_bound(u, v):
    """|w| bound on the slice (u, v > 0): |u v w| <= 1 and v|w||w + u^2 v| <= 1."""
    c = u * u * v
    return np.minimum(1.0 / (u * v), c / 2 + np.sqrt(c * c / 4 + 1.0 / v))


def _in_region(u, v, w):
    return (
        (u >= 0)
        & (u <= 1)
        & (np.abs(u * v * w) <= 1)
        & (np.abs(u * u * v) <= 1)
        & (np.abs(u**3 * v * v) <= 1)
        & (np.abs(v * w * w + u * u * v * v * w) <= 1)
    )


def sample_uvw(rng: np.random.Generator, n: int, stratified: bool = True):
    """Importance sample of the region; returns (u, v, w, weight), v of both signs.

    u = z^4 concentrates samples near u = 0, v = u^(-3/2) y^2 near v = 0, and
    w is uniform on the slice bound.  The weights are 1/density.
    """
    if stratified:
        z = (np.arange(n) + rng.random(n)) / n
        rng.shuffle(z)
    else:
        z = rng.random(n)
    z = np.maximum(z, 1e-300)
    u = z**4
    vmax = u**-1.5
    y = rng.random(n)
    v = vmax * y * y
    v = np.maximum(v, 1e-300)
    W = _w_bound(u, v)
    w = (2 * rng.random(n) - 1) * W
    weight = (4 * u**0.75) * (2 * np.sqrt(v * vmax)) * (2 * W) * 2.0  # last factor: v < 0 half
    sign = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    return u, sign * v, sign * w, weight


def omega_inf_mc(samples: int = 10**7, seed: int = 12345, batch: int = 10**6) -> Estimate:
    """Stratified importance sampling; sigma from the per-sample variance (conservative)."""
    if samples < 2:
        raise BudgetExhausted("need at least two samples")
    rng = np.random.default_rng(seed)
    acc = _Moments()
    left = samples
    while left > 0:
        n = min(batch, left)
        u, v, w, wt = sample_uvw(rng, n)
        acc.add(np.where(_in_region(u, v, w), wt, 0.0))
        left -= n
    mean, sigma = acc.result()
    return Estimate(mean, sigma, "eta-monte-carlo", samples, seed)


class _Moments:
    def __init__(self, k: int = 1):
        self.n = 0
        self.s = np.zeros(k)
        self.s2 = np.zeros(k)

    def add(self, *cols):
        x = np.vstack(cols)
        self.n += x.shape[1]
        self.s += x.sum(axis=1)
        self.s2 += (x * x).sum(axis=1)

    def result(self):
        mean = self.s / self.n
        var = np.maximum(self.s2 / self.n - mean * mean, 0.0) * self.n / (self.n - 1)
        sig = np.sqrt(var / self.n)
        if len(mean) == 1:
            return float(mean[0]), float(sig[0])
        return [(float(m), float(e)) for m, e in zip(mean, sig)]


def w_measure(u: float, v: float) -> float:
    """Exact length of {w : |u v w| <= 1, |v w^2 + u^2 v^2 w| <= 1} for u, v > 0."""
    L = 1.0 / (u * v)
    c = u * u * v
    s = 1.0 / v
    half = c / 2
    outer = math.sqrt(half * half + s)
    disc = half * half - s
    inner = math.sqrt(disc) if disc > 0 else 0.0
    if disc > 0:
        ivs = [(-half - outer, -half - inner), (-half + inner, -half + outer)]
    else:
        ivs = [(-half - outer, -half + outer)]
    total = 0.0
    for lo, hi in ivs:
        lo, hi = max(lo, -L), min(hi, L)
        if hi > lo:
            total += hi - lo
    return total


def omega_inf_adaptive(epsrel: float = 1e-7) -> Estimate:
    """Exact inner w-length, nested adaptive quadrature over v then u = z^4."""

    def over_v(u: float) -> float:
        vmax = u**-1.5
        # kinks: the two w-intervals merge, and the |u v w| bound starts to cut
        kinks = sorted({min(vmax, (4.0 / u**4) ** (1.0 / 3.0)), min(vmax, u**-1.0), min(vmax, u**-2.0 / 2)})
        pts = [0.0] + [k for k in kinks if 0 < k < vmax] + [vmax]
        total = 0.0
        for a, b in zip(pts, pts[1:]):
            # v = a + (b - a) s^2 absorbs the v^(-1/2) growth at v = 0
            val, _ = integrate.quad(
                lambda s: w_measure(u, a + (b - a) * s * s) * 2 * (b - a) * s, 0.0, 1.0, epsrel=epsrel, limit=200
            )
            total += val
        return total

    val, err = integrate.quad(lambda z: over_v(z**4) * 4 * z**3 if z > 0 else 0.0, 0.0, 1.0, epsrel=epsrel, limit=200)
    return Estimate(2 * val, 2 * err, "eta-adaptive", 0, None)


def omega_inf(method: str = "eta-adaptive", samples: int = 10**7, seed: int = 12345) -> Estimate:
    if method == "eta-monte-carlo":
        return omega_inf_mc(samples, seed)
    if method == "eta-adaptive":
        return omega_inf_adaptive()
    raise ValueError(f"unknown method {method!r}")


def omega_inf_xform(samples: int = 10**6, seed: int = 7) -> Estimate:
    """The same volume in x-coordinates, x1 = u, x2 = u^2 v, x0 = u v w, with 1/(x1 |x2|)."""
    rng = np.random.default_rng(seed)
    u, v, w, wt = sample_uvw(rng, samples)
    x1, x2, x0 = u, u * u * v, u * v * w
    inside = (np.abs(x0) <= 1) & (np.abs(x2) <= 1) & (x1 <= 1) & (np.abs(x2 * x2 / x1) <= 1) & (
        np.abs(x0 * x0 / x2 + x0 * x2 / x1) <= 1
    )
    # jacobian |d(x0,x1,x2)/d(u,v,w)| = u^3 |v|, so 1/(x1|x2|) dx = du dv dw
    jac = u**3 * np.abs(v)
    vals = np.where(inside, wt * jac / (x1 * np.abs(x2)), 0.0)
    return Estimate(float(np.mean(vals)), float(np.std(vals) / math.sqrt(samples)), "x-form-monte-carlo", samples, seed)


# ---------------------------------------------------------------------------
# the volumes V0 and V0'

T_BOX = (0.5, 0.5, 1 / 3, 0.5, 0.25)


def _eta_sample(rng, n: int, B: float):
    """Shared sample for V0 and V0': t in the box, (u, v, w) scaled to eta6..eta8."""
    L = math.log(B)
    t = rng.random((n, 5)) * np.array(T_BOX)
    e1, e2, e3, e4, e5 = (np.exp(L * t[:, i]) for i in range(5))
    lam6 = B / (e1**2 * e2**2 * e3**3 * e4**2)
    lam7 = B / (e1 * e2 * e3**2 * e4**2 * e5**2 * lam6**2)
    lam8 = B / (e2 * e3 * e4 * e5 * lam6 * lam7)
    u, v, w, wt = sample_uvw(rng, n, stratified=False)
    e6, e7, e8 = lam6 * u, lam7 * v, lam8 * w
    etas = (e1, e2, e3, e4, e5, e6, e7, e8)
    box = math.prod(T_BOX) * L**5
    # weight of eta-space measure / sampling density, times the integrand 1/eta1
    weight = box * e1 * e2 * e3 * e4 * e5 * lam6 * lam7 * lam8 * wt / e1
    return t, etas, weight


def _h_ok(etas, B: float):
    e1, e2, e3, e4, e5, e6, e7, e8 = etas
    return (
        (np.abs(e2 * e3 * e4 * e5 * e6 * e7 * e8) <= B)
        & (np.abs(e1**2 * e2**2 * e3**3 * e4**2 * e6) <= B)
        & (np.abs(e1 * e2 * e3**2 * e4**2 * e5**2 * e6**2 * e7) <= B)
        & (np.abs(e3 * e4**2 * e5**4 * e6**3 * e7**2) <= B)
        & (np.abs(e2 * e7 * e8**2 + e4 * e5**3 * e6**2 * e7**2 * e8) <= B * e1)
    )


def _in_P5(t):
    return (2 * t[:, 0] + 2 * t[:, 1] + 3 * t[:, 2] + 2 * t[:, 3] <= 1) & (
        3 * t[:, 0] + 3 * t[:, 1] + 4 * t[:, 2] + 2 * t[:, 3] - 2 * t[:, 4] >= 1
    )


@dataclass(frozen=True)
class VolumePair:
    B: float
    v0: float
    v0_sigma: float
    v0_prime: float
    v0_prime_sigma: float
    diff: float
    diff_sigma: float
    samples: int
    seed: int


def volumes_v0(B: float, samples: int = 10**7, seed: int = 12345, batch: int = 10**6) -> VolumePair:
    """Monte Carlo for V0 (eta6, |eta7| >= 1) and V0' (t in the polytope), common samples."""
    if B < 3:
        raise ValueError("B must be >= 3")
    if samples < 2:
        raise BudgetExhausted("need at least two samples")
    rng = np.random.default_rng(seed)
    acc = _Moments(3)
    left = samples
    while left > 0:
        n = min(batch, left)
        t, etas, wt = _eta_sample(rng, n, B)
        h = _h_ok(etas, B) & (etas[5] >= 0)
        x0 = np.where(h & (etas[5] >= 1) & (np.abs(etas[6]) >= 1), wt, 0.0)
        x1 = np.where(h & _in_P5(t), wt, 0.0)
        acc.add(x0, x1, x0 - x1)
        left -= n
    (m0, s0), (m1, s1), (md, sd) = acc.result()
    return VolumePair(B, m0, s0, m1, s1, md, sd, samples, seed)


def volume_V0_prime(B: float, samples: int = 10**7, seed: int = 12345) -> tuple[float, float]:
    res = volumes_v0(B, samples, seed)
    return res.v0_prime, res.v0_prime_sigma


# ---------------------------------------------------------------------------
# report and main term


@dataclass(frozen=True)
class ConstantReport:
    alpha: Fraction
    omega_p: EulerValue
    omega_inf: Estimate

    @property
    def leading_constant(self) -> float:
        return float(self.alpha) * self.omega_p.value * self.omega_inf.value

    def to_json(self) -> str:
        return json.dumps(
            {
                "alpha": f"{self.alpha.numerator}/{self.alpha.denominator}",
                "omega_p": asdict(self.omega_p),
                "omega_inf": asdict(self.omega_inf),
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "ConstantReport":
        d = json.loads(text)
        return cls(Fraction(d["alpha"]), EulerValue(**d["omega_p"]), Estimate(**d["omega_inf"]))


_CACHE: dict[str, ConstantReport] = {}


def compute_constants(
    prime_limit: int = 10**7, method: str = "eta-adaptive", samples: int = 10**7, seed: int = 12345
) -> ConstantReport:
    rep = ConstantReport(alpha(), omega_p_product(prime_limit), omega_inf(method, samples, seed))
    _CACHE["default"] = rep
    return rep


def set_constants(rep: ConstantReport) -> None:
    _CACHE["default"] = rep


def predicted_main_term(B: float, constants: ConstantReport | None = None) -> float:
    """alpha * prod omega_p * omega_inf * B (log B)^5."""
    if B < 3:
        raise ValueError("B must be >= 3")
    rep = constants or _CACHE.get("default")
    if rep is None:
        raise RuntimeError("constants not computed; call compute_constants() first")
    return rep.leading_constant * B * math.log(B) ** 5
