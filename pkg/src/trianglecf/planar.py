"""Planar natural-extension domains and the invariant measure dx dy/(1+xy)^2.

The slow system acts on Omega (infinite measure: one corner sits on the
hyperbola 1 + xy = 0); the accelerated system acts on the finite-measure
region Gamma.  All corners are exact field elements, so the bijectivity of
both maps is checked by exact corner-tiling, not numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import ConsistencyError, DomainError
from .field import FieldElement, NumberField
from .dynamics import (
    acceleration_cylinder_bounds,
    build_orbit_tables,
    cylinder_of_f,
    cylinder_of_g,
    cylinder_right_endpoint,
    eps0,
)
from .group import digit_matrix, y_matrix


# ---------------------------------------------------------------------------
# heights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Heights:
    """Rectangle heights above the orbit of -tau: L_1 < ... < L_{2n-4} < R."""

    field: NumberField
    L: tuple  # L[i] is the (i+1)-th height
    R: FieldElement

    def level(self, i: int) -> FieldElement:
        """1-indexed access matching the L_i naming."""
        return self.L[i - 1]


@lru_cache(maxsize=None)
def build_heights(field: NumberField) -> Heights:
    n = field.n
    tau = field.tau
    N1 = y_matrix(field, 1)
    odd = [tau.inverse()]                  # L_1 = 1/tau
    for _ in range(n - 3):                 # L_3, ..., L_{2n-5}
        odd.append(N1.apply(odd[-1]))
    even = [(tau - 1).inverse()]           # L_2 = 1/(tau-1)
    for _ in range(n - 3):                 # L_4, ..., L_{2n-4}
        even.append(N1.apply(even[-1]))
    L = []
    for a, b in zip(odd, even):
        L.extend((a, b))
    heights = Heights(field=field, L=tuple(L), R=tau)

    # consistency: strict monotonicity and the closed product identity
    chain = list(heights.L) + [heights.R]
    for a, b in zip(chain, chain[1:]):
        if not a < b:
            raise ConsistencyError("heights are not strictly increasing")
    prod = heights.R
    for h in heights.L:
        prod = prod * h
    if not (prod - 1).is_zero():
        raise ConsistencyError("height product R * prod(L_j) != 1")
    # N_1^{n-2} . (1/tau) = tau and the wrap-around N_2 . L_{2n-4} = L_1
    acc = tau.inverse()
    for _ in range(n - 2):
        acc = N1.apply(acc)
    if not (acc - tau).is_zero():
        raise ConsistencyError("N_1^{n-2}(1/tau) != tau")
    if not (heights.L[-1] - (tau - 1)).is_zero():
        raise ConsistencyError("L_{2n-4} != tau - 1")
    N2 = y_matrix(field, 2)
    if not (N2.apply(heights.L[-1]) - heights.L[0]).is_zero():
        raise ConsistencyError("N_2 L_{2n-4} != L_1")
    # every slab height is the reciprocal of |left endpoint| of its slab
    tables = build_orbit_tables(field)
    starts = _omega_slab_starts(tables)
    for h, start in zip(chain, starts):
        if not (h * (-start) - 1).is_zero():
            raise ConsistencyError("slab corner is not on the curve y = -1/x")
    return heights


def _omega_slab_starts(tables) -> list:
    """x-order left endpoints of the Omega slabs: phi_0, phi_{n-1}, phi_1, ..."""
    n = tables.field.n
    phi = tables.phi
    starts = []
    for i in range(n - 2):
        starts.append(phi[i])
        starts.append(phi[n - 1 + i])
    starts.append(phi[n - 2])
    return starts


# ---------------------------------------------------------------------------
# regions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Slab:
    """Vertical strip [x_lo, x_hi) carrying closed fiber intervals in y."""

    x_lo: FieldElement
    x_hi: FieldElement
    fibers: tuple  # ((y_lo, y_hi), ...) in increasing order


@dataclass(frozen=True)
class Rect:
    """[x_lo, x_hi) x [y_lo, y_hi] with exact field-element corners."""

    x_lo: FieldElement
    x_hi: FieldElement
    y_lo: FieldElement
    y_hi: FieldElement


class PlanarRegion:
    """Finite union of slabs; membership is decided by exact sign tests."""

    def __init__(self, name: str, slabs):
        self.name = name
        self.slabs = list(slabs)

    def rects(self):
        out = []
        for s in self.slabs:
            for (lo, hi) in s.fibers:
                out.append(Rect(s.x_lo, s.x_hi, lo, hi))
        return out

    def contains(self, x, y) -> bool:
        for s in self.slabs:
            if s.x_lo <= x and x < s.x_hi:
                return any(lo <= y and y <= hi for lo, hi in s.fibers)
        return False

    def fiber_at(self, x):
        for s in self.slabs:
            if s.x_lo <= x and x < s.x_hi:
                return s.fibers
        return ()

    def to_json(self, shadow_bits: int = 53):
        rect_list = []
        for r in self.rects():
            rect_list.append(
                {
                    "x_lo": r.x_lo.to_json(),
                    "x_hi": r.x_hi.to_json(),
                    "y_lo": r.y_lo.to_json(),
                    "y_hi": r.y_hi.to_json(),
                    "shadow": {
                        "x_lo": float(r.x_lo),
                        "x_hi": float(r.x_hi),
                        "y_lo": float(r.y_lo),
                        "y_hi": float(r.y_hi),
                    },
                }
            )
        return {"name": self.name, "rect_count": len(rect_list), "rects": rect_list}


@lru_cache(maxsize=None)
def build_omega(field: NumberField) -> PlanarRegion:
    """Union of rectangles over the -tau orbit; heights L_1..L_{2n-4} then R."""
    tables = build_orbit_tables(field)
    heights = build_heights(field)
    starts = _omega_slab_starts(tables)
    tops = list(heights.L) + [heights.R]
    bounds = starts + [field.zero]
    slabs = []
    for i, top in enumerate(tops):
        slabs.append(Slab(bounds[i], bounds[i + 1], ((field.zero, top),)))
    return PlanarRegion("omega", slabs)


def acceleration_fiber_top(field: NumberField) -> FieldElement:
    """Fiber height tau/(tau^2+1) over the accelerated strip [-tau, eps0)."""
    tau = field.tau
    return tau / (tau * tau + 1)


@lru_cache(maxsize=None)
def build_gamma(field: NumberField) -> PlanarRegion:
    """Finite-measure natural-extension domain of the accelerated map."""
    n = field.n
    tau = field.tau
    zero = field.zero
    tables = build_orbit_tables(field)
    heights = build_heights(field)
    eps = tables.eps
    c = acceleration_fiber_top(field)
    L = heights.level
    slabs = [
        Slab(-tau, eps[0], ((zero, c),)),
        Slab(eps[0], eps[1], ((zero, L(1)),)),
    ]
    for j in range(1, n - 2):
        lower_top = L(2 * j - 1)
        if j <= n - 3:
            slabs.append(
                Slab(
                    eps[j],
                    eps[n - 2 + j],
                    ((zero, lower_top), (L(2 * j), L(2 * j + 1))),
                )
            )
            slabs.append(Slab(eps[n - 2 + j], eps[j + 1], ((zero, L(2 * j + 1)),)))
    slabs.append(
        Slab(
            eps[n - 2],
            eps[2 * n - 4],
            ((zero, L(2 * n - 5)), (L(2 * n - 4), tau)),
        )
    )
    slabs.append(Slab(eps[2 * n - 4], zero, ((zero, tau),)))

    region = PlanarRegion("gamma", slabs)
    _check_gamma_in_omega(field, region)
    return region


def _check_gamma_in_omega(field: NumberField, gamma: PlanarRegion) -> None:
    omega = build_omega(field)
    cuts = sorted(
        {s.x_lo for s in omega.slabs} | {s.x_lo for s in gamma.slabs},
        key=float,
    )
    for g_slab in gamma.slabs:
        inner = [x for x in cuts if g_slab.x_lo < x and x < g_slab.x_hi]
        points = [g_slab.x_lo] + inner
        for x in points:
            omega_fibers = omega.fiber_at(x)
            if not omega_fibers:
                raise ConsistencyError("Gamma extends outside Omega in x")
            top = omega_fibers[-1][1]
            for (lo, hi) in g_slab.fibers:
                if not (field.zero <= lo and lo <= hi and hi <= top):
                    raise ConsistencyError("Gamma fiber exceeds Omega height")
    # the singular corner of Omega is excluded from Gamma
    tables = build_orbit_tables(field)
    heights = build_heights(field)
    if gamma.contains(tables.phi[0], heights.level(1)):
        raise ConsistencyError("Gamma contains the hyperbola corner point")


def gamma_hyperbola_gap(field: NumberField) -> FieldElement:
    """Exact infimum of 1 + xy over Gamma (attained at a rectangle corner)."""
    best = None
    for r in build_gamma(field).rects():
        v = 1 + r.x_lo * r.y_hi
        if best is None or v < best:
            best = v
    if best.sign() <= 0:
        raise ConsistencyError("Gamma touches the hyperbola")
    return best


# ---------------------------------------------------------------------------
# measure
# ---------------------------------------------------------------------------

def _log_big_fraction(q: Fraction) -> float:
    if q <= 0:
        raise DomainError("logarithm of a non-positive rational")

    def lg(m: int) -> float:
        b = m.bit_length()
        if b <= 512:
            return math.log(m)
        k = b - 53
        return math.log(m >> k) + k * math.log(2)

    return lg(q.numerator) - lg(q.denominator)


def mu_rect(rect: Rect) -> float:
    """Closed-form measure log[(1+x1y1)(1+x2y2) / ((1+x1y2)(1+x2y1))].

    Raises DomainError when the rectangle touches or crosses 1 + xy = 0.
    """
    x1, x2, y1, y2 = rect.x_lo, rect.x_hi, rect.y_lo, rect.y_hi
    corners = [1 + x1 * y1, 1 + x2 * y2, 1 + x1 * y2, 1 + x2 * y1]
    if isinstance(corners[0], FieldElement):
        signs = [c.sign() for c in corners]
    else:
        signs = [1 if c > 0 else (-1 if c < 0 else 0) for c in corners]
    if any(s <= 0 for s in signs):
        raise DomainError("rectangle meets the hyperbola 1 + xy = 0")
    ratio = (corners[0] * corners[1]) / (corners[2] * corners[3])
    if isinstance(ratio, FieldElement):
        if ratio.is_rational():
            return _log_big_fraction(ratio.as_fraction())
        return _log_big_fraction(ratio.embed(80).mid())
    return _log_big_fraction(Fraction(ratio))


def mu_region(region: PlanarRegion) -> float:
    return math.fsum(mu_rect(r) for r in region.rects())


@lru_cache(maxsize=None)
def mu_gamma(field: NumberField) -> float:
    return mu_region(build_gamma(field))


def omega_divergence_partial_sums(field: NumberField, bound: float = 1.0e3):
    """Partial measures of dyadic column strips approaching the hyperbola
    corner (phi_0, L_1): each halving contributes exactly log 2, so the
    partial sums exceed any bound."""
    tables = build_orbit_tables(field)
    heights = build_heights(field)
    phi0 = tables.phi[0]
    top = heights.level(1)
    width = tables.phi[field.n - 1] - phi0
    total = 0.0
    sums = []
    i = 0
    while total <= bound:
        a = phi0 + width * Fraction(1, 2 ** (i + 1))
        b = phi0 + width * Fraction(1, 2 ** i)
        total += mu_rect(Rect(a, b, field.zero, top))
        sums.append(total)
        i += 1
        if i > 100000:
            raise ConsistencyError("divergence check did not reach the bound")
    return sums


# ---------------------------------------------------------------------------
# the planar maps
# ---------------------------------------------------------------------------

def S_step(field: NumberField, point, validate: bool = True):
    """Slow planar map on Omega: (x, y) -> (M_k x, N_k y) by the g-digit of x."""
    x, y = point
    if validate and not build_omega(field).contains(x, y):
        raise DomainError("point outside Omega")
    k = cylinder_of_g(field, x)
    return digit_matrix(field, k).apply(x), y_matrix(field, k).apply(y)


def T_step(field: NumberField, point, validate: bool = True):
    """Accelerated planar map on Gamma, including the W^j branches."""
    x, y = point
    if validate and not build_gamma(field).contains(x, y):
        raise DomainError("point outside Gamma")
    k = cylinder_of_f(field, x)
    return digit_matrix(field, k).apply(x), y_matrix(field, k).apply(y)


def T_digit_of_y(field: NumberField, y) -> int:
    """Digit of the T-step that produced the second coordinate y.

    The image bands in y are disjoint across digits, so y alone decodes the
    predecessor branch; band boundaries follow the half-open convention.
    """
    tau = field.tau
    c1 = (2 * tau - 1).inverse()          # N_2 . 0
    c = acceleration_fiber_top(field)     # top of acceleration stack base
    heights = build_heights(field)
    L1, L2 = heights.level(1), heights.level(2)
    if y < c1:
        if y.sign() <= 0:
            raise DomainError("y outside the image bands")
        k = ((1 + 1 / y) / tau).ceil()
        if k < 3:
            k = 3
        return k
    if y < c:
        return 2
    if y < L1:
        ratio = y / (tau - tau * tau * y)
        j = ratio.floor()
        if j < 1:
            j = 1
        return -j
    if y < L2:
        return 2
    if y <= tau:
        return 1
    raise DomainError("y above every image band")


def T_inverse(field: NumberField, point, validate: bool = True):
    x, y = point
    if validate and not build_gamma(field).contains(x, y):
        raise DomainError("point outside Gamma")
    k = T_digit_of_y(field, y)
    pre = (
        digit_matrix(field, k).inverse().apply(x),
        y_matrix(field, k).inverse().apply(y),
    )
    if validate and not build_gamma(field).contains(pre[0], pre[1]):
        raise DomainError("decoded preimage not in Gamma")
    return pre


# ---------------------------------------------------------------------------
# exact bijectivity verification
# ---------------------------------------------------------------------------

def _eq(a, b) -> bool:
    return (a - b).is_zero()


def _map_piece(field, digit, x_lo, x_hi, y_lo, y_hi):
    """Image of one piece under (M_k, N_k); both coordinates map increasingly."""
    M = digit_matrix(field, digit)
    N = y_matrix(field, digit)
    nx_lo, nx_hi = M.apply(x_lo), M.apply(x_hi)
    ny_lo, ny_hi = N.apply(y_lo), N.apply(y_hi)
    from .group import INFINITY

    if nx_hi is INFINITY or nx_lo is INFINITY:
        raise ConsistencyError("piece crosses a pole of its branch")
    if not nx_lo < nx_hi:
        raise ConsistencyError("x-orientation flipped; piece crosses a pole")
    if not ny_lo < ny_hi:
        raise ConsistencyError("y-orientation flipped; piece crosses a pole")
    return (nx_lo, nx_hi, ny_lo, ny_hi)


def _cylinder_pieces(field, region: PlanarRegion, accelerated: bool,
                     k_fin: int, j_fin: int):
    """Overlay of region slabs with branch cylinders; finite pieces only."""
    tau = field.tau
    e0 = eps0(field)
    cylinders = []
    if accelerated:
        for j in range(j_fin, 0, -1):
            lo, hi = acceleration_cylinder_bounds(field, j)
            cylinders.append((-j, lo, hi))
        cylinders.append((1, e0, cylinder_right_endpoint(field, 1)))
    else:
        cylinders.append((1, -tau, cylinder_right_endpoint(field, 1)))
    for k in range(2, k_fin + 1):
        cylinders.append(
            (k, cylinder_right_endpoint(field, k - 1), cylinder_right_endpoint(field, k))
        )
    pieces = []
    for digit, c_lo, c_hi in cylinders:
        for slab in region.slabs:
            lo = slab.x_lo if c_lo < slab.x_lo else c_lo
            hi = slab.x_hi if slab.x_hi < c_hi else c_hi
            if not lo < hi:
                continue
            for (y_lo, y_hi) in slab.fibers:
                pieces.append((digit, lo, hi, y_lo, y_hi))
    return pieces


def _check_band_tiling(region: PlanarRegion, bands_by_slab) -> None:
    """Each slab's image bands must exactly cover its fiber union."""
    for slab in region.slabs:
        key = id(slab)
        bands = sorted(bands_by_slab.get(key, []), key=lambda b: (float(b[0]), float(b[1])))
        if not bands:
            raise ConsistencyError("slab received no image bands")
        fibers = slab.fibers
        fb = 0
        cursor = fibers[0][0]
        if not _eq(cursor, bands[0][0]):
            raise ConsistencyError("lowest band does not start at the fiber bottom")
        for lo, hi in bands:
            if _eq(lo, cursor):
                cursor = hi
                continue
            # the only legal jump is across a designated fiber gap
            if fb + 1 < len(fibers) and _eq(cursor, fibers[fb][1]) and _eq(lo, fibers[fb + 1][0]):
                fb += 1
                cursor = hi
                continue
            raise ConsistencyError("gap or overlap between image bands")
        if not (_eq(cursor, fibers[fb][1]) and fb == len(fibers) - 1):
            raise ConsistencyError("image bands do not reach the fiber top")


def _distribute_bands(region: PlanarRegion, images) -> dict:
    """Split image x-ranges at slab boundaries and bucket the y-bands."""
    bands_by_slab = {}
    for (x_lo, x_hi, y_lo, y_hi) in images:
        matched_any = False
        for slab in region.slabs:
            lo = slab.x_lo if x_lo < slab.x_lo else x_lo
            hi = slab.x_hi if slab.x_hi < x_hi else x_hi
            if not lo < hi:
                continue
            matched_any = True
            bands_by_slab.setdefault(id(slab), []).append((y_lo, y_hi))
        if not matched_any:
            raise ConsistencyError("image piece fell outside the region")
    return bands_by_slab


def verify_bijectivity(field: NumberField, k_fin: int = 6, j_fin: int = 6) -> dict:
    """Exact corner-tiling proof that S permutes Omega and T permutes Gamma
    up to measure zero.  The two infinite branch families are truncated and
    their tails checked against closed-form stack limits."""
    tau = field.tau
    report = {"n": field.n}

    for name, region, accelerated in (
        ("omega", build_omega(field), False),
        ("gamma", build_gamma(field), True),
    ):
        pieces = _cylinder_pieces(field, region, accelerated, k_fin, j_fin)
        images = []
        mu_dev = 0.0
        for (digit, x_lo, x_hi, y_lo, y_hi) in pieces:
            img = _map_piece(field, digit, x_lo, x_hi, y_lo, y_hi)
            images.append(img)
            try:
                src_mu = mu_rect(Rect(x_lo, x_hi, y_lo, y_hi))
                img_mu = mu_rect(Rect(*img))
            except DomainError:
                # Omega's corner piece sits on the hyperbola: infinite mass,
                # so only the tiling is checked for it
                continue
            mu_dev = max(mu_dev, abs(src_mu - img_mu))

        # tail of the full cylinders k > k_fin: images stack onto
        # [-tau, 0) x (0, 1/(k_fin tau - 1)]
        k_tail_top = (tau * k_fin - 1).inverse()
        images.append((-tau, field.zero, field.zero, k_tail_top))
        if accelerated:
            # acceleration tail j > j_fin stacks onto
            # [eps0, 0) x ((j_fin+1) tau/((j_fin+1) tau^2 + 1), L_1]
            j1 = j_fin + 1
            lo_band = (tau * j1) / (tau * tau * j1 + 1)
            L1 = build_heights(field).level(1)
            images.append((eps0(field), field.zero, lo_band, L1))

        bands = _distribute_bands(region, images)
        _check_band_tiling(region, bands)
        report[name] = {
            "pieces": len(pieces),
            "max_piece_measure_deviation": mu_dev,
            "ok": True,
        }

    # wrap-around identity used by the stacking argument
    heights = build_heights(field)
    N2 = y_matrix(field, 2)
    if not _eq(N2.apply(heights.L[-1]), heights.level(1)):
        raise ConsistencyError("wrap-around band identity failed")
    report["ok"] = True
    return report


# ---------------------------------------------------------------------------
# the marginal measure on the interval
# ---------------------------------------------------------------------------

def nu_band_mass(field: NumberField, a, b) -> float:
    """Unnormalized mu-mass of Gamma over the x-interval [a, b)."""
    a = field.coerce(a) if not isinstance(a, FieldElement) else a
    b = field.coerce(b) if not isinstance(b, FieldElement) else b
    if not a <= b:
        raise DomainError("empty band")
    total = 0.0
    for slab in build_gamma(field).slabs:
        lo = slab.x_lo if a < slab.x_lo else a
        hi = slab.x_hi if slab.x_hi < b else b
        if not lo < hi:
            continue
        for (y_lo, y_hi) in slab.fibers:
            total += mu_rect(Rect(lo, hi, y_lo, y_hi))
    return total


def nu_cdf(field: NumberField, a, b) -> float:
    """nu([a, b)) for the normalized marginal of mu on Gamma."""
    return nu_band_mass(field, a, b) / mu_gamma(field)


def nu_density(field: NumberField, x) -> float:
    """Normalized marginal density: fiber integral of (1+xy)^-2 over Gamma."""
    if not isinstance(x, FieldElement):
        x = field.coerce(Fraction(x)) if isinstance(x, (int, Fraction)) else None
        if x is None:
            raise DomainError("density wants an exact abscissa")
    fibers = build_gamma(field).fiber_at(x)
    if not fibers:
        raise DomainError("abscissa outside the interval")
    total = field.zero
    for (y1, y2) in fibers:
        total = total + (y2 - y1) / ((1 + x * y1) * (1 + x * y2))
    return float(total) / mu_gamma(field)


@lru_cache(maxsize=None)
def _float_slabs(field: NumberField):
    out = []
    for slab in build_gamma(field).slabs:
        out.append(
            (
                float(slab.x_lo),
                float(slab.x_hi),
                tuple((float(a), float(b)) for a, b in slab.fibers),
            )
        )
    return out


def nu_density_float(field: NumberField, x: float) -> float:
    """Float shadow of the marginal density, for quadrature sanity checks."""
    for lo, hi, fibers in _float_slabs(field):
        if lo <= x < hi:
            total = 0.0
            for (y1, y2) in fibers:
                total += (y2 - y1) / ((1 + x * y1) * (1 + x * y2))
            return total / mu_gamma(field)
    raise DomainError("abscissa outside the interval")


def _nu_interval_via_branches(field: NumberField, a, b, k_fin: int = 8, j_fin: int = 8) -> float:
    """Unnormalized mass of f^-1([a, b)) summed over all branches;
    both infinite families are finished in closed form (no truncation error)."""
    tau = field.tau
    e0 = eps0(field)
    tables = build_orbit_tables(field)
    eps1 = tables.eps[1]
    total = 0.0

    # digit-1 branch maps [eps0, 1/(1-tau)) onto [eps1, 0)
    a1 = a if eps1 < a else eps1
    if a1 < b:
        M1_inv = digit_matrix(field, 1).inverse()
        total += nu_band_mass(field, M1_inv.apply(a1), M1_inv.apply(b))

    # full positive digits
    for k in range(2, k_fin + 1):
        Mk_inv = digit_matrix(field, k).inverse()
        total += nu_band_mass(field, Mk_inv.apply(a), Mk_inv.apply(b))

    # tail k > k_fin: preimages lie in the constant-fiber strip [0, tau];
    # the band masses telescope to log[(1 - k_fin tau - b)/(1 - k_fin tau - a)]
    ratio = (1 - tau * k_fin - b) / (1 - tau * k_fin - a)
    total += _log_ratio(ratio)

    # acceleration branches: the W^j branch maps its cylinder onto [eps0, 0)
    aj = a if e0 < a else e0
    if aj < b:
        c = acceleration_fiber_top(field)
        u_a, u_b = aj + tau, b + tau
        for j in range(1, j_fin + 1):
            Wj_inv = digit_matrix(field, -j).inverse()
            x1, x2 = Wj_inv.apply(aj), Wj_inv.apply(b)
            num = 1 + c * x2
            den = 1 + c * x1
            total += _log_ratio(num / den)
        # tail j > j_fin telescopes to
        # log[(u_b/u_a) * (1 + (j_fin+1) tau u_a)/(1 + (j_fin+1) tau u_b)]
        j1 = j_fin + 1
        ratio = (u_b / u_a) * ((1 + tau * u_a * j1) / (1 + tau * u_b * j1))
        total += _log_ratio(ratio)
    return total


def _log_ratio(ratio) -> float:
    if isinstance(ratio, FieldElement):
        if ratio.sign() <= 0:
            raise DomainError("non-positive ratio in log")
        if ratio.is_rational():
            return _log_big_fraction(ratio.as_fraction())
        return _log_big_fraction(ratio.embed(80).mid())
    return _log_big_fraction(Fraction(ratio))


def nu_invariance_check(field: NumberField, parts: int = 200) -> dict:
    """Max |nu(f^-1 J) - nu(J)| over an equal-width partition of [-tau, 0)."""
    tau = field.tau
    mg = mu_gamma(field)
    worst = 0.0
    for i in range(parts):
        a = -tau * Fraction(parts - i, parts)
        b = -tau * Fraction(parts - i - 1, parts)
        direct = nu_band_mass(field, a, b)
        pulled = _nu_interval_via_branches(field, a, b)
        worst = max(worst, abs(direct - pulled) / mg)
    return {"n": field.n, "parts": parts, "max_deviation": worst}
