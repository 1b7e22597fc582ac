"""The interval maps on [-tau, 0): the slow map g and the accelerated map f.

g applies A^-k C on the cylinder containing x; f additionally collapses the
whole excursion through the parabolic region (-tau, eps0) into a single
W^j step, which is what makes the invariant measure finite.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import ConsistencyError, DomainError
from .field import FieldElement, NumberField
from .group import digit_matrix, generators


def interval_bounds(field: NumberField):
    """The half-open domain [-tau, 0) of both interval maps."""
    return -field.tau, field.zero


def cylinder_right_endpoint(field: NumberField, k: int) -> FieldElement:
    """Right endpoint 1/(1 - k tau) of the slow-map cylinder with digit k."""
    if k < 1:
        raise DomainError("slow-map cylinders have positive digits")
    return (field.one - field.tau * k).inverse()


@lru_cache(maxsize=None)
def eps0(field: NumberField) -> FieldElement:
    """Left endpoint of the non-accelerated region: W^-1 . 0 = -tau^3/(1+tau^2)."""
    tau = field.tau
    value = -(tau ** 3) / (tau * tau + 1)
    w_inv_zero = generators(field).W.inverse().apply(field.zero)
    if not (value - w_inv_zero).is_zero():
        raise ConsistencyError("two expressions for eps0 disagree")
    return value


def _require_in_interval(field: NumberField, x) -> None:
    lo = -field.tau
    if not (lo <= x and x < 0):
        raise DomainError(f"point {x!r} outside [-tau, 0)")


def cylinder_of_g(field: NumberField, x) -> int:
    """Digit k >= 1 with x in the half-open cylinder of the slow map."""
    _require_in_interval(field, x)
    # x in Delta_k  iff  (1 - 1/x)/tau in [k-1, k)
    w = (1 - 1 / x) / field.tau
    k = w.floor() + 1
    if k < 1:
        raise ConsistencyError("cylinder index below 1")
    return k


def g_step(field: NumberField, x):
    """One slow-map step: returns (x', digit, matrix) with x' = -k tau + 1 - 1/x."""
    k = cylinder_of_g(field, x)
    M = digit_matrix(field, k)
    x_new = 1 - field.tau * k - 1 / x
    if not (-field.tau <= x_new and x_new < 0):
        raise ConsistencyError("slow map left the interval")
    return x_new, k, M


def j_of(field: NumberField, x) -> int:
    """Number of W-steps needed to leave the parabolic region from x.

    Defined on (-tau, eps0); equals -1 + ceil(-1/tau^2 + 1/(tau (tau + x))).
    """
    tau = field.tau
    if not (-tau < x and x < eps0(field)):
        raise DomainError("point outside the accelerated region")
    t2 = tau * tau
    expr = -t2.inverse() + 1 / (tau * (tau + x))
    j = expr.ceil() - 1
    if j < 1:
        raise ConsistencyError("acceleration exponent below 1")
    return j


def cylinder_of_f(field: NumberField, x) -> int:
    """Digit of the accelerated map: k >= 1 above eps0, -j inside the
    parabolic region.  The fixed point -tau itself is treated as a digit-1
    point (W fixes it, so acceleration would never terminate there)."""
    _require_in_interval(field, x)
    e0 = eps0(field)
    if x >= e0:
        return cylinder_of_g(field, x)
    if (x + field.tau).is_zero():
        return 1
    return -j_of(field, x)


def f_step(field: NumberField, x):
    """One accelerated step: (x', digit, matrix); W^j branch lands in [eps0, 0)."""
    k = cylinder_of_f(field, x)
    M = digit_matrix(field, k)
    if k >= 1:
        x_new = 1 - field.tau * k - 1 / x
    else:
        x_new = M.apply(x)
        if not (eps0(field) <= x_new and x_new < 0):
            raise ConsistencyError("accelerated branch missed [eps0, 0)")
    if not (-field.tau <= x_new and x_new < 0):
        raise ConsistencyError("accelerated map left the interval")
    return x_new, k, M


@dataclass(frozen=True)
class OrbitTables:
    """Exact forward orbits of -tau (slow map) and eps0 (accelerated map),
    plus the backwards orbit from 1/(1-2 tau), with their digit words."""

    field: NumberField
    phi: tuple            # phi_0 .. phi_{2n-4}
    phi_digits: tuple     # digit of the step phi_i -> phi_{i+1}, cyclic
    eps: tuple            # eps_0 .. eps_{2n-4}
    eps_digits: tuple
    alpha: tuple          # alpha_1 .. alpha_{2n-3}, backwards orbit


@lru_cache(maxsize=None)
def build_orbit_tables(field: NumberField) -> OrbitTables:
    n = field.n
    tau = field.tau

    # forward orbit of -tau under g, one full cycle of length 2n-3
    phi = [-tau]
    digits = []
    for _ in range(2 * n - 3):
        x_new, k, _ = g_step(field, phi[-1])
        phi.append(x_new)
        digits.append(k)
    if not (phi[2 * n - 3] - phi[0]).is_zero():
        raise ConsistencyError("orbit of -tau did not close up")
    phi = phi[: 2 * n - 3]

    expected = [1] * (n - 2) + [2] + [1] * (n - 3) + [2]
    if digits != expected:
        raise ConsistencyError(f"unexpected digit word {digits} for the -tau orbit")

    # ordering chain phi_0 < phi_{n-1} < phi_1 < ... < phi_{2n-4} < phi_{n-2}
    chain = []
    for i in range(n - 2):
        chain.append(phi[i])
        chain.append(phi[n - 1 + i])
    chain.append(phi[n - 2])
    for a, b in zip(chain, chain[1:]):
        if not a < b:
            raise ConsistencyError("ordering chain of the -tau orbit failed")

    # parity landmark: the orbit passes through -1
    if n % 2 == 0:
        landmark = phi[n // 2 - 1]
    else:
        m = (n - 3) // 2
        landmark = phi[3 * m + 2]
    if not (landmark + 1).is_zero():
        raise ConsistencyError("orbit landmark is not exactly -1")
    if not (phi[n - 1] - (1 - tau)).is_zero():
        raise ConsistencyError("phi_{n-1} != 1 - tau")

    # forward orbit of eps0 under f
    eps = [eps0(field)]
    eps_digits = []
    for _ in range(2 * n - 4):
        x_new, k, _ = f_step(field, eps[-1])
        eps.append(x_new)
        eps_digits.append(k)
    if eps_digits != [1] * (n - 2) + [2] + [1] * (n - 3):
        raise ConsistencyError(f"unexpected digit word {eps_digits} for the eps orbit")
    delta2_right = (field.one - 2 * tau).inverse()
    if not (eps[2 * n - 4] - delta2_right).is_zero():
        raise ConsistencyError("eps_{2n-4} != 1/(1-2 tau)")

    # backwards orbit from 1/(1-2 tau); digit pattern reversed
    alpha = [delta2_right]
    back_digits = [1] * (n - 3) + [2] + [1] * (n - 2)
    for d in back_digits:
        alpha.append(digit_matrix(field, d).inverse().apply(alpha[-1]))
    alpha = alpha[: 2 * n - 3]
    for j in range(2 * n - 3):
        if not (alpha[j] - eps[2 * n - 4 - j]).is_zero():
            raise ConsistencyError("backwards orbit disagrees with the eps orbit")

    # interleaving phi_l < eps_l < eps_{n-2+l} < phi_{n-1+l}
    if not (phi[0] < eps[0] and eps[0] < phi[n - 1]):
        raise ConsistencyError("eps0 not between phi_0 and phi_{n-1}")
    for ell in range(1, n - 2):
        ok = (
            phi[ell] < eps[ell]
            and eps[ell] < eps[n - 2 + ell]
            and eps[n - 2 + ell] < phi[n - 1 + ell]
        )
        if not ok:
            raise ConsistencyError(f"interleaving failed at l = {ell}")

    return OrbitTables(
        field=field,
        phi=tuple(phi),
        phi_digits=tuple(digits),
        eps=tuple(eps),
        eps_digits=tuple(eps_digits),
        alpha=tuple(alpha),
    )


def product_relations_check(field: NumberField) -> dict:
    """Exact pairwise products of orbit points equal to one.

    Even n pairs symmetrically around phi_{n/2-1} = -1; odd n = 2m+3 pairs
    around phi_{3m+2} = -1 together with the family phi_j phi_{n-2-j} = 1
    (the index-sum form is forced by exact computation).
    """
    n = field.n
    tables = build_orbit_tables(field)
    phi = tables.phi
    relations = []
    if n % 2 == 0:
        c = n // 2 - 1
        relations.append((f"phi_{c} = -1", (phi[c] + 1).is_zero()))
        for j in range(n // 2):
            prod = phi[c - j] * phi[c + j]
            relations.append((f"phi_{c-j} * phi_{c+j} = 1", (prod - 1).is_zero()))
    else:
        m = (n - 3) // 2
        c = 3 * m + 2
        relations.append((f"phi_{c} = -1", (phi[c] + 1).is_zero()))
        for j in range(m + 1):
            prod = phi[c - j] * phi[c + j]
            relations.append((f"phi_{c-j} * phi_{c+j} = 1", (prod - 1).is_zero()))
        for j in range(m + 1):
            prod = phi[j] * phi[n - 2 - j]
            relations.append((f"phi_{j} * phi_{n-2-j} = 1", (prod - 1).is_zero()))
    ok = all(flag for _, flag in relations)
    if not ok:
        raise ConsistencyError(
            "product relations failed: "
            + ", ".join(name for name, flag in relations if not flag)
        )
    return {"n": n, "relations": [name for name, _ in relations], "ok": ok}


def full_cylinder_check(field: NumberField, k_max: int = 10) -> dict:
    """g maps each Delta_k, k >= 2, onto the whole interval: the left endpoint
    goes to -tau and the right endpoint to 0, exactly."""
    tau = field.tau
    results = []
    for k in range(2, k_max + 1):
        left = cylinder_right_endpoint(field, k - 1)
        right = cylinder_right_endpoint(field, k)
        img_left = 1 - tau * k - 1 / left
        results.append((img_left + tau).is_zero())
        img_right = digit_matrix(field, k).apply(right)
        results.append(img_right.is_zero())
    if not all(results):
        raise ConsistencyError("full cylinder check failed")
    return {"n": field.n, "k_max": k_max, "ok": True}


def acceleration_cylinder_bounds(field: NumberField, j: int):
    """Half-open x-range of the j-th acceleration cylinder (digit -j):
    [-tau + tau/((j+1) tau^2 + 1), -tau + tau/(j tau^2 + 1))."""
    if j < 1:
        raise DomainError("acceleration index must be >= 1")
    tau = field.tau
    t2 = tau * tau
    lo = -tau + tau / (t2 * (j + 1) + 1)
    hi = -tau + tau / (t2 * j + 1)
    return lo, hi


def orbit(field: NumberField, x, steps: int, accelerated: bool = True):
    """Exact orbit with digits; stops early if the parabolic point is hit."""
    step = f_step if accelerated else g_step
    xs, ds = [x], []
    for _ in range(steps):
        cur = xs[-1]
        if accelerated and (cur + field.tau).is_zero():
            break
        x_new, k, _ = step(field, cur)
        xs.append(x_new)
        ds.append(k)
    return xs, ds
