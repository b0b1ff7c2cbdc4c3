"""Evaluation of multiple polylogarithms at and beyond absolute convergence.

The nested series  sum_{n_1 > ... > n_r > 0}  prod_i z_i^{n_i} n_i^{-s_i}
is handled four ways:

* ``brute_partial_sum``  -- exact truncated sums t_N and tails t_{M,N}
  (general complex weights |z_i| <= 1, complex exponents);
* ``eval_convergent``    -- limit inside the conditional-convergence domain
  U_r(z), by geometric cutoff doubling with period averaging and adaptive
  extrapolation across the doubling ladder;
* ``eval_integer_point`` -- regularised evaluation at integer points of
  V_r(z) through the asymptotic-expansion driver;
* ``verify_translation`` -- numerical check of the translation identities
  that tie a tail at shifted arguments to a Pochhammer-weighted series of
  tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath as mp

from .asymptotics import DepthSpec, depth_expansion, fmt_real
from .errors import DomainError, NonConvergenceError, TruncationError
from .rootsofunity import RotationNumber, ZVector, _coords, contains

__all__ = [
    "PartialSumSpec",
    "EvalReport",
    "TranslationReport",
    "pochhammer",
    "brute_partial_sum",
    "partial_sums",
    "eval_convergent",
    "eval_integer_point",
    "stieltjes_constant",
    "verify_translation",
]

DEFAULT_EVAL_TOL = "1e-12"
DEFAULT_CUTOFF_CEILING = 10**7


def pochhammer(s, count: int):
    """Rising product s (s+1) ... (s+count-1), count >= 1."""
    if count < 1:
        raise ValueError("count must be >= 1")
    s = mp.mpc(s)
    acc = mp.mpc(1)
    for i in range(count):
        acc *= s + i
    return acc


@dataclass
class PartialSumSpec:
    """A truncated nested sum: weights z, exponents s, cutoff N, optional M > N
    selecting the tail t_{M,N} instead of t_N."""

    z: object
    s: object
    N: int
    M: int = None


@dataclass
class EvalReport:
    value: object
    abs_error_estimate: object
    method: str
    domain_flags: dict
    diagnostics: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        value = mp.mpc(self.value)
        return {
            "value": {"re": fmt_real(value.real), "im": fmt_real(value.imag)},
            "abs_error_estimate": fmt_real(self.abs_error_estimate),
            "method": self.method,
            "domain_flags": dict(self.domain_flags),
            "diagnostics": {k: (v if isinstance(v, (int, str, bool)) else fmt_real(v))
                            for k, v in self.diagnostics.items()},
        }


@dataclass
class TranslationReport:
    residual: object
    lhs: object
    rhs: object
    terms_used: int


def _weight_values(z):
    """Normalise weights to plain complex values; RotationNumber stays exact
    through a power table."""
    if isinstance(z, ZVector):
        entries = z.entries
    else:
        entries = tuple(z)
    out = []
    for entry in entries:
        if isinstance(entry, RotationNumber):
            table = entry.power_values()
            out.append(("rot", table, entry.order))
        else:
            out.append(("gen", mp.mpc(entry), None))
    return out


def _nested_sums(z, s, cutoffs) -> dict:
    """{N: t_N} for general weights and complex exponents, one forward pass."""
    weights = _weight_values(z)
    svals = [mp.mpc(c) for c in _coords(s)]
    r = len(weights)
    if len(svals) != r:
        raise DomainError(f"point has {len(svals)} coordinates, z has depth {r}")
    int_exp = [s_j.imag == 0 and s_j.real == int(s_j.real) for s_j in svals]
    s_int = [int(s_j.real) if flag else None for flag, s_j in zip(int_exp, svals)]
    cutoffs = sorted(set(int(N) for N in cutoffs))
    want = set(cutoffs)
    top = cutoffs[-1]
    running = [mp.mpc(0)] * (r + 1)
    running[r] = mp.mpc(1)
    gen_pows = [mp.mpc(1)] * r
    out = {}
    for n in range(1, top + 1):
        if n in want:
            out[n] = running[0]
        if n == top:
            break
        log_n = None
        contrib = []
        for j in range(r):
            kind, data, order = weights[j]
            if kind == "rot":
                zp = data[n % order]
            else:
                gen_pows[j] *= data
                zp = gen_pows[j]
            if int_exp[j]:
                w = zp * mp.mpf(n) ** (-s_int[j])
            else:
                if log_n is None:
                    log_n = mp.log(n)
                w = zp * mp.exp(-svals[j] * log_n)
            contrib.append(w * running[j + 1])
        for j in range(r):
            running[j] += contrib[j]
    return out


def partial_sums(z, s, cutoffs) -> dict:
    """Exact truncated sums {N: t_N} at each requested cutoff."""
    return _nested_sums(z, s, cutoffs)


def brute_partial_sum(spec: PartialSumSpec):
    """t_N, or the tail t_{M,N} = t_M - t_N when spec.M is set."""
    if spec.N < 0:
        raise ValueError("cutoff must be >= 0")
    if spec.M is None:
        if spec.N <= 1:
            return mp.mpc(0)
        return _nested_sums(spec.z, spec.s, (spec.N,))[spec.N]
    if spec.M <= spec.N:
        raise ValueError("need M > N for a tail")
    sums = _nested_sums(spec.z, spec.s, (max(spec.N, 1), spec.M))
    return sums[spec.M] - sums[max(spec.N, 1)]


def _oscillation_period(z: ZVector, cap: int = 420) -> int:
    """lcm of the orders of the z_i: averaging t_N over this many consecutive
    cutoffs cancels every oscillatory character of the expansion."""
    period = 1
    for zi in z:
        period = period * zi.order // math.gcd(period, zi.order)
        if period > cap:
            return cap
    return period


def _domain_flags(z: ZVector, s) -> dict:
    return {kind: contains(kind, z, s) for kind in ("Ur", "Urz", "Vrz")}


def raw_cutoff_limit(z, s, tol, ceiling=DEFAULT_CUTOFF_CEILING, start=64):
    """The literal doubling loop on raw partial sums, no acceleration.

    Stops once |t_{2N} - t_N| < tol/2 for two consecutive doublings and
    returns (t at the last cutoff, error estimate, cutoff used).
    """
    tol = mp.mpf(tol)
    n = start
    prev = brute_partial_sum(PartialSumSpec(z, s, n))
    small_streak = 0
    increment = mp.inf
    while n <= ceiling:
        n *= 2
        cur = brute_partial_sum(PartialSumSpec(z, s, n))
        increment = abs(cur - prev)
        small_streak = small_streak + 1 if increment < tol / 2 else 0
        prev = cur
        if small_streak >= 2:
            return cur, 4 * increment, n
    raise NonConvergenceError(
        f"partial sums did not settle below {mp.nstr(tol, 5)} up to cutoff {n // 2}")


def eval_convergent(z: ZVector, s, tol=None, *, ceiling=DEFAULT_CUTOFF_CEILING,
                    start=64, accelerate=True) -> EvalReport:
    """Evaluate inside U_r(z) by doubling the cutoff until the increments of
    the (accelerated) cutoff sequence pass the tolerance twice in a row.

    Acceleration averages t_N over one full oscillation period (killing the
    leading character terms) and Richardson-extrapolates across the doubling
    ladder; it uses nothing but raw partial sums.  ``accelerate=False`` gives
    the plain doubling loop on t_N itself.
    """
    flags = _domain_flags(z, s)
    if not flags["Urz"]:
        raise DomainError(f"point {_coords(s)} is outside U_r(z) for z = {z}")
    tol = mp.mpf(DEFAULT_EVAL_TOL if tol is None else tol)

    if not accelerate:
        value, err, used = raw_cutoff_limit(z, s, tol, ceiling=ceiling, start=start)
        return EvalReport(value, err, "convergent", flags,
                          {"cutoff": used, "accelerated": False})

    period = _oscillation_period(z)
    table = []  # ragged extrapolation table, one row per doubling
    values = []
    n = start
    small_streak = 0
    while n <= ceiling:
        window = _nested_sums(z, s, range(n, n + period))
        rung = sum(window.values()) / period
        # iterated extrapolation along the doubling ladder; each column's
        # decay ratio is estimated from the data, so fractional tail
        # exponents are handled as well as integer ones
        row = [rung]
        i = 1
        while len(table) >= 2 and len(table[-1]) >= i and len(table[-2]) >= i:
            t2, t1, t0 = table[-2][i - 1], table[-1][i - 1], row[i - 1]
            d1, d2 = t1 - t2, t0 - t1
            if d2 == 0:
                row.append(t0)
                i += 1
                continue
            rho = d1 / d2
            if not mp.isfinite(abs(rho)) or abs(rho) < mp.mpf("1.3"):
                break
            row.append(t0 + d2 / (rho - 1))
            i += 1
        table.append(row)
        values.append(row[-1])
        if len(values) >= 2:
            increment = abs(values[-1] - values[-2])
            small_streak = small_streak + 1 if increment < tol / 2 else 0
            if small_streak >= 2:
                return EvalReport(values[-1], 4 * increment, "convergent", flags,
                                  {"cutoff": n, "rungs": len(values),
                                   "period": period, "accelerated": True})
        n *= 2
    raise NonConvergenceError(
        f"accelerated partial sums did not settle below {mp.nstr(tol, 5)} "
        f"up to cutoff {n // 2}")


def eval_integer_point(z: ZVector, a, A: int = 6, tol=None) -> EvalReport:
    """Regularised evaluation at an integer point of V_r(z); by the depth
    driver this equals the limit of the partial sums there."""
    a = tuple(int(x) for x in a)
    flags = _domain_flags(z, a)
    if not flags["Vrz"]:
        raise DomainError(f"integer point {a} is outside V_r(z) for z = {z}")
    spec = DepthSpec(z, a, (0,) * len(a))
    expansion = depth_expansion(spec, A, tol=tol)
    value = expansion.regularised_value()
    return EvalReport(value, expansion.residual_bound, "regularised", flags,
                      {"precision": A, "order": int(expansion.order()),
                       "terms": len(expansion)})


def stieltjes_constant(z: ZVector, a, kvec, A: int = 6, tol=None):
    """Regularised value of the log-weighted nested series at an integer
    point a (convergence not required)."""
    spec = DepthSpec(z, tuple(int(x) for x in a), tuple(int(k) for k in kvec))
    return depth_expansion(spec, A, tol=tol).regularised_value()


def _delta(entry) -> int:
    """delta_i = 1 iff z_i != 1; exact for RotationNumber inputs."""
    if isinstance(entry, RotationNumber):
        return 0 if entry.is_one() else 1
    return 1 if abs(mp.mpc(entry) - 1) > mp.mpf("1e-12") else 0


def verify_translation(z, s, M: int, N: int, tol=None) -> TranslationReport:
    """Residual of the translation identity at (z, s) with cutoffs M > N >= 2.

    Depth 1 uses the plain identity in s_1; higher depth uses the combined
    form with the shift delta_1.  The Pochhammer series on the right is
    truncated once terms fall below tol/100, but only after the index has
    cleared the initial Pochhammer growth (k > 2|s_1| + 4).
    """
    if not M > N >= 2:
        raise ValueError("need M > N >= 2")
    tol = mp.mpf(DEFAULT_EVAL_TOL if tol is None else tol)
    entries = list(z.entries) if isinstance(z, ZVector) else list(z)
    svals = [mp.mpc(c) for c in _coords(s)]
    r = len(entries)
    if len(svals) != r:
        raise DomainError("z and s must have equal length")

    def zval(entry):
        return entry.value() if isinstance(entry, RotationNumber) else mp.mpc(entry)

    def tail(zs, ss, MM, NN):
        return brute_partial_sum(PartialSumSpec(zs, ss, NN, MM))

    def head(zs, ss, NN):
        return brute_partial_sum(PartialSumSpec(zs, ss, NN))

    z1 = zval(entries[0])
    if r == 1:
        shift = svals[0]
        lhs = ((z1 - 1) * tail(entries, [shift - 1], M, N)
               + z1 ** N / mp.mpf(N - 1) ** (shift - 1)
               - z1 ** M / mp.mpf(M - 1) ** (shift - 1))

        def rhs_term(k):
            return tail(entries, [shift + k], M, N)
    else:
        d1 = _delta(entries[0])
        shift = svals[0] + d1
        if isinstance(entries[0], RotationNumber) and isinstance(entries[1], RotationNumber):
            z12 = entries[0] * entries[1]
        else:
            z12 = zval(entries[0]) * zval(entries[1])
        merged = [z12] + entries[2:]
        merged_s = [shift + svals[1] - 1] + svals[2:]
        rest, rest_s = entries[1:], svals[1:]
        lhs = (z1 * tail(merged, merged_s, M - 1, N)
               + (z1 - 1) * tail(entries, [shift - 1] + svals[1:], M, N)
               + z1 ** N / mp.mpf(N - 1) ** (shift - 1) * head(rest, rest_s, N)
               - z1 ** M / mp.mpf(M - 1) ** (shift - 1) * head(rest, rest_s, M - 1))

        def rhs_term(k):
            return tail(entries, [shift + k] + svals[1:], M, N)

    rhs = mp.mpc(0)
    size_gate = 2 * abs(svals[0]) + 4
    k_cap = int(size_gate) + 300
    prev_size = mp.inf
    growth_streak = 0
    k = 0
    while True:
        term = pochhammer(shift - 1, k + 1) / mp.factorial(k + 1) * rhs_term(k)
        rhs += term
        size = abs(term)
        if k > size_gate:
            if size < tol / 100:
                break
            growth_streak = growth_streak + 1 if size > prev_size else 0
            if growth_streak >= 5 or k >= k_cap:
                raise TruncationError(
                    f"translation series terms stopped decreasing at k = {k} "
                    f"(|term| = {mp.nstr(size, 5)})")
        prev_size = size
        k += 1
    return TranslationReport(residual=abs(lhs - rhs), lhs=lhs, rhs=rhs,
                             terms_used=k + 1)
