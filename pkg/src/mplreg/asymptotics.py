"""Asymptotic expansions with root-of-unity character coefficients.

An expansion approximates a sequence u_n by

    u_n  =  sum over (xi, l, m) of  c * xi^n * (log n)^l * n^(-m)  +  o(n^-A),

with finitely many terms, every stored m <= A, and coefficients indexed by
the exact character value xi in Q/Z (each finite-group character appears
once, so indexing by value deduplicates the exponent bookkeeping).

``partial_sum`` maps the expansion of u_n to the expansion of
v_n = sum_{m<n} u_m by routing every stored term through the summation
engines' block structure; ``depth_expansion`` iterates this together with a
pointwise multiplication to expand nested sums

    sum_{n > n_1 > ... > n_r > 0}  prod_i  z_i^{n_i} (log n_i)^{k_i} n_i^{-a_i}.

Constants are extracted by numeric matching against exact partial sums at a
doubling cutoff pair, certified by a stability check.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp

from . import summation
from .errors import PrecisionError
from .rootsofunity import ONE, RotationNumber, ZVector, index_set_and_count

__all__ = [
    "Character",
    "AsymptoticExpansion",
    "DepthSpec",
    "partial_sum",
    "depth_expansion",
    "regularised_value",
    "order_lower_bound",
    "nested_char_partial_sums",
]

# a character of the coefficient algebra is just an exact root of unity
Character = RotationNumber

LOG_POWER_CAP = 64


def fmt_real(x) -> str:
    """Decimal string with enough digits to round-trip at this precision."""
    return mp.nstr(mp.mpf(x), mp.mp.dps + 5)


def parse_real(text: str):
    return mp.mpf(text)


class AsymptoticExpansion:
    """Finite map (character, log power, decay power) -> complex coefficient,
    plus the precision order A (error o(n^-A)) and a diagnostic bound on the
    residual left by constant matching."""

    __slots__ = ("_coeffs", "precision", "residual_bound")

    def __init__(self, coeffs=None, precision: int = 0, residual_bound=None):
        clean = {}
        for (xi, l, m), c in (coeffs or {}).items():
            if not isinstance(xi, RotationNumber):
                raise TypeError("expansion keys must use RotationNumber characters")
            if l > LOG_POWER_CAP:
                raise PrecisionError(f"log power {l} exceeds cap {LOG_POWER_CAP}")
            c = mp.mpc(c)
            if c != 0 and m <= precision:
                clean[(xi, int(l), int(m))] = c
        self._coeffs = clean
        self.precision = int(precision)
        self.residual_bound = mp.mpf(residual_bound if residual_bound is not None else 0)

    @classmethod
    def constant_one(cls, precision: int) -> "AsymptoticExpansion":
        return cls({(ONE, 0, 0): mp.mpc(1)}, precision=precision)

    def items(self):
        return sorted(self._coeffs.items(),
                      key=lambda kv: (kv[0][2], kv[0][1], kv[0][0].fraction))

    def __len__(self):
        return len(self._coeffs)

    def is_empty(self) -> bool:
        return not self._coeffs

    def coefficient(self, xi: RotationNumber, l: int, m: int):
        return self._coeffs.get((xi, l, m), mp.mpc(0))

    def regularised_value(self):
        """The coefficient of the constant basis element (xi=1, l=0, m=0)."""
        return self._coeffs.get((ONE, 0, 0), mp.mpc(0))

    def order(self):
        """Smallest stored decay power; +inf for the empty expansion."""
        if not self._coeffs:
            return mp.inf
        return min(m for (_, _, m) in self._coeffs)

    def characters(self):
        return sorted({xi for (xi, _, _) in self._coeffs}, key=lambda x: x.fraction)

    def evaluate(self, n: int):
        n = int(n)
        nf = mp.mpf(n)
        log_n = mp.log(nf)
        powers = {xi: xi.power_values()[n % xi.order] for xi in self.characters()}
        acc = mp.mpc(0)
        for (xi, l, m), c in self._coeffs.items():
            acc += c * powers[xi] * log_n ** l * nf ** (-m)
        return acc

    def add(self, other: "AsymptoticExpansion") -> "AsymptoticExpansion":
        precision = min(self.precision, other.precision)
        coeffs = dict(self._coeffs)
        for key, c in other._coeffs.items():
            coeffs[key] = coeffs.get(key, mp.mpc(0)) + c
        return AsymptoticExpansion(
            coeffs, precision,
            residual_bound=self.residual_bound + other.residual_bound)

    def __add__(self, other):
        return self.add(other)

    def scaled(self, c) -> "AsymptoticExpansion":
        c = mp.mpc(c)
        return AsymptoticExpansion(
            {k: v * c for k, v in self._coeffs.items()},
            self.precision, residual_bound=self.residual_bound * abs(c))

    def multiply_monomial(self, xi0: RotationNumber, l0: int, m0: int
                          ) -> "AsymptoticExpansion":
        """Pointwise product with xi0^n (log n)^l0 n^(-m0)."""
        coeffs = {}
        for (xi, l, m), c in self._coeffs.items():
            coeffs[(xi * xi0, l + l0, m + m0)] = c
        return AsymptoticExpansion(coeffs, self.precision + m0,
                                   residual_bound=self.residual_bound)

    def truncated(self, precision: int) -> "AsymptoticExpansion":
        return AsymptoticExpansion(
            {k: c for k, c in self._coeffs.items() if k[2] <= precision},
            precision, residual_bound=self.residual_bound)

    def to_json_obj(self) -> dict:
        terms = [
            {"xi": str(xi), "l": l, "m": m,
             "re": fmt_real(c.real), "im": fmt_real(c.imag)}
            for (xi, l, m), c in self.items()
        ]
        return {"terms": terms, "precision": self.precision,
                "residual_bound": fmt_real(self.residual_bound)}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "AsymptoticExpansion":
        coeffs = {}
        for t in obj["terms"]:
            key = (RotationNumber.parse(t["xi"]), int(t["l"]), int(t["m"]))
            coeffs[key] = mp.mpc(parse_real(t["re"]), parse_real(t["im"]))
        return cls(coeffs, int(obj["precision"]),
                   residual_bound=parse_real(obj.get("residual_bound", "0")))

    def __repr__(self):
        inner = ", ".join(
            f"({xi},{l},{m}): {mp.nstr(c, 8)}" for (xi, l, m), c in self.items())
        return f"AsymptoticExpansion({{{inner}}}, A={self.precision})"


@dataclass(frozen=True)
class DepthSpec:
    """A nested character sum: z entries, integer exponents, log powers."""

    z: ZVector
    a: tuple
    kvec: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        object.__setattr__(self, "kvec", tuple(int(x) for x in self.kvec))
        if not (len(self.z) == len(self.a) == len(self.kvec)):
            raise ValueError("z, a and kvec must have equal length")
        if any(k < 0 for k in self.kvec):
            raise ValueError("log powers must be >= 0")

    @property
    def r(self) -> int:
        return len(self.a)

    def exponent_sum(self, i: int, j: int) -> int:
        """A_[i,j] = a_i + ... + a_j (1-based, inclusive)."""
        if not 1 <= i <= j <= self.r:
            raise IndexError(f"need 1 <= i <= j <= {self.r}")
        return sum(self.a[i - 1:j])

    def product_indicator(self, i: int, j: int) -> int:
        """q_[i,j] = 1 iff z_i * ... * z_j = 1."""
        from .rootsofunity import rotation_product

        return 1 if rotation_product(self.z, i, j).is_one() else 0

    def suffix_count(self, i: int, j: int) -> int:
        """Q_[i,j] = q_[i,j] + ... + q_[j,j]; zero when j < i."""
        if j < i:
            return 0
        members, _ = index_set_and_count(self.z, j)
        return sum(1 for t in members if t >= i)


def order_lower_bound(spec: DepthSpec) -> int:
    """min(0, A_[1,i] - Q_[1,i] over i): a certified floor for the order."""
    best = 0
    for i in range(1, spec.r + 1):
        best = min(best, spec.exponent_sum(1, i) - spec.suffix_count(1, i))
    return best


def nested_char_partial_sums(z: ZVector, a, kvec, cutoffs) -> dict:
    """{N: sum_{N>n_1>...>n_r>0} prod z_i^{n_i} (log n_i)^{k_i} n_i^{-a_i}}.

    One forward pass with running inner sums; cost O(max(cutoffs) * r).
    """
    r = len(z)
    cutoffs = sorted(set(int(N) for N in cutoffs))
    want = set(cutoffs)
    top = cutoffs[-1]
    tables = [zi.power_values() for zi in z]
    orders = [zi.order for zi in z]
    running = [mp.mpc(0)] * (r + 1)
    running[r] = mp.mpc(1)
    out = {}
    for n in range(1, top + 1):
        if n in want:
            out[n] = running[0]
        if n == top:
            break
        log_n = mp.log(n) if any(kvec) else None
        weights = []
        for j in range(r):
            w = tables[j][n % orders[j]] * mp.mpf(n) ** (-a[j])
            if kvec[j]:
                w *= log_n ** kvec[j]
            weights.append(w)
        contrib = [weights[j] * running[j + 1] for j in range(r)]
        for j in range(r):
            running[j] += contrib[j]
    return out


def partial_sum(e: AsymptoticExpansion, err_const_mode="exact", *,
                precision=None, tol=None, carried_growth=None) -> AsymptoticExpansion:
    """Expansion of v_n = sum_{m<n} u_m given the expansion e of u_n.

    ``err_const_mode`` fixes how the constant contributed by the part of u
    that e does not represent is handled:

    * ``"exact"`` -- e represents u exactly (no residual); the constant is
      the sum of the per-term matched constants.
    * a callable ``cutoffs -> {N: value}`` returning exact partial sums of
      the true underlying sequence -- the constant is matched globally
      against it, which also absorbs the residual's constant.

    ``carried_growth = (exponent, log_power)`` tells the matcher how the
    uncertainty carried in e's coefficients (``residual_bound``) is imaged
    at a cutoff n, namely within residual_bound * (1+log n)^log_power *
    n^exponent.  The depth driver derives it from its head monomial; the
    default falls back to the worst stored decay index, which is correct
    but can be far too conservative.
    """
    a_out = e.precision if precision is None else int(precision)
    tol_eff = summation.resolve_tol(tol)

    if err_const_mode == "exact":
        total = AsymptoticExpansion({}, precision=a_out)
        for (xi, l, m), c in e.items():
            term = summation.term_sum_expansion(xi, l, m, a_out, tol=tol_eff)
            total = total.add(term.expansion.scaled(c))
        return total

    if not callable(err_const_mode):
        raise ValueError("err_const_mode must be 'exact' or a callable")

    a_int = summation.internal_precision(a_out, tol_eff)
    parts_total: dict = {}
    tail_total: dict = {}
    max_log = 0
    for (xi, l, m), c in e.items():
        max_log = max(max_log, l)
        parts, tail = summation._term_nparts(xi, l, m, a_int)
        char = ONE if xi.is_one() else xi
        for (l2, m2), v in parts.items():
            key = (char, l2, m2)
            parts_total[key] = parts_total.get(key, mp.mpc(0)) + c * v
        summation.merge_tail(tail_total, tail, abs(c))

    # uncertainty already carried by e's coefficients, imaged at a cutoff;
    # grows when the expansion has growing terms (negative decay indices)
    if carried_growth is not None:
        growth_exp, growth_log = carried_growth
    else:
        growth_exp = -min(0, e.order()) if not e.is_empty() else 0
        growth_log = max_log

    def prop(n):
        return (e.residual_bound
                * (1 + mp.log(n)) ** growth_log * mp.mpf(n) ** growth_exp)

    c2, residual, _ = summation.run_matching(
        err_const_mode,
        lambda n: _eval_parts_by_char(parts_total, n),
        tail_total, tol_eff, prop_fn=prop)

    coeffs = {k: v for k, v in parts_total.items() if k[2] <= a_out}
    key00 = (ONE, 0, 0)
    coeffs[key00] = coeffs.get(key00, mp.mpc(0)) + c2
    return AsymptoticExpansion(coeffs, precision=a_out, residual_bound=residual)


def _eval_parts_by_char(parts: dict, n: int):
    nf = mp.mpf(n)
    log_n = mp.log(nf)
    chars = {xi for (xi, _, _) in parts}
    powers = {xi: xi.power_values()[n % xi.order] for xi in chars}
    acc = mp.mpc(0)
    for (xi, l, m), c in parts.items():
        acc += c * powers[xi] * log_n ** l * nf ** (-m)
    return acc


def inner_expansion_order(a_i: int) -> int:
    """Extra precision the inner recursion level must carry.

    The product bookkeeping needs the inner error o(n^-A') to satisfy
    A' + a_i >= A + 1; |a_i - 1| meets that for every integer a_i and
    agrees with A' = A + a_i - 1 when a_i >= 1.
    """
    return abs(a_i - 1)


def depth_expansion(spec: DepthSpec, A: int, tol=None) -> AsymptoticExpansion:
    """Expansion of u_n = sum_{n>n_1>...>n_r>0} prod z_i^{n_i}(log n_i)^{k_i} n_i^{-a_i}.

    Recursive over the depth: expand the inner suffix at raised precision,
    multiply by the head monomial, and partial-sum with the level's constant
    matched against exact nested partial sums of the same suffix series.
    """
    if A < 0:
        raise ValueError(f"expansion precision must be >= 0, got {A}")

    def build(i: int, a_i: int) -> AsymptoticExpansion:
        if a_i < 0:
            raise PrecisionError(
                f"negative intermediate precision {a_i} at depth {i}")
        if i == spec.r:
            return AsymptoticExpansion.constant_one(a_i)
        inner = build(i + 1, a_i + inner_expansion_order(spec.a[i]))
        prod = inner.multiply_monomial(spec.z[i], spec.kvec[i], spec.a[i])
        suffix = spec.z.suffix(i)

        def true_sums(cutoffs):
            return nested_char_partial_sums(
                suffix, spec.a[i:], spec.kvec[i:], cutoffs)

        # inner uncertainty rides the head monomial; summing it gains one
        # power of n only on the trivial character
        growth = (max(0, -spec.a[i] + (1 if spec.z[i].is_one() else 0)),
                  spec.kvec[i] + 1)
        return partial_sum(prod, true_sums, precision=a_i, tol=tol,
                           carried_growth=growth)

    return build(0, A)


def regularised_value(e: AsymptoticExpansion):
    return e.regularised_value()
