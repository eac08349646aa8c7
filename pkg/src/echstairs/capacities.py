"""ECH capacity sequences of balls, ellipsoids and convex toric domains.

Sequences are stored as numpy int64 arrays of scaled numerators over a
common denominator, together with the length of the prefix that is
certified correct.  The two sequence operations are the (max, +)
convolution for disjoint unions and the windowed subtraction used to
peel balls off a domain; the latter carries a certification heuristic
whose window grows automatically until the requested prefix certifies.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from math import isqrt, lcm

import numpy as np

from .core import CertificationError, NegativeWeightExpansion, Q

_INT64_GUARD = 1 << 62


@dataclass(eq=False)
class CapacitySequence:
    """Prefix c_0 <= c_1 <= ... of a capacity sequence, exactly scaled.

    nums[k] / den is c_k.  certified is the length of the prefix known
    to be correct; entries past it are best-effort lower bounds.
    """

    nums: np.ndarray
    den: int = 1
    certified: int = 0

    def __post_init__(self):
        self.nums = np.asarray(self.nums, dtype=np.int64)
        if self.den <= 0:
            raise ValueError("denominator must be positive")
        if self.certified > len(self.nums):
            raise ValueError("certified prefix longer than data")
        if len(self.nums) and int(self.nums.max()) >= _INT64_GUARD:
            raise OverflowError("scaled capacity exceeds the int64 guard")

    def __len__(self) -> int:
        return len(self.nums)

    def value(self, k: int) -> Q:
        if not 0 <= k < len(self.nums):
            raise IndexError(f"capacity index {k} out of range")
        return Q(int(self.nums[k]), self.den)

    def values(self, limit: int | None = None) -> list[Q]:
        upto = len(self.nums) if limit is None else min(limit, len(self.nums))
        return [Q(int(v), self.den) for v in self.nums[:upto]]

    def rescaled(self, den: int) -> "CapacitySequence":
        if den % self.den:
            raise ValueError("new denominator must be a multiple")
        f = den // self.den
        return CapacitySequence(self.nums * f, den, self.certified)

    def __repr__(self):
        return (
            f"CapacitySequence(len={len(self.nums)}, den={self.den}, "
            f"certified={self.certified})"
        )


def _triangle_index(count: int) -> np.ndarray:
    """v[k] = largest m with m(m+1)/2 <= k, vectorized with exact fixup."""
    k = np.arange(count, dtype=np.int64)
    v = ((np.sqrt(8.0 * k + 1.0) - 1.0) / 2.0).astype(np.int64)
    # float sqrt can land one off near triangular numbers; nudge exactly
    v = np.where(v * (v + 1) // 2 > k, v - 1, v)
    v = np.where((v + 1) * (v + 2) // 2 <= k, v + 1, v)
    assert (v * (v + 1) // 2 <= k).all() and ((v + 1) * (v + 2) // 2 > k).all()
    return v


def ball_sequence(c, count: int) -> CapacitySequence:
    """Capacities of the ball B(c): c_k = c * v(k) in closed form."""
    c = Q(c)
    if c <= 0:
        raise ValueError("ball size must be positive")
    if count < 0:
        raise ValueError("count must be nonnegative")
    v = _triangle_index(count)
    num, den = c.numerator, c.denominator
    if count and num * int(v[-1]) >= _INT64_GUARD:
        raise OverflowError("ball capacities exceed the int64 guard")
    return CapacitySequence(v * num, den, count)


def _ellipsoid_prefix_scaled(p: int, q: int, count: int) -> np.ndarray:
    """First `count` values of N(p, q) for positive integers p, q.

    N(p, q) is the sorted multiset {m*p + n*q : m, n >= 0}.  All values
    up to a cutoff C are generated in one vectorized pass; C starts at
    the area heuristic sqrt(2*count*p*q) plus a boundary margin and
    doubles in the rare case the prefix comes up short.
    """
    if p <= 0 or q <= 0:
        raise ValueError("ellipsoid parameters must be positive")
    if count == 0:
        return np.zeros(0, dtype=np.int64)
    cutoff = isqrt(2 * count * p * q) + 2 * (p + q)
    while True:
        if cutoff >= _INT64_GUARD:
            raise OverflowError("ellipsoid cutoff exceeds the int64 guard")
        ms = np.arange(cutoff // p + 1, dtype=np.int64) * p
        counts = (cutoff - ms) // q + 1
        total = int(counts.sum())
        starts = np.cumsum(counts) - counts
        idx = np.arange(total, dtype=np.int64) - np.repeat(starts, counts)
        vals = np.repeat(ms, counts) + idx * q
        vals.sort(kind="stable")
        if total >= count:
            return vals[:count]
        cutoff *= 2


def ech_ellipsoid(a, b, grid: int) -> CapacitySequence:
    """Certified prefix of the ellipsoid capacities N(a, b).

    Builds the multiset {m*a + n*b : 0 <= m, n <= grid} and keeps the
    prefix that a (grid+1) x (grid+1) block provably pins down: the
    shorter of the index budget floor((grid+1)*floor(1 + grid*a/b)/2) - 1
    and the count of entries below (grid+1)*min(a, b), past which terms
    from outside the block could interleave.
    """
    a, b = Q(a), Q(b)
    if a <= 0 or b <= 0:
        raise ValueError("ellipsoid parameters must be positive")
    if grid < 0:
        raise ValueError("grid must be nonnegative")
    if a > b:
        a, b = b, a
    den = lcm(a.denominator, b.denominator)
    p = a.numerator * (den // a.denominator)
    q = b.numerator * (den // b.denominator)
    if (grid + 1) * (p + q) >= _INT64_GUARD:
        raise OverflowError("grid values exceed the int64 guard")
    side = np.arange(grid + 1, dtype=np.int64)
    vals = (side[:, None] * p + side[None, :] * q).ravel()
    vals.sort(kind="stable")
    budget = ((grid + 1) * int(1 + grid * a / b)) // 2 - 1
    sound = int(np.searchsorted(vals, (grid + 1) * p, side="left"))
    keep = max(0, min(budget, sound))
    return CapacitySequence(vals[:keep], den, keep)


def seq_union(s: CapacitySequence, t: CapacitySequence) -> CapacitySequence:
    """Capacities of a disjoint union: the (max, +) convolution.

    (S # T)_k = max over m + n = k of S_m + T_n; the result is as long
    as the shorter input, past which terms would need missing entries.
    """
    den = lcm(s.den, t.den)
    s, t = s.rescaled(den), t.rescaled(den)
    length = min(len(s), len(t))
    out = np.empty(length, dtype=np.int64)
    sv, tv = s.nums, t.nums
    for k in range(length):
        out[k] = (sv[: k + 1] + tv[k::-1]).max()
    return CapacitySequence(out, den, min(s.certified, t.certified, length))


def seq_sub(
    s: CapacitySequence, t: CapacitySequence, window: int
) -> CapacitySequence:
    """Windowed sequence subtraction (S - T)_k = min_m (S_{k+m} - T_m).

    The minimum runs over 0 <= m <= window.  Because T is nondecreasing
    it splits into runs of equal values and only run heads can attain
    the minimum, which keeps the scan near sqrt(window) passes.  The
    certificate here is heuristic: an index counts as certified when
    its minimizer sits in the first half of the window and the final
    head's candidate has climbed back above the minimum.  Callers that
    know more about S and T (ech_convex_toric does) should certify on
    their own terms.
    """
    if window < 0:
        raise ValueError("window must be nonnegative")
    if len(t) < window + 1 or len(s) < window + 1:
        raise ValueError("window exceeds the available sequence data")
    den = lcm(s.den, t.den)
    s, t = s.rescaled(den), t.rescaled(den)
    sv, tv = s.nums, t.nums
    overlap = min(len(sv), len(tv))
    if (tv[:overlap] > sv[:overlap]).any():
        raise ValueError("subtrahend does not fit under the sequence")
    if (np.diff(tv) < 0).any():
        raise ValueError("subtrahend must be nondecreasing")
    length = len(sv) - window
    heads = [0] + [int(i) for i in np.flatnonzero(np.diff(tv[: window + 1])) + 1]
    best = sv[:length].copy()
    best -= tv[0]
    best_head = np.zeros(length, dtype=np.int64)
    for h in heads[1:]:
        cand = sv[h : h + length] - tv[h]
        better = cand < best
        np.copyto(best, cand, where=better)
        best_head[better] = h
    h_last = heads[-1]
    climbed = sv[h_last : h_last + length] - tv[h_last] >= best
    ok = (best_head <= window // 2) & climbed
    bad = np.flatnonzero(~ok)
    heur = int(bad[0]) if len(bad) else length
    certified = min(heur, s.certified - window, length)
    out = CapacitySequence(best, den, max(0, certified))
    if (np.diff(best) < 0).any():
        raise ValueError("subtraction produced a decreasing sequence")
    return out


def _isqrt_array(x: np.ndarray) -> np.ndarray:
    """Elementwise floor square root, exact (float pass plus fixup)."""
    assert x.max(initial=0) < 1 << 52, "values too large for the float pass"
    r = np.sqrt(x.astype(np.float64)).astype(np.int64)
    r = np.where(r * r > x, r - 1, r)
    r = np.where((r + 1) * (r + 1) <= x, r + 1, r)
    return r


def ech_convex_toric(x: NegativeWeightExpansion, count: int) -> CapacitySequence:
    """Capacities of the domain with negative weight expansion x.

    Peels the expansion's balls off the head ball by windowed
    subtraction.  Certification is sound, not heuristic: every true
    intermediate sequence obeys c_j >= sqrt(2*j*V) - 3b/2 where V
    starts at b^2 and drops by c^2 when a ball of size c is peeled
    (the bound survives the min-recursion in closed form), so an index
    is certified once the candidates beyond the window provably exceed
    the windowed minimum.  The margin of that comparison degenerates
    when the index-to-window ratio hits the stationary point V'/c^2 of
    the tail bound, so the windows are scheduled backwards with each
    ratio pinned at a quarter of its stationary point; a doubling loop
    mops up the constant slack, giving up at 64x with the best
    certified length attached to the error.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    if count == 0:
        return CapacitySequence(np.zeros(0, dtype=np.int64), 1, 0)
    den = lcm(x.b.denominator, *(p.denominator for p in x.parts))
    head = int(x.b * den)
    parts = [int(p * den) for p in x.parts]
    vols = [head * head]
    for c in parts:
        vols.append(vols[-1] - c * c)
        if vols[-1] <= 0:
            raise ValueError(f"{x} has nonpositive volume partway through")
    scale = 1
    achieved = 0
    while True:
        need = count
        windows = []
        for c, vnext in zip(reversed(parts), reversed(vols[1:])):
            w = scale * max(256, -(-4 * need * c * c // vnext))
            windows.append(w)
            need += w
        windows.reverse()
        seq = ball_sequence(x.b, need).rescaled(den)
        certified = len(seq)
        vs = vols[0]
        for c, vs_next, window in zip(parts, vols[1:], windows):
            sub = ball_sequence(Q(c, den), window + 1).rescaled(den)
            new = seq_sub(seq, sub, window)
            k = np.arange(len(new), dtype=np.int64)
            # tail candidates at m > window sit above
            #   sqrt(2*(k+m)*V) - 3b/2 - c*sqrt(2m),
            # minimized at m = window+1 once the window covers the
            # stationary point c^2*k/(V - c^2), or globally at
            # sqrt(2*k*(V - c^2)) - 3b/2.  All comparisons are integer,
            # rounding each square root the safe way.
            doubled = 2 * new.nums
            u = isqrt(2 * (window + 1)) + 1
            lh = _isqrt_array(2 * (k + window + 1) * vs)
            cert_h = ((window + 1) * vs_next >= c * c * k) & (
                doubled + 3 * head + 2 * c * u <= 2 * lh
            )
            lg = _isqrt_array(2 * k * vs_next)
            cert_g = doubled + 3 * head <= 2 * lg
            bad = np.flatnonzero(~(cert_h | cert_g))
            step_cert = int(bad[0]) if len(bad) else len(new)
            certified = min(step_cert, certified - window)
            seq = CapacitySequence(new.nums, den, max(0, certified))
            vs = vs_next
        achieved = max(achieved, min(seq.certified, count))
        if seq.certified >= count:
            return CapacitySequence(seq.nums[:count], den, count)
        scale *= 2
        if scale > 64:
            raise CertificationError(
                f"could not certify {count} capacities of {x}", achieved=achieved
            )


def cap_function(x: NegativeWeightExpansion, t, count: int | None = None) -> int:
    """Number of capacities of x that are at most t.

    With count omitted the prefix length starts at an area estimate and
    doubles until an entry certified to exceed t exists.
    """
    t = Q(t)
    if t < 0:
        return 0
    if count is not None:
        return _cap_count(ech_convex_toric(x, count), t, hard=True)
    guess = int(t * t / (2 * x.vol) + 3 * t / x.vol) + 16
    while True:
        got = _cap_count(ech_convex_toric(x, guess), t, hard=guess > (1 << 24))
        if got is not None:
            return got
        guess *= 2


def _cap_count(seq: CapacitySequence, t: Q, hard: bool) -> int | None:
    thr = (t.numerator * seq.den) // t.denominator
    idx = int(np.searchsorted(seq.nums, thr, side="right"))
    if idx < seq.certified:
        return idx
    if hard:
        raise CertificationError(
            f"no certified capacity above {t} in a prefix of {len(seq)}",
            achieved=seq.certified,
        )
    return None


def count_below(a, b, bound) -> int:
    """Exact count of pairs m, n >= 0 with m*a + n*b < bound."""
    a, b, bound = Q(a), Q(b), Q(bound)
    if a <= 0 or b <= 0:
        raise ValueError("steps must be positive")
    den = lcm(a.denominator, b.denominator, bound.denominator)
    ia = a.numerator * (den // a.denominator)
    ib = b.numerator * (den // b.denominator)
    ibound = bound.numerator * (den // bound.denominator)
    total = 0
    m = 0
    while m * ia < ibound:
        rem = ibound - m * ia
        # n < rem / ib
        total += -(-rem // ib) if rem % ib else rem // ib
        m += 1
    return total


# ---------------------------------------------------------------------------
# binary cache
# ---------------------------------------------------------------------------

_MAGIC = b"ECHSEQ01"


def save_sequence(path, seq: CapacitySequence) -> None:
    """Write a sequence to a little-endian binary cache file."""
    den_bytes = seq.den.to_bytes((seq.den.bit_length() + 7) // 8 or 1, "little")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(den_bytes)))
        fh.write(den_bytes)
        fh.write(struct.pack("<QQ", len(seq.nums), seq.certified))
        fh.write(seq.nums.astype("<i8").tobytes())


def load_sequence(path) -> CapacitySequence:
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise ValueError(f"{path} is not a capacity cache file")
        (den_len,) = struct.unpack("<I", fh.read(4))
        den = int.from_bytes(fh.read(den_len), "little")
        length, certified = struct.unpack("<QQ", fh.read(16))
        nums = np.frombuffer(fh.read(8 * length), dtype="<i8").astype(np.int64)
    return CapacitySequence(nums, den, certified)
