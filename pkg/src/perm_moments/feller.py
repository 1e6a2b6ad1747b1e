"""Feller coupling of cycle counts and their Poisson limits.

One sequence xi of independent Bernoulli bits with P(xi_m = 1) = 1/m carries,
simultaneously for every horizon n, the cycle counts of a uniform permutation
on n points and their independent Poisson(1/m) limits:

* the word ``1 xi_2 ... xi_n 1`` decomposes into spacings (two ones at
  distance m enclose m-1 zeros); the number C_m of m-spacings is distributed
  exactly like the number of m-cycles on n points;
* the number Y_m of m-spacings in the *whole* sequence is Poisson(1/m), all
  independent.

Bit-position conventions used throughout this module:

* xi is 1-based in formulas; ``bits[j - 1]`` stores xi_j, and xi_1 = 1 always.
* the *closing word* of a cycle type on n points has n characters, character
  j being '1' exactly when a cycle closes at position j with parts laid out
  longest first.  It relates to xi-words by c_j = xi_{j+1} for j < n, c_n = 1.

Tails beyond a stored prefix are sampled exactly: given a one at position j,
the next one sits at k with probability j/((k-1)k), so gaps are drawn by
inversion (k = ceil(j/U)) without materializing the bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classfun import CoeffGrid, check_domain, EvalPoint
from .errors import DomainError, PermMomentsError, SizeLimitError
from .estimate import MCEstimate
from .partitions import CycleCounts, Partition
from .rng import map_chunks, substream

DEFAULT_HORIZON = 10**6
_MAX_WALK_ITER = 10_000


@dataclass(frozen=True)
class XiSequence:
    """Stored prefix xi_1 .. xi_L of the coupling sequence."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.bits, dtype=bool)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("bits must be a non-empty 1-D array")
        if not arr[0]:
            raise ValueError("xi_1 must be 1")
        object.__setattr__(self, "bits", arr)

    @property
    def length(self) -> int:
        return self.bits.size

    @staticmethod
    def from_bits(bits) -> "XiSequence":
        return XiSequence(np.asarray(bits, dtype=bool))


def sample_xi(length: int, seed: int) -> XiSequence:
    """Independent bits with P(xi_m = 1) = 1/m, reproducible from the seed."""
    if length < 1:
        raise ValueError("length must be >= 1")
    rng = substream(seed, 0)
    u = rng.random(length)
    return XiSequence(u < 1.0 / np.arange(1, length + 1))


def spacings(xi: XiSequence, n: int) -> CycleCounts:
    """Counts C_m of m-spacings in the sentinel-wrapped word 1 xi_2 .. xi_n 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n >= xi.length:
        raise SizeLimitError(f"horizon n = {n} needs a stored prefix longer than n")
    word = np.empty(n + 1, dtype=bool)
    word[0] = True
    word[1:n] = xi.bits[1:n]
    word[n] = True
    ones = np.flatnonzero(word)
    gaps = np.diff(ones)
    counts: dict[int, int] = {}
    for g in gaps:
        counts[int(g)] = counts.get(int(g), 0) + 1
    return CycleCounts(counts, n)


@dataclass(frozen=True)
class TotalSpacings:
    """Y_m counts over the stored prefix, with the truncation certificate.

    Counts cover every spacing whose both endpoints lie in the prefix.  The
    open gap after the last stored one cannot be an m-spacing for any
    m <= max_gap (enforced as a precondition), so the only omissions are
    spacings lying wholly beyond the prefix; their expected total number over
    all m <= max_gap is exactly max_gap / L, reported as the residual bias.
    """

    counts: dict[int, int]
    max_gap: int
    last_one: int
    missed_mean_bound: float

    def get(self, m: int) -> int:
        return self.counts.get(m, 0)


def total_spacings(xi: XiSequence, max_gap: int) -> TotalSpacings:
    """Y_m for m <= max_gap, counted over the whole stored sequence."""
    if max_gap < 1:
        raise ValueError("max_gap must be >= 1")
    ones = np.flatnonzero(xi.bits) + 1
    last = int(ones[-1])
    if max_gap > xi.length - last:
        raise SizeLimitError(
            f"max_gap = {max_gap} not certifiable: prefix ends at one {last} of {xi.length}"
        )
    gaps = np.diff(ones)
    counts: dict[int, int] = {}
    for g in gaps:
        g = int(g)
        if g <= max_gap:
            counts[g] = counts.get(g, 0) + 1
    return TotalSpacings(counts, max_gap, last, max_gap / xi.length)


def excess_event(xi: XiSequence, n: int, m: int) -> bool:
    """The boundary event: xi_{n+1-m} = 1 followed by zeros through xi_{n+1}.

    Exactly when it happens can the horizon count C_m exceed the limit count
    Y_m (by one): the sentinel closes an m-spacing that the real sequence has
    not closed.  Its probability is 1/(n+1).
    """
    if m < 1 or m > n:
        raise ValueError("need 1 <= m <= n")
    if n + 1 > xi.length:
        raise SizeLimitError("excess event needs xi stored through position n+1")
    if not xi.bits[n - m]:
        return False
    return not xi.bits[n + 1 - m : n + 1].any()


def bits_to_cycle_type(word: str) -> Partition:
    """Cycle type encoded by an n-character closing word (see module docstring)."""
    if not isinstance(word, str) or any(ch not in "01" for ch in word):
        raise ValueError("word must be a string of '0' and '1'")
    if word == "":
        return Partition(())
    if word[-1] != "1":
        raise ValueError("a closing word must end with '1'")
    parts: list[int] = []
    prev = 0
    for j, ch in enumerate(word, start=1):
        if ch == "1":
            parts.append(j - prev)
            prev = j
    parts.sort(reverse=True)
    return Partition(tuple(parts))


def cycle_type_to_bits(la: Partition) -> str:
    """Canonical closing word of a cycle type: parts laid out longest first."""
    chars = []
    for p in la.parts:
        chars.append("0" * (p - 1) + "1")
    return "".join(chars)


@dataclass(frozen=True)
class FellerSample:
    """One coupled draw: horizon counts C at n and limit counts Y, cross-checked."""

    xi: XiSequence
    n: int
    horizon_counts: CycleCounts
    limit_counts: TotalSpacings

    @staticmethod
    def build(xi: XiSequence, n: int, max_gap: int) -> "FellerSample":
        c = spacings(xi, n)
        y = total_spacings(xi, max_gap)
        for m in range(1, max_gap + 1):
            excess = c.get(m) - y.get(m)
            if excess > (1 if excess_event(xi, n, m) else 0):
                raise PermMomentsError(
                    f"coupling inequality violated at m = {m}: C = {c.get(m)}, Y = {y.get(m)}"
                )
        return FellerSample(xi, n, c, y)


def _f_values(f: CoeffGrid, x: complex, count: int) -> np.ndarray:
    """f(x^m) for m = 1..count (univariate grid)."""
    powers = complex(x) ** np.arange(1, count + 1)
    coeffs = f.b[:, 0]
    vals = np.zeros(count, dtype=np.complex128)
    for k in range(coeffs.size - 1, -1, -1):
        vals = vals * powers + coeffs[k]
    return vals


def _require_univariate(f: CoeffGrid) -> None:
    if not f.univariate:
        raise DomainError("the coupling samplers take a univariate coefficient grid")


def _check_strict_domain(f: CoeffGrid, x: complex) -> None:
    r = f.radii[0] if f.radii is not None else math.inf
    if abs(x) >= min(r, 1.0):
        raise DomainError(f"coupling samplers need |x| < min(r, 1); got |x| = {abs(x)}")


def _row_products(word: np.ndarray, gap_values: np.ndarray) -> np.ndarray:
    """prod over spacings of gap_values[gap - 1], one product per row of ``word``.

    Every row must contain at least two ones (guaranteed by the sentinels).
    """
    rows, cols = np.nonzero(word)
    same = rows[1:] == rows[:-1]
    gaps = cols[1:] - cols[:-1]
    vals = gap_values[gaps[same] - 1]
    row_ids = rows[1:][same]
    starts = np.flatnonzero(np.r_[True, row_ids[1:] != row_ids[:-1]])
    return np.multiply.reduceat(vals, starts)


def mc_expect_per_cycle(
    f: CoeffGrid, x: complex, n: int, trials: int, seed: int
) -> MCEstimate:
    """Monte Carlo mean of prod_m f(x^m)^(C_m) over coupled cycle counts at horizon n.

    Estimates the symmetric-group average of the per-cycle randomized class
    function with rotations already folded into f (pass the effective grid).
    """
    _require_univariate(f)
    _check_strict_domain(f, x)
    if n < 0:
        raise ValueError("n must be non-negative")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if n == 0:
        return MCEstimate(1.0 + 0.0j, 0.0, trials, seed)
    fvals = _f_values(f, x, n)
    probs = 1.0 / np.arange(2, n + 1)

    def one_chunk(idx: int, size: int) -> tuple[complex, float, int]:
        rng = substream(seed, idx)
        word = np.empty((size, n + 1), dtype=bool)
        word[:, 0] = True
        word[:, n] = True
        if n > 1:
            word[:, 1:n] = rng.random((size, n - 1)) < probs
        values = _row_products(word, fvals)
        return complex(values.sum()), float((np.abs(values) ** 2).sum()), size

    sums = map_chunks(one_chunk, trials)
    total = sum(s for s, _, _ in sums)
    total_sq = sum(q for _, q, _ in sums)
    count = sum(c for _, _, c in sums)
    mean = total / count
    var = max(total_sq / count - abs(mean) ** 2, 0.0)
    return MCEstimate(complex(mean), math.sqrt(var / count), count, seed)


def _walk_gaps(
    pos: np.ndarray, rng: np.random.Generator, horizon: int, on_gaps
) -> None:
    """Advance every walker to beyond ``horizon`` by exact inverse-CDF gap draws.

    ``on_gaps(row_idx, gaps)`` receives the closed gaps per iteration; gaps
    whose closing one lands beyond the horizon are discarded (the walk stops
    there).
    """
    active = np.flatnonzero(pos <= horizon)
    iterations = 0
    while active.size:
        iterations += 1
        if iterations > _MAX_WALK_ITER:
            raise PermMomentsError("gap walk failed to pass the horizon")
        u = 1.0 - rng.random(active.size)
        ratio = pos[active] / u
        nxt = np.where(ratio > horizon, horizon + 1, np.ceil(ratio)).astype(np.int64)
        nxt = np.maximum(nxt, pos[active] + 1)
        closed = nxt <= horizon
        if closed.any():
            on_gaps(active[closed], (nxt - pos[active])[closed])
        pos[active] = nxt
        active = active[closed]


def sample_limit_product(
    f: CoeffGrid, x: complex, length: int, seed: int
) -> tuple[complex, float]:
    """One draw of the limit variable prod_m f(x^m)^(Y_m), truncated at ``length``.

    Returns (draw, tail bound); the bound is the expected modulus of the
    missing log-factors beyond the stored horizon.  Requires f(0) = 1 and f
    free of zeros on the closed disk of radius |x| (checked numerically on a
    grid), since the limit product is built from logarithms of f.
    """
    value, bound = _limit_product_draws(f, x, 1, length, seed, 0)
    return complex(value[0]), bound


def _reject_zeros(f: CoeffGrid, x: complex) -> float:
    """Numeric nonvanishing check; returns max |f - 1| on the circle |z| = |x|."""
    if abs(complex(f.b[0, 0]) - 1.0) > 1e-9:
        raise DomainError("limit products need f(0) = 1")
    radius = abs(x)
    worst = 0.0
    for rr in np.linspace(0.0, radius, 17):
        z = rr * np.exp(2j * np.pi * np.arange(64) / 64)
        vals = _f_values_at(f, z)
        if np.min(np.abs(vals)) < 1e-9:
            raise DomainError("f vanishes inside the closed disk of radius |x|")
        if rr == radius:
            worst = float(np.max(np.abs(vals - 1.0)))
    return worst


def _f_values_at(f: CoeffGrid, z: np.ndarray) -> np.ndarray:
    coeffs = f.b[:, 0]
    vals = np.zeros_like(z, dtype=np.complex128)
    for k in range(coeffs.size - 1, -1, -1):
        vals = vals * z + coeffs[k]
    return vals


def _limit_product_draws(
    f: CoeffGrid, x: complex, draws: int, horizon: int, seed: int, stream: int
) -> tuple[np.ndarray, float]:
    _require_univariate(f)
    _check_strict_domain(f, x)
    if horizon < 4:
        raise ValueError("horizon too short")
    deviation = _reject_zeros(f, x)
    ax = abs(x)
    # Gaps longer than gap_cap multiply by f(x^gap) = 1 + O(1e-17); skip them.
    if ax == 0:
        gap_cap = 1
    else:
        gap_cap = min(horizon, max(8, int(math.ceil(math.log(1e-17) / math.log(ax)))))
    fvals = _f_values(f, x, gap_cap)

    values = np.ones(draws, dtype=np.complex128)
    pos = np.ones(draws, dtype=np.int64)
    rng = substream(seed, stream)

    def on_gaps(rows: np.ndarray, gaps: np.ndarray) -> None:
        small = gaps <= gap_cap
        if small.any():
            values[rows[small]] *= fvals[gaps[small] - 1]

    _walk_gaps(pos, rng, horizon, on_gaps)
    # Missing spacings live wholly beyond the horizon: expected count <= 1/L
    # per gap length, each contributing |log f(x^m)| <= 2 (M1/|x|) |x|^m.
    if ax > 0:
        tail = 2.0 * (deviation / ax) * ax / (1.0 - ax) / horizon
    else:
        tail = 0.0
    return values, tail


def mc_limit_product_mean(
    f: CoeffGrid,
    x: complex,
    draws: int,
    seed: int,
    horizon: int = DEFAULT_HORIZON,
) -> MCEstimate:
    """Mean over independent draws of the limit product, with standard error."""
    if draws < 1:
        raise ValueError("draws must be >= 1")

    def one_chunk(idx: int, size: int) -> tuple[complex, float, int, float]:
        vals, tail = _limit_product_draws(f, x, size, horizon, seed, idx)
        return complex(vals.sum()), float((np.abs(vals) ** 2).sum()), size, tail

    parts = map_chunks(one_chunk, draws)
    total = sum(p[0] for p in parts)
    total_sq = sum(p[1] for p in parts)
    count = sum(p[2] for p in parts)
    tail = max(p[3] for p in parts)
    mean = total / count
    var = max(total_sq / count - abs(mean) ** 2, 0.0)
    return MCEstimate(
        complex(mean), math.sqrt(var / count), count, seed, sequence_length=horizon, tail_bound=tail
    )


@dataclass(frozen=True)
class CouplingStats:
    """Empirical coupling diagnostics at horizon n for gap lengths 1..m_max."""

    n: int
    m_max: int
    samples: int
    mean_abs_diff: np.ndarray
    stderr_abs_diff: np.ndarray
    mismatch_prob: float
    theoretical_bound: float


def coupling_stats(
    n: int,
    m_max: int,
    samples: int,
    seed: int,
    horizon: int = DEFAULT_HORIZON,
) -> CouplingStats:
    """Sample E|C_m - Y_m| for m <= m_max, asserting the pathwise coupling bound.

    Every path is checked for C_m <= Y_m + 1 with excess exactly on the
    boundary event, and for sum_m m C_m = n.
    """
    if m_max < 1 or m_max > n:
        raise ValueError("need 1 <= m_max <= n")
    if samples < 1:
        raise ValueError("samples must be >= 1")

    def one_chunk(idx: int, size: int):
        rng = substream(seed, idx)
        bits = rng.random((size, n + 1)) < 1.0 / np.arange(1, n + 2)
        bits[:, 0] = True

        word_c = bits.copy()
        word_c[:, n] = True
        c_counts = _count_small_gaps(word_c, m_max)
        gap_total = _gap_length_sum(word_c)
        if not np.all(gap_total == n):
            raise PermMomentsError("spacing lengths of a horizon word must sum to n")

        y_counts = _count_small_gaps(bits, m_max)
        last_pos = n + 1 - np.argmax(bits[:, ::-1], axis=1)  # 1-based position of last one
        pos = np.full(size, n + 1, dtype=np.int64)
        origin = last_pos.astype(np.int64)
        first_step = np.ones(size, dtype=bool)

        def on_gaps(rows: np.ndarray, nxt_minus_pos: np.ndarray) -> None:
            # The first closed gap per row runs from the last stored one, not
            # from the conditioning position n+1.
            gaps = nxt_minus_pos.astype(np.int64)
            adjust = first_step[rows]
            gaps = gaps + np.where(adjust, pos[rows] - origin[rows], 0)
            first_step[rows] = False
            small = gaps <= m_max
            if small.any():
                idx2 = rows[small] * m_max + (gaps[small] - 1)
                np.add.at(y_counts.reshape(-1), idx2, 1)

        _walk_gaps(pos, substream(seed, idx, 1), horizon, on_gaps)

        excess = c_counts - y_counts
        for m in range(1, m_max + 1):
            b_event = bits[:, n - m] & ~bits[:, n + 1 - m : n + 1].any(axis=1)
            if np.any(excess[:, m - 1] > b_event.astype(np.int64)):
                raise PermMomentsError(f"pathwise coupling inequality violated at m = {m}")
        diff = np.abs(c_counts - y_counts).astype(float)
        mismatch = np.any(c_counts != y_counts, axis=1)
        return diff.sum(axis=0), (diff**2).sum(axis=0), mismatch.sum(), size

    parts = map_chunks(one_chunk, samples)
    sums = np.sum([p[0] for p in parts], axis=0)
    sq_sums = np.sum([p[1] for p in parts], axis=0)
    mismatches = sum(p[2] for p in parts)
    count = sum(p[3] for p in parts)
    mean = sums / count
    var = np.maximum(sq_sums / count - mean**2, 0.0)
    return CouplingStats(
        n=n,
        m_max=m_max,
        samples=count,
        mean_abs_diff=mean,
        stderr_abs_diff=np.sqrt(var / count),
        mismatch_prob=mismatches / count,
        theoretical_bound=2.0 / (n + 1),
    )


def _count_small_gaps(word: np.ndarray, m_max: int) -> np.ndarray:
    rows, cols = np.nonzero(word)
    same = rows[1:] == rows[:-1]
    gaps = cols[1:] - cols[:-1]
    small = same & (gaps <= m_max)
    idx = rows[1:][small] * m_max + (gaps[small] - 1)
    return np.bincount(idx, minlength=word.shape[0] * m_max).reshape(word.shape[0], m_max)


def _gap_length_sum(word: np.ndarray) -> np.ndarray:
    rows, cols = np.nonzero(word)
    same = rows[1:] == rows[:-1]
    gaps = cols[1:] - cols[:-1]
    idx = rows[1:][same]
    return np.bincount(idx, weights=gaps[same], minlength=word.shape[0]).astype(np.int64)


def empirical_cycle_type_law(n: int, samples: int, seed: int) -> dict[Partition, float]:
    """Empirical law of the cycle type read off the coupled word at horizon n.

    Words are packed into integers and tabulated, so the cost is one bincount;
    capped at n <= 16 (2^(n-1) distinct words).
    """
    if n < 1 or n > 16:
        raise SizeLimitError("empirical cycle-type law capped at 1 <= n <= 16")
    rng = substream(seed, 0)
    free = n - 1  # xi_2 .. xi_n
    weights = 1 << np.arange(free)
    counts = np.zeros(1 << free, dtype=np.int64)
    for start in range(0, samples, 1 << 18):
        size = min(1 << 18, samples - start)
        bits = rng.random((size, free)) < 1.0 / np.arange(2, n + 1)
        codes = bits.astype(np.int64) @ weights
        counts += np.bincount(codes, minlength=1 << free)
    law: dict[Partition, float] = {}
    for code in range(1 << free):
        if counts[code] == 0:
            continue
        inner = "".join("1" if code & (1 << j) else "0" for j in range(free))
        la = bits_to_cycle_type(inner + "1")
        law[la] = law.get(la, 0.0) + counts[code] / samples
    return law
