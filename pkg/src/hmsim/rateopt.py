"""Rate-region optimization for receiver pairs and populations.

For two receivers, every transmission configuration yields a spectrum
efficiency pair (R1, R2): non-hierarchical modcods give (R1, 0) or (0, R2),
hierarchical ones serve both receivers at once. Time sharing achieves any
convex combination of available pairs, so the relevant object is the convex
hull of the achievable set, and the fairness objective used throughout is
the equal-rate point: the largest R with (R, R) inside the hull.

Populations are served by grouping receivers into max-SNR-spread pairs and
equalizing across groups with time sharing, which composes rates
harmonically. A receiver that decodes nothing contributes rate 0 and pins
the harmonic aggregate at 0; callers that want to serve a degraded
population must filter such receivers out first (the campaign engine does,
and reports how many it dropped).
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Optional, Sequence

from .modcod import ModcodChoice, Stream, ThresholdTable, best_single_modcod

__all__ = [
    "RatePair",
    "TimeShare",
    "EqualRateSolution",
    "PairSolution",
    "achievable_pairs",
    "rate_region_hull",
    "equal_rate_point",
    "classical_pair_rate",
    "pair_solution",
    "group_receivers",
    "aggregate_hm",
    "aggregate_ts",
    "system_gain",
    "system_summary",
    "SystemSummary",
]


@dataclass(frozen=True)
class RatePair:
    """An achievable (R1, R2) spectrum-efficiency point, R1 for the first
    (weaker) receiver of the pair. ``provenance`` names the configuration
    that produced it: a ModcodChoice per receiver, or None for silence."""

    r1: float
    r2: float
    provenance: tuple[Optional[ModcodChoice], Optional[ModcodChoice]] = (None, None)

    def __post_init__(self):
        if self.r1 < 0 or self.r2 < 0:
            raise ValueError("rates must be nonnegative")

    def describe(self) -> str:
        p1, p2 = self.provenance
        def side(p):
            return str(p) if p is not None else "-"
        return f"({self.r1:.4g}, {self.r2:.4g}) via [{side(p1)} | {side(p2)}]"


@dataclass(frozen=True)
class TimeShare:
    """Serve point_a for a fraction tau of the time and point_b for the
    rest. A degenerate schedule uses tau = 1 with point_a == point_b."""

    tau: float
    point_a: RatePair
    point_b: RatePair

    def __post_init__(self):
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau must be in [0, 1], got {self.tau}")


@dataclass(frozen=True)
class EqualRateSolution:
    rate: float
    schedule: tuple[TimeShare, ...]


@dataclass(frozen=True)
class PairSolution:
    """Equal-rate value of a pair with and without hierarchical points."""

    r_hm: float
    r_ts: float
    schedule: tuple[TimeShare, ...]

    def __post_init__(self):
        if not self.r_hm >= self.r_ts >= 0.0:
            raise ValueError(f"require r_hm >= r_ts >= 0, got {self.r_hm} < {self.r_ts}")

    @property
    def gain(self) -> float:
        if self.r_ts == 0.0:
            return 0.0 if self.r_hm == 0.0 else float("inf")
        return (self.r_hm - self.r_ts) / self.r_ts


_ORIGIN = RatePair(0.0, 0.0)


def achievable_pairs(
    snr_weak: float,
    snr_strong: float,
    table: ThresholdTable,
    prune: bool = True,
) -> list[RatePair]:
    """Achievable (R1, R2) points for a receiver pair.

    Always contains (0, 0) plus the best single-modcod points (R_weak, 0)
    and (0, R_strong) when decodable. For every hierarchical scheme both
    stream assignments are enumerated: weak receiver on HE with the strong
    one on LE, and vice versa.

    With ``prune`` (the default) only the per-assignment dominant point is
    kept: rate combinations below the best decodable HE and LE rates are
    coordinate-wise dominated by it. ``prune=False`` enumerates every
    decodable (rate_he, rate_le) combination. Whenever both receivers can
    decode some single modcod, the single points anchor the hull and
    pruning provably leaves it unchanged (the shipped tables keep every
    stream efficiency at or below the same-SNR single efficiency, which is
    the condition the anchoring needs). Without those anchors, dominated
    grid points can widen the hull, so outage-regime analyses should pass
    ``prune=False``.
    """
    if snr_weak > snr_strong:
        raise ValueError("snr_weak must not exceed snr_strong")
    points: list[RatePair] = [_ORIGIN]

    weak_single = best_single_modcod(snr_weak, table)
    strong_single = best_single_modcod(snr_strong, table)
    if weak_single is not None:
        points.append(RatePair(weak_single.spectral_efficiency, 0.0, (weak_single, None)))
    if strong_single is not None:
        points.append(RatePair(0.0, strong_single.spectral_efficiency, (None, strong_single)))

    if prune:
        for scheme, he_side, le_side in table.hierarchical_stream_index():
            if he_side is None or le_side is None:
                continue
            he_thr, he_eff, he_choice = he_side
            le_thr, le_eff, le_choice = le_side
            for snr_he, snr_le, he_first in (
                (snr_weak, snr_strong, True),
                (snr_strong, snr_weak, False),
            ):
                kh = bisect_right(he_thr, snr_he)
                if not kh:
                    continue
                kl = bisect_right(le_thr, snr_le)
                if not kl:
                    continue
                he, le = he_choice[kh - 1], le_choice[kl - 1]
                ehe, ele = he_eff[kh - 1], le_eff[kl - 1]
                if he_first:
                    points.append(RatePair(ehe, ele, (he, le)))
                else:
                    points.append(RatePair(ele, ehe, (le, he)))
        return points

    for scheme in table.hierarchical_schemes():
        entries = table.entries()
        for snr_he, snr_le, he_first in (
            (snr_weak, snr_strong, True),
            (snr_strong, snr_weak, False),
        ):
            he_all = [
                ModcodChoice(scheme, Stream.HE, rate)
                for (s, stream, rate), thr in entries.items()
                if s == scheme and stream is Stream.HE and thr <= snr_he
            ]
            le_all = [
                ModcodChoice(scheme, Stream.LE, rate)
                for (s, stream, rate), thr in entries.items()
                if s == scheme and stream is Stream.LE and thr <= snr_le
            ]
            for he in he_all:
                for le in le_all:
                    if he_first:
                        points.append(RatePair(he.spectral_efficiency, le.spectral_efficiency, (he, le)))
                    else:
                        points.append(RatePair(le.spectral_efficiency, he.spectral_efficiency, (le, he)))
    return points


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull_vertices(coords: list[tuple[float, float, int]]) -> list[tuple[float, float, int]]:
    """Convex hull (monotone chain) of (x, y, tag) triples, counterclockwise."""
    pts = sorted(set(coords), key=lambda p: (p[0], p[1]))
    if len(pts) <= 2:
        return pts
    lower: list[tuple[float, float, int]] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float, int]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def rate_region_hull(pairs: Sequence[RatePair]) -> list[RatePair]:
    """Vertices of the convex hull of the achievable set, in boundary order
    (for plotting and inspection)."""
    coords = [(p.r1, p.r2, i) for i, p in enumerate(pairs)]
    return [_ORIGIN if tag < 0 else pairs[tag] for _, _, tag in _hull_vertices(coords)]


def equal_rate_point(pairs: Sequence[RatePair]) -> EqualRateSolution:
    """Largest R with (R, R) in the convex hull of the given points.

    The maximizer lies where the diagonal leaves the hull, i.e. on a hull
    edge or vertex, so it is found by intersecting the diagonal with every
    hull edge. The schedule mixes the two endpoints of the crossed edge; if
    the diagonal exits exactly at a vertex, that single point is reported
    with tau = 1.
    """
    if not pairs:
        raise ValueError("need at least one rate pair")
    coords = [(p.r1, p.r2, i) for i, p in enumerate(pairs)]
    if all(p.r1 != 0.0 or p.r2 != 0.0 for p in pairs):
        coords.append((0.0, 0.0, -1))
    hull = _hull_vertices(coords)

    def pair_at(tag: int) -> RatePair:
        return _ORIGIN if tag < 0 else pairs[tag]

    best_rate = 0.0
    best_schedule: tuple[TimeShare, ...] = ()
    m = len(hull)
    for i in range(m):
        x1, y1, tag1 = hull[i]
        x2, y2, tag2 = hull[(i + 1) % m] if m > 1 else hull[i]
        d1, d2 = x1 - y1, x2 - y2
        if d1 == 0.0 and x1 >= best_rate:
            best_rate = x1
            best_schedule = (TimeShare(1.0, pair_at(tag1), pair_at(tag1)),)
        if m > 1 and (d1 < 0.0) != (d2 < 0.0):
            tau = d2 / (d2 - d1)
            rate = tau * x1 + (1.0 - tau) * x2
            if rate > best_rate:
                best_rate = rate
                best_schedule = (TimeShare(tau, pair_at(tag1), pair_at(tag2)),)
    # Tie rule: when some achievable point sits exactly at the optimum,
    # serve it full time instead of mixing two others.
    for p in pairs:
        if p.r1 == p.r2 == best_rate:
            best_schedule = (TimeShare(1.0, p, p),)
            break
    if not best_schedule:
        best_schedule = (TimeShare(1.0, _ORIGIN, _ORIGIN),)
    return EqualRateSolution(rate=best_rate, schedule=best_schedule)


def classical_pair_rate(r_weak: float, r_strong: float) -> float:
    """Equal rate offered to two receivers by pure time sharing of their
    individual best modcods: the harmonic combination (1/r1 + 1/r2)^-1,
    zero as soon as either receiver decodes nothing."""
    if r_weak < 0 or r_strong < 0:
        raise ValueError("rates must be nonnegative")
    if r_weak == 0.0 or r_strong == 0.0:
        return 0.0
    return 1.0 / (1.0 / r_weak + 1.0 / r_strong)


def pair_solution(snr_weak: float, snr_strong: float, table: ThresholdTable) -> PairSolution:
    """Solve one receiver pair: hierarchical equal-rate value vs the
    classical time-sharing baseline."""
    weak = best_single_modcod(snr_weak, table)
    strong = best_single_modcod(snr_strong, table)
    r_ts = classical_pair_rate(
        weak.spectral_efficiency if weak else 0.0,
        strong.spectral_efficiency if strong else 0.0,
    )
    solution = equal_rate_point(achievable_pairs(snr_weak, snr_strong, table))
    # The classical mix of the two single points is in the hull, so
    # r_hm >= r_ts holds mathematically. Achievable rates are small-denominator
    # rationals, so a genuine hierarchical improvement is never below ~1e-6
    # relative; anything within 1e-9 of r_ts is roundoff between the
    # hull-crossing and harmonic-mean expressions and snaps to equality.
    r_hm = solution.rate
    if r_hm <= r_ts * (1.0 + 1e-9):
        r_hm = r_ts
    return PairSolution(r_hm=r_hm, r_ts=r_ts, schedule=solution.schedule)


def group_receivers(snrs: Sequence[float]) -> list[tuple[int, int]]:
    """Pair receivers by repeatedly grouping the current extremes.

    Sorting by SNR and matching minimum against maximum realizes the
    pick-the-largest-SNR-difference rule. Returns index pairs as
    (weaker, stronger); with an odd count the median receiver is left out
    of every pair. Ties sort by original index, keeping the result a pure
    function of the SNR multiset.
    """
    order = sorted(range(len(snrs)), key=lambda i: (snrs[i], i))
    pairs = []
    lo, hi = 0, len(order) - 1
    while lo < hi:
        pairs.append((order[lo], order[hi]))
        lo += 1
        hi -= 1
    return pairs


def _harmonic(rates: Sequence[float]) -> float:
    if not rates:
        raise ValueError("need at least one rate")
    total = 0.0
    for r in rates:
        if r < 0:
            raise ValueError("rates must be nonnegative")
        if r == 0.0:
            return 0.0
        total += 1.0 / r
    return 1.0 / total


def aggregate_hm(pair_rates: Sequence[float]) -> float:
    """Population rate from per-pair equal rates, composed harmonically by
    time sharing across pairs."""
    return _harmonic(pair_rates)


def aggregate_ts(rates: Sequence[float]) -> float:
    """Classical time-sharing rate over individual receivers."""
    return _harmonic(rates)


@dataclass(frozen=True)
class SystemSummary:
    r_hm: float
    r_ts: float
    gain: float
    pairs: tuple[tuple[int, int, PairSolution], ...]
    unpaired: Optional[int]
    outage_count: int


def system_summary(snrs: Sequence[float], table: ThresholdTable) -> SystemSummary:
    """Full breakdown of hierarchical vs classical time sharing for a
    receiver population. Outage receivers (no decodable single modcod)
    force both aggregates to 0; ``outage_count`` reports how many there
    were so callers can filter and retry."""
    if not snrs:
        raise ValueError("need at least one receiver")
    singles = [best_single_modcod(s, table) for s in snrs]
    single_rates = [c.spectral_efficiency if c else 0.0 for c in singles]
    outage = sum(1 for c in singles if c is None)

    pairs = group_receivers(snrs)
    paired = {i for ij in pairs for i in ij}
    unpaired = next((i for i in range(len(snrs)) if i not in paired), None)

    # Both harmonic sums are accumulated in pair-traversal order, and a pair
    # without hierarchical benefit contributes the very same reciprocal terms
    # to both, so "no gain anywhere" yields r_hm == r_ts bit for bit.
    solved: list[tuple[int, int, PairSolution]] = []
    ts_inv = 0.0
    hm_inv = 0.0
    ts_dead = False  # a zero rate pins the corresponding aggregate at 0
    hm_dead = False
    for i, j in pairs:
        sol = pair_solution(snrs[i], snrs[j], table)
        solved.append((i, j, sol))
        if single_rates[i] == 0.0 or single_rates[j] == 0.0:
            ts_dead = True
        else:
            ts_inv += 1.0 / single_rates[i] + 1.0 / single_rates[j]
        if sol.r_hm == 0.0:
            hm_dead = True
        elif sol.r_hm == sol.r_ts:
            # no hierarchical benefit; r_ts > 0 implies both singles decode
            hm_inv += 1.0 / single_rates[i] + 1.0 / single_rates[j]
        else:
            hm_inv += 1.0 / sol.r_hm
    if unpaired is not None:
        rate_u = single_rates[unpaired]
        if rate_u == 0.0:
            ts_dead = hm_dead = True
        else:
            ts_inv += 1.0 / rate_u
            hm_inv += 1.0 / rate_u

    r_ts = 0.0 if ts_dead else 1.0 / ts_inv
    r_hm = 0.0 if hm_dead else 1.0 / hm_inv
    if not hm_dead and not ts_dead:
        r_hm = max(r_hm, r_ts)

    if r_ts == 0.0:
        gain = 0.0 if r_hm == 0.0 else float("inf")
    else:
        gain = (r_hm - r_ts) / r_ts
    return SystemSummary(
        r_hm=r_hm,
        r_ts=r_ts,
        gain=gain,
        pairs=tuple(solved),
        unpaired=unpaired,
        outage_count=outage,
    )


def system_gain(snrs: Sequence[float], table: ThresholdTable) -> float:
    """Relative spectrum-efficiency gain (R_hm - R_ts) / R_ts of
    hierarchical-modulation time sharing over the classical baseline.

    Returns 0 when both aggregates are 0 (and +inf in the corner case
    where a hierarchical-only hull still crosses the diagonal while the
    baseline is 0). Finite-gain comparisons require an outage-free
    population; that is what the campaign engine feeds in.
    """
    return system_summary(snrs, table).gain
