"""Decoding-threshold tables and modcod selection.

A threshold table maps (scheme, stream, code rate) to the minimum SNR in dB
at which that stream decodes. Tables are loaded from CSV files with the
schema

    family,rho_he,stream,code_rate,threshold_db

where ``family`` is one of the tokens below, ``rho_he`` is empty for
non-hierarchical rows, ``stream`` is HE, LE, SINGLE or the merged token
HE/LE (one row expanded to identical HE and LE entries), and ``code_rate``
is an exact rational ``p/q``. Thresholds are step functions of SNR: a
stream decodes iff SNR >= threshold (inclusive).

The shipped files live in ``hmsim/data``; see the package README for their
provenance and the known-anomalies manifest.
"""

from __future__ import annotations

import csv
import io
import math
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

__all__ = [
    "Stream",
    "Family",
    "SchemeId",
    "ModcodChoice",
    "ThresholdTable",
    "ValidationIssue",
    "TableParseError",
    "TableValidationError",
    "DVBS2_CODE_RATES",
    "load_threshold_csv",
    "load_anomaly_manifest",
    "serialize_threshold_csv",
    "stream_efficiency",
    "best_single_modcod",
    "signaling_bits",
    "packaged_data_path",
]

# The 11 LDPC code rates of DVB-S2 (normal FEC frames).
DVBS2_CODE_RATES = tuple(
    Fraction(p, q)
    for p, q in [(1, 4), (1, 3), (2, 5), (1, 2), (3, 5), (2, 3), (3, 4), (4, 5), (5, 6), (8, 9), (9, 10)]
)


class Stream(Enum):
    HE = "HE"
    LE = "LE"
    SINGLE = "SINGLE"


class Family(Enum):
    """Modulation family. ``bits`` is (he_bits, le_bits); non-hierarchical
    families put their total bits per symbol in the HE slot."""

    QPSK = ("qpsk", 2, 0)
    PSK8 = ("psk8", 3, 0)
    APSK16 = ("apsk16", 4, 0)
    APSK32 = ("apsk32", 5, 0)
    H_QPSK = ("h_qpsk", 1, 1)
    H_PSK8 = ("h_psk8", 2, 1)
    H_APSK16 = ("h_apsk16", 2, 2)
    H_APSK32 = ("h_apsk32", 2, 3)

    def __init__(self, token: str, bits_he: int, bits_le: int):
        self.token = token
        self.default_bits_he = bits_he
        self.default_bits_le = bits_le

    @property
    def hierarchical(self) -> bool:
        return self.default_bits_le > 0

    @classmethod
    def from_token(cls, token: str) -> "Family":
        for fam in cls:
            if fam.token == token:
                return fam
        raise ValueError(f"unknown modulation family {token!r}")


@dataclass(frozen=True)
class SchemeId:
    """A concrete modulation scheme: a family plus, for hierarchical
    families, its energy split rho_he. Bit widths default from the family
    but may be overridden to model synthetic schemes in analysis code."""

    family: Family
    rho_he: Optional[float] = None
    bits_he: int = 0
    bits_le: int = 0

    def __post_init__(self):
        if self.bits_he == 0:
            object.__setattr__(self, "bits_he", self.family.default_bits_he)
            object.__setattr__(self, "bits_le", self.family.default_bits_le)
        hierarchical = self.rho_he is not None
        if hierarchical != (self.bits_le > 0):
            raise ValueError("rho_he must be present iff the scheme has LE bits")
        if self.family.hierarchical != hierarchical:
            raise ValueError(f"family {self.family.token} requires rho_he={'set' if self.family.hierarchical else 'absent'}")
        if hierarchical and not 0.5 <= self.rho_he <= 0.9:
            raise ValueError(f"rho_he must be in [0.5, 0.9], got {self.rho_he}")

    def bits(self, stream: Stream) -> int:
        if stream is Stream.SINGLE:
            if self.rho_he is not None:
                raise ValueError(f"{self.token} is hierarchical; stream SINGLE does not apply")
            return self.bits_he
        if self.rho_he is None:
            raise ValueError(f"{self.token} is non-hierarchical; stream {stream.value} does not apply")
        return self.bits_he if stream is Stream.HE else self.bits_le

    @property
    def token(self) -> str:
        if self.rho_he is None:
            return self.family.token
        return f"{self.family.token}[rho={self.rho_he:g}]"

    def sort_key(self):
        return (self.family.token, -1.0 if self.rho_he is None else self.rho_he)


@dataclass(frozen=True)
class ModcodChoice:
    scheme: SchemeId
    stream: Stream
    code_rate: Fraction

    @property
    def efficiency_fraction(self) -> Fraction:
        """Exact spectrum efficiency, bits x code rate. Orderings and tie
        breaks use this; float(...) of it only leaves for numeric work."""
        return self.scheme.bits(self.stream) * self.code_rate

    @property
    def spectral_efficiency(self) -> float:
        return float(self.efficiency_fraction)

    def __str__(self) -> str:
        return f"{self.scheme.token}/{self.stream.value} {self.code_rate} ({self.spectral_efficiency:.4g} bit/s/Hz)"


@dataclass(frozen=True)
class ValidationIssue:
    severity: str  # "error" or "warning"
    message: str
    known_anomaly: bool = False

    def __str__(self) -> str:
        tag = " [known anomaly]" if self.known_anomaly else ""
        return f"{self.severity.upper()}: {self.message}{tag}"


class TableParseError(ValueError):
    """Malformed threshold CSV; carries the offending line number."""


class TableValidationError(ValueError):
    """Structurally valid CSV whose contents violate a table invariant."""


AnomalyKey = tuple[str, Optional[float], str, Fraction]


def packaged_data_path(name: str) -> Path:
    """Path of a data file shipped inside the package."""
    return Path(resources.files("hmsim").joinpath("data", name))


def load_anomaly_manifest(path: Union[str, Path, None] = None) -> dict[AnomalyKey, str]:
    """Load the known-anomalies manifest (default: the shipped one).

    Each row names a table cell whose printed value is preserved verbatim
    even though it breaks an expected monotonic pattern. Keys are
    (family token, rho_he, stream, code rate).
    """
    if path is None:
        path = packaged_data_path("known_anomalies.csv")
    manifest: dict[AnomalyKey, str] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rho = float(row["rho_he"]) if row["rho_he"] else None
            key = (row["family"], rho, row["stream"], Fraction(row["code_rate"]))
            manifest[key] = row["note"]
    return manifest


def _parse_rate(text: str, line_no: int) -> Fraction:
    try:
        rate = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise TableParseError(f"line {line_no}: bad code_rate {text!r}: {exc}") from None
    if rate not in DVBS2_CODE_RATES:
        raise TableValidationError(f"line {line_no}: code rate {text} is not a DVB-S2 rate")
    return rate


class ThresholdTable:
    """Immutable map (scheme, stream, code rate) -> decoding threshold in dB.

    Query helpers are precomputed at construction; instances are safe to
    share across threads and processes.
    """

    def __init__(
        self,
        entries: Mapping[tuple[SchemeId, Stream, Fraction], float],
        warnings: Sequence[ValidationIssue] = (),
    ):
        self._entries = dict(entries)
        self.warnings = tuple(warnings)
        self._index: dict[tuple[SchemeId, Stream], tuple[list[float], list[float], list[ModcodChoice]]] = {}
        self._build_index()

    def _build_index(self):
        grouped: dict[tuple[SchemeId, Stream], list[tuple[float, Fraction]]] = {}
        for (scheme, stream, rate), thr in self._entries.items():
            grouped.setdefault((scheme, stream), []).append((thr, rate))
        for key, rows in grouped.items():
            scheme, stream = key
            rows.sort()
            thresholds: list[float] = []
            best_eff: list[float] = []
            best_choice: list[ModcodChoice] = []
            cur_eff = Fraction(-1)
            cur_choice: Optional[ModcodChoice] = None
            for thr, rate in rows:
                choice = ModcodChoice(scheme, stream, rate)
                if choice.efficiency_fraction > cur_eff:
                    cur_eff = choice.efficiency_fraction
                    cur_choice = choice
                thresholds.append(thr)
                best_eff.append(float(cur_eff))
                best_choice.append(cur_choice)
            self._index[key] = (thresholds, best_eff, best_choice)

        self._schemes_cache = sorted({k[0] for k in self._index}, key=SchemeId.sort_key)
        self._hier_cache = [s for s in self._schemes_cache if s.rho_he is not None]
        # Hot-path structures: hierarchical per-scheme (HE, LE) prefix tables
        # and one merged single-stream table, so modcod selection is a single
        # bisect with no dict lookups.
        self._hier_lookup = [
            (s, self._index.get((s, Stream.HE)), self._index.get((s, Stream.LE)))
            for s in self._hier_cache
        ]
        singles: list[tuple[float, str, Fraction, ModcodChoice]] = []
        for (scheme, stream, rate), thr in self._entries.items():
            if stream is Stream.SINGLE:
                singles.append((thr, scheme.token, rate, ModcodChoice(scheme, stream, rate)))
        singles.sort(key=lambda row: (row[0], row[1], row[2]))
        thr_list: list[float] = []
        choice_list: list[ModcodChoice] = []
        eff_list: list[float] = []
        cur_eff, cur_choice = Fraction(-1), None
        for thr, _, _, choice in singles:
            if choice.efficiency_fraction > cur_eff:
                cur_eff = choice.efficiency_fraction
                cur_choice = choice
            thr_list.append(thr)
            choice_list.append(cur_choice)
            eff_list.append(float(cur_eff))
        self._single_lookup = (thr_list, eff_list, choice_list)

    # -- basic container surface -------------------------------------------------

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key) -> bool:
        return key in self._entries

    def threshold(self, scheme: SchemeId, stream: Stream, rate: Fraction) -> float:
        return self._entries[(scheme, stream, rate)]

    def entries(self) -> dict[tuple[SchemeId, Stream, Fraction], float]:
        return dict(self._entries)

    def schemes(self) -> list[SchemeId]:
        return list(self._schemes_cache)

    def hierarchical_schemes(self) -> list[SchemeId]:
        return list(self._hier_cache)

    def families(self) -> list[Family]:
        return sorted({s.family for s in self.schemes()}, key=lambda f: f.token)

    def has_single_entries(self) -> bool:
        return any(stream is Stream.SINGLE for (_, stream, _) in self._entries)

    def subset(self, families: Iterable[Family]) -> "ThresholdTable":
        """Table restricted to the given families (warnings not re-derived)."""
        keep = set(families)
        sub = {k: v for k, v in self._entries.items() if k[0].family in keep}
        return ThresholdTable(sub, warnings=())

    def merged_with(self, other: "ThresholdTable") -> "ThresholdTable":
        entries = dict(self._entries)
        for key, thr in other._entries.items():
            if key in entries and entries[key] != thr:
                raise TableValidationError(f"conflicting thresholds for {key[0].token}/{key[1].value} {key[2]}")
            entries[key] = thr
        return ThresholdTable(entries, warnings=tuple(self.warnings) + tuple(other.warnings))

    # -- queries -------------------------------------------------------------------

    def hierarchical_stream_index(self):
        """Per-hierarchical-scheme (scheme, HE, LE) prefix tables, where each
        side is (thresholds, best_efficiencies, best_choices) sorted by
        threshold, or None if that stream has no entries. Query with one
        bisect per side; used by the pair enumeration hot path."""
        return self._hier_lookup

    def best_stream_choice(self, scheme: SchemeId, stream: Stream, snr_db: float) -> Optional[ModcodChoice]:
        """Highest-efficiency rate of one (scheme, stream) decodable at snr_db."""
        index = self._index.get((scheme, stream))
        if index is None:
            return None
        thresholds, _, best_choice = index
        k = bisect_right(thresholds, snr_db)
        return best_choice[k - 1] if k else None

    def best_stream_efficiency(self, scheme: SchemeId, stream: Stream, snr_db: float) -> float:
        index = self._index.get((scheme, stream))
        if index is None:
            return 0.0
        thresholds, best_eff, _ = index
        k = bisect_right(thresholds, snr_db)
        return best_eff[k - 1] if k else 0.0

    def best_single(self, snr_db: float) -> Optional[ModcodChoice]:
        """Best non-hierarchical modcod decodable at snr_db (one bisect)."""
        thresholds, _, choices = self._single_lookup
        k = bisect_right(thresholds, snr_db)
        return choices[k - 1] if k else None

    def best(self, snr_db: float, streams: Sequence[Stream] = (Stream.SINGLE,)) -> Optional[ModcodChoice]:
        """Best decodable modcod at snr_db over the given stream kinds.

        Maximizes spectral efficiency; ties go to the lowest threshold, then
        the lexicographically smallest scheme token (deterministic).
        """
        best_key = None
        best_choice = None
        for (scheme, stream), (thresholds, _, choices) in self._index.items():
            if stream not in streams:
                continue
            k = bisect_right(thresholds, snr_db)
            if not k:
                continue
            choice = choices[k - 1]
            thr = self._entries[(scheme, stream, choice.code_rate)]
            key = (-choice.efficiency_fraction, thr, scheme.token, stream.value, choice.code_rate)
            if best_key is None or key < best_key:
                best_key = key
                best_choice = choice
        return best_choice

    # -- validation ------------------------------------------------------------------

    def validate(self, anomalies: Optional[Mapping[AnomalyKey, str]] = None) -> list[ValidationIssue]:
        """Check monotonicity invariants.

        Thresholds must be strictly increasing in code rate for each
        (scheme, stream); violations are errors unless the cell appears in
        the known-anomalies manifest. Across schemes of one hierarchical
        family at a fixed rate, HE thresholds should fall and LE thresholds
        rise with rho_he; violations of that pattern are warnings only.
        """
        anomalies = anomalies or {}
        issues: list[ValidationIssue] = []

        by_column: dict[tuple[SchemeId, Stream], list[tuple[Fraction, float]]] = {}
        for (scheme, stream, rate), thr in self._entries.items():
            by_column.setdefault((scheme, stream), []).append((rate, thr))
        for (scheme, stream), cells in sorted(
            by_column.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1].value)
        ):
            by_rate = sorted(cells)
            for (r_a, t_a), (r_b, t_b) in zip(by_rate, by_rate[1:]):
                if t_b <= t_a:
                    key = (scheme.family.token, scheme.rho_he, stream.value, r_b)
                    known = key in anomalies
                    issues.append(
                        ValidationIssue(
                            severity="warning" if known else "error",
                            message=(
                                f"{scheme.token}/{stream.value}: threshold not increasing "
                                f"in code rate at {r_b} ({t_a} dB -> {t_b} dB)"
                            ),
                            known_anomaly=known,
                        )
                    )

        by_family: dict[Family, list[SchemeId]] = {}
        for scheme in self.hierarchical_schemes():
            by_family.setdefault(scheme.family, []).append(scheme)
        for family, schemes in sorted(by_family.items(), key=lambda kv: kv[0].token):
            schemes.sort(key=lambda s: s.rho_he)
            for lo, hi in zip(schemes, schemes[1:]):
                for stream, should_increase in ((Stream.HE, False), (Stream.LE, True)):
                    for rate in DVBS2_CODE_RATES:
                        t_lo = self._entries.get((lo, stream, rate))
                        t_hi = self._entries.get((hi, stream, rate))
                        if t_lo is None or t_hi is None:
                            continue
                        ok = t_hi > t_lo if should_increase else t_hi < t_lo
                        if not ok:
                            key = (family.token, hi.rho_he, stream.value, rate)
                            known = key in anomalies
                            issues.append(
                                ValidationIssue(
                                    severity="warning",
                                    message=(
                                        f"{family.token} {stream.value} at rate {rate}: threshold should be "
                                        f"{'increasing' if should_increase else 'decreasing'} in rho_he but goes "
                                        f"{t_lo} dB (rho={lo.rho_he:g}) -> {t_hi} dB (rho={hi.rho_he:g})"
                                    ),
                                    known_anomaly=known,
                                )
                            )
        return issues


def load_threshold_csv(
    path: Union[str, Path],
    anomalies: Optional[Mapping[AnomalyKey, str]] = None,
) -> ThresholdTable:
    """Load and validate one threshold CSV.

    Merged H-QPSK rows (stream ``HE/LE``, only legal at rho_he = 0.5) expand
    to identical HE and LE entries. Raises TableParseError on malformed
    input and TableValidationError on invariant violations; soft issues are
    collected on the returned table's ``warnings``.
    """
    if anomalies is None:
        anomalies = load_anomaly_manifest()
    path = Path(path)
    entries: dict[tuple[SchemeId, Stream, Fraction], float] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TableParseError(f"{path}: empty file") from None
        if [h.strip() for h in header] != ["family", "rho_he", "stream", "code_rate", "threshold_db"]:
            raise TableParseError(f"{path}: line 1: unexpected header {header!r}")
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 5:
                raise TableParseError(f"{path}: line {line_no}: expected 5 fields, got {len(row)}")
            fam_tok, rho_tok, stream_tok, rate_tok, thr_tok = (cell.strip() for cell in row)
            try:
                family = Family.from_token(fam_tok)
            except ValueError as exc:
                raise TableParseError(f"{path}: line {line_no}: {exc}") from None
            try:
                rho = float(rho_tok) if rho_tok else None
            except ValueError:
                raise TableParseError(f"{path}: line {line_no}: bad rho_he {rho_tok!r}") from None
            try:
                scheme = SchemeId(family, rho)
            except ValueError as exc:
                raise TableValidationError(f"{path}: line {line_no}: {exc}") from None
            rate = _parse_rate(rate_tok, line_no)
            try:
                threshold = float(thr_tok)
            except ValueError:
                raise TableParseError(f"{path}: line {line_no}: bad threshold {thr_tok!r}") from None
            if not math.isfinite(threshold):
                raise TableValidationError(f"{path}: line {line_no}: non-finite threshold")

            if stream_tok == "HE/LE":
                if not family.hierarchical or rho != 0.5:
                    raise TableValidationError(
                        f"{path}: line {line_no}: merged HE/LE rows are only legal for hierarchical rho_he=0.5"
                    )
                targets = (Stream.HE, Stream.LE)
            else:
                try:
                    stream = Stream(stream_tok)
                except ValueError:
                    raise TableParseError(f"{path}: line {line_no}: unknown stream {stream_tok!r}") from None
                if (stream is Stream.SINGLE) == family.hierarchical:
                    raise TableValidationError(
                        f"{path}: line {line_no}: stream {stream.value} inconsistent with family {family.token}"
                    )
                targets = (stream,)
            for stream in targets:
                key = (scheme, stream, rate)
                if key in entries:
                    raise TableValidationError(
                        f"{path}: line {line_no}: duplicate entry {scheme.token}/{stream.value} {rate}"
                    )
                entries[key] = threshold
    if not entries:
        raise TableParseError(f"{path}: no data rows")

    issues = ThresholdTable(entries).validate(anomalies)
    errors = [i for i in issues if i.severity == "error"]
    if errors:
        raise TableValidationError(f"{path}: " + "; ".join(i.message for i in errors))
    return ThresholdTable(entries, warnings=[i for i in issues if i.severity == "warning"])


def serialize_threshold_csv(table: ThresholdTable) -> str:
    """Canonical CSV text for a table (sorted rows, %g thresholds).

    Hierarchical rho_he = 0.5 schemes whose HE and LE thresholds coincide at
    every rate are written back as merged HE/LE rows, matching the shipped
    file layout.
    """
    entries = table.entries()
    merged: set[tuple[SchemeId, Fraction]] = set()
    for scheme in table.schemes():
        if scheme.rho_he != 0.5:
            continue
        for rate in DVBS2_CODE_RATES:
            t_he = entries.get((scheme, Stream.HE, rate))
            t_le = entries.get((scheme, Stream.LE, rate))
            if t_he is not None and t_he == t_le:
                merged.add((scheme, rate))

    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["family", "rho_he", "stream", "code_rate", "threshold_db"])
    stream_order = {Stream.HE: 0, Stream.LE: 1, Stream.SINGLE: 2}
    rows = []
    for (scheme, stream, rate), thr in entries.items():
        if (scheme, rate) in merged:
            if stream is Stream.LE:
                continue
            stream_tok = "HE/LE"
            skey = -1
        else:
            stream_tok = stream.value
            skey = stream_order[stream]
        rows.append((scheme.sort_key(), skey, rate, scheme, stream_tok, thr))
    rows.sort(key=lambda r: r[:3])
    for _, _, rate, scheme, stream_tok, thr in rows:
        rho_tok = "" if scheme.rho_he is None else f"{scheme.rho_he:g}"
        writer.writerow([scheme.family.token, rho_tok, stream_tok, str(rate), f"{thr:g}"])
    return out.getvalue()


def stream_efficiency(scheme: SchemeId, stream: Stream, rate: Fraction) -> float:
    """Spectrum efficiency of one stream: (stream bits per symbol) x code rate."""
    return scheme.bits(stream) * float(rate)


def best_single_modcod(snr_db: float, table: ThresholdTable) -> Optional[ModcodChoice]:
    """Best non-hierarchical modcod decodable at snr_db, or None (outage)."""
    return table.best_single(snr_db)


def signaling_bits(n_rates: int, n_hier_mods: int) -> int:
    """Signaling bits to address a hierarchical configuration:
    ceil(log2(n_rates^2 * n_hier_mods)). Exact integer arithmetic."""
    if n_rates < 1 or n_hier_mods < 1:
        raise ValueError("counts must be >= 1")
    return (n_rates * n_rates * n_hier_mods - 1).bit_length()
