"""Command-line front end.

Subcommands:

* ``rho``       - print HE energy fractions for constellation parameters
* ``pair``      - solve one receiver pair (rates, gain, schedule, hull dump)
* ``campaign``  - run a Monte Carlo gain campaign and write CSV reports
* ``validate``  - check scenario, tables and weather CDF; report anomalies

Configuration comes from an INI scenario file (all sections optional, see
``DEFAULT_SCENARIO`` below) with individual values overridable by flags.
Exit codes: 0 success, 1 validation error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import constellations as geom
from .beam import AntennaConfig, WeatherCdf
from .campaign import COMBINED, CampaignConfig, curve_csv_text, gains_csv_text, run_campaign
from .modcod import (
    Family,
    TableParseError,
    TableValidationError,
    ThresholdTable,
    load_anomaly_manifest,
    load_threshold_csv,
    packaged_data_path,
)
from .rateopt import achievable_pairs, pair_solution, rate_region_hull

DEFAULT_SCENARIO = """\
[tables]
baseline = <packaged dvbs2_single.csv>
hierarchical = <packaged hqpsk_thresholds.csv>, <packaged h32apsk_thresholds.csv>

[antenna]
diameter_m = 1.5
frequency_hz = 20e9
edge_level_db = 4

[weather]
cdf = <packaged weather_cdf_sample.csv>

[campaign]
grid = 1:16:0.5
receivers = 500
repetitions = 100
families = all
combined = false
seed = 1
workers = 1

[output]
dir = out
"""


class ScenarioError(ValueError):
    pass


@dataclass
class Scenario:
    baseline_path: Path
    hierarchical_paths: tuple[Path, ...]
    antenna: AntennaConfig
    weather_path: Path
    grid: tuple[float, ...]
    receivers: int
    repetitions: int
    families_spec: str
    combined: bool
    seed: int
    workers: int
    out_dir: Path
    tables: ThresholdTable = field(init=False, repr=False)
    weather: WeatherCdf = field(init=False, repr=False)

    def load_data(self):
        """Load and validate every referenced file; ScenarioError on failure."""
        try:
            anomalies = load_anomaly_manifest()
            table = load_threshold_csv(self.baseline_path, anomalies)
            for path in self.hierarchical_paths:
                table = table.merged_with(load_threshold_csv(path, anomalies))
        except (OSError, TableParseError, TableValidationError) as exc:
            raise ScenarioError(f"threshold tables: {exc}") from exc
        try:
            self.weather = WeatherCdf.from_csv(self.weather_path)
        except (OSError, ValueError) as exc:
            raise ScenarioError(f"weather CDF: {exc}") from exc
        self.tables = table

    def campaign_families(self) -> tuple[tuple[Family, ...], bool]:
        tokens = [t.strip() for t in self.families_spec.split(",") if t.strip()]
        combined = self.combined
        families: list[Family] = []
        for token in tokens:
            if token == "all":
                families.extend(s.family for s in self.tables.hierarchical_schemes())
            elif token == COMBINED:
                combined = True
            else:
                try:
                    families.append(Family.from_token(token))
                except ValueError as exc:
                    raise ScenarioError(str(exc)) from None
        seen = []
        for fam in families:
            if fam not in seen:
                seen.append(fam)
        return tuple(seen), combined

    def campaign_config(self) -> CampaignConfig:
        families, combined = self.campaign_families()
        return CampaignConfig(
            snr_max_grid=self.grid,
            receivers=self.receivers,
            repetitions=self.repetitions,
            families=families,
            combined=combined,
            master_seed=self.seed,
            workers=self.workers,
        )


def _parse_grid(text: str) -> tuple[float, ...]:
    text = text.strip()
    try:
        if ":" in text:
            start_s, stop_s, step_s = text.split(":")
            start, stop, step = float(start_s), float(stop_s), float(step_s)
            if step <= 0 or stop < start:
                raise ValueError
            values = []
            k = 0
            while True:
                v = start + k * step
                if v > stop + 1e-9:
                    break
                values.append(round(v, 9))
                k += 1
            return tuple(values)
        return (float(text),)
    except ValueError:
        raise ScenarioError(f"bad grid spec {text!r}; expected 'start:stop:step' or a single value") from None


def _parse_paths(text: str, base: Path) -> tuple[Path, ...]:
    return tuple((base / p.strip()).resolve() for p in text.split(",") if p.strip())


def load_scenario(path: Optional[str], overrides: argparse.Namespace) -> Scenario:
    """Load the scenario file (or defaults) and apply CLI overrides."""
    parser = configparser.ConfigParser()
    base = Path(".")
    if path is not None:
        file = Path(path)
        if not file.is_file():
            raise ScenarioError(f"scenario file not found: {file}")
        parser.read(file)
        base = file.parent

    def get(section, option, fallback):
        return parser.get(section, option, fallback=fallback) if parser.has_section(section) else fallback

    baseline = get("tables", "baseline", None)
    hierarchical = get("tables", "hierarchical", None)
    scenario = Scenario(
        baseline_path=(base / baseline).resolve() if baseline else packaged_data_path("dvbs2_single.csv"),
        hierarchical_paths=(
            _parse_paths(hierarchical, base)
            if hierarchical
            else (packaged_data_path("hqpsk_thresholds.csv"), packaged_data_path("h32apsk_thresholds.csv"))
        ),
        antenna=AntennaConfig(
            diameter_m=float(get("antenna", "diameter_m", "1.5")),
            frequency_hz=float(get("antenna", "frequency_hz", "20e9")),
            edge_level_db=float(get("antenna", "edge_level_db", "4")),
        ),
        weather_path=(
            (base / get("weather", "cdf", "")).resolve()
            if get("weather", "cdf", "")
            else packaged_data_path("weather_cdf_sample.csv")
        ),
        grid=_parse_grid(get("campaign", "grid", "1:16:0.5")),
        receivers=int(get("campaign", "receivers", "500")),
        repetitions=int(get("campaign", "repetitions", "100")),
        families_spec=get("campaign", "families", "all"),
        combined=get("campaign", "combined", "false").strip().lower() in ("1", "true", "yes", "on"),
        seed=int(get("campaign", "seed", "1")),
        workers=int(get("campaign", "workers", "1")),
        out_dir=Path(get("output", "dir", "out")),
    )

    if overrides.seed is not None:
        scenario.seed = overrides.seed
    if overrides.receivers is not None:
        scenario.receivers = overrides.receivers
    if overrides.reps is not None:
        scenario.repetitions = overrides.reps
    if overrides.grid is not None:
        scenario.grid = _parse_grid(overrides.grid)
    if overrides.families is not None:
        scenario.families_spec = overrides.families
    if overrides.out is not None:
        scenario.out_dir = Path(overrides.out)
    if getattr(overrides, "workers", None) is not None:
        scenario.workers = overrides.workers

    scenario.load_data()
    return scenario


def cmd_rho(args) -> int:
    chosen = [name for name in ("hqpsk", "h8psk", "h32apsk") if getattr(args, name)]
    if args.table:
        if args.table == "hqpsk":
            print("rho_he theta_deg cos2(theta)")
            for rho, theta in geom.ADOPTED_QPSK_SPLITS.items():
                value = geom.qpsk_rho_he(geom.QpskParams(theta))
                print(f"{rho:<6g} {theta:<9g} {value:.4f}")
        else:
            print("rho_he gamma1 gamma2 theta_deg computed")
            for rho, (g1, g2, theta) in geom.ADOPTED_APSK32_TRIPLES.items():
                value = geom.apsk32_rho_he(geom.Apsk32Params(g1, g2, theta))
                print(f"{rho:<6g} {g1:<6g} {g2:<6g} {theta:<9g} {value:.4f}")
        return 0
    if len(chosen) != 1:
        print("error: pick exactly one of --hqpsk/--h8psk/--h32apsk (or --table)", file=sys.stderr)
        return 1
    try:
        if args.hqpsk:
            if args.theta is None:
                raise ValueError("--theta required")
            value = geom.qpsk_rho_he(geom.QpskParams(args.theta))
        elif args.h8psk:
            if args.theta is None:
                raise ValueError("--theta required")
            value = geom.psk8_rho_he(geom.Psk8Params(args.theta))
        else:
            if None in (args.g1, args.g2, args.theta):
                raise ValueError("--g1, --g2 and --theta required")
            value = geom.apsk32_rho_he(geom.Apsk32Params(args.g1, args.g2, args.theta))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"rho_he = {value:.4f}")
    return 0


def cmd_pair(args) -> int:
    scenario = load_scenario(args.scenario, args)
    snr_weak, snr_strong = sorted((args.snr1, args.snr2))
    table = scenario.tables
    solution = pair_solution(snr_weak, snr_strong, table)
    points = achievable_pairs(snr_weak, snr_strong, table)

    from .modcod import best_single_modcod

    for label, snr in (("weak", snr_weak), ("strong", snr_strong)):
        best = best_single_modcod(snr, table)
        state = str(best) if best else "OUTAGE (no decodable single modcod)"
        print(f"{label:>6} receiver {snr:g} dB: {state}")
    print(f"r_ts  = {solution.r_ts:.6f} bit/s/Hz (classical time sharing)")
    print(f"r_hm  = {solution.r_hm:.6f} bit/s/Hz (hierarchical time sharing)")
    gain = solution.gain
    print(f"gain  = {gain if gain != float('inf') else 'inf (zero baseline)'}")
    for share in solution.schedule:
        if share.point_a == share.point_b:
            print(f"schedule: serve {share.point_a.describe()} full time")
        else:
            print(
                f"schedule: {share.tau:.4f} of time on {share.point_a.describe()}, "
                f"rest on {share.point_b.describe()}"
            )
    if args.dump_hull:
        lines = ["r1,r2,configuration"]
        for p in rate_region_hull(points):
            desc = p.describe().split(" via ", 1)[1]
            lines.append(f"{p.r1:.10g},{p.r2:.10g},\"{desc}\"")
        Path(args.dump_hull).write_text("\n".join(lines) + "\n")
        print(f"hull vertices written to {args.dump_hull}")
    return 0


def cmd_campaign(args) -> int:
    scenario = load_scenario(args.scenario, args)
    cfg = scenario.campaign_config()
    report = run_campaign(cfg, scenario.tables, scenario.antenna, scenario.weather)
    out = scenario.out_dir
    out.mkdir(parents=True, exist_ok=True)
    gains = out / "gains.csv"
    gains.write_text(gains_csv_text(report))
    for token in report.family_tokens:
        (out / f"curve_{token}.csv").write_text(curve_csv_text(report, token))
    total_excluded = sum(s.total_outage_runs for s in report.outage.values())
    worst_outage = max(s.max_count for s in report.outage.values())
    print(f"wrote {gains} ({len(report.config.snr_max_grid)} grid points x {len(report.family_tokens)} curves)")
    print(f"runs excluded for total outage: {total_excluded}; worst per-run outage count: {worst_outage}")
    return 0


def cmd_validate(args) -> int:
    try:
        scenario = load_scenario(args.scenario, args)
    except ScenarioError as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return 1
    warnings = scenario.tables.warnings
    for w in warnings:
        print(w)
    anomalies = load_anomaly_manifest()
    hits = [w for w in warnings if w.known_anomaly]
    print(f"tables: {len(scenario.tables)} entries, {len(warnings)} warnings "
          f"({len(hits)} known-anomaly, {len(anomalies)} manifest rows)")
    print(f"weather CDF: {len(scenario.weather.cum_prob)} points, max attenuation "
          f"{scenario.weather.attenuation_db[-1]:g} dB")
    if not scenario.tables.has_single_entries():
        print("FAIL: no single-stream baseline entries; campaigns cannot run", file=sys.stderr)
        return 1
    unknown = [w for w in warnings if not w.known_anomaly]
    if unknown:
        print(f"FAIL: {len(unknown)} warnings outside the known-anomalies manifest", file=sys.stderr)
        return 1
    print("OK")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hmsim", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_scenario_flags(p):
        p.add_argument("--scenario", metavar="PATH", help="scenario INI file")
        p.add_argument("--seed", type=int, metavar="N")
        p.add_argument("--receivers", type=int, metavar="N")
        p.add_argument("--reps", type=int, metavar="N")
        p.add_argument("--grid", metavar="A:B:STEP")
        p.add_argument("--families", metavar="LIST", help="comma list of family tokens, 'all' and/or 'combined'")
        p.add_argument("--out", metavar="DIR")
        p.add_argument("--workers", type=int, metavar="N")

    p_rho = sub.add_parser("rho", help="HE energy fraction of a constellation")
    p_rho.add_argument("--hqpsk", action="store_true")
    p_rho.add_argument("--h8psk", action="store_true")
    p_rho.add_argument("--h32apsk", action="store_true")
    p_rho.add_argument("--theta", type=float)
    p_rho.add_argument("--g1", type=float)
    p_rho.add_argument("--g2", type=float)
    p_rho.add_argument("--table", choices=("hqpsk", "h32apsk"), help="print the adopted parameter table")
    p_rho.set_defaults(func=cmd_rho)

    p_pair = sub.add_parser("pair", help="solve one receiver pair")
    p_pair.add_argument("snr1", type=float)
    p_pair.add_argument("snr2", type=float)
    p_pair.add_argument("--dump-hull", metavar="PATH", help="write hull vertices as CSV")
    add_scenario_flags(p_pair)
    p_pair.set_defaults(func=cmd_pair)

    p_camp = sub.add_parser("campaign", help="run a Monte Carlo gain campaign")
    add_scenario_flags(p_camp)
    p_camp.set_defaults(func=cmd_campaign)

    p_val = sub.add_parser("validate", help="validate scenario data files")
    add_scenario_flags(p_val)
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (TableParseError, TableValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - unexpected runtime failures
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
