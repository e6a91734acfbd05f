"""Command-line driver for degree sweeps.

Every command writes deterministic CSV/JSON files into ``--out``; numbers
carry 17 significant digits.  Exit codes: 0 success, 1 usage error,
2 numerical failure, 3 selftest failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np

from . import bergman, design, experiments, gram, measures
from .errors import ConvergenceError, SingularError
from .model_spaces import dimension

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_SELFTEST = 0, 1, 2, 3
METRICS = ("KS", "HarmonicDiscrepancy", "KDiameter", "LFunctional", "SupRho", "LebesgueConstant", "Distortion")
PAIRS = tuple(p.value for p in design.Pair)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    domain: str = "interval"
    weight: str = "zero"
    degrees: list = field(default_factory=list)
    method: str = "fekete"
    grid_oversample: Optional[int] = None
    metrics: list = field(default_factory=list)
    output_dir: str = "."
    measure: str = "uniform"
    pair: str = "InfInf"

    def validate(self, need_degrees: bool = True) -> None:
        if need_degrees and not self.degrees:
            raise UsageError("--degrees is required")
        if any(int(k) != k or k < 1 for k in self.degrees):
            raise UsageError("degrees must be positive integers")
        if any(b <= a for a, b in zip(self.degrees, self.degrees[1:])):
            raise UsageError("degrees must be strictly increasing")
        if self.grid_oversample is not None and self.grid_oversample < 2:
            raise UsageError("--oversample must be at least 2")
        if self.method not in experiments.METHODS:
            raise UsageError(f"unknown method {self.method!r}")
        if self.measure not in experiments.MEASURES:
            raise UsageError(f"unknown measure {self.measure!r}")
        if self.pair not in PAIRS:
            raise UsageError(f"unknown distortion pair {self.pair!r}")
        bad = [m for m in self.metrics if m not in METRICS]
        if bad:
            raise UsageError(f"unknown metrics {bad}")

    def weighted_set(self):
        try:
            return experiments.parse_domain(self.domain, experiments.parse_weight(self.weight))
        except ValueError as exc:
            raise UsageError(str(exc)) from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _degrees(text: str) -> list:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad degree list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fekete", description="Weighted Fekete points, Bergman measures and distortion sweeps.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--domain", help="interval | circle:R | disk:R | sphere")
        sp.add_argument("--weight", help="zero | quad:C | logshift:RE,IM")
        sp.add_argument("--degrees", type=_degrees, help="comma-separated, strictly increasing")
        sp.add_argument("--method", choices=experiments.METHODS)
        sp.add_argument("--measure", choices=experiments.MEASURES)
        sp.add_argument("--oversample", type=int, dest="grid_oversample")
        sp.add_argument("--metrics", type=lambda s: [m for m in s.split(",") if m])
        sp.add_argument("--out", dest="output_dir")
        sp.add_argument("--config", help="JSON RunConfig; flags override its values")

    for name, text in (
        ("points", "configuration search per degree"),
        ("bergman", "distortion function and Bergman measure per degree"),
        ("optimal-measure", "fixed-point optimal measure per degree"),
        ("lfunc", "L-functional of a measure per degree"),
    ):
        common(sub.add_parser(name, help=text))
    sp = sub.add_parser("distortion", help="interpolation distortion growth")
    common(sp)
    sp.add_argument("--pair", choices=PAIRS)
    sp = sub.add_parser("report", help="convergence report")
    common(sp)
    sp.add_argument("--figures", action="store_true", help="also render PNG figures")
    sp = sub.add_parser("selftest", help="brute-force identity checks")
    sp.add_argument("--inject-fault", action="store_true", help="perturb the Gram matrix (negative control)")
    return p


def load_config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if "oversample" in data:
            data["grid_oversample"] = data.pop("oversample")
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys {sorted(unknown)}")
        for key, value in data.items():
            setattr(cfg, key, value)
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            setattr(cfg, f.name, value)
    return cfg


def _path(cfg: RunConfig, name: str) -> str:
    return os.path.join(cfg.output_dir, name)


def _write_rows(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])


def _sweep_measure(cfg, ws, k):
    return experiments.standard_measure(experiments.search_set(ws, k), cfg.measure, k, cfg.grid_oversample)


def cmd_points(cfg: RunConfig, ws) -> None:
    sidecars = []
    for k in cfg.degrees:
        res = experiments.find_points(ws, k, cfg.method, cfg.grid_oversample, cfg.measure)
        side = experiments.result_sidecar(ws, k, res, cfg.method)
        P = res.config
        if "LebesgueConstant" in cfg.metrics:
            side["lebesgue_constant"] = design.lebesgue_constant(ws, k, P)
        if "SupRho" in cfg.metrics:
            side["sup_rho"] = design.distortion(ws, k, None, P, design.Pair.INF_2) ** 2
        if "LFunctional" in cfg.metrics:
            side["l_functional"] = gram.l_functional(ws, P.as_measure(), k)
        if "Distortion" in cfg.metrics:
            mu = _sweep_measure(cfg, ws, k)
            side[f"distortion_{cfg.pair}"] = design.distortion(ws, k, mu, P, cfg.pair)
        measures.write_configuration_csv(_path(cfg, f"points_k{k:03d}.csv"), P)
        experiments.write_json(_path(cfg, f"points_k{k:03d}.json"), side)
        sidecars.append(side)
    keys = [key for key in sidecars[0] if key != "method"]
    _write_rows(_path(cfg, "points_summary.csv"), keys, [[s[key] for key in keys] for s in sidecars])
    for s in sidecars:
        metric = "ks" if "ks" in s else "harmonic_discrepancy"
        print(f"k={s['k']:>3} N={s['N']:>4} k_diameter={s['k_diameter']:.6f} {metric}={s[metric]:.6f}")


def cmd_bergman(cfg: RunConfig, ws) -> None:
    recs = []
    mus = {}
    for k in cfg.degrees:
        sws = experiments.search_set(ws, k)
        mu = mus[k] = _sweep_measure(cfg, ws, k)
        gs = gram.gram_system(sws, mu, k)
        bf = bergman.bergman_field(gs, sws.candidates(k, cfg.grid_oversample))
        beta = bergman.bergman_measure(gs)
        bergman.write_field_csv(_path(cfg, f"bergman_field_k{k:03d}.csv"), bf)
        measures.write_measure_csv(_path(cfg, f"bergman_measure_k{k:03d}.csv"), beta)
        name, dist = experiments.equidistribution_distance(ws, beta)
        rec = {"k": k, "N": gs.N, "sup_rho": bf.sup_rho, f"{name}_bergman": dist}
        experiments.write_json(_path(cfg, f"bergman_k{k:03d}.json"), rec)
        recs.append(rec)
        print(f"k={k:>3} N={gs.N:>4} sup_rho={bf.sup_rho:.6g} {name}={dist:.6f}")
    if len(cfg.degrees) >= 3:
        sups = [r["sup_rho"] for r in recs]
        dims = [r["N"] for r in recs]
        poly, rate = bergman.growth_fit(cfg.degrees, dims, sups)
        diag = bergman.BMDiagnostic(list(cfg.degrees), sups, poly, rate, bool(rate <= bergman.BM_RATE_THRESHOLD))
        experiments.write_json(_path(cfg, "bm_diagnostic.json"), diag.to_json())
        print(f"poly_exponent={poly:.4f} exp_rate={rate:.3e} bm_flag={diag.bm_flag}")


def cmd_optimal(cfg: RunConfig, ws) -> None:
    for k in cfg.degrees:
        res = design.optimal_measure_fixed_point(experiments.search_set(ws, k), k, oversample=cfg.grid_oversample)
        side = res.to_json()
        name, dist = experiments.equidistribution_distance(ws, res.measure)
        side[name] = dist
        measures.write_measure_csv(_path(cfg, f"optimal_k{k:03d}.csv"), res.measure)
        experiments.write_json(_path(cfg, f"optimal_k{k:03d}.json"), side)
        print(f"k={k:>3} N={res.N:>4} sup_rho/N={res.sup_rho / res.N:.6f} iterations={res.iterations}")
        if not res.converged:
            raise ConvergenceError(f"optimal measure did not converge at k={k}", res.sup_rho / res.N - 1)


def cmd_lfunc(cfg: RunConfig, ws) -> None:
    recs = []
    for k in cfg.degrees:
        mu = _sweep_measure(cfg, ws, k)
        value = gram.l_functional(experiments.search_set(ws, k), mu, k)
        recs.append({"k": k, "N": dimension(ws.model, k), "l_functional": value})
        print(f"k={k:>3} l_functional={value:.10f}")
    out = {"domain": ws.support.label(), "measure": cfg.measure, "records": recs}
    energy = experiments.equilibrium_energy(ws)
    if energy is not None:
        out["equilibrium_energy"] = energy
    experiments.write_json(_path(cfg, "lfunc.json"), out)


def cmd_distortion(cfg: RunConfig, ws) -> None:
    pair = design.Pair(cfg.pair)
    configs, mus = [], []
    for k in cfg.degrees:
        configs.append(experiments.find_points(ws, k, cfg.method, cfg.grid_oversample, cfg.measure).config)
        mus.append(_sweep_measure(cfg, ws, k) if pair is design.Pair.TWO_TWO else None)
    if len(cfg.degrees) >= 3:
        rep = design.distortion_growth_report(ws, cfg.degrees, mus, configs, pair)
        out = rep.to_json()
    else:
        vals = [design.distortion(ws, k, m, P, pair) for k, m, P in zip(cfg.degrees, mus, configs)]
        out = {"degrees": list(cfg.degrees), "values": vals, "pair": pair.value}
    out["method"] = cfg.method
    experiments.write_json(_path(cfg, "distortion.json"), out)
    for k, v in zip(out["degrees"], out["values"]):
        print(f"k={k:>3} {pair.value}={v:.6g}")


def cmd_report(cfg: RunConfig, ws, figures: bool = False) -> None:
    rep = experiments.sweep_report(ws, cfg.degrees, cfg.method, cfg.measure, cfg.grid_oversample)
    experiments.write_json(_path(cfg, "report.json"), rep)
    recs = rep["records"]
    keys = list(recs[0])
    _write_rows(_path(cfg, "report.csv"), keys, [[r[key] for key in keys] for r in recs])
    for name, ok in rep["summary"]["checks"].items():
        print(f"{name}: {'pass' if ok else 'fail'}")
    if figures:
        from .plotting import plot_report

        for path in plot_report(rep, cfg.output_dir):
            print(f"wrote {path}")


def cmd_selftest(inject_fault: bool = False) -> int:
    from .selftest import format_table, run_selftest

    rows = run_selftest(inject_fault=inject_fault)
    print(format_table(rows))
    failed = sum(not r.passed for r in rows)
    print(f"{len(rows) - failed}/{len(rows)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_SELFTEST


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "selftest":
        return cmd_selftest(args.inject_fault)
    try:
        cfg = load_config(args)
        cfg.validate()
        ws = cfg.weighted_set()
        os.makedirs(cfg.output_dir, exist_ok=True)
        handler = {
            "points": cmd_points,
            "bergman": cmd_bergman,
            "optimal-measure": cmd_optimal,
            "lfunc": cmd_lfunc,
            "distortion": cmd_distortion,
        }.get(args.command)
        if handler is not None:
            handler(cfg, ws)
        else:
            cmd_report(cfg, ws, args.figures)
    except UsageError as exc:
        print(f"fekete: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularError, ConvergenceError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"fekete: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"fekete: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
