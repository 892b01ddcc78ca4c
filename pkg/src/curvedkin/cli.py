"""Campaign runner: builds bodies, runs verification suites, writes reports.

Reports are flat records, one per (body, bound) or per pair, so the output
is trivially diffable and plottable.  Runs are deterministic for a fixed
seed: every task gets its own pre-split random stream indexed by position.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .bonnesen import (deficit_report, kappa_limit_sweep, random_convex_body)
from .convex import GeodesicPolygon, convex_hull, regular_ngon
from .kinematics import (containment_criterion, find_containment,
                         kinematic_lhs, kinematic_rhs)
from .radii import metrics
from .surface import (Curvature, GeometryError, RandomStream, exp_at_base,
                      point_polar)

REPORT_FIELDS = [
    "suite", "seed", "kappa", "body_id", "A", "P", "r_in", "R_circ",
    "deficit", "bound_name", "bound_value", "slack", "satisfied",
    "mc_mean", "mc_stderr", "samples", "tolerance",
]

DEFAULT_SQUARE = ((math.sqrt(0.5), math.pi / 4),
                  (math.sqrt(0.5), 3 * math.pi / 4),
                  (math.sqrt(0.5), 5 * math.pi / 4),
                  (math.sqrt(0.5), 7 * math.pi / 4))

SWEEP_KAPPAS = (0.1, -0.1, 0.01, -0.01, 0.001, -0.001, 0.0001, -0.0001)


class BodyFileError(ValueError):
    """Parse or validation failure in a body file, with position info."""


@dataclass
class CampaignConfig:
    seed: int = 42
    kappas: tuple[float, ...] = (-1.0, 0.0, 1.0)
    mc_samples: int = 20000
    count: int = 25
    max_vertices: int = 8
    budget: int = 10000
    body_file: Optional[str] = None
    disc_ngon: Optional[tuple[float, int]] = None
    output: Optional[str] = None
    fmt: str = "json"
    workers: Optional[int] = None  # None -> available parallelism

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.workers is not None and self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.mc_samples < 1000:
            raise ValueError("mc_samples must be >= 1000")
        if not self.kappas:
            raise ValueError("at least one kappa is required")
        if self.fmt not in ("json", "csv"):
            raise ValueError(f"unknown format {self.fmt!r}")


def _record(**kw) -> dict:
    rec = {k: None for k in REPORT_FIELDS}
    rec.update(kw)
    return rec


# ---------------------------------------------------------------------------
# Body sources
# ---------------------------------------------------------------------------

def parse_body_file(path: str) -> list[tuple[Curvature, GeodesicPolygon]]:
    """Parse the line-oriented body format.

    Grammar (one body per paragraph, '#' starts a comment)::

        kappa <float>
        v <r> <theta>     # polar coordinates about the base point
        v <r> <theta>
    """
    bodies = []
    curv: Optional[Curvature] = None
    verts: list = []
    first_line = 0

    def flush(lineno):
        nonlocal curv, verts
        if curv is None and not verts:
            return
        if curv is None:
            raise BodyFileError(f"{path}:{first_line}: body has no kappa header")
        if not verts:
            raise BodyFileError(f"{path}:{first_line}: body has no vertices")
        try:
            poly = convex_hull(verts)
        except GeometryError as e:
            raise BodyFileError(f"{path}:{first_line}: invalid body: {e}") from e
        bodies.append((curv, poly))
        curv, verts = None, []

    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                flush(lineno)
                continue
            parts = line.split()
            if parts[0] == "kappa":
                if curv is not None:
                    raise BodyFileError(f"{path}:{lineno}: duplicate kappa header")
                try:
                    curv = Curvature(float(parts[1]))
                except (IndexError, ValueError) as e:
                    raise BodyFileError(f"{path}:{lineno}: bad kappa line") from e
                first_line = lineno
            elif parts[0] == "v":
                if curv is None:
                    raise BodyFileError(f"{path}:{lineno}: vertex before kappa header")
                try:
                    r, theta = float(parts[1]), float(parts[2])
                except (IndexError, ValueError) as e:
                    raise BodyFileError(f"{path}:{lineno}: bad vertex line") from e
                try:
                    verts.append(exp_at_base(curv, r, theta))
                except GeometryError as e:
                    raise BodyFileError(
                        f"{path}:{lineno}: vertex {len(verts)} invalid: {e}") from e
            else:
                raise BodyFileError(f"{path}:{lineno}: unknown directive {parts[0]!r}")
    flush(-1)
    if not bodies:
        raise BodyFileError(f"{path}: no bodies found")
    return bodies


def emit_body_file(bodies: Sequence[tuple[Curvature, GeodesicPolygon]],
                   path: str) -> None:
    """Inverse of :func:`parse_body_file` (vertices as polar pairs)."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, (curv, poly) in enumerate(bodies):
            if i:
                fh.write("\n")
            fh.write(f"kappa {curv.kappa!r}\n")
            for v in poly.vertices:
                r, theta = point_polar(v)
                fh.write(f"v {r!r} {theta!r}\n")


def _bodies_for(config: CampaignConfig, curv: Curvature,
                rng: RandomStream) -> list[tuple[str, GeodesicPolygon]]:
    if config.body_file is not None:
        parsed = parse_body_file(config.body_file)
        return [(f"file{i}", poly) for i, (c, poly) in enumerate(parsed)
                if c.kappa == curv.kappa]
    if config.disc_ngon is not None:
        r, n = config.disc_ngon
        return [("disc", regular_ngon(curv, r, n))]
    streams = rng.split(config.count)
    return [(f"rand{i}", random_convex_body(curv, streams[i],
                                            max_vertices=config.max_vertices))
            for i in range(config.count)]


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def run_metrics_suite(config: CampaignConfig, rng: RandomStream) -> list[dict]:
    records = []
    streams = rng.split(len(config.kappas))
    for curv_stream, kappa in zip(streams, config.kappas):
        curv = Curvature(kappa)
        for body_id, body in _bodies_for(config, curv, curv_stream):
            m = metrics(body)
            ok = 0.0 <= m.r_in <= m.R_circ + 1e-9
            records.append(_record(
                suite="metrics", seed=config.seed, kappa=kappa,
                body_id=body_id, A=m.A, P=m.P, r_in=m.r_in, R_circ=m.R_circ,
                satisfied=bool(ok), tolerance=1e-9))
    return records


def run_bonnesen_suite(config: CampaignConfig, rng: RandomStream) -> list[dict]:
    records = []
    streams = rng.split(len(config.kappas))
    for curv_stream, kappa in zip(streams, config.kappas):
        curv = Curvature(kappa)
        for body_id, body in _bodies_for(config, curv, curv_stream):
            m = metrics(body)
            rep = deficit_report(curv, m)
            for b in rep.bounds:
                records.append(_record(
                    suite="bonnesen", seed=config.seed, kappa=kappa,
                    body_id=body_id, A=m.A, P=m.P, r_in=m.r_in,
                    R_circ=m.R_circ, deficit=rep.deficit,
                    bound_name=b.name.value,
                    bound_value=None if not b.applicable else b.value,
                    slack=None if not b.applicable else rep.slack(b),
                    satisfied=bool(rep.satisfied(b)), tolerance=1e-9))
    return records


def run_kinematic_suite(config: CampaignConfig, rng: RandomStream) -> list[dict]:
    records = []
    streams = rng.split(len(config.kappas))
    for curv_stream, kappa in zip(streams, config.kappas):
        curv = Curvature(kappa)
        gen, mc = curv_stream.split(2)
        bodies = _bodies_for(config, curv, gen)
        task_streams = mc.split(max(1, len(bodies) // 2))
        for i in range(len(bodies) // 2):
            (id_a, ka), (id_b, kb) = bodies[2 * i], bodies[2 * i + 1]
            est = kinematic_lhs(ka, kb, config.mc_samples, task_streams[i])
            rhs = kinematic_rhs(ka, kb)
            tol = max(3.0 * est.std_error, 1e-3 * rhs)
            records.append(_record(
                suite="kinematic", seed=config.seed, kappa=kappa,
                body_id=f"{id_a}|{id_b}", bound_value=rhs,
                mc_mean=est.mean, mc_stderr=est.std_error,
                samples=est.samples, tolerance=tol,
                satisfied=bool(abs(est.mean - rhs) <= tol)))
    return records


def run_containment_suite(config: CampaignConfig, rng: RandomStream) -> list[dict]:
    records = []
    streams = rng.split(len(config.kappas))
    for curv_stream, kappa in zip(streams, config.kappas):
        curv = Curvature(kappa)
        gen, search = curv_stream.split(2)
        found_pairs = []
        attempts = 0
        while len(found_pairs) < config.count and attempts < config.count * 200:
            attempts += 1
            a = random_convex_body(curv, gen, max_vertices=config.max_vertices)
            b = random_convex_body(curv, gen, max_vertices=config.max_vertices)
            try:
                if containment_criterion(a, b, slack=-1e-3):
                    found_pairs.append((a, b))
            except GeometryError:
                continue
        task_streams = search.split(max(1, len(found_pairs)))
        for i, (a, b) in enumerate(found_pairs):
            witness = find_containment(a, b, config.budget, task_streams[i])
            records.append(_record(
                suite="containment", seed=config.seed, kappa=kappa,
                body_id=f"pair{i}", samples=config.budget,
                satisfied=witness is not None, tolerance=1e-9))
    return records


def run_sweep_suite(config: CampaignConfig, rng: RandomStream) -> list[dict]:
    del rng  # deterministic suite
    records = []
    rows = kappa_limit_sweep(DEFAULT_SQUARE, SWEEP_KAPPAS)
    reference = rows[0].euclid_reference
    by_abs: dict[float, list] = {}
    for row in rows:
        by_abs.setdefault(abs(row.kappa), []).append(row)
    gaps = {}
    for row in rows:
        gaps[row.kappa] = abs(row.active_bound_value - reference)
    ordered = sorted(by_abs)  # increasing |kappa|
    for row in rows:
        sign = 1.0 if row.kappa > 0 else -1.0
        smaller = [k for k in ordered if k < abs(row.kappa)]
        monotone = all(gaps[sign * k] <= gaps[row.kappa] + 1e-12
                       for k in smaller if sign * k in gaps)
        records.append(_record(
            suite="sweep", seed=config.seed, kappa=row.kappa,
            body_id="square", deficit=row.deficit,
            bound_name=row.active_bound_name.value,
            bound_value=row.active_bound_value,
            slack=gaps[row.kappa], satisfied=bool(monotone),
            tolerance=1e-3))
    return records


SUITES = {
    "metrics": run_metrics_suite,
    "verify-kinematic": run_kinematic_suite,
    "verify-containment": run_containment_suite,
    "verify-bonnesen": run_bonnesen_suite,
    "sweep-kappa": run_sweep_suite,
}


def run_campaign(config: CampaignConfig,
                 suites: Sequence[str]) -> tuple[int, list[dict]]:
    """Run the selected suites; exit status 0 iff everything is satisfied.

    Suites run on a thread pool, but each owns a pre-split stream indexed
    by its fixed position in SUITES and records are assembled in request
    order, so the output is identical for any worker count.
    """
    master = RandomStream(config.seed)
    streams = dict(zip(SUITES, master.split(len(SUITES))))
    workers = config.workers or os.cpu_count() or 1
    records: list[dict] = []
    with ThreadPoolExecutor(max_workers=min(workers, len(suites))) as pool:
        futures = [pool.submit(SUITES[name], config, streams[name])
                   for name in suites]
        for future in futures:
            records.extend(future.result())
    ok = all(rec["satisfied"] for rec in records if rec["satisfied"] is not None)
    if config.output:
        write_report(records, config.output, config.fmt)
    return (0 if ok else 1), records


def write_report(records: list[dict], path: str, fmt: str) -> None:
    if fmt == "json":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(records, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=REPORT_FIELDS,
                                    quoting=csv.QUOTE_MINIMAL)
            writer.writeheader()
            for rec in records:
                writer.writerow(rec)


# ---------------------------------------------------------------------------
# Command line
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvedkin",
        description="Verification campaigns for convex bodies on constant-"
                    "curvature surfaces")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in list(SUITES) + ["all"]:
        p = sub.add_parser(name)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--kappa", type=float, action="append", default=None)
        p.add_argument("--samples", type=int, default=20000)
        p.add_argument("--count", type=int, default=25)
        p.add_argument("--max-vertices", type=int, default=8)
        p.add_argument("--budget", type=int, default=10000)
        p.add_argument("--body-file", default=None)
        p.add_argument("--disc-ngon", nargs=2, type=float, default=None,
                       metavar=("R", "N"))
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--workers", type=int, default=None)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("CURVEDKIN_SEED", "42"))
    disc = None
    if args.disc_ngon is not None:
        disc = (args.disc_ngon[0], int(args.disc_ngon[1]))
    try:
        config = CampaignConfig(
            seed=seed,
            kappas=tuple(args.kappa) if args.kappa else (-1.0, 0.0, 1.0),
            mc_samples=args.samples, count=args.count,
            max_vertices=args.max_vertices, budget=args.budget,
            body_file=args.body_file, disc_ngon=disc,
            output=args.out, fmt=args.format, workers=args.workers)
        suites = list(SUITES) if args.command == "all" else [args.command]
        status, records = run_campaign(config, suites)
    except (BodyFileError, ValueError, GeometryError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    n_checked = sum(1 for r in records if r["satisfied"] is not None)
    n_ok = sum(1 for r in records if r["satisfied"])
    print(f"{n_ok}/{n_checked} checks satisfied "
          f"({'PASS' if status == 0 else 'FAIL'})")
    return status


if __name__ == "__main__":
    sys.exit(main())
