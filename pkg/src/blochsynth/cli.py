"""Command-line front end.

Every subcommand writes one deterministic document (JSON or CSV) to
``--out`` or stdout.  Times inside the library are normalized; when the raw
energy gap and field bound are given the documents also carry raw times
(normalized time divided by 2*sqrt(E^2 + M^2)).

Exit codes: 0 success, 1 internal consistency failure, 2 usage or domain error.
"""

from __future__ import annotations

import argparse
import csv
import enum
import io
import json
import math
import re
import sys
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import jsonschema
import numpy as np

from .dispatch import analytic_time
from .errors import ConsistencyError, DomainError
from .geometry import (
    QUARTER_PI,
    SOUTH,
    TWO_PI,
    ModelParams,
    as_point,
    endpoint,
    schedule_time,
    simulate,
    switch_count,
)
from .large_alpha import (
    classify,
    coverage_time,
    cut_locus_trace,
    optimal_to,
    pole_schedules,
)
from .oracle import fibonacci_sphere, max_time_over_sphere, min_time_grid
from .small_alpha import pole_to_pole_small, sweep_pattern_boundaries, switch_bounds, time_bounds

SCHEMA_VERSION = "1.0"
COMMANDS = ("pole2pole", "synthesis", "compare-rwa", "oracle", "patterns")

_NUMBER_OR_NULL = {"type": ["number", "null"]}
SCHEMA: dict = {
    "type": "object",
    "required": ["schema_version", "command", "params", "result"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"enum": list(COMMANDS)},
        "params": {
            "type": "object",
            "required": ["alpha", "energy", "bound", "k", "seed"],
            "properties": {
                "alpha": _NUMBER_OR_NULL,
                "energy": _NUMBER_OR_NULL,
                "bound": _NUMBER_OR_NULL,
                "k": _NUMBER_OR_NULL,
                "seed": {"type": "integer"},
            },
        },
        "result": {"type": "object"},
    },
}
RESULT_KEYS = {
    "pole2pole": ["regime", "candidates", "optimal", "T", "bounds_ok"],
    "synthesis": ["mode"],
    "compare-rwa": ["rows", "all_tc_le_t"],
    "oracle": ["targets", "all_pass", "error_bound"],
    "patterns": ["sweeps", "r2_strictly_decreasing"],
}


class ExitCode(enum.IntEnum):
    OK = 0
    CONSISTENCY = 1
    USAGE = 2


# ---------------------------------------------------------------------------
# configuration


_PI_EXPR = re.compile(r"^\s*(?:([0-9.eE+-]+)\s*\*?\s*)?pi\s*(?:/\s*([0-9.eE+-]+))?\s*$")


def parse_angle(text: str) -> float:
    """A float, or a multiple of pi such as ``pi/3`` or ``2*pi/5``."""
    m = _PI_EXPR.match(text)
    try:
        if m:
            num = float(m.group(1)) if m.group(1) else 1.0
            den = float(m.group(2)) if m.group(2) else 1.0
            return num * math.pi / den
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from None


def parse_point(text: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("target must be x,y,z")
    try:
        v = np.array([float(p) for p in parts])
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a point: {text!r}") from None
    if not np.all(np.isfinite(v)) or np.linalg.norm(v) == 0.0:
        raise argparse.ArgumentTypeError("target must be a finite nonzero vector")
    return v


def _positive(kind: type) -> Callable[[str], Any]:
    def conv(text: str):
        try:
            x = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a {kind.__name__}: {text!r}") from None
        if not x > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return x

    return conv


@dataclass(frozen=True)
class RunConfig:
    command: str
    alpha: float | None
    energy: float | None
    bound: float | None
    out: str | None
    fmt: str
    seed: int
    options: argparse.Namespace

    def env(self) -> ModelParams:
        if self.alpha is not None:
            return ModelParams(self.alpha)
        return ModelParams.from_energy_bound(self.energy, self.bound)

    @classmethod
    def from_args(cls, ns: argparse.Namespace, parser: argparse.ArgumentParser) -> "RunConfig":
        has_alpha = ns.alpha is not None
        has_em = ns.energy is not None or ns.bound is not None
        if has_alpha == has_em and not (ns.command == "patterns" and not has_em):
            parser.error("give exactly one of --alpha or --energy E --bound M")
        if has_em and (ns.energy is None or ns.bound is None):
            parser.error("--energy and --bound must be given together")
        return cls(ns.command, ns.alpha, ns.energy, ns.bound, ns.out, ns.format, ns.seed, ns)


# ---------------------------------------------------------------------------
# serialization


def clean(obj: Any) -> Any:
    """Plain JSON types; non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, enum.Enum):
        return clean(obj.value)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def validate(doc: dict) -> None:
    jsonschema.validate(doc, SCHEMA)
    missing = [k for k in RESULT_KEYS[doc["command"]] if k not in doc["result"]]
    if missing:
        raise jsonschema.ValidationError(f"result lacks {missing}")


def emit_json(doc: dict) -> str:
    """Validate, serialize, parse back, and check the round trip is lossless."""
    doc = clean(doc)
    validate(doc)
    text = json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"
    back = json.loads(text)
    validate(back)
    if back != doc:
        raise ConsistencyError("JSON round trip changed the document")
    return text


def emit_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def _fmt(x: Any) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def schedule_doc(schedule) -> list[dict]:
    return [{"u": a.control, "duration": a.duration} for a in schedule]


def schedule_label(schedule) -> str:
    return "".join(a.label() for a in schedule)


def trajectory_rows(tr) -> list[list]:
    return [[t, u, *p] for t, u, p in zip(tr.times, tr.controls, tr.points)]


def raw(env: ModelParams, t: float | None) -> float | None:
    if t is None or not math.isfinite(t):
        return None
    return env.raw_time(t)


@dataclass
class Output:
    doc: dict
    csv_header: Sequence[str] | None = None
    csv_rows: Sequence[Sequence[Any]] | None = None
    failed: bool = False
    csv_text: str | None = None
    reason: str | None = None


# ---------------------------------------------------------------------------
# subcommands


def cmd_pole2pole(cfg: RunConfig) -> Output:
    env = cfg.env()
    if env.is_large:
        scheds = pole_schedules(env)
        cands = []
        for sch in scheds:
            miss = float(np.linalg.norm(endpoint(env, sch) - SOUTH))
            cands.append(
                {
                    "kind": schedule_label(sch),
                    "s": sch[0].duration,
                    "n": switch_count(sch),
                    "schedule": schedule_doc(sch),
                    "total_time": schedule_time(sch),
                    "endpoint_miss": miss,
                }
            )
        T = min(c["total_time"] for c in cands)
        ok = all(abs(c["total_time"] - TWO_PI) <= 1e-9 and c["endpoint_miss"] <= 1e-7 for c in cands)
        result = {
            "regime": "large",
            "candidates": cands,
            "optimal": cands,
            "pattern": None,
            "T": T,
            "T_raw": raw(env, T),
            "N_switch": min(c["n"] for c in cands),
            "bounds": {"T_expected": TWO_PI},
            "bounds_ok": ok,
        }
        first = scheds[0]
    else:
        res = pole_to_pole_small(env)

        def cand(c) -> dict:
            return {
                "kind": c.kind.value,
                "s": c.s,
                "n": c.n,
                "start_sign": c.start_sign,
                "schedule": schedule_doc(c.schedule),
                "total_time": c.total_time,
                "total_time_raw": raw(env, c.total_time),
            }

        lo, hi = time_bounds(env.alpha)
        nlo, nhi = switch_bounds(env.alpha)
        result = {
            "regime": "small",
            "candidates": [cand(c) for c in res.all_candidates],
            "optimal": [cand(c) for c in res.optimal],
            "pattern": res.pattern.value,
            "T": res.T_opt,
            "T_raw": raw(env, res.T_opt),
            "N_switch": res.N_switch,
            "bounds": {
                "T_open": [lo, hi],
                "T_open_raw": [raw(env, lo), raw(env, hi)],
                "N_half_open": [nlo, nhi],
            },
            "bounds_ok": res.bounds_ok,
        }
        first = res.optimal[0].schedule
    tr = simulate(env, first, samples_per_arc=cfg.options.samples_per_arc)
    return Output(_doc(cfg, env, result), ["t", "u", "y1", "y2", "y3"], trajectory_rows(tr), not result["bounds_ok"])


def cmd_synthesis(cfg: RunConfig) -> Output:
    env = cfg.env()
    if not env.is_large:
        raise DomainError(f"the synthesis is available for alpha >= pi/4 (alpha={env.alpha})")
    o = cfg.options
    if o.target is not None:
        ans = optimal_to(as_point(o.target / np.linalg.norm(o.target)), env, samples_per_arc=o.samples_per_arc)
        trs = [
            {
                "schedule": schedule_doc(tr.schedule),
                "label": schedule_label(tr.schedule),
                "total_time": tr.total_time,
                "path": trajectory_rows(tr),
            }
            for tr in ans.trajectories
        ]
        result = {
            "mode": "target",
            "target": o.target / np.linalg.norm(o.target),
            "case": ans.case_tag,
            "region": ans.region.value,
            "on_cut_locus": ans.on_cut_locus,
            "total_time": ans.total_time,
            "total_time_raw": raw(env, ans.total_time),
            "trajectories": trs,
        }
        return Output(_doc(cfg, env, result), ["t", "u", "y1", "y2", "y3"], trajectory_rows(ans.trajectories[0]))
    if o.sample is not None:
        pts = fibonacci_sphere(o.sample)
        tags = [classify(p, env).value for p in pts]
        counts: dict[str, int] = {}
        for t in tags:
            counts[t] = counts.get(t, 0) + 1
        result = {
            "mode": "sample",
            "n": o.sample,
            "counts": dict(sorted(counts.items())),
            "points": [[*p, t] for p, t in zip(pts, tags)],
        }
        return Output(_doc(cfg, env, result), ["x", "y", "z", "region"], result["points"])
    if o.cut_locus:
        cl = cut_locus_trace(env, n_lines=o.lines)
        result = {
            "mode": "cut_locus",
            "case": cl.case,
            "start": cl.start,
            "unbracketed": cl.unbracketed,
            "max_time_gap": float(np.max(cl.time_gaps)),
            "points": cl.points,
        }
        return Output(_doc(cfg, env, result), ["x", "y", "z"], cl.points.tolist())
    cov = coverage_time(env)
    result = {
        "mode": "coverage",
        "T": cov.T,
        "T_raw": raw(env, cov.T),
        "beta_bar": cov.beta_bar,
        "last_points": list(cov.last_points),
    }
    if o.verify:
        sm = max_time_over_sphere(env)
        result["search_max"] = sm.time
        result["search_point"] = sm.point
        result["search_agrees"] = abs(sm.time - cov.T) <= 1e-3
    rows = [[*p, cov.T] for p in cov.last_points]
    failed = o.verify and not result["search_agrees"]
    return Output(_doc(cfg, env, result), ["x", "y", "z", "T"], rows, failed)


def rwa_row(energy: float, bound: float) -> dict:
    """Optimal pole-to-pole time against the two-control baseline pi/(2M)."""
    env = ModelParams.from_energy_bound(energy, bound)
    tc = math.pi / (2.0 * bound)
    if env.alpha >= QUARTER_PI:
        T = TWO_PI
        lo = hi = None
    else:
        T = pole_to_pole_small(env).T_opt
        lo, hi = time_bounds(env.alpha)
    T_raw = env.raw_time(T)
    return {
        "E": energy,
        "M": bound,
        "alpha": env.alpha,
        "regime": "large" if env.is_large else "small",
        "T": T,
        "T_raw": T_raw,
        "T_raw_lower": raw(env, lo),
        "T_raw_upper": raw(env, hi),
        "T_C": tc,
        "ratio": T_raw / tc,
        "tc_le_t": tc <= T_raw,
    }


def cmd_compare_rwa(cfg: RunConfig) -> Output:
    if cfg.energy is None:
        raise DomainError("compare-rwa needs --energy and --bound")
    env = cfg.env()
    rows = [rwa_row(cfg.energy, cfg.bound)]
    n = cfg.options.sweep_M
    if n:
        rows += [rwa_row(cfg.energy, float(M)) for M in np.logspace(-2, 2, n)]
    result = {
        "rows": rows,
        "all_tc_le_t": all(r["tc_le_t"] for r in rows),
        "limits": {"small_M_ratio": math.pi / 2.0, "large_M_ratio": 2.0},
    }
    keys = ["E", "M", "alpha", "regime", "T", "T_raw", "T_C", "ratio", "tc_le_t"]
    return Output(_doc(cfg, env, result), keys, [[r[k] for k in keys] for r in rows], not result["all_tc_le_t"])


def random_targets(n: int, seed: int) -> np.ndarray:
    g = np.random.default_rng(seed).normal(size=(n, 3))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def oracle_comparison(env: ModelParams, grid, targets: np.ndarray) -> list[dict]:
    """Closed-form time at each target against the grid time of its nearest node.

    ``pass`` applies the sandwich bound to the target itself.  The grid time
    of a node is the arrival time at its witness point, so the closed-form
    time at the witness is reported too (``witness_pass``); the difference
    between the two isolates the spatial error of the nearest-node lookup.
    """
    rows = []
    for y in targets:
        i = grid.nearest(y)
        val = float(grid.value[i])
        t_y = analytic_time(env, y)
        t_w = analytic_time(env, grid.witness[i])
        rows.append(
            {
                "target": y,
                "node": int(i),
                "oracle": val,
                "analytic": t_y,
                "analytic_witness": t_w,
                "deviation": abs(t_y - val),
                "witness_deviation": abs(t_w - val),
                "pass": abs(t_y - val) <= grid.error_bound,
                "witness_pass": abs(t_w - val) <= grid.error_bound,
            }
        )
    return rows


def cmd_oracle(cfg: RunConfig) -> Output:
    env = cfg.env()
    o = cfg.options
    grid = min_time_grid(env, level=o.mesh_level, dt=o.dt)
    targets = random_targets(o.targets, cfg.seed)
    if o.include_poles:
        targets = np.vstack([targets, SOUTH])
    rows = oracle_comparison(env, grid, targets)
    failures = sum(not r["pass"] for r in rows)
    result = {
        "mesh_level": o.mesh_level,
        "dt": o.dt,
        "mesh_h": grid.mesh_h,
        "error_bound": grid.error_bound,
        "nodes": len(grid.nodes),
        "steps": grid.steps,
        "targets": rows,
        "failures": failures,
        "all_pass": failures == 0,
        "all_witness_pass": all(r["witness_pass"] for r in rows),
        "max_deviation": max(r["deviation"] for r in rows),
        "max_witness_deviation": max(r["witness_deviation"] for r in rows),
    }
    if o.front:
        _write(o.front, grid.to_csv())
    out = Output(_doc(cfg, env, result), failed=failures > 0, csv_text=grid.to_csv())
    if failures:
        out.reason = f"{failures} of {len(rows)} targets exceed the sandwich bound {grid.error_bound:.4f}"
    return out


def cmd_patterns(cfg: RunConfig) -> Output:
    o = cfg.options
    sweeps = []
    for m in o.m:
        sw = sweep_pattern_boundaries(m, n_R=o.sweep_R)
        sweeps.append(
            {
                "m": m,
                "R": sw.R,
                "patterns": sw.patterns,
                "sequence": sw.sequence,
                "r1": sw.r1,
                "r2": sw.r2,
                "b_band_width": sw.gap,
            }
        )
    r2 = [s["r2"] for s in sweeps]
    dec = all(a is not None and b is not None and b < a for a, b in zip(r2, r2[1:]))
    result = {"sweeps": sweeps, "r2_strictly_decreasing": dec}
    rows = [[s["m"], R, p] for s in sweeps for R, p in zip(s["R"], s["patterns"])]
    env = cfg.env() if (cfg.alpha is not None or cfg.energy is not None) else None
    out = Output(_doc(cfg, env, result), ["m", "R", "pattern"], rows, not dec)
    if not dec:
        out.reason = "r2 is not strictly decreasing in m (unresolved boundaries need a finer --sweep-R)"
    return out


HANDLERS: dict[str, Callable[[RunConfig], Output]] = {
    "pole2pole": cmd_pole2pole,
    "synthesis": cmd_synthesis,
    "compare-rwa": cmd_compare_rwa,
    "oracle": cmd_oracle,
    "patterns": cmd_patterns,
}


def _doc(cfg: RunConfig, env: ModelParams | None, result: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": cfg.command,
        "params": {
            "alpha": None if env is None else env.alpha,
            "energy": cfg.energy,
            "bound": cfg.bound,
            "k": None if env is None else env.k,
            "seed": cfg.seed,
        },
        "result": result,
    }


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=parse_angle, help="control-bound angle in (0, pi/2), e.g. 0.3 or pi/3")
    common.add_argument("--energy", type=_positive(float), metavar="E", help="energy gap (with --bound)")
    common.add_argument("--bound", type=_positive(float), metavar="M", help="control bound (with --energy)")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized targets")
    common.add_argument("--samples-per-arc", type=_positive(int), default=16, help="path samples per arc")

    p = argparse.ArgumentParser(prog="blochsynth", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("pole2pole", parents=[common], help="optimal transfer between the poles")

    s = sub.add_parser("synthesis", parents=[common], help="optimal synthesis queries (alpha >= pi/4)")
    mode = s.add_mutually_exclusive_group(required=True)
    mode.add_argument("--target", type=parse_point, metavar="x,y,z")
    mode.add_argument("--sample", type=_positive(int), metavar="N", help="classify N golden-spiral points")
    mode.add_argument("--cut-locus", action="store_true", help="trace the overlap curve")
    mode.add_argument("--coverage", action="store_true", help="time to reach the whole sphere")
    s.add_argument("--lines", type=_positive(int), default=120, help="slices for --cut-locus")
    s.add_argument("--verify", action="store_true", help="check --coverage against extremal search")

    r = sub.add_parser("compare-rwa", parents=[common], help="compare with the two-control baseline")
    r.add_argument("--sweep-M", type=_positive(int), default=0, metavar="N", help="add N bounds in [0.01, 100]")

    o = sub.add_parser("oracle", parents=[common], help="brute-force front against the synthesis")
    o.add_argument("--mesh-level", type=int, default=5, metavar="L")
    o.add_argument("--dt", type=_positive(float), default=0.005, metavar="DT")
    o.add_argument("--targets", type=_positive(int), default=50, metavar="N")
    o.add_argument("--include-poles", action="store_true", help="also compare at P_S")
    o.add_argument("--front", metavar="PATH", help="also write the front grid CSV here")

    pt = sub.add_parser("patterns", parents=[common], help="pattern sequence over the remainder")
    pt.add_argument("--sweep-R", type=_positive(int), default=64, metavar="N")
    pt.add_argument("--m", type=_positive(int), nargs="+", default=[10, 20, 40])
    return p


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    cfg = RunConfig.from_args(ns, parser)
    try:
        out = HANDLERS[cfg.command](cfg)
        if cfg.fmt == "json":
            text = emit_json(out.doc)
        elif out.csv_text is not None:
            text = out.csv_text
        else:
            text = emit_csv(out.csv_header, out.csv_rows)
        _write(cfg.out, text)
    except DomainError as e:
        print(f"blochsynth: {e}", file=sys.stderr)
        return ExitCode.USAGE
    except OSError as e:
        print(f"blochsynth: {e}", file=sys.stderr)
        return ExitCode.USAGE
    except (ConsistencyError, jsonschema.ValidationError) as e:
        print(f"blochsynth: consistency failure: {e}", file=sys.stderr)
        return ExitCode.CONSISTENCY
    if out.failed:
        print(f"blochsynth: {out.reason or 'a checked property failed'}; see the report", file=sys.stderr)
        return ExitCode.CONSISTENCY
    return ExitCode.OK


if __name__ == "__main__":
    sys.exit(main())
