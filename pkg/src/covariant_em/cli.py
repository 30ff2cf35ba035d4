"""``covem``: evaluate scenario files and run the invariant suites.

    covem decompose  --config scenario.yaml
    covem stress     --config scenario.yaml --tensors abraham,minkowski_sym,oracle_v_tethered
    covem boost-zeta --config scenario.yaml --beta 0:0.9:0.1 --format csv
    covem verify all --seed 42

Exit codes: 0 when every check passes, 1 on a check failure, 2 on a
configuration or usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Any

import numpy as np

from . import constitutive as con
from . import exterior as ext
from . import stress as st
from . import verify
from .fields import (
    FrameFields,
    Observer,
    decompose_F,
    decompose_G,
    lorentz_boost,
    reconstruct_F,
    reconstruct_G,
    rest_frame_boost,
)
from .scenarios import REPORT_SCHEMA, ConfigError, Scenario, load_scenario

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
TENSORS = ("abraham", "minkowski_sym", "comoving", "oracle_v_tethered", "oracle_metric_independent")
DEFAULT_TENSORS = "abraham,minkowski_sym,comoving"
DEFAULT_BETA = "0:0.9:0.1"

# tolerances of the per-scenario checks
ROUNDTRIP_TOL = 1e-12
SPATIAL_TOL = 1e-12
GAP_TOL = 1e-12
VACUUM_GAP_TOL = 1e-13
COMOVING_TOL = 1e-12
ORACLE_TOL = 1e-6
BETA0_TOL = 1e-12


def _check(name: str, violation: float, threshold: float, **extra) -> dict:
    violation = float(violation)
    out = {"name": name, "violation": violation, "threshold": threshold,
           "passed": bool(math.isfinite(violation) and violation <= threshold)}
    out.update(extra)
    return out


def _vec(a) -> list[float]:
    return [float(x) for x in np.asarray(getattr(a, "components", a)).ravel()]


def _mat(a) -> list[list[float]]:
    return [[float(x) for x in row] for row in np.asarray(a)]


def _norm(a: ext.KForm, g: ext.Metric) -> float:
    """sqrt|g^-1(a, a)| for a 1-form."""
    return math.sqrt(abs(g.inverse_dot(a, a)))


def _report(command: str, scen_config: dict | None, results: dict, checks: list[dict]) -> dict:
    report: dict[str, Any] = {"schema": REPORT_SCHEMA, "command": command}
    if scen_config is not None:
        report["config"] = scen_config
    report["results"] = results
    report["checks"] = checks
    report["passed"] = all(c["passed"] for c in checks)
    return report


# commands --------------------------------------------------------------------

def cmd_decompose(scen: Scenario) -> dict:
    g, k, F, G = scen.metric, scen.constants, scen.F, scen.G
    rows, checks = [], []
    plane = "plane_wave" in scen.config["field"]
    for i, obs in enumerate(scen.observers):
        e, b = decompose_F(F, obs, k)
        d, h = decompose_G(G, obs, k)
        rows.append({
            "four_velocity": _vec(obs.U),
            "e": _vec(e), "b": _vec(b), "d": _vec(d), "h": _vec(h),
            "e_norm": _norm(e, g), "b_norm": _norm(b, g),
        })
        scale = max(F.norm(), 1e-300)
        spatial = max(abs(float(obs.U @ x.components)) for x in (e, b, d, h)) / max(
            e.norm(), b.norm(), d.norm(), h.norm(), 1e-300)
        checks.append(_check(f"spatiality[{i}]", spatial, SPATIAL_TOL))
        checks.append(_check(f"roundtrip_F[{i}]",
                             (reconstruct_F(e, b, obs, k) - F).norm() / scale, ROUNDTRIP_TOL))
        checks.append(_check(f"roundtrip_G[{i}]",
                             (reconstruct_G(d, h, obs, k) - G).norm() / max(G.norm(), 1e-300),
                             ROUNDTRIP_TOL))
        if plane:
            en, bn = _norm(e, g), _norm(b, g)
            checks.append(_check(f"plane_wave_impedance[{i}]",
                                 abs(en - k.c * bn) / max(en, 1e-300), ROUNDTRIP_TOL))
    return _report("decompose", scen.config, {"observers": rows}, checks)


def _reference_observer(scen: Scenario) -> Observer:
    """The medium's rest frame, or the first listed observer for vacuum."""
    if scen.medium.V is not None:
        return Observer(scen.medium.V, scen.metric)
    return scen.observers[0]


def cmd_stress(scen: Scenario, tensors: list[str]) -> dict:
    g, k, F, m = scen.metric, scen.constants, scen.F, scen.medium
    G = scen.G
    ref = _reference_observer(scen)
    abraham = st.abraham_T(F, m, g)
    mink = st.minkowski_sym_T(F, G, g)
    e, b = decompose_F(F, ref, k)
    d, h = decompose_G(G, ref, k)
    s = st.s_form(F, G, ref.U, g)
    Vt = ref.coframe.components
    half_sym = 0.5 * (np.outer(Vt, s.components) + np.outer(s.components, Vt))
    gap = abraham - mink
    scale = max(abraham.norm(), mink.norm(), 1e-300)

    computed: dict[str, st.StressEnergy] = {}
    checks = []
    for name in tensors:
        if name == "abraham":
            computed[name] = abraham
        elif name == "minkowski_sym":
            computed[name] = mink
        elif name == "comoving":
            computed[name] = st.comoving_T(FrameFields(e, b, d, h, ref, k), ref.U, g)
            checks.append(_check("comoving_equivalence",
                                 verify.rel(computed[name].components, abraham.components),
                                 COMOVING_TOL))
        else:
            response = name.removeprefix("oracle_")
            target = abraham if response == "v_tethered" else mink
            try:
                T = st.metric_variation_oracle(F, m, g, response)
            except st.OracleConditioningError as exc:
                checks.append({"name": name, "violation": None, "threshold": ORACLE_TOL,
                               "passed": False, "error": str(exc)})
                continue
            computed[name] = T
            checks.append(_check(name, verify.rel(T.components, target.components), ORACLE_TOL))

    checks.insert(0, _check("gap_decomposition", np.max(np.abs(gap - half_sym)) / scale, GAP_TOL))
    if m.kind == "vacuum":
        checks.insert(1, _check("vacuum_degeneracy", np.max(np.abs(gap)) / scale, VACUUM_GAP_TOL))

    observers = []
    for obs in scen.observers:
        entry = {"four_velocity": _vec(obs.U)}
        for name, T in computed.items():
            entry[name] = {
                "energy_density": float(st.energy_density(T, obs)),
                "momentum_density": _vec(st.momentum_density(T, obs, g)),
            }
        observers.append(entry)

    results = {
        "reference_four_velocity": _vec(ref.U),
        "tensors": {name: _mat(T.components) for name, T in computed.items()},
        "gap": {
            "components": _mat(gap),
            "norm": float(np.max(np.abs(gap))),
            "s": _vec(s),
            "half_symmetrized_s": _mat(half_sym),
        },
        "poynting": _vec(st.poynting(e, h, ref.U, g)),
        "observers": observers,
    }
    return _report("stress", scen.config, results, checks)


BLOCK_LABELS = [f"{blk}_{i}{j}" for blk in con.BLOCKS for i in (1, 2, 3) for j in (1, 2, 3)]


def boost_blocks(scen: Scenario, beta: float) -> dict[str, np.ndarray]:
    """Effective zeta blocks seen by an observer boosted by beta from the medium frame."""
    g, k, m = scen.metric, scen.constants, scen.medium
    rest = rest_frame_boost(m.V) if m.V is not None else np.eye(4)
    L = lorentz_boost(beta, scen.config["boost_axis"]) @ rest
    obs = Observer(np.linalg.inv(L)[:, 0], g)
    zetas = con.effective_zetas(con.as_rank4(m, g), obs, g, k)
    return con.frame_blocks(zetas, L)


def parse_beta(text: str) -> list[float]:
    text = text.strip()
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
                raise ValueError
            start, stop, step = parts
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = [round(start + i * step, 12) for i in range(n)]
        else:
            values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ConfigError("--beta", f"expected a list a,b,c or start:stop:step, got {text!r}")
    if not values:
        raise ConfigError("--beta", "empty sweep")
    for v in values:
        if not (math.isfinite(v) and abs(v) < 1):
            raise ConfigError("--beta", f"|beta| must be below 1, got {v!r}")
    return values


def cmd_boost_zeta(scen: Scenario, betas: list[float]) -> dict:
    g, m = scen.metric, scen.medium
    if not g.is_flat():
        raise ConfigError("metric", "boost-zeta needs the Minkowski metric: boosts are only "
                                    "global coordinate changes in flat spacetime")
    if not m.is_pointwise:
        raise ConfigError("medium", "boost-zeta needs constant medium parameters")
    rows, checks = [], []
    for beta in betas:
        blocks = boost_blocks(scen, beta)
        row: dict[str, Any] = {"beta": float(beta)}
        for label in BLOCK_LABELS:
            blk, ij = label.split("_")
            row[label] = float(blocks[blk][int(ij[0]) - 1, int(ij[1]) - 1])
        row["cross_norm"] = float(math.sqrt(np.sum(blocks["db"] ** 2) + np.sum(blocks["he"] ** 2)))
        rows.append(row)
        if beta == 0.0:
            rest = rest_frame_boost(m.V) if m.V is not None else np.eye(4)
            own = con.frame_blocks({blk: m.zeta(blk) for blk in con.BLOCKS}, rest) \
                if m.kind != "vacuum" else {blk: np.zeros((3, 3)) for blk in con.BLOCKS}
            if m.kind == "vacuum":
                eps0 = scen.constants.eps0
                own["de"] = eps0 * np.eye(3)
                own["hb"] = np.eye(3) / scen.constants.mu0
            got = np.concatenate([blocks[blk].ravel() for blk in con.BLOCKS])
            want = np.concatenate([own[blk].ravel() for blk in con.BLOCKS])
            checks.append(_check("beta0_comoving", verify.rel(got, want), BETA0_TOL))
    return _report("boost-zeta", scen.config, {"columns": ["beta"] + BLOCK_LABELS + ["cross_norm"],
                                               "rows": rows}, checks)


def cmd_verify(suite: str, seed: int) -> dict:
    try:
        results = verify.run_suite(suite, seed)
    except KeyError as exc:
        raise ConfigError("suite", exc.args[0]) from exc
    checks = [r.as_dict() for r in results]
    return _report("verify", None, {"suite": suite, "seed": seed}, checks)


# output ----------------------------------------------------------------------

def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False, ensure_ascii=False) + "\n"


def _flatten(value, prefix="") -> list[tuple[str, Any]]:
    if isinstance(value, dict):
        out = []
        for key, v in value.items():
            out.extend(_flatten(v, f"{prefix}.{key}" if prefix else str(key)))
        return out
    if isinstance(value, list) and value and isinstance(value[0], (dict, list)):
        out = []
        for i, v in enumerate(value):
            out.extend(_flatten(v, f"{prefix}[{i}]"))
        return out
    if isinstance(value, list):
        return [(prefix, " ".join(repr(float(x)) for x in value))]
    return [(prefix, value)]


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else str(v)


def to_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    results = report["results"]
    if report["command"] == "boost-zeta":
        cols = results["columns"]
        writer.writerow(cols)
        for row in results["rows"]:
            writer.writerow([_cell(row[c]) for c in cols])
    elif report["command"] == "verify":
        cols = ["name", "suite", "samples", "violation", "threshold", "passed"]
        writer.writerow(cols)
        for chk in report["checks"]:
            writer.writerow([_cell(chk[c]) for c in cols])
    else:
        writer.writerow(["quantity", "value"])
        for key, v in _flatten(results):
            writer.writerow([key, _cell(v)])
        for chk in report["checks"]:
            writer.writerow([f"check.{chk['name']}", _cell(chk["passed"])])
    return buf.getvalue()


def _use_color(stream) -> bool:
    return "NO_COLOR" not in os.environ and hasattr(stream, "isatty") and stream.isatty()


def to_table(report: dict, color: bool = False) -> str:
    def status(ok):
        word = "PASS" if ok else "FAIL"
        if color:
            return f"\033[{32 if ok else 31}m{word}\033[0m"
        return word

    lines = [f"{report['command']}  ({report['schema']})"]
    if report["command"] == "boost-zeta":
        cols = ["beta", "cross_norm"] + [c for c in report["results"]["columns"]
                                         if c.startswith(("db_", "he_"))]
        lines.append("  ".join(f"{c:>12}" for c in cols))
        for row in report["results"]["rows"]:
            lines.append("  ".join(f"{row[c]:>12.5g}" for c in cols))
    elif report["command"] != "verify":
        for key, v in _flatten(report["results"]):
            lines.append(f"{key:<48} {_cell(v)}")
    width = max((len(c["name"]) for c in report["checks"]), default=0)
    for c in report["checks"]:
        viol = "n/a" if c["violation"] is None else f"{c['violation']:.3e}"
        lines.append(f"{status(c['passed'])}  {c['name']:<{width}}  "
                     f"violation {viol}  threshold {c['threshold']:.1e}")
    lines.append(status(report["passed"]))
    return "\n".join(lines) + "\n"


def render(report: dict, fmt: str, color: bool = False) -> str:
    if fmt == "json":
        return to_json(report)
    if fmt == "csv":
        return to_csv(report)
    return to_table(report, color)


# entry point -----------------------------------------------------------------

def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "table"), default="json")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--seed", type=_seed, default=0, help="unsigned 64-bit seed")

    parser = argparse.ArgumentParser(prog="covem", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("decompose", "e, b, d, h for each observer"),
                            ("stress", "stress-energy tensors and the Abraham-Minkowski gap"),
                            ("boost-zeta", "effective zeta blocks along a boost sweep")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--config", required=True, help="scenario file (YAML or JSON)")
        if name == "stress":
            p.add_argument("--tensors", default=DEFAULT_TENSORS,
                           help=f"comma-separated subset of {', '.join(TENSORS)}")
        if name == "boost-zeta":
            p.add_argument("--beta", default=DEFAULT_BETA, help="list a,b,c or start:stop:step")
    p = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    p.add_argument("suite", nargs="?", default="all", help=f"one of {', '.join(verify.SUITES)}")
    return parser


def _tensor_list(text: str) -> list[str]:
    names = [t.strip() for t in text.split(",") if t.strip()]
    bad = [t for t in names if t not in TENSORS]
    if bad or not names:
        raise ConfigError("--tensors", f"unknown tensors {bad}; choose from {', '.join(TENSORS)}")
    return list(dict.fromkeys(names))


def run(args: argparse.Namespace) -> dict:
    if args.command == "verify":
        return cmd_verify(args.suite, args.seed)
    scen = load_scenario(args.config)
    if args.command == "decompose":
        return cmd_decompose(scen)
    if args.command == "stress":
        return cmd_stress(scen, _tensor_list(args.tensors))
    return cmd_boost_zeta(scen, parse_beta(args.beta))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = run(args)
    except (ConfigError, OSError) as exc:
        path = getattr(exc, "path", getattr(exc, "filename", None))
        message = getattr(exc, "message", None) or str(exc)
        if args.format == "json":
            sys.stderr.write(json.dumps({"schema": REPORT_SCHEMA, "error": {
                "path": str(path), "message": message}}) + "\n")
        else:
            sys.stderr.write(f"covem: config error at {path}: {message}\n")
        return EXIT_CONFIG
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(render(report, args.format))
    else:
        sys.stdout.write(render(report, args.format, color=_use_color(sys.stdout)))
    return EXIT_OK if report["passed"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
