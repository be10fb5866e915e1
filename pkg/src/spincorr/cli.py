"""Command-line client for the correlation service.

Each subcommand builds a request, posts it to the REST service and writes
CSV.  By default the service runs in-process (no socket); ``--server URL``
points the same client at a remote instance.  Numbers are written with 12
significant digits, so identical run configurations produce byte-identical
files.

Exit status: 0 on success, 1 when a verification suite fails its threshold,
2 on configuration or validation errors.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys

import httpx

from .curves import float_grid
from .matrixio import load_matrix

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2

_DEFAULT_SEED = 12345


class ConfigError(Exception):
    pass


def fmt(value) -> str:
    """12 significant digits, the pinned CSV number format."""
    return f"{float(value):.12g}"


def parse_grid(text: str) -> tuple:
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must be MIN:STEP:MAX, got {text!r}")
    try:
        start, step, stop = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"grid must be numeric MIN:STEP:MAX, got {text!r}") from None
    return start, step, stop


def parse_points(text: str) -> list:
    try:
        pts = [float(p) for p in str(text).split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"points must be comma-separated numbers, got {text!r}") from None
    if not pts:
        raise ConfigError("points list is empty")
    return pts


def parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    s = str(text).strip().lower()
    if s in ("true", "yes", "on", "1"):
        return True
    if s in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def load_config(path: str) -> dict:
    """Line-oriented ``key = value`` file; blank lines and # comments ignored."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    cfg = {}
    for lineno, line in enumerate(raw.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        cfg[key.strip()] = value.strip()
    return cfg


def merge_config(args: argparse.Namespace, spec: list) -> dict:
    """Resolve option values: command line first, then config file, then the
    built-in default.  Unknown config keys are rejected."""
    cfg = load_config(args.config) if getattr(args, "config", None) else {}
    known = {key for _, key, _, _ in spec}
    unknown = sorted(set(cfg) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    resolved = {}
    for attr, key, cast, default in spec:
        value = getattr(args, attr, None)
        if value is None and key in cfg:
            try:
                value = cast(cfg[key])
            except ConfigError:
                raise
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"config key {key!r}: {exc}") from None
        if value is None:
            value = default
        resolved[attr] = value
    return resolved


def _call(server, path: str, payload: dict) -> tuple:
    """POST the payload, in-process unless a server URL is given."""
    if server:
        try:
            with httpx.Client(base_url=server, timeout=None) as client:
                response = client.post(path, json=payload)
        except httpx.HTTPError as exc:
            raise ConfigError(f"cannot reach server {server!r}: {exc}") from None
    else:
        from .service.app import app

        async def go():
            transport = httpx.ASGITransport(app=app, raise_app_exceptions=False)
            async with httpx.AsyncClient(
                transport=transport, base_url="http://spincorr.internal", timeout=None
            ) as client:
                return await client.post(path, json=payload)

        response = asyncio.run(go())
    try:
        data = response.json()
    except (json.JSONDecodeError, ValueError):
        data = {"detail": response.text}
    return response.status_code, data


def _check_ok(status: int, data) -> dict:
    if status == 200:
        return data
    detail = data.get("detail") if isinstance(data, dict) else data
    if not isinstance(detail, str):
        detail = json.dumps(detail)
    raise ConfigError(f"request rejected (HTTP {status}): {detail}")


def write_csv(out, header: str, rows) -> None:
    lines = [header]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else fmt(cell) for cell in row))
    text = "\n".join(lines) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="ascii", newline="") as fh:
            fh.write(text)


def _coherence_payload(res: dict) -> dict:
    return {"kind": res["coherence"], "tau_c": res["tau_c"]}


def cmd_weight_curve(args) -> int:
    spec = [
        ("k", "k", int, 10),
        ("p_grid", "P-grid", str, "0:0.01:1"),
        ("out", "out", str, "-"),
        ("server", "server", str, None),
    ]
    res = merge_config(args, spec)
    start, step, stop = parse_grid(res["p_grid"])
    payload = {"k": res["k"], "p_grid": {"start": start, "step": step, "stop": stop}}
    data = _check_ok(*_call(res["server"], "/weight-curve", payload))
    write_csv(res["out"], "P,w", [(r["p"], r["w"]) for r in data["rows"]])
    return EXIT_OK


def cmd_dip_curve(args) -> int:
    spec = [
        ("statistics", "statistics", str, "fermion"),
        ("p", "P", float, 0.0),
        ("coherence", "coherence", str, "gaussian"),
        ("tau_c", "tau-c", float, 1.0),
        ("max_separation", "max-separation", float, None),
        ("n_points", "n-points", int, 101),
        ("out", "out", str, "-"),
        ("server", "server", str, None),
    ]
    res = merge_config(args, spec)
    payload = {
        "statistics": res["statistics"],
        "p": res["p"],
        "coherence": _coherence_payload(res),
        "max_separation": res["max_separation"],
        "n_points": res["n_points"],
    }
    data = _check_ok(*_call(res["server"], "/dip-curve", payload))
    write_csv(
        res["out"],
        "delta_tau,O2_normalized",
        [(r["delta_tau"], r["o2_normalized"]) for r in data["rows"]],
    )
    return EXIT_OK


def _matrix_payload_from_file(path: str) -> dict:
    try:
        matrix = load_matrix(path)
    except OSError as exc:
        raise ConfigError(f"cannot read matrix file: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"bad matrix file {path!r}: {exc}") from None
    entries = [[[z.real, z.imag] for z in row] for row in matrix.entries]
    return {"entries": entries}


def cmd_corr_table(args) -> int:
    spec = [
        ("statistics", "statistics", str, "fermion"),
        ("k", "k", int, None),
        ("p", "P", float, None),
        ("p_grid", "P-grid", str, None),
        ("coherence", "coherence", str, "gaussian"),
        ("tau_c", "tau-c", float, 1.0),
        ("matrix_file", "matrix-file", str, None),
        ("points", "points", parse_points, None),
        ("out", "out", str, "-"),
        ("server", "server", str, None),
    ]
    res = merge_config(args, spec)
    if res["p"] is not None and res["p_grid"] is not None:
        raise ConfigError("use either --P or --P-grid, not both")
    if res["p"] is not None:
        p_values = [res["p"]]
    else:
        start, step, stop = parse_grid(res["p_grid"] or "0:0.25:1")
        p_values = float_grid(start, step, stop)
    if res["matrix_file"] is not None and res["points"] is not None:
        raise ConfigError("use either --matrix-file or --points, not both")
    if res["matrix_file"] is None and res["points"] is None:
        raise ConfigError("corr-table needs detection points: --matrix-file or --points")
    payload = {
        "statistics": res["statistics"],
        "k": res["k"],
        "p_values": p_values,
        "coherence": _coherence_payload(res),
    }
    if res["matrix_file"] is not None:
        payload["matrix"] = _matrix_payload_from_file(res["matrix_file"])
    else:
        payload["points"] = res["points"]
    data = _check_ok(*_call(res["server"], "/corr-table", payload))
    write_csv(
        res["out"],
        "k,P,O_enumeration,O_grouped,rel_diff",
        [
            (r["k"], r["p"], r["o_enumeration"], r["o_grouped"], r["rel_diff"])
            for r in data["rows"]
        ],
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = [
        ("statistics", "statistics", str, None),  # None = both suites
        ("instances", "instances", int, 200),
        ("samples", "samples", int, 1_000_000),
        ("seed", "seed", int, _DEFAULT_SEED),
        ("workers", "workers", int, 1),
        ("corrupt_kernel", "corrupt-kernel", parse_bool, False),
        ("out", "out", str, None),
        ("server", "server", str, None),
    ]
    res = merge_config(args, spec)
    if res["statistics"] not in (None, "fermion", "boson"):
        raise ConfigError(f"unknown suite {res['statistics']!r}")
    run_fermion = res["statistics"] in (None, "fermion")
    run_boson = res["statistics"] in (None, "boson")
    summary = sys.stderr if res["out"] == "-" else sys.stdout
    csv_rows = []
    all_passed = True

    if run_fermion:
        payload = {
            "instances": res["instances"],
            "seed": res["seed"],
            "corrupt_kernel": res["corrupt_kernel"],
        }
        data = _check_ok(*_call(res["server"], "/verify/fermion", payload))
        all_passed &= data["passed"]
        for c in data["cases"]:
            csv_rows.append(
                (
                    "fermion",
                    f"i{c['index']}_m{c['n_modes']}_k{c['order']}",
                    "rel_deviation",
                    c["deviation"],
                    data["tolerance"],
                    "pass" if c["passed"] else "fail",
                )
            )
        print(
            f"fermion suite: {len(data['cases'])} cases, "
            f"max relative deviation {data['max_deviation']:.3e} "
            f"(tolerance {data['tolerance']:.1e}) -> "
            f"{'PASS' if data['passed'] else 'FAIL'}",
            file=summary,
        )

    if run_boson:
        payload = {
            "samples": res["samples"],
            "seed": res["seed"],
            "workers": res["workers"],
            "corrupt_kernel": res["corrupt_kernel"],
        }
        data = _check_ok(*_call(res["server"], "/verify/boson", payload))
        all_passed &= data["passed"]
        max_rel = max(c["rel_error"] for c in data["cases"])
        for c in data["cases"]:
            csv_rows.append(
                (
                    "boson",
                    f"k{c['order']}_P{fmt(c['polarization'])}_{c['matrix_kind']}",
                    "abs_z",
                    abs(c["z_score"]),
                    data["threshold"],
                    "pass" if c["passed"] else "fail",
                )
            )
        print(
            f"boson suite: {len(data['cases'])} cases, "
            f"max |z| {data['max_abs_z']:.2f} (threshold {data['threshold']:.1f}), "
            f"max relative error {100.0 * max_rel:.3f}% -> "
            f"{'PASS' if data['passed'] else 'FAIL'}",
            file=summary,
        )

    print(f"overall: {'PASS' if all_passed else 'FAIL'}", file=summary)
    if res["out"] is not None:
        write_csv(res["out"], "suite,case,metric,value,threshold,status", csv_rows)
    return EXIT_OK if all_passed else EXIT_VERIFY_FAILED


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("spincorr.service.app:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spincorr",
        description="Correlation functions of partially polarized chaotic beams.",
    )
    from . import __version__

    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="key = value config file; flags override it")
        sp.add_argument("--server", help="base URL of a running service (default: in-process)")
        sp.add_argument("--out", help="output CSV path, '-' for stdout")

    wc = sub.add_parser("weight-curve", help="weight factor w(P) = rho1^k + rho2^k over a P grid")
    wc.add_argument("--k", type=int, help="correlation order (default 10)")
    wc.add_argument("--P-grid", dest="p_grid", metavar="MIN:STEP:MAX", help="default 0:0.01:1")
    wc.set_defaults(fn=cmd_weight_curve)
    common(wc)

    dc = sub.add_parser("dip-curve", help="normalized two-detector correlation vs separation")
    dc.add_argument("--statistics", choices=["fermion", "boson"])
    dc.add_argument("--P", dest="p", type=float, help="degree of polarization (default 0)")
    dc.add_argument("--coherence", choices=["gaussian", "lorentzian"])
    dc.add_argument("--tau-c", dest="tau_c", type=float, help="correlation time (default 1)")
    dc.add_argument("--max-separation", dest="max_separation", type=float,
                    help="largest separation (default 5 * tau_c)")
    dc.add_argument("--n-points", dest="n_points", type=int, help="grid size (default 101)")
    dc.set_defaults(fn=cmd_dip_curve)
    common(dc)

    ct = sub.add_parser("corr-table",
                        help="k-point correlations by both partition routes, for k'=1..k")
    ct.add_argument("--k", type=int, help="largest order (default: number of points)")
    ct.add_argument("--P", dest="p", type=float, help="single degree of polarization")
    ct.add_argument("--P-grid", dest="p_grid", metavar="MIN:STEP:MAX", help="default 0:0.25:1")
    ct.add_argument("--statistics", choices=["fermion", "boson"])
    ct.add_argument("--coherence", choices=["gaussian", "lorentzian"])
    ct.add_argument("--tau-c", dest="tau_c", type=float)
    ct.add_argument("--matrix-file", dest="matrix_file", help="explicit coherence matrix file")
    ct.add_argument("--points", type=parse_points, help="comma-separated detection times")
    ct.set_defaults(fn=cmd_corr_table)
    common(ct)

    vf = sub.add_parser("verify", help="run the self-verification suites")
    vf.add_argument("--statistics", choices=["fermion", "boson"],
                    help="run a single suite (default: both)")
    vf.add_argument("--instances", type=int, help="fermion suite cases (default 200)")
    vf.add_argument("--samples", type=int, help="Monte Carlo samples (default 1000000)")
    vf.add_argument("--seed", type=int, help=f"RNG seed (default {_DEFAULT_SEED})")
    vf.add_argument("--workers", type=int, help="Monte Carlo workers (default 1)")
    vf.add_argument("--corrupt-kernel", dest="corrupt_kernel", action="store_true", default=None,
                    help="fault injection: perturb the kernel so the suites must fail")
    vf.set_defaults(fn=cmd_verify)
    common(vf)

    sv = sub.add_parser("serve", help="run the REST service")
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8000)
    sv.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BrokenPipeError:
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
