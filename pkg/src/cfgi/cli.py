"""Command-line front end.

Every command is a thin client of the HTTP service: by default the service
runs in process, with --server (or CFGI_SERVER) requests go to a remote
instance instead. File artifacts are always written on the client side.

Exit codes: 0 success, 2 usage error (bad flags, bad config, rejected
parameters), 3 I/O or service-availability error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from . import __version__, pnm, tables
from .client import ServiceClient, ServiceError, ServiceUnavailable
from .metrics import MetricPoint
from .svg import write_svg_heatmap

__all__ = ["main", "entrypoint"]

ENV_SERVER = "CFGI_SERVER"
ENV_OUTPUT_DIR = "CFGI_OUTPUT_DIR"

PROBS_KEYS = frozenset({
    "m", "n", "blocked", "open", "t_abs", "t_phase",
    "outer_rotation", "inner_rotation",
    "preset", "hwp_loss", "pbs_loss", "mirror_loss", "heralding",
    "server",
})
SWEEP_KEYS = frozenset({
    "m_min", "m_max", "n_min", "n_max", "reassign_dl", "noise_model",
    "preset", "hwp_loss", "pbs_loss", "mirror_loss", "heralding",
    "out", "svg", "server",
})
IMAGE_KEYS = frozenset({
    "mask", "phase", "m", "n", "n_bar", "seed", "blur", "reassign_dl",
    "outer_rotation", "inner_rotation",
    "preset", "hwp_loss", "pbs_loss", "mirror_loss", "heralding",
    "out_dir", "server",
})
SERVE_KEYS = frozenset({"host", "port"})

REQUEST_KEYS = {
    "probs": PROBS_KEYS - {"server"},
    "sweep": SWEEP_KEYS - {"server", "out", "svg"},
    "image": IMAGE_KEYS - {"server", "out_dir", "mask", "phase"},
}


class UsageError(Exception):
    pass


def _add_loss_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("component losses")
    group.add_argument("--preset", choices=["ideal", "fig6"], default=None,
                       help="loss preset (default ideal)")
    group.add_argument("--hwp-loss", type=float, default=None,
                       help="waveplate power loss per rotation")
    group.add_argument("--pbs-loss", type=float, default=None,
                       help="splitter power loss per traversal")
    group.add_argument("--mirror-loss", type=float, default=None,
                       help="power loss per outer cycle (switching mirror)")
    group.add_argument("--heralding", type=float, default=None,
                       help="coincidence heralding efficiency in (0, 1]")


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--server", default=None,
                        help=f"service URL (default: in-process; env {ENV_SERVER})")
    parser.add_argument("--config", default=None,
                        help="JSON file supplying defaults for any flag of this command")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfgi",
        description="Counterfactual ghost imaging simulator.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command")

    p_probs = sub.add_parser("probs", help="evaluate one protocol configuration")
    p_probs.add_argument("--m", type=int, default=None, help="outer cycles (>= 2)")
    p_probs.add_argument("--n", type=int, default=None,
                         help="inner cycles per outer cycle (default 1)")
    p_probs.add_argument("--blocked", action="store_true", default=None,
                         help="fully blocking object")
    p_probs.add_argument("--open", action="store_true", default=None,
                         help="fully open channel")
    p_probs.add_argument("--t-abs", type=float, default=None,
                         help="object |t| in [0, 1]")
    p_probs.add_argument("--t-phase", type=float, default=None,
                         help="object phase in radians (with --t-abs)")
    p_probs.add_argument("--outer-rotation", type=float, default=None,
                         help="override outer rotation angle (radians)")
    p_probs.add_argument("--inner-rotation", type=float, default=None,
                         help="override inner rotation angle (radians)")
    _add_loss_flags(p_probs)
    _add_common_flags(p_probs)

    p_sweep = sub.add_parser("sweep", help="metric grid over cycle counts, CSV out")
    p_sweep.add_argument("--m-min", type=int, default=None)
    p_sweep.add_argument("--m-max", type=int, default=None)
    p_sweep.add_argument("--n-min", type=int, default=None)
    p_sweep.add_argument("--n-max", type=int, default=None)
    p_sweep.add_argument("--reassign-dl", action="store_true", default=None,
                         help="count discard-port clicks as open-channel clicks")
    p_sweep.add_argument("--noise-model", choices=["poisson-sum", "binomial"],
                         default=None, help="noise model for the SNR factor")
    p_sweep.add_argument("--out", default=None,
                         help=f"output CSV path (default sweep.csv under ${ENV_OUTPUT_DIR} or .)")
    p_sweep.add_argument("--svg", action="store_true", default=None,
                         help="also write one SVG heatmap per metric beside the CSV")
    _add_loss_flags(p_sweep)
    _add_common_flags(p_sweep)

    p_image = sub.add_parser("image", help="Monte Carlo exposure and reconstruction")
    p_image.add_argument("--mask", default=None, help="object magnitude mask, PGM (P2/P5)")
    p_image.add_argument("--phase", default=None,
                         help="optional phase mask, headerless CSV of radians")
    p_image.add_argument("--m", type=int, default=None, help="outer cycles (>= 2)")
    p_image.add_argument("--n", type=int, default=None, help="inner cycles (>= 1)")
    p_image.add_argument("--n-bar", type=float, default=None,
                         help="mean photon pairs per pixel")
    p_image.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")
    p_image.add_argument("--blur", type=float, default=None,
                         help="idler correlation blur, std in pixels (default 0)")
    p_image.add_argument("--reassign-dl", action="store_true", default=None,
                         help="count discard-port clicks as open-channel clicks")
    p_image.add_argument("--outer-rotation", type=float, default=None)
    p_image.add_argument("--inner-rotation", type=float, default=None)
    p_image.add_argument("--out-dir", default=None,
                         help=f"artifact directory (default ${ENV_OUTPUT_DIR} or .)")
    _add_loss_flags(p_image)
    _add_common_flags(p_image)

    p_serve = sub.add_parser("serve", help="run the HTTP service (requires uvicorn)")
    p_serve.add_argument("--host", default=None, help="bind host (default 127.0.0.1)")
    p_serve.add_argument("--port", type=int, default=None, help="bind port (default 8000)")
    p_serve.add_argument("--config", default=None,
                         help="JSON file supplying defaults for any flag of this command")

    return parser


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def _merge(args: argparse.Namespace, allowed: frozenset[str]) -> dict:
    """Explicit flags win over config values; config wins over nothing."""
    config = _load_config(getattr(args, "config", None))
    unknown = set(config) - allowed
    if unknown:
        raise UsageError(
            f"unknown config keys for this command: {', '.join(sorted(unknown))}")
    merged = dict(config)
    for key in allowed:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _request_payload(merged: dict, command: str) -> dict:
    return {k: v for k, v in merged.items()
            if k in REQUEST_KEYS[command] and v is not None}


def _client(merged: dict) -> ServiceClient:
    server = merged.get("server") or os.environ.get(ENV_SERVER) or None
    return ServiceClient(server_url=server)


def _output_dir(merged: dict, key: str) -> Path:
    configured = merged.get(key) or os.environ.get(ENV_OUTPUT_DIR) or "."
    return Path(configured)


def cmd_probs(merged: dict) -> int:
    from .service.models import ProbsRequest

    request = ProbsRequest(**_request_payload(merged, "probs"))
    response = _client(merged).probs(request)
    for name in ("p_d0", "p_d1", "p_dl", "p_object", "p_component"):
        print(f"{name} = {getattr(response, name):.9g}")
    return 0


def cmd_sweep(merged: dict) -> int:
    from .service.models import SweepRequest

    request = SweepRequest(**_request_payload(merged, "sweep"))
    response = _client(merged).sweep(request)
    points = [
        MetricPoint(
            outer_cycles=row.m,
            inner_cycles=row.n,
            p_int=row.p_int,
            p_d0_err=row.p_d0_err,
            snr_cgi_factor=row.f,
            snr_int_ratio=math.inf if row.snr_int_ratio is None else row.snr_int_ratio,
            visibility=row.visibility,
        )
        for row in response.rows
    ]
    out_path = merged.get("out")
    if out_path is None:
        out_path = Path(os.environ.get(ENV_OUTPUT_DIR) or ".") / "sweep.csv"
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    tables.write_sweep_csv(out_path, points)
    print(f"wrote {out_path} ({len(points)} rows)")
    if merged.get("svg"):
        m_values = sorted({p.outer_cycles for p in points})
        n_values = sorted({p.inner_cycles for p in points})
        index = {(p.outer_cycles, p.inner_cycles): p for p in points}
        for metric in ("p_int", "p_d0_err", "snr_cgi_factor", "snr_int_ratio",
                       "visibility"):
            grid = np.array([[getattr(index[(m, n)], metric) for n in n_values]
                             for m in m_values])
            svg_path = out_path.with_name(f"{out_path.stem}_{metric}.svg")
            write_svg_heatmap(svg_path, grid, m_values, n_values, metric,
                              row_axis="outer cycles", col_axis="inner cycles")
            print(f"wrote {svg_path}")
    return 0


def cmd_image(merged: dict) -> int:
    from .service.models import ImageRequest

    mask_path = merged.get("mask")
    if mask_path is None:
        raise UsageError("image requires --mask (or a mask entry in --config)")
    samples = pnm.read_pgm(mask_path)
    phase_list = None
    if merged.get("phase") is not None:
        phase = tables.read_phase_csv(merged["phase"])
        if phase.shape != samples.shape:
            raise UsageError(
                f"phase grid {phase.shape} does not match mask {samples.shape}")
        phase_list = phase.tolist()
    payload = _request_payload(merged, "image")
    payload["mask"] = {
        "magnitude": (samples.astype(float) / 255.0).tolist(),
        "phase": phase_list,
    }
    request = ImageRequest(**payload)
    response = _client(merged).image(request)

    out_dir = _output_dir(merged, "out_dir")
    out_dir.mkdir(parents=True, exist_ok=True)
    counts_path = out_dir / "counts.csv"
    estimate_path = out_dir / "estimate.csv"
    threshold_path = out_dir / "threshold.pgm"
    dose_path = out_dir / "dose.csv"
    tables.write_counts_csv(counts_path,
                            np.asarray(response.c_d0), np.asarray(response.c_d1),
                            np.asarray(response.c_dl))
    tables.write_estimate_csv(estimate_path, np.asarray(response.d))
    pnm.write_pgm(threshold_path, np.asarray(response.threshold_map, dtype=np.uint8))
    tables.write_dose_csv(dose_path, np.asarray(response.dose))
    for path in (counts_path, estimate_path, threshold_path, dose_path):
        print(f"wrote {path}")
    print(f"threshold_value = {response.threshold_value:.9g}")
    if response.ambiguous:
        print("warning: blocked/open expectations coincide; threshold map is "
              "not meaningful", file=sys.stderr)
    return 0


def cmd_serve(merged: dict) -> int:
    try:
        import uvicorn
    except ImportError:
        print("cfgi serve requires uvicorn (pip install 'cfgi[serve]')",
              file=sys.stderr)
        return 3
    from .service.app import app

    uvicorn.run(app, host=merged.get("host") or "127.0.0.1",
                port=merged.get("port") or 8000)
    return 0


COMMANDS = {
    "probs": (cmd_probs, PROBS_KEYS),
    "sweep": (cmd_sweep, SWEEP_KEYS),
    "image": (cmd_image, IMAGE_KEYS),
    "serve": (cmd_serve, SERVE_KEYS),
}


def _format_validation_error(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        location = ".".join(str(p) for p in err["loc"]) or "request"
        parts.append(f"{location}: {err['msg']}")
    return "; ".join(parts)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    handler, allowed = COMMANDS[args.command]
    try:
        merged = _merge(args, allowed)
        return handler(merged)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"error: {_format_validation_error(exc)}", file=sys.stderr)
        return 2
    except ServiceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if exc.status_code < 500 else 3
    except ServiceUnavailable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(main())
