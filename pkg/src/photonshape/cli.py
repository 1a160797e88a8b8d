"""Command line entry point.

Runs the pipelines in process by default; with --url the parsed config is
posted to a running service instance and returned artifacts are written
locally.  Exit codes: 0 success, 1 invalid input or failed validation,
2 numerical failure.
"""
from __future__ import annotations

import argparse
import configparser
import io
import json
import sys
from pathlib import Path

from . import pipelines
from .config import MODES, parse_config
from .errors import ConfigError, InversionError, NumericsError, StageError

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photonshape",
        description="Simulate and shape single photon emission from a driven emitter-cavity system.",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    helps = {
        "forward": "simulate the emitter dynamics for a given pump pulse",
        "inverse": "synthesize the pump pulse for a requested wave packet",
        "roundtrip": "synthesize a pump, re-simulate and compare to the target",
        "figures": "emit CSV data for the symmetric and antisymmetric reference targets",
        "validate": "check a config and target for consistency without running",
    }
    for mode in MODES:
        p = sub.add_parser(mode, help=helps[mode])
        p.add_argument("--config", required=True, help="path to the INI config file")
        p.add_argument("--out", default=None, help="output directory (overrides [output] dir)")
        p.add_argument("--steps", type=int, default=None, help="override grid steps")
        p.add_argument("--url", default=None, help="base URL of a running service to delegate to")
    return parser


def _run_remote(url: str, mode: str, text: str, outdir: str) -> dict:
    import httpx

    parser = configparser.ConfigParser(interpolation=None)
    parser.read_file(io.StringIO(text))
    payload = {name: dict(parser[name]) for name in parser.sections()}
    # the output directory is a client-side concern; the service keeps its
    # artifacts in memory
    payload.get("output", {}).pop("dir", None)
    resp = httpx.post(f"{url.rstrip('/')}/{mode}", json=payload, timeout=300.0)
    if resp.status_code == 422:
        raise ConfigError("request", resp.json().get("detail", resp.text))
    if resp.status_code != 200:
        raise NumericsError(f"service error {resp.status_code}: {resp.text}")
    body = resp.json()
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name, content in body.get("artifacts", {}).items():
        (out / name).write_text(content)
    return body["summary"]


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    outdir = args.out or "out"
    try:
        if args.url:
            summary = _run_remote(args.url, args.mode, text, outdir)
        else:
            config = parse_config(
                text,
                args.mode,
                base_dir=Path(args.config).parent,
                steps_override=args.steps,
                outdir_override=args.out,
            )
            summary, _ = pipelines.run(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except StageError as exc:
        print(f"error in stage {exc.stage}: {exc.cause}", file=sys.stderr)
        return 2
    except (NumericsError, InversionError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(summary, indent=2))
    if args.mode == "validate" and not summary.get("ok", False):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
