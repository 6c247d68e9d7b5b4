"""Command-line front end: ``rydspec spectrum | sweep | verify``.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical error. Artifacts go to ``--out``, else ``$RYDSPEC_OUT``, else
the config's ``output.directory``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import SweepError, detect_peaks, hexagon_sweep, run_pipeline, sweep
from .config import NOISE_DEFAULTS, PRESETS, SWEEP_BASE, ExperimentConfig, resolve_family
from .errors import ConfigError, NumericalError, RydspecError
from .geometry import FAMILY_DOMAINS
from .spectral import lines_to_csv
from . import svg, verify

ENV_OUT = "RYDSPEC_OUT"
EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _header(cfg: ExperimentConfig, kind: str) -> dict:
    return {"tool": "rydspec", "version": __version__, "artifact": kind,
            "config_sha256": cfg.sha256(), "seed": cfg.seed}


def _csv_with_header(meta: dict, body: str) -> str:
    head = "".join(f"# {k}: {meta[k]}\n" for k in ("tool", "version", "artifact", "config_sha256", "seed"))
    return head + body


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_config(args, default_preset: str | None = None) -> tuple[ExperimentConfig, str]:
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.config:
        path = Path(args.config)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror}") from None
        cfg, stem = ExperimentConfig.from_json(text, str(path)), path.stem
    else:
        name = args.preset or default_preset
        if name is None:
            raise ConfigError("one of --config or --preset is required")
        cfg, stem = ExperimentConfig.from_preset(name), name
    over = {}
    if args.seed is not None:
        over["seed"] = args.seed
    if args.model is not None:
        over["model"] = args.model
    if getattr(args, "noisy", False) and cfg.data["noise"] is None:
        over["noise"] = dict(NOISE_DEFAULTS)
    if getattr(args, "svg", False) and "svg" not in cfg.data["output"]["formats"]:
        over["output"] = {"formats": cfg.data["output"]["formats"] + ["svg"]}
    if over:
        cfg = cfg.replace(**over)
    return cfg, stem


def _out_dir(args, cfg: ExperimentConfig) -> Path:
    out = Path(args.out or os.environ.get(ENV_OUT) or cfg.data["output"]["directory"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, text: str, written: list):
    path.write_text(text)
    written.append(str(path))


def cmd_spectrum(args) -> int:
    cfg, stem = _load_config(args)
    arr, drive, grid, noise, opts = cfg.build()
    res = run_pipeline(arr, drive, cfg.model, grid, noise, opts)
    out = _out_dir(args, cfg)
    fmts = cfg.data["output"]["formats"]
    written: list[str] = []

    rows = ["t_us,p0_ideal" + (",p0_measured" if res.measured is not None else "")]
    for i, t in enumerate(grid.times):
        row = f"{float(t)!r},{float(res.ideal.values[i])!r}"
        if res.measured is not None:
            row += f",{float(res.measured.values[i])!r}"
        rows.append(row)
    if "csv" in fmts:
        _write(out / f"{stem}_timeseries.csv",
               _csv_with_header(_header(cfg, "timeseries"), "\n".join(rows) + "\n"), written)
        _write(out / f"{stem}_spectrum.csv",
               _csv_with_header(_header(cfg, "spectrum"), res.spectrum.to_csv()), written)
        _write(out / f"{stem}_lines.csv",
               _csv_with_header(_header(cfg, "lines"), lines_to_csv(list(res.lines))), written)

    report = {
        "meta": _header(cfg, "peaks"),
        "config": cfg.data,
        "spectrum": {"window": res.spectrum.window, "zero_pad_factor": res.spectrum.zero_pad_factor,
                     "resolution_MHz": res.spectrum.resolution, "dc_level": res.spectrum.dc_level},
        "peaks": [{"freq_MHz": p.freq_mhz, "height": p.height, "prominence": p.prominence}
                  for p in res.peaks.peaks],
        "lines": [{"j": ln.j, "k": ln.k, "freq_MHz": ln.freq_mhz, "weight": ln.weight}
                  for ln in res.lines],
        "match": res.match.to_dict(),
        "bright_indices": res.decomposition.bright_indices(),
    }
    if res.measured is not None:
        report["lindblad"] = {k: v for k, v in res.measured.meta.items()
                              if k in ("method", "trace_drift", "min_eigenvalue", "substep")}
    text = _dump_json(report)
    if "json" in fmts:
        _write(out / f"{stem}_peaks.json", text, written)
    if "svg" in fmts:
        series = [(grid.times, res.ideal.values)]
        if res.measured is not None:
            series.append((grid.times, res.measured.values))
        _write(out / f"{stem}_timeseries.svg",
               svg.line_plot(series, title=f"{stem}: P0(t)", xlabel="t (us)", ylabel="P0"), written)
        _write(out / f"{stem}_spectrum.svg",
               svg.line_plot([(res.spectrum.freqs, res.spectrum.psd)], title=f"{stem}: spectrum",
                             xlabel="f (MHz)", ylabel="PSD", markers=[ln.freq_mhz for ln in res.lines]),
               written)

    if args.json:
        sys.stdout.write(text)
    else:
        peaks = ", ".join(f"{p.freq_mhz:.4f}" for p in res.peaks.peaks) or "none"
        lines = ", ".join(f"{ln.freq_mhz:.4f}" for ln in res.lines) or "none"
        print(f"{stem}: model={cfg.model} peaks [MHz]: {peaks}")
        print(f"{stem}: bright lines [MHz]: {lines}")
        print(f"{stem}: max dE/E = {res.match.max_rel_err:.4f}; wrote {len(written)} files to {out}")
    return EXIT_OK


def _parse_z_max(text: str, d: float) -> float:
    """``"1.5d"`` is in units of the lattice spacing; a bare number is in um."""
    t = text.strip()
    try:
        return float(t[:-1]) * d if t.endswith("d") else float(t)
    except ValueError:
        raise ConfigError(f"--z-max: cannot parse {text!r} (use e.g. 12 or 1.5d)") from None


def cmd_sweep(args) -> int:
    if args.steps < 2:
        raise ConfigError(f"--steps: need at least 2 points, got {args.steps}")
    family = resolve_family(args.family) if args.family else None
    default = SWEEP_BASE[family] if family else None
    cfg, stem = _load_config(args, default)
    geom = cfg.data["geometry"]
    if family is None:
        if "family" not in geom:
            raise ConfigError("sweep: need --family or a config geometry with a family")
        family = geom["family"]
    d = geom.get("d_um", 8.0)
    arr, drive, grid, noise, opts = cfg.build()
    try:
        if family == "hexagon_to_antiprism":
            z_max = _parse_z_max(args.z_max, d) if args.z_max else FAMILY_DOMAINS[family][1] * d
            res = hexagon_sweep(np.linspace(0.0, z_max, args.steps), d, drive, grid, noise, opts)
        else:
            if args.z_max:
                raise ConfigError("--z-max applies only to the hexagon-antiprism family")
            res = sweep(family, args.steps, drive, grid, cfg.model, noise, opts, d=d)
    except SweepError as exc:
        if isinstance(exc.cause, NumericalError):
            raise NumericalError(str(exc), exc.cause.diagnostics) from exc
        raise ConfigError(str(exc)) from exc

    stem = f"{stem}_sweep_{family}"
    out = _out_dir(args, cfg)
    fmts = cfg.data["output"]["formats"]
    written: list[str] = []
    meta = _header(cfg, "spectrogram")
    meta.update(family=family, steps=args.steps)
    if "csv" in fmts:
        _write(out / f"{stem}_spectrogram.csv", _csv_with_header(meta, res.spectrogram_csv()), written)
        _write(out / f"{stem}_lines.csv",
               _csv_with_header(dict(meta, artifact="lines"), res.lines_csv()), written)
    summary = {
        "meta": meta,
        "config": cfg.data,
        "values": [float(v) for v in res.values],
        "peaks_MHz": [[p.freq_mhz for p in detect_peaks(s, opts.min_prominence_frac).peaks]
                      for s in res.spectra],
        "lines_MHz": [[ln.freq_mhz for ln in lines] for lines in res.lines],
    }
    text = _dump_json(summary)
    if "json" in fmts:
        _write(out / f"{stem}.json", text, written)
    if "svg" in fmts:
        overlay = [(v, ln.freq_mhz) for v, lines in zip(res.values, res.lines) for ln in lines]
        _write(out / f"{stem}_spectrogram.svg",
               svg.heatmap(res.values, res.spectrogram(), res.spectra[0].freqs, title=stem,
                           xlabel=family, ylabel="f (MHz)", overlay=overlay), written)
    if args.json:
        sys.stdout.write(text)
    else:
        print(f"{stem}: {len(res.values)} points over [{res.values[0]:g}, {res.values[-1]:g}]; "
              f"wrote {len(written)} files to {out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    items = verify.run_checks()
    sys.stdout.write(verify.format_json(items) if args.json else verify.format_text(items))
    return EXIT_OK if all(it.status != verify.FAIL for it in items) else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rydspec", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"rydspec {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="experiment config (JSON)")
        sp.add_argument("--preset", choices=sorted(PRESETS), help="built-in figure preset")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--model", choices=("full", "truncated", "pxp", "ising"))
        sp.add_argument("--out", help=f"output directory (default: ${ENV_OUT} or config)")
        sp.add_argument("--noisy", action="store_true", help="enable the default noise model")
        sp.add_argument("--svg", action="store_true", help="also write SVG plots")
        sp.add_argument("--json", action="store_true", help="print the JSON report to stdout")

    sp = sub.add_parser("spectrum", help="simulate one configuration and analyse its spectrum")
    common(sp)
    sp.set_defaults(func=cmd_spectrum)

    sw = sub.add_parser("sweep", help="spectrogram along a transformation path")
    common(sw)
    sw.add_argument("--family", help="bend, star-to-tetra, tetra-to-square, square-to-diamond, "
                                     "hexagon-antiprism")
    sw.add_argument("--steps", type=int, default=21)
    sw.add_argument("--z-max", help="hexagon plane separation, e.g. 12 (um) or 1.5d")
    sw.set_defaults(func=cmd_sweep)

    vf = sub.add_parser("verify", help="run the built-in regression checks")
    vf.add_argument("--json", action="store_true")
    vf.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"rydspec: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        diag = f" {json.dumps(exc.diagnostics, sort_keys=True, default=str)}" if exc.diagnostics else ""
        print(f"rydspec: numerical error: {exc}{diag}", file=sys.stderr)
        return EXIT_NUMERIC
    except RydspecError as exc:
        print(f"rydspec: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
