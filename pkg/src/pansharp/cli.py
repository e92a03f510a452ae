"""Batch command-line front-end.

Subcommands expose every library operation with machine-readable JSON
reports: recolor, metrics, caploss, weights, filter-dataset and
extract-features. A flat key-value config file can pre-set any flag;
explicit flags win. All commands are deterministic for fixed inputs and
flags, independent of --threads.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .errors import FormatError, MetricError
from .featbank import extract, load_bank
from .imgio import read_image, write_image, write_rawten
from .kernels import BACKEND
from .losses import LossParams, cap_weights, total_loss, weights_as_lists
from .metrics import MetricsParams, ergas, qnr, scc
from .raster import downscale_area, upscale_bilinear, zero_fraction
from .recolor import RecolorParams, hf_guided, luma_guided, rc_stage_inputs, recolorize

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_USAGE = 2
EXIT_PARTIAL = 3


class UsageError(ValueError):
    pass


def _parse_pools(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad pool list {text!r}, expected e.g. 7,5,3") from exc


class Opt:
    """One resolvable option: flag value > config value > default."""

    def __init__(self, name, conv=str, default=None, required=False, help="", choices=None):
        self.name = name
        self.conv = conv
        self.default = default
        self.required = required
        self.help = help
        self.choices = choices

    @property
    def dest(self) -> str:
        return self.name.replace("-", "_")


_COMMON = [
    Opt("config", str, None, help="flat key=value file pre-setting any flag"),
    Opt("threads", int, 1, help="worker threads (results are thread-count independent)"),
]

_SPECS: dict[str, list[Opt]] = {
    "recolor": _COMMON
    + [
        Opt("ps", str, required=True, help="pan-resolution input image"),
        Opt("ms", str, required=True, help="MS image (upscaled internally by --ratio)"),
        Opt("out", str, required=True, help="output image path (.png or .rten)"),
        Opt("mode", str, "hf", choices=["raw", "luma", "hf", "stage"],
            help="raw picked colors, luma-/hf-guided result, or stage input triple"),
        Opt("window", int, 3, help="odd search window size"),
        Opt("hf-size", int, 5, help="odd averaging filter size"),
        Opt("ratio", int, 4, help="MS upscale factor (1 = already pan resolution)"),
        Opt("tile-rows", int, 256, help="rows per parallel tile"),
        Opt("bits", int, 16, choices=[8, 16], help="PNG bit depth"),
        Opt("report", str, None, help="also write the JSON summary here"),
    ],
    "metrics": _COMMON
    + [
        Opt("ps", str, required=True),
        Opt("ms", str, required=True),
        Opt("pan", str, required=True),
        Opt("out", str, None, help="write the JSON report here (stdout otherwise)"),
        Opt("ratio", int, 4),
        Opt("q-block", int, 32, help="UIQ tile size (shrinks to fit small inputs)"),
        Opt("p", float, 1.0),
        Opt("q", float, 1.0),
        Opt("alpha", float, 1.0),
        Opt("beta", float, 1.0),
        Opt("ergas-ref", str, None, help="full-resolution ERGAS reference image"),
        Opt("ergas-ratio", float, None, help="ERGAS resolution quotient (default 1/ratio)"),
    ],
    "caploss": _COMMON
    + [
        Opt("pan", str, required=True),
        Opt("ps", str, required=True),
        Opt("ms", str, required=True),
        Opt("bank", str, required=True, help="FBANK1 feature bank file"),
        Opt("out", str, None),
        Opt("gamma", float, 4.0),
        Opt("alpha-cap", float, 0.9),
        Opt("alpha-ms", float, 0.01),
        Opt("alpha-l1", float, 1.0),
        Opt("pools", _parse_pools, (7, 5, 3), help="comma-separated per-layer pool sizes"),
        Opt("ratio", int, 4),
        Opt("window", int, 3),
        Opt("hf-size", int, 5),
        Opt("dump-weights", str, None, help="also dump the CAP weights as JSON here"),
    ],
    "weights": _COMMON
    + [
        Opt("ms", str, required=True),
        Opt("bank", str, required=True),
        Opt("gamma", float, 4.0),
        Opt("out", str, None),
    ],
    "filter-dataset": _COMMON
    + [
        Opt("input-dir", str, required=True),
        Opt("out", str, required=True, help="manifest JSON path"),
        Opt("pattern", str, "*.png"),
        Opt("threshold", float, 0.05, help="discard when zero_fraction is strictly greater"),
    ],
    "extract-features": _COMMON
    + [
        Opt("bank", str, required=True),
        Opt("image", str, required=True),
        Opt("out", str, required=True, help="output prefix for <prefix>_tapN.rten dumps"),
    ],
}


def _load_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, val = stripped.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        values[key.strip().replace("-", "_")] = val.strip()
    return values


def _resolve(args: argparse.Namespace, spec: list[Opt]) -> dict:
    config: dict[str, str] = {}
    if getattr(args, "config", None):
        config = _load_config(args.config)
    known = {o.dest for o in spec}
    for key in config:
        if key not in known:
            raise UsageError(f"unknown config key {key!r}")
    out = {}
    for opt in spec:
        value = getattr(args, opt.dest)
        if value is None and opt.dest in config:
            value = opt.conv(config[opt.dest])
            if opt.choices is not None and value not in opt.choices:
                raise UsageError(f"config {opt.dest}={value!r} not in {opt.choices}")
        if value is None:
            value = opt.default
        if value is None and opt.required:
            raise UsageError(f"missing required option --{opt.name}")
        out[opt.dest] = value
    return out


def _emit(obj: dict, out_path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    print(text)
    if out_path:
        Path(out_path).write_text(text + "\n")


def _with_suffix(path: str, tag: str) -> str:
    p = Path(path)
    return str(p.with_name(f"{p.stem}_{tag}{p.suffix}"))


def cmd_recolor(opts: dict) -> int:
    ps = read_image(opts["ps"])
    ms = read_image(opts["ms"])
    ratio = opts["ratio"]
    ms_up = upscale_bilinear(ms, ratio) if ratio > 1 else ms
    if ms_up.shape != ps.shape:
        raise ValueError(
            f"upscaled MS {ms_up.shape} does not match PS {ps.shape} (ratio {ratio})"
        )
    params = RecolorParams(opts["window"], opts["hf_size"])
    mode = opts["mode"]
    started = time.perf_counter()
    outputs: list[str] = []
    if mode == "stage":
        rc0, _, hf = rc_stage_inputs(ps, ms_up, params)
        for tag, img in (("rc0", rc0), ("msup", ms_up), ("hf", hf)):
            path = _with_suffix(opts["out"], tag)
            write_image(path, img, opts["bits"])
            outputs.append(path)
    else:
        rc = recolorize(ps, ms_up, params, threads=opts["threads"], tile_rows=opts["tile_rows"])
        if mode == "luma":
            result = luma_guided(rc, ps)
        elif mode == "hf":
            result = hf_guided(rc, ps, params)
        else:
            result = rc
        write_image(opts["out"], result, opts["bits"])
        outputs.append(opts["out"])
    elapsed = time.perf_counter() - started
    summary = {
        "command": "recolor",
        "mode": mode,
        "window": params.window,
        "hf_filter_size": params.hf_filter_size,
        "ratio": ratio,
        "threads": opts["threads"],
        "backend": BACKEND,
        "outputs": outputs,
        "seconds": round(elapsed, 6),
    }
    _emit(summary, opts["report"])
    return EXIT_OK


def cmd_metrics(opts: dict) -> int:
    ps = read_image(opts["ps"])
    ms = read_image(opts["ms"])
    pan = read_image(opts["pan"])
    params = MetricsParams(
        ratio=opts["ratio"],
        q_block=opts["q_block"],
        p=opts["p"],
        q=opts["q"],
        alpha=opts["alpha"],
        beta=opts["beta"],
    )
    er_ratio = opts["ergas_ratio"] if opts["ergas_ratio"] is not None else 1.0 / params.ratio
    report: dict = {"ergas": None, "scc": None, "qnr": None, "d_lambda": None, "d_s": None}
    errors: dict[str, str] = {}
    block_used = params.q_block
    try:
        if opts["ergas_ref"]:
            report["ergas"] = ergas(read_image(opts["ergas_ref"]), ps, er_ratio)
        else:
            report["ergas"] = ergas(ms, downscale_area(ps, params.ratio), er_ratio)
    except (ValueError, MetricError) as exc:
        errors["ergas"] = str(exc)
    try:
        report["scc"] = scc(pan, ps)
    except (ValueError, MetricError) as exc:
        errors["scc"] = str(exc)
    try:
        report["qnr"], report["d_lambda"], report["d_s"], block_used = qnr(
            ps, ms, pan, params.ratio, params
        )
    except (ValueError, MetricError) as exc:
        errors["qnr"] = str(exc)
    report["parameters"] = {
        "ratio": params.ratio,
        "scc_kernel": "laplacian4",
        "q_block": block_used,
        "p": params.p,
        "q": params.q,
        "alpha": params.alpha,
        "beta": params.beta,
        "ergas_ratio": er_ratio,
        "ergas_protocol": "reference" if opts["ergas_ref"] else "reduced",
    }
    if errors:
        report["errors"] = errors
    _emit(report, opts["out"])
    return EXIT_PARTIAL if errors else EXIT_OK


def _loss_inputs(opts: dict):
    bank = load_bank(Path(opts["bank"]).read_bytes())
    ms = read_image(opts["ms"])
    return bank, ms


def cmd_caploss(opts: dict) -> int:
    bank, ms = _loss_inputs(opts)
    pan = read_image(opts["pan"])
    ps = read_image(opts["ps"])
    params = LossParams(
        gamma=opts["gamma"],
        alpha_cap=opts["alpha_cap"],
        alpha_ms=opts["alpha_ms"],
        alpha_l1=opts["alpha_l1"],
        pool_sizes=opts["pools"],
        downscale_factor=opts["ratio"],
    )
    recolor_params = RecolorParams(opts["window"], opts["hf_size"])
    report = total_loss(bank, pan, ps, ms, params, recolor_params)
    if opts["dump_weights"]:
        w = cap_weights(bank, ms, params.gamma)
        dump = {"gamma": params.gamma, "layers": weights_as_lists(w)}
        Path(opts["dump_weights"]).write_text(json.dumps(dump, indent=2) + "\n")
    _emit(report.to_dict(), opts["out"])
    return EXIT_OK


def cmd_weights(opts: dict) -> int:
    bank, ms = _loss_inputs(opts)
    w = cap_weights(bank, ms, opts["gamma"])
    _emit({"gamma": opts["gamma"], "layers": weights_as_lists(w)}, opts["out"])
    return EXIT_OK


def cmd_filter_dataset(opts: dict) -> int:
    root = Path(opts["input_dir"])
    if not root.is_dir():
        raise ValueError(f"not a directory: {root}")
    files = sorted(root.glob(opts["pattern"]))
    threshold = opts["threshold"]

    def judge(path: Path) -> dict:
        try:
            zf = zero_fraction(read_image(path))
        except (ValueError, OSError) as exc:
            return {"path": str(path), "status": "error", "error": str(exc)}
        status = "discard" if zf > threshold else "keep"
        return {"path": str(path), "status": status, "zero_fraction": zf}

    if opts["threads"] > 1 and len(files) > 1:
        with ThreadPoolExecutor(max_workers=opts["threads"]) as pool:
            records = list(pool.map(judge, files))
    else:
        records = [judge(p) for p in files]

    counts = {"keep": 0, "discard": 0, "error": 0}
    for rec in records:
        counts[rec["status"]] += 1
    manifest = {
        "threshold": threshold,
        "comparison": "strictly_greater",
        "total": len(records),
        "kept": counts["keep"],
        "discarded": counts["discard"],
        "errors": counts["error"],
        "records": records,
    }
    Path(opts["out"]).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(
        json.dumps(
            {k: manifest[k] for k in ("total", "kept", "discarded", "errors")},
            sort_keys=True,
        )
    )
    return EXIT_PARTIAL if counts["error"] else EXIT_OK


def cmd_extract_features(opts: dict) -> int:
    bank = load_bank(Path(opts["bank"]).read_bytes())
    image = read_image(opts["image"])
    maps = extract(bank, image)
    taps = []
    for i, tensor in enumerate(maps.taps):
        path = f"{opts['out']}_tap{i}.rten"
        write_rawten(path, tensor)
        c, h, w = tensor.shape
        taps.append({"file": path, "channels": c, "height": h, "width": w})
    manifest = {"bank": opts["bank"], "image": opts["image"], "taps": taps}
    Path(f"{opts['out']}.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(json.dumps(manifest, indent=2, sort_keys=True))
    return EXIT_OK


_HANDLERS = {
    "recolor": cmd_recolor,
    "metrics": cmd_metrics,
    "caploss": cmd_caploss,
    "weights": cmd_weights,
    "filter-dataset": cmd_filter_dataset,
    "extract-features": cmd_extract_features,
}

_DESCRIPTIONS = {
    "recolor": "re-colorize a pan-resolution image from MS colors",
    "metrics": "compute ERGAS / SCC / QNR for a (PS, MS, PAN) triple",
    "caploss": "evaluate the full loss report for a (PAN, PS, MS) triple",
    "weights": "dump the per-channel CAP weights for an MS image",
    "filter-dataset": "write a keep/discard manifest by zero-pixel fraction",
    "extract-features": "dump a bank's feature taps as RAWTEN tensors",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pansharp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, spec in _SPECS.items():
        p = sub.add_parser(name, help=_DESCRIPTIONS[name])
        for opt in spec:
            kwargs: dict = {"default": None, "help": opt.help, "dest": opt.dest}
            if opt.conv is not str:
                kwargs["type"] = opt.conv
            if opt.choices is not None:
                kwargs["choices"] = opt.choices
            p.add_argument(f"--{opt.name}", **kwargs)
        p.set_defaults(spec=spec, handler=_HANDLERS[name])
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        opts = _resolve(args, args.spec)
        return args.handler(opts)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, MetricError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
