"""Command-line entry point: ``partialfp detect|evaluate|synth``.

Exit codes for ``detect``: 0 non-partial, 2 partial, 1 error.
"""

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from .errors import PartialFPError
from .imgcore import read_image, write_pgm
from .pipeline import PipelineConfig, run_pipeline

CONFIG_ENV = "PARTIALFP_CONFIG"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARTIAL = 2


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def load_config(path=None, threshold=None) -> PipelineConfig:
    """Config from ``--config``, else from ``$PARTIALFP_CONFIG``, else defaults."""
    path = path or os.environ.get(CONFIG_ENV)
    if path:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise PartialFPError(f"cannot read config {path}: {exc}") from exc
        config = PipelineConfig.from_json(text)
    else:
        config = PipelineConfig()
    if threshold is not None:
        config = config.with_threshold(threshold)
    return config


def cmd_detect(args) -> int:
    config = load_config(args.config, args.threshold)
    img = read_image(args.image)
    res = run_pipeline(img, config)
    if args.dump:
        from .figures import write_dumps
        write_dumps(img, res, args.dump)
    sys.stdout.write(_dump_json(res.to_record(str(args.image))))
    return EXIT_PARTIAL if res.result.is_partial else EXIT_OK


def cmd_evaluate(args) -> int:
    from . import evaluation as ev

    config = load_config(args.config)
    samples = ev.load_labels(args.labels, args.root)
    cm, records = ev.evaluate(samples, config, jobs=args.jobs)
    sweep = None
    if args.threshold_sweep:
        sweep = ev.threshold_sweep(records, ev.parse_sweep(args.threshold_sweep))
    report = ev.build_report(config, cm, records, sweep)
    report_path = Path(args.report)
    report_path.parent.mkdir(parents=True, exist_ok=True)
    report_path.write_text(_dump_json(report), encoding="utf-8")
    if args.csv:
        ev.write_records_csv(args.csv, records)
    if not args.no_figures:
        from .figures import save_confusion_matrix, save_sweep
        stem = report_path.with_suffix("")
        save_confusion_matrix(cm, f"{stem}_confusion.png")
        if sweep:
            save_sweep(sweep, f"{stem}_sweep.png")
    name = args.name or Path(args.root).name or str(args.root)
    print(ev.format_table(name, ev.metrics(cm)))
    print(f"TP={cm.tp} FN={cm.fn} FP={cm.fp} TN={cm.tn} (N={cm.total})")
    return EXIT_OK


def cmd_synth(args) -> int:
    from .synth import SynthSpec, generate, random_spec

    try:
        data = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise PartialFPError(f"cannot read synth spec {args.spec}: {exc}") from exc
    if not isinstance(data, dict):
        raise PartialFPError("synth spec must be a JSON object")
    base = SynthSpec.from_dict(data)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for i in range(args.count):
        seed = base.seed + i
        if args.jitter > 0:
            params = base.to_dict()
            params.pop("seed")
            params.pop("core")
            params.pop("pattern")
            spec = random_spec(seed, base.pattern, jitter=args.jitter, **params)
        else:
            spec = replace(base, seed=seed)
        if args.crop == "half":
            variants = [("", replace(spec, crop="none"), False),
                        ("_half", replace(spec, crop="half"), True)]
        else:
            variants = [("", spec, spec.crop == "half")]
        for suffix, s, partial in variants:
            stem = f"synth_{i:04d}{suffix}"
            img, core = generate(s)
            write_pgm(out / f"{stem}.pgm", img)
            sidecar = {"file": f"{stem}.pgm", "spec": s.to_dict(),
                       "core": list(core) if core else None, "partial": partial}
            (out / f"{stem}.json").write_text(_dump_json(sidecar), encoding="utf-8")
            rows.append(f"{stem}.pgm,{int(partial)}")
    (out / "labels.csv").write_text("filename,partial\n" + "\n".join(rows) + "\n", encoding="utf-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="partialfp", description="Partial fingerprint detection")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("detect", help="classify one image")
    d.add_argument("image")
    d.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV})")
    d.add_argument("--dump", metavar="DIR", help="write intermediate images to DIR")
    d.add_argument("--threshold", type=float, help="partiality threshold T")
    d.set_defaults(func=cmd_detect)

    e = sub.add_parser("evaluate", help="confusion matrix over a labelled image set")
    e.add_argument("root", help="image directory")
    e.add_argument("labels", help="CSV of filename,partial rows")
    e.add_argument("--config")
    e.add_argument("--report", default="report.json")
    e.add_argument("--jobs", type=int, default=1)
    e.add_argument("--threshold-sweep", metavar="LO:HI:STEP")
    e.add_argument("--csv", metavar="FILE", help="also write per-sample rows as CSV")
    e.add_argument("--name", help="database name in the printed table")
    e.add_argument("--no-figures", action="store_true")
    e.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("synth", help="generate synthetic prints with ground truth")
    s.add_argument("spec", help="JSON synth spec")
    s.add_argument("outdir")
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--crop", choices=["none", "half"], default="none",
                   help="half: also write a half-cropped twin of every print, labelled partial")
    s.add_argument("--jitter", type=int, default=0, help="randomize the core by up to N px")
    s.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PartialFPError as exc:
        print(f"partialfp: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"partialfp: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
