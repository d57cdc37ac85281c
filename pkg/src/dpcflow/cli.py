"""Command-line entry point: ``dpcflow {synth,detect,sweep,validate}``.

Exit codes: 0 success, 1 internal failure, 2 user or configuration error.
"""

import argparse
import csv
import json
import logging
from pathlib import Path
import sys

from . import config as cfg
from .errors import InputError
from .evaluation import METRIC_NAMES, run_sweep, score_verdict
from .ingest import generate_synthetic, load_dataset, write_dataset_csv
from .pipeline import prepare, run_method

log = logging.getLogger("dpcflow")


def _out_dir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_synth(doc, args):
    dataset = generate_synthetic(cfg.synth_config(doc))
    path = _out_dir(args) / "dataset.csv"
    write_dataset_csv(dataset, path)
    n_anom = int(dataset.labels.sum())
    print(f"wrote {path}: {len(dataset)} rows "
          f"({len(dataset) - n_anom} normal, {n_anom} anomaly)")
    return 0


def _write_points_csv(path, verdict, dpc_result, truth):
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if dpc_result is not None:
            writer.writerow(["index", "rho", "delta", "score", "label", "is_anomaly", "truth"])
            for rec, t in zip(dpc_result.records(), truth):
                writer.writerow([rec["index"], rec["rho"], repr(rec["delta"]),
                                 _num(rec["score"]), rec["label"],
                                 int(rec["is_anomaly"]), int(t)])
        else:
            writer.writerow(["index", "score", "is_anomaly", "truth"])
            for rec, t in zip(verdict.records(), truth):
                writer.writerow([rec["index"], _num(rec["score"]),
                                 int(rec["is_anomaly"]), int(t)])


def _num(value):
    return value if isinstance(value, str) else repr(value)


def cmd_detect(doc, args):
    ds = doc["dataset"]
    data = load_dataset(ds["source"], ds["path"], cfg.synth_config(doc),
                        ds["strict_categories"])
    prepared = prepare(data, ds["mode"], cfg.window_config(doc), doc["window"]["top_k"],
                       doc["pca"]["variance_target"], doc["pca"]["max_components"])
    method = doc["detector"]
    verdict, dpc_result = run_method(method, prepared.x, cfg.method_params(doc, method))
    report = score_verdict(verdict, prepared.truth, setting="configured",
                           data_volume=len(data), seed=doc["seed"])
    out = _out_dir(args)
    results = json.loads((dpc_result or verdict).to_json())
    results["pca_components"] = prepared.n_components
    results["metrics"] = report.as_dict()
    (out / "results.json").write_text(json.dumps(results, indent=2) + "\n", encoding="utf-8")
    _write_points_csv(out / "results.csv", verdict, dpc_result, prepared.truth)
    print(f"{method}: {len(prepared.truth)} rows, {int(verdict.is_anomaly.sum())} flagged; "
          f"accuracy={report.accuracy:.4f} g_mean={report.g_mean:.4f} fpr={report.fpr:.4f}")
    return 0


def cmd_sweep(doc, args):
    report = run_sweep(doc)
    out = _out_dir(args)
    (out / "sweep.csv").write_text(report.to_csv(), encoding="utf-8")
    (out / "sweep.json").write_text(report.to_json() + "\n", encoding="utf-8")
    for metric in METRIC_NAMES:
        (out / f"{metric}.csv").write_text(report.metric_csv(metric), encoding="utf-8")
    failed = sum(c.failed for c in report.cells)
    print(f"wrote {len(report.cells)} cells to {out} ({failed} failed)")
    return 0


def cmd_validate(doc, args):
    print(json.dumps(doc, indent=2, sort_keys=True))
    return 0


COMMANDS = {
    "synth": cmd_synth,
    "detect": cmd_detect,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dpcflow",
        description="Unsupervised traffic anomaly detection with density peaks clustering",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "synth": "write a labelled synthetic dataset as CSV",
        "detect": "run one detector end to end and write per-point results",
        "sweep": "evaluate every method and setting over the data-volume grid",
        "validate": "check a configuration and print it with defaults filled in",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", type=Path, help="JSON configuration file")
        p.add_argument("--set", dest="sets", action="append", default=[],
                       metavar="KEY=VALUE", help="override a dotted config key (repeatable)")
        if name != "validate":
            p.add_argument("--out", default="out", help="output directory (default: out)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    # plain formatter: no colour codes, so NO_COLOR needs no special casing
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        doc = cfg.load(args.config, args.sets)
        return COMMANDS[args.command](doc, args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.exception("internal failure")
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
