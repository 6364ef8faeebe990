"""Command-line entry point.

Exit codes: 0 success, 1 validation failure (including bad flags),
2 missing or unparseable input files. Report subcommands write CSVs plus
rendered figures into the chosen output directory and print a summary table.
"""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import click

from . import figures, report
from .agreement import build_agreement_table
from .classes import DefectClass
from .errors import ConflictError, InputError, ValidationFailure
from .labelstudio import import_labelstudio_export
from .manifest import (SUBSETS, DatasetManifest, class_area_stats, load_manifest,
                       save_manifest, split)
from .mask_ops import cast_rot_maybe
from .maskio import read_mask_png, write_mask_png
from .metrics import aggregate, evaluate_pair, histogram_from_reports
from .morphology import MorphologyParams
from .pipeline import build_clean_mask, flatten_manifest, parallel_map
from .store import CurationStore

log = logging.getLogger(__name__)

HIST_METRICS = ("f1", "iou", "kappa", "pixel_diff")


def _morphology_options(fn):
    fn = click.option("--min-hole-area", default=64, show_default=True,
                      help="Fill enclosed holes smaller than this many pixels.")(fn)
    fn = click.option("--min-object-area", default=64, show_default=True,
                      help="Relabel components smaller than this many pixels.")(fn)
    fn = click.option("--connectivity", default=8, type=click.Choice(["4", "8"]),
                      show_default=True, help="Pixel adjacency for components and holes.")(fn)
    fn = click.option("--no-cleanup", is_flag=True, help="Skip small-artifact removal.")(fn)
    return fn


def _params(min_hole_area, min_object_area, connectivity, no_cleanup):
    if no_cleanup:
        return None
    return MorphologyParams(min_hole_area=min_hole_area, min_object_area=min_object_area,
                            connectivity=int(connectivity))


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Debug logging.")
def cli(verbose):
    """Mask curation and evaluation toolkit for wood-log crosscut datasets."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")


@cli.command()
@click.argument("export_file", type=click.Path(path_type=Path))
@click.option("--out", required=True, type=click.Path(path_type=Path),
              help="Manifest file to write.")
@click.option("--split-seed", default=0, show_default=True)
def ingest(export_file, out, split_seed):
    """Import a LabelStudio JSON export into a dataset manifest."""
    records, skipped = import_labelstudio_export(export_file)
    manifest = DatasetManifest(samples=records, split_seed=split_seed)
    save_manifest(manifest, out)
    if skipped:
        click.echo(f"skipped {skipped} unsupported region(s)", err=True)
    click.echo(f"wrote manifest with {len(records)} sample(s) to {out}")


@cli.command("flatten")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(path_type=Path))
@click.option("--out", required=True, type=click.Path(path_type=Path),
              help="Updated manifest file to write (masks go next to it).")
@click.option("--variant", default="original", show_default=True)
@click.option("--annotator", default=None,
              help="Annotator whose regions become the mask; default latest revision.")
@click.option("--workers", default=1, show_default=True)
@_morphology_options
def flatten_cmd(manifest_path, out, variant, annotator, workers,
                min_hole_area, min_object_area, connectivity, no_cleanup):
    """Rasterize annotations into cleaned label masks (one class per pixel)."""
    manifest = load_manifest(manifest_path)
    manifest.path = Path(out)  # masks are stored relative to the output manifest
    manifest.path.parent.mkdir(parents=True, exist_ok=True)
    params = _params(min_hole_area, min_object_area, connectivity, no_cleanup)
    summary = flatten_manifest(manifest, variant, annotator=annotator,
                               params=params, workers=workers)
    save_manifest(manifest, out)
    if summary.unclipped:
        click.echo("samples without a crosscut region (clipping skipped): "
                   + ", ".join(summary.unclipped), err=True)
    click.echo(f"flattened {summary.written} sample(s) into variant {variant!r}; "
               f"manifest written to {out}")


@cli.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(path_type=Path))
@click.option("--variant", default="original", show_default=True)
@click.option("--out", required=True, type=click.Path(path_type=Path),
              help="Output directory for stats.csv and stats.png.")
def stats(manifest_path, variant, out):
    """Per-subset mean class areas in percent of the crosscut area."""
    manifest = load_manifest(manifest_path)
    rows = class_area_stats(manifest, variant)
    out.mkdir(parents=True, exist_ok=True)
    report.write_stats_csv(rows, out / "stats.csv")
    figures.save_stats_figure(rows, out / "stats.png")
    from .manifest import stats_class_order
    header = ["subset", "n_images"] + [code for _, code in stats_class_order()]
    body = [[r.subset, str(r.n_images)]
            + [f"{r.mean_share[cls]:.2f}" for cls, _ in stats_class_order()] for r in rows]
    click.echo(report.text_table(header, body))
    click.echo(f"reports in {out}")


@cli.command("split")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(path_type=Path))
@click.option("--seed", default=None, type=int,
              help="Shuffle seed; defaults to the manifest's split_seed.")
@click.option("--out", required=True, type=click.Path(path_type=Path),
              help="CSV file for the assignment.")
def split_cmd(manifest_path, seed, out):
    """Deterministic 0.6/0.2/0.2 training/validation/test split of the data subset."""
    manifest = load_manifest(manifest_path)
    assignment = split(manifest, seed)
    report.write_split_csv(assignment, out)
    sizes = {b: sum(1 for v in assignment.values() if v == b)
             for b in ("training", "validation", "test")}
    click.echo(f"split {len(assignment)} data sample(s): "
               f"{sizes['training']}/{sizes['validation']}/{sizes['test']} -> {out}")


def _load_eval_pairs(manifest, variant, pred_dir, subset, bucket, seed, workers):
    samples = manifest.subset_samples(subset)
    if bucket:
        assignment = split(manifest, seed)
        samples = [s for s in samples if assignment.get(s.sample_id) == bucket]
    pred_root = Path(pred_dir)
    if not pred_root.is_absolute():
        pred_root = manifest.root() / pred_root
    chosen = []
    for sample in samples:
        if variant not in sample.masks:
            continue
        pred_path = pred_root / f"{sample.sample_id}.png"
        if not pred_path.is_file():
            log.warning("no prediction for sample %s; skipped", sample.sample_id)
            continue
        chosen.append((sample, pred_path))
    if not chosen:
        raise ValidationFailure("no (ground truth, prediction) pairs to evaluate")

    def load(pair):
        sample, pred_path = pair
        gt = manifest.load_mask(sample, variant)
        pred = read_mask_png(pred_path)
        if pred.shape != gt.shape:
            raise ValidationFailure(
                f"prediction for {sample.sample_id} has shape {pred.shape}, expected {gt.shape}"
            )
        return sample.sample_id, evaluate_pair(gt, pred)

    return parallel_map(load, chosen, workers)


@cli.command("eval")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(path_type=Path))
@click.option("--variant", default="original", show_default=True,
              help="Ground-truth mask variant.")
@click.option("--pred-dir", required=True,
              help="Directory of prediction PNGs named <sample_id>.png.")
@click.option("--subset", default="data", show_default=True,
              type=click.Choice(list(SUBSETS)))
@click.option("--bucket", default=None,
              type=click.Choice(["training", "validation", "test"]),
              help="Restrict to one split bucket.")
@click.option("--seed", default=None, type=int, help="Split seed when --bucket is used.")
@click.option("--bins", default=10, show_default=True, help="Histogram bin count.")
@click.option("--workers", default=1, show_default=True)
@click.option("--out", required=True, type=click.Path(path_type=Path),
              help="Output directory for reports and figures.")
def eval_cmd(manifest_path, variant, pred_dir, subset, bucket, seed, bins, workers, out):
    """Evaluate predictions against a ground-truth variant."""
    manifest = load_manifest(manifest_path)
    results = _load_eval_pairs(manifest, variant, pred_dir, subset, bucket, seed, workers)
    sample_ids = [sid for sid, _ in results]
    reports = [r for _, (r, _) in results]
    cms = [cm for _, (_, cm) in results]
    agg, micro = aggregate(reports, cms)

    out.mkdir(parents=True, exist_ok=True)
    report.write_metric_report_csv(agg, out / "report.csv")
    report.write_per_sample_csv(sample_ids, reports, out / "per_sample.csv")
    report.write_confusion_csvs(micro, out / "confusion_raw.csv", out / "confusion_norm.csv")
    hists = []
    for metric in HIST_METRICS:
        hists.append(histogram_from_reports(reports, metric, "All", bins))
        for cls in DefectClass:
            hists.append(histogram_from_reports(reports, metric, int(cls), bins))
    report.write_histograms_csv(hists, out / "histograms.csv")
    figures.save_confusion_figure(micro, out / "confusion.png")
    for metric in HIST_METRICS:
        figures.save_histogram_grid(hists, metric, out / f"hist_{metric}.png")

    header = ["metric"] + [code for code, _ in report.CLASS_COLUMNS]
    click.echo(report.text_table(header, report.metric_rows(agg)))
    click.echo(f"evaluated {len(reports)} sample(s); reports in {out}")


@cli.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(path_type=Path))
@click.option("--subset", default="warmup", show_default=True,
              type=click.Choice(list(SUBSETS)))
@click.option("--baseline", required=True, help="Baseline annotator id.")
@click.option("--model", "model_dirs", multiple=True, metavar="NAME:DIR",
              help="Extra annotator from imported mask PNGs (repeatable).")
@click.option("--workers", default=1, show_default=True)
@click.option("--out", required=True, type=click.Path(path_type=Path))
@_morphology_options
def agree(manifest_path, subset, baseline, model_dirs, workers, out,
          min_hole_area, min_object_area, connectivity, no_cleanup):
    """Pairwise agreement (kappa, IoU) of every annotator against a baseline."""
    manifest = load_manifest(manifest_path)
    params = _params(min_hole_area, min_object_area, connectivity, no_cleanup)
    samples = manifest.subset_samples(subset)
    annotators = sorted({a for s in samples for a in s.annotations})

    def build(args):
        sample, annotator = args
        result = build_clean_mask(sample.annotations[annotator], sample.width, sample.height,
                                  manifest.hierarchy, params, sample.sample_id)
        return annotator, sample.sample_id, result.mask

    work = [(s, a) for s in samples for a in annotators if a in s.annotations]
    masks: dict[str, dict] = {a: {} for a in annotators}
    for annotator, sid, mask in parallel_map(build, work, workers):
        masks[annotator][sid] = mask

    for spec_str in model_dirs:
        name, _, directory = spec_str.partition(":")
        if not directory:
            raise ValidationFailure(f"--model expects NAME:DIR, got {spec_str!r}")
        root = Path(directory)
        if not root.is_absolute():
            root = manifest.root() / root
        imported = {}
        for sample in samples:
            path = root / f"{sample.sample_id}.png"
            if path.is_file():
                imported[sample.sample_id] = read_mask_png(path)
        masks[name] = imported

    table = build_agreement_table(baseline, subset, masks)
    out.mkdir(parents=True, exist_ok=True)
    report.write_agreement_csv(table, out / "agreement.csv")
    figures.save_agreement_figure(table, out / "agreement_kappa.png")
    header = ["block", "annotator", "n"] + [code for code, _ in report.CLASS_COLUMNS]
    body = []
    for block in ("kappa", "iou"):
        for row in table.rows:
            values = row.kappa if block == "kappa" else row.iou
            all_v = row.kappa_all if block == "kappa" else row.iou_all
            body.append([block, row.annotator, str(row.n_samples), f"{all_v:.3f}"]
                        + [f"{values[cls]:.3f}" for _, cls in report.CLASS_COLUMNS[1:]])
    click.echo(report.text_table(header, body))
    click.echo(f"reports in {out}")


@cli.command("cast-proposals")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(path_type=Path))
@click.option("--variant", default="original", show_default=True)
@click.option("--out", required=True, type=click.Path(path_type=Path))
def cast_proposals(manifest_path, variant, out):
    """Write both Rot(maybe) castings per affected sample for offline inspection."""
    manifest = load_manifest(manifest_path)
    out.mkdir(parents=True, exist_ok=True)
    count = 0
    for sample in manifest.samples:
        if variant not in sample.masks:
            continue
        mask = manifest.load_mask(sample, variant)
        if not (mask == int(DefectClass.ROT_MAYBE)).any():
            continue
        write_mask_png(cast_rot_maybe(mask, DefectClass.ROT),
                       out / f"{sample.sample_id}_rot.png")
        write_mask_png(cast_rot_maybe(mask, DefectClass.CROSSCUT),
                       out / f"{sample.sample_id}_crosscut.png")
        count += 1
    click.echo(f"wrote casting proposals for {count} sample(s) to {out}")


@cli.command("apply-decisions")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(path_type=Path))
@click.option("--state-dir", required=True, type=click.Path(path_type=Path),
              help="Directory holding sessions.json and decisions.jsonl.")
@click.option("--session", "session_id", required=True)
@click.option("--variant-name", required=True)
@click.option("--allow-partial", is_flag=True)
def apply_decisions(manifest_path, state_dir, session_id, variant_name, allow_partial):
    """Apply a recorded decision log to emit a new dataset variant offline."""
    manifest = load_manifest(manifest_path)
    store = CurationStore(manifest, state_dir)
    result = store.apply_decisions(session_id, variant_name, allow_partial)
    click.echo(f"variant {result['variant']!r}: wrote {result['samples_written']} mask(s), "
               f"{result['decided']}/{result['total']} item(s) decided")


@cli.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(path_type=Path))
@click.option("--state-dir", required=True, type=click.Path(path_type=Path))
@click.option("--image-root", default=None, type=click.Path(path_type=Path),
              help="Directory the manifest's image paths are relative to.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8037, show_default=True)
@click.option("--ui", "ui_dir", default=None, type=click.Path(path_type=Path),
              help="Static directory with the built review frontend.")
def serve(manifest_path, state_dir, image_root, host, port, ui_dir):
    """Run the curation review service."""
    import uvicorn

    from .service import create_app

    manifest = load_manifest(manifest_path)
    store = CurationStore(manifest, state_dir, image_root)
    app = create_app(store)
    if ui_dir:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    click.echo(f"serving {manifest_path} on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="info")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show()
        return 1
    except ValidationFailure as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except ConflictError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except (InputError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
