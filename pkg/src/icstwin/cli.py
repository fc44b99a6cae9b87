"""Command-line entry point wiring simulation, attacks, training and the IDS.

Subcommands: simulate | gen-dataset | train-eval | ids-run | catalog.
Every run is reproducible from its config file alone; --seed fans out to
all RNG consumers. Exit codes: 0 success, 2 configuration error,
3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from icstwin.config import ConfigError, RunConfig, load_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _build_campaign(cfg: RunConfig):
    from icstwin.attacks import Campaign, schedule_campaign

    if cfg.campaign.file:
        return Campaign.load(cfg.campaign.file)
    return schedule_campaign(durations=cfg.durations_by_category(), recovery_gap=cfg.campaign.recovery_gap, seed=cfg.campaign.seed)


def cmd_catalog(cfg: RunConfig, args) -> int:
    from icstwin.attacks import catalog

    rows = catalog()
    print(f"{'id':>3s} {'category':8s} {'mode':18s} {'target':8s} params")
    for s in rows:
        params = ", ".join(f"{k}={v}" for k, v in sorted(s.params.items())) or "-"
        print(f"{s.id:3d} {s.category.value:8s} {s.mode.value:18s} {s.target_label:8s} {params}")
    counts: dict[str, int] = {}
    for s in rows:
        counts[s.category.value] = counts.get(s.category.value, 0) + 1
    print(f"total {len(rows)} scenarios: " + ", ".join(f"{k}:{v}" for k, v in sorted(counts.items())))
    return EXIT_OK


def cmd_simulate(cfg: RunConfig, args) -> int:
    from icstwin.report import save_frame_trace_jsonl, save_state_trace_csv
    from icstwin.simulation import SimulationDriver

    out = _out_dir(cfg)
    driver = SimulationDriver(cfg.plant, seed=cfg.plant.rng_seed, collect_trace=True, collect_states=True)
    result = driver.run(duration=cfg.duration)
    save_state_trace_csv(result.states, out / "state_trace.csv")
    save_frame_trace_jsonl(result.trace, out / "frame_trace.jsonl")
    last = result.states[-1]
    print(f"simulated {cfg.duration:.1f} s: {len(result.states)} ticks, bottles_filled={last.bottles_filled}")
    print(f"wrote {out / 'state_trace.csv'} and {out / 'frame_trace.jsonl'}")
    return EXIT_OK


def cmd_gen_dataset(cfg: RunConfig, args) -> int:
    from icstwin.dataset import export_csv, write_metadata
    from icstwin.simulation import generate_dataset

    out = _out_dir(cfg)
    campaign = _build_campaign(cfg)
    result = generate_dataset(cfg.plant, campaign=campaign, plant_seed=cfg.plant.rng_seed, collect_trace=True)
    csv_path = out / "dataset.csv"
    export_csv(result.dataset, csv_path, cfg.dataset.include_staleness, cfg.dataset.include_motor)
    campaign.save(out / "campaign.json")
    meta = write_metadata(
        result.dataset,
        out / "dataset_meta.json",
        seeds={"plant": cfg.plant.rng_seed, "campaign": campaign.seed},
        config_payload=cfg.to_payload(),
    )
    print(f"dataset: {len(result.dataset)} samples in {result.wall_seconds:.1f} s -> {csv_path}")
    print("label counts: " + ", ".join(f"{k}={v}" for k, v in meta["counts"].items()))
    return EXIT_OK


def cmd_train_eval(cfg: RunConfig, args) -> int:
    from icstwin.dataset import import_csv, split
    from icstwin.evaluation import train_eval_suite
    from icstwin.report import metrics_table_text, save_confusion_csv, save_confusion_svg, save_metrics_table
    from icstwin.simulation import generate_dataset

    out = _out_dir(cfg)
    if args.dataset:
        dataset = import_csv(args.dataset)
    else:
        campaign = _build_campaign(cfg)
        dataset = generate_dataset(cfg.plant, campaign=campaign, plant_seed=cfg.plant.rng_seed).dataset
    train_samples, test_samples = split(dataset, cfg.dataset.train_frac, cfg.dataset.split_seed)
    _write_split(out, train_samples, test_samples)

    suite = train_eval_suite(
        train_samples,
        test_samples,
        kinds=tuple(cfg.ml.kinds),
        include_stacked=cfg.ml.include_stacked,
        seed=cfg.ml.seed,
        include_staleness=cfg.dataset.include_staleness,
        include_motor=cfg.dataset.include_motor,
        folds=cfg.ml.folds,
    )

    models_dir = out / "models"
    models_dir.mkdir(exist_ok=True)
    rows = []
    for name, ev in suite.items():
        rows.append(ev.metrics_row())
        save_confusion_csv(ev.confusion, out / f"confusion_{name}.csv")
        save_confusion_svg(ev.confusion, out / f"confusion_{name}.svg", title=f"{name} (row-normalized)")
        (models_dir / f"{name}.json").write_text(ev.model.to_json() + "\n", encoding="utf-8")
    save_metrics_table(rows, out / "metrics.json")
    print(metrics_table_text(rows))
    print(f"wrote metrics, confusion CSV/SVG and model bundles under {out}")
    return EXIT_OK


def _write_split(out: Path, train_samples, test_samples) -> None:
    from icstwin.dataset import export_samples_csv

    export_samples_csv(train_samples, out / "train_split.csv")
    export_samples_csv(test_samples, out / "test_split.csv")


def cmd_ids_run(cfg: RunConfig, args) -> int:
    from icstwin.runtime import iter_paced, run_online, summarize, write_events_jsonl
    from icstwin.report import save_label_pie_svg
    from icstwin.stacking import StackedModel

    out = _out_dir(cfg)
    bundle_path = Path(args.model)
    try:
        model = StackedModel.from_json(bundle_path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"model bundle not found: {bundle_path}") from None

    if args.source == "replay":
        if not args.input:
            raise ConfigError("--input is required for --source replay")
        samples = _read_samples(args.input)
        source = iter_paced(samples, pace=args.pace)
    else:
        from icstwin.simulation import SimulationDriver
        from icstwin.attacks import AttackWindow, Campaign

        campaign = None
        if args.live_attack:
            scenario_id = int(args.live_attack)
            start = args.attack_start
            campaign = Campaign(
                windows=(AttackWindow(scenario_id, start, args.attack_end),),
                recovery_gap=min(start, 10.0),
                seed=cfg.campaign.seed,
            )
        driver = SimulationDriver(cfg.plant, campaign=campaign, seed=cfg.plant.rng_seed)
        source = iter_paced(driver.iter_samples(duration=cfg.duration), pace=args.pace)

    events = run_online(
        model,
        source,
        threaded=args.threaded,
        include_staleness=cfg.dataset.include_staleness,
        include_motor=cfg.dataset.include_motor,
    )
    summary = summarize(events)
    write_events_jsonl(events, out / "events.jsonl")
    (out / "ids_summary.json").write_text(json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    save_label_pie_svg(summary.histogram, out / "ids_histogram.svg", title="classified traffic")
    print(
        f"classified {summary.count} samples: mean latency {summary.mean_latency_s * 1e3:.2f} ms, "
        f"max {summary.max_latency_s * 1e3:.2f} ms"
    )
    print("histogram: " + ", ".join(f"{k}={v}" for k, v in summary.histogram.items()))
    return EXIT_OK


def _read_samples(path: str):
    from icstwin.dataset import import_samples_csv

    return import_samples_csv(path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="icstwin", description="Digital-twin ICS security workbench")
    parser.add_argument("--config", type=str, default=None, help="JSON config file")
    parser.add_argument("--seed", type=int, default=None, help="global seed override")
    parser.add_argument("--out", type=str, default=None, help="output directory")
    parser.add_argument("--plant", action="append", default=None, metavar="KEY=VALUE", help="override a plant constant (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("catalog", help="print the 23 attack scenarios")

    p_sim = sub.add_parser("simulate", help="attack-free plant run; writes state and frame traces")
    p_sim.add_argument("--duration", type=float, default=None, help="seconds of simulated time")

    p_gen = sub.add_parser("gen-dataset", help="run the campaign and export the labeled dataset")
    p_gen.add_argument("--campaign-file", type=str, default=None, help="use an existing campaign timeline")
    p_gen.add_argument("--no-staleness-features", action="store_true", help="drop the fl_age/bll_age columns")

    p_train = sub.add_parser("train-eval", help="train all models on a 70/30 split and emit reports")
    p_train.add_argument("--dataset", type=str, default=None, help="existing dataset CSV (default: generate)")

    p_ids = sub.add_parser("ids-run", help="stream samples through a trained stacked bundle")
    p_ids.add_argument("--model", type=str, required=True, help="stacked model bundle JSON")
    p_ids.add_argument("--source", choices=["replay", "live"], default="replay")
    p_ids.add_argument("--input", type=str, default=None, help="dataset CSV for replay")
    p_ids.add_argument("--pace", type=float, default=0.0, help="realtime factor; 0 runs flat out")
    p_ids.add_argument("--threaded", action="store_true", help="producer/consumer mode")
    p_ids.add_argument("--duration", type=float, default=None, help="live mode duration, seconds")
    p_ids.add_argument("--live-attack", type=str, default=None, help="scenario id to inject in live mode")
    p_ids.add_argument("--attack-start", type=float, default=10.0)
    p_ids.add_argument("--attack-end", type=float, default=20.0)
    return parser


COMMANDS = {
    "catalog": cmd_catalog,
    "simulate": cmd_simulate,
    "gen-dataset": cmd_gen_dataset,
    "train-eval": cmd_train_eval,
    "ids-run": cmd_ids_run,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {"seed": args.seed, "out": args.out, "plant": args.plant}
    if getattr(args, "duration", None) is not None:
        overrides["duration"] = args.duration
    if getattr(args, "no_staleness_features", False):
        overrides["no_staleness"] = True
    if getattr(args, "campaign_file", None):
        overrides["campaign_file"] = args.campaign_file
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
