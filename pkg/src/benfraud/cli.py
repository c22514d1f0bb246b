"""Command-line entry point for reproducible batch runs.

Subcommands cover the whole pipeline: synth and ingest produce canonical
transaction/label files, analyze and features derive digit reports and the
feature matrix, bench trains and compares classifiers with and without the
digit-law features, and predict scores new addresses with a saved model.

Options resolve in three layers: built-in defaults, then a flat key=value
config file (--config), then explicit flags. All diagnostics go to stderr;
every data product is a file under --out-dir, written canonically so a rerun
with the same inputs and seed is byte-identical.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path

from .benford import DigitPosition, benford_expected, fit_address, observed_distribution
from .errors import BenfraudError, DataError, EmptyDistributionError
from .features import (
    LabeledExample,
    build_dataset,
    design_matrix,
    extract_features,
    read_matrix,
    write_matrix,
)
from .ingest import (
    SCAM,
    load_labels,
    normalize_address,
    parse_transactions,
    write_labels,
    write_transactions,
)
from .models import (
    MODEL_KINDS,
    AblationResult,
    ArmResult,
    SplitSpec,
    TrainConfig,
    evaluate,
    feature_importance,
    load_model,
    predict_matrix,
    render_comparison,
    save_model,
    save_report,
    split,
    train,
    write_importances,
)
from .models.api import ABLATION_ARMS
from .synth import GeneratorConfig, generate
from .txgraph import build_graph, neighborhood

__all__ = ["main"]


class UsageError(Exception):
    """Bad invocation (unknown option value, missing required option)."""


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise DataError(f"expected a boolean, got {raw!r}")


@dataclasses.dataclass(frozen=True)
class Option:
    name: str
    kind: type
    default: object = None
    required: bool = False
    choices: tuple | None = None


_GLOBAL_OPTIONS = (
    Option("seed", int, 0),
    Option("out_dir", str, "."),
    Option("strict", bool, False),
)

_COMMAND_OPTIONS = {
    "synth": (
        Option("n_legit", int, 200),
        Option("n_scam", int, 20),
        Option("tx_lo", int, 100),
        Option("tx_hi", int, 2000),
        Option("legit_decades", int, 3),
        Option("scam_decade", int, 17),
        Option("legit_base_decade", int, 14),
        Option("scale_decades", int, 4),
        Option("round_bias", float, 0.5),
        Option("match_statistics", bool, False),
    ),
    "ingest": (
        Option("transactions", str, required=True),
        Option("labels", str),
        Option("format", str, "csv", choices=("csv", "jsonl")),
    ),
    "analyze": (
        Option("transactions", str, required=True),
        Option("labels", str),
        Option("format", str, "csv", choices=("csv", "jsonl")),
    ),
    "features": (
        Option("transactions", str, required=True),
        Option("labels", str, required=True),
        Option("format", str, "csv", choices=("csv", "jsonl")),
    ),
    "bench": (
        Option("features", str),
        Option("transactions", str),
        Option("labels", str),
        Option("format", str, "csv", choices=("csv", "jsonl")),
        Option("kinds", str, ",".join(MODEL_KINDS)),
        Option("train_frac", float, 0.64),
        Option("valid_frac", float, 0.16),
        Option("test_frac", float, 0.20),
        Option("ablation", bool, True),
    ),
    "predict": (
        Option("model", str, required=True),
        Option("transactions", str, required=True),
        Option("addresses", str),
        Option("format", str, "csv", choices=("csv", "jsonl")),
    ),
}


def load_config(path: str) -> dict[str, str]:
    """Flat key=value lines; blanks and # comments are skipped."""
    values: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise DataError(f"config line {line_no}: expected key=value, got {raw!r}")
        values[key.strip()] = value.strip()
    return values


def _coerce(raw: str, kind: type, name: str):
    try:
        if kind is bool:
            return _parse_bool(raw)
        return kind(raw)
    except (ValueError, DataError):
        raise UsageError(f"invalid value for {name}: {raw!r}") from None


def resolve_options(args: argparse.Namespace, file_config: dict[str, str]) -> dict:
    """Merge defaults, config file, and CLI flags (strongest last)."""
    resolved: dict = {}
    for option in _GLOBAL_OPTIONS + _COMMAND_OPTIONS[args.command]:
        value = getattr(args, option.name, None)
        if value is None and option.name in file_config:
            value = _coerce(file_config[option.name], option.kind, option.name)
        if value is None:
            value = option.default
        if value is None and option.required:
            raise UsageError(f"missing required option --{option.name.replace('_', '-')}")
        if option.choices is not None and value not in option.choices:
            raise UsageError(
                f"invalid value for {option.name}: {value!r}"
                f" (choose from {', '.join(option.choices)})"
            )
        resolved[option.name] = value
    return resolved


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    return str(value)


def print_config(command: str, resolved: dict) -> None:
    print(f"command={command}")
    for key in sorted(resolved):
        print(f"{key}={_format_value(resolved[key])}")


def _info(message: str) -> None:
    print(message, file=sys.stderr)


def _out_path(cfg: dict, name: str) -> Path:
    directory = Path(cfg["out_dir"])
    directory.mkdir(parents=True, exist_ok=True)
    return directory / name


def _read_transactions(cfg: dict):
    on_error = "raise" if cfg["strict"] else "collect"
    with open(cfg["transactions"], encoding="utf-8", newline="") as stream:
        return parse_transactions(stream, cfg["format"], on_error=on_error)


def _read_labels(cfg: dict):
    if not cfg.get("labels"):
        return None
    with open(cfg["labels"], encoding="utf-8", newline="") as stream:
        return load_labels(stream)


def cmd_synth(cfg: dict) -> int:
    generator = GeneratorConfig(
        n_legit=cfg["n_legit"],
        n_scam=cfg["n_scam"],
        tx_per_address=(cfg["tx_lo"], cfg["tx_hi"]),
        legit_decades=cfg["legit_decades"],
        scam_decade=cfg["scam_decade"],
        legit_base_decade=cfg["legit_base_decade"],
        scale_decades=cfg["scale_decades"],
        round_bias=cfg["round_bias"],
        match_statistics=cfg["match_statistics"],
        seed=cfg["seed"],
    )
    records, labels = generate(generator)
    with open(_out_path(cfg, "transactions.csv"), "w", encoding="utf-8", newline="") as stream:
        write_transactions(records, stream)
    with open(_out_path(cfg, "labels.csv"), "w", encoding="utf-8", newline="") as stream:
        write_labels(labels, stream)
    scam_count = sum(1 for entry in labels.values() if entry.label == SCAM)
    _info(
        f"generated {len(records)} transactions for {len(labels)} addresses"
        f" ({scam_count} scam, {len(labels) - scam_count} legit)"
    )
    return 0


def cmd_ingest(cfg: dict) -> int:
    result = _read_transactions(cfg)
    for issue in result.issues:
        _info(f"skipped line {issue.line}: {issue.message}")
    labels = _read_labels(cfg)
    with open(_out_path(cfg, "transactions.csv"), "w", encoding="utf-8", newline="") as stream:
        write_transactions(result.records, stream)
    if labels is not None:
        with open(_out_path(cfg, "labels.csv"), "w", encoding="utf-8", newline="") as stream:
            write_labels(labels, stream)
    summary = f"ingested {len(result.records)} records ({len(result.issues)} rows skipped)"
    if labels is not None:
        summary += f", {len(labels)} labels"
    _info(summary)
    return 0


def _fit_row(address: str, side: str, values: list[int]) -> list[str]:
    try:
        first, second = fit_address(values)
    except EmptyDistributionError:
        return [address, side, "0", "NA", "NA", "NA", "NA"]
    return [
        address,
        side,
        str(first.sample_count),
        repr(first.chi_squared),
        repr(first.ks),
        repr(second.chi_squared),
        repr(second.ks),
    ]


def cmd_analyze(cfg: dict) -> int:
    result = _read_transactions(cfg)
    labels = _read_labels(cfg)
    graph = build_graph(result.records)
    if labels is not None:
        addresses = sorted(labels)
    else:
        addresses = sorted(graph.vertices)

    sides = {}
    if labels is not None:
        sides = {
            address: ("scam" if entry.label == SCAM else "legit")
            for address, entry in labels.items()
        }

    rows = []
    chi2_by_class: dict[tuple[str, str], list[float]] = {}
    pooled: dict[str, list[int]] = {"scam": [], "legit": []}
    for address in addresses:
        values = neighborhood(graph, address).all_values()
        side = sides.get(address, "")
        rows.append(_fit_row(address, side, values))
        if side and rows[-1][3] != "NA":
            chi2_by_class.setdefault((side, "first"), []).append(float(rows[-1][3]))
            chi2_by_class.setdefault((side, "second"), []).append(float(rows[-1][5]))
            pooled[side].extend(values)

    with open(_out_path(cfg, "fit_statistics.csv"), "w", encoding="utf-8", newline="") as stream:
        stream.write("address,class,sample_count,chi2_first,ks_first,chi2_second,ks_second\n")
        for row in rows:
            stream.write(",".join(row) + "\n")
    _info(f"fit statistics for {len(rows)} addresses")

    if labels is None:
        _info("warning: no labels provided; skipping class aggregates")
        return 0

    for side in ("scam", "legit"):
        for position in (DigitPosition.FIRST, DigitPosition.SECOND):
            name = f"distribution_{side}_{position.value}.csv"
            try:
                observed = observed_distribution(pooled[side], position)
            except EmptyDistributionError:
                _info(f"warning: no {side} values; skipping {name}")
                continue
            expected = benford_expected(position)
            with open(_out_path(cfg, name), "w", encoding="utf-8", newline="") as stream:
                stream.write("digit,observed_mass,expected_mass\n")
                for digit, obs, exp in zip(
                    position.support, observed.mass, expected.mass
                ):
                    stream.write(f"{digit},{obs!r},{exp!r}\n")

    with open(_out_path(cfg, "class_mean_chi2.csv"), "w", encoding="utf-8", newline="") as stream:
        stream.write("class,position,mean_chi2\n")
        for side in ("scam", "legit"):
            for position in ("first", "second"):
                values = chi2_by_class.get((side, position), [])
                mean = math.fsum(values) / len(values) if values else float("nan")
                cell = "NA" if math.isnan(mean) else repr(mean)
                stream.write(f"{side},{position},{cell}\n")
                _info(f"class-mean chi2_{position} {side}: {cell}")
    return 0


def cmd_features(cfg: dict) -> int:
    result = _read_transactions(cfg)
    labels = _read_labels(cfg)
    graph = build_graph(result.records)
    examples = build_dataset(graph, labels)
    with open(_out_path(cfg, "features.csv"), "w", encoding="utf-8", newline="") as stream:
        write_matrix(examples, stream)
    _info(f"wrote {len(examples)} feature rows")
    return 0


def _parse_kinds(raw: str) -> tuple[str, ...]:
    kinds = tuple(k.strip() for k in raw.split(",") if k.strip())
    if not kinds:
        raise UsageError("kinds must name at least one model")
    unknown = [k for k in kinds if k not in MODEL_KINDS]
    if unknown:
        raise UsageError(
            f"unknown model kind: {', '.join(unknown)}"
            f" (choose from {', '.join(MODEL_KINDS)})"
        )
    return kinds


def _load_examples(cfg: dict):
    if cfg.get("features"):
        with open(cfg["features"], encoding="utf-8", newline="") as stream:
            return read_matrix(stream)
    if not cfg.get("transactions") or not cfg.get("labels"):
        raise UsageError("bench needs either --features or --transactions and --labels")
    result = _read_transactions(cfg)
    labels = _read_labels(cfg)
    return build_dataset(build_graph(result.records), labels)


def cmd_bench(cfg: dict) -> int:
    kinds = _parse_kinds(cfg["kinds"])
    examples = _load_examples(cfg)
    spec = SplitSpec(
        train_frac=cfg["train_frac"],
        valid_frac=cfg["valid_frac"],
        test_frac=cfg["test_frac"],
        seed=cfg["seed"],
    )
    config = TrainConfig(seed=cfg["seed"])
    train_ex, valid_ex, test_ex = split(examples, spec)
    _info(f"split: train={len(train_ex)} valid={len(valid_ex)} test={len(test_ex)}")

    arms = ABLATION_ARMS if cfg["ablation"] else tuple(
        (name, columns) for name, columns in ABLATION_ARMS if name == "with"
    )
    result = AblationResult(
        n_train=len(train_ex), n_valid=len(valid_ex), n_test=len(test_ex)
    )
    for arm_name, columns in arms:
        arm_config = dataclasses.replace(config, columns=columns)
        arm: dict[str, ArmResult] = {}
        for kind in kinds:
            try:
                model = train(kind, train_ex, valid_ex, arm_config)
                report = evaluate(model, test_ex)
            except BenfraudError as error:
                _info(f"error: training {kind} ({arm_name} arm) failed: {error}")
                return 1
            arm[kind] = ArmResult(
                kind=kind, columns=columns, model=model, report=report
            )
            suffix = f"{kind}_{arm_name}"
            with open(_out_path(cfg, f"model_{suffix}.json"), "w", encoding="utf-8", newline="") as stream:
                save_model(model, stream)
            with open(_out_path(cfg, f"report_{suffix}.json"), "w", encoding="utf-8", newline="") as stream:
                save_report(report, stream)
            with open(_out_path(cfg, f"importance_{suffix}.csv"), "w", encoding="utf-8", newline="") as stream:
                write_importances(feature_importance(model), stream)
            _info(
                f"{kind} {arm_name}: balanced_accuracy={report.balanced_accuracy:.4f}"
                f" macro_f1={report.macro_f1:.4f}"
            )
        result.arms[arm_name] = arm

    with open(_out_path(cfg, "comparison.txt"), "w", encoding="utf-8", newline="") as stream:
        stream.write(render_comparison(result))
    return 0


def _address_list(cfg: dict, graph) -> list[str]:
    if cfg.get("addresses"):
        text = Path(cfg["addresses"]).read_text(encoding="utf-8")
        return [
            normalize_address(line.strip(), line=line_no)
            for line_no, line in enumerate(text.splitlines(), start=1)
            if line.strip()
        ]
    return sorted(graph.vertices)


def cmd_predict(cfg: dict) -> int:
    with open(cfg["model"], encoding="utf-8", newline="") as stream:
        model = load_model(stream)
    result = _read_transactions(cfg)
    graph = build_graph(result.records)
    addresses = _address_list(cfg, graph)

    usable = []
    reasons: dict[str, str] = {}
    for address in addresses:
        nbhd = neighborhood(graph, address)
        if not nbhd.incoming and not nbhd.outgoing:
            reasons[address] = "no transactions"
            continue
        # the label is a placeholder; prediction never reads it
        usable.append(
            LabeledExample(address=address, features=extract_features(nbhd), label=SCAM)
        )

    scores: dict[str, tuple[float, int]] = {}
    if usable:
        X, _, ordered = design_matrix(usable, model.feature_schema)
        labels, raw_scores = predict_matrix(model, X)
        for address, label, score in zip(ordered, labels, raw_scores):
            scores[address] = (float(score), int(label))

    with open(_out_path(cfg, "predictions.csv"), "w", encoding="utf-8", newline="") as stream:
        stream.write("address,score,label,reason\n")
        for address in addresses:
            if address in scores:
                score, label = scores[address]
                stream.write(f"{address},{score!r},{label},\n")
            else:
                stream.write(f"{address},NA,NA,{reasons[address]}\n")
    _info(f"scored {len(scores)} of {len(addresses)} addresses")
    return 0


_COMMANDS = {
    "synth": cmd_synth,
    "ingest": cmd_ingest,
    "analyze": cmd_analyze,
    "features": cmd_features,
    "bench": cmd_bench,
    "predict": cmd_predict,
}


def _global_flags(default) -> argparse.ArgumentParser:
    # Global flags are accepted before and after the subcommand. The
    # subcommand copies use SUPPRESS so an unset flag never overwrites a
    # value parsed at the top level.
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, default=default)
    parent.add_argument("--config", default=default)
    parent.add_argument("--out-dir", dest="out_dir", default=default)
    parent.add_argument("--strict", action="store_true", default=default)
    parent.add_argument("--print-config", action="store_true", default=default)
    return parent


def _build_parser() -> argparse.ArgumentParser:
    common = _global_flags(argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="benfraud",
        description="Digit-distribution analysis and fraud-classifier bench",
        parents=[_global_flags(None)],
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    synth_p = subparsers.add_parser("synth", parents=[common])
    synth_p.add_argument("--n-legit", dest="n_legit", type=int, default=None)
    synth_p.add_argument("--n-scam", dest="n_scam", type=int, default=None)
    synth_p.add_argument("--tx-lo", dest="tx_lo", type=int, default=None)
    synth_p.add_argument("--tx-hi", dest="tx_hi", type=int, default=None)
    synth_p.add_argument("--legit-decades", dest="legit_decades", type=int, default=None)
    synth_p.add_argument("--scam-decade", dest="scam_decade", type=int, default=None)
    synth_p.add_argument(
        "--legit-base-decade", dest="legit_base_decade", type=int, default=None
    )
    synth_p.add_argument("--scale-decades", dest="scale_decades", type=int, default=None)
    synth_p.add_argument("--round-bias", dest="round_bias", type=float, default=None)
    synth_p.add_argument(
        "--match-statistics",
        dest="match_statistics",
        action="store_true",
        default=None,
    )

    for name in ("ingest", "analyze", "features"):
        sub = subparsers.add_parser(name, parents=[common])
        sub.add_argument("--transactions", default=None)
        sub.add_argument("--labels", default=None)
        sub.add_argument("--format", default=None)

    bench_p = subparsers.add_parser("bench", parents=[common])
    bench_p.add_argument("--features", default=None)
    bench_p.add_argument("--transactions", default=None)
    bench_p.add_argument("--labels", default=None)
    bench_p.add_argument("--format", default=None)
    bench_p.add_argument("--kinds", default=None)
    bench_p.add_argument("--train-frac", dest="train_frac", type=float, default=None)
    bench_p.add_argument("--valid-frac", dest="valid_frac", type=float, default=None)
    bench_p.add_argument("--test-frac", dest="test_frac", type=float, default=None)
    bench_p.add_argument(
        "--no-ablation", dest="ablation", action="store_false", default=None
    )

    predict_p = subparsers.add_parser("predict", parents=[common])
    predict_p.add_argument("--model", default=None)
    predict_p.add_argument("--transactions", default=None)
    predict_p.add_argument("--addresses", default=None)
    predict_p.add_argument("--format", default=None)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        file_config = load_config(args.config) if args.config else {}
        resolved = resolve_options(args, file_config)
        if args.print_config:
            print_config(args.command, resolved)
        return _COMMANDS[args.command](resolved)
    except UsageError as error:
        print(f"usage error: {error}", file=sys.stderr)
        return 2
    except BenfraudError as error:
        print(f"error: {error}", file=sys.stderr)
        return 1
    except OSError as error:
        print(f"error: {error}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
