"""Command line front end for the whole pipeline.

Subcommands: gen-concepts, train, evaluate, explain, monitor, kernel.  Every
run is driven by an optional TOML config plus ``--section.key=value`` flag
overrides (flags win).  Exit codes: 0 success, 1 usage or input error, 2
partial result (a bank that fell short of its target size).
"""

from __future__ import annotations

import argparse
import json
import re
import sys

import numpy as np

from .bank import GrammarConfig, load_bank, rescale_bank, save_bank, select_concepts
from .config import RunConfig, collect_overrides, load_config
from .data import Dataset, load_dataset, standardize
from .explain import global_explanation, local_explanation
from .formula import format_formula, format_number
from .kernel import KernelContext, cross_kernel, formula_kernel
from .measure import MeasureConfig
from .model import ConceptModel, TrainConfig, load_model, predict_batch, save_model, train
from .monitor import robustness_trace_batch
from .parser import parse_formula

_OVERRIDE_RE = re.compile(r"^--([a-z]+\.[a-z_]+)=(.*)$")


def _split_overrides(argv: list[str]) -> tuple[list[str], list[str]]:
    regular = []
    overrides = []
    for token in argv:
        match = _OVERRIDE_RE.match(token)
        if match:
            overrides.append(f"{match.group(1)}={match.group(2)}")
        else:
            regular.append(token)
    return regular, overrides


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stlconcepts",
        description="Temporal logic concepts for time series classification.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen-concepts", help="sample and select a concept bank")
    gen.add_argument("--config", help="TOML configuration file")
    gen.add_argument("--out", help="bank output path (default: <io.out_dir>/bank.json)")

    tr = commands.add_parser("train", help="fit a model on labeled trajectories")
    tr.add_argument("data", help="training data file (.tsv or .json)")
    tr.add_argument("bank", help="concept bank file")
    tr.add_argument("--config", help="TOML configuration file")
    tr.add_argument("--out", help="model output path (default: <io.out_dir>/model.json)")

    ev = commands.add_parser("evaluate", help="score a model on labeled trajectories")
    ev.add_argument("model", help="model file")
    ev.add_argument("data", help="evaluation data file")
    ev.add_argument("--out", help="also write the metrics as JSON to this path")

    ex = commands.add_parser("explain", help="explain one prediction or one class")
    ex.add_argument("model", help="model file")
    ex.add_argument("data", help="data file providing the sample and the reference set")
    target = ex.add_mutually_exclusive_group(required=True)
    target.add_argument("--index", type=int, help="explain the sample at this row")
    target.add_argument("--global", dest="global_class", type=int, help="explain this class index")
    ex.add_argument("--config", help="TOML configuration file")
    ex.add_argument("--out", help="also write the report as JSON to this path")

    mon = commands.add_parser("monitor", help="evaluate a formula on every sample")
    mon.add_argument("formula", help="formula text, e.g. 'F[0,10](x0 >= 0.5)'")
    mon.add_argument("data", help="data file")
    mon.add_argument("--out", help="also write the table to this path")

    ker = commands.add_parser("kernel", help="kernel values over the base measure")
    ker.add_argument("formula", help="first formula")
    ker.add_argument("formula2", nargs="?", help="second formula (formula kernel)")
    ker.add_argument("--config", help="TOML configuration file (measure section)")
    ker.add_argument("--data", help="data file for a trajectory-formula kernel")
    ker.add_argument("--index", type=int, default=0, help="row of --data to use (default 0)")
    return parser


def _measure_from_config(config: RunConfig) -> MeasureConfig:
    section = config["measure"]
    return MeasureConfig(
        length=section["length"],
        dims=section["dims"],
        num_trajectories=section["num_trajectories"],
        num_knots=section["num_knots"],
        value_std=section["value_std"],
        seed=section["seed"],
    )


def _grammar_from_config(config: RunConfig) -> GrammarConfig:
    measure = config["measure"]
    section = config["grammar"]
    return GrammarConfig(
        base_length=measure["length"],
        num_vars=measure["dims"],
        max_depth=section["max_depth"],
        max_vars_per_formula=section["max_vars_per_formula"],
        node_probs=tuple(section["node_probs"]),
        seed=section["seed"],
    )


def _train_config(config: RunConfig) -> TrainConfig:
    section = config["model"]
    return TrainConfig(
        epochs=section["epochs"],
        learning_rate=section["learning_rate"],
        l2=section["l2"],
        t_attention=section["t_attention"],
        epsilon_g=section["epsilon_g"],
        seed=section["seed"],
    )


def _write_json(payload: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _align_labels(dataset: Dataset, model: ConceptModel) -> Dataset:
    """Remap a dataset's dense labels into the model's class indexing."""
    index_of = {value: index for index, value in enumerate(model.label_values)}
    remapped = np.empty(dataset.count, dtype=np.int64)
    for i in range(dataset.count):
        value = float(dataset.label_values[dataset.labels[i]])
        if value not in index_of:
            raise ValueError(f"unknown label: {format_number(value)}")
        remapped[i] = index_of[value]
    return Dataset(
        values=dataset.values,
        labels=remapped,
        label_values=list(model.label_values),
        normalization=dataset.normalization,
    )


def _prepare_for_model(path: str, model: ConceptModel) -> Dataset:
    dataset = _align_labels(load_dataset(path), model)
    if model.normalization is None:
        raise ValueError("model carries no normalization record")
    if dataset.length != model.bank.base_length:
        raise ValueError(
            f"model expects length {model.bank.base_length}, data has length {dataset.length}"
        )
    return standardize(dataset, model.normalization)


def cmd_gen_concepts(args, config: RunConfig) -> int:
    selection = config["selection"]
    measure = _measure_from_config(config)
    grammar = _grammar_from_config(config)
    max_attempts = selection["max_attempts"] or None
    bank = select_concepts(
        grammar,
        n_target=selection["n_target"],
        sim_threshold=selection["sim_threshold"],
        measure=measure,
        max_attempts=max_attempts,
    )
    out_path = args.out or f"{config.get('io', 'out_dir')}/bank.json"
    save_bank(bank, out_path)
    print(
        f"retained {bank.n} of {bank.n_target} concepts in {bank.attempts_used} attempts, "
        f"max pairwise cosine {bank.max_pairwise_cosine():.6f}"
    )
    if bank.partial:
        print(f"warning: attempt budget exhausted before reaching {bank.n_target} concepts", file=sys.stderr)
        return 2
    return 0


def cmd_train(args, config: RunConfig) -> int:
    dataset = standardize(load_dataset(args.data))
    bank = load_bank(args.bank)
    bank = rescale_bank(bank, dataset.length)
    model = train(dataset, bank, _train_config(config))
    out_path = args.out or f"{config.get('io', 'out_dir')}/model.json"
    save_model(model, out_path)
    print(
        f"train_loss {model.training['final_loss']:.6f} "
        f"train_accuracy {model.training['train_accuracy']:.4f}"
    )
    return 0


def cmd_evaluate(args) -> int:
    model = load_model(args.model)
    dataset = _prepare_for_model(args.data, model)
    _, predictions = predict_batch(dataset.values, model)
    k = model.num_classes
    confusion = np.zeros((k, k), dtype=np.int64)
    for true, pred in zip(dataset.labels, predictions):
        confusion[true, pred] += 1
    accuracy = float(np.trace(confusion)) / dataset.count
    lines = [f"accuracy {accuracy:.4f}"]
    classes = []
    for c in range(k):
        true_positive = int(confusion[c, c])
        predicted = int(confusion[:, c].sum())
        actual = int(confusion[c, :].sum())
        precision = true_positive / predicted if predicted else 0.0
        recall = true_positive / actual if actual else 0.0
        label = format_number(float(model.label_values[c]))
        lines.append(f"class {c} (label {label}): precision {precision:.4f} recall {recall:.4f}")
        classes.append({"index": c, "label": float(model.label_values[c]), "precision": precision, "recall": recall})
    lines.append("confusion rows=true cols=predicted")
    for c in range(k):
        lines.append("\t".join(str(int(v)) for v in confusion[c]))
    print("\n".join(lines))
    if args.out:
        _write_json(
            {
                "version": 1,
                "accuracy": accuracy,
                "classes": classes,
                "confusion": confusion.tolist(),
                "count": dataset.count,
            },
            args.out,
        )
    return 0


def cmd_explain(args, config: RunConfig) -> int:
    section = config["explain"]
    model = load_model(args.model)
    dataset = _prepare_for_model(args.data, model)
    if args.index is not None:
        if not 0 <= args.index < dataset.count:
            raise ValueError(f"sample index {args.index} outside dataset of {dataset.count} rows")
        explanation = local_explanation(
            dataset.trajectory(args.index),
            model,
            dataset,
            mode=section["mode"],
            gamma=section["gamma"],
            theta=section["theta"],
            sample_index=args.index,
        )
        label = format_number(explanation.predicted_label)
        lines = [f"sample {args.index}: predicted class {explanation.predicted_class} (label {label})"]
        for rank, (concept_index, phi, score) in enumerate(explanation.conjuncts, start=1):
            lines.append(f"  {rank}. {format_formula(phi)}  relevance {score:.6f}  concept {concept_index}")
        if explanation.vacuous:
            lines.append("  vacuous: no concept carried relevance")
        else:
            lines.append(f"conjunction: {format_formula(explanation.formula)}")
            lines.append(f"robustness {explanation.robustness:.6f}")
        print("\n".join(lines))
        payload = {"version": 1, "type": "local", "explanation": explanation.to_dict()}
    else:
        explanation = global_explanation(
            args.global_class,
            dataset,
            model,
            coverage_target=section["coverage_target"],
            leakage_max=section["leakage_max"],
            mode=section["mode"],
            gamma=section["gamma"],
            theta=section["theta"],
        )
        label = format_number(explanation.class_label)
        lines = [
            f"class {explanation.class_index} (label {label}): "
            f"coverage {explanation.coverage:.4f} leakage {explanation.leakage:.4f} cost {explanation.total_cost}"
        ]
        for rank, phi in enumerate(explanation.disjuncts, start=1):
            lines.append(f"  {rank}. {format_formula(phi)}")
        for flag in explanation.flags:
            lines.append(f"flag: {flag}")
        print("\n".join(lines))
        payload = {"version": 1, "type": "global", "explanation": explanation.to_dict()}
    if args.out:
        _write_json(payload, args.out)
    return 0


def cmd_monitor(args) -> int:
    phi = parse_formula(args.formula)
    dataset = load_dataset(args.data)
    table = robustness_trace_batch(phi, dataset.values)[:, 0]
    lines = []
    for i, value in enumerate(table):
        verdict = "true" if value >= 0 else "false"
        lines.append(f"{i}\t{repr(float(value))}\t{verdict}")
    text = "\n".join(lines)
    print(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    return 0


def cmd_kernel(args, config: RunConfig) -> int:
    context = KernelContext.from_measure(_measure_from_config(config))
    phi = parse_formula(args.formula)
    if args.formula2 is not None:
        value = formula_kernel(phi, parse_formula(args.formula2), context)
        print(f"formula_kernel\t{repr(value)}")
    elif args.data is not None:
        dataset = load_dataset(args.data)
        if not 0 <= args.index < dataset.count:
            raise ValueError(f"sample index {args.index} outside dataset of {dataset.count} rows")
        value = cross_kernel(dataset.trajectory(args.index), phi, context)
        print(f"cross_kernel\t{repr(value)}")
    else:
        value = formula_kernel(phi, phi, context)
        print(f"self_kernel\t{repr(value)}")
    return 0


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    regular, override_pairs = _split_overrides(list(argv))
    parser = _build_parser()
    try:
        args = parser.parse_args(regular)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        overrides = collect_overrides(override_pairs)
        config = load_config(getattr(args, "config", None), overrides)
        if args.command == "gen-concepts":
            return cmd_gen_concepts(args, config)
        if args.command == "train":
            return cmd_train(args, config)
        if args.command == "evaluate":
            return cmd_evaluate(args)
        if args.command == "explain":
            return cmd_explain(args, config)
        if args.command == "monitor":
            return cmd_monitor(args)
        if args.command == "kernel":
            return cmd_kernel(args, config)
        raise ValueError(f"unknown command {args.command!r}")
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry_point() -> None:
    sys.exit(main())
