"""Batch entry point: train models, emit curves and signatures, run the service.

Exit codes: 0 success, 2 usage or input error, 1 internal error. Every
command is deterministic for a fixed --seed and fixed inputs; each run
writes a ``run.json`` manifest recording the command, options, and seed
next to its output files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .curves import score_curves
from .dataset import Dataset, impute_missing, load_csv, load_schema
from .explain import (
    SORT_MODES,
    feature_order,
    impactful_changes,
    local_importance,
    partial_dependence,
    what_if,
    write_curve_csv,
    write_histogram_csv,
)
from .models import load_model, predict_batch, save_model, train_logistic, train_tree
from .service import Session, make_server
from .signatures import ThresholdPair, build_signatures, signature_to_dict


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="boxlens", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    io = argparse.ArgumentParser(add_help=False)
    io.add_argument("--data", required=True, help="CSV file with a header row")
    io.add_argument("--schema", required=True, help="JSON schema: column -> {kind, feasible?}")
    io.add_argument("--label", default="label", help="name of the outcome column")
    io.add_argument("--seed", type=int, default=42)
    io.add_argument("--out", required=True, help="output directory")

    with_model = argparse.ArgumentParser(add_help=False)
    with_model.add_argument("--model", required=True, help="model JSON produced by `train`")

    p_train = sub.add_parser("train", parents=[io], help="fit a model and write model.json")
    p_train.add_argument("--model-kind", choices=("logistic", "tree"), default="logistic")
    p_train.add_argument("--lr", type=float, default=0.1, help="logistic learning rate")
    p_train.add_argument("--iters", type=int, default=500, help="logistic iterations")
    p_train.add_argument("--max-depth", type=int, default=4, help="tree depth limit")
    p_train.add_argument("--min-leaf", type=int, default=1, help="tree minimum leaf size")
    p_train.set_defaults(func=cmd_train)

    p_pdp = sub.add_parser("pdp", parents=[io, with_model], help="emit a partial dependence curve")
    p_pdp.add_argument("--feature", required=True)
    p_pdp.set_defaults(func=cmd_pdp)

    p_inspect = sub.add_parser("inspect", parents=[io, with_model], help="explain one row")
    p_inspect.add_argument("--row", type=int, default=0)
    p_inspect.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="override a feature value (repeatable; snapped to feasible)",
    )
    p_inspect.add_argument("--objective", choices=("increase", "decrease"), default="decrease")
    p_inspect.add_argument("--sort", choices=SORT_MODES, default="impactful")
    p_inspect.set_defaults(func=cmd_inspect)

    p_sig = sub.add_parser("signatures", parents=[io, with_model], help="build class signatures")
    p_sig.add_argument("--tau-pos", type=float, required=True)
    p_sig.add_argument("--tau-neg", type=float, required=True)
    p_sig.add_argument("--k", default="auto", help="cluster count per side: integer or 'auto'")
    p_sig.set_defaults(func=cmd_signatures)

    p_serve = sub.add_parser("serve", parents=[io, with_model], help="run the HTTP service")
    p_serve.add_argument("--port", type=int, default=8321)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--objective", choices=("increase", "decrease"), default="decrease")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def _load_dataset(args) -> Dataset:
    schema = load_schema(args.schema)
    return impute_missing(load_csv(args.data, schema, args.label))


def _write_manifest(args, extra: dict | None = None) -> None:
    doc = {
        "command": args.command,
        "seed": args.seed,
        "data": args.data,
        "schema": args.schema,
        "label": args.label,
    }
    if getattr(args, "model", None):
        doc["model"] = args.model
    if extra:
        doc.update(extra)
    path = os.path.join(args.out, f"{args.command}_run.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_train(args) -> int:
    data = _load_dataset(args)
    if args.model_kind == "logistic":
        model = train_logistic(data, lr=args.lr, iters=args.iters)
        options = {"model_kind": "logistic", "lr": args.lr, "iters": args.iters}
    else:
        model = train_tree(data, max_depth=args.max_depth, min_leaf=args.min_leaf)
        options = {"model_kind": "tree", "max_depth": args.max_depth, "min_leaf": args.min_leaf}
    os.makedirs(args.out, exist_ok=True)
    save_model(model, os.path.join(args.out, "model.json"), seed=args.seed)
    scores = np.asarray(predict_batch(model, data.rows))
    accuracy = float(np.mean((scores >= 0.5).astype(int) == data.labels))
    auc = score_curves(data.labels, scores, allow_single_class=True).auc
    _write_manifest(args, options)
    print(f"train_accuracy={accuracy:.6f} train_auc={auc:.6f}")
    return 0


def cmd_pdp(args) -> int:
    data = _load_dataset(args)
    model = load_model(args.model)
    meta = data.feature_named(args.feature)
    curve = partial_dependence(model, data, meta.index)
    os.makedirs(args.out, exist_ok=True)
    write_curve_csv(os.path.join(args.out, f"pdp_{meta.name}.csv"), curve)
    write_histogram_csv(os.path.join(args.out, f"hist_{meta.name}.csv"), curve.histogram)
    _write_manifest(args, {"feature": meta.name})
    return 0


def _parse_overrides(pairs: list[str]) -> dict[str, float]:
    overrides = {}
    for pair in pairs:
        name, sep, raw = pair.partition("=")
        if not sep:
            raise ValueError(f"override {pair!r} must look like NAME=VALUE")
        try:
            overrides[name] = float(raw)
        except ValueError:
            raise ValueError(f"override {pair!r}: {raw!r} is not a number") from None
    return overrides


def cmd_inspect(args) -> int:
    data = _load_dataset(args)
    model = load_model(args.model)
    if not 0 <= args.row < data.n_rows:
        raise ValueError(f"row {args.row} out of range [0, {data.n_rows})")
    overrides = _parse_overrides(args.overrides)
    anchor, score = what_if(model, data.rows[args.row], overrides, data.features)
    report = local_importance(model, data, anchor)
    changes = impactful_changes(model, data, anchor, args.objective)
    order = feature_order(
        args.sort, importance=report, changes=changes, model=model, d=data
    )
    names = [m.name for m in data.features]
    doc = {
        "seed": args.seed,
        "row": args.row,
        "overrides": overrides,
        "evaluated": [float(v) for v in anchor],
        "score": score,
        "importance": {names[f]: float(report.importance[f]) for f in range(data.n_features)},
        "impactful": [
            {
                "feature": names[c.feature],
                "current_value": c.current_value,
                "suggested_value": c.suggested_value,
                "delta": c.delta,
                "direction": c.direction,
            }
            for c in changes
        ],
        "objective": args.objective,
        "sort": args.sort,
        "order": [names[f] for f in order],
    }
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "inspect.json"), "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(args)
    return 0


def cmd_signatures(args) -> int:
    data = _load_dataset(args)
    model = load_model(args.model)
    k = args.k if args.k == "auto" else int(args.k)
    tp = ThresholdPair(tau_pos=args.tau_pos, tau_neg=args.tau_neg)
    sm = build_signatures(data, model, tp, k, k, args.seed)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "signatures.json"), "w", encoding="utf-8") as fh:
        json.dump(signature_to_dict(sm), fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(args, {"tau_pos": args.tau_pos, "tau_neg": args.tau_neg, "k": args.k})
    return 0


def cmd_serve(args) -> int:
    data = _load_dataset(args)
    model = load_model(args.model)
    if not 0 < args.port < 65536:
        raise ValueError(f"port {args.port} out of range [1, 65535]")
    session = Session(data, model, seed=args.seed, objective=args.objective)
    server = make_server(session, host=args.host, port=args.port)
    print(f"serving on http://{args.host}:{server.server_address[1]}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # unexpected faults: distinct exit code
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
