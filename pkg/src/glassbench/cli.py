"""Command-line front end over experiment operations.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 execution
error.  `--format json` prints the same canonical document that would be
embedded in a report bundle for the same (config, seed); `--format table`
is a human-oriented rendering of the same values.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .data import data_quality, feature_select, load_csv, prepare, summarize
from .diagnose import DIAGNOSTIC_TESTS
from .errors import (CapabilityError, ConfigError, ConflictError, DataError,
                     NotFoundError, PersistenceError, WorkbenchError)
from .experiment import (Experiment, emit_report, execute_test, load_experiment,
                         run_pipeline, save_experiment)
from .explain import EXPLAIN_METHODS
from .models import (ModelSpec, TRAINERS, purify, read_scores_csv, register,
                     train)
from .utils import canonical_json

_USAGE_EXIT = 1
_DATA_EXIT = 2
_EXEC_EXIT = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(_USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--experiment", help="experiment file to load and save")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write output to this path instead of stdout")
    p.add_argument("--format", choices=["json", "table"], default="json")
    return p


def build_parser() -> _Parser:
    common = _common()
    root = _Parser(prog="glassbench", parents=[common],
                   description="interpretable-ML workbench")
    sub = root.add_subparsers(dest="command", metavar="command")

    data = sub.add_parser("data", parents=[common], help="dataset operations")
    dsub = data.add_subparsers(dest="data_command", metavar="op")
    d_load = dsub.add_parser("load", parents=[common])
    d_load.add_argument("--data", required=True, help="CSV file")
    d_load.add_argument("--target", required=True)
    d_load.add_argument("--task", required=True, choices=["regression", "binary"])
    d_load.add_argument("--name")
    dsub.add_parser("summary", parents=[common])
    dsub.add_parser("quality", parents=[common])
    d_sel = dsub.add_parser("select", parents=[common])
    d_sel.add_argument("--top-k", type=int, default=10)
    d_prep = dsub.add_parser("prepare", parents=[common])
    d_prep.add_argument("--test-ratio", type=float, default=0.2)

    tr = sub.add_parser("train", parents=[common], help="train a glass model")
    tr.add_argument("--model", required=True, choices=sorted(TRAINERS),
                    help="model family")
    tr.add_argument("--id", dest="model_id")
    tr.add_argument("--params", help="JSON dict of hyperparameters")
    tr.add_argument("--purify", action="store_true",
                    help="purify boosted effect tables after training")
    tr.add_argument("--data", help="CSV file (one-shot, no experiment needed)")
    tr.add_argument("--target")
    tr.add_argument("--task", choices=["regression", "binary"])
    tr.add_argument("--test-ratio", type=float, default=0.2)

    rg = sub.add_parser("register", parents=[common],
                        help="register precomputed scores as a model")
    rg.add_argument("--scores", required=True, help="CSV with row_id,score")
    rg.add_argument("--id", dest="model_id", required=True)

    it = sub.add_parser("interpret", parents=[common])
    it.add_argument("--model-id")
    it.add_argument("--local", action="store_true")
    it.add_argument("--row", type=int, default=0)

    ex = sub.add_parser("explain", parents=[common])
    ex.add_argument("--model-id")
    ex.add_argument("--method", required=True, choices=list(EXPLAIN_METHODS))
    ex.add_argument("--config", help="JSON dict of method options")
    ex.add_argument("--row", type=int)
    ex.add_argument("--feature", action="append",
                    help="feature name (repeatable; pdp/ale)")

    dg = sub.add_parser("diagnose", parents=[common])
    dg.add_argument("--test", required=True, choices=list(DIAGNOSTIC_TESTS))
    dg.add_argument("--model-id")
    dg.add_argument("--config", help="JSON dict of test options")
    dg.add_argument("--slice-feature", action="append",
                    help="slicing feature (repeatable)")
    dg.add_argument("--bins", type=int)
    dg.add_argument("--alpha", type=float)
    dg.add_argument("--protected")

    cp = sub.add_parser("compare", parents=[common])
    cp.add_argument("--model-id", action="append", required=True,
                    help="model id (give two or three times)")
    cp.add_argument("--tests", help="comma-separated diagnostics")
    cp.add_argument("--config", help="JSON dict keyed by test name")

    rn = sub.add_parser("run", parents=[common], help="run a pipeline config")
    rn.add_argument("--config", required=True, help="pipeline JSON file")

    sub.add_parser("report", parents=[common])

    sv = sub.add_parser("serve", parents=[common], help="start the HTTP service")
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8080)

    return root


# -- output ------------------------------------------------------------------


def _table_lines(obj, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in obj:
            v = obj[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_table_lines(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        if all(not isinstance(v, (dict, list)) for v in obj):
            lines.append(pad + ", ".join(_scalar(v) for v in obj))
        else:
            for i, v in enumerate(obj):
                lines.append(f"{pad}- [{i}]")
                lines.extend(_table_lines(v, indent + 1))
    else:
        lines.append(pad + _scalar(obj))
    return lines


def _scalar(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return format(v, ".6g")
    if isinstance(v, (dict, list)):
        return "{}" if isinstance(v, dict) else "[]"
    return str(v)


def _emit(doc, args) -> None:
    if args.format == "json":
        text = canonical_json(doc) + "\n"
    else:
        text = "\n".join(_table_lines(doc)) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- experiment plumbing -----------------------------------------------------


def _load_or_new(args) -> Experiment:
    if args.experiment:
        try:
            return load_experiment(args.experiment)
        except PersistenceError as e:
            if "no experiment file" in str(e):
                return Experiment(name=args.experiment, seed=args.seed)
            raise
    return Experiment(name="session", seed=args.seed)


def _save_if_named(exp: Experiment, args) -> None:
    if args.experiment:
        save_experiment(exp, args.experiment)


def _json_arg(text, flag) -> dict:
    if not text:
        return {}
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{flag} is not valid JSON: {e}", key_path=flag)
    if not isinstance(doc, dict):
        raise ConfigError(f"{flag} must be a JSON object", key_path=flag)
    return doc


def _pick_model_id(exp: Experiment, model_id) -> str:
    if model_id:
        return model_id
    if len(exp.model_order) == 1:
        return exp.model_order[0]
    if not exp.model_order:
        raise DataError("experiment has no models")
    raise ConfigError(f"several models present, pick one with --model-id: "
                      f"{exp.model_order}", key_path="model-id")


# -- command handlers --------------------------------------------------------


def _cmd_data(args) -> int:
    op = args.data_command
    if op is None:
        raise ConfigError("data needs an operation: load, summary, quality, "
                          "select, or prepare", key_path="data")
    exp = _load_or_new(args)
    if op == "load":
        ds = load_csv(args.data, args.target, args.task, name=args.name)
        exp.attach_dataset(ds)
        _save_if_named(exp, args)
        _emit({"dataset": ds.name, "rows": ds.n_rows,
               "features": ds.feature_names, "task": ds.task}, args)
        return 0
    ds = exp.require_dataset()
    if op == "summary":
        _emit(summarize(ds).to_dict(), args)
    elif op == "quality":
        _emit(data_quality(ds).to_dict(), args)
    elif op == "select":
        _emit(feature_select(ds, args.top_k).to_dict(), args)
    elif op == "prepare":
        ds = prepare(ds, args.test_ratio, args.seed)
        exp.attach_dataset(ds)
        _save_if_named(exp, args)
        _emit({"dataset": ds.name, "rows": ds.n_rows,
               "train": int(len(ds.train_indices)),
               "test": int(len(ds.test_indices))}, args)
    return 0


def _cmd_train(args) -> int:
    params = _json_arg(args.params, "--params")    # flag errors before any IO
    exp = _load_or_new(args)
    if args.data:
        if not (args.target and args.task):
            raise ConfigError("--data needs --target and --task", key_path="data")
        ds = load_csv(args.data, args.target, args.task)
        ds = prepare(ds, args.test_ratio, args.seed)
        exp.attach_dataset(ds)
    ds = exp.require_dataset()
    if not ds.prepared:
        ds = prepare(ds, args.test_ratio, args.seed)
        exp.attach_dataset(ds)
    spec = ModelSpec(family=args.model, name=args.model_id or args.model,
                     params=params, seed=args.seed)
    model = train(ds, spec)
    if args.purify:
        model = purify(model)
    mid = exp.add_model(model, args.model_id)
    _save_if_named(exp, args)
    _emit({"model_id": mid, "model": model.describe()}, args)
    return 0


def _cmd_register(args) -> int:
    exp = _load_or_new(args)
    ds = exp.require_dataset()
    scores = read_scores_csv(args.scores)
    model = register(args.model_id, ds.task, dataset=ds, scores=scores)
    mid = exp.add_model(model, args.model_id)
    _save_if_named(exp, args)
    _emit({"model_id": mid, "model": model.describe()}, args)
    return 0


def _run_and_emit(exp: Experiment, entry: dict, args) -> int:
    entries = execute_test(exp, entry, seed=args.seed)
    _save_if_named(exp, args)
    doc = entries[0] if len(entries) == 1 else entries
    _emit(doc, args)
    failed = [e for e in entries if e["status"] == "error"]
    if failed:
        sys.stderr.write(f"error: {failed[0]['error']['message']}\n")
        err_type = failed[0]["error"]["type"]
        return _DATA_EXIT if err_type == "DataError" else _EXEC_EXIT
    return 0


def _cmd_interpret(args) -> int:
    exp = _load_or_new(args)
    mid = _pick_model_id(exp, args.model_id)
    entry = {"test": "interpret_local" if args.local else "interpret", "model": mid}
    if args.local:
        entry["config"] = {"row": args.row}
    return _run_and_emit(exp, entry, args)


def _cmd_explain(args) -> int:
    exp = _load_or_new(args)
    mid = _pick_model_id(exp, args.model_id)
    cfg = _json_arg(args.config, "--config")
    if args.row is not None:
        cfg["row"] = args.row
    if args.feature:
        if args.method == "pdp":
            cfg.setdefault("features", args.feature)
        elif args.method == "ale":
            cfg.setdefault("feature", args.feature[0])
        else:
            raise ConfigError("--feature applies to pdp and ale only",
                              key_path="feature")
    entry = {"test": "explain", "method": args.method, "model": mid, "config": cfg}
    return _run_and_emit(exp, entry, args)


def _cmd_diagnose(args) -> int:
    exp = _load_or_new(args)
    mid = _pick_model_id(exp, args.model_id)
    cfg = _json_arg(args.config, "--config")
    if args.slice_feature:
        cfg.setdefault("features", args.slice_feature)
    if args.bins is not None:
        cfg.setdefault("bins", args.bins)
    if args.alpha is not None:
        cfg.setdefault("alpha", args.alpha)
    if args.protected is not None:
        cfg.setdefault("protected", args.protected)
    entry = {"test": args.test, "model": mid, "config": cfg}
    return _run_and_emit(exp, entry, args)


def _cmd_compare(args) -> int:
    exp = _load_or_new(args)
    cfg = _json_arg(args.config, "--config")
    if args.tests:
        cfg["tests"] = [t.strip() for t in args.tests.split(",") if t.strip()]
    entry = {"test": "compare", "model": args.model_id, "config": cfg}
    return _run_and_emit(exp, entry, args)


def _cmd_run(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            config = json.load(fh)
    except OSError as e:
        raise DataError(f"cannot read pipeline config {args.config!r}: {e}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"pipeline config is not valid JSON: {e}",
                          key_path="(root)")
    exp = run_pipeline(config)
    if args.experiment:
        save_experiment(exp, args.experiment)
    doc = emit_report(exp, args.out) if args.out else {
        "experiment": exp.name,
        "models": list(exp.model_order),
        "results": len(exp.results),
        "errors": sum(1 for r in exp.results if r["status"] == "error"),
    }
    if not args.out:
        _emit(doc, args)
    return 0


def _cmd_report(args) -> int:
    exp = _load_or_new(args)
    bundle = emit_report(exp)
    _emit(bundle, args)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    exp = _load_or_new(args)
    app = create_app(exp, experiment_path=args.experiment)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


_HANDLERS = {
    "data": _cmd_data,
    "train": _cmd_train,
    "register": _cmd_register,
    "interpret": _cmd_interpret,
    "explain": _cmd_explain,
    "diagnose": _cmd_diagnose,
    "compare": _cmd_compare,
    "run": _cmd_run,
    "report": _cmd_report,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if not args.command:
        parser.print_usage(sys.stderr)
        return _USAGE_EXIT
    try:
        return _HANDLERS[args.command](args)
    except ConfigError as e:
        at = f" (at {e.key_path})" if e.key_path else ""
        sys.stderr.write(f"error: {e}{at}\n")
        return _USAGE_EXIT
    except DataError as e:
        sys.stderr.write(f"error: {e}\n")
        return _DATA_EXIT
    except (CapabilityError, NotFoundError, ConflictError, PersistenceError) as e:
        sys.stderr.write(f"error: {e}\n")
        return _EXEC_EXIT
    except WorkbenchError as e:
        sys.stderr.write(f"error: {e}\n")
        return _EXEC_EXIT
    except SystemExit as e:
        return int(e.code or 0)


def main_entry() -> None:
    try:
        sys.exit(main())
    except BrokenPipeError:
        # stdout went away (piped into head); die quietly like other tools
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        sys.exit(0)


if __name__ == "__main__":
    main_entry()
