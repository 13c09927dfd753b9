"""Command-line front end: Lie coefficients of the built-in models.

Exit status: 0 on success, 1 when a requested check fails, 2 for bad
arguments, 3 when the computation itself raises (e.g. a domain error).
"""

import argparse
import csv
import gc
import io
import json
import math
import statistics
import sys
import time
from dataclasses import dataclass

import numpy as np

from .errors import TaylorError
from .lie import FieldKind, lie, lie_covector_jrec, lie_vector_zrec
from .models import MODELS, get_model
from .oracle import definition_check, nested_oracle_report
from .report import OracleReport
from .tape import as_codelist

__all__ = ["RunConfig", "ConfigError", "run", "bench_scaling", "main"]

FIELD_KINDS = {"h": FieldKind.SCALAR, "g": FieldKind.VECTOR, "f": FieldKind.VECTOR,
               "w": FieldKind.COVECTOR}
CHECKS = ("cross", "fd", "nested")
CROSS_TOL = 1e-12
FD_TOL = 1e-6
NESTED_TOL = 1e-5


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass
class RunConfig:
    model: str = "gantry"
    field: str = "h"
    order: int = 10
    x0: tuple = None
    params: tuple = None
    format: str = "json"
    checks: tuple = ()
    bench: bool = False
    reps: int = 5
    out: str = None

    def validate(self):
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; choose from {sorted(MODELS)}")
        if self.field not in FIELD_KINDS:
            raise ConfigError(f"unknown field {self.field!r}; choose from {sorted(FIELD_KINDS)}")
        if self.order < 0:
            raise ConfigError(f"order must be >= 0, got {self.order}")
        model = get_model(self.model)
        if self.x0 is not None and len(self.x0) != model.n:
            raise ConfigError(f"x0 needs {model.n} entries for {self.model}, got {len(self.x0)}")
        if self.params is not None and len(self.params) != len(model.params):
            raise ConfigError(f"params needs {len(model.params)} entries for {self.model}, "
                              f"got {len(self.params)}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {self.format!r}")
        bad = set(self.checks) - set(CHECKS)
        if bad:
            raise ConfigError(f"unknown checks {sorted(bad)}")
        if self.bench and self.reps < 3:
            raise ConfigError("bench needs reps >= 3")
        if not all(map(math.isfinite, (self.x0 or ()) + (self.params or ()))):
            raise ConfigError("x0 and params must be finite")
        return self


def _fields(config):
    model = get_model(config.model)
    fields = model.fields(config.params)
    x0 = tuple(float(v) for v in (config.x0 if config.x0 is not None else model.x0))
    return fields["f"], fields[config.field], x0


def _run_checks(config, f, X, x0, result):
    kind = FIELD_KINDS[config.field]
    p = config.order
    checks = {}
    if "cross" in config.checks:
        if kind is FieldKind.SCALAR:
            checks["cross"] = {"skipped": "no second path for scalar fields"}
        else:
            alt = (lie_vector_zrec if kind is FieldKind.VECTOR else lie_covector_jrec)(f, X, x0, p)
            rep = OracleReport.compare("cross", result.tcs(), alt.tcs(), CROSS_TOL)
            checks["cross"] = rep.as_dict()
    if "fd" in config.checks:
        if p < 1:
            checks["fd"] = {"skipped": "order < 1"}
        else:
            checks["fd"] = definition_check(kind, f, X, x0, result, FD_TOL).as_dict()
    if "nested" in config.checks:
        if kind is not FieldKind.SCALAR:
            checks["nested"] = {"skipped": "nested oracle covers scalar fields only"}
        else:
            kmax = min(3, p)
            checks["nested"] = nested_oracle_report(f, X, x0, result, kmax, NESTED_TOL).as_dict()
    return checks


class _GCPaused:
    def __enter__(self):
        self.enabled = gc.isenabled()
        gc.collect()
        gc.disable()

    def __exit__(self, *exc):
        if self.enabled:
            gc.enable()


def _interleaved_medians(fns, reps):
    """Median wall time of each callable; repetitions run round-robin so a
    transient slowdown of the machine is spread over all callables."""
    times = [[] for _ in fns]
    with _GCPaused():
        for _ in range(reps):
            for fn, ts in zip(fns, times):
                t = time.perf_counter()
                fn()
                ts.append(time.perf_counter() - t)
    return [statistics.median(ts) for ts in times]


def fit_exponent(ks, times):
    """Slope of ``log t`` against ``log k`` (least squares)."""
    return float(np.polyfit(np.log(np.asarray(ks, float)), np.log(np.asarray(times, float)), 1)[0])


def bench_scaling(model="gantry", field="g", kmax=10, reps=5, kmin=1, step=1, x0=None,
                  params=None):
    """Median wall time of the full Lie computation for ``k = kmin..kmax``.

    The code list is re-recorded in every timed call, as in a cold run; its
    recording time is also measured on its own and reported as a fraction of
    each total.  Returns a dict with ``k``, ``seconds``, ``tape_seconds``,
    ``tape_fraction`` and the fitted log-log ``exponent``.
    """
    if kmax < 4 or reps < 3:
        raise ConfigError("bench_scaling needs kmax >= 4 and reps >= 3")
    config = RunConfig(model=model, field=field, order=kmax, x0=x0, params=params).validate()
    f, X, x0 = _fields(config)
    kind = FIELD_KINDS[field]
    n = len(x0)
    ks = list(range(max(1, kmin), kmax + 1, step))
    fns = [lambda: as_codelist(f, n)] + [lambda k=k: lie(kind, f, X, x0, k) for k in ks]
    tape, *secs = _interleaved_medians(fns, reps)
    return {
        "model": model, "field": field, "reps": reps, "k": ks, "seconds": secs,
        "tape_seconds": tape, "tape_fraction": [tape / s for s in secs],
        "exponent": fit_exponent(ks, secs),
    }


def _components(arr):
    arr = np.asarray(arr, dtype=float)
    for idx in np.ndindex(arr.shape):
        yield idx, float(arr[idx])


def _to_csv(result):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "indices", "tc", "derivative"])
    for k in range(result.order + 1):
        der = dict(_components(result.get_derivative(k)))
        for idx, tc in _components(result.get_tc(k)):
            writer.writerow([k, ";".join(map(str, idx)), repr(tc), repr(der[idx])])
    return buf.getvalue()


def run(config, stream=None):
    """Compute, check and emit one report; returns ``(status, report_dict)``.

    Raises ConfigError for invalid configurations.  Check failures are
    reported in the output and give status 1.
    """
    config.validate()
    stream = sys.stdout if stream is None else stream
    f, X, x0 = _fields(config)
    kind = FIELD_KINDS[config.field]
    t = time.perf_counter()
    result = lie(kind, f, X, x0, config.order)
    elapsed = time.perf_counter() - t
    checks = _run_checks(config, f, X, x0, result)
    timing = {"seconds": elapsed}
    if config.bench:
        kmax = max(config.order, 4)
        timing["bench"] = bench_scaling(config.model, config.field, kmax, config.reps,
                                        x0=x0, params=config.params)
    report = {
        "model": config.model,
        "field": config.field,
        "kind": kind.value,
        "order": config.order,
        "x0": list(x0),
        "shape": list(result.shape),
        "tc": [np.asarray(result.get_tc(k), dtype=float).tolist() for k in range(result.order + 1)],
        "derivative": [np.asarray(result.get_derivative(k), dtype=float).tolist()
                       for k in range(result.order + 1)],
        "checks": checks,
        "timing": timing,
    }
    text = json.dumps(report, indent=1) + "\n" if config.format == "json" else _to_csv(result)
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stream.write(text)
    failed = [name for name, c in checks.items() if c.get("passed") is False]
    return (1 if failed else 0), report


def _floats(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers: {text!r}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lietaylor",
        description="Lie derivatives and iterated Lie brackets by Taylor arithmetic.")
    parser.add_argument("--model", default="gantry", choices=sorted(MODELS))
    parser.add_argument("--field", default="h", choices=sorted(FIELD_KINDS),
                        help="h: output map, g: input field, f: drift as a vector field, "
                             "w: differential of h (covector)")
    parser.add_argument("--order", type=int, default=10)
    parser.add_argument("--x0", type=_floats, default=None, help="comma-separated state")
    parser.add_argument("--params", type=_floats, default=None,
                        help="comma-separated model parameters (gantry: M,m,ell,G)")
    parser.add_argument("--format", default="json", choices=("json", "csv"))
    parser.add_argument("--check", action="append", default=[],
                        choices=CHECKS + ("all",), help="may be repeated")
    parser.add_argument("--bench", action="store_true", help="time every order up to --order")
    parser.add_argument("--reps", type=int, default=5)
    parser.add_argument("--out", default=None, help="write the report here instead of stdout")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    checks = CHECKS if "all" in args.check else tuple(dict.fromkeys(args.check))
    config = RunConfig(model=args.model, field=args.field, order=args.order, x0=args.x0,
                       params=args.params, format=args.format, checks=checks,
                       bench=args.bench, reps=args.reps, out=args.out)
    try:
        config.validate()
    except ConfigError as exc:
        parser.error(str(exc))
    try:
        status, report = run(config)
    except (TaylorError, ValueError) as exc:
        print(f"lietaylor: error: {exc}", file=sys.stderr)
        return 3
    if status:
        failed = [n for n, c in report["checks"].items() if c.get("passed") is False]
        print(f"lietaylor: check failed: {', '.join(failed)}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
