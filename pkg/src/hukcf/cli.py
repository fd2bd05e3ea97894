"""Command-line front end.

    hukcf run --dataset OTB --variant huber+scale --out results/
    hukcf compare --dataset OTB --variant huber --variant ridge --out cmp/

Config files are flat ``key=value`` text naming TrackerConfig fields;
``--set key=value`` overrides them. Exit status is 0 only when every
requested sequence produced metrics, 2 on usage errors.
"""
import argparse
import csv
import io
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import evaluation
from .errors import SequenceSetMismatch
from .tracker import TrackerConfig

log = logging.getLogger("hukcf")

VARIANTS = {
    "huber": {"regularizer": "huber", "use_scale": False},
    "huber+scale": {"regularizer": "huber", "use_scale": True},
    "ridge": {"regularizer": "ridge", "use_scale": False},
    "ridge+scale": {"regularizer": "ridge", "use_scale": True},
}
AGGREGATION_MODES = ("per-frame", "per-sequence-mean")


class ConfigError(ValueError):
    pass


@dataclass
class RunSpec:
    dataset: Path
    variant: str = "huber+scale"
    sequences: tuple = ()
    overrides: dict = field(default_factory=dict)
    config_file: Path | None = None
    out: Path = Path("results")
    jobs: int = 1
    mode: str = "per-frame"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}; choose from {', '.join(VARIANTS)}")


@dataclass
class RunOutcome:
    run_spec: RunSpec
    results: list
    failures: dict
    summary: dict | None

    @property
    def ok(self):
        return not self.failures and bool(self.results)


def _coerce(name, raw, typ):
    if typ is bool or typ == "bool":
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{name}: expected a boolean, got {raw!r}")
    try:
        if typ is int or typ == "int":
            return int(raw)
        if typ is float or typ == "float":
            return float(raw)
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {raw!r}") from None
    return raw.strip()


def parse_assignments(lines, source="--set"):
    types = TrackerConfig.field_types()
    out = {}
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}: expected key=value, got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in types:
            raise ConfigError(f"{source}: unknown config key {key!r}")
        out[key] = _coerce(key, raw, types[key])
    return out


def build_config(run_spec):
    """Defaults, then the variant, then the config file, then ``overrides``."""
    values = dict(VARIANTS[run_spec.variant])
    if run_spec.config_file is not None:
        text = Path(run_spec.config_file).read_text()
        values.update(parse_assignments(text.splitlines(), str(run_spec.config_file)))
    values.update(run_spec.overrides)
    try:
        return replace(TrackerConfig(), **values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _run_one(args):
    path, cfg = args
    seq = evaluation.load_sequence(path)
    return evaluation.run_sequence(seq, cfg)


def run(run_spec):
    """Track every selected sequence and write per-sequence and summary files."""
    cfg = build_config(run_spec)
    paths = evaluation.discover(run_spec.dataset, run_spec.sequences or None)
    if not paths:
        raise FileNotFoundError(f"no sequences found under {run_spec.dataset}")
    out = Path(run_spec.out)
    out.mkdir(parents=True, exist_ok=True)
    work = [(p, cfg) for p in paths]
    results, failures = [], {}

    def collect(path, fn):
        try:
            res = fn()
        except Exception as exc:  # one bad sequence must not stop the rest
            log.error("%s: %s: %s", path.name, type(exc).__name__, exc)
            failures[path.name] = f"{type(exc).__name__}: {exc}"
            return
        evaluation.write_sequence_outputs(out, res)
        results.append(res)
        log.info("%s: DP@20=%.3f OP@0.5=%.3f fps=%.1f",
                 res.name, res.dp.at(20.0), res.op.at(0.5), res.fps)

    if run_spec.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=run_spec.jobs) as pool:
            futures = [(w[0], pool.submit(_run_one, w)) for w in work]
            for path, fut in futures:
                collect(path, fut.result)
    else:
        for w in work:
            collect(w[0], lambda w=w: _run_one(w))

    results.sort(key=lambda r: r.name)
    summary = None
    if results:
        summary = evaluation.write_summary(out, results, run_spec.mode, run_spec.variant)
    return RunOutcome(run_spec, results, failures, summary)


COMPARE_FIELDS = ("variant", "op_at_05", "dp_at_20", "mean", "fps")


def compare(outcomes):
    """One CSV row per run: OP@0.5, DP@20, their mean, and FPS."""
    if len(outcomes) < 2:
        raise ValueError("compare needs at least two runs")
    names = [sorted(r.name for r in o.results) for o in outcomes]
    if any(n != names[0] for n in names[1:]):
        raise SequenceSetMismatch(f"runs cover different sequences: {names}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COMPARE_FIELDS)
    for o in outcomes:
        ov = o.summary["overall"]
        writer.writerow([
            o.run_spec.variant,
            repr(ov["op_at_05"]),
            repr(ov["dp_at_20"]),
            repr((ov["op_at_05"] + ov["dp_at_20"]) / 2.0),
            f"{ov['fps']:.1f}",
        ])
    return buf.getvalue()


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dataset", required=True, type=Path, help="OTB-layout dataset root")
    common.add_argument("--seq", default="", help="comma-separated sequence names (default: all)")
    common.add_argument("--config", type=Path, help="key=value config file")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one config field (repeatable)")
    common.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    common.add_argument("--jobs", type=int, default=1, help="sequences tracked in parallel")
    common.add_argument("--aggregate", choices=AGGREGATION_MODES, default="per-frame",
                        help="pool frames, or average per-sequence curves")
    common.add_argument("-v", "--verbose", action="store_true", help="log per-sequence progress")

    p = argparse.ArgumentParser(prog="hukcf", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="track sequences and write metrics")
    r.add_argument("--variant", choices=list(VARIANTS), default="huber+scale")
    c = sub.add_parser("compare", parents=[common], help="run several variants, write a CSV table")
    c.add_argument("--variant", choices=list(VARIANTS), action="append", required=True,
                   help="variant to include (repeat for each)")
    return p


def _run_spec(args, variant, out):
    return RunSpec(
        dataset=args.dataset,
        variant=variant,
        sequences=tuple(s for s in args.seq.split(",") if s),
        overrides=parse_assignments(args.set),
        config_file=args.config,
        out=out,
        jobs=max(1, args.jobs),
        mode=args.aggregate,
    )


def main(argv=None):
    parser = _parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    try:
        if args.command == "run":
            run_specs = [_run_spec(args, args.variant, args.out)]
        else:
            run_specs = [_run_spec(args, v, args.out / v) for v in args.variant]
        for s in run_specs:
            build_config(s)
    except ConfigError as exc:
        parser.error(str(exc))

    try:
        outcomes = [run(s) for s in run_specs]
    except (FileNotFoundError, ValueError) as exc:
        print(f"hukcf: error: {exc}", file=sys.stderr)
        return 1

    status = 0 if all(o.ok for o in outcomes) else 1
    for o in outcomes:
        for name, msg in sorted(o.failures.items()):
            print(f"hukcf: {o.run_spec.variant}: {name} failed: {msg}", file=sys.stderr)
    if args.command == "compare":
        try:
            table = compare(outcomes)
        except (SequenceSetMismatch, TypeError) as exc:
            print(f"hukcf: error: {exc}", file=sys.stderr)
            return 1
        (args.out / "comparison.csv").write_text(table)
        sys.stdout.write(table)
    return status


if __name__ == "__main__":
    sys.exit(main())
