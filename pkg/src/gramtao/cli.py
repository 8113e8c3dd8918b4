"""Command-line front end: check, gen, run, reduce."""

from __future__ import annotations

import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import click

from .derivgen import GenConfig, generate
from .errors import Exhausted, HarnessError, NotFailing, TaoError, TextParseError
from .gdd import ReductionReport, gdd
from .grammar_spec import GrammarSpec, load_spec, parse_strategies, validate_properness
from .harness import CachingChecker, OracleMismatch, SutChecker, SutCrash, SutSpec, SutTimeout, resolve_sut
from .recognize import parse_text
from .semantics import Domain, TestArtifact, make_artifact
from .values import from_record, render_text, to_record

EXIT_OK, EXIT_FAILURES, EXIT_ERROR = 0, 1, 2


@dataclass
class RunConfig:
    spec_path: Path
    sut: SutSpec | None
    gen: GenConfig
    strategies: tuple = ()
    report_path: Path | None = None
    currency: bool = False
    jobs: int = 1
    fmt: str = "text"
    domain: Domain | None = None


@dataclass
class Record:
    id: int
    seed: dict
    text: str
    oracle: Any = None
    verdict: str | None = None
    actual: str | None = None
    reduced_text: str | None = None
    reduced_oracle: Any = None
    steps: int | None = None
    ratio: float | None = None
    error: str | None = None

    def as_dict(self) -> dict:
        out = {
            "id": self.id,
            "seed": self.seed,
            "text": self.text,
            "oracle": to_record(self.oracle),
            "verdict": self.verdict,
            "actual": self.actual,
            "reduced_text": self.reduced_text,
            "reduced_oracle": to_record(self.reduced_oracle),
            "steps": self.steps,
            "ratio": self.ratio,
        }
        if self.error:
            out["error"] = self.error
        return out


def _block(rec: Record) -> str:
    lines = []
    for key, value in rec.as_dict().items():
        if value is None:
            continue
        if key in ("oracle", "reduced_oracle"):
            value = f"{value['kind']} {json.dumps(render_text(from_record(value)))}"
        elif isinstance(value, (str, dict)):
            value = json.dumps(value, sort_keys=True)
        lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def write_report(records: list[Record], path: Path | None, fmt: str) -> None:
    if fmt == "jsonl":
        body = "".join(json.dumps(r.as_dict(), sort_keys=True) + "\n" for r in records)
    else:
        body = "\n".join(_block(r) for r in records)
    if path is None:
        click.echo(body, nl=False)
    else:
        Path(path).write_text(body, encoding="utf-8")


def read_report(path: Path) -> list[dict]:
    """Records of a report in either format."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return [json.loads(line) for line in text.splitlines() if line.strip()]
    records = []
    for block in text.split("\n\n"):
        rec: dict[str, Any] = {}
        for line in block.splitlines():
            key, _, value = line.partition(": ")
            if key in ("oracle", "reduced_oracle"):
                kind, _, rendered = value.partition(" ")
                rec[key] = {"kind": kind, "value": json.loads(rendered)}
            elif key:
                rec[key] = json.loads(value)
        if rec:
            records.append(rec)
    return records


# --------------------------------------------------------------------------
# pipeline


def generate_artifacts(spec: GrammarSpec, cfg: GenConfig, domain: Domain | None = None) -> tuple[list[TestArtifact], str | None]:
    note = None
    try:
        trees = generate(spec, cfg)
    except Exhausted as exc:
        trees, note = exc.trees, str(exc)
    arts = [make_artifact(spec, t, {"seed": cfg.seed, "index": i}, domain) for i, t in enumerate(trees)]
    return arts, note


def _verdict_fields(v) -> tuple[str, str | None]:
    if isinstance(v, OracleMismatch):
        return "OracleMismatch", v.actual
    if isinstance(v, SutCrash):
        return "SutCrash", f"exit {v.exit_status}"
    if isinstance(v, SutTimeout):
        return "SutTimeout", None
    return "Pass", None


def run_artifacts(cfg: RunConfig, arts: list[TestArtifact]):
    checker = SutChecker(cfg.sut, cfg.currency)

    def one(art: TestArtifact):
        return checker(art.text, art.oracle) if art.evaluable else None

    jobs = 1 if cfg.sut.serial else max(1, cfg.jobs)
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(one, arts))


def reduce_artifacts(cfg: RunConfig, spec: GrammarSpec, arts: list[TestArtifact]) -> list[ReductionReport | str]:
    def one(art: TestArtifact):
        checker = CachingChecker(SutChecker(cfg.sut, cfg.currency))
        try:
            return gdd(spec, art, checker, cfg.strategies or None, cfg.domain)
        except NotFailing as exc:
            return f"not failing: {exc}"

    jobs = 1 if cfg.sut.serial else max(1, cfg.jobs)
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(one, arts))


# --------------------------------------------------------------------------
# click plumbing


def _load(spec_path: str, rates: str | None) -> tuple[GrammarSpec, Domain | None]:
    domain = None
    if rates:
        from .parking import builtin_domain_parking, load_rates

        domain = builtin_domain_parking(load_rates(rates))
    return load_spec(spec_path, domain), domain


def _fail(message: str, status: int = EXIT_ERROR):
    click.echo(f"error: {message}", err=True)
    sys.exit(status)


def _common(fn):
    opts = [
        click.option("--spec", "spec_path", required=True, envvar="GRAMTAO_SPEC", type=click.Path(dir_okay=False),
                     help="Grammar file."),
        click.option("--count", default=100, show_default=True, envvar="GRAMTAO_COUNT", type=int),
        click.option("--seed", default=0, show_default=True, envvar="GRAMTAO_SEED", type=int),
        click.option("--depth", default=12, show_default=True, envvar="GRAMTAO_DEPTH", type=int,
                     help="Depth budget before forced shortest completion."),
        click.option("--report", "report_path", default=None, envvar="GRAMTAO_REPORT",
                     type=click.Path(dir_okay=False), help="Write the report here instead of stdout."),
        click.option("--format", "fmt", default="text", envvar="GRAMTAO_FORMAT",
                     type=click.Choice(["text", "jsonl"]), show_default=True),
        click.option("--rates", default=None, envvar="GRAMTAO_RATES", type=click.Path(exists=True, dir_okay=False),
                     help="Rate table for the parking domain."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _sut_options(fn):
    opts = [
        click.option("--sut", required=True, envvar="GRAMTAO_SUT",
                     help="Command line of the system under test, or corpus:M0..M5, corpus:P0, corpus:P1[:faults]."),
        click.option("--jobs", default=1, show_default=True, envvar="GRAMTAO_JOBS", type=int),
        click.option("--timeout-ms", default=10_000, show_default=True, envvar="GRAMTAO_TIMEOUT_MS", type=int),
        click.option("--currency/--no-currency", default=False, envvar="GRAMTAO_CURRENCY",
                     help="Compare real results to two decimals."),
        click.option("--serial", is_flag=True, envvar="GRAMTAO_SERIAL", help="Never run the SUT concurrently."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _config(spec_path, count, seed, depth, report_path, fmt, rates, sut=None, jobs=1, timeout_ms=10_000,
            currency=False, serial=False, strategies=None) -> tuple[RunConfig, GrammarSpec]:
    try:
        gen = GenConfig(seed=seed, count=count, depth_budget=depth)
    except ValueError as exc:
        _fail(str(exc))
    try:
        spec, domain = _load(spec_path, rates)
    except OSError as exc:
        _fail(f"cannot read {spec_path}: {exc}")
    except TaoError as exc:
        _fail(f"{spec_path}: {exc}")
    sut_spec = None
    if sut is not None:
        try:
            sut_spec = resolve_sut(sut, timeout_ms)
        except ValueError as exc:
            _fail(str(exc))
        if serial:
            sut_spec = SutSpec(sut_spec.command, sut_spec.input_mode, sut_spec.timeout_ms, True, sut_spec.name)
    chosen = ()
    if strategies:
        try:
            chosen = parse_strategies(strategies)
        except ValueError as exc:
            _fail(f"--strategies: {exc}")
        unknown = {v for s in chosen for v in getattr(s, "vars", ()) if v not in spec.by_lhs}
        if unknown:
            _fail(f"--strategies names unknown variables {sorted(unknown)}")
    cfg = RunConfig(Path(spec_path), sut_spec, gen, chosen, Path(report_path) if report_path else None,
                    currency, jobs, fmt, domain)
    return cfg, spec


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """Grammar-based test generation with semantic oracles and test-case reduction."""


@main.command()
@click.option("--spec", "spec_path", required=True, envvar="GRAMTAO_SPEC", type=click.Path(dir_okay=False))
def check(spec_path):
    """Parse and validate a grammar file."""
    try:
        spec = load_spec(spec_path)
    except OSError as exc:
        _fail(f"cannot read {spec_path}: {exc}")
    except TaoError as exc:
        _fail(f"{spec_path}: {exc}")
    report = validate_properness(spec)
    for line in report.lines():
        click.echo(line)
    click.echo(f"{len(spec.productions)} productions, start {spec.start}, domain {spec.domain_name}")
    sys.exit(EXIT_OK if report.ok else EXIT_FAILURES)


@main.command()
@_common
def gen(spec_path, count, seed, depth, report_path, fmt, rates):
    """Generate test artifacts with their oracles."""
    cfg, spec = _config(spec_path, count, seed, depth, report_path, fmt, rates)
    if not validate_properness(spec).proper:
        _fail("grammar is not proper; run 'gramtao check' for details")
    arts, note = generate_artifacts(spec, cfg.gen, cfg.domain)
    records = [Record(i, a.seed_info, a.text, a.oracle, error=a.error) for i, a in enumerate(arts)]
    write_report(records, cfg.report_path, fmt)
    click.echo(f"generated {len(arts)} artifacts", err=True)
    if note:
        _fail(note)


@main.command()
@_common
@_sut_options
def run(spec_path, count, seed, depth, report_path, fmt, rates, sut, jobs, timeout_ms, currency, serial):
    """Generate artifacts and run them against a SUT."""
    cfg, spec = _config(spec_path, count, seed, depth, report_path, fmt, rates, sut, jobs, timeout_ms,
                        currency, serial)
    if not validate_properness(spec).proper:
        _fail("grammar is not proper; run 'gramtao check' for details")
    arts, note = generate_artifacts(spec, cfg.gen, cfg.domain)
    try:
        verdicts = run_artifacts(cfg, arts)
    except HarnessError as exc:
        _fail(str(exc))
    records = []
    for i, (art, v) in enumerate(zip(arts, verdicts)):
        name, actual = _verdict_fields(v) if v is not None else ("Skipped", None)
        records.append(Record(i, art.seed_info, art.text, art.oracle, name, actual, error=art.error))
    write_report(records, cfg.report_path, fmt)
    judged = [r for r in records if r.verdict != "Skipped"]
    failed = [r for r in judged if r.verdict != "Pass"]
    ratio = len(failed) / len(judged) if judged else 0.0
    click.echo(f"ran {len(judged)} artifacts ({len(records) - len(judged)} skipped): "
               f"{len(judged) - len(failed)} passed, {len(failed)} failed, failure ratio {ratio:.4f}", err=True)
    if note:
        click.echo(f"note: {note}", err=True)
    sys.exit(EXIT_FAILURES if failed else EXIT_OK)


@main.command()
@_common
@_sut_options
@click.option("--strategies", default=None, envvar="GRAMTAO_STRATEGIES",
              help='Override the grammar\'s reduction directive, e.g. \'{"default", "directRec"}\'.')
@click.option("--from-report", "from_report", default=None, type=click.Path(exists=True, dir_okay=False),
              help="Reduce the failing records of an earlier run report instead of generating.")
@click.option("--text", "texts", multiple=True, help="Reduce this input (repeatable).")
def reduce(spec_path, count, seed, depth, report_path, fmt, rates, sut, jobs, timeout_ms, currency, serial,
           strategies, from_report, texts):
    """Reduce every failing artifact."""
    cfg, spec = _config(spec_path, count, seed, depth, report_path, fmt, rates, sut, jobs, timeout_ms,
                        currency, serial, strategies)
    try:
        if texts or from_report:
            sources = list(texts)
            if from_report:
                sources += [r["text"] for r in read_report(Path(from_report))
                            if r.get("verdict") not in (None, "Pass", "Skipped")]
            arts = [make_artifact(spec, parse_text(spec, t), {"input": i}, cfg.domain) for i, t in enumerate(sources)]
            candidates = [a for a in arts if a.evaluable]
        else:
            if not validate_properness(spec).proper:
                _fail("grammar is not proper; run 'gramtao check' for details")
            arts, _ = generate_artifacts(spec, cfg.gen, cfg.domain)
            verdicts = run_artifacts(cfg, arts)
            candidates = [a for a, v in zip(arts, verdicts) if v is not None and v.failure_class is not None]
        results = reduce_artifacts(cfg, spec, candidates)
    except (HarnessError, TextParseError) as exc:
        _fail(str(exc))
    records = []
    ratios = []
    for i, (art, res) in enumerate(zip(candidates, results)):
        if isinstance(res, str):
            click.echo(f"skipped artifact {i}: {res}", err=True)
            records.append(Record(i, art.seed_info, art.text, art.oracle, "Pass"))
            continue
        ratios.append(res.ratio)
        records.append(Record(i, art.seed_info, art.text, art.oracle, res.failure_class, None,
                              res.reduced.text, res.reduced.oracle, len(res.steps), round(res.ratio, 6)))
    write_report(records, cfg.report_path, fmt)
    mean = sum(ratios) / len(ratios) if ratios else 0.0
    click.echo(f"reduced {len(ratios)} failing artifacts, mean reduction ratio {mean:.4f}", err=True)
    sys.exit(EXIT_FAILURES if ratios else EXIT_OK)


if __name__ == "__main__":
    main()
