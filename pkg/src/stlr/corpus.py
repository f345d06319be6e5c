"""Fixture corpora: directories of term and difference files with expected verdicts.

A corpus directory holds ``manifest.toml`` with one ``[[fixture]]`` table per
check (``name``, ``lhs``, ``rhs``, ``diff``, ``type``, ``expect``; optionally
``trials`` and ``seed``).  File fields are paths relative to the directory.
A directory without a manifest is an empty corpus.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .dlr import dlr_check
from .errors import StlrError
from .sampling import Sampler
from .syntax.parser import parse_diff, parse_term, parse_type
from .verdict import SCHEMA

STATUSES = ("pass_sampled", "counterexample", "exact_pass", "exact_fail")
_FIELDS = ("name", "lhs", "rhs", "diff", "type", "expect")


class ManifestError(StlrError):
    pass


@dataclass(frozen=True)
class Fixture:
    name: str
    lhs: Path
    rhs: Path
    diff: Path
    type: str
    expect: str
    trials: int | None = None
    seed: int | None = None


@dataclass
class FixtureResult:
    fixture: Fixture
    status: str
    trials: int
    seed: int | None
    error: str | None = None

    @property
    def matched(self) -> bool:
        return self.error is None and self.status == self.fixture.expect

    def to_json(self) -> dict:
        out = {
            "name": self.fixture.name,
            "expect": self.fixture.expect,
            "status": self.status,
            "matched": self.matched,
            "trials": self.trials,
            "seed": self.seed,
        }
        if self.error is not None:
            out["error"] = self.error
        return out


@dataclass
class CorpusReport:
    results: list[FixtureResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.matched for r in self.results)

    def mismatches(self) -> list[str]:
        return [r.fixture.name for r in self.results if not r.matched]

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "total": len(self.results),
            "matched": sum(r.matched for r in self.results),
            "mismatched": self.mismatches(),
            "passed": self.passed,
            "fixtures": [r.to_json() for r in self.results],
        }


def bundled_corpus() -> Path:
    """Directory of the corpus shipped with the package."""
    return Path(str(resources.files("stlr") / "corpus"))


def load_manifest(directory: str | Path) -> list[Fixture]:
    root = Path(directory)
    if not root.is_dir():
        raise ManifestError(f"{root}: not a directory")
    path = root / "manifest.toml"
    if not path.exists():
        return []
    try:
        doc = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ManifestError(f"{path}: {exc}") from None
    entries = doc.get("fixture", [])
    if not isinstance(entries, list):
        raise ManifestError(f"{path}: 'fixture' must be an array of tables")
    fixtures, seen = [], set()
    for i, entry in enumerate(entries, 1):
        missing = [k for k in _FIELDS if k not in entry]
        if missing:
            raise ManifestError(f"{path}: fixture {i} lacks {', '.join(missing)}")
        if entry["expect"] not in STATUSES:
            raise ManifestError(f"{path}: fixture {entry['name']!r} expects unknown status {entry['expect']!r}")
        if entry["name"] in seen:
            raise ManifestError(f"{path}: duplicate fixture name {entry['name']!r}")
        seen.add(entry["name"])
        fixtures.append(Fixture(
            entry["name"], root / entry["lhs"], root / entry["rhs"], root / entry["diff"],
            entry["type"], entry["expect"], entry.get("trials"), entry.get("seed"),
        ))
    return sorted(fixtures, key=lambda f: f.name)


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise StlrError(f"{path}: {exc.strerror}") from None


def run_fixture(fx: Fixture, sampler: Sampler, trials: int, *, registry=None, fuel: int | None = None) -> FixtureResult:
    seed = fx.seed if fx.seed is not None else sampler.seed
    s = replace(sampler, seed=seed)
    n = fx.trials or trials
    try:
        ty = parse_type(fx.type)
        lhs = parse_term(_read(fx.lhs), registry=registry)
        rhs = parse_term(_read(fx.rhs), registry=registry)
        diff = parse_diff(_read(fx.diff), ty, registry=registry)
        kwargs = {"fuel": fuel} if fuel is not None else {}
        v = dlr_check(lhs, diff, rhs, ty, s, n, registry=registry, **kwargs)
    except StlrError as exc:
        return FixtureResult(fx, "error", 0, seed, str(exc))
    return FixtureResult(fx, v.status, v.trials, v.seed)


def corpus_run(directory: str | Path, sampler: Sampler | None = None, trials: int = 10_000,
               *, registry=None, fuel: int | None = None) -> CorpusReport:
    """Run every fixture in name order."""
    sampler = sampler or Sampler()
    report = CorpusReport()
    for fx in load_manifest(directory):
        report.results.append(run_fixture(fx, sampler, trials, registry=registry, fuel=fuel))
    return report
