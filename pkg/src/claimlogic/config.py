"""Run configuration for the CLI and the service.

A config file is JSON; paths are resolved relative to the file's own
directory so fixture trees relocate cleanly.  All referenced paths must
exist at load time: misconfiguration should fail at startup, not during
the first bill.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .adjudicator import AdjudicatorConfig
from .lexicon import Lexicon, load_lexicon
from .ontology import Ontology, load_ontology
from .prover import Budget
from .store import Store


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    budget: Budget  # entailment budget for classification and proving
    max_edit: int
    lexicon_path: Path
    ontology_path: Path
    kb_path: Path
    escalation_dir: Path
    match_budget_ms: int = 150  # per pairwise equivalence check


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a JSON object")

    base = path.parent

    def required(key: str):
        if key not in data:
            raise ConfigError(f"config {path} is missing {key!r}")
        return data[key]

    def path_of(key: str, is_dir: bool) -> Path:
        p = Path(str(required(key)))
        if not p.is_absolute():
            p = base / p
        if is_dir and not p.is_dir():
            raise ConfigError(f"{key} {p} is not a directory")
        if not is_dir and not p.is_file():
            raise ConfigError(f"{key} {p} is not a file")
        return p

    budget_ms = required("budget_ms")
    max_clauses = data.get("max_clauses", 20000)
    match_budget_ms = data.get("match_budget_ms", 150)
    max_edit = data.get("max_edit", 1)
    for label, value in (
        ("budget_ms", budget_ms),
        ("max_clauses", max_clauses),
        ("match_budget_ms", match_budget_ms),
    ):
        if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
            raise ConfigError(f"{label} must be a positive integer, got {value!r}")
    if not isinstance(max_edit, int) or isinstance(max_edit, bool) or max_edit < 0:
        raise ConfigError(f"max_edit must be a non-negative integer, got {max_edit!r}")

    return RunConfig(
        budget=Budget(budget_ms, max_clauses),
        max_edit=max_edit,
        lexicon_path=path_of("lexicon_path", is_dir=False),
        ontology_path=path_of("ontology_path", is_dir=False),
        kb_path=path_of("kb_path", is_dir=True),
        escalation_dir=path_of("escalation_dir", is_dir=True),
        match_budget_ms=match_budget_ms,
    )


@dataclass
class Engine:
    """Loaded pipeline components shared by CLI commands and the service."""

    lexicon: Lexicon
    ontology: Ontology
    kb: Store
    adjudicator_config: AdjudicatorConfig


def load_engine(config: RunConfig) -> Engine:
    lexicon = load_lexicon(config.lexicon_path)
    ontology = load_ontology(config.ontology_path)
    kb = Store(config.kb_path)
    adjudicator_config = AdjudicatorConfig(
        match_budget=Budget(config.match_budget_ms, config.budget.max_clauses),
        entail_budget=config.budget,
        max_edit=config.max_edit,
    )
    return Engine(lexicon, ontology, kb, adjudicator_config)
