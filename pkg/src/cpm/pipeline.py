"""Extension-pass contract and pipeline assembly.

A pipeline is an ordered chain of source-to-source passes chosen by the user;
order is never inferred. Each pass owns one orthogonal syntax family and
flushes everything else through untouched, so any ordering is legal and
composition reduces to function composition over the unit.

Every pass carries a canonical identifier of the form ``cpm://<name>/<version>``.
Running a pipeline injects a one-line preamble defining the
``extensions_pipeline`` string (the semicolon-joined identifiers in
application order) so the transformed program can inspect its own execution
environment.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field

from .srcmodel import (
    Diagnostic,
    SourceUnit,
    TokenKind,
    ext_tag,
    tokenize_line,
    unit_from_raws,
)

_NAME_RE = re.compile(r"^[a-z0-9_]+$")
_VERSION_RE = re.compile(r"^[0-9]+(\.[0-9]+)*$")
_CANONICAL_RE = re.compile(r"^cpm://([a-z0-9_]+)/([0-9]+(?:\.[0-9]+)*)$")

PIPELINE_EMITTER = "pipeline"


class UnknownExtensionError(ValueError):
    pass


class VersionMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class ExtensionId:
    name: str
    version: str

    def __post_init__(self):
        if not _NAME_RE.match(self.name):
            raise ValueError(f"bad extension name {self.name!r}")
        if not _VERSION_RE.match(self.version):
            raise ValueError(f"bad extension version {self.version!r}")

    def canonical(self) -> str:
        return f"cpm://{self.name}/{self.version}"

    @classmethod
    def parse(cls, text: str) -> "ExtensionId":
        m = _CANONICAL_RE.match(text)
        if not m:
            raise ValueError(f"not a canonical extension id: {text!r}")
        return cls(m.group(1), m.group(2))

    def __str__(self):
        return self.canonical()


class PassConfig:
    """Flat key/value configuration, keys namespaced per extension name
    (e.g. ``redundancy.replicas``). Unknown keys are warned about at compose
    time, never fatal."""

    def __init__(self, values: dict | None = None):
        self._values = {str(k): v for k, v in (values or {}).items()}

    @classmethod
    def from_ini(cls, path) -> "PassConfig":
        parser = configparser.ConfigParser()
        parser.optionxform = str  # keep key case
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
        values = {}
        for section in parser.sections():
            for key, val in parser.items(section):
                values[f"{section}.{key}"] = val
        return cls(values)

    def set(self, key, value):
        self._values[key] = value

    def get(self, namespace, key, default=None):
        return self._values.get(f"{namespace}.{key}", default)

    def get_int(self, namespace, key, default=None):
        val = self.get(namespace, key, default)
        return default if val is None else int(val)

    def get_bool(self, namespace, key, default=False):
        val = self.get(namespace, key)
        if val is None:
            return default
        if isinstance(val, bool):
            return val
        return str(val).strip().lower() in ("1", "true", "yes", "on")

    def items(self):
        return self._values.items()


class ExtensionPass:
    """Base contract for a source-to-source extension pass.

    Subclasses set ``id``, ``KNOWN_KEYS`` (their config keys), ``KEYWORDS``
    (the identifier lexemes introducing their syntax, used for strict-mode
    reporting) and implement ``_transform``. ``transform`` never rejects
    input and must leave units without the pass's syntax byte-identical.

    Passes hold no mutable state; one instance may transform any number of
    units, concurrently when the units are distinct.
    """

    id: ExtensionId
    KNOWN_KEYS: frozenset = frozenset()
    KEYWORDS: frozenset = frozenset()

    def known_key(self, key: str) -> bool:
        return key in self.KNOWN_KEYS

    def transform(self, unit: SourceUnit, config: PassConfig):
        work, skip = self._tag_view(unit)
        return self._transform(work, config, skip)

    def _transform(self, unit, config, skip):
        raise NotImplementedError

    def _tag_view(self, unit: SourceUnit):
        """Strip ``@ext:`` tags addressed to this pass and collect the line
        numbers tagged for other passes (those lines must not be touched)."""
        skip = set()
        raws = []
        changed = False
        for line in unit.lines:
            if line.in_block_comment:
                raws.append(line.raw)
                continue
            tag, content = ext_tag(line.raw)
            if tag is None:
                raws.append(line.raw)
            elif tag == self.id.name:
                raws.append(content)
                changed = True
            else:
                raws.append(line.raw)
                skip.add(line.line_no)
        if not changed:
            return unit, skip
        return unit_from_raws(raws, origin=unit.origin, final_newline=unit.final_newline), skip


@dataclass(frozen=True)
class Pipeline:
    passes: tuple[ExtensionPass, ...]
    config: PassConfig
    compose_diagnostics: tuple[Diagnostic, ...] = ()
    keyword_map: dict = field(default_factory=dict)  # keyword -> [pass names]


@dataclass
class PipelineReport:
    applied_ids: list[ExtensionId]
    diagnostics: list[Diagnostic]
    extensions_pipeline: str


def builtin_registry() -> dict[str, ExtensionPass]:
    """Fresh name -> pass map of the built-in extensions, in their customary
    staging order."""
    from .ext_redundancy import RedundancyPass
    from .ext_reflective import ArrayPass, RefractivePass
    from .ext_cyclic import CyclicPass

    passes = [RedundancyPass(), RefractivePass(), ArrayPass(), CyclicPass()]
    return {p.id.name: p for p in passes}


def _parse_request(request: str):
    if "@" in request:
        name, _, version = request.partition("@")
        return name, version
    return request, None


def compose(names, registry=None, config=None) -> Pipeline:
    """Assemble a pipeline from ordered ``name`` or ``name@version`` requests.

    Raises UnknownExtensionError / VersionMismatchError; duplicates are
    allowed but reported as warnings.
    """
    if registry is None:
        registry = builtin_registry()
    if config is None:
        config = PassConfig()
    diags = []
    passes = []
    seen = set()
    for request in names:
        name, version = _parse_request(request)
        if name not in registry:
            raise UnknownExtensionError(
                f"unknown extension {name!r}; registered: {', '.join(registry)}"
            )
        p = registry[name]
        if version is not None and version != p.id.version:
            raise VersionMismatchError(
                f"extension {name!r} is registered at version {p.id.version}, not {version}"
            )
        if name in seen:
            diags.append(
                Diagnostic("warning", 0, f"pass {name!r} requested more than once", PIPELINE_EMITTER)
            )
        seen.add(name)
        passes.append(p)
    for key, _ in config.items():
        ns, _, rest = key.partition(".")
        if ns == "pipeline":
            continue
        if ns not in registry:
            diags.append(
                Diagnostic("warning", 0, f"config key {key!r} names no registered extension", PIPELINE_EMITTER)
            )
        elif not registry[ns].known_key(rest):
            diags.append(
                Diagnostic("warning", 0, f"config key {key!r} is not recognized by pass {ns!r}", PIPELINE_EMITTER)
            )
    keyword_map: dict[str, list[str]] = {}
    for name, p in registry.items():
        for kw in p.KEYWORDS:
            keyword_map.setdefault(kw, []).append(name)
    return Pipeline(
        passes=tuple(passes),
        config=config,
        compose_diagnostics=tuple(diags),
        keyword_map=keyword_map,
    )


def publish_ids(pipeline: Pipeline) -> str:
    """Semicolon-joined canonical ids, application order, no trailing separator."""
    return ";".join(p.id.canonical() for p in pipeline.passes)


def preamble_line(ids_string: str) -> str:
    return f'const char *extensions_pipeline = "{ids_string}"; /* cpm preamble */'


def run(pipeline: Pipeline, unit: SourceUnit):
    """Apply the passes in order, then inject the identifier preamble as the
    first line. Returns (unit, report)."""
    diags = list(pipeline.compose_diagnostics)
    for p in pipeline.passes:
        unit, pass_diags = p.transform(unit, pipeline.config)
        diags.extend(pass_diags)
    ids_string = publish_ids(pipeline)
    raws = [preamble_line(ids_string)] + [line.raw for line in unit.lines]
    final_newline = unit.final_newline if unit.lines else True
    out = unit_from_raws(raws, origin=unit.origin, final_newline=final_newline)
    if pipeline.config.get_bool("pipeline", "strict_tags"):
        diags.extend(_strict_sweep(out, pipeline))
    report = PipelineReport(
        applied_ids=[p.id for p in pipeline.passes],
        diagnostics=diags,
        extensions_pipeline=ids_string,
    )
    return out, report


def _strict_sweep(unit: SourceUnit, pipeline: Pipeline):
    """In strict-tag mode, report extension syntax that survived the whole
    pipeline: leftover @ext: tags and extension keywords nobody consumed."""
    diags = []
    applied = {p.id.name for p in pipeline.passes}
    for line in unit.lines[1:]:  # skip the injected preamble
        if line.in_block_comment:
            continue
        tag, _ = ext_tag(line.raw)
        if tag is not None and tag not in applied:
            diags.append(
                Diagnostic(
                    "warning",
                    line.line_no,
                    f"line tagged for pass {tag!r}, which is not in the pipeline",
                    PIPELINE_EMITTER,
                )
            )
        prev = None
        for tok in line.tokens:
            if tok.kind is TokenKind.IDENTIFIER:
                if tok.lexeme in pipeline.keyword_map:
                    candidates = ", ".join(pipeline.keyword_map[tok.lexeme])
                    diags.append(
                        Diagnostic(
                            "warning",
                            line.line_no,
                            f"unconsumed extension keyword {tok.lexeme!r}; candidate passes: {candidates}",
                            PIPELINE_EMITTER,
                        )
                    )
                elif tok.lexeme == "Cycle" and prev is not None and prev.lexeme == ".":
                    diags.append(
                        Diagnostic(
                            "warning",
                            line.line_no,
                            "unconsumed '.Cycle' member; candidate passes: cyclic",
                            PIPELINE_EMITTER,
                        )
                    )
            if tok.kind not in (TokenKind.WHITESPACE, TokenKind.COMMENT):
                prev = tok
    return diags
