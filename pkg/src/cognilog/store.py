"""Plain-text persistence for logs and be-logs.

One file per log in a canonical, line-oriented UTF-8 format.  The writer
always emits objects sorted by id with a fixed key order, so parse/format is
an exact round trip on canonical files.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from .belog import BeLog, BeRelation, BeVerbType
from .errors import ParseError
from .model import (
    Action,
    ELog,
    Kind,
    Participant,
    RawData,
    SENTINELS,
    SLog,
    build_elog,
)

_P_KEYS = ("kind", "label")
_A_KEYS = ("who", "cs", "cn", "triv", "vol", "ts", "te", "label")
_B_KEYS = ("w", "label")


def _split_fields(line: str, lineno: int) -> list[tuple[str, int]]:
    """Whitespace-split that keeps quoted label values intact; returns
    (token, column) pairs, columns 1-based."""
    out: list[tuple[str, int]] = []
    i, n = 0, len(line)
    while i < n:
        if line[i].isspace():
            i += 1
            continue
        start = i
        in_quote = False
        while i < n and (in_quote or not line[i].isspace()):
            if line[i] == '"':
                in_quote = not in_quote
            i += 1
        if in_quote:
            raise ParseError("unterminated quote", lineno, start + 1)
        out.append((line[start:i], start + 1))
    return out


def _parse_kv(token: str, lineno: int, column: int) -> tuple[str, str]:
    if "=" not in token:
        if token == "vol":
            return "vol", "true"
        raise ParseError(f"expected key=value, got {token!r}", lineno, column)
    key, value = token.split("=", 1)
    if value.startswith('"') and value.endswith('"') and len(value) >= 2:
        value = value[1:-1]
    return key, value


def _parse_int(value: str, key: str, lineno: int, column: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ParseError(f"{key} must be an integer, got {value!r}", lineno, column)


def parse_log(text: str) -> ELog:
    """Parse one e-log or s-log from canonical text."""
    lines = text.splitlines()
    header = None
    lineno_header = 0
    for lineno, line in enumerate(lines, 1):
        if line.strip():
            header = line.strip()
            lineno_header = lineno
            break
    if header is None:
        raise ParseError("empty file", 1, 1)
    parts = header.split()
    if len(parts) != 2 or parts[0] not in ("#ELOG", "#SLOG"):
        raise ParseError("expected '#ELOG <id>' or '#SLOG <id>'", lineno_header, 1)
    slog = parts[0] == "#SLOG"
    log_id = parts[1]

    participants: list[Participant] = []
    actions: list[Action] = []
    for lineno, line in enumerate(lines, 1):
        if lineno <= lineno_header or not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = _split_fields(line, lineno)
        tag, tag_col = fields[0]
        if tag == "P":
            if len(fields) < 2:
                raise ParseError("P line needs an id", lineno, tag_col)
            pid = fields[1][0]
            kind = Kind.CLASS if slog else Kind.PLAIN
            label = ""
            for token, col in fields[2:]:
                key, value = _parse_kv(token, lineno, col)
                if key == "kind":
                    try:
                        kind = Kind(value)
                    except ValueError:
                        raise ParseError(f"unknown kind {value!r}", lineno, col)
                elif key == "label":
                    label = value
                else:
                    raise ParseError(f"unknown key {key!r}", lineno, col)
            participants.append(Participant(id=pid, label=label, kind=kind))
        elif tag == "A":
            if len(fields) < 2:
                raise ParseError("A line needs an id", lineno, tag_col)
            aid = fields[1][0]
            kv: dict[str, str] = {}
            cols: dict[str, int] = {}
            for token, col in fields[2:]:
                key, value = _parse_kv(token, lineno, col)
                if key not in _A_KEYS:
                    raise ParseError(f"unknown key {key!r}", lineno, col)
                if key in kv:
                    raise ParseError(f"duplicate key {key!r}", lineno, col)
                kv[key] = value
                cols[key] = col
            if "who" not in kv:
                raise ParseError("A line needs who=", lineno, tag_col)
            ts = _parse_int(kv["ts"], "ts", lineno, cols["ts"]) if "ts" in kv else None
            te = _parse_int(kv["te"], "te", lineno, cols["te"]) if "te" in kv else None
            try:
                raw = RawData(t_start=ts, t_end=te)
            except ValueError as exc:
                raise ParseError(str(exc), lineno, tag_col)
            actions.append(
                Action(
                    id=aid,
                    who=kv["who"],
                    cause_s=kv.get("cs", "unknown"),
                    cause_n=kv.get("cn", "unknown"),
                    trivial_partner=kv.get("triv"),
                    volition=kv.get("vol") == "true",
                    label=kv.get("label", ""),
                    raw=raw,
                )
            )
        else:
            raise ParseError(f"unknown line tag {tag!r}", lineno, tag_col)
    return build_elog(log_id, tuple(actions), tuple(participants), slog=slog)


def _quote(label: str) -> str:
    return '"' + label + '"'


def format_log(log: ELog) -> str:
    """Canonical text for a log: header, P lines, A lines, ids sorted."""
    slog = isinstance(log, SLog)
    out = [f"#{'SLOG' if slog else 'ELOG'} {log.id}"]
    default_kind = Kind.CLASS if slog else Kind.PLAIN
    for p in sorted(log.nonsentinel_participants, key=lambda p: p.id):
        line = f"P {p.id}"
        if p.kind != default_kind:
            line += f" kind={p.kind.value}"
        if p.label:
            line += f" label={_quote(p.label)}"
        out.append(line)
    for a in sorted(log.nonsentinel_actions, key=lambda a: a.id):
        line = f"A {a.id} who={a.who} cs={a.cause_s} cn={a.cause_n}"
        if a.trivial_partner:
            line += f" triv={a.trivial_partner}"
        if a.volition:
            line += " vol"
        if a.t_start is not None:
            line += f" ts={a.t_start}"
        if a.t_end is not None:
            line += f" te={a.t_end}"
        if a.label:
            line += f" label={_quote(a.label)}"
        out.append(line)
    return "\n".join(out) + "\n"


def parse_belog(text: str) -> BeLog:
    lines = text.splitlines()
    relations: list[BeRelation] = []
    n = 0
    for lineno, line in enumerate(lines, 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = _split_fields(line, lineno)
        tag, tag_col = fields[0]
        if tag != "B":
            raise ParseError(f"unknown line tag {tag!r}", lineno, tag_col)
        if len(fields) < 4:
            raise ParseError("B line needs type, source, target", lineno, tag_col)
        type_token, type_col = fields[1]
        try:
            type_ = BeVerbType(type_token)
        except ValueError:
            raise ParseError(f"unknown be-verb type {type_token!r}", lineno, type_col)
        source, target = fields[2][0], fields[3][0]
        weight = 1.0
        label = ""
        for token, col in fields[4:]:
            key, value = _parse_kv(token, lineno, col)
            if key == "w":
                try:
                    weight = float(value)
                except ValueError:
                    raise ParseError(f"w must be a real, got {value!r}", lineno, col)
            elif key == "label":
                label = value
            else:
                raise ParseError(f"unknown key {key!r}", lineno, col)
        n += 1
        try:
            relations.append(
                BeRelation(
                    id=f"b{n}", type=type_, source=source, target=target,
                    weight=weight, label=label,
                )
            )
        except ValueError as exc:
            raise ParseError(str(exc), lineno, tag_col)
    return BeLog(tuple(relations))


def format_belog(b: BeLog) -> str:
    out = []
    for r in b.relations:
        line = f"B {r.type.value} {r.source} {r.target}"
        if r.weight != 1.0:
            line += f" w={r.weight}"
        if r.label:
            line += f" label={_quote(r.label)}"
        out.append(line)
    return "\n".join(out) + ("\n" if out else "")


_EXTENSIONS = (".elog", ".slog", ".belog")


@dataclass
class Store:
    """Directory of log files with an in-memory index (id -> type, file,
    mtime).  Be-logs stay per file; ``belog`` is the merged view."""

    root: Path
    logs: dict[str, ELog] = field(default_factory=dict)
    belogs: dict[str, BeLog] = field(default_factory=dict)
    index: dict[str, tuple[str, str, float]] = field(default_factory=dict)

    def get(self, log_id: str) -> ELog:
        return self.logs[log_id]

    @property
    def belog(self) -> BeLog:
        relations: list[BeRelation] = []
        for name in sorted(self.belogs):
            relations.extend(self.belogs[name].relations)
        return BeLog(tuple(relations))


def load(path: str | os.PathLike) -> Store:
    root = Path(path)
    store = Store(root=root)
    for file in sorted(root.iterdir()) if root.is_dir() else []:
        if file.suffix not in _EXTENSIONS:
            continue
        text = file.read_text(encoding="utf-8")
        try:
            if file.suffix == ".belog":
                store.belogs[file.stem] = parse_belog(text)
                store.index[file.stem] = ("belog", file.name, file.stat().st_mtime)
            else:
                log = parse_log(text)
                store.logs[log.id] = log
                kind = "slog" if isinstance(log, SLog) else "elog"
                store.index[log.id] = (kind, file.name, file.stat().st_mtime)
        except ParseError as exc:
            raise ParseError(f"{file.name}: {exc.args[0]}", exc.line, exc.column)
    return store


def save(store: Store, path: str | os.PathLike | None = None) -> None:
    root = Path(path) if path is not None else store.root
    root.mkdir(parents=True, exist_ok=True)
    for log in store.logs.values():
        suffix = ".slog" if isinstance(log, SLog) else ".elog"
        (root / f"{log.id}{suffix}").write_text(format_log(log), encoding="utf-8")
    for name, b in store.belogs.items():
        (root / f"{name}.belog").write_text(format_belog(b), encoding="utf-8")


def resolve_log(name: str) -> ELog:
    """Load a log from a path, or from $COGNILOG_STORE by bare id."""
    p = Path(name)
    if p.exists():
        return parse_log(p.read_text(encoding="utf-8"))
    env = os.environ.get("COGNILOG_STORE")
    if env:
        for ext in (".elog", ".slog"):
            cand = Path(env) / f"{name}{ext}"
            if cand.exists():
                return parse_log(cand.read_text(encoding="utf-8"))
    raise FileNotFoundError(name)


def resolve_belog(name: str | None) -> BeLog:
    if name is None:
        return BeLog()
    p = Path(name)
    if p.exists():
        return parse_belog(p.read_text(encoding="utf-8"))
    env = os.environ.get("COGNILOG_STORE")
    if env:
        cand = Path(env) / f"{name}.belog"
        if cand.exists():
            return parse_belog(cand.read_text(encoding="utf-8"))
    raise FileNotFoundError(name)
