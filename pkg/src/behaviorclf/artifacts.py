"""Domain model for sandbox run artifacts and the line-delimited log format.

A log is UTF-8 text with LF line endings, one JSON object per line, one
observed event per record.  Every record carries ``sample_id`` (string),
``kind`` (one of ``file``, ``registry``, ``flow``, ``http``, ``dns``), an
optional ``label`` (``target`` or ``nontarget``, consistent across a
sample's lines), plus the kind-specific fields documented on the event
types below.  Unknown fields are rejected rather than silently ignored;
a record that violates an event invariant is a parse error, so parsed
runs are valid by construction.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, NoReturn


class Label(str, Enum):
    TARGET = "target"
    NONTARGET = "nontarget"


class FileAction(str, Enum):
    CREATED = "created"
    MODIFIED = "modified"
    DELETED = "deleted"


class RegistryAction(str, Enum):
    KEY_CREATED = "key_created"
    KEY_MODIFIED = "key_modified"
    KEY_DELETED = "key_deleted"


class RegValueType(str, Enum):
    REG_SZ = "reg_sz"
    REG_DWORD = "reg_dword"
    REG_BINARY = "reg_binary"
    REG_EXPAND_SZ = "reg_expand_sz"
    REG_MULTI_SZ = "reg_multi_sz"


class Protocol(str, Enum):
    TCP = "tcp"
    UDP = "udp"
    RAW = "raw"


class HttpMethod(str, Enum):
    POST = "post"
    GET = "get"
    HEAD = "head"
    OTHER = "other"


class DnsRecordType(str, Enum):
    A = "a"
    MX = "mx"
    NS = "ns"
    PTR = "ptr"
    SOA = "soa"
    CNAME = "cname"
    OTHER = "other"


def extension_of(path: str) -> str:
    """Extension of the final path component: text after its last dot,
    lowercased; empty when the component has no dot."""
    name = re.split(r"[\\/]", path)[-1]
    if "." not in name:
        return ""
    return name.rsplit(".", 1)[1].lower()


@dataclass(frozen=True)
class FileEvent:
    action: FileAction
    path: str
    extension: str
    size_bytes: int | None


def file_event(action: FileAction, path: str, size_bytes: int | None = None) -> FileEvent:
    """Build a FileEvent with the extension derived from the path."""
    return FileEvent(action=action, path=path, extension=extension_of(path), size_bytes=size_bytes)


@dataclass(frozen=True)
class RegistryEvent:
    action: RegistryAction
    key_path: str
    value_type: RegValueType | None = None


@dataclass(frozen=True)
class NetworkFlow:
    protocol: Protocol
    dest_ip: str
    dest_port: int


@dataclass(frozen=True)
class HttpTransaction:
    method: HttpMethod
    request_size_bytes: int
    response_code: int | None = None
    response_size_bytes: int | None = None


@dataclass(frozen=True)
class DnsQuery:
    record_type: DnsRecordType
    qname: str


@dataclass(frozen=True)
class SampleRun:
    """All artifacts observed for one sample execution.

    Event tuples are immutable after construction; a run with no events
    at all is valid in memory but has no representation in the log
    format (which is one event per line).
    """

    sample_id: str
    label: Label | None = None
    file_events: tuple[FileEvent, ...] = ()
    registry_events: tuple[RegistryEvent, ...] = ()
    flows: tuple[NetworkFlow, ...] = ()
    http: tuple[HttpTransaction, ...] = ()
    dns: tuple[DnsQuery, ...] = ()

    @property
    def event_count(self) -> int:
        return (len(self.file_events) + len(self.registry_events)
                + len(self.flows) + len(self.http) + len(self.dns))


class ArtifactLogError(ValueError):
    """Malformed or inconsistent artifact-log input."""

    def __init__(self, reason: str, line: int | None = None):
        self.reason = reason
        self.line = line
        if line is None:
            super().__init__(reason)
        else:
            super().__init__(f"line {line}: {reason}")


_IPV4_PART = re.compile(r"^(0|[1-9][0-9]{0,2})$")


def is_valid_ipv4(text: str) -> bool:
    parts = text.split(".")
    if len(parts) != 4:
        return False
    for part in parts:
        if not _IPV4_PART.match(part) or int(part) > 255:
            return False
    return True


def _fail(reason: str, line: int) -> NoReturn:
    raise ArtifactLogError(reason, line)


def _take_str(obj: dict, key: str, line: int) -> str:
    if key not in obj:
        _fail(f"missing field {key!r}", line)
    value = obj.pop(key)
    if not isinstance(value, str) or not value:
        _fail(f"field {key!r} must be a non-empty string", line)
    return value


def _take_int(obj: dict, key: str, line: int, lo: int = 0, hi: int | None = None) -> int:
    if key not in obj:
        _fail(f"missing field {key!r}", line)
    value = obj.pop(key)
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(f"field {key!r} must be an integer", line)
    if value < lo or (hi is not None and value > hi):
        bound = f">= {lo}" if hi is None else f"in [{lo}, {hi}]"
        _fail(f"field {key!r} must be {bound}", line)
    return value


def _take_enum(obj: dict, key: str, enum_cls, line: int):
    raw = _take_str(obj, key, line)
    try:
        return enum_cls(raw)
    except ValueError:
        allowed = ", ".join(member.value for member in enum_cls)
        _fail(f"field {key!r} has unknown value {raw!r} (allowed: {allowed})", line)


def _parse_file(obj: dict, line: int) -> FileEvent:
    action = _take_enum(obj, "action", FileAction, line)
    path = _take_str(obj, "path", line)
    if action is FileAction.DELETED:
        if "size_bytes" in obj:
            _fail("field 'size_bytes' not allowed for deleted file events", line)
        size = None
    else:
        size = _take_int(obj, "size_bytes", line)
    return file_event(action, path, size)


def _parse_registry(obj: dict, line: int) -> RegistryEvent:
    action = _take_enum(obj, "action", RegistryAction, line)
    key_path = _take_str(obj, "key_path", line)
    value_type = None
    if action is RegistryAction.KEY_DELETED:
        if "value_type" in obj:
            _fail("field 'value_type' not allowed for deleted registry keys", line)
    elif "value_type" in obj:
        value_type = _take_enum(obj, "value_type", RegValueType, line)
    return RegistryEvent(action, key_path, value_type)


def _parse_flow(obj: dict, line: int) -> NetworkFlow:
    protocol = _take_enum(obj, "protocol", Protocol, line)
    dest_ip = _take_str(obj, "dest_ip", line)
    if not is_valid_ipv4(dest_ip):
        _fail(f"field 'dest_ip' is not a dotted-quad IPv4 address: {dest_ip!r}", line)
    dest_port = _take_int(obj, "dest_port", line, lo=0, hi=65535)
    if dest_port == 0 and protocol is not Protocol.RAW:
        _fail("field 'dest_port' 0 is only permitted for raw flows", line)
    return NetworkFlow(protocol, dest_ip, dest_port)


def _parse_http(obj: dict, line: int) -> HttpTransaction:
    method = _take_enum(obj, "method", HttpMethod, line)
    request_size = _take_int(obj, "request_size_bytes", line)
    code = None
    resp_size = None
    if "response_code" in obj:
        code = _take_int(obj, "response_code", line, lo=100, hi=599)
        resp_size = _take_int(obj, "response_size_bytes", line)
    elif "response_size_bytes" in obj:
        _fail("field 'response_size_bytes' requires 'response_code'", line)
    return HttpTransaction(method, request_size, code, resp_size)


def _parse_dns(obj: dict, line: int) -> DnsQuery:
    record_type = _take_enum(obj, "record_type", DnsRecordType, line)
    qname = _take_str(obj, "qname", line)
    return DnsQuery(record_type, qname)


_KIND_PARSERS = {
    "file": _parse_file,
    "registry": _parse_registry,
    "flow": _parse_flow,
    "http": _parse_http,
    "dns": _parse_dns,
}


class _RunBuilder:
    __slots__ = ("sample_id", "label", "files", "registry", "flows", "http", "dns")

    def __init__(self, sample_id: str):
        self.sample_id = sample_id
        self.label: Label | None = None
        self.files: list[FileEvent] = []
        self.registry: list[RegistryEvent] = []
        self.flows: list[NetworkFlow] = []
        self.http: list[HttpTransaction] = []
        self.dns: list[DnsQuery] = []

    def build(self) -> SampleRun:
        return SampleRun(
            sample_id=self.sample_id,
            label=self.label,
            file_events=tuple(self.files),
            registry_events=tuple(self.registry),
            flows=tuple(self.flows),
            http=tuple(self.http),
            dns=tuple(self.dns),
        )


def parse_artifact_log(stream: bytes | IO[bytes]) -> list[SampleRun]:
    """Parse a line-delimited artifact log into one SampleRun per sample.

    Runs are returned in first-appearance order, events in input order.
    Blank lines are skipped.  Raises ArtifactLogError with the offending
    line number for malformed records, unknown fields, invariant
    violations, and conflicting labels.
    """
    if isinstance(stream, (bytes, bytearray)):
        data = bytes(stream)
    else:
        data = stream.read()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ArtifactLogError(f"input is not valid UTF-8: {exc}") from None

    builders: dict[str, _RunBuilder] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            _fail(f"invalid record syntax: {exc.msg}", line_no)
        if not isinstance(obj, dict):
            _fail("record must be a single object", line_no)

        sample_id = _take_str(obj, "sample_id", line_no)
        label = None
        if "label" in obj:
            label = _take_enum(obj, "label", Label, line_no)
        kind = _take_str(obj, "kind", line_no)
        parser = _KIND_PARSERS.get(kind)
        if parser is None:
            _fail(f"unknown kind {kind!r}", line_no)
        event = parser(obj, line_no)
        if obj:
            _fail(f"unknown field(s): {', '.join(sorted(obj))}", line_no)

        builder = builders.get(sample_id)
        if builder is None:
            builder = builders[sample_id] = _RunBuilder(sample_id)
        if label is not None:
            if builder.label is not None and builder.label is not label:
                _fail(f"conflicting labels for sample {sample_id!r}", line_no)
            builder.label = label

        if isinstance(event, FileEvent):
            builder.files.append(event)
        elif isinstance(event, RegistryEvent):
            builder.registry.append(event)
        elif isinstance(event, NetworkFlow):
            builder.flows.append(event)
        elif isinstance(event, HttpTransaction):
            builder.http.append(event)
        else:
            builder.dns.append(event)

    return [builder.build() for builder in builders.values()]


def _event_record(run: SampleRun, kind: str, fields: dict) -> str:
    record: dict = {"sample_id": run.sample_id}
    if run.label is not None:
        record["label"] = run.label.value
    record["kind"] = kind
    record.update(fields)
    return json.dumps(record, separators=(",", ":"), ensure_ascii=False)


def run_to_lines(run: SampleRun) -> list[str]:
    """Serialize one run to log lines (file, registry, flow, http, dns order)."""
    lines = []
    for ev in run.file_events:
        fields: dict = {"action": ev.action.value, "path": ev.path}
        if ev.size_bytes is not None:
            fields["size_bytes"] = ev.size_bytes
        lines.append(_event_record(run, "file", fields))
    for ev in run.registry_events:
        fields = {"action": ev.action.value, "key_path": ev.key_path}
        if ev.value_type is not None:
            fields["value_type"] = ev.value_type.value
        lines.append(_event_record(run, "registry", fields))
    for ev in run.flows:
        lines.append(_event_record(run, "flow", {
            "protocol": ev.protocol.value, "dest_ip": ev.dest_ip, "dest_port": ev.dest_port,
        }))
    for ev in run.http:
        fields = {"method": ev.method.value, "request_size_bytes": ev.request_size_bytes}
        if ev.response_code is not None:
            fields["response_code"] = ev.response_code
            fields["response_size_bytes"] = ev.response_size_bytes
        lines.append(_event_record(run, "http", fields))
    for ev in run.dns:
        lines.append(_event_record(run, "dns", {
            "record_type": ev.record_type.value, "qname": ev.qname,
        }))
    return lines


def runs_to_log_bytes(runs: Iterable[SampleRun]) -> bytes:
    """Serialize runs to the artifact-log interchange format.

    Round-trips through parse_artifact_log.  Runs without any events
    produce no lines (the format has no sample-only record).
    """
    out: list[str] = []
    for run in runs:
        out.extend(run_to_lines(run))
    if not out:
        return b""
    return ("\n".join(out) + "\n").encode("utf-8")


def _check(violations: list[str], ok: bool, message: str) -> None:
    if not ok:
        violations.append(message)


def validate_run(run: SampleRun) -> list[str]:
    """Check every type invariant; returns one message per violation.

    An empty list means the run is well formed.  Violations are data,
    not exceptions, so callers can audit arbitrary hand-built runs.
    """
    v: list[str] = []
    _check(v, bool(run.sample_id), "sample_id: must be non-empty")
    for i, ev in enumerate(run.file_events):
        where = f"file_events[{i}]"
        _check(v, bool(ev.path), f"{where}.path: must be non-empty")
        if ev.action is FileAction.DELETED:
            _check(v, ev.size_bytes is None, f"{where}.size_bytes: must be absent for deleted events")
        else:
            _check(v, ev.size_bytes is not None, f"{where}.size_bytes: required for {ev.action.value} events")
            if ev.size_bytes is not None:
                _check(v, ev.size_bytes >= 0, f"{where}.size_bytes: must be non-negative")
        _check(v, "." not in ev.extension, f"{where}.extension: must not contain a dot")
        _check(v, ev.extension == ev.extension.lower(), f"{where}.extension: must be lowercase")
    for i, ev in enumerate(run.registry_events):
        where = f"registry_events[{i}]"
        _check(v, bool(ev.key_path), f"{where}.key_path: must be non-empty")
        if ev.action is RegistryAction.KEY_DELETED:
            _check(v, ev.value_type is None, f"{where}.value_type: must be absent for deleted keys")
    for i, ev in enumerate(run.flows):
        where = f"flows[{i}]"
        _check(v, is_valid_ipv4(ev.dest_ip), f"{where}.dest_ip: not a dotted-quad IPv4 address")
        _check(v, 0 <= ev.dest_port <= 65535, f"{where}.dest_port: out of range 0-65535")
        if ev.dest_port == 0:
            _check(v, ev.protocol is Protocol.RAW, f"{where}.dest_port: 0 only permitted for raw flows")
    for i, ev in enumerate(run.http):
        where = f"http[{i}]"
        _check(v, ev.request_size_bytes >= 0, f"{where}.request_size_bytes: must be non-negative")
        if ev.response_code is None:
            _check(v, ev.response_size_bytes is None,
                   f"{where}.response_size_bytes: requires response_code")
        else:
            _check(v, 100 <= ev.response_code <= 599, f"{where}.response_code: out of range 100-599")
            _check(v, ev.response_size_bytes is not None,
                   f"{where}.response_size_bytes: required when response_code present")
            if ev.response_size_bytes is not None:
                _check(v, ev.response_size_bytes >= 0,
                       f"{where}.response_size_bytes: must be non-negative")
    for i, ev in enumerate(run.dns):
        _check(v, bool(ev.qname), f"dns[{i}].qname: must be non-empty")
    return v
