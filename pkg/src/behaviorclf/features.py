"""Map sample runs onto the 65-slot behavior vector and assemble datasets.

Every slot is a count, so raw vectors are non-negative integers; any
scaling happens at training time, never here, which keeps extraction
independent of labels and of the rest of the corpus.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from . import layout as L
from .artifacts import (
    DnsRecordType,
    FileAction,
    HttpMethod,
    Label,
    Protocol,
    RegistryAction,
    RegValueType,
    SampleRun,
)
from .layout import DEFAULT_LAYOUT, FeatureLayout

# Environment-style tokens expand to canonical prefixes; real usernames
# collapse to "*" so per-user paths compare equal.  Matching assumes the
# sandbox system drive is c:.
_ENV_PREFIXES = (
    ("%appdata%", "c:\\users\\*\\appdata\\roaming"),
    ("%temp%", "c:\\users\\*\\appdata\\local\\temp"),
    ("%tmp%", "c:\\users\\*\\appdata\\local\\temp"),
    ("%systemroot%", "c:\\windows"),
    ("%windir%", "c:\\windows"),
    ("%programfiles%", "c:\\program files"),
    ("%userprofile%", "c:\\users\\*"),
)
_DOCSETTINGS_APPDATA_RE = re.compile(r"^[a-z]:\\documents and settings\\[^\\]+\\application data")
_DOCSETTINGS_RE = re.compile(r"^[a-z]:\\documents and settings\\[^\\]+")
_USERS_RE = re.compile(r"^[a-z]:\\users\\[^\\]+")

# Prefix sets per path slot, tested independently: a path under
# system32 also counts toward the windows slot, and the startup folder
# also counts toward appdata.
_PATH_SLOT_PREFIXES: tuple[tuple[str, ...], ...] = (
    ("c:\\users\\*\\appdata\\roaming",),
    ("c:\\users\\*\\appdata\\local\\temp", "c:\\windows\\temp"),
    ("c:\\windows\\system32",),
    ("c:\\windows",),
    ("c:\\program files",),
    ("c:\\users\\*\\appdata\\roaming\\microsoft\\windows\\start menu\\programs\\startup",),
)

_RESPONSE_CLASS_OF_HUNDREDS = {2: 0, 3: 1, 4: 2, 5: 3}
_PROTOCOL_ORDER = (Protocol.TCP, Protocol.UDP, Protocol.RAW)
_METHOD_ORDER = (HttpMethod.POST, HttpMethod.GET, HttpMethod.HEAD)
_REG_TYPE_ORDER = (RegValueType.REG_SZ, RegValueType.REG_DWORD, RegValueType.REG_BINARY,
                   RegValueType.REG_EXPAND_SZ, RegValueType.REG_MULTI_SZ)
_DNS_ORDER = (DnsRecordType.A, DnsRecordType.MX, DnsRecordType.NS,
              DnsRecordType.PTR, DnsRecordType.SOA, DnsRecordType.CNAME)


def normalize_path(path: str) -> str:
    p = path.lower().replace("/", "\\")
    for token, repl in _ENV_PREFIXES:
        if p.startswith(token):
            return repl + p[len(token):]
    m = _DOCSETTINGS_APPDATA_RE.match(p)
    if m:
        return "c:\\users\\*\\appdata\\roaming" + p[m.end():]
    m = _DOCSETTINGS_RE.match(p)
    if m:
        return "c:\\users\\*" + p[m.end():]
    m = _USERS_RE.match(p)
    if m:
        return "c:\\users\\*" + p[m.end():]
    return p


def quartile_counts(sizes: Sequence[int]) -> tuple[int, int, int, int]:
    """Per-bin counts when [0, max(sizes)] is cut into four equal bins.

    Bins are [0, M/4], (M/4, M/2], (M/2, 3M/4], (3M/4, M]; comparisons
    use exact integer arithmetic (4*s against multiples of M) so
    boundary values never flip.  Empty input gives (0, 0, 0, 0); when
    the maximum is 0 every item lands in the first bin.
    """
    counts = [0, 0, 0, 0]
    if not sizes:
        return (0, 0, 0, 0)
    m = max(sizes)
    if m < 0 or min(sizes) < 0:
        raise ValueError("sizes must be non-negative integers")
    for s in sizes:
        q = 4 * s
        if q <= m:
            counts[0] += 1
        elif q <= 2 * m:
            counts[1] += 1
        elif q <= 3 * m:
            counts[2] += 1
        else:
            counts[3] += 1
    return tuple(counts)  # type: ignore[return-value]


@dataclass(frozen=True)
class FeatureVector:
    """One sample's 65-slot behavior vector (pre-standardization counts)."""

    values: np.ndarray
    sample_id: str
    label: Label | None = None


def extract_features(run: SampleRun, layout: FeatureLayout = DEFAULT_LAYOUT) -> FeatureVector:
    """Fill the fixed layout from one run.

    Assumes validate_run(run) is empty.  Deterministic, and every count
    slot is independent of event ordering.
    """
    vec = np.zeros(layout.size, dtype=np.float64)

    sized: list[int] = []
    extensions: set[str] = set()
    for ev in run.file_events:
        if ev.action is FileAction.CREATED:
            vec[L.SLOT_FILES_CREATED] += 1
        elif ev.action is FileAction.MODIFIED:
            vec[L.SLOT_FILES_MODIFIED] += 1
        else:
            vec[L.SLOT_FILES_DELETED] += 1
        if ev.size_bytes is not None:
            sized.append(ev.size_bytes)
        if ev.extension:
            extensions.add(ev.extension)
        canon = normalize_path(ev.path)
        for offset, prefixes in enumerate(_PATH_SLOT_PREFIXES):
            if any(canon.startswith(prefix) for prefix in prefixes):
                vec[L.SLOT_PATHS.start + offset] += 1
    vec[L.SLOT_FILE_SIZE_Q] = quartile_counts(sized)
    vec[L.SLOT_UNIQUE_EXTENSIONS] = len(extensions)

    for ev in run.registry_events:
        if ev.action is RegistryAction.KEY_CREATED:
            vec[L.SLOT_KEYS_CREATED] += 1
        elif ev.action is RegistryAction.KEY_MODIFIED:
            vec[L.SLOT_KEYS_MODIFIED] += 1
        else:
            vec[L.SLOT_KEYS_DELETED] += 1
        if ev.value_type is not None:
            vec[L.SLOT_REG_TYPES.start + _REG_TYPE_ORDER.index(ev.value_type)] += 1

    dest_ips: set[str] = set()
    for ev in run.flows:
        dest_ips.add(ev.dest_ip)
        slot = layout.port_slot(ev.dest_port)
        if slot is not None:
            vec[slot] += 1
        vec[L.SLOT_PROTOCOLS.start + _PROTOCOL_ORDER.index(ev.protocol)] += 1
    vec[L.SLOT_UNIQUE_DEST_IPS] = len(dest_ips)

    request_sizes: list[int] = []
    reply_sizes: list[int] = []
    for ev in run.http:
        if ev.method in _METHOD_ORDER:
            vec[L.SLOT_HTTP_METHODS.start + _METHOD_ORDER.index(ev.method)] += 1
        request_sizes.append(ev.request_size_bytes)
        if ev.response_code is not None:
            hundreds = ev.response_code // 100
            offset = _RESPONSE_CLASS_OF_HUNDREDS.get(hundreds)
            if offset is not None:
                vec[L.SLOT_RESPONSE_CLASSES.start + offset] += 1
            reply_sizes.append(ev.response_size_bytes)
    vec[L.SLOT_REQUEST_SIZE_Q] = quartile_counts(request_sizes)
    vec[L.SLOT_REPLY_SIZE_Q] = quartile_counts(reply_sizes)

    for ev in run.dns:
        if ev.record_type in _DNS_ORDER:
            vec[L.SLOT_DNS_RECORDS.start + _DNS_ORDER.index(ev.record_type)] += 1

    return FeatureVector(values=vec, sample_id=run.sample_id, label=run.label)


class BehaviorVectorizer(BaseEstimator, TransformerMixin):
    """Stateless transformer from SampleRuns to rows of the behavior matrix."""

    def __init__(self, layout: FeatureLayout = DEFAULT_LAYOUT):
        self.layout = layout

    def fit(self, X: Iterable[SampleRun], y=None):
        return self

    def transform(self, X: Iterable[SampleRun]) -> np.ndarray:
        rows = [extract_features(run, self.layout).values for run in X]
        if not rows:
            return np.zeros((0, self.layout.size), dtype=np.float64)
        return np.vstack(rows)


LABEL_VALUE = {Label.TARGET: 1, Label.NONTARGET: -1}


@dataclass(frozen=True)
class Dataset:
    """Feature matrix, +/-1 labels (target = +1), and sample identifiers."""

    X: np.ndarray
    y: np.ndarray
    sample_ids: tuple[str, ...]

    def __post_init__(self):
        if self.X.ndim != 2:
            raise ValueError("X must be a 2-d matrix")
        if len(self.y) != self.X.shape[0] or len(self.sample_ids) != self.X.shape[0]:
            raise ValueError("X, y and sample_ids must have matching lengths")

    def __len__(self) -> int:
        return self.X.shape[0]

    @property
    def n_target(self) -> int:
        return int(np.sum(self.y == 1))

    @property
    def n_nontarget(self) -> int:
        return int(np.sum(self.y == -1))


def build_dataset(runs: Sequence[SampleRun], for_training: bool = False,
                  layout: FeatureLayout = DEFAULT_LAYOUT) -> Dataset:
    """Extract features for labeled runs, preserving input order.

    Raises if any run is unlabeled, and, when for_training is set, if
    either class is missing.
    """
    ids = []
    labels = []
    for run in runs:
        if run.label is None:
            raise ValueError(f"run {run.sample_id!r} is unlabeled")
        ids.append(run.sample_id)
        labels.append(LABEL_VALUE[run.label])
    X = BehaviorVectorizer(layout).transform(runs)
    y = np.asarray(labels, dtype=np.int64)
    if for_training and (np.sum(y == 1) == 0 or np.sum(y == -1) == 0):
        raise ValueError("training dataset requires at least one sample of each class")
    return Dataset(X=X, y=y, sample_ids=tuple(ids))


class FeatureMatrix(NamedTuple):
    """Contents of a feature-matrix file."""

    X: np.ndarray
    sample_ids: tuple[str, ...]
    labels: tuple[Label | None, ...]
    names: tuple[str, ...]

    def to_dataset(self) -> Dataset:
        if any(label is None for label in self.labels):
            missing = next(sid for sid, lab in zip(self.sample_ids, self.labels) if lab is None)
            raise ValueError(f"sample {missing!r} has no label")
        y = np.asarray([LABEL_VALUE[label] for label in self.labels], dtype=np.int64)
        return Dataset(X=self.X, y=y, sample_ids=self.sample_ids)


def _format_value(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def save_matrix(path, X: np.ndarray, sample_ids: Sequence[str],
                labels: Sequence[Label | None], layout: FeatureLayout = DEFAULT_LAYOUT) -> None:
    """Write a feature matrix: header of 65 slot names + sample_id + label."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != layout.size:
        raise ValueError(f"matrix must have {layout.size} columns")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(layout.names + ("sample_id", "label")) + "\n")
        for row, sid, label in zip(X, sample_ids, labels):
            cells = [_format_value(v) for v in row]
            cells.append(sid)
            cells.append("" if label is None else label.value)
            fh.write(",".join(cells) + "\n")


def load_matrix(path) -> FeatureMatrix:
    """Read a feature-matrix file written by save_matrix."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("matrix file is empty") from None
        if len(header) < 3 or header[-2:] != ["sample_id", "label"]:
            raise ValueError("matrix header must end with sample_id,label")
        names = tuple(header[:-2])
        width = len(names)
        rows: list[list[float]] = []
        ids: list[str] = []
        labels: list[Label | None] = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width + 2:
                raise ValueError(f"row {line_no}: expected {width + 2} cells, got {len(row)}")
            try:
                rows.append([float(cell) for cell in row[:width]])
            except ValueError:
                raise ValueError(f"row {line_no}: non-numeric feature value") from None
            ids.append(row[width])
            raw_label = row[width + 1]
            labels.append(Label(raw_label) if raw_label else None)
    X = np.asarray(rows, dtype=np.float64) if rows else np.zeros((0, width), dtype=np.float64)
    return FeatureMatrix(X=X, sample_ids=tuple(ids), labels=tuple(labels), names=names)
