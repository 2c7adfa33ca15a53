"""Deterministic generator of labeled synthetic sample runs.

Two behavior profiles ship with the package: ``zeus_like`` (the target
class: dropper files under the roaming application-data folder,
registry-stored configuration, POST beaconing to a small set of
command servers) and ``generic`` (a diffuse non-target mix).  The
profile parameter values are calibration inputs for desk-scale
experiments, not measurements of any real malware family.

Sampling uses one PCG64 stream per sample, derived from
``SeedSequence(entropy=seed, spawn_key=(class_tag, index))``, so the
output is byte-stable for a given spec and independent of generation
order.  The separation knob s moves every non-target parameter linearly
toward the target profile: at s=1 the non-target profile is fully
generic, at s=0 the two classes are identically distributed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from importlib import resources
from math import exp, log
from typing import Iterable

import numpy as np

from .artifacts import (
    DnsQuery,
    DnsRecordType,
    FileAction,
    FileEvent,
    HttpMethod,
    HttpTransaction,
    Label,
    NetworkFlow,
    Protocol,
    RegistryAction,
    RegistryEvent,
    RegValueType,
    SampleRun,
    file_event,
    runs_to_log_bytes,
)
from .layout import DEFAULT_PORTS

PATH_CATEGORIES = ("appdata", "temp", "system32", "windows",
                   "program_files", "startup", "other")
_PATH_TEMPLATES = {
    "appdata": "c:\\users\\user\\appdata\\roaming\\",
    "temp": "c:\\users\\user\\appdata\\local\\temp\\",
    "system32": "c:\\windows\\system32\\",
    "windows": "c:\\windows\\",
    "program_files": "c:\\program files\\common\\",
    "startup": "c:\\users\\user\\appdata\\roaming\\microsoft\\windows"
               "\\start menu\\programs\\startup\\",
    "other": "c:\\users\\user\\documents\\",
}
EXTENSION_CATEGORIES = ("exe", "dll", "dat", "tmp", "cfg", "log", "txt", "bin")
PORT_CATEGORIES = tuple(str(p) for p in DEFAULT_PORTS) + ("other",)
PROTOCOL_CATEGORIES = ("tcp", "udp", "raw")
METHOD_CATEGORIES = ("post", "get", "head", "other")
RESPONSE_CATEGORIES = ("none", "2xx", "3xx", "4xx", "5xx")
DNS_CATEGORIES = ("a", "mx", "ns", "ptr", "soa", "cname", "other")
_RESPONSE_CODES = {"2xx": (200, 201, 204), "3xx": (301, 302, 304),
                   "4xx": (403, 404), "5xx": (500, 502, 503)}

_RANGE_FIELDS = ("files_created", "files_modified", "files_deleted", "file_size_bytes",
                 "reg_created", "reg_modified", "reg_deleted",
                 "flow_count", "dest_ip_pool",
                 "http_count", "http_request_size", "http_response_size",
                 "dns_count")
_MIX_FIELDS = {
    "file_path_mix": PATH_CATEGORIES,
    "file_extension_mix": EXTENSION_CATEGORIES,
    "reg_value_type_mix": ("reg_sz", "reg_dword", "reg_binary",
                           "reg_expand_sz", "reg_multi_sz"),
    "flow_port_mix": PORT_CATEGORIES,
    "flow_protocol_mix": PROTOCOL_CATEGORIES,
    "http_method_mix": METHOD_CATEGORIES,
    "http_response_mix": RESPONSE_CATEGORIES,
    "dns_record_mix": DNS_CATEGORIES,
}


@dataclass(frozen=True)
class BehaviorProfile:
    """Per-feature-group sampling parameters for one class of sample."""

    files_created: tuple[float, float]
    files_modified: tuple[float, float]
    files_deleted: tuple[float, float]
    file_path_mix: dict[str, float]
    file_extension_mix: dict[str, float]
    file_size_bytes: tuple[float, float]
    reg_created: tuple[float, float]
    reg_modified: tuple[float, float]
    reg_deleted: tuple[float, float]
    reg_value_type_mix: dict[str, float]
    flow_count: tuple[float, float]
    flow_port_mix: dict[str, float]
    flow_protocol_mix: dict[str, float]
    dest_ip_pool: tuple[float, float]
    http_count: tuple[float, float]
    http_method_mix: dict[str, float]
    http_response_mix: dict[str, float]
    http_request_size: tuple[float, float]
    http_response_size: tuple[float, float]
    dns_count: tuple[float, float]
    dns_record_mix: dict[str, float]

    def validate(self) -> None:
        for name in _RANGE_FIELDS:
            lo, hi = getattr(self, name)
            if not (hi > lo):
                raise ValueError(f"profile range {name} must be non-degenerate (hi > lo)")
            if lo < 0:
                raise ValueError(f"profile range {name} must be non-negative")
        for name, categories in _MIX_FIELDS.items():
            mix = getattr(self, name)
            if tuple(mix) != tuple(categories):
                raise ValueError(f"profile mix {name} must have keys {categories}")
            total = sum(mix.values())
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"profile mix {name} must sum to 1, got {total}")
            if any(p < 0 for p in mix.values()):
                raise ValueError(f"profile mix {name} has negative probability")


def profile_from_dict(data: dict) -> BehaviorProfile:
    kwargs = {}
    for f in fields(BehaviorProfile):
        if f.name not in data:
            raise ValueError(f"profile is missing field {f.name!r}")
        value = data[f.name]
        if f.name in _RANGE_FIELDS:
            lo, hi = value
            kwargs[f.name] = (float(lo), float(hi))
        else:
            kwargs[f.name] = {str(k): float(v) for k, v in value.items()}
    extra = set(data) - {f.name for f in fields(BehaviorProfile)}
    if extra:
        raise ValueError(f"profile has unknown field(s): {', '.join(sorted(extra))}")
    profile = BehaviorProfile(**kwargs)
    profile.validate()
    return profile


def load_profile(path) -> BehaviorProfile:
    """Load a profile file (JSON text with the BehaviorProfile fields)."""
    with open(path, "r", encoding="utf-8") as fh:
        return profile_from_dict(json.load(fh))


def _bundled(name: str) -> BehaviorProfile:
    text = resources.files("behaviorclf").joinpath(f"profiles/{name}.profile").read_text("utf-8")
    return profile_from_dict(json.loads(text))


def zeus_like_profile() -> BehaviorProfile:
    return _bundled("zeus_like")


def generic_profile() -> BehaviorProfile:
    return _bundled("generic")


def interpolate_profile(target: BehaviorProfile, generic: BehaviorProfile,
                        separation: float) -> BehaviorProfile:
    """Non-target profile at separation s: s*generic + (1-s)*target."""
    s = float(separation)
    kwargs = {}
    for f in fields(BehaviorProfile):
        tv = getattr(target, f.name)
        gv = getattr(generic, f.name)
        if f.name in _RANGE_FIELDS:
            kwargs[f.name] = (s * gv[0] + (1.0 - s) * tv[0],
                              s * gv[1] + (1.0 - s) * tv[1])
        else:
            kwargs[f.name] = {k: s * gv[k] + (1.0 - s) * tv[k] for k in tv}
    return BehaviorProfile(**kwargs)


@dataclass(frozen=True)
class GenSpec:
    """Size, seed, and class-overlap knob for one synthetic corpus."""

    seed: int
    n_target: int
    n_nontarget: int
    separation: float

    def validate(self) -> None:
        if not (0 <= self.seed < 2 ** 64):
            raise ValueError("seed must fit in 64 bits")
        if self.n_target < 0 or self.n_nontarget < 0:
            raise ValueError("class counts must be non-negative")
        if not (0.0 <= self.separation <= 1.0):
            raise ValueError("separation must lie in [0, 1]")


def _count(rng: np.random.Generator, bounds: tuple[float, float]) -> int:
    return max(0, int(round(rng.uniform(bounds[0], bounds[1]))))


def _log_uniform_size(rng: np.random.Generator, bounds: tuple[float, float]) -> int:
    lo = max(1.0, bounds[0])
    hi = max(lo + 1.0, bounds[1])
    return int(round(exp(rng.uniform(log(lo), log(hi)))))


def _choice(rng: np.random.Generator, mix: dict[str, float]) -> str:
    keys = tuple(mix)
    probs = np.asarray([mix[k] for k in keys], dtype=np.float64)
    probs = probs / probs.sum()
    return keys[int(rng.choice(len(keys), p=probs))]


def _rand_name(rng: np.random.Generator, length: int = 8) -> str:
    letters = "abcdefghijklmnopqrstuvwxyz"
    return "".join(letters[int(i)] for i in rng.integers(0, len(letters), size=length))


def _rand_ip(rng: np.random.Generator) -> str:
    octets = rng.integers(1, 255, size=4)
    return ".".join(str(int(o)) for o in octets)


def _other_port(rng: np.random.Generator) -> int:
    listed = set(DEFAULT_PORTS)
    while True:
        port = int(rng.integers(1024, 65536))
        if port not in listed:
            return port


def _sample_run(rng: np.random.Generator, profile: BehaviorProfile,
                sample_id: str, label: Label) -> SampleRun:
    file_events: list[FileEvent] = []
    for action, bounds in ((FileAction.CREATED, profile.files_created),
                           (FileAction.MODIFIED, profile.files_modified),
                           (FileAction.DELETED, profile.files_deleted)):
        for _ in range(_count(rng, bounds)):
            category = _choice(rng, profile.file_path_mix)
            ext = _choice(rng, profile.file_extension_mix)
            path = f"{_PATH_TEMPLATES[category]}{_rand_name(rng)}.{ext}"
            size = None
            if action is not FileAction.DELETED:
                size = _log_uniform_size(rng, profile.file_size_bytes)
            file_events.append(file_event(action, path, size))

    registry_events: list[RegistryEvent] = []
    for action, bounds in ((RegistryAction.KEY_CREATED, profile.reg_created),
                           (RegistryAction.KEY_MODIFIED, profile.reg_modified),
                           (RegistryAction.KEY_DELETED, profile.reg_deleted)):
        for _ in range(_count(rng, bounds)):
            key_path = f"hkcu\\software\\{_rand_name(rng, 10)}"
            value_type = None
            if action is not RegistryAction.KEY_DELETED:
                value_type = RegValueType(_choice(rng, profile.reg_value_type_mix))
            registry_events.append(RegistryEvent(action, key_path, value_type))

    pool_size = max(1, _count(rng, profile.dest_ip_pool))
    ip_pool = [_rand_ip(rng) for _ in range(pool_size)]
    flows: list[NetworkFlow] = []
    for _ in range(_count(rng, profile.flow_count)):
        protocol = Protocol(_choice(rng, profile.flow_protocol_mix))
        if protocol is Protocol.RAW:
            port = 0
        else:
            port_key = _choice(rng, profile.flow_port_mix)
            port = _other_port(rng) if port_key == "other" else int(port_key)
        flows.append(NetworkFlow(protocol, ip_pool[int(rng.integers(0, pool_size))], port))

    http: list[HttpTransaction] = []
    for _ in range(_count(rng, profile.http_count)):
        method = HttpMethod(_choice(rng, profile.http_method_mix))
        request_size = _log_uniform_size(rng, profile.http_request_size)
        response_class = _choice(rng, profile.http_response_mix)
        if response_class == "none":
            http.append(HttpTransaction(method, request_size))
        else:
            codes = _RESPONSE_CODES[response_class]
            code = codes[int(rng.integers(0, len(codes)))]
            response_size = _log_uniform_size(rng, profile.http_response_size)
            http.append(HttpTransaction(method, request_size, code, response_size))

    dns: list[DnsQuery] = []
    for _ in range(_count(rng, profile.dns_count)):
        record = DnsRecordType(_choice(rng, profile.dns_record_mix))
        dns.append(DnsQuery(record, f"{_rand_name(rng, 10)}.com"))

    return SampleRun(
        sample_id=sample_id,
        label=label,
        file_events=tuple(file_events),
        registry_events=tuple(registry_events),
        flows=tuple(flows),
        http=tuple(http),
        dns=tuple(dns),
    )


def generate(spec: GenSpec,
             target_profile: BehaviorProfile | None = None,
             generic_profile_: BehaviorProfile | None = None) -> list[SampleRun]:
    """Generate n_target + n_nontarget labeled runs, targets first."""
    spec.validate()
    target = target_profile if target_profile is not None else zeus_like_profile()
    generic = generic_profile_ if generic_profile_ is not None else generic_profile()
    target.validate()
    generic.validate()
    nontarget = interpolate_profile(target, generic, spec.separation)

    runs: list[SampleRun] = []
    for class_tag, count, profile, label, tag in (
            (0, spec.n_target, target, Label.TARGET, "t"),
            (1, spec.n_nontarget, nontarget, Label.NONTARGET, "n")):
        for i in range(count):
            seq = np.random.SeedSequence(entropy=spec.seed, spawn_key=(class_tag, i))
            rng = np.random.Generator(np.random.PCG64(seq))
            sample_id = f"s{spec.seed:016x}-{tag}{i:05d}"
            runs.append(_sample_run(rng, profile, sample_id, label))
    return runs


def emit_log(runs: Iterable[SampleRun]) -> bytes:
    """Serialize runs to the artifact-log format (round-trips through
    parse_artifact_log)."""
    return runs_to_log_bytes(runs)
