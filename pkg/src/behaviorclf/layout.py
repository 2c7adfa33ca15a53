"""Fixed 65-slot behavior feature layout.

Slot map: file system 0-13, registry 14-21, network 22-64.  The port
block (slots 23-40) is the one configurable region; swapping the port
list yields a different layout with a different fingerprint, and models
embed that fingerprint so they cannot be applied across layouts.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Sequence

CLASS_FILESYSTEM = "filesystem"
CLASS_REGISTRY = "registry"
CLASS_NETWORK = "network"

DEFAULT_PORTS = (21, 22, 23, 25, 53, 80, 110, 123, 135, 139, 143,
                 443, 445, 465, 587, 993, 995, 8080)

# Slot indices for the fixed blocks.  Port slots are 23 + position in
# the layout's port list.
SLOT_FILES_CREATED = 0
SLOT_FILES_MODIFIED = 1
SLOT_FILES_DELETED = 2
SLOT_FILE_SIZE_Q = slice(3, 7)
SLOT_UNIQUE_EXTENSIONS = 7
SLOT_PATHS = slice(8, 14)
SLOT_KEYS_CREATED = 14
SLOT_KEYS_MODIFIED = 15
SLOT_KEYS_DELETED = 16
SLOT_REG_TYPES = slice(17, 22)
SLOT_UNIQUE_DEST_IPS = 22
SLOT_PORTS = slice(23, 41)
SLOT_PROTOCOLS = slice(41, 44)
SLOT_HTTP_METHODS = slice(44, 47)
SLOT_RESPONSE_CLASSES = slice(47, 51)
SLOT_REQUEST_SIZE_Q = slice(51, 55)
SLOT_REPLY_SIZE_Q = slice(55, 59)
SLOT_DNS_RECORDS = slice(59, 65)

PATH_SLOT_NAMES = ("path_appdata", "path_temp", "path_system32",
                   "path_windows", "path_program_files", "path_startup")
REG_TYPE_SLOT_NAMES = ("reg_type_sz", "reg_type_dword", "reg_type_binary",
                       "reg_type_expand_sz", "reg_type_multi_sz")
DNS_SLOT_NAMES = ("dns_a", "dns_mx", "dns_ns", "dns_ptr", "dns_soa", "dns_cname")


@dataclass(frozen=True)
class FeatureLayout:
    """Immutable index -> (name, class) table for all 65 slots."""

    names: tuple[str, ...]
    classes: tuple[str, ...]
    ports: tuple[int, ...]
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self._index.update({name: i for i, name in enumerate(self.names)})

    @property
    def size(self) -> int:
        return len(self.names)

    def index_of(self, name: str) -> int:
        return self._index[name]

    def port_slot(self, port: int) -> int | None:
        try:
            return SLOT_PORTS.start + self.ports.index(port)
        except ValueError:
            return None

    @property
    def fingerprint(self) -> str:
        return fingerprint_names(self.names)


def fingerprint_names(names: Sequence[str]) -> str:
    digest = hashlib.sha256("\n".join(names).encode("utf-8"))
    return digest.hexdigest()


def build_layout(ports: Iterable[int] = DEFAULT_PORTS) -> FeatureLayout:
    """Assemble the 65-slot layout for a given 18-port list."""
    ports = tuple(ports)
    if len(ports) != 18 or len(set(ports)) != 18:
        raise ValueError(f"port list must contain 18 distinct ports, got {len(ports)}")
    if not all(isinstance(p, int) and 0 < p <= 65535 for p in ports):
        raise ValueError("ports must be integers in 1-65535")

    names: list[str] = []
    classes: list[str] = []

    def block(cls: str, block_names: Iterable[str]) -> None:
        for name in block_names:
            names.append(name)
            classes.append(cls)

    block(CLASS_FILESYSTEM, ("files_created", "files_modified", "files_deleted"))
    block(CLASS_FILESYSTEM, (f"file_size_q{i}" for i in range(1, 5)))
    block(CLASS_FILESYSTEM, ("unique_extensions",))
    block(CLASS_FILESYSTEM, PATH_SLOT_NAMES)
    block(CLASS_REGISTRY, ("reg_keys_created", "reg_keys_modified", "reg_keys_deleted"))
    block(CLASS_REGISTRY, REG_TYPE_SLOT_NAMES)
    block(CLASS_NETWORK, ("unique_dest_ips",))
    block(CLASS_NETWORK, (f"port_{p}" for p in ports))
    block(CLASS_NETWORK, ("proto_tcp", "proto_udp", "proto_raw"))
    block(CLASS_NETWORK, ("http_post", "http_get", "http_head"))
    block(CLASS_NETWORK, ("resp_2xx", "resp_3xx", "resp_4xx", "resp_5xx"))
    block(CLASS_NETWORK, (f"req_size_q{i}" for i in range(1, 5)))
    block(CLASS_NETWORK, (f"reply_size_q{i}" for i in range(1, 5)))
    block(CLASS_NETWORK, DNS_SLOT_NAMES)

    assert len(names) == 65
    return FeatureLayout(names=tuple(names), classes=tuple(classes), ports=ports)


DEFAULT_LAYOUT = build_layout()
