"""Persistent knowledge base: benchmark documents plus a hash-chained,
append-only audit log.

Layout under the store root:

    benchmarks/<type>/<subtype>.json
    audit/<seq>.json
    MANIFEST

Every audit record embeds the hash of its predecessor; the MANIFEST pins
the chain head and the digest of every benchmark file.  Verification
recomputes the whole chain, so a single flipped byte anywhere breaks it.
All writes go through a temp file and an atomic rename under a file lock;
a crash between the record write and the manifest update leaves an orphan
record that verification ignores and the next append overwrites.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path
from typing import Iterator, Optional

from filelock import FileLock

GENESIS = "0" * 64


class StoreError(Exception):
    pass


class ChainError(StoreError):
    def __init__(self, detail: str, seq: Optional[int] = None):
        super().__init__(detail)
        self.seq = seq


def canonical_json(obj) -> str:
    """Deterministic JSON text: sorted keys, no whitespace."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _atomic_write(path: Path, data: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(data, encoding="utf-8")
    os.replace(tmp, path)


class Store:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.benchmarks_dir = self.root / "benchmarks"
        self.audit_dir = self.root / "audit"
        self.manifest_path = self.root / "MANIFEST"
        self._lock = FileLock(str(self.root / "kb.lock"))

    def initialize(self) -> None:
        self.benchmarks_dir.mkdir(parents=True, exist_ok=True)
        self.audit_dir.mkdir(parents=True, exist_ok=True)
        if not self.manifest_path.exists():
            self._write_manifest(
                {"audit": {"head_seq": 0, "head_hash": GENESIS}, "benchmarks": {}}
            )

    # -- manifest ----------------------------------------------------------

    def _read_manifest(self) -> dict:
        if not self.manifest_path.exists():
            raise StoreError(f"store at {self.root} is not initialized")
        try:
            return json.loads(self.manifest_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ChainError(f"MANIFEST is not valid JSON: {exc}") from exc

    def _write_manifest(self, manifest: dict) -> None:
        _atomic_write(self.manifest_path, canonical_json(manifest) + "\n")

    # -- benchmarks --------------------------------------------------------

    def _benchmark_path(self, btype: str, subtype: str) -> Path:
        if "/" in btype or "/" in subtype or btype.startswith(".") or subtype.startswith("."):
            raise StoreError(f"bad benchmark key {btype!r}/{subtype!r}")
        return self.benchmarks_dir / btype / f"{subtype}.json"

    def put_benchmark(self, btype: str, subtype: str, payload: dict) -> None:
        """Insert a benchmark under a fresh key.  A key can hold only one
        benchmark; writing to an occupied key is an error, use
        :meth:`replace_benchmark` for updates."""
        with self._lock:
            path = self._benchmark_path(btype, subtype)
            if path.exists():
                raise StoreError(
                    f"benchmark {btype}/{subtype} already exists; use replace_benchmark"
                )
            self._write_benchmark(path, btype, subtype, payload)

    def replace_benchmark(self, btype: str, subtype: str, payload: dict) -> None:
        with self._lock:
            path = self._benchmark_path(btype, subtype)
            if not path.exists():
                raise StoreError(f"benchmark {btype}/{subtype} does not exist")
            self._write_benchmark(path, btype, subtype, payload)

    def _write_benchmark(self, path: Path, btype: str, subtype: str, payload: dict) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        text = canonical_json(payload) + "\n"
        _atomic_write(path, text)
        manifest = self._read_manifest()
        manifest["benchmarks"][f"{btype}/{subtype}"] = sha256_hex(text.encode("utf-8"))
        self._write_manifest(manifest)

    def get_benchmark(self, btype: str, subtype: str) -> Optional[dict]:
        path = self._benchmark_path(btype, subtype)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def list_benchmarks(self) -> list[tuple[str, str]]:
        out: list[tuple[str, str]] = []
        if self.benchmarks_dir.exists():
            for tdir in sorted(self.benchmarks_dir.iterdir()):
                if tdir.is_dir():
                    for f in sorted(tdir.glob("*.json")):
                        out.append((tdir.name, f.stem))
        return out

    # -- audit chain -------------------------------------------------------

    def _audit_path(self, seq: int) -> Path:
        return self.audit_dir / f"{seq:07d}.json"

    def head(self) -> tuple[int, str]:
        audit = self._read_manifest()["audit"]
        return audit["head_seq"], audit["head_hash"]

    def append_audit(self, payload: dict) -> int:
        with self._lock:
            manifest = self._read_manifest()
            head_seq = manifest["audit"]["head_seq"]
            head_hash = manifest["audit"]["head_hash"]
            seq = head_seq + 1
            record = {"seq": seq, "prev": head_hash, "payload": payload}
            text = canonical_json(record) + "\n"
            _atomic_write(self._audit_path(seq), text)
            # the chain hashes raw file bytes, so any byte flip breaks it
            manifest["audit"] = {
                "head_seq": seq,
                "head_hash": sha256_hex(text.encode("utf-8")),
            }
            self._write_manifest(manifest)
            return seq

    def read_audit(self, seq: int) -> dict:
        path = self._audit_path(seq)
        if not path.exists():
            raise StoreError(f"no audit record {seq}")
        return json.loads(path.read_text(encoding="utf-8"))

    def iter_audit(self) -> Iterator[dict]:
        head_seq, _ = self.head()
        for seq in range(1, head_seq + 1):
            yield self.read_audit(seq)

    def verify_chain(self) -> int:
        """Recompute the full chain and benchmark digests; returns the
        number of audit records verified.  Raises ChainError at the first
        discrepancy."""
        manifest = self._read_manifest()
        prev = GENESIS
        head_seq = manifest["audit"]["head_seq"]
        for seq in range(1, head_seq + 1):
            path = self._audit_path(seq)
            if not path.exists():
                raise ChainError(f"audit record {seq} is missing", seq)
            raw = path.read_bytes()
            try:
                record = json.loads(raw.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise ChainError(f"audit record {seq} is not valid JSON: {exc}", seq) from exc
            if record.get("seq") != seq:
                raise ChainError(
                    f"audit record {seq} carries wrong sequence {record.get('seq')!r}", seq
                )
            if record.get("prev") != prev:
                raise ChainError(f"audit record {seq} does not chain to its predecessor", seq)
            prev = sha256_hex(raw)
        if prev != manifest["audit"]["head_hash"]:
            raise ChainError("chain head does not match MANIFEST", head_seq)
        for key, digest in manifest.get("benchmarks", {}).items():
            btype, _, subtype = key.partition("/")
            path = self._benchmark_path(btype, subtype)
            if not path.exists():
                raise ChainError(f"benchmark {key} is missing")
            if sha256_hex(path.read_bytes()) != digest:
                raise ChainError(f"benchmark {key} does not match its manifest digest")
        return head_seq
