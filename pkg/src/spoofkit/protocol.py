"""Trial protocols, balanced subsampling and the binary feature cache."""

from __future__ import annotations

import logging
import os
import struct
import tempfile
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CorruptCache, DuplicateUttId, InvalidParams, MalformedLine, MissingEntry, UnknownKey
from .features.framing import FrameParams
from .features.matrix import FEATURE_KINDS, FeatureMatrix

log = logging.getLogger(__name__)

KEYS = ("bonafide", "spoof")
SPLITS = ("train", "dev", "eval")


@dataclass(frozen=True)
class TrialRecord:
    speaker_id: str
    utt_id: str
    system_id: str
    key: str
    split: str = "train"
    lineno: int = field(default=0, compare=False)

    @property
    def is_bonafide(self):
        return self.key == "bonafide"

    def to_line(self):
        return f"{self.speaker_id} {self.utt_id} - {self.system_id} {self.key}"


def parse_protocol_lines(lines, split="train"):
    """Parse protocol text; lines have at least five fields, the key last."""
    if split not in SPLITS:
        raise InvalidParams(f"unknown split {split!r}")
    records, seen = [], {}
    for lineno, raw in enumerate(lines, 1):
        parts = raw.split()
        if not parts:
            continue
        if len(parts) < 5:
            raise MalformedLine(lineno, f"expected at least 5 fields, got {len(parts)}")
        key = parts[-1]
        if key not in KEYS:
            raise UnknownKey(lineno, f"key must be 'bonafide' or 'spoof', got {key!r}")
        utt = parts[1]
        if utt in seen:
            raise DuplicateUttId(f"utterance {utt!r} on line {lineno} already listed on line {seen[utt]}")
        seen[utt] = lineno
        records.append(TrialRecord(parts[0], utt, parts[-2], key, split, lineno))
    return records


def parse_protocol(path, split="train"):
    with open(path, encoding="utf-8") as fh:
        return parse_protocol_lines(fh, split)


def format_protocol(records):
    return "".join(r.to_line() + "\n" for r in records)


def write_protocol(path, records):
    Path(path).write_text(format_protocol(records), encoding="utf-8")


def sample_balanced(records, n_per_class, seed=0):
    """Up to ``n_per_class`` records of each key after a seeded shuffle.

    The result is interleaved (bonafide, spoof, bonafide, ...) with the
    leftover of the larger class at the end.
    """
    rng = np.random.default_rng(seed)
    picked = {}
    for key in KEYS:
        pool = [r for r in records if r.key == key]
        if n_per_class > len(pool):
            log.warning("asked for %d %s records, only %d available", n_per_class, key, len(pool))
        order = rng.permutation(len(pool))
        picked[key] = [pool[i] for i in order[:n_per_class]]
    out = []
    for i in range(max(len(v) for v in picked.values())):
        out.extend(v[i] for v in picked.values() if i < len(v))
    return out


# --- feature cache ---------------------------------------------------------
#
# header  : b"SPFC" u16 version u32 n_entries u32 index_crc
# index   : per entry u16 id_len, id bytes, u8 kind, u8 n_deltas, u64 offset,
#           u32 time_step, u32 dim, u32 payload_crc
# payload : f32 little-endian row-major matrices at the recorded offsets

CACHE_MAGIC = b"SPFC"
CACHE_VERSION = 1
_HEADER = struct.Struct("<4sHII")
_ENTRY = struct.Struct("<BBQIII")


@dataclass(frozen=True)
class FeatureCacheEntry:
    utt_id: str
    features: FeatureMatrix

    @property
    def dims(self):
        return self.features.shape


def encode_cache(entries):
    entries = list(entries)
    ids = [e.utt_id for e in entries]
    if len(set(ids)) != len(ids):
        raise DuplicateUttId("cache entries must have unique utterance ids")
    payloads = [np.ascontiguousarray(e.features.data, dtype="<f4").tobytes() for e in entries]
    encoded_ids = [u.encode("utf-8") for u in ids]
    index_size = sum(2 + len(b) + _ENTRY.size for b in encoded_ids)
    offset = _HEADER.size + index_size
    index = []
    for e, uid, blob in zip(entries, encoded_ids, payloads):
        t, d = e.features.shape
        index.append(struct.pack("<H", len(uid)) + uid + _ENTRY.pack(
            FEATURE_KINDS.index(e.features.feature_kind), e.features.n_deltas,
            offset, t, d, zlib.crc32(blob)))
        offset += len(blob)
    index_blob = b"".join(index)
    header = _HEADER.pack(CACHE_MAGIC, CACHE_VERSION, len(entries), zlib.crc32(index_blob))
    return header + index_blob + b"".join(payloads)


def cache_write(path, entries):
    """Write entries atomically (temp file + rename)."""
    data = encode_cache(entries)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_index(buf):
    if len(buf) < _HEADER.size:
        raise CorruptCache("cache file shorter than its header")
    magic, version, count, index_crc = _HEADER.unpack_from(buf, 0)
    if magic != CACHE_MAGIC:
        raise CorruptCache("not a feature cache (bad magic)")
    if version != CACHE_VERSION:
        raise CorruptCache(f"unsupported cache version {version}")
    pos = _HEADER.size
    index = {}
    try:
        for _ in range(count):
            (n,) = struct.unpack_from("<H", buf, pos)
            uid = bytes(buf[pos + 2:pos + 2 + n]).decode("utf-8")
            if len(uid.encode("utf-8")) != n:
                raise CorruptCache("index truncated")
            kind, n_deltas, offset, t, d, crc = _ENTRY.unpack_from(buf, pos + 2 + n)
            pos += 2 + n + _ENTRY.size
            index[uid] = (kind, n_deltas, offset, t, d, crc)
    except (struct.error, UnicodeDecodeError) as exc:
        raise CorruptCache("index truncated or garbled") from exc
    if zlib.crc32(bytes(buf[_HEADER.size:pos])) != index_crc:
        raise CorruptCache("index checksum mismatch")
    return index


def cache_index(path):
    """``{utt_id: (time_step, dim)}`` without reading payloads."""
    with open(path, "rb") as fh:
        buf = fh.read()
    return {u: (v[3], v[4]) for u, v in _read_index(buf).items()}


def cache_read(path, utt_ids=None, frame_params=FrameParams()):
    """Read entries (all, or just ``utt_ids`` in that order), validating each CRC."""
    buf = Path(path).read_bytes()
    index = _read_index(buf)
    wanted = list(index) if utt_ids is None else list(utt_ids)
    out = []
    for uid in wanted:
        if uid not in index:
            raise MissingEntry(uid)
        kind, n_deltas, offset, t, d, crc = index[uid]
        if t == 0 or d == 0 or kind >= len(FEATURE_KINDS):
            raise CorruptCache(f"entry {uid!r} has invalid dims or kind")
        end = offset + 4 * t * d
        if end > len(buf):
            raise CorruptCache(f"payload of {uid!r} runs past end of file")
        blob = buf[offset:end]
        if zlib.crc32(blob) != crc:
            raise CorruptCache(f"payload checksum mismatch for {uid!r}")
        data = np.frombuffer(blob, dtype="<f4").reshape(t, d).astype(np.float64)
        try:
            fm = FeatureMatrix(data, FEATURE_KINDS[kind], frame_params, n_deltas)
        except InvalidParams as exc:
            raise CorruptCache(f"entry {uid!r}: {exc}") from exc
        out.append(FeatureCacheEntry(uid, fm))
    return out
