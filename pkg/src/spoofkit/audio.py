"""WAV decoding, encoding and sample-rate conversion."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from pathlib import Path

import numpy as np

from .errors import EmptyAudio, InvalidParams, MalformedContainer, UnsupportedEncoding

CANONICAL_RATE = 16000

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE

# trailing 14 bytes shared by every KSDATAFORMAT_SUBTYPE_* GUID
_GUID_TAIL = b"\x00\x00\x00\x00\x10\x00\x80\x00\x00\xaa\x00\x38\x9b\x71"


@dataclass(frozen=True)
class AudioClip:
    """Mono waveform with amplitudes in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int
    source_id: str = ""

    def __post_init__(self):
        samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise InvalidParams("samples must be one-dimensional")
        if samples.size == 0:
            raise EmptyAudio(f"{self.source_id or 'clip'} has no samples")
        if not np.all(np.isfinite(samples)):
            raise InvalidParams("samples must be finite")
        if np.max(np.abs(samples)) > 1.0:
            raise InvalidParams("samples must lie within [-1, 1]")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise InvalidParams(f"bad sample rate {self.sample_rate!r}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    @property
    def duration(self):
        return self.samples.size / self.sample_rate

    def __len__(self):
        return self.samples.size


def _read_chunks(buf):
    if len(buf) < 12 or buf[:4] != b"RIFF" or buf[8:12] != b"WAVE":
        raise MalformedContainer("missing RIFF/WAVE header")
    riff_size = struct.unpack_from("<I", buf, 4)[0]
    end = min(len(buf), 8 + riff_size)
    pos = 12
    chunks = {}
    while pos + 8 <= end:
        cid, size = struct.unpack_from("<4sI", buf, pos)
        body = pos + 8
        if body + size > len(buf):
            if cid == b"data":
                # some writers leave a stale data size; keep whole frames only
                size = len(buf) - body
            else:
                raise MalformedContainer(f"chunk {cid!r} runs past end of file")
        chunks.setdefault(cid, buf[body:body + size])
        pos = body + size + (size & 1)
    return chunks


def _parse_fmt(fmt):
    if len(fmt) < 16:
        raise MalformedContainer("fmt chunk too short")
    tag, channels, rate, _, block_align, bits = struct.unpack_from("<HHIIHH", fmt, 0)
    if tag == WAVE_FORMAT_EXTENSIBLE:
        if len(fmt) < 40:
            raise MalformedContainer("extensible fmt chunk too short")
        valid_bits = struct.unpack_from("<H", fmt, 18)[0]
        guid = fmt[24:40]
        if guid[2:] != _GUID_TAIL:
            raise UnsupportedEncoding("unknown extensible sub-format")
        tag = struct.unpack_from("<H", guid, 0)[0]
        bits = bits or valid_bits
    if channels < 1 or rate < 1:
        raise MalformedContainer("fmt chunk declares no channels or zero rate")
    if block_align != channels * ((bits + 7) // 8):
        raise MalformedContainer(f"block align {block_align} inconsistent with "
                                 f"{channels} x {bits}-bit samples")
    return tag, channels, rate, bits


def _decode(data, tag, channels, bits):
    width = (bits + 7) // 8
    n_frames = len(data) // (width * channels)
    if n_frames == 0:
        raise EmptyAudio("data chunk holds no frames")
    data = data[:n_frames * width * channels]
    if tag == WAVE_FORMAT_IEEE_FLOAT:
        if bits == 32:
            x = np.frombuffer(data, "<f4").astype(np.float64)
        elif bits == 64:
            x = np.frombuffer(data, "<f8").copy()
        else:
            raise UnsupportedEncoding(f"{bits}-bit float")
        x = np.nan_to_num(x, nan=0.0, posinf=1.0, neginf=-1.0)
        x = np.clip(x, -1.0, 1.0)
    elif tag == WAVE_FORMAT_PCM:
        if bits == 8:
            x = (np.frombuffer(data, np.uint8).astype(np.float64) - 128.0) / 128.0
        elif bits == 16:
            x = np.frombuffer(data, "<i2") / 32768.0
        elif bits == 24:
            raw = np.frombuffer(data, np.uint8).reshape(-1, 3).astype(np.int32)
            ints = raw[:, 0] | (raw[:, 1] << 8) | (raw[:, 2] << 16)
            ints = np.where(ints >= 1 << 23, ints - (1 << 24), ints)
            x = ints / float(1 << 23)
        elif bits == 32:
            x = np.frombuffer(data, "<i4") / float(1 << 31)
        else:
            raise UnsupportedEncoding(f"{bits}-bit PCM")
    else:
        raise UnsupportedEncoding(f"audio format tag 0x{tag:04x}")
    x = x.reshape(n_frames, channels)
    return x[:, 0].copy() if channels == 1 else x.mean(axis=1)


def load_wav(path, source_id=None):
    """Read a RIFF/WAVE file into a mono :class:`AudioClip`.

    Integer PCM is scaled by the magnitude of the type's minimum value,
    float data is clamped to [-1, 1] and multichannel frames are averaged.
    """
    path = Path(path)
    buf = path.read_bytes()
    chunks = _read_chunks(buf)
    if b"fmt " not in chunks:
        raise MalformedContainer("no fmt chunk")
    if b"data" not in chunks:
        raise MalformedContainer("no data chunk")
    tag, channels, rate, bits = _parse_fmt(chunks[b"fmt "])
    samples = _decode(chunks[b"data"], tag, channels, bits)
    return AudioClip(samples, rate, source_id if source_id is not None else path.stem)


def write_wav(path, clip, bits=16):
    """Write ``clip`` as mono PCM (16-bit) or IEEE float (32-bit)."""
    x = np.asarray(clip.samples, dtype=np.float64)
    if bits == 16:
        tag = WAVE_FORMAT_PCM
        payload = np.clip(np.round(x * 32768.0), -32768, 32767).astype("<i2").tobytes()
    elif bits == 32:
        tag = WAVE_FORMAT_IEEE_FLOAT
        payload = x.astype("<f4").tobytes()
    else:
        raise UnsupportedEncoding(f"cannot write {bits}-bit audio")
    width = bits // 8
    fmt = struct.pack("<HHIIHH", tag, 1, clip.sample_rate,
                      clip.sample_rate * width, width, bits)
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt
    body += b"data" + struct.pack("<I", len(payload)) + payload
    if len(payload) & 1:
        body += b"\x00"
    Path(path).write_bytes(b"RIFF" + struct.pack("<I", len(body)) + body)


def resample(clip, target_rate, taps=64, beta=8.6, rolloff=0.95):
    """Kaiser-windowed sinc sample-rate conversion.

    ``taps`` counts filter zero crossings at the lower of the two rates.
    Matching rates return ``clip`` unchanged.
    """
    if int(target_rate) != target_rate or target_rate <= 0:
        raise InvalidParams(f"target rate must be a positive integer, got {target_rate!r}")
    target_rate = int(target_rate)
    if target_rate == clip.sample_rate:
        return clip
    y = resample_array(clip.samples, clip.sample_rate, target_rate, taps, beta, rolloff)
    return AudioClip(np.clip(y, -1.0, 1.0), target_rate, clip.source_id)


def _kernel_rows(dist, half, cutoff, beta):
    w = 2 * cutoff * np.sinc(2 * cutoff * dist)
    inside = np.abs(dist) < half
    w *= np.where(inside, np.i0(beta * np.sqrt(np.clip(1 - (dist / half) ** 2, 0, 1))), 0.0)
    return w / w.sum(axis=1, keepdims=True)


@lru_cache(maxsize=32)
def _phase_table(up, down, taps, beta, rolloff):
    """Normalised filter rows for each of the ``up`` output phases (read-only)."""
    scale = min(1.0, up / down)
    half = taps / 2.0 / scale
    offsets = np.arange(-int(np.ceil(half)) + 1, int(np.ceil(half)) + 1)
    frac = np.arange(up) / up
    table = _kernel_rows(offsets[None, :] - frac[:, None], half, 0.5 * scale * rolloff, beta)
    table.setflags(write=False)
    return offsets, table


_MAX_PHASES = 4096


def resample_array(x, source_rate, target_rate, taps=64, beta=8.6, rolloff=0.95):
    """Windowed-sinc resampling of a plain array (no amplitude clamping)."""
    if taps < 2:
        raise InvalidParams("taps must be >= 2")
    x = np.asarray(x, dtype=np.float64)
    g = gcd(source_rate, target_rate)
    up, down = target_rate // g, source_rate // g
    n_out = -(-x.size * up // down)
    scale = min(1.0, up / down)
    cutoff = 0.5 * scale * rolloff  # cycles per input sample
    half = taps / 2.0 / scale  # half filter width in input samples
    if up <= _MAX_PHASES:
        offsets, table = _phase_table(up, down, taps, float(beta), float(rolloff))
    else:
        offsets, table = np.arange(-int(np.ceil(half)) + 1, int(np.ceil(half)) + 1), None

    pad = offsets.size
    padded = np.concatenate([np.zeros(pad), x, np.zeros(pad)])
    out = np.empty(n_out)
    chunk = max(1, 2_000_000 // offsets.size)
    for start in range(0, n_out, chunk):
        i = np.arange(start, min(n_out, start + chunk))
        base = (i * down) // up
        phase = i * down - base * up
        idx = base[:, None] + offsets[None, :]
        if table is not None:
            w = table[phase]
        else:
            w = _kernel_rows(idx - (base + phase / up)[:, None], half, cutoff, beta)
        out[i] = np.einsum("ij,ij->i", w, padded[idx + pad])
    return out
