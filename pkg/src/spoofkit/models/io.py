"""Binary model container.

Layout (little endian)::

    b"SPGD" | u16 version | u16 kind | u32 config length | config (UTF-8 JSON)
    | kind-specific f64 parameter blocks | u32 CRC32 of everything before it
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
import zlib
from pathlib import Path

import numpy as np

from ..errors import CorruptModel
from .adaboost import AdaBoostEnsemble
from .gmm import GmmModel, GmmPairScorer
from .svm import SvmModel

MAGIC = b"SPGD"
VERSION = 1
KIND_GMM, KIND_GMM_PAIR, KIND_SVM, KIND_ADABOOST = 1, 2, 3, 4


class _Writer:
    def __init__(self):
        self.parts = []

    def pack(self, fmt, *values):
        self.parts.append(struct.pack("<" + fmt, *values))

    def text(self, s):
        b = s.encode("utf-8")
        self.pack("I", len(b))
        self.parts.append(b)

    def f64(self, arr):
        self.parts.append(np.ascontiguousarray(arr, dtype="<f8").tobytes())

    def getvalue(self):
        return b"".join(self.parts)


class _Reader:
    def __init__(self, buf, pos=0):
        self.buf = buf
        self.pos = pos

    def _take(self, n):
        if n < 0 or self.pos + n > len(self.buf):
            raise CorruptModel("model file truncated")
        out = self.buf[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt):
        fmt = "<" + fmt
        return struct.unpack(fmt, self._take(struct.calcsize(fmt)))

    def text(self):
        (n,) = self.unpack("I")
        try:
            return self._take(n).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorruptModel("undecodable text field") from exc

    def f64(self, *shape):
        count = int(np.prod(shape)) if shape else 1
        return np.frombuffer(self._take(8 * count), dtype="<f8").astype(np.float64).reshape(shape)


def _put_gmm(w, m):
    w.pack("II", m.n_components, m.dim)
    w.text(m.trained_on)
    w.f64(m.weights)
    w.f64(m.means)
    w.f64(m.variances)


def _get_gmm(r):
    k, d = r.unpack("II")
    trained_on = r.text()
    return GmmModel(r.f64(k), r.f64(k, d), r.f64(k, d), trained_on)


def _put_svm(w, m):
    w.pack("II", m.support_vectors.shape[0], m.dim)
    w.f64([m.gamma, m.C, m.bias])
    w.f64(m.dual_coefs)
    w.f64(m.support_vectors)


def _get_svm(r):
    s, d = r.unpack("II")
    gamma, c, bias = r.f64(3)
    coefs = r.f64(s)
    return SvmModel(r.f64(s, d), coefs, bias, gamma, c)


def encode_model(model, config=None):
    w = _Writer()
    body = _Writer()
    if isinstance(model, GmmModel):
        kind = KIND_GMM
        _put_gmm(body, model)
    elif isinstance(model, GmmPairScorer):
        kind = KIND_GMM_PAIR
        _put_gmm(body, model.bonafide)
        _put_gmm(body, model.spoof)
    elif isinstance(model, SvmModel):
        kind = KIND_SVM
        _put_svm(body, model)
    elif isinstance(model, AdaBoostEnsemble):
        kind = KIND_ADABOOST
        body.pack("IB", model.n_rounds, int(model.degenerate))
        for svm, alpha in model.rounds:
            body.f64([alpha])
            _put_svm(body, svm)
    else:
        raise TypeError(f"cannot serialise {type(model).__name__}")
    w.parts.append(MAGIC)
    w.pack("HH", VERSION, kind)
    w.text(json.dumps(config or {}, sort_keys=True))
    w.parts.append(body.getvalue())
    payload = w.getvalue()
    return payload + struct.pack("<I", zlib.crc32(payload))


def decode_model(buf):
    """Inverse of :func:`encode_model`; returns ``(model, config)``."""
    if len(buf) < 12 or buf[:4] != MAGIC:
        raise CorruptModel("not a model file (bad magic)")
    payload, (crc,) = buf[:-4], struct.unpack("<I", buf[-4:])
    if zlib.crc32(payload) != crc:
        raise CorruptModel("model checksum mismatch")
    r = _Reader(payload, 4)
    version, kind = r.unpack("HH")
    if version != VERSION:
        raise CorruptModel(f"unsupported model format version {version}")
    try:
        config = json.loads(r.text())
    except json.JSONDecodeError as exc:
        raise CorruptModel("config block is not valid JSON") from exc
    try:
        if kind == KIND_GMM:
            model = _get_gmm(r)
        elif kind == KIND_GMM_PAIR:
            model = GmmPairScorer(_get_gmm(r), _get_gmm(r))
        elif kind == KIND_SVM:
            model = _get_svm(r)
        elif kind == KIND_ADABOOST:
            n, degenerate = r.unpack("IB")
            rounds = []
            for _ in range(n):
                (alpha,) = r.f64(1)
                rounds.append((_get_svm(r), alpha))
            model = AdaBoostEnsemble(tuple(rounds), bool(degenerate))
        else:
            raise CorruptModel(f"unknown model kind {kind}")
    except CorruptModel:
        raise
    except Exception as exc:  # parameter validation on a damaged body
        raise CorruptModel(f"invalid model parameters: {exc}") from exc
    if r.pos != len(payload):
        raise CorruptModel("trailing bytes after model body")
    return model, config


def atomic_write(path, data):
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


def save_model(path, model, config=None):
    atomic_write(path, encode_model(model, config))


def load_model(path):
    return decode_model(Path(path).read_bytes())
