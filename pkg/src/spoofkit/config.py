"""Run configuration: INI file sections, command-line overrides and the effective-config echo."""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .errors import InvalidParams, UsageError
from .features import CqtParams, FrameParams, MelParams
from .metrics import TdcfParams


@dataclass(frozen=True)
class GmmParams:
    n_components: int = 32
    max_iters: int = 100
    tol: float = 1e-4
    use_deltas: bool = True


@dataclass(frozen=True)
class SvmParams:
    C: float = 1.0
    gamma: float | None = None
    tol: float = 1e-3


@dataclass(frozen=True)
class AdaBoostParams:
    n_rounds: int = 10


@dataclass(frozen=True)
class Paths:
    audio_dir: str = "."
    audio_ext: str = ".wav"
    protocol_train: str = ""
    protocol_dev: str = ""
    protocol_eval: str = ""
    work_dir: str = "work"

    def protocol(self, split):
        path = getattr(self, f"protocol_{split}")
        if not path:
            raise UsageError(f"no protocol file configured for split {split!r}")
        if not Path(path).is_file():
            raise UsageError(f"protocol file {path} does not exist")
        return Path(path)

    def audio(self, utt_id):
        return Path(self.audio_dir) / f"{utt_id}{self.audio_ext}"

    def cache(self, feature, split):
        return Path(self.work_dir) / "features" / f"{feature}_{split}.spfc"

    def model(self, classifier, feature):
        return Path(self.work_dir) / "models" / f"{classifier}_{feature}.spgd"

    def scores(self, classifier, feature, split):
        return Path(self.work_dir) / "scores" / f"{classifier}_{feature}_{split}.txt"

    def report(self, classifier, feature, split, ext):
        return Path(self.work_dir) / "reports" / f"{classifier}_{feature}_{split}.{ext}"


FEATURES = ("mfcc", "cqcc")
CLASSIFIERS = ("gmm", "svm", "adaboost")

# INI section -> RunConfig attribute holding that parameter group
SECTIONS = {
    "paths": "paths", "frame": "frame", "mel": "mel", "cqt": "cqt", "gmm": "gmm",
    "svm": "svm", "adaboost": "adaboost", "tdcf": "tdcf",
}


@dataclass(frozen=True)
class RunConfig:
    feature: str = "mfcc"
    classifier: str = "gmm"
    seed: int = 0
    target_rate: int = 16000
    n_per_class: int = 1000
    frames: int = 50
    workers: int = 1
    paths: Paths = field(default_factory=Paths)
    frame: FrameParams = field(default_factory=FrameParams)
    mel: MelParams = field(default_factory=MelParams)
    cqt: CqtParams = field(default_factory=CqtParams)
    gmm: GmmParams = field(default_factory=GmmParams)
    svm: SvmParams = field(default_factory=SvmParams)
    adaboost: AdaBoostParams = field(default_factory=AdaBoostParams)
    tdcf: TdcfParams = field(default_factory=TdcfParams)

    def __post_init__(self):
        if self.feature not in FEATURES:
            raise UsageError(f"feature must be one of {FEATURES}, got {self.feature!r}")
        if self.classifier not in CLASSIFIERS:
            raise UsageError(f"classifier must be one of {CLASSIFIERS}, got {self.classifier!r}")
        if self.frames < 1 or self.n_per_class < 1 or self.workers < 1 or self.target_rate < 1:
            raise UsageError("frames, n_per_class, workers and target_rate must be positive")

    def to_dict(self):
        return asdict(self)


def _convert(text, type_name, name):
    text = text.strip()
    optional = "None" in type_name
    if optional and text.lower() in ("none", ""):
        return None
    try:
        if type_name.startswith("bool"):
            if text.lower() in ("1", "true", "yes", "on"):
                return True
            if text.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError
        if type_name.startswith("int"):
            return int(text)
        if type_name.startswith("float"):
            return float(text)
    except ValueError:
        raise UsageError(f"{name}: cannot parse {text!r} as {type_name}") from None
    return text


def _apply(obj, values, where):
    known = {f.name: f for f in fields(obj)}
    updates = {}
    for key, text in values.items():
        if key not in known:
            raise UsageError(f"unknown setting {where}.{key}")
        type_name = known[key].type if isinstance(known[key].type, str) else known[key].type.__name__
        updates[key] = _convert(text, type_name, f"{where}.{key}") if isinstance(text, str) else text
    try:
        return replace(obj, **updates)
    except InvalidParams as exc:
        raise UsageError(f"[{where}] {exc}") from exc


def load_config(path=None, overrides=None):
    """Build a :class:`RunConfig` from an optional INI file plus ``overrides``.

    ``overrides`` maps dotted names (``"svm.C"``, ``"seed"``) to values and
    wins over the file.
    """
    cfg = RunConfig()
    grouped = {"run": {}}
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            if not parser.read(path, encoding="utf-8"):
                raise UsageError(f"config file {path} not found")
        except configparser.Error as exc:
            raise UsageError(f"config file {path}: {exc}") from exc
        for section in parser.sections():
            if section != "run" and section not in SECTIONS:
                raise UsageError(f"unknown config section [{section}]")
            grouped.setdefault(section, {}).update(parser[section])
    for dotted, value in (overrides or {}).items():
        section, _, key = dotted.rpartition(".")
        grouped.setdefault(section or "run", {})[key] = value
    for section, values in grouped.items():
        if section == "run":
            continue
        if section not in SECTIONS:
            raise UsageError(f"unknown config section [{section}]")
        attr = SECTIONS[section]
        cfg = replace(cfg, **{attr: _apply(getattr(cfg, attr), values, section)})
    return _apply(cfg, grouped["run"], "run")


def format_config(cfg):
    """INI text for ``cfg``; feeding it back to :func:`load_config` reproduces ``cfg``."""
    d = cfg.to_dict()
    lines = ["[run]"]
    lines += [f"{k} = {v}" for k, v in d.items() if not isinstance(v, dict)]
    for section, attr in SECTIONS.items():
        lines.append("")
        lines.append(f"[{section}]")
        lines += [f"{k} = {'none' if v is None else v}" for k, v in d[attr].items()]
    return "\n".join(lines) + "\n"
