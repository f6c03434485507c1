"""Pipeline configuration and stage orchestration.

Stages run in order and communicate only through files in the output
directory: ``vectors.txt``, ``senses.txt``, ``rae_params.txt`` and
``recnn_params.txt``, then ``report.txt`` / ``report.csv``.

Randomness: every stage draws from ``numpy.random.default_rng([seed, stage_id])``
with the fixed ids in ``STAGE_IDS``, so stages are reproducible in isolation.
"""

import dataclasses
import logging
import typing
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import composers, senses, vectorspace
from .composers import RAEConfig, init_params, load_params, save_params, train_rae
from .datasets import dataset_words, parse_dataset
from .disambiguator import Mode
from .errors import ConfigError, PriorWSDError, StageError
from .evaluation import EvalConfig, ExperimentReport, run_experiment
from .senses import induce_senses, load_inventory, save_inventory
from .vectorspace import VectorConfig, build_vector_space, load_vectors, read_corpus, save_vectors

log = logging.getLogger(__name__)

STAGE_IDS = {"senses": 1, "rae": 2, "recnn": 3, "cv": 4, "synth": 5}

VECTORS_FILE = "vectors.txt"
SENSES_FILE = "senses.txt"
RAE_FILE = "rae_params.txt"
RECNN_FILE = "recnn_params.txt"
REPORT_TXT = "report.txt"
REPORT_CSV = "report.csv"


def stage_rng(seed, stage):
    return np.random.default_rng([seed, STAGE_IDS[stage]])


def stage_seed(seed, stage):
    return int(stage_rng(seed, stage).integers(2**31 - 1))


@dataclass
class PipelineConfig:
    seed: int
    corpus: Optional[str] = None
    datasets: List[str] = field(default_factory=list)
    out: str = "out"
    # vectors
    window: int = 5
    dimension: int = 300
    min_freq: int = 1
    lowercase: bool = True
    # senses
    k: int = 3
    linkage: str = "average"
    metric: str = "cosine"
    sense_window: Optional[int] = None  # None -> window
    max_contexts: int = 1000
    targets: List[str] = field(default_factory=list)  # empty -> dataset words
    # composition models
    models: List[str] = field(default_factory=lambda: list(composers.MODELS))
    modes: List[str] = field(default_factory=lambda: [m.value for m in Mode])
    activation: str = "tanh"
    rae_learning_rate: float = 0.01
    rae_epochs: int = 100
    rae_batch_size: int = 32
    rae_normalize: bool = False
    rae_max_pairs: int = 5000
    recnn_init: str = "random"  # or "rae": reuse the trained RAE encoder
    # evaluation
    binarize: str = "median"
    threshold: Optional[float] = None
    feature: str = "cosine"
    folds: int = 4

    def validate(self):
        if self.seed is None:
            raise ConfigError("a seed is required")
        for name in ("window", "dimension", "min_freq", "k", "max_contexts", "rae_batch_size",
                     "rae_max_pairs"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.rae_epochs < 0 or self.rae_learning_rate < 0:
            raise ConfigError("rae_epochs and rae_learning_rate must be non-negative")
        if self.folds < 2:
            raise ConfigError(f"folds must be >= 2, got {self.folds}")
        if self.linkage not in senses.LINKAGES:
            raise ConfigError(f"unknown linkage {self.linkage!r}")
        if self.metric not in senses.METRICS:
            raise ConfigError(f"unknown metric {self.metric!r}")
        if self.activation not in composers.ACTIVATIONS:
            raise ConfigError(f"unknown activation {self.activation!r}")
        if self.recnn_init not in ("random", "rae"):
            raise ConfigError(f"recnn_init must be 'random' or 'rae', got {self.recnn_init!r}")
        if self.binarize not in ("median", "fixed"):
            raise ConfigError(f"unknown binarization rule {self.binarize!r}")
        if self.feature not in ("cosine", "concat"):
            raise ConfigError(f"unknown classifier feature {self.feature!r}")
        self.models = [composers.parse_model(m) for m in self.models]
        self.modes = [Mode.parse(m).value for m in self.modes]
        if not self.models or not self.modes:
            raise ConfigError("at least one model and one mode are required")
        return self

    @property
    def vector_config(self):
        return VectorConfig(self.window, self.min_freq, self.dimension, self.lowercase)

    @property
    def rae_config(self):
        return RAEConfig(self.rae_learning_rate, self.rae_epochs, self.rae_batch_size,
                         self.activation, self.rae_normalize, self.seed)

    @property
    def eval_config(self):
        return EvalConfig(self.binarize, self.threshold, self.feature, self.folds, self.metric)

    def path(self, name):
        return Path(self.out) / name


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _coerce(name, raw, hint):
    raw = raw.strip()
    origin = typing.get_origin(hint)
    args = typing.get_args(hint)
    if origin is typing.Union:  # Optional[X]
        if raw.lower() in ("", "none"):
            return None
        return _coerce(name, raw, next(a for a in args if a is not type(None)))
    if origin in (list, List):
        return [x.strip() for x in raw.split(",") if x.strip()]
    try:
        if hint is bool:
            if raw.lower() in _TRUE:
                return True
            if raw.lower() in _FALSE:
                return False
            raise ValueError(raw)
        if hint is int:
            return int(raw)
        if hint is float:
            return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}") from None
    return raw


def parse_settings(lines):
    """``key = value`` lines (``#`` comments allowed) to a raw dict."""
    out = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"config line {lineno}: expected key=value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def make_config(settings):
    """Build a validated ``PipelineConfig`` from raw string settings."""
    hints = typing.get_type_hints(PipelineConfig)
    values = {}
    for key, raw in settings.items():
        if key not in hints:
            raise ConfigError(f"unknown config key {key!r}")
        values[key] = _coerce(key, raw, hints[key]) if isinstance(raw, str) else raw
    if values.get("seed") is None:
        raise ConfigError("config must set a seed")
    return PipelineConfig(**values).validate()


def load_config(path, overrides=None):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    settings = parse_settings(text.splitlines())
    # file paths in a config are relative to the config's directory
    for key in ("corpus", "datasets", "out"):
        if key in settings:
            parts = [p.strip() for p in settings[key].split(",") if p.strip()]
            settings[key] = ",".join(p if Path(p).is_absolute() else str(path.parent / p)
                                     for p in parts)
    settings.update(overrides or {})
    return make_config(settings)


def dump_config(config):
    lines = []
    for f in dataclasses.fields(config):
        v = getattr(config, f.name)
        if isinstance(v, list):
            v = ",".join(v)
        elif v is None:
            v = "none"
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"


# -- stages -------------------------------------------------------------------

def _corpus(config):
    if not config.corpus:
        raise ConfigError("no corpus configured")
    try:
        return list(read_corpus(config.corpus))
    except OSError as exc:
        raise ConfigError(f"cannot read corpus {config.corpus}: {exc}") from None


def _datasets(config):
    out = []
    for path in config.datasets:
        try:
            out.append((Path(path).stem, parse_dataset(path)))
        except OSError as exc:
            raise ConfigError(f"cannot read dataset {path}: {exc}") from None
    return out


def stage_vectors(config, corpus=None):
    space = build_vector_space(corpus if corpus is not None else _corpus(config),
                               config.vector_config)
    save_vectors(space, config.path(VECTORS_FILE))
    log.info("vectors: %d words x %d dimensions", len(space), space.dimension)
    return space


def stage_senses(config, space, corpus=None, datasets=None):
    corpus = corpus if corpus is not None else _corpus(config)
    if config.targets:
        targets = config.targets
    else:
        datasets = datasets if datasets is not None else _datasets(config)
        targets = [w for _, pairs in datasets for w in dataset_words(pairs)]
    targets = [w for w in dict.fromkeys(targets) if w in space]
    inv = induce_senses(corpus, targets, space, config.k, config.sense_window or config.window,
                        config.linkage, config.metric, config.max_contexts,
                        stage_rng(config.seed, "senses"))
    save_inventory(inv, config.path(SENSES_FILE))
    log.info("senses: %d target words", len(inv))
    return inv


def training_pairs(corpus, space, limit, rng):
    """Adjacent in-vocabulary word pairs from the corpus, subsampled to ``limit``."""
    pairs = []
    for sent in corpus:
        toks = [w for w in vectorspace.normalize_tokens(sent, space.lowercase) if w in space]
        pairs.extend(zip(toks, toks[1:]))
    if not pairs:
        raise ConfigError("the corpus has no adjacent in-vocabulary word pairs for RAE training")
    if len(pairs) > limit:
        keep = np.sort(rng.choice(len(pairs), size=limit, replace=False))
        pairs = [pairs[i] for i in keep]
    return np.array([np.concatenate([space.lookup(a), space.lookup(b)]) for a, b in pairs])


def stage_models(config, space, corpus=None):
    corpus = corpus if corpus is not None else _corpus(config)
    rng = stage_rng(config.seed, "rae")
    X = training_pairs(corpus, space, config.rae_max_pairs, rng)
    result = train_rae(X, space.dimension, config.rae_config, rng)
    log.info("RAE: %d pairs, loss %.6g -> %.6g", len(X), result.losses[0], result.losses[-1])
    if config.recnn_init == "rae":
        recnn = result.params.encoder()
    else:
        recnn = init_params(space.dimension, stage_rng(config.seed, "recnn"), config.activation,
                            decoder=False)
    save_params(result.params, config.path(RAE_FILE))
    save_params(recnn, config.path(RECNN_FILE))
    return result.params, recnn


def stage_evaluate(config, space, inventory, rae, recnn, datasets=None):
    datasets = datasets if datasets is not None else _datasets(config)
    if not datasets:
        raise ConfigError("no evaluation datasets configured")
    params = {"add": None, "mult": None, "recnn": recnn, "rae": rae}
    cv_seed = stage_seed(config.seed, "cv")
    notes = [
        f"labels: {config.binarize} split"
        + (f" at {config.threshold}" if config.binarize == "fixed" else ""),
        f"classifier feature: {config.feature}; {config.folds}-fold cross-validation",
        f"recnn parameters: {'trained RAE encoder' if config.recnn_init == 'rae' else 'seeded random, untrained'}",
        f"seed: {config.seed}",
    ]
    reports = []
    for name, pairs in datasets:
        report = ExperimentReport(name, notes=list(notes))
        for model in config.models:
            for mode in config.modes:
                report.rows.append(run_experiment(pairs, space, inventory, model, mode,
                                                  params[model], name, config.eval_config,
                                                  cv_seed))
        reports.append(report)
    txt = "\n".join(r.to_table() for r in reports)
    csv = ExperimentReport.CSV_HEADER + "\n" + "".join(
        r.to_csv().split("\n", 1)[1] for r in reports
    )
    config.path(REPORT_TXT).write_text(txt, encoding="utf-8")
    config.path(REPORT_CSV).write_text(csv, encoding="utf-8")
    return reports


def _run_stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except PriorWSDError as exc:
        raise StageError(name, exc) from exc


def _load_or(resume, path, loader, stage, build):
    if resume and path.exists():
        log.info("%s: reusing %s", stage, path)
        return _run_stage(stage, loader, path)
    return _run_stage(stage, build)


def run_pipeline(config, resume=False):
    """Run every stage; with ``resume`` reuse artifacts already in ``config.out``."""
    config.validate()
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    corpus = _run_stage("load", _corpus, config)
    datasets = _run_stage("load", _datasets, config)

    space = _load_or(resume, config.path(VECTORS_FILE),
                     lambda p: load_vectors(p, config.lowercase), "build-vectors",
                     lambda: stage_vectors(config, corpus))
    inventory = _load_or(resume, config.path(SENSES_FILE), load_inventory, "induce-senses",
                         lambda: stage_senses(config, space, corpus, datasets))
    if resume and config.path(RAE_FILE).exists() and config.path(RECNN_FILE).exists():
        rae = _run_stage("train-rae", load_params, config.path(RAE_FILE))
        recnn = _run_stage("train-rae", load_params, config.path(RECNN_FILE))
    else:
        rae, recnn = _run_stage("train-rae", stage_models, config, space, corpus)
    return _run_stage("evaluate", stage_evaluate, config, space, inventory, rae, recnn, datasets)


def artifact_paths(config):
    return [config.path(n) for n in (VECTORS_FILE, SENSES_FILE, RAE_FILE, RECNN_FILE,
                                     REPORT_TXT, REPORT_CSV)]
