"""Config-driven experiment grids with resumable execution.

A run walks the full cross product of (pair, condition, preprocessing,
dictionary size, self-learning, seed), trains or loads the spaces each point
needs, computes the requested metrics and appends one CSV row per metric to
``records.csv`` in the output directory.  Every completed point is recorded
in ``manifest.json`` under a hash of everything that determines its result,
so re-running the same config skips straight past finished work and leaves
the CSV byte-identical.  Failures are logged per grid point and do not stop
the run.

The config file is flat ``key = value`` text with dotted keys; values are
whitespace-separated lists.  Repeating a key extends its list (used for
``pair``).  See the README for the full key reference.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

from . import align as align_mod
from . import bli as bli_mod
from . import isometry
from .corpus import shuffle_sample
from .dictionaries import read_dictionary
from .preprocess import apply_chain, chain_label, parse_chain
from .results import make_record, write_records
from .sgns import TrainConfig, train
from .spaces import EmbeddingSpace, load_embeddings, save_embeddings

PathLike = Union[str, Path]

VALID_METRICS = ("mrr", "rsim", "evs", "gh")


def parse_config_text(text: str) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        value = value.split("#", 1)[0]
        tokens = value.split()
        if not tokens:
            raise ValueError(f"config line {lineno}: empty value for {key.strip()!r}")
        out.setdefault(key.strip(), []).extend(tokens)
    return out


@dataclass
class ExperimentConfig:
    values: dict
    base_dir: Path = field(default_factory=Path.cwd)

    @classmethod
    def from_file(cls, path: PathLike) -> "ExperimentConfig":
        path = Path(path)
        return cls(parse_config_text(path.read_text(encoding="utf-8")),
                   base_dir=path.parent)

    # -- typed accessors -------------------------------------------------

    def get_list(self, key: str, default: Optional[list] = None) -> list[str]:
        if key in self.values:
            return list(self.values[key])
        if default is not None:
            return list(default)
        raise KeyError(f"missing config key {key!r}")

    def get(self, key: str, default=None) -> str:
        if key in self.values:
            return self.values[key][-1]
        if default is None:
            raise KeyError(f"missing config key {key!r}")
        return default

    def get_int(self, key: str, default=None) -> int:
        return int(float(self.get(key, str(default))))

    def get_float(self, key: str, default=None) -> float:
        return float(self.get(key, str(default)))

    def get_bool(self, key: str, default: bool) -> bool:
        raw = self.get(key, "on" if default else "off").lower()
        if raw in ("on", "true", "1", "yes"):
            return True
        if raw in ("off", "false", "0", "no"):
            return False
        raise ValueError(f"config key {key!r}: expected on/off, got {raw!r}")

    def path(self, raw: str) -> Path:
        p = Path(raw)
        return p if p.is_absolute() else self.base_dir / p

    # -- semantic accessors ----------------------------------------------

    def pairs(self) -> list[tuple[str, Path, Path]]:
        out = []
        for token in self.get_list("pair"):
            parts = token.split(":")
            if len(parts) != 3:
                raise ValueError(
                    f"pair {token!r} must be name:source_path:target_corpus"
                )
            out.append((parts[0], self.path(parts[1]), self.path(parts[2])))
        return out

    def grid_kind(self) -> str:
        kind = self.get("grid.kind")
        if kind not in ("size", "updates"):
            raise ValueError(f"grid.kind must be size or updates, got {kind!r}")
        return kind

    def grid_values(self) -> list[int]:
        key = "grid.sizes" if self.grid_kind() == "size" else "grid.budgets"
        vals = [int(float(v)) for v in self.get_list(key)]
        if not vals:
            raise ValueError(f"{key} is empty")
        return vals

    def seeds(self) -> list[int]:
        return [int(v) for v in self.get_list("seeds", ["1"])]

    def preprocs(self) -> list[str]:
        return self.get_list("preproc", ["l2+mc+l2"])

    def selflearn_modes(self) -> list[str]:
        modes = self.get_list("selflearn", ["off"])
        for m in modes:
            if m not in ("on", "off"):
                raise ValueError(f"selflearn entries must be on/off, got {m!r}")
        return modes

    def dict_sizes(self) -> list[int]:
        return [int(v) for v in self.get_list("dict.sizes", ["0"])]

    def metrics(self) -> list[str]:
        metrics = self.get_list("metrics", ["mrr", "rsim"])
        for m in metrics:
            if m not in VALID_METRICS:
                raise ValueError(f"unknown metric {m!r}")
        return metrics

    def train_config(self, seed: int) -> TrainConfig:
        return TrainConfig(
            dim=self.get_int("train.dim", 300),
            window=self.get_int("train.window", 5),
            negatives=self.get_int("train.negatives", 15),
            learning_rate=self.get_float("train.lr", 0.025),
            epochs=self.get_int("train.epochs", 15),
            min_count=self.get_int("train.min_count", 5),
            subsample_t=self.get_float("train.subsample", 1e-4),
            subwords=self.get_bool("train.subwords", True),
            n_min=self.get_int("train.nmin", 3),
            n_max=self.get_int("train.nmax", 6),
            buckets=self.get_int("train.buckets", 2_000_000),
            seed=seed,
        )

    def validate(self) -> None:
        problems: list[str] = []
        try:
            self.get("output.dir")
        except KeyError:
            problems.append("output.dir is required")
        try:
            pairs = self.pairs()
            if not pairs:
                problems.append("at least one pair is required")
            for name, src, tgt in pairs:
                if not src.exists():
                    problems.append(f"pair {name}: source {src} does not exist")
                if not tgt.exists():
                    problems.append(f"pair {name}: target corpus {tgt} does not exist")
        except (KeyError, ValueError) as exc:
            problems.append(str(exc))
        try:
            self.grid_values()
        except (KeyError, ValueError) as exc:
            problems.append(str(exc))
        try:
            metrics = self.metrics()
            if "mrr" in metrics and "dict.seed" not in self.values:
                problems.append("metric mrr requires dict.seed")
            if ("mrr" in metrics or "rsim" in metrics) and "dict.test" not in self.values:
                problems.append("metrics mrr/rsim require dict.test")
        except ValueError as exc:
            problems.append(str(exc))
        for key in ("dict.seed", "dict.test"):
            if key in self.values and not self.path(self.get(key)).exists():
                problems.append(f"{key} path {self.get(key)} does not exist")
        for chain in self.preprocs():
            try:
                parse_chain(chain)
            except ValueError as exc:
                problems.append(str(exc))
        try:
            self.selflearn_modes()
        except ValueError as exc:
            problems.append(str(exc))
        if problems:
            raise ValueError("invalid experiment config:\n  " + "\n  ".join(problems))


@dataclass
class RunSummary:
    records_path: Path
    done: int = 0
    skipped: int = 0
    failed: int = 0
    failures: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 2 if self.failed else 0


class _SpaceStore:
    """Trains target/source spaces on demand and caches them as .vec files."""

    def __init__(self, config: ExperimentConfig, out_dir: Path, log):
        self.config = config
        self.dir = out_dir / "spaces"
        self.dir.mkdir(parents=True, exist_ok=True)
        self.log = log
        self._mem: dict[str, EmbeddingSpace] = {}

    def _cached(self, name: str) -> Optional[EmbeddingSpace]:
        if name in self._mem:
            return self._mem[name]
        path = self.dir / name
        if path.exists():
            space = load_embeddings(path)
            self._mem[name] = space
            return space
        return None

    def _store(self, name: str, space: EmbeddingSpace) -> EmbeddingSpace:
        save_embeddings(space, self.dir / name)
        self._mem[name] = space
        return space

    def source(self, pair: str, src_path: Path, seed: int) -> EmbeddingSpace:
        if src_path.suffix == ".vec":
            key = f"pretrained:{src_path}"
            if key not in self._mem:
                self._mem[key] = load_embeddings(src_path)
            return self._mem[key]
        name = f"{pair}.src.s{seed}.vec"
        got = self._cached(name)
        if got is not None:
            return got
        self.log(f"training source space for {pair} (seed {seed})")
        result = train(src_path, self.config.train_config(seed))
        return self._store(name, result.final)

    def target(self, pair: str, tgt_path: Path, kind: str, value: int,
               seed: int) -> EmbeddingSpace:
        name = f"{pair}.{kind}{value}.s{seed}.vec"
        got = self._cached(name)
        if got is not None:
            return got
        if kind == "size":
            lines = [
                ln for ln in tgt_path.read_text(encoding="utf-8").splitlines()
                if ln.strip()
            ]
            sample_seed = self.config.get_int("sample.seed", 13)
            (_, sampled), = shuffle_sample(lines, [value], seed=sample_seed)
            self.log(f"training {pair} size={value} (seed {seed})")
            result = train(
                [ln.split() for ln in sampled], self.config.train_config(seed)
            )
            return self._store(name, result.final)
        # kind == "updates": one run emits every budget snapshot
        budgets = sorted(self.config.grid_values())
        self.log(f"training {pair} budgets={budgets} (seed {seed})")
        result = train(tgt_path, self.config.train_config(seed),
                       snapshot_plan=budgets)
        for snap in result.snapshots:
            self._store(f"{pair}.{kind}{snap.budget}.s{seed}.vec", snap.space)
        got = self._cached(name)
        if got is None:
            raise RuntimeError(f"training produced no snapshot for budget {value}")
        return got


def _point_key(coord: dict, config_digest: str) -> str:
    payload = json.dumps({"coord": coord, "config": config_digest}, sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def run_experiment(config: ExperimentConfig, log=None) -> RunSummary:
    log = log or (lambda msg: None)
    config.validate()
    out_dir = config.path(config.get("output.dir"))
    out_dir.mkdir(parents=True, exist_ok=True)
    records_path = out_dir / "records.csv"
    manifest_path = out_dir / "manifest.json"
    manifest: dict = {}
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    completed: dict = manifest.setdefault("completed", {})

    # everything that influences scores goes into the digest
    digest_keys = {
        k: v for k, v in sorted(config.values.items())
        if k.split(".")[0] in ("train", "iso", "bli", "dict", "sample", "selflearn")
        or k in ("grid.kind",)
    }
    config_digest = hashlib.sha256(
        json.dumps(digest_keys, sort_keys=True).encode("utf-8")
    ).hexdigest()

    store = _SpaceStore(config, out_dir, log)
    metrics = config.metrics()
    kind = config.grid_kind()
    seed_dict = (
        read_dictionary(config.path(config.get("dict.seed")))
        if "dict.seed" in config.values else None
    )
    test_dict = (
        read_dictionary(config.path(config.get("dict.test")))
        if "dict.test" in config.values else None
    )
    iso_topn = config.get_int("iso.topn", 1000)
    iso_knn = config.get_int("iso.knn", 10)
    iso_pairs = config.get_int("iso.pairs", 1000)
    cutoff = config.get_int("bli.cutoff", 10)
    sl_topf = config.get_int("selflearn.topf", 10_000)
    sl_rounds = config.get_int("selflearn.rounds", 10)

    summary = RunSummary(records_path=records_path)

    def flush_manifest():
        manifest_path.write_text(
            json.dumps(manifest, indent=1, sort_keys=True), encoding="utf-8"
        )

    for pair_name, src_path, tgt_path in config.pairs():
        for value in config.grid_values():
            for seed in config.seeds():
                for chain in config.preprocs():
                    for dict_size in config.dict_sizes():
                        for sl in config.selflearn_modes():
                            coord = {
                                "pair": pair_name, "kind": kind,
                                "value": value, "preproc": chain_label(chain),
                                "dict": dict_size, "selflearn": sl,
                                "seed": seed,
                            }
                            key = _point_key(coord, config_digest)
                            if key in completed:
                                summary.skipped += 1
                                continue
                            try:
                                rows = _measure_point(
                                    coord, store, src_path, tgt_path,
                                    seed_dict, test_dict, metrics,
                                    iso_topn, iso_knn, iso_pairs, cutoff,
                                    sl_topf, sl_rounds,
                                )
                            except Exception as exc:  # noqa: BLE001
                                summary.failed += 1
                                summary.failures.append((coord, f"{exc}"))
                                log(f"FAILED {coord}: {exc}")
                                continue
                            write_records(rows, records_path, append=True)
                            completed[key] = len(rows)
                            flush_manifest()
                            summary.done += 1
                            log(f"done {coord}")
    if summary.failures:
        (out_dir / "failures.txt").write_text(
            "".join(f"{coord}\t{msg}\n" for coord, msg in summary.failures),
            encoding="utf-8",
        )
    return summary


def _measure_point(
    coord, store, src_path, tgt_path, seed_dict, test_dict, metrics,
    iso_topn, iso_knn, iso_pairs, cutoff, sl_topf, sl_rounds,
):
    pair, kind, value, seed = coord["pair"], coord["kind"], coord["value"], coord["seed"]
    src = store.source(pair, src_path, seed)
    tgt = store.target(pair, tgt_path, kind, value, seed)
    src_pre = apply_chain(src, coord["preproc"])
    tgt_pre = apply_chain(tgt, coord["preproc"])

    rows = []

    def record(metric, score):
        rows.append(
            make_record(pair, kind, value, coord["preproc"],
                        coord["dict"] or "all", coord["selflearn"], seed,
                        metric, score)
        )

    if "mrr" in metrics:
        pairs_dict = seed_dict if coord["dict"] == 0 else seed_dict.head(coord["dict"])
        if coord["selflearn"] == "on":
            mapping = align_mod.self_learn(
                src_pre, tgt_pre, pairs_dict, top_f=sl_topf, max_rounds=sl_rounds
            )
        else:
            mapping = align_mod.procrustes(src_pre, tgt_pre, pairs_dict)
        mapped = align_mod.apply_map(src_pre, mapping)
        record("mrr", bli_mod.evaluate_mrr(mapped, tgt_pre, test_dict, cutoff).mrr)
    if "rsim" in metrics:
        record("rsim", isometry.rsim(
            src_pre, tgt_pre, test_dict, m_pairs=iso_pairs, seed=seed
        ))
    if "evs" in metrics:
        n_top = min(iso_topn, len(src_pre), len(tgt_pre))
        record("evs", isometry.evs(src_pre, tgt_pre, n_top=n_top, k=iso_knn).delta)
    if "gh" in metrics:
        n_top = min(iso_topn, len(src_pre), len(tgt_pre))
        record("gh", isometry.gh(src_pre, tgt_pre, n_top=n_top))
    return rows
