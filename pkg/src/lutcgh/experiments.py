"""Deterministic Monte-Carlo sweeps of reconstruction error against LUT length.

Every cell ``(image, n_lut, run)`` gets its own seed from :func:`derive_seed`,
so results do not depend on execution order or worker count.
"""

import csv
import hashlib
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .cgh import BINARY_PHASE, TargetSpec, embed_target, ospr_generate, reconstruct_average
from .images import SYNTHETIC_PREFIX, load_target
from .metrics import INDEPENDENT, ErrorRecord, NmseCalibration, aggregate, mse, nmse
from .random_phase import IndependentSource, make_source, next_prime_above, primes_up_to

CSV_HEADER = ["image_id", "resolution_x", "resolution_y", "n_sf", "n_lut", "run_index", "seed", "mse", "nmse"]


class ConfigError(ValueError):
    def __init__(self, message, line=None, path=None):
        where = f"{path or '<config>'}:{line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


class CellError(RuntimeError):
    """A sweep cell failed; the message names the cell."""


def default_lut_lengths(n_x, n_y, ceiling=2000):
    """0 (flat), every prime up to ``ceiling``, and the probes ``N_x``,
    ``N_x * N_y`` and the first prime above 10000."""
    lengths = {0, *primes_up_to(ceiling), n_x, n_x * n_y, next_prime_above(10000)}
    return sorted(lengths)


@dataclass
class SweepConfig:
    images: list
    resolution: tuple = (64, 64)
    n_sf: int = 24
    runs: int = 100
    lut_lengths: list = None
    base_seed: int = 0
    include_independent_baseline: bool = True
    nmse_reference: int = 1000
    nmse_reference_image: str = "Mandrill"
    placement: str = "upper"
    workers: int = 1

    def __post_init__(self):
        self.images = [(str(i), str(p)) for i, p in self.images]
        if not self.images:
            raise ConfigError("at least one image is required")
        ids = [i for i, _ in self.images]
        if len(set(ids)) != len(ids) or not all(ids):
            raise ConfigError("image ids must be unique and non-empty")
        self.resolution = tuple(int(v) for v in self.resolution)
        if len(self.resolution) != 2 or min(self.resolution) < 1:
            raise ConfigError(f"resolution must be two positive counts, got {self.resolution}")
        if self.lut_lengths is None:
            self.lut_lengths = default_lut_lengths(*self.resolution)
        self.lut_lengths = sorted({int(n) for n in self.lut_lengths})
        if not self.lut_lengths or self.lut_lengths[0] < 0:
            raise ConfigError("lut_lengths must be a non-empty list of counts >= 0")
        if self.runs < 1 or self.n_sf < 1:
            raise ConfigError("runs and n_sf must be >= 1")
        if self.nmse_reference < 0:
            raise ConfigError("nmse_reference must be >= 0")

    @property
    def reference_image(self):
        """Calibration anchor: the configured image if present, else the first listed."""
        ids = [i for i, _ in self.images]
        return self.nmse_reference_image if self.nmse_reference_image in ids else ids[0]

    def image_path(self, image_id):
        return dict(self.images)[image_id]

    @classmethod
    def from_file(cls, path):
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        return cls.from_text(text, base_dir=path.parent, source=str(path))

    @classmethod
    def from_text(cls, text, base_dir=".", source=None):
        kwargs = {}
        ceiling, specials = None, []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno, source)
            key, value = (s.strip() for s in line.split("=", 1))
            try:
                if key == "images":
                    kwargs["images"] = [_parse_image(item, base_dir) for item in _split(value)]
                elif key == "resolution":
                    kwargs["resolution"] = parse_resolution(value)
                elif key in ("n_sf", "runs", "base_seed", "nmse_reference", "workers"):
                    kwargs[key] = int(value)
                elif key == "lut_lengths":
                    kwargs["lut_lengths"] = [int(v) for v in _split(value)]
                elif key == "prime_ceiling":
                    ceiling = int(value)
                elif key == "lut_specials":
                    specials = [int(v) for v in _split(value)]
                elif key == "include_independent_baseline":
                    kwargs[key] = _parse_bool(value)
                elif key in ("nmse_reference_image", "placement"):
                    kwargs[key] = value
                else:
                    raise ConfigError(f"unknown key {key!r}", lineno, source)
            except ConfigError as exc:
                if exc.line is None:
                    raise ConfigError(str(exc), lineno, source) from None
                raise
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {exc}", lineno, source) from None
        if "images" not in kwargs:
            raise ConfigError("missing required key 'images'", None, source)
        if ceiling is not None or specials:
            base = kwargs.get("lut_lengths") or [0, *primes_up_to(ceiling or 0)]
            kwargs["lut_lengths"] = [*base, *specials]
        try:
            return cls(**kwargs)
        except ConfigError as exc:
            raise ConfigError(str(exc), None, source) from None


def _split(value):
    return [v.strip() for v in value.split(",") if v.strip()]


def _parse_bool(value):
    v = value.lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _parse_image(item, base_dir):
    if "=" not in item:
        raise ValueError(f"image entries are 'id=path', got {item!r}")
    image_id, path = (s.strip() for s in item.split("=", 1))
    if not image_id or not path:
        raise ValueError(f"image entries are 'id=path', got {item!r}")
    if not path.startswith(SYNTHETIC_PREFIX) and not os.path.isabs(path):
        path = os.path.join(str(base_dir), path)
    return image_id, path


def parse_resolution(value):
    """``"256x128"`` -> ``(256, 128)``."""
    parts = str(value).lower().split("x")
    if len(parts) != 2:
        raise ValueError(f"resolution must look like WxH, got {value!r}")
    w, h = int(parts[0]), int(parts[1])
    if w < 1 or h < 1:
        raise ValueError(f"resolution must be positive, got {value!r}")
    return w, h


def derive_seed(base_seed, image_id, n_lut, run_index):
    """64-bit seed from BLAKE2b-8 of ``"base|image|n_lut|run"`` (little-endian)."""
    key = f"{int(base_seed)}|{image_id}|{int(n_lut)}|{int(run_index)}".encode("utf-8")
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


@dataclass
class SweepResult:
    records: list
    aggregates: dict = field(default_factory=dict)
    baseline: dict = field(default_factory=dict)
    calibration: NmseCalibration = None


@lru_cache(maxsize=32)
def _target_spec(path, n_x, n_y, placement):
    rows = max(n_y // 2, 1) if placement == "upper" else n_y
    image = load_target(path, n_x, rows)
    return TargetSpec(image, n_x, n_y, placement)


def target_for(config, image_id):
    """The TargetSpec used for ``image_id``: the image resampled to fill the placement."""
    n_x, n_y = config.resolution
    return _target_spec(config.image_path(image_id), n_x, n_y, config.placement)


def source_for(n_lut, seed):
    if n_lut == INDEPENDENT:
        return IndependentSource(seed)
    return make_source(int(n_lut), seed)


def run_cell(config, image_id, n_lut, run_index):
    """Generate one OSPR frame set and measure its time-averaged error."""
    seed = derive_seed(config.base_seed, image_id, n_lut, run_index)
    try:
        spec = target_for(config, image_id)
    except OSError as exc:
        raise OSError(f"{config.image_path(image_id)}: {exc.strerror or exc}") from exc
    frames = ospr_generate(spec, config.n_sf, source_for(n_lut, seed), BINARY_PHASE)
    recon = reconstruct_average(frames)
    value = mse(recon, embed_target(spec), spec.region())
    return ErrorRecord(image_id, int(n_lut), int(run_index), config.n_sf, config.resolution, value, seed)


def _cell_job(args):
    config, image_id, n_lut, run_index = args
    try:
        return run_cell(config, image_id, n_lut, run_index)
    except OSError:
        raise
    except Exception as exc:
        raise CellError(f"cell (image={image_id}, n_lut={n_lut}, run={run_index}) failed: {exc}") from exc


def _run_cells(config, cells, workers):
    jobs = [(config, i, n, r) for i, n, r in cells]
    if workers <= 1 or len(jobs) < 2:
        return [_cell_job(j) for j in jobs]
    chunk = max(1, len(jobs) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_cell_job, jobs, chunksize=chunk))


def run_sweep(config, workers=None):
    """Run every (image, n_lut, run) cell plus baseline and calibration cells.

    ``workers`` defaults to ``config.workers``; ``0`` means one per CPU.
    """
    workers = config.workers if workers is None else workers
    if workers == 0:
        workers = os.cpu_count() or 1

    ids = [i for i, _ in config.images]
    lengths = list(config.lut_lengths)
    if config.include_independent_baseline:
        lengths = [INDEPENDENT, *lengths]
    cells = [(i, n, r) for i in ids for n in lengths for r in range(config.runs)]
    extra = []
    if config.nmse_reference not in config.lut_lengths:
        extra = [(i, config.nmse_reference, r) for i in ids for r in range(config.runs)]

    done = _run_cells(config, cells + extra, workers)
    records = sorted(done[: len(cells)], key=lambda rec: rec.sort_key)
    reference_records = [rec for rec in done if rec.n_lut == config.nmse_reference]

    by_image = {}
    for rec in reference_records:
        by_image.setdefault(rec.image_id, []).append(rec.mse)
    ref_means = {i: aggregate(v).mean for i, v in sorted(by_image.items())}
    calibration = None
    if all(v > 0 for v in ref_means.values()):
        calibration = NmseCalibration(ref_means, config.reference_image, config.nmse_reference)
        for rec in records:
            rec.nmse = nmse(rec, calibration)

    groups = {}
    for rec in records:
        groups.setdefault((rec.image_id, rec.n_lut), []).append(rec.mse)
    aggregates = {key: aggregate(v) for key, v in groups.items()}
    baseline = {i: aggregates[(i, INDEPENDENT)].mean for i in ids if (i, INDEPENDENT) in aggregates}
    return SweepResult(records, aggregates, baseline, calibration)


def _fmt(x):
    return "" if x is None else format(float(x), ".17g")


def emit_csv(result, path):
    """Write records sorted by (image_id, n_lut, run_index); n_lut -1 is the independent baseline."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rec in sorted(result.records, key=lambda r: r.sort_key):
            writer.writerow([
                rec.image_id, rec.resolution[0], rec.resolution[1], rec.n_sf, rec.n_lut,
                rec.run_index, rec.seed, _fmt(rec.mse), _fmt(rec.nmse),
            ])


def read_csv(path):
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        for lineno, row in enumerate(reader, start=2):
            try:
                image_id, rx, ry, n_sf, n_lut, run, seed, m, nm = row
                records.append(ErrorRecord(
                    image_id, int(n_lut), int(run), int(n_sf), (int(rx), int(ry)), float(m), int(seed),
                    float(nm) if nm else None,
                ))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad row ({exc})") from None
    return records


def emit_table(result, path, use_nmse=True):
    """Gnuplot data file: one block per image of ``n_lut mean mean-2sd mean+2sd``,
    blocks separated by two blank lines so ``index`` selects an image."""
    groups = {}
    for rec in sorted(result.records, key=lambda r: r.sort_key):
        value = rec.nmse if use_nmse and rec.nmse is not None else rec.mse
        groups.setdefault(rec.image_id, {}).setdefault(rec.n_lut, []).append(value)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        blocks = []
        for image_id, per_lut in groups.items():
            lines = [f"# {image_id}", "# n_lut mean lower upper"]
            for n_lut, values in per_lut.items():
                agg = aggregate(values)
                if len(values) == 1:
                    agg = type(agg)(agg.mean, 0.0, agg.mean, agg.mean, 1)
                lines.append(f"{n_lut} {_fmt(agg.mean)} {_fmt(agg.lower)} {_fmt(agg.upper)}")
            blocks.append("\n".join(lines))
        fh.write("\n\n\n".join(blocks) + ("\n" if blocks else ""))


def summarise(result):
    """Per image: (min mean, n_lut at min, max mean, n_lut at max), using NMSE when calibrated."""
    out = {}
    for (image_id, n_lut), agg in sorted(result.aggregates.items()):
        if n_lut == INDEPENDENT:
            continue
        scale = result.calibration.ratio(image_id) if result.calibration else 1.0
        value = agg.mean * scale
        lo, lo_n, hi, hi_n = out.get(image_id, (float("inf"), None, float("-inf"), None))
        if value < lo:
            lo, lo_n = value, n_lut
        if value > hi:
            hi, hi_n = value, n_lut
        out[image_id] = (lo, lo_n, hi, hi_n)
    return out
