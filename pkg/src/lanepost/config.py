"""Pipeline configuration and its flat key-value file format.

The on-disk format is one `dotted.key=value` per line (diff-friendly, no
schema dependency), e.g. `cluster.eta=20.0`. Quads are four `x,y` pairs
separated by spaces in TL TR BR BL order. Floats are written with repr()
so a serialize/parse round trip reproduces the exact value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CalibrationError, ConfigError
from .homography import QuadCorrespondence

__all__ = ["PipelineConfig", "default_config", "parse_config", "format_config", "load_config", "save_config"]


def _default_calibration() -> QuadCorrespondence:
    # road trapezoid for 360x480 dashcam framing -> 480-tall BEV strip
    return QuadCorrespondence(
        src=((100, 200), (380, 200), (460, 360), (20, 360)),
        dst=((120, 0), (360, 0), (360, 480), (120, 480)),
    )


@dataclass(frozen=True)
class PipelineConfig:
    crop_top: int = 0
    crop_bottom: int = 0
    crop_left: int = 0
    crop_right: int = 0
    target_rows: int = 360
    target_cols: int = 480
    mask_threshold: int = 127
    connectivity: int = 8
    min_instance_size: int = 15
    calibration: QuadCorrespondence = field(default_factory=_default_calibration)
    eta: float = 20.0
    sample_count: int = 50
    loss_alpha: float = 1e-2
    loss_epsilon: float = 1e-5

    def __post_init__(self):
        if min(self.crop_top, self.crop_bottom, self.crop_left, self.crop_right) < 0:
            raise ConfigError("crop margins must be non-negative")
        if self.target_rows < 1 or self.target_cols < 1:
            raise ConfigError("target size must be at least 1x1")
        if not 0 <= self.mask_threshold <= 255:
            raise ConfigError(f"mask threshold must be in 0..255, got {self.mask_threshold}")
        if self.connectivity not in (4, 8):
            raise ConfigError(f"connectivity must be 4 or 8, got {self.connectivity}")
        if self.min_instance_size < 0:
            raise ConfigError("min instance size must be non-negative")
        if not self.eta > 0:
            raise ConfigError(f"eta must be positive, got {self.eta}")
        if self.sample_count < 2:
            raise ConfigError(f"sample count must be at least 2, got {self.sample_count}")
        if not (self.loss_alpha > 0 and self.loss_epsilon > 0):
            raise ConfigError("loss alpha and epsilon must be positive")


def default_config() -> PipelineConfig:
    return PipelineConfig()


def _format_quad(quad) -> str:
    return " ".join(f"{x!r},{y!r}" for x, y in quad)


def _parse_quad(value: str, key: str):
    pairs = value.split()
    if len(pairs) != 4:
        raise ConfigError(f"{key}: expected 4 x,y pairs, got {len(pairs)}")
    points = []
    for pair in pairs:
        parts = pair.split(",")
        if len(parts) != 2:
            raise ConfigError(f"{key}: bad point {pair!r}")
        try:
            points.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise ConfigError(f"{key}: bad point {pair!r}") from None
    return tuple(points)


_INT_KEYS = {
    "crop.top": "crop_top",
    "crop.bottom": "crop_bottom",
    "crop.left": "crop_left",
    "crop.right": "crop_right",
    "resize.rows": "target_rows",
    "resize.cols": "target_cols",
    "mask.threshold": "mask_threshold",
    "instances.connectivity": "connectivity",
    "instances.min_size": "min_instance_size",
    "curve.samples": "sample_count",
}

_FLOAT_KEYS = {
    "cluster.eta": "eta",
    "loss.alpha": "loss_alpha",
    "loss.epsilon": "loss_epsilon",
}


def format_config(cfg: PipelineConfig) -> str:
    lines = [
        f"crop.top={cfg.crop_top}",
        f"crop.bottom={cfg.crop_bottom}",
        f"crop.left={cfg.crop_left}",
        f"crop.right={cfg.crop_right}",
        f"resize.rows={cfg.target_rows}",
        f"resize.cols={cfg.target_cols}",
        f"mask.threshold={cfg.mask_threshold}",
        f"instances.connectivity={cfg.connectivity}",
        f"instances.min_size={cfg.min_instance_size}",
        f"calibration.src={_format_quad(cfg.calibration.src)}",
        f"calibration.dst={_format_quad(cfg.calibration.dst)}",
        f"cluster.eta={cfg.eta!r}",
        f"curve.samples={cfg.sample_count}",
        f"loss.alpha={cfg.loss_alpha!r}",
        f"loss.epsilon={cfg.loss_epsilon!r}",
    ]
    return "\n".join(lines) + "\n"


def parse_config(text: str) -> PipelineConfig:
    """Parse the key-value format, starting from defaults. Unknown keys and
    malformed values raise ConfigError."""
    fields = {}
    src = dst = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if key in _INT_KEYS:
            try:
                fields[_INT_KEYS[key]] = int(value)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} needs an integer, got {value!r}") from None
        elif key in _FLOAT_KEYS:
            try:
                fields[_FLOAT_KEYS[key]] = float(value)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} needs a number, got {value!r}") from None
        elif key == "calibration.src":
            src = _parse_quad(value, key)
        elif key == "calibration.dst":
            dst = _parse_quad(value, key)
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    if (src is None) != (dst is None):
        raise ConfigError("calibration.src and calibration.dst must be given together")
    if src is not None:
        try:
            fields["calibration"] = QuadCorrespondence(src, dst)
        except CalibrationError as exc:
            raise ConfigError(f"bad calibration: {exc}") from exc
    return PipelineConfig(**fields)


def load_config(path) -> PipelineConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def save_config(cfg: PipelineConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_config(cfg))
