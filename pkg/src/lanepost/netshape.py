"""Shape and receptive-field arithmetic for strided encoder/decoder stacks.

Covers plain convolutions with valid padding and transposed convolutions,
which is all the lane segmentation network uses. Useful for checking that a
proposed layer stack reproduces target feature-map sizes before anyone
trains anything.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

__all__ = ["LayerSpec", "TensorShape", "propagate_shapes", "receptive_field"]

CONV = "conv"
CONV_TRANSPOSE = "conv_transpose"


class TensorShape(NamedTuple):
    height: int
    width: int
    channels: int


@dataclass(frozen=True)
class LayerSpec:
    """One layer of the stack.

    output_padding applies to transposed convolutions only and may be a
    single int or an (extra_rows, extra_cols) pair; each entry must be
    smaller than the stride. It exists because (in - 1)*s + k cannot hit
    every target size: with s=2, k=3 an even output dimension needs one
    extra row/column.
    """

    kind: str
    kernel: int
    stride: int
    out_channels: int
    padding: str = "valid"
    output_padding: int | tuple[int, int] = 0

    def __post_init__(self):
        if self.kind not in (CONV, CONV_TRANSPOSE):
            raise ValueError(f"unknown layer kind {self.kind!r}")
        if self.kernel < 1 or self.stride < 1:
            raise ValueError("kernel and stride must be >= 1")
        if self.out_channels < 1:
            raise ValueError("out_channels must be >= 1")
        if self.padding != "valid":
            raise ValueError(f"only valid padding is supported, got {self.padding!r}")
        oph, opw = self.output_padding_pair
        if self.kind == CONV and (oph or opw):
            raise ValueError("output_padding applies to transposed convolutions only")
        if not (0 <= oph < self.stride and 0 <= opw < self.stride):
            raise ValueError("output_padding entries must lie in [0, stride)")

    @property
    def output_padding_pair(self) -> tuple[int, int]:
        if isinstance(self.output_padding, tuple):
            return self.output_padding
        return (self.output_padding, self.output_padding)


def _conv_out(size: int, kernel: int, stride: int) -> int:
    return (size - kernel) // stride + 1


def _tconv_out(size: int, kernel: int, stride: int, extra: int) -> int:
    return (size - 1) * stride + kernel + extra


def propagate_shapes(layers, input_shape: TensorShape) -> list[TensorShape]:
    """Output shape after each layer, in order.

    Convolution: out = floor((in - k)/s) + 1 per spatial dim.
    Transposed convolution: out = (in - 1)*s + k + output_padding.
    Raises ValueError if any intermediate dimension falls below 1.
    """
    layers = list(layers)
    if not layers:
        raise ValueError("layer list is empty")
    h, w, _ = TensorShape(*input_shape)
    if h < 1 or w < 1:
        raise ValueError(f"input shape must be at least 1x1, got {h}x{w}")
    shapes = []
    for i, layer in enumerate(layers):
        if layer.kind == CONV:
            h = _conv_out(h, layer.kernel, layer.stride)
            w = _conv_out(w, layer.kernel, layer.stride)
        else:
            oph, opw = layer.output_padding_pair
            h = _tconv_out(h, layer.kernel, layer.stride, oph)
            w = _tconv_out(w, layer.kernel, layer.stride, opw)
        if h < 1 or w < 1:
            raise ValueError(f"layer {i} collapses the feature map to {h}x{w}")
        shapes.append(TensorShape(h, w, layer.out_channels))
    return shapes


def receptive_field(layers) -> int:
    """Input-pixel extent seen by one unit after a stack of convolutions.

    Standard recurrence: r_0 = 1, j_0 = 1, then per layer
    r_n = r_{n-1} + (k - 1) * j_{n-1} and j_n = j_{n-1} * s.
    """
    layers = list(layers)
    if not layers:
        raise ValueError("layer list is empty")
    r, j = 1, 1
    for layer in layers:
        if layer.kind != CONV:
            raise ValueError("receptive field is defined for convolution stacks only")
        r += (layer.kernel - 1) * j
        j *= layer.stride
    return r
