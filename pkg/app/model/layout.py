"""Layer plan of the network.

build_layer_specs(config) lists every per-frame stage in execution order.
Learned layers also declare their tensors, so the weight layout, the graph
and the complexity counter are all derived from this one plan.
"""

import math
from dataclasses import dataclass

from app.core.schemas import ModelConfig

Shape = tuple[int, ...]


@dataclass(frozen=True)
class LayerSpec:
    name: str

    def tensors(self) -> list[tuple[str, Shape]]:
        return []

    @property
    def params(self) -> int:
        return sum(math.prod(shape) for _, shape in self.tensors())

    @property
    def macs(self) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class ConvSpec(LayerSpec):
    in_channels: int
    out_channels: int
    groups: int = 1
    kernel: int = 3

    def tensors(self):
        in_per_group = self.in_channels // self.groups
        return [
            (f"{self.name}.weight", (self.out_channels, in_per_group, self.kernel)),
            (f"{self.name}.bias", (self.out_channels,)),
        ]

    @property
    def macs(self) -> int:
        return self.out_channels * (self.in_channels // self.groups) * self.kernel


@dataclass(frozen=True)
class ActivationSpec(LayerSpec):
    """PReLU following the conv of the same name."""

    channels: int

    def tensors(self):
        return [(f"{self.name}.prelu", (self.channels,))]

    @property
    def macs(self) -> int:
        return self.channels


@dataclass(frozen=True)
class GruSpec(LayerSpec):
    channels: int
    groups: int

    def tensors(self):
        g, h = self.groups, self.channels // self.groups
        return [
            (f"{self.name}.w_ih", (g, 3 * h, h)),
            (f"{self.name}.w_hh", (g, 3 * h, h)),
            (f"{self.name}.bias", (g, 3 * h)),
        ]

    @property
    def macs(self) -> int:
        h = self.channels // self.groups
        return self.groups * 3 * (h * h + h * h)


@dataclass(frozen=True)
class FcSpec(LayerSpec):
    in_features: int
    out_features: int

    def tensors(self):
        return [
            (f"{self.name}.weight", (self.out_features, self.in_features)),
            (f"{self.name}.bias", (self.out_features,)),
        ]

    @property
    def macs(self) -> int:
        return self.in_features * self.out_features


@dataclass(frozen=True)
class GateSpec(LayerSpec):
    """Band-guided mask: two per-bin affine gates, their product and the masking."""

    bins: int

    def tensors(self):
        return [
            (f"{self.name}.{part}", (self.bins,))
            for part in ("lr_scale", "lr_shift", "up_scale", "up_shift")
        ]

    @property
    def macs(self) -> int:
        return 4 * self.bins


@dataclass(frozen=True)
class InteractionSpec(LayerSpec):
    channels: int

    def tensors(self):
        return [
            (f"{self.name}.weight", (self.channels, self.channels)),
            (f"{self.name}.bias", (self.channels,)),
        ]

    @property
    def macs(self) -> int:
        return self.channels * self.channels + self.channels


@dataclass(frozen=True)
class FixedSpec(LayerSpec):
    """Stage without learned parameters (FFT, windowing, ERB projection)."""

    fixed_macs: int

    @property
    def macs(self) -> int:
        return self.fixed_macs


def fft_macs(n: int) -> int:
    return math.ceil(n * math.log2(n))


def conv_with_activation(name: str, c_in: int, c_out: int, groups: int = 1) -> list[LayerSpec]:
    return [ConvSpec(name, c_in, c_out, groups), ActivationSpec(name, c_out)]


def build_layer_specs(config: ModelConfig) -> list[LayerSpec]:
    """
    Enumerate every per-frame stage of the configured network.

    Args:
        config: Model topology

    Returns:
        Layer specs in execution order
    """
    n, bins = config.fft_size, config.bins
    specs: list[LayerSpec] = [
        FixedSpec("analysis.window", n),
        FixedSpec("analysis.fft", fft_macs(n)),
        FixedSpec("analysis.polar", 2 * bins),
        FixedSpec("mi.erb", config.erb_bands * bins),
    ]

    c_in = config.erb_bands
    for i, c_out in enumerate(config.mi_down_channels, start=1):
        specs += conv_with_activation(f"mi.down{i}", c_in, c_out)
        c_in = c_out
    for i in range(1, config.mi_gru_layers + 1):
        specs.append(GruSpec(f"mi.gru{i}", c_in, config.mi_gru_groups))
    for i, c_out in enumerate(config.mi_up_channels, start=1):
        specs += conv_with_activation(f"mi.up{i}", c_in, c_out)
        c_in = c_out
    if config.use_bgm:
        specs.append(GateSpec("mi.bgm", bins))

    if config.has_pr:
        specs += _pr_specs(config)

    specs += [
        FixedSpec("synthesis.polar", 2 * bins),
        FixedSpec("synthesis.ifft", fft_macs(n)),
        FixedSpec("synthesis.window", n),
    ]
    return specs


def _pr_specs(config: ModelConfig) -> list[LayerSpec]:
    specs = conv_with_activation(
        "pr.proj", config.pr_input_channels, config.pr_proj_channels, config.pr_proj_groups
    )
    c_in = config.pr_proj_channels
    downs = zip(config.pr_down_channels, config.pr_down_groups)
    for i, (c_out, groups) in enumerate(downs, start=1):
        specs += conv_with_activation(f"pr.down{i}", c_in, c_out, groups)
        if config.use_interaction and i >= 2:
            specs.append(InteractionSpec(f"pr.inter{i}", c_out))
        c_in = c_out
    for i in range(1, config.pr_gru_layers + 1):
        specs.append(GruSpec(f"pr.gru{i}", c_in, config.pr_gru_groups))
    n_up = len(config.pr_up_channels)
    for j, (c_out, groups) in enumerate(zip(config.pr_up_channels, config.pr_up_groups), start=1):
        specs += conv_with_activation(f"pr.up{j}", c_in, c_out, groups)
        if config.use_interaction and config.use_up_interaction and j < n_up:
            specs.append(InteractionSpec(f"pr.up_inter{j}", c_out))
        c_in = c_out
    specs += [
        FcSpec("pr.head_real", c_in, config.bins),
        FcSpec("pr.head_imag", c_in, config.bins),
    ]
    return specs


def tensor_layout(config: ModelConfig) -> list[tuple[str, Shape]]:
    """Every (name, shape) the config requires, in canonical order."""
    return [tensor for spec in build_layer_specs(config) for tensor in spec.tensors()]
