from typing import List, Literal

from pydantic import BaseModel, Field, field_validator, model_validator

Variant = Literal["full", "lite"]


class ModelConfig(BaseModel):
    """Topology of the dual-stream extension network.

    Defaults reproduce the 48 kHz configuration. The lite variant keeps the PR
    fields for serialization but never builds or counts them.
    """

    variant: Variant = "full"
    sample_rate: int = 48000
    fft_size: int = 1536
    hop_size: int = 768
    bins: int = 769
    erb_bands: int = 128
    base_bins: int = 128
    kernel_time: int = 3

    mi_down_channels: List[int] = [128, 128, 64, 64]
    mi_up_channels: List[int] = [64, 128, 128, 769]
    mi_gru_groups: int = 4
    mi_gru_layers: int = 2

    pr_proj_channels: int = 512
    pr_proj_groups: int = 2
    pr_down_channels: List[int] = [512, 128, 128, 64, 64]
    pr_down_groups: List[int] = [2, 2, 2, 1, 1]
    pr_gru_groups: int = 2
    pr_gru_layers: int = 2
    pr_up_channels: List[int] = [128, 128, 512]
    pr_up_groups: List[int] = [1, 1, 1]

    use_bgm: bool = True
    use_interaction: bool = True
    use_up_interaction: bool = True

    @property
    def has_pr(self) -> bool:
        return self.variant == "full"

    @property
    def frame_rate(self) -> float:
        return self.sample_rate / self.hop_size

    @property
    def pr_input_channels(self) -> int:
        return 2 * self.bins

    @model_validator(mode="after")
    def check_topology(self) -> "ModelConfig":
        counts = [
            self.sample_rate,
            self.fft_size,
            self.hop_size,
            self.erb_bands,
            self.base_bins,
            self.mi_gru_groups,
            self.mi_gru_layers,
            self.pr_proj_channels,
            self.pr_proj_groups,
            self.pr_gru_groups,
            self.pr_gru_layers,
            *self.mi_down_channels,
            *self.mi_up_channels,
            *self.pr_down_channels,
            *self.pr_down_groups,
            *self.pr_up_channels,
            *self.pr_up_groups,
        ]
        if any(c <= 0 for c in counts):
            raise ValueError("all sizes, channel counts and group counts must be positive")
        if self.kernel_time != 3:
            raise ValueError("kernel_time must be 3")
        if self.fft_size % 2 or self.hop_size * 2 != self.fft_size:
            raise ValueError("fft_size must be even and hop_size must equal fft_size / 2")
        if self.bins != self.fft_size // 2 + 1:
            raise ValueError(f"bins must be fft_size / 2 + 1 = {self.fft_size // 2 + 1}")
        if self.erb_bands >= self.bins:
            raise ValueError("erb_bands must be smaller than bins")
        if (self.bins - 1) % self.base_bins:
            raise ValueError("base_bins must divide bins - 1")

        downs, ups = self.mi_down_channels, self.mi_up_channels
        if len(downs) < 2 or len(ups) != len(downs):
            raise ValueError("MI down and up paths need the same number (>= 2) of layers")
        if ups[-1] != self.bins:
            raise ValueError("last MI up layer must expand to bins")
        for i in range(len(ups) - 1):
            if ups[i] != downs[-2 - i]:
                raise ValueError(
                    f"MI up layer {i + 1} ({ups[i]}) does not match its skip "
                    f"({downs[-2 - i]} channels)"
                )
        if downs[-1] % self.mi_gru_groups:
            raise ValueError("MI bottleneck width must be divisible by mi_gru_groups")

        if self.variant == "full":
            self._check_pr()
        return self

    def _check_pr(self) -> None:
        downs, groups = self.pr_down_channels, self.pr_down_groups
        if len(groups) != len(downs) or len(self.pr_up_groups) != len(self.pr_up_channels):
            raise ValueError("PR group lists must match their channel lists")
        if len(downs) != len(self.mi_down_channels) + 1:
            raise ValueError("PR down path must have one more layer than the MI down path")
        if len(self.pr_up_channels) > len(self.mi_up_channels):
            raise ValueError("PR up path cannot be longer than the MI up path")
        proj_groups = self.pr_proj_groups
        if self.pr_input_channels % proj_groups or self.pr_proj_channels % proj_groups:
            raise ValueError("PR projection channels must be divisible by pr_proj_groups")
        c_in = self.pr_proj_channels
        for c_out, g in zip(downs, groups):
            if c_in % g or c_out % g:
                raise ValueError(f"PR down layer {c_in}->{c_out} not divisible by {g} groups")
            c_in = c_out
        for c_out, g in zip(self.pr_up_channels, self.pr_up_groups):
            if c_in % g or c_out % g:
                raise ValueError(f"PR up layer {c_in}->{c_out} not divisible by {g} groups")
            c_in = c_out
        if downs[-1] % self.pr_gru_groups:
            raise ValueError("PR bottleneck width must be divisible by pr_gru_groups")
        if self.use_interaction:
            for i in range(1, len(downs)):
                if downs[i] != self.mi_down_channels[i - 1]:
                    raise ValueError(
                        f"PR down layer {i + 1} ({downs[i]}) cannot interact with MI down "
                        f"layer {i} ({self.mi_down_channels[i - 1]})"
                    )
            if self.use_up_interaction:
                for j in range(len(self.pr_up_channels) - 1):
                    if self.pr_up_channels[j] != self.mi_up_channels[j + 1]:
                        raise ValueError(
                            f"PR up layer {j + 1} ({self.pr_up_channels[j]}) cannot interact "
                            f"with MI up layer {j + 2} ({self.mi_up_channels[j + 1]})"
                        )

    def as_variant(self, variant: Variant) -> "ModelConfig":
        return self.model_copy(update={"variant": variant})


class MultiResConfig(BaseModel):
    """Resolutions of the multi-resolution STFT loss."""

    fft_sizes: List[int] = [512, 1024, 2048]
    hops: List[int] = [50, 120, 240]
    win_lengths: List[int] = [240, 600, 1200]

    @model_validator(mode="after")
    def check_lengths(self) -> "MultiResConfig":
        if not (len(self.fft_sizes) == len(self.hops) == len(self.win_lengths)):
            raise ValueError("fft_sizes, hops and win_lengths must have equal lengths")
        for fft, hop, win in zip(self.fft_sizes, self.hops, self.win_lengths):
            if min(fft, hop, win) <= 0 or win > fft:
                raise ValueError(f"invalid resolution fft={fft} hop={hop} win={win}")
        return self


class LossWeights(BaseModel):
    """Weights of the generator objective terms."""

    lambda_wav: float = Field(100.0, ge=0)
    lambda_stft: float = Field(0.5, ge=0)
    lambda_feat: float = Field(10.0, ge=0)


class ScheduleEntry(BaseModel):
    """One segment of a bandwidth schedule, active from ``start`` seconds."""

    start: float = Field(ge=0)
    cutoff: float = Field(gt=0)

    @field_validator("cutoff")
    @classmethod
    def check_cutoff(cls, value: float) -> float:
        if value > 24000:
            raise ValueError("cutoff must not exceed 24000 Hz")
        return value


class ComplexityReport(BaseModel):
    """Analytical parameter and MAC counts."""

    variant: Variant
    params: int
    macs_per_frame: int
    frame_rate: float
    macs_per_second: float

    @property
    def params_millions(self) -> float:
        return self.params / 1e6

    @property
    def gmacs_per_second(self) -> float:
        return self.macs_per_second / 1e9


class BenchReport(BaseModel):
    """Benchmark results."""

    variant: Variant
    params: int
    macs_per_second: float
    audio_seconds: float
    elapsed_seconds: float
    rtf: float
