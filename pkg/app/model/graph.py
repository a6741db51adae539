"""Dual-stream extension network: magnitude inpainting (MI) and phase refinement (PR).

Every stage is written once over the last axis, so the same code runs one
frame at a time against a StreamState (streaming) or over a whole (T, F)
spectrogram with state=None (batch).
"""

import logging
from dataclasses import dataclass

import numpy as np

from app.core.errors import InvalidSignalError, ShapeMismatchError
from app.core.settings import settings
from app.core.state import StreamState
from app.core.types import ComplexSpectrogram, Waveform, wrap_phase
from app.dsp.spectral import ErbFilterBank, build_erb_bank, erb_analyze, flip_phase
from app.dsp.stft import istft, stft
from app.model.weights import ModelWeights
from app.nn.kernels import (
    ConvLayer,
    GroupedGru,
    conv_batch,
    conv_step,
    fc,
    gru_batch,
    gru_step,
    prelu,
    sigmoid,
)

logger = logging.getLogger(__name__)


@dataclass
class BandGate:
    """Per-bin affine parameters of the two gating paths."""

    lr_scale: np.ndarray
    lr_shift: np.ndarray
    up_scale: np.ndarray
    up_shift: np.ndarray


@dataclass
class InteractionGate:
    weight: np.ndarray  # (C, C)
    bias: np.ndarray  # (C,)


@dataclass
class ConvBlock:
    conv: ConvLayer
    slope: np.ndarray


@dataclass
class MiOutput:
    magnitude: np.ndarray
    gain: np.ndarray
    estimate: np.ndarray
    down_taps: list[np.ndarray]
    up_taps: list[np.ndarray]


def band_guided_mask(
    mag_lr: np.ndarray, mag_up: np.ndarray, gate: BandGate | None
) -> tuple[np.ndarray, np.ndarray]:
    """
    Gain G = sigmoid(A|X_lr| + a) * sigmoid(B|X_up| + b) and the masked estimate.

    Args:
        mag_lr: Input magnitude, (..., F)
        mag_up: Output of the last MI up layer, (..., F)
        gate: Per-bin gate parameters, or None for a unit gain

    Returns:
        (gain, gain * mag_up)
    """
    if mag_lr.shape != mag_up.shape:
        raise ShapeMismatchError(f"gate inputs differ: {mag_lr.shape} vs {mag_up.shape}")
    if gate is None:
        return np.ones_like(mag_up), mag_up
    if gate.lr_scale.shape[-1] != mag_lr.shape[-1]:
        raise ShapeMismatchError(
            f"gate has {gate.lr_scale.shape[-1]} bins, input has {mag_lr.shape[-1]}"
        )
    gain = sigmoid(gate.lr_scale * mag_lr + gate.lr_shift) * sigmoid(
        gate.up_scale * mag_up + gate.up_shift
    )
    return gain, gain * mag_up


def interaction(
    mi_feature: np.ndarray, pr_feature: np.ndarray, gate: InteractionGate
) -> np.ndarray:
    """
    Gated injection of an MI feature into the PR stream.

    m = sigmoid(W (mi + pr) + b); out = pr + m * mi

    Args:
        mi_feature: MI feature, (..., C)
        pr_feature: PR feature, (..., C)
        gate: Dense mask parameters

    Returns:
        Interacted PR feature
    """
    if mi_feature.shape != pr_feature.shape:
        raise ShapeMismatchError(
            f"interaction channels differ: {mi_feature.shape} vs {pr_feature.shape}"
        )
    mask = sigmoid(fc(gate.weight, gate.bias, mi_feature + pr_feature))
    return pr_feature + mask * mi_feature


class BaeNet:
    """Inference graph built from a validated weight set."""

    def __init__(self, weights: ModelWeights, dtype: str = settings.ENGINE_DTYPE):
        self.config = config = weights.config
        self.dtype = np.dtype(dtype)
        self.complex_dtype = np.result_type(self.dtype, np.complex64)
        t = {name: np.asarray(v, dtype=self.dtype) for name, v in weights.tensors.items()}

        bank = build_erb_bank(config.erb_bands, config.bins, config.sample_rate)
        self.erb = ErbFilterBank(bank.matrix.astype(self.dtype), bank.band_centers)

        n_down, n_up = len(config.mi_down_channels), len(config.mi_up_channels)
        self.mi_down = [self._block(t, f"mi.down{i}") for i in range(1, n_down + 1)]
        self.mi_gru = [self._gru(t, f"mi.gru{i}") for i in range(1, config.mi_gru_layers + 1)]
        self.mi_up = [self._block(t, f"mi.up{i}") for i in range(1, n_up + 1)]
        self.bgm = (
            BandGate(*(t[f"mi.bgm.{p}"] for p in ("lr_scale", "lr_shift", "up_scale", "up_shift")))
            if config.use_bgm
            else None
        )

        if config.has_pr:
            self.pr_proj = self._block(t, "pr.proj", config.pr_proj_groups)
            self.pr_down = [
                self._block(t, f"pr.down{i}", g)
                for i, g in enumerate(config.pr_down_groups, start=1)
            ]
            self.pr_gru = [self._gru(t, f"pr.gru{i}") for i in range(1, config.pr_gru_layers + 1)]
            self.pr_up = [
                self._block(t, f"pr.up{j}", g) for j, g in enumerate(config.pr_up_groups, start=1)
            ]
            self.pr_inter = {
                i: InteractionGate(t[f"pr.inter{i}.weight"], t[f"pr.inter{i}.bias"])
                for i in range(2, len(self.pr_down) + 1)
                if config.use_interaction
            }
            self.pr_up_inter = {
                j: InteractionGate(t[f"pr.up_inter{j}.weight"], t[f"pr.up_inter{j}.bias"])
                for j in range(1, len(self.pr_up))
                if config.use_interaction and config.use_up_interaction
            }
            self.head_real = (t["pr.head_real.weight"], t["pr.head_real.bias"])
            self.head_imag = (t["pr.head_imag.weight"], t["pr.head_imag.bias"])

    @staticmethod
    def _block(t: dict, name: str, groups: int = 1) -> ConvBlock:
        conv = ConvLayer(name, t[f"{name}.weight"], t[f"{name}.bias"], groups)
        return ConvBlock(conv, t[f"{name}.prelu"])

    @staticmethod
    def _gru(t: dict, name: str) -> GroupedGru:
        return GroupedGru(name, t[f"{name}.w_ih"], t[f"{name}.w_hh"], t[f"{name}.bias"])

    def _convs(self) -> list[ConvBlock]:
        blocks = self.mi_down + self.mi_up
        if self.config.has_pr:
            blocks += [self.pr_proj] + self.pr_down + self.pr_up
        return blocks

    def _grus(self) -> list[GroupedGru]:
        return self.mi_gru + (self.pr_gru if self.config.has_pr else [])

    def new_state(self) -> StreamState:
        """Fresh stream state with every conv history and GRU hidden vector registered."""
        state = StreamState(self.config.fft_size, self.config.hop_size, self.dtype)
        for block in self._convs():
            state.register_conv(block.conv.name, block.conv.in_channels)
        for gru in self._grus():
            state.register_gru(gru.name, gru.hidden_size)
        return state

    # -- layer dispatch -----------------------------------------------------

    @staticmethod
    def _run_conv(block: ConvBlock, x: np.ndarray, state: StreamState | None) -> np.ndarray:
        y = conv_batch(block.conv, x) if state is None else conv_step(block.conv, state, x)
        return prelu(y, block.slope)

    @staticmethod
    def _run_gru(gru: GroupedGru, x: np.ndarray, state: StreamState | None) -> np.ndarray:
        return gru_batch(gru, x) if state is None else gru_step(gru, state, x)

    # -- streams ------------------------------------------------------------

    def mi_forward(self, mag: np.ndarray, state: StreamState | None = None) -> MiOutput:
        """
        Magnitude inpainting on one frame (with state) or a (T, F) sequence (state=None).

        Args:
            mag: Input magnitude |X_lr|
            state: Stream state, or None for batch mode

        Returns:
            MiOutput with the full-band magnitude, the gain and the intermediate taps
        """
        mag = np.asarray(mag, dtype=self.dtype)
        if mag.shape[-1] != self.config.bins:
            raise ShapeMismatchError(f"expected {self.config.bins} bins, got {mag.shape[-1]}")

        x = erb_analyze(mag, self.erb).frames
        down_taps = []
        for block in self.mi_down:
            x = self._run_conv(block, x, state)
            down_taps.append(x)
        for gru in self.mi_gru:
            x = self._run_gru(gru, x, state)
        up_taps = []
        for i, block in enumerate(self.mi_up):
            x = self._run_conv(block, x, state)
            if i < len(self.mi_up) - 1:
                x = x + down_taps[-2 - i]
            up_taps.append(x)

        gain, masked = band_guided_mask(mag, x, self.bgm)
        magnitude = np.maximum(mag + masked, 0)
        return MiOutput(magnitude, gain, x, down_taps, up_taps)

    def pr_forward(
        self, ri: np.ndarray, mi: MiOutput | None, state: StreamState | None = None
    ) -> tuple[np.ndarray, np.ndarray]:
        """
        Phase refinement: residual real and imaginary spectra.

        Args:
            ri: Stacked [real, imag] input, (..., 2F)
            mi: MI output of the same frame(s); its taps feed the interactions
            state: Stream state, or None for batch mode

        Returns:
            (residual real, residual imaginary), each (..., F)
        """
        if not self.config.has_pr:
            raise ShapeMismatchError("the lite variant has no phase refinement stream")
        if mi is None and (self.pr_inter or self.pr_up_inter):
            raise ShapeMismatchError("phase refinement needs MI taps for its interactions")

        x = self._run_conv(self.pr_proj, np.asarray(ri, dtype=self.dtype), state)
        for i, block in enumerate(self.pr_down, start=1):
            x = self._run_conv(block, x, state)
            if i in self.pr_inter:
                x = interaction(mi.down_taps[i - 2], x, self.pr_inter[i])
        for gru in self.pr_gru:
            x = self._run_gru(gru, x, state)
        for j, block in enumerate(self.pr_up, start=1):
            x = self._run_conv(block, x, state)
            if j in self.pr_up_inter:
                x = interaction(mi.up_taps[j], x, self.pr_up_inter[j])
        return fc(*self.head_real, x), fc(*self.head_imag, x)

    def _extend(self, spectrum: np.ndarray, state: StreamState | None) -> np.ndarray:
        spectrum = np.asarray(spectrum, dtype=self.complex_dtype)
        B = self.config.base_bins
        mag = np.abs(spectrum)
        phase = wrap_phase(np.angle(spectrum)).astype(self.dtype)
        mi = self.mi_forward(mag, state)

        out = mi.magnitude * np.exp(1j * flip_phase(phase, B))
        # base band: rescale the input bins so unchanged magnitudes stay bit-exact
        low, low_mag, mi_low = spectrum[..., : B + 1], mag[..., : B + 1], mi.magnitude[..., : B + 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(low_mag > 0, mi_low / low_mag, 0)
        out[..., : B + 1] = np.where(low_mag > 0, low * ratio, mi_low)

        if self.config.has_pr:
            ri = np.concatenate([spectrum.real, spectrum.imag], axis=-1)
            real, imag = self.pr_forward(ri, mi, state)
            out = out + (real + 1j * imag)
        return out.astype(self.complex_dtype, copy=False)

    # -- public entry points ------------------------------------------------

    def forward_frame(self, frame: np.ndarray, state: StreamState) -> np.ndarray:
        """One complex input frame in, one extended complex frame out."""
        frame = np.asarray(frame)
        if frame.shape != (self.config.bins,):
            raise ShapeMismatchError(
                f"expected a frame of {self.config.bins} bins, got {frame.shape}"
            )
        return self._extend(frame, state)

    def forward(self, spec: ComplexSpectrogram) -> ComplexSpectrogram:
        """Batch forward over a whole spectrogram from zero state."""
        if spec.num_bins != self.config.bins:
            raise ShapeMismatchError(f"expected {self.config.bins} bins, got {spec.num_bins}")
        return ComplexSpectrogram(self._extend(spec.frames, None), spec.fft_size, spec.hop)

    def process(self, wave: Waveform) -> Waveform:
        """Waveform in, extended waveform of the same length out."""
        if wave.sample_rate != self.config.sample_rate:
            raise InvalidSignalError(
                f"expected {self.config.sample_rate} Hz audio, got {wave.sample_rate} Hz"
            )
        spec = stft(wave, self.config.fft_size, self.config.hop_size)
        out = istft(self.forward(spec))
        logger.debug("processed %d frames (%s variant)", spec.num_frames, self.config.variant)
        return Waveform(out.samples[: len(wave)], wave.sample_rate)
