import os

from dotenv import load_dotenv

load_dotenv()


def _csv(name: str, default: str) -> list[str]:
    return [item.strip() for item in os.getenv(name, default).split(",") if item.strip()]


class Settings:
    """Engine settings loaded from environment variables."""

    # Pipeline framing (fixed at 48 kHz / 32 ms Hann / 50% overlap)
    SAMPLE_RATE: int = int(os.getenv("SAMPLE_RATE", "48000"))
    FFT_SIZE: int = int(os.getenv("FFT_SIZE", "1536"))
    HOP_SIZE: int = int(os.getenv("HOP_SIZE", "768"))

    # Logging
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO").upper()

    # Engine
    DEFAULT_VARIANT: str = os.getenv("DEFAULT_VARIANT", "full")
    ENGINE_DTYPE: str = os.getenv("ENGINE_DTYPE", "float64")
    STREAM_CHUNK_SAMPLES: int = int(os.getenv("STREAM_CHUNK_SAMPLES", "768"))

    # Benchmark
    BENCH_SECONDS: float = float(os.getenv("BENCH_SECONDS", "10"))
    BENCH_SEED: int = int(os.getenv("BENCH_SEED", "0"))

    # Evaluation
    EVAL_METRICS: list[str] = _csv("EVAL_METRICS", "lsd,segsnr,mrstft,wav")
    EVAL_OUTPUT_FORMAT: str = os.getenv("EVAL_OUTPUT_FORMAT", "text").lower()
    SWEEP_CUTOFFS_HZ: list[float] = [
        float(c) for c in _csv("SWEEP_CUTOFFS_HZ", "4000,8000,12000,16000,20000")
    ]
    SWEEP_SECONDS: float = float(os.getenv("SWEEP_SECONDS", "2"))

    # Bandwidth simulation
    LOWPASS_TAPS: int = int(os.getenv("LOWPASS_TAPS", "511"))
    LOWPASS_ATTENUATION_DB: float = float(os.getenv("LOWPASS_ATTENUATION_DB", "80"))
    CROSSFADE_SECONDS: float = float(os.getenv("CROSSFADE_SECONDS", "0.01"))
    BANDWIDTH_THRESHOLD_DB: float = float(os.getenv("BANDWIDTH_THRESHOLD_DB", "50"))


settings = Settings()
