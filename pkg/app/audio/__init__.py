"""Audio file and raw PCM I/O."""
