"""
Run configuration for the command line and the experiment harness.

Configuration via:
- Constructor parameters
- Environment variables (OTHELLO_DATA_DIR, OTHELLO_WORKERS,
  OTHELLO_TORCH_THREADS, OTHELLO_SEED), optionally from a `.env` file
- Auto-detected defaults
"""

import os
import logging
from pathlib import Path
from multiprocessing import cpu_count
from typing import Optional

import torch

logger = logging.getLogger(__name__)

CONFIGS_DIR = Path(__file__).parent / "configs"
TRAIN_CONFIGS_DIR = CONFIGS_DIR / "train"
DEFAULT_TRAIN_CONFIG = TRAIN_CONFIGS_DIR / "base.yaml"


class RunConfig:
    """
    Where data lives and how much of the machine a run may use.

    Usage:
        # Auto-detect
        config = RunConfig()

        # Force values
        config = RunConfig(workers=4, torch_threads=1)

        # Via environment variables
        os.environ["OTHELLO_WORKERS"] = "8"
        config = RunConfig()
    """

    def __init__(
        self,
        data_dir: Optional[str] = None,
        workers: Optional[int] = None,
        torch_threads: Optional[int] = None,
        seed: Optional[int] = None,
    ):
        self.n_cpu = cpu_count()
        self.data_dir = self._resolve_data_dir(data_dir)
        self.workers = self._resolve_int(workers, "OTHELLO_WORKERS", 1, minimum=1)
        # Tournament workers each get their own torch threads
        default_threads = max(1, self.n_cpu // self.workers)
        self.torch_threads = self._resolve_int(torch_threads, "OTHELLO_TORCH_THREADS", default_threads, minimum=1)
        self.seed = self._resolve_int(seed, "OTHELLO_SEED", 0)

        logger.info(
            f"Run config: data_dir={self.data_dir}, workers={self.workers}, "
            f"torch_threads={self.torch_threads}, seed={self.seed}, cpus={self.n_cpu}"
        )

    def _resolve_data_dir(self, data_dir: Optional[str]) -> Path:
        """Resolve the data directory from parameter, environment, or default."""
        if data_dir:
            return Path(data_dir)
        env_dir = os.environ.get("OTHELLO_DATA_DIR")
        if env_dir:
            return Path(env_dir)
        return Path("data")

    @staticmethod
    def _resolve_int(value: Optional[int], env_name: str, default: int, minimum: Optional[int] = None) -> int:
        if value is None:
            env_value = os.environ.get(env_name)
            if env_value is not None and env_value.strip():
                try:
                    value = int(env_value)
                except ValueError:
                    logger.warning(f"Ignoring non-integer {env_name}={env_value!r}")
        if value is None:
            value = default
        if minimum is not None and value < minimum:
            raise ValueError(f"{env_name.lower().removeprefix('othello_')} must be >= {minimum}, got {value}")
        return value

    def apply_torch_threads(self) -> None:
        torch.set_num_threads(self.torch_threads)

    def path(self, *parts: str) -> Path:
        """A path under the data directory."""
        return self.data_dir.joinpath(*parts)
