"""Settings configuration for hetero-topo."""

import os
from dataclasses import dataclass

from dotenv import load_dotenv

load_dotenv()


def _env_int(name: str, default: str) -> int:
    """Read an integer environment variable."""
    raw = os.getenv(name, default)
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got: {raw}")


def _env_float(name: str, default: str) -> float:
    """Read a float environment variable."""
    raw = os.getenv(name, default)
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"{name} must be a number, got: {raw}")


@dataclass
class RuntimeSettings:
    """Process-level runtime settings."""
    threads: int = 0  # 0 = auto (os.cpu_count())
    log_level: str = "INFO"

    @classmethod
    def from_env(cls) -> "RuntimeSettings":
        """Load runtime settings from environment variables."""
        threads = _env_int("HETERO_TOPO_THREADS", "0")
        if threads < 0:
            raise ValueError(f"HETERO_TOPO_THREADS must be >= 0, got: {threads}")
        return cls(
            threads=threads,
            log_level=os.getenv("HETERO_TOPO_LOG_LEVEL", "INFO").upper(),
        )

    def worker_count(self) -> int:
        """Resolve the effective worker cap."""
        if self.threads == 0:
            return os.cpu_count() or 1
        return self.threads


@dataclass
class MixingSettings:
    """Mixing matrix validation and spectral settings."""
    validation_tol: float = 1e-9
    power_tol: float = 1e-10
    power_max_iter: int = 100_000

    @classmethod
    def from_env(cls) -> "MixingSettings":
        """Load mixing settings from environment variables."""
        return cls(
            validation_tol=_env_float("HETERO_TOPO_VALIDATION_TOL", "1e-9"),
            power_tol=_env_float("HETERO_TOPO_POWER_TOL", "1e-10"),
            power_max_iter=_env_int("HETERO_TOPO_POWER_MAX_ITER", "100000"),
        )


@dataclass
class TopologySettings:
    """Frank-Wolfe topology learning settings."""
    lam: float = 0.1
    iters: int = 10
    gap_tol: float = 0.0
    jacobi_tol: float = 1e-10

    @classmethod
    def from_env(cls) -> "TopologySettings":
        """Load topology learning settings from environment variables."""
        return cls(
            lam=_env_float("HETERO_TOPO_LAMBDA", "0.1"),
            iters=_env_int("HETERO_TOPO_FW_ITERS", "10"),
            gap_tol=_env_float("HETERO_TOPO_GAP_TOL", "0"),
        )


@dataclass
class EstimationSettings:
    """Monte Carlo heterogeneity estimation settings."""
    samples: int = 10_000
    chunk_size: int = 8192  # samples drawn per node per block
    stderr_slack: float = 5.0

    @classmethod
    def from_env(cls) -> "EstimationSettings":
        """Load estimation settings from environment variables."""
        return cls(samples=_env_int("HETERO_TOPO_SAMPLES", "10000"))


@dataclass
class SimulationSettings:
    """D-SGD simulation settings."""
    record_every: int = 10
    epsilon: float = 1e-3

    @classmethod
    def from_env(cls) -> "SimulationSettings":
        """Load simulation settings from environment variables."""
        return cls(
            record_every=_env_int("HETERO_TOPO_RECORD_EVERY", "10"),
            epsilon=_env_float("HETERO_TOPO_EPSILON", "1e-3"),
        )


@dataclass
class Settings:
    """Main settings class combining all configuration."""
    runtime: RuntimeSettings
    mixing: MixingSettings
    topology: TopologySettings
    estimation: EstimationSettings
    simulation: SimulationSettings

    @classmethod
    def from_env(cls) -> "Settings":
        """Load all settings from environment variables."""
        return cls(
            runtime=RuntimeSettings.from_env(),
            mixing=MixingSettings.from_env(),
            topology=TopologySettings.from_env(),
            estimation=EstimationSettings.from_env(),
            simulation=SimulationSettings.from_env(),
        )


# Global settings instance
settings = Settings.from_env()
