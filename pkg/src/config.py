"""
Runtime configuration for the CHoS toolkit.
"""

import os
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv


@dataclass
class Config:
    """Process-level settings that are not physics parameters."""

    out_dir: str = "runs"
    jobs: int = 1
    log_level: str = "INFO"

    # Snapshot decimation target: stride defaults to ceil(nt / snapshot_points)
    snapshot_points: int = 200

    @classmethod
    def from_env(cls) -> "Config":
        """Create configuration from environment variables (and a .env file)."""
        load_dotenv()

        jobs = int(os.getenv("CHOS_JOBS", "1"))
        if jobs < 1:
            raise ValueError("CHOS_JOBS must be a positive integer")

        return cls(
            out_dir=os.getenv("CHOS_OUT_DIR", "runs"),
            jobs=jobs,
            log_level=os.getenv("CHOS_LOG_LEVEL", "INFO").upper(),
            snapshot_points=int(os.getenv("CHOS_SNAPSHOT_POINTS", "200")),
        )


# Global config instance
_config: Optional[Config] = None


def get_config() -> Config:
    """Get the global configuration instance."""
    global _config
    if _config is None:
        _config = Config.from_env()
    return _config


def set_config(config: Config) -> None:
    """Set the global configuration instance."""
    global _config
    _config = config
