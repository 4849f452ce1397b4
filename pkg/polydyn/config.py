from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from dotenv import dotenv_values


@dataclass
class Config:
    """Computation caps and defaults, optionally read from a settings file."""

    max_steps: int = 4096
    max_bits: int = 1_000_000
    q_max: int = 64
    graph_depth: int = 8
    green_budget: int = 500
    mset_grid: int = 256
    mset_budget: int = 2000
    render_budget: int = 500
    log_path: Optional[Path] = None

    @classmethod
    def from_file(cls, env_file: Optional[Path] = None) -> "Config":
        """Load settings from a dotenv-format file; the process environment is never read."""
        values: dict[str, Optional[str]] = {}
        if env_file:
            if not env_file.is_file():
                raise ValueError(f"Settings file not found: {env_file}")
            values = dotenv_values(env_file)

        def positive_int(name: str, default: int) -> int:
            raw = values.get(name)
            if raw is None or raw == "":
                return default
            try:
                value = int(raw)
            except ValueError:
                raise ValueError(f"{name} must be an integer, got {raw!r}") from None
            if value < 1:
                raise ValueError(f"{name} must be positive, got {value}")
            return value

        log_path = values.get("POLYDYN_LOG_PATH")
        return cls(
            max_steps=positive_int("POLYDYN_MAX_STEPS", cls.max_steps),
            max_bits=positive_int("POLYDYN_MAX_BITS", cls.max_bits),
            q_max=positive_int("POLYDYN_Q_MAX", cls.q_max),
            graph_depth=positive_int("POLYDYN_GRAPH_DEPTH", cls.graph_depth),
            green_budget=positive_int("POLYDYN_GREEN_BUDGET", cls.green_budget),
            mset_grid=positive_int("POLYDYN_MSET_GRID", cls.mset_grid),
            mset_budget=positive_int("POLYDYN_MSET_BUDGET", cls.mset_budget),
            render_budget=positive_int("POLYDYN_RENDER_BUDGET", cls.render_budget),
            log_path=Path(log_path) if log_path else None,
        )
