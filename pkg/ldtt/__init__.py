from .config import EqFlags, RunConfig, load_config
from .session import CheckSession

__all__ = ["CheckSession", "EqFlags", "RunConfig", "load_config"]
