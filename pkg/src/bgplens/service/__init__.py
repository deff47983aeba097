from .config import Config, load_config
from .pipeline import Pipeline, RunSummary
from .store import Store

__all__ = ["Config", "load_config", "Pipeline", "RunSummary", "Store"]
