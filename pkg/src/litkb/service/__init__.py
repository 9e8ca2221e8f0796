"""HTTP API and persistence tying the pipeline together."""

from litkb.service.store import PRIVILEGES, ServiceConfig, Store
from litkb.service.app import create_app

__all__ = ["PRIVILEGES", "ServiceConfig", "Store", "create_app"]
