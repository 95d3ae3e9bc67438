from bugscribe.service.app import create_app
from bugscribe.service.config import ServiceConfig, load_config
from bugscribe.service.store import AppStore, AppSummary

__all__ = ["AppStore", "AppSummary", "ServiceConfig", "create_app", "load_config"]
