from causalscope.service.app import create_app
from causalscope.service.state import EngineHub, HubConfig

__all__ = ["EngineHub", "HubConfig", "create_app"]
