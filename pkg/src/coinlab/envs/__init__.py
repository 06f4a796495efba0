from . import bar, leader_follower
from .bar import BarConfig
from .leader_follower import LFConfig

__all__ = ["bar", "leader_follower", "BarConfig", "LFConfig"]
