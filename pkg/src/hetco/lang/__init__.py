"""Bundled behavioural languages."""

from .cpn import CPNAdapter, CPNModel
from .lts import LTSAdapter, LTSModel
from .statechart import SCModel, StatechartAdapter

__all__ = ["CPNAdapter", "CPNModel", "LTSAdapter", "LTSModel", "SCModel", "StatechartAdapter"]
