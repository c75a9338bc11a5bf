"""
In-memory store for walk objects shared between tool calls.

Coins, states, trajectories, residual fields and run tables are kept by name. Each entry
records its kind, its length along the leading axis, and, for derived objects, the parent
it was computed from and the operation that produced it.
"""

from dataclasses import dataclass
from typing import Any, Optional

import numpy as np


@dataclass
class DatasetInfo:
    name: str
    kind: str
    length: int
    labels: list[str]
    parent: Optional[str] = None
    transform: Optional[str] = None


def classify(obj: Any) -> tuple[str, int, list[str]]:
    """Kind, leading-axis length and axis labels of a session object."""
    if hasattr(obj, "slices"):
        return "trajectory", len(obj), ["slice", "component", "site"]
    if hasattr(obj, "matrices"):
        return "coin", obj.n_steps, ["step", "site", "row", "col"]
    if hasattr(obj, "amplitudes"):
        return "state", obj.n_sites, ["component", "site"]
    if hasattr(obj, "epsilons"):
        return "convergence", len(obj.epsilons), ["epsilon", "error"]
    if hasattr(obj, "q") and hasattr(obj, "p"):
        return "mechanics", len(obj), ["q", "p"] + (["t", "Pi"] if obj.extended else [])
    if isinstance(obj, np.ndarray):
        return "field", (obj.shape[0] if obj.ndim else 1), [f"axis_{i}" for i in range(obj.ndim)]
    if isinstance(obj, dict):
        return "table", len(obj), list(obj)
    return type(obj).__name__.lower(), 0, []


class Session:
    def __init__(self, capacity: int = 50):
        self._objects: dict[str, Any] = {}
        self._entries: dict[str, DatasetInfo] = {}
        self._capacity = capacity

    def add(self, obj: Any, name: str = None, parent: str = None,
            transform: str = None) -> tuple[str, DatasetInfo]:
        """
        Store an object. Unnamed objects are named after their kind, or after the parent
        and the operation for derived ones. An explicit name replaces any previous entry.
        """
        kind, length, labels = classify(obj)
        if name is None:
            name = self._fresh(f"{parent}_{transform.split('(')[0]}" if parent else kind)
        entry = DatasetInfo(name, kind, length, labels, parent, transform)
        self._objects.pop(name, None)
        self._objects[name] = obj
        self._entries[name] = entry
        self._evict(keep=name)
        return name, entry

    def get(self, name: str) -> Any:
        if name not in self._objects:
            raise KeyError(f"Dataset '{name}' not found. Available: {list(self._objects)}")
        return self._objects[name]

    def info(self, name: str) -> DatasetInfo:
        self.get(name)
        return self._entries[name]

    def entries(self) -> list[DatasetInfo]:
        return list(self._entries.values())

    def remove(self, name: str) -> bool:
        if name not in self._objects:
            return False
        del self._objects[name], self._entries[name]
        return True

    def clear(self):
        self._objects.clear()
        self._entries.clear()

    def _fresh(self, base: str) -> str:
        name, n = base, 1
        while name in self._objects:
            n += 1
            name = f"{base}_{n}"
        return name

    def _evict(self, keep: str):
        # oldest first; objects with live children stay
        while len(self._objects) > self._capacity:
            parents = {e.parent for e in self._entries.values()}
            victim = next((n for n in self._objects if n != keep and n not in parents), None)
            if victim is None:
                return
            self.remove(victim)


_session: Optional[Session] = None


def get_session() -> Session:
    global _session
    if _session is None:
        _session = Session()
    return _session


def reset_session():
    global _session
    _session = None
