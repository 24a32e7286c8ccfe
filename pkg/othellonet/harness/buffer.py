"""
Ordered Result Buffer

Collects results that arrive out of order from parallel workers and
releases them strictly by position, so a parallel run produces the same
sequence as a sequential one.
"""

import logging
from typing import Any, Dict, List

logger = logging.getLogger(__name__)


class OrderedResultBuffer:
    """
    Usage:
        buffer = OrderedResultBuffer()
        buffer.add_with_position(result, position=3)   # held back
        buffer.add_with_position(result0, position=0)  # released
        ready = buffer.drain()
    """

    def __init__(self, start: int = 0):
        self.queue: List[Any] = []  # released in order, not yet drained
        self.pending: Dict[int, Any] = {}  # {position: result}
        self.next_position = start

    def add_with_position(self, result: Any, position: int) -> None:
        if position < self.next_position or position in self.pending:
            raise ValueError(f"Position {position} was already added")
        self.pending[position] = result
        logger.debug(f"Buffered result at position {position} (next expected {self.next_position})")
        self._move_next_pending_to_queue()

    def _move_next_pending_to_queue(self) -> None:
        while self.next_position in self.pending:
            self.queue.append(self.pending.pop(self.next_position))
            self.next_position += 1

    def drain(self) -> List[Any]:
        ready, self.queue = self.queue, []
        return ready

    def __len__(self) -> int:
        return len(self.queue) + len(self.pending)

    @property
    def complete(self) -> bool:
        return not self.pending
