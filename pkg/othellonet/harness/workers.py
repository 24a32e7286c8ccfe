"""
Tournament Server with Multi-Process Workers

Architecture:
- Main process owns the job and result queues
- Each worker is a separate process holding its own copy of both policies
- A job is one opening; the worker plays both games of the pair
- Results carry the opening id and are re-ordered by the caller

Each game runs sequentially inside one worker, so a result never depends
on which worker played it.
"""

import logging
import time
from dataclasses import dataclass
from multiprocessing import Event, Process, Queue
from queue import Empty
from typing import List, Optional

from othellonet.core import Board, Player
from othellonet.harness.errors import PolicyFault
from othellonet.harness.games import MatchResult, play_pair
from othellonet.policy import Policy

logger = logging.getLogger(__name__)


@dataclass
class GameJob:
    opening_id: int
    black: int
    white: int
    to_move: int

    def board(self) -> Board:
        return Board(self.black, self.white, Player(self.to_move))

    @classmethod
    def from_board(cls, opening_id: int, board: Board) -> "GameJob":
        return cls(opening_id, board.black, board.white, board.to_move.value)


@dataclass
class JobResult:
    opening_id: int
    match: Optional[MatchResult] = None
    error: Optional[str] = None
    worker_id: int = -1
    processing_time: float = 0.0

    @property
    def success(self) -> bool:
        return self.error is None


def tournament_worker_process(
    worker_id: int,
    policy_a: Policy,
    policy_b: Policy,
    job_queue: Queue,
    result_queue: Queue,
    shutdown_event: Event,
    ready_event: Event,
    torch_threads: int = 1,
):
    """Play opening pairs from `job_queue` until a None job or shutdown."""
    logging.basicConfig(
        level=logging.INFO,
        format=f"%(asctime)s [Worker {worker_id}] %(levelname)s: %(message)s",
        datefmt="%H:%M:%S",
    )
    worker_logger = logging.getLogger(f"tournament_worker_{worker_id}")

    try:
        import torch

        torch.set_num_threads(torch_threads)
    except Exception as e:
        worker_logger.warning(f"Could not set torch threads: {e}")

    ready_event.set()
    worker_logger.debug(f"Worker ready: {policy_a.name} vs {policy_b.name}")

    while not shutdown_event.is_set():
        try:
            job = job_queue.get(timeout=0.5)
        except Empty:
            continue
        if job is None:
            break

        start_time = time.perf_counter()
        try:
            match = play_pair(policy_a, policy_b, job.board(), job.opening_id)
            result = JobResult(job.opening_id, match, worker_id=worker_id)
        except Exception as e:
            worker_logger.error(f"Opening {job.opening_id} failed: {e}")
            result = JobResult(job.opening_id, error=f"{type(e).__name__}: {e}", worker_id=worker_id)
        result.processing_time = time.perf_counter() - start_time
        result_queue.put(result)

    worker_logger.debug("Worker shutting down")


class TournamentServer:
    """
    Pool of worker processes playing opening pairs.

    Usage:
        server = TournamentServer(policy_a, policy_b, num_workers=4)
        server.start()
        for i, opening in enumerate(openings):
            server.submit_job(i, opening.board)
        results = server.get_all_results(len(openings))
        server.shutdown()
    """

    def __init__(self, policy_a: Policy, policy_b: Policy, num_workers: int = 2, torch_threads: int = 1):
        self.policy_a = policy_a
        self.policy_b = policy_b
        self.num_workers = num_workers
        self.torch_threads = torch_threads

        self.workers: List[Process] = []
        self.job_queue: Queue = Queue()
        self.result_queue: Queue = Queue()
        self.shutdown_event = Event()
        self.ready_events = []
        self.is_running = False

    def start(self, timeout: float = 60.0) -> bool:
        if self.is_running:
            logger.warning("Server already running")
            return True

        logger.info(f"Starting {self.num_workers} tournament workers")
        for i in range(self.num_workers):
            ready_event = Event()
            self.ready_events.append(ready_event)
            worker = Process(
                target=tournament_worker_process,
                args=(
                    i,
                    self.policy_a,
                    self.policy_b,
                    self.job_queue,
                    self.result_queue,
                    self.shutdown_event,
                    ready_event,
                    self.torch_threads,
                ),
                daemon=True,
            )
            worker.start()
            self.workers.append(worker)
            logger.debug(f"Started worker process {i} (pid={worker.pid})")

        start_time = time.time()
        for i, ready_event in enumerate(self.ready_events):
            remaining = timeout - (time.time() - start_time)
            if remaining <= 0 or not ready_event.wait(timeout=remaining):
                logger.error(f"Worker {i} failed to start")
                self.shutdown()
                return False

        self.is_running = True
        return True

    def submit_job(self, opening_id: int, board: Board) -> None:
        if not self.is_running:
            raise RuntimeError("Server not running")
        self.job_queue.put(GameJob.from_board(opening_id, board))

    def get_result(self, timeout: float = 30.0) -> Optional[JobResult]:
        try:
            return self.result_queue.get(timeout=timeout)
        except Empty:
            return None

    def get_all_results(self, expected_count: int, timeout: Optional[float] = None) -> List[JobResult]:
        """Collect results in arrival order; raises PolicyFault on the first failed job."""
        results: List[JobResult] = []
        start_time = time.time()
        while len(results) < expected_count:
            if timeout is not None and time.time() - start_time > timeout:
                raise TimeoutError(f"Got {len(results)}/{expected_count} results before timeout")
            if not any(w.is_alive() for w in self.workers):
                raise RuntimeError("All tournament workers exited")
            result = self.get_result(timeout=1.0)
            if result is None:
                continue
            if not result.success:
                raise PolicyFault(f"Opening {result.opening_id}: {result.error}")
            results.append(result)
        return results

    def shutdown(self, timeout: float = 10.0) -> None:
        if not self.is_running and not self.workers:
            return
        self.shutdown_event.set()
        for _ in range(self.num_workers):
            self.job_queue.put(None)
        for i, worker in enumerate(self.workers):
            worker.join(timeout=timeout / max(self.num_workers, 1))
            if worker.is_alive():
                logger.warning(f"Worker {i} didn't terminate, killing...")
                worker.terminate()
                worker.join(timeout=1.0)
        self.workers = []
        self.ready_events = []
        self.is_running = False
        logger.debug("Tournament server shutdown complete")

    def __enter__(self) -> "TournamentServer":
        if not self.start():
            raise RuntimeError("Tournament workers failed to start")
        return self

    def __exit__(self, *exc) -> None:
        self.shutdown()
