"""
Timing and numerical-work counters.
"""
import time
import functools
import threading
from typing import Dict, Any, Callable

from src.utils.logging_config import get_logger

logger = get_logger(__name__)


def measure_time(func: Callable) -> Callable:
    """Decorator to measure function execution time."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        start_time = time.perf_counter()
        result = func(*args, **kwargs)
        execution_time = time.perf_counter() - start_time
        logger.info(f"{func.__name__} executed in {execution_time:.2f} seconds")
        return result
    return wrapper


class MetricsCollector:
    """Collect quadrature and tracing work counters.

    Counters are updated from worker threads during parallel scans, so all
    mutation goes through a lock.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self.metrics = {
            "quadrature_count": 0,
            "quadrature_levels": 0,
            "quadrature_failures": 0,
            "quadrature_cache_hits": 0,
            "quadrature_cache_misses": 0,
            "trace_segments": 0,
        }

    def record_quadrature(self, levels: int, failed: bool = False):
        """Record one double-exponential evaluation."""
        with self._lock:
            self.metrics["quadrature_count"] += 1
            self.metrics["quadrature_levels"] += levels
            if failed:
                self.metrics["quadrature_failures"] += 1

    def record_cache_hit(self):
        with self._lock:
            self.metrics["quadrature_cache_hits"] += 1

    def record_cache_miss(self):
        with self._lock:
            self.metrics["quadrature_cache_misses"] += 1

    def record_segments(self, count: int):
        with self._lock:
            self.metrics["trace_segments"] += count

    def get_metrics(self) -> Dict[str, Any]:
        """Get current metrics with derived rates."""
        with self._lock:
            snapshot = dict(self.metrics)
        cache_total = snapshot["quadrature_cache_hits"] + snapshot["quadrature_cache_misses"]
        count = snapshot["quadrature_count"]
        return {
            **snapshot,
            "cache_hit_rate": snapshot["quadrature_cache_hits"] / cache_total if cache_total > 0 else 0,
            "failure_rate": snapshot["quadrature_failures"] / count if count > 0 else 0,
            "mean_levels": snapshot["quadrature_levels"] / count if count > 0 else 0,
        }

    def reset_metrics(self):
        """Reset all metrics."""
        with self._lock:
            self.metrics = {key: 0 for key in self.metrics}


# Global metrics collector instance
metrics_collector = MetricsCollector()
