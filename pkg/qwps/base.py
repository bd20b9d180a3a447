import asyncio
from typing import Any, Callable, Iterable

from qwps import logging_conf
from qwps.common import get_threads

LOGGER = logging_conf.LOGGER


class AsyncTaskRunner:
    """
    A base class for running blocking computations concurrently.

    Attributes:
        limit (asyncio.Semaphore): Semaphore to limit concurrent tasks.
        threads (int): The concurrency cap the semaphore was built with.
    """
    def __init__(self, limit: int | None = None) -> None:
        """
        Initializes AsyncTaskRunner class.

        Args:
            limit (int, optional): Limits concurrent tasks. \
                Defaults to QWPS_THREADS or 4.
        """
        LOGGER.debug("Creating AsyncTaskRunner class")
        self.threads: int = limit if limit else get_threads()
        if self.threads < 1:
            raise ValueError(f"Thread limit must be positive: {self.threads}")
        self.limit: asyncio.Semaphore = asyncio.Semaphore(self.threads)

    async def run_async(self, func: Callable[..., Any], *args: Any) -> Any:
        """
        Runs one blocking computation in a worker thread.

        Args:
            func (Callable): The computation.
            *args: Positional arguments for the computation.

        Returns:
            Any: The computation result.
        """
        async with self.limit:
            try:
                return await asyncio.to_thread(func, *args)
            except Exception as e:
                LOGGER.error(f"Task {func.__name__}{args} failed: {e}")
                raise

    def map(self, func: Callable[..., Any], items: Iterable[Any]) -> list:
        """
        Applies a computation to every item, results in input order.

        Args:
            func (Callable): One-argument computation.
            items (Iterable): The inputs.

        Returns:
            list: Results in the order of the inputs.
        """
        async def run_async() -> list:
            # The semaphore must belong to the running loop.
            self.limit = asyncio.Semaphore(self.threads)
            tasks = [
                asyncio.create_task(self.run_async(func, item))
                for item in items
            ]
            LOGGER.debug(
                f"Running {len(tasks)} tasks with at most "
                + f"{self.threads} at once"
            )
            return list(await asyncio.gather(*tasks))

        return asyncio.run(run_async())
