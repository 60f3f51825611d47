import logging
import time
from threading import Thread

from fair_sor_api.analysis import diagnose
from fair_sor_api.config import PipelineConfig
from fair_sor_api.constants import MAX_ORACLE_POINTS
from fair_sor_api.errors import FairSorError
from fair_sor_api.fair import balanced_cluster, fair_tk_cluster
from fair_sor_api.metric import generate_instance, load_instance, save_instance
from fair_sor_api.oracle import opt_balanced_bruteforce, opt_fair_bruteforce

logger = logging.getLogger("fair_sor.client")


class FairClient(object):
    """Runs pipelines, oracles and diagnostics, reporting through callbacks.

    Every operation takes optional success_cb and error_cb. With a success_cb the work
    runs on a new thread and the thread is returned; without one it runs in place and
    the result is returned, or None after error_cb was called.
    """

    def __init__(self, config=None, error_cb=None):
        if error_cb:
            self.error_cb = error_cb
        else:
            self.error_cb = self._base_error
        self.config = config if config is not None else PipelineConfig()

    def generate(self, seed, n, ell, mode, box, out=None, success_cb=None, error_cb=None):
        def job():
            inst = generate_instance(seed, n, ell, mode=mode, box=box)
            if out is not None:
                save_instance(inst, out)
            return inst
        return self._run(job, success_cb, error_cb)

    def load(self, path, success_cb=None, error_cb=None):
        return self._run(lambda: load_instance(path), success_cb, error_cb)

    def cluster(self, inst, t, k, balanced=False, success_cb=None, error_cb=None):
        return self._run(lambda: self._cluster(inst, t, k, balanced), success_cb, error_cb)

    def oracle(self, inst, t, k, balanced=False, success_cb=None, error_cb=None):
        return self._run(lambda: self._oracle(inst, t, k, balanced), success_cb, error_cb)

    def diagnose(self, inst, t, k, balanced=False, instance_id="", success_cb=None, error_cb=None):
        def job():
            result = self._cluster(inst, t, k, balanced)
            opt = self._oracle(inst, t, k, balanced)
            return result, opt, diagnose(inst, result, opt, instance_id)
        return self._run(job, success_cb, error_cb)

    def trial(self, inst, t, k, balanced=False, instance_id=""):
        """Pipeline, then oracle and diagnostics when the instance is small enough."""
        started = time.perf_counter()
        result = self._cluster(inst, t, k, balanced)
        runtime_ms = (time.perf_counter() - started) * 1000.0
        opt = None
        report = None
        if inst.n <= MAX_ORACLE_POINTS:
            opt = self._oracle(inst, t, k, balanced)
            report = diagnose(inst, result, opt, instance_id)
        return result, opt, report, runtime_ms

    def run_parallel(self, jobs, workers=1):
        """Run callables on up to workers threads; results keep the order of jobs."""
        results = [None] * len(jobs)
        count = max(1, min(workers, len(jobs)))

        def work(offset):
            for i in range(offset, len(jobs), count):
                try:
                    results[i] = self._run(jobs[i], None, None)
                except Exception:
                    # the slot stays None, the worker moves on to its next job
                    logger.exception(f"Job {i} failed")

        threads = [Thread(target=work, args=(w,)) for w in range(count)]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join()
        return results

    def _cluster(self, inst, t, k, balanced):
        if balanced:
            return balanced_cluster(inst, k, self.config.solver, self.config.epsilon, self.config.alpha)
        return fair_tk_cluster(inst, t, k, self.config.solver, self.config.epsilon, self.config.alpha)

    def _oracle(self, inst, t, k, balanced):
        if balanced:
            return opt_balanced_bruteforce(inst, k)
        return opt_fair_bruteforce(inst, t, k)

    def _run(self, job, success_cb, error_cb):
        thread = self._setup_thread(job, success_cb, error_cb)
        if thread:
            thread.start()
            return thread
        return self._call(job, None, error_cb)

    def _setup_thread(self, job, success_cb, error_cb):
        thread = None
        if success_cb:
            thread = Thread(target=self._call, args=(job, success_cb, error_cb))
        return thread

    def _call(self, job, success_cb, error_cb):
        try:
            result = job()
        except FairSorError as error:
            logger.debug(f"{type(error).__name__}: {error}")
            (error_cb or self.error_cb)(error.title, error)
            return None
        if success_cb:
            success_cb(result)
        return result

    def _base_error(self, title, error):
        logger.error(f"{title} {error}")
