"""Collects one pass/fail line per acceptance criterion."""

import time

RESULTS = []


class Recorder:
    def __init__(self, name):
        self.name = name
        self.label = name
        self.details = []
        self.start = time.perf_counter()
        self.failed = []

    def setup(self, label):
        self.label = label
        self.start = time.perf_counter()

    def check(self, ok, detail):
        """Record a sub-check; failures are collected and asserted at the end."""
        self.details.append(("ok  " if ok else "FAIL") + " " + detail)
        if not ok:
            self.failed.append(detail)

    def elapsed(self):
        return time.perf_counter() - self.start

    def runtime(self, limit):
        took = self.elapsed()
        self.check(took < limit, f"runtime {took:.2f}s < {limit}s")

    def verdict(self):
        assert not self.failed, "; ".join(self.failed)

    def finish(self):
        status = "PASS" if not self.failed else "FAIL"
        line = f"[{status}] {self.label}"
        print("\n" + line)
        for d in self.details:
            print("    " + d)
        RESULTS.append(line + "  (" + "; ".join(self.failed or ["all checks met"]) + ")")
