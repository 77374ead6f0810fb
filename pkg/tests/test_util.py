import threading
from time import time_ns

import pytest
from pydantic import ValidationError

from util.log import Log
from util.pool import parallel_map
from util.settings import load_settings
from util.status import Status
from util.versionstamp import stamp_time, versionstamp


def test_run_ids_are_unique_and_timestamped():
    vm = versionstamp()
    before = time_ns() // 1_000
    ids = [vm() for _ in range(1000)]
    after = time_ns() // 1_000
    assert len(set(ids)) == len(ids)
    assert all(len(i) == 24 for i in ids)
    assert sorted(ids) == ids
    assert before <= stamp_time(ids[0]) <= stamp_time(ids[-1]) <= after


def test_stamp_time_rejects_other_strings():
    with pytest.raises(ValueError):
        stamp_time("abc")


def test_run_ids_across_threads():
    vm = versionstamp()
    out = []
    lock = threading.Lock()

    def work():
        for _ in range(200):
            i = vm()
            with lock:
                out.append(i)

    threads = [threading.Thread(target=work) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(set(out)) == 800


def test_parallel_map_preserves_order():
    items = list(range(50))
    assert parallel_map(lambda x: x * x, items, threads=4) == [x * x for x in items]
    assert parallel_map(lambda x: x + 1, items, threads=1) == [x + 1 for x in items]
    assert parallel_map(lambda x: x, [], threads=4) == []


def test_settings_from_environment(monkeypatch, output_dir):
    monkeypatch.setenv("ZERODIFF_THREADS", "3")
    s = load_settings()
    assert s.threads == 3
    assert s.output_dir == str(output_dir)
    monkeypatch.delenv("ZERODIFF_OUTPUT_DIR")
    assert load_settings().output_dir is None
    monkeypatch.setenv("ZERODIFF_THREADS", "0")
    with pytest.raises(ValidationError):
        load_settings()


def test_log_context():
    base = Log("test")
    assert base.logger.name == "zerodiff.test"
    child = base.with_context(experiment="wiman", seed=1)
    grandchild = child.with_context(check="ratio")
    assert base.context == {}
    assert grandchild.context == {"experiment": "wiman", "seed": 1, "check": "ratio"}
    grandchild.info("message", value=1.5)
    with grandchild.trace("span", radii=[1.0, 2.0], bundle=object()) as span:
        assert span.is_recording()


def test_status_values():
    assert Status("passed") is Status.PASSED
    assert {s.value for s in Status} == {"pending", "running", "passed", "failed", "error"}
