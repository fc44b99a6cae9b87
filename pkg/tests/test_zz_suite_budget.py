"""Named to sort last: asserts the whole pytest session stayed inside budget."""

import time


def test_full_suite_under_five_minutes(session_started):
    elapsed = time.perf_counter() - session_started
    print(f"\nfull suite wall time so far: {elapsed:.1f} s (budget 300 s)")
    assert elapsed < 300.0
