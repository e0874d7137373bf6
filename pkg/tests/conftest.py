import os

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from nilhom.weights import enumerate_weights

settings.register_profile(
    "default", max_examples=60, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def weights(ns=(3, 4, 5)):
    """Strategy over weight vectors of S_n for the given n."""
    return st.sampled_from([w for n in ns for w in enumerate_weights(n)])


def torsion_weights(ns=(3, 4, 5)):
    return st.sampled_from([w for n in ns for w in enumerate_weights(n) if len(set(w)) < n])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})")
