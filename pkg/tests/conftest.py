"""Session-scoped rendered scenes shared across test modules."""

import pytest

from pickplan import SceneSpec, inpaint_invalid, random_scene


def _bundle(spec: SceneSpec) -> dict:
    color, depth, truth = spec.render()
    return {"spec": spec, "color": color, "depth": inpaint_invalid(depth),
            "truth": truth}


@pytest.fixture(scope="session")
def bag_bundle():
    """One random single-bag scene with sensor noise."""
    objects = random_scene(1, 0, rng_seed=42)
    return _bundle(SceneSpec(objects=tuple(objects), rng_seed=43))


@pytest.fixture(scope="session")
def envelope_bundle():
    objects = random_scene(0, 1, rng_seed=7)
    return _bundle(SceneSpec(objects=tuple(objects), rng_seed=8))


@pytest.fixture(scope="session")
def mixed_bundle():
    """Two bags and two envelopes, possibly overlapping."""
    objects = random_scene(2, 2, rng_seed=99)
    return _bundle(SceneSpec(objects=tuple(objects), rng_seed=100))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one PASS/FAIL line per acceptance criterion."""
    verdicts = {}
    for outcome in ("failed", "error", "passed"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            verdicts.setdefault(name, "PASS" if outcome == "passed" else "FAIL")
    if not verdicts:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, verdict in verdicts.items():
        terminalreporter.write_line(f"  {verdict} {name}")
