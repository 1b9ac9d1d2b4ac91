"""
Pytest configuration and fixtures for the Yang-Baxter deformation tests.
"""
import json
import random
import tempfile
from pathlib import Path

import pytest

from app.scalars import omega, rational
from app.standard_p import ParamSet


@pytest.fixture
def temp_work_dir():
    """Create a temporary working directory."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def rng():
    """Seeded random source."""
    return random.Random(20240601)


@pytest.fixture
def n2_params():
    """Standard parameters N=2, q=2, a=3."""
    return ParamSet(2, 3, {(1, 2): 2})


@pytest.fixture
def principal_reference():
    """N=4 family satisfying the principal constraints for (k, i, j, l) = (1, 2, 3, 4)."""
    return ParamSet(4, 2, {
        (1, 2): 3, (1, 3): 5, (2, 3): 7,
        (1, 4): 15, (2, 4): 42, (3, 4): rational(5, 14),
    })


@pytest.fixture
def exceptional_reference():
    """N=3 family at a = w satisfying the exceptional upper constraints for (i, j, k) = (1, 2, 3)."""
    w = omega()
    return ParamSet(3, w, {(2, 3): 2, (1, 3): rational(1, 2), (1, 2): w / 4})


@pytest.fixture
def params_file(temp_work_dir, n2_params):
    """Write the N=2 parameter set to a JSON file."""
    path = temp_work_dir / "params.json"
    path.write_text(json.dumps(n2_params.to_json()))
    return str(path)


@pytest.fixture
def principal_params_file(temp_work_dir, principal_reference):
    """Write the N=4 principal reference family to a JSON file."""
    path = temp_work_dir / "principal.json"
    path.write_text(json.dumps(principal_reference.to_json()))
    return str(path)


@pytest.fixture
def malformed_params_file(temp_work_dir):
    """A parameter file with a bad q value."""
    path = temp_work_dir / "bad.json"
    path.write_text(json.dumps({"n": 2, "a": 3, "q": [{"i": 1, "j": 2, "val": "x"}]}))
    return str(path)


@pytest.fixture
def mock_celery_task():
    """Run Celery tasks eagerly for unit tests."""
    from app.tasks import celery_app

    celery_app.conf.task_always_eager = True
    celery_app.conf.task_eager_propagates = True
    yield celery_app
    celery_app.conf.task_always_eager = False
    celery_app.conf.task_eager_propagates = False
