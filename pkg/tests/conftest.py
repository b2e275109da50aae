"""
Pytest configuration and fixtures.

Ensures damped_kernel package can be imported from tests.
"""

import sys
import os
from pathlib import Path

import pytest

# Add the repository root to Python path so tests can import damped_kernel
repo_root = Path(__file__).parent.parent
sys.path.insert(0, str(repo_root))

# Also set PYTHONPATH environment variable
os.environ['PYTHONPATH'] = str(repo_root)

from damped_kernel.classical.core import DampedParams  # noqa: E402


@pytest.fixture
def standard_params():
    """κ = 0.6, ħ = 1: the reference regime."""
    return DampedParams(kappa=0.6, hbar=1.0)


@pytest.fixture
def free_params():
    return DampedParams(kappa=0.0, hbar=1.0)


@pytest.fixture
def isolated_cwd(tmp_path, monkeypatch):
    """Run in an empty directory with no config or output env vars set."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("DAMPED_KERNEL_CONFIG_PATH", raising=False)
    monkeypatch.setenv("DAMPED_KERNEL_OUTPUT_DIR", str(tmp_path / "outputs"))
    return tmp_path
