import sys
from pathlib import Path

from setuptools import setup

if sys.version_info[0:2] < (3, 8):
    raise RuntimeError("This package requires Python 3.8+.")

setup(
    name="banachsvd",
    use_scm_version={
        "version_scheme": "guess-next-dev",
        "local_scheme": "dirty-tag"
    },
    packages=[
        "banachsvd",
        # norms, duality maps and the minimum-norm kernel
        "banachsvd.spaces",
        "banachsvd.operators",
        "banachsvd.deflation",
    ],
    license="MIT",
    description="Spectral-like decompositions of matrices between non-Euclidean normed spaces",
    long_description=Path(__file__).with_name("README.rst").read_text(encoding="utf-8"),
    setup_requires=[
        "setuptools_scm",
        "pytest-runner"
    ],
    install_requires=[
        "cached_property>=1.3,<1.6",
        "click>=8.2",
        "tqdm",
        "numpy>=1.17",
        "scipy>=1.4",
        "cvxpy>=1.3",
    ],
    extras_require={
        "docs": [
            "sphinx>=1.5.0",
            "sphinx-autodoc-typehints>=1.2.1",
            "guzzle_sphinx_theme",
        ],
    },
    tests_require=[
        "pytest",
        "pytest-cov"
    ],
    python_requires=">=3.8",
    entry_points={
        "console_scripts": ["banachsvd=banachsvd.cli:cli"]
    }
)
