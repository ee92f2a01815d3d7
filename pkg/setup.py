#!/usr/bin/env python3
"""
Setup script for Bipolar Duo Louvain
"""

from setuptools import setup
from pathlib import Path

# Read README for long description
readme_file = Path(__file__).parent / "README.md"
long_description = readme_file.read_text(encoding='utf-8') if readme_file.exists() else ""

# Read requirements
requirements_file = Path(__file__).parent / "requirements.txt"
requirements = []
if requirements_file.exists():
    requirements = [
        line.strip()
        for line in requirements_file.read_text(encoding='utf-8').splitlines()
        if line.strip() and not line.startswith('#') and not line.startswith('pytest')
    ]

# Read version
version = "1.0.0"
version_file = Path(__file__).parent / "VERSION"
if version_file.exists():
    version = version_file.read_text(encoding='utf-8').strip()

setup(
    name="bipolar-duo-louvain",
    version=version,
    description="Community detection on graphs with multiple bipolar fuzzy measures",
    long_description=long_description,
    long_description_content_type="text/markdown",
    py_modules=[
        "aggregation",
        "benchmark",
        "bipolar_graph",
        "cli",
        "community",
        "config",
        "errors",
        "experiments",
        "fuzzy_measure",
        "matrix_io",
        "metrics",
        "monitoring",
        "schemas",
        "weighted_graph",
    ],
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Information Analysis",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Operating System :: OS Independent",
        "Environment :: Console",
    ],
    keywords="community-detection louvain modularity fuzzy-measures shapley bipolar",
    python_requires=">=3.10",
    install_requires=requirements,
    extras_require={
        "dev": [
            "pytest>=7.4.0",
            "pytest-cov>=4.1.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "bipolar-louvain=cli:cli",
        ],
    },
    data_files=[
        ("config", ["config.yaml"]),
        ("data/example1", [str(p) for p in sorted(Path("data/example1").glob("*"))]),
    ],
    zip_safe=False,
    platforms=["any"],
    license="MIT",
    test_suite="tests",
)
