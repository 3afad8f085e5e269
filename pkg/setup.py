#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Grid defense planner -- setuptools setup script.

Install:
    python3 setup.py install
    OR
    pip install .

Create source distribution:
    python3 setup.py sdist
"""
from __future__ import annotations

from setuptools import setup

# Read requirements from requirements.txt
def read_requirements():
    with open('requirements.txt') as f:
        return [line.strip() for line in f if line.strip() and not line.startswith('#')]

setup(
    name="grid-defense-planner",
    version="1.0.0",
    description="Defense planning for power grids against coordinated attacks under "
                "load and wind uncertainty",
    license="MIT",
    platforms=["linux"],
    python_requires='>=3.9',
    packages=[
        "src",
        "src.core",
        "src.grid",
        "src.solver",
        "src.optimization",
        "src.reporting",
        "src.cli",
    ],
    package_data={
        "src.reporting": ["schemas/*.json", "templates/*.j2"],
    },
    install_requires=read_requirements(),
    extras_require={"test": ["pytest>=7.4"]},
    scripts=[
        "scripts/grid_defense.py",
    ],
    data_files=[
        ("config", ["config/grid_defense.ini", "config/logging.conf"]),
        ("data/cases", [
            "data/cases/modified_rts79.json",
            "data/cases/three_bus.json",
        ]),
        ("data/reference", [
            "data/reference/defense_budget_losses.csv",
            "data/reference/load_deviation_losses.csv",
        ]),
    ],
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Operating System :: POSIX :: Linux',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3 :: Only',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
)
